"""Path-complete graph Lyapunov inequalities for discrete-time switched linear systems."""

__version__ = "0.1.0"

from .counterexample import build_sigma_w, subproduct_property, synthesize_counterexample
from .graph import LabeledGraph, Nfa, expand, mirror, parse_graph, parse_nfa, serialize_graph
from .invariant import bi_invariance_check, build_invariant, check_decrease, eval_W
from .linalg import spectral_radius
from .lyapunov import (
    Certificate,
    MatrixSet,
    entrywise_equivalence,
    jsr_lower_bound,
    verify_certificate,
)
from .pathcomplete import check_path_complete, readable_bruteforce
from .reduction import nfa_universal_exact, reduce_universality
from .solver import baseline_solver, gamma_star_bisection

__all__ = [
    "Certificate", "LabeledGraph", "MatrixSet", "Nfa",
    "baseline_solver", "bi_invariance_check", "build_invariant", "build_sigma_w",
    "check_decrease", "check_path_complete", "entrywise_equivalence", "eval_W", "expand",
    "gamma_star_bisection", "jsr_lower_bound", "mirror", "nfa_universal_exact",
    "parse_graph", "parse_nfa", "readable_bruteforce", "reduce_universality",
    "serialize_graph", "spectral_radius", "subproduct_property",
    "synthesize_counterexample", "verify_certificate",
]
