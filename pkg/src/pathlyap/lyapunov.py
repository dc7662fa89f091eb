"""Quadratic Lyapunov inequalities on labeled graphs: data types, verification, JSR lower bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, CertificateError, DimensionError
from .graph import LabeledGraph, Word, check_word
from .linalg import eig_extremes, is_symmetric, lambda_min, spectral_radius

DEFAULT_DELTA = 1e-9
DEFAULT_WORD_BUDGET = 10**6


@dataclass(frozen=True)
class MatrixSet:
    """One ``n x n`` real matrix per alphabet symbol."""

    symbols: tuple[str, ...]
    matrices: np.ndarray = field(repr=False)  # shape (m, n, n)

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise DimensionError(f"matrix set must have shape (m, n, n), got {mats.shape}")
        if mats.shape[0] != len(self.symbols):
            raise DimensionError("one matrix per symbol is required")
        if len(set(self.symbols)) != len(self.symbols):
            raise DimensionError("duplicate symbol in matrix set")
        if not np.all(np.isfinite(mats)):
            raise ValueError("matrix set has non-finite entries")
        mats.setflags(write=False)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Sequence], symbols: Optional[Sequence[str]] = None):
        symbols = tuple(symbols) if symbols is not None else tuple(mapping)
        try:
            return cls(symbols, np.array([np.asarray(mapping[s], dtype=float) for s in symbols]))
        except KeyError as exc:
            raise DimensionError(f"no matrix for symbol {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise DimensionError(f"matrices do not share a common square shape: {exc}") from exc

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    @property
    def m(self) -> int:
        return self.matrices.shape[0]

    def __getitem__(self, symbol: str) -> np.ndarray:
        return self.matrices[self.symbols.index(symbol)]

    def product(self, word: Sequence[str]) -> np.ndarray:
        """Chronological product ``A_ut ... A_u1`` of ``word = (u1, ..., ut)``."""
        out = np.eye(self.n)
        for s in word:
            out = self[s] @ out
        return out

    def scaled(self, factor: float) -> "MatrixSet":
        return MatrixSet(self.symbols, self.matrices * factor)

    def restricted_to(self, alphabet: Sequence[str]) -> "MatrixSet":
        """Same matrices reordered to ``alphabet``; every symbol must be present."""
        missing = [s for s in alphabet if s not in self.symbols]
        if missing:
            raise DimensionError(f"no matrix for symbol(s) {missing}")
        return MatrixSet(tuple(alphabet), np.array([self[s] for s in alphabet]))


@dataclass(frozen=True)
class Certificate:
    """A quadratic form ``x' P x`` per graph node."""

    forms: Mapping[str, np.ndarray]
    delta: float = DEFAULT_DELTA
    diagonal: bool = False

    @classmethod
    def from_diagonals(cls, diagonals: Mapping[str, Sequence[float]], delta: float = DEFAULT_DELTA):
        return cls({k: np.diag(np.asarray(v, dtype=float)) for k, v in diagonals.items()},
                   delta=delta, diagonal=True)

    def scaled(self, c: float) -> "Certificate":
        return Certificate({k: c * p for k, p in self.forms.items()}, self.delta, self.diagonal)


@dataclass(frozen=True)
class Margin:
    src: str
    dst: Optional[str]  # None for a positivity constraint on ``src`` alone
    label: Word
    margin: float  # lambda_min of the constraint matrix
    relative: float  # margin / lambda_max(P_src)


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    delta: float
    nodes: tuple[Margin, ...]
    edges: tuple[Margin, ...]

    @property
    def worst(self) -> Optional[Margin]:
        items = self.nodes + self.edges
        return min(items, key=lambda m: m.relative) if items else None

    @property
    def worst_edge(self) -> Optional[Margin]:
        return min(self.edges, key=lambda m: m.relative) if self.edges else None

    def to_dict(self) -> dict:
        def row(m: Margin):
            return {"from": m.src, "to": m.dst, "label": list(m.label),
                    "margin": m.margin, "relative_margin": m.relative}
        worst = self.worst
        return {
            "passed": self.passed,
            "delta": self.delta,
            "worst_relative_margin": worst.relative if worst else None,
            "nodes": [row(m) for m in self.nodes],
            "edges": [row(m) for m in self.edges],
        }


def _check_forms(g: LabeledGraph, s: MatrixSet, c: Certificate) -> dict:
    forms = {}
    for v in g.nodes:
        if v not in c.forms:
            raise CertificateError(f"certificate has no form for node {v!r}")
        p = np.asarray(c.forms[v], dtype=float)
        if p.shape != (s.n, s.n):
            raise DimensionError(f"form for node {v!r} has shape {p.shape}, expected {(s.n, s.n)}")
        if not is_symmetric(p):
            raise CertificateError(f"form for node {v!r} is not symmetric")
        forms[v] = (p + p.T) / 2
    return forms


def verify_certificate(g: LabeledGraph, s: MatrixSet, c: Certificate,
                       delta: Optional[float] = None) -> VerificationReport:
    """Check every edge inequality ``P_i - Phi' P_j Phi > 0`` and every ``P_i > 0``.

    Margins are smallest eigenvalues; the pass/fail test compares them relative
    to ``lambda_max(P_i)`` against ``delta``.  A margin of exactly zero always
    fails because the inequalities are strict.
    """
    delta = c.delta if delta is None else delta
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    s = s.restricted_to(g.alphabet)
    forms = _check_forms(g, s, c)
    scale = {}
    node_rows = []
    for v in g.nodes:
        lo, hi = eig_extremes(forms[v])
        scale[v] = hi
        node_rows.append(Margin(v, None, (), lo, lo / hi if hi > 0 else -np.inf))
    edge_rows = []
    for e in g.edges:
        phi = s.product(e.label)
        gap = forms[e.src] - phi.T @ forms[e.dst] @ phi
        lo = lambda_min((gap + gap.T) / 2)
        hi = scale[e.src]
        edge_rows.append(Margin(e.src, e.dst, e.label, lo, lo / hi if hi > 0 else -np.inf))
    rows = node_rows + edge_rows
    passed = all(m.relative >= delta and m.margin > 0 for m in rows)
    return VerificationReport(passed, delta, tuple(node_rows), tuple(edge_rows))


def entrywise_equivalence(a, p, p_prime) -> tuple[bool, bool]:
    """Evaluate both sides of the diagonal-form equivalence for a 0/1 sub-permutation ``a``.

    Returns ``(lmi_holds, entrywise_holds)`` where ``lmi_holds`` means
    ``diag(p) - a diag(p') a'`` is positive definite (equivalently
    ``V_p'(a' x) < V_p(x)`` for ``x != 0``) and ``entrywise_holds`` means
    ``(a p')_l < p_l`` on every nonzero row ``l`` of ``a``.
    """
    a = np.asarray(a)
    p = np.asarray(p, dtype=float)
    p_prime = np.asarray(p_prime, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("a must be square")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("a must be a 0/1 matrix")
    if (a.sum(axis=0) > 1).any() or (a.sum(axis=1) > 1).any():
        raise ValueError("a must have at most one nonzero entry per row and per column")
    if p.shape != (a.shape[0],) or p_prime.shape != p.shape:
        raise DimensionError("vector lengths must match the matrix dimension")
    if (p <= 0).any() or (p_prime <= 0).any():
        raise ValueError("p and p' must be strictly positive")
    af = a.astype(float)
    lmi = lambda_min(np.diag(p) - af @ np.diag(p_prime) @ af.T) > 0
    image = af @ p_prime
    rows = a.any(axis=1)
    entrywise = bool(np.all(image[rows] < p[rows]))
    return bool(lmi), entrywise


@dataclass(frozen=True)
class JsrBounds:
    lower: float
    lower_witness: Word
    upper: Optional[float] = None
    certificate: Optional[Certificate] = None
    upper_is_fallback: bool = False
    solver_calls: int = 0

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "lower_witness": list(self.lower_witness),
            "upper": self.upper,
            "gamma_star_estimate": self.upper,
            "upper_is_fallback": self.upper_is_fallback,
            "solver_calls": self.solver_calls,
        }


def _word_count(m: int, depth: int) -> int:
    return sum(m**t for t in range(1, depth + 1))


def iter_products(s: MatrixSet, depth: int, budget: int = DEFAULT_WORD_BUDGET):
    """Yield ``(t, products)`` for t = 1..depth, products of all length-t words in lex order.

    ``products[k]`` is the chronological product of the k-th word of length t
    in lexicographic order over ``s.symbols``.
    """
    total = _word_count(s.m, depth)
    if total > budget:
        raise BudgetExceeded(f"{total} words up to length {depth} exceed the budget {budget}",
                             required=total)
    level = s.matrices.copy()
    for t in range(1, depth + 1):
        yield t, level
        if t < depth:
            # word u followed by symbol a: A_a @ Phi(u); row-major keeps lex order
            level = np.einsum("aij,wjk->waik", s.matrices, level).reshape(-1, s.n, s.n)


def index_to_word(k: int, t: int, symbols: Sequence[str]) -> Word:
    m = len(symbols)
    out = []
    for _ in range(t):
        k, r = divmod(k, m)
        out.append(symbols[r])
    return tuple(reversed(out))


def jsr_lower_bound(s: MatrixSet, depth: int, budget: int = DEFAULT_WORD_BUDGET) -> tuple[float, Word]:
    """Max of ``rho(Phi(u)) ** (1/|u|)`` over nonempty words of length <= depth.

    Exact floating ties go to the shorter word, then the lexicographically least.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    best, witness = -1.0, ()
    for t, prods in iter_products(s, depth, budget):
        vals = spectral_radius(prods) ** (1.0 / t)
        k = int(np.argmax(vals))  # first maximum = lex least
        if vals[k] > best:
            best, witness = float(vals[k]), index_to_word(k, t, s.symbols)
    return best, witness


def words_rho(s: MatrixSet, words: Sequence[Sequence[str]]) -> list[float]:
    out = []
    for w in words:
        w = check_word(w, s.symbols)
        out.append(spectral_radius(s.product(w)) ** (1.0 / len(w)))
    return out
