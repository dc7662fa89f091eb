"""Command-line entry point: ``pathlyap <subcommand> ...``.

Reports go to stdout as JSON, diagnostics to stderr.  Exit codes:

    0   success / path-complete / certificate verified
    2   malformed input or usage error
    10  graph is not path-complete (witness printed)
    11  verification failed
    12  budget exhausted, question undecided
    13  operation not applicable (e.g. jsr on a non-path-complete graph)
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .counterexample import synthesize_counterexample
from .errors import BudgetExceeded, CertificateError, FormatError, NotPathCompleteError, PathLyapError
from .graph import graph_to_dict, parse_graph, parse_nfa, word_str
from .invariant import build_invariant, check_decrease
from .io import bundle_parts, certificate_to_dict, dumps, parse_certificate, parse_matrix_set
from .lyapunov import DEFAULT_DELTA, Certificate, MatrixSet, verify_certificate
from .pathcomplete import check_path_complete, default_budget
from .reduction import nfa_universal_exact, reduce_universality
from .solver import gamma_star_bisection

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCOMPLETE = 10
EXIT_VERIFY_FAILED = 11
EXIT_BUDGET = 12
EXIT_NOT_APPLICABLE = 13

log = logging.getLogger("pathlyap")


class _Inputs:
    """Reads input files once and remembers their hashes for the report."""

    def __init__(self):
        self.hashes = {}

    def read(self, path: str) -> bytes:
        if path == "-":
            data = sys.stdin.buffer.read()
        else:
            try:
                data = Path(path).read_bytes()
            except OSError as exc:
                raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
        self.hashes[path] = "sha256:" + hashlib.sha256(data).hexdigest()
        return data


def _emit(doc, output=None):
    text = dumps(doc)
    if output:
        Path(output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _report(args, inputs, started, **fields):
    doc = {"command": args.command, "inputs": inputs.hashes}
    doc.update(fields)
    doc["timing_s"] = round(time.perf_counter() - started, 6)
    return doc


def _load_system(inputs, graph_path, system_path):
    g = parse_graph(inputs.read(graph_path))
    s = parse_matrix_set(inputs.read(system_path))
    return g, s.restricted_to(g.alphabet)


def cmd_check(args, inputs, started):
    g = parse_graph(inputs.read(args.graph))
    pc = check_path_complete(g, args.budget)
    witness = list(pc.missing_word) if pc.missing_word else None
    doc = _report(args, inputs, started,
                  verdict="complete" if pc.complete else "incomplete",
                  witness=witness,
                  witness_str=word_str(pc.missing_word) if witness else None,
                  explored_subsets=pc.explored_subsets,
                  expanded_states=pc.expanded_state_count)
    _emit(doc)
    if not pc.complete:
        print(f"not path-complete: missing word {word_str(pc.missing_word)!r}", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_counterexample(args, inputs, started):
    g = parse_graph(inputs.read(args.graph))
    pc = check_path_complete(g, args.budget)
    if pc.complete:
        print("graph is path-complete: its inequalities are a valid stability criterion, "
              "no counterexample exists", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    bundle = synthesize_counterexample(g, pc.missing_word)
    system = MatrixSet(g.alphabet, bundle.transposed)
    quad = verify_certificate(g, system, Certificate.from_diagonals(bundle.diagonals), args.delta)
    doc = bundle.to_dict(quad.to_dict())
    ok = bundle.exact_ok and quad.passed
    if args.output:
        _emit(doc, args.output)
        _emit(_report(args, inputs, started, word=list(bundle.word), n=bundle.n,
                      exact=bundle.exact_ok, quadratic=quad.passed, output=args.output))
    else:
        _emit(doc)
    if not ok:
        print("counterexample failed verification", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_verify(args, inputs, started):
    if args.from_bundle is not None:
        if args.files:
            raise FormatError("--from-bundle takes no positional files")
        g, s, c, _ = bundle_parts(inputs.read(args.from_bundle))
        delta = args.delta
    else:
        if len(args.files) != 3:
            raise FormatError("verify needs GRAPH SYSTEM CERTIFICATE (or --from-bundle)")
        g, s = _load_system(inputs, args.files[0], args.files[1])
        c = parse_certificate(inputs.read(args.files[2]))
        delta = c.delta if args.delta is None else args.delta
    report = verify_certificate(g, s, c, DEFAULT_DELTA if delta is None else delta)
    worst = report.worst_edge
    doc = _report(args, inputs, started, verdict="pass" if report.passed else "fail",
                  worst_edge_relative_margin=worst.relative if worst else None,
                  **{"report": report.to_dict()})
    _emit(doc)
    if not report.passed:
        w = report.worst
        where = f"{w.src}->{w.dst} {word_str(w.label)}" if w.dst else f"node {w.src}"
        print(f"verification failed; worst margin {w.relative:.3e} at {where}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_jsr(args, inputs, started):
    g, s = _load_system(inputs, args.graph, args.system)
    bounds = gamma_star_bisection(g, s, tol=args.tol, lower_depth=args.depth,
                                  iterations=args.iterations, seed=args.seed)
    doc = _report(args, inputs, started, **bounds.to_dict())
    if args.certificate_out and bounds.certificate is not None:
        Path(args.certificate_out).write_text(dumps(certificate_to_dict(bounds.certificate)) + "\n")
        doc["certificate_out"] = args.certificate_out
    _emit(doc)
    return EXIT_OK


def cmd_invariant(args, inputs, started):
    g, s = _load_system(inputs, args.graph, args.system)
    c = parse_certificate(inputs.read(args.certificate))
    f = build_invariant(g, s, args.gamma, c)
    dec = check_decrease(f, s, samples=args.samples, seed=args.seed)
    doc = f.to_dict()
    doc["decrease_check"] = {"samples": dec.samples, "violations": dec.violations,
                             "min_relative_gap": dec.min_relative_gap}
    if args.output:
        _emit(doc, args.output)
        _emit(_report(args, inputs, started, r=f.horizon, xi=f.xi, products=f.product_count,
                      violations=dec.violations, output=args.output))
    else:
        _emit(doc)
    return EXIT_OK if dec.passed else EXIT_VERIFY_FAILED


def cmd_reduce(args, inputs, started):
    nfa = parse_nfa(inputs.read(args.nfa))
    g = reduce_universality(nfa, args.fresh)
    doc = graph_to_dict(g)
    if args.output:
        _emit(doc, args.output)
        universal, word = nfa_universal_exact(nfa, args.budget)
        _emit(_report(args, inputs, started, nodes=len(g.nodes), edges=len(g.edges),
                      fresh_symbol=g.alphabet[-1], universal=universal,
                      rejected_word=list(word) if word is not None else None,
                      output=args.output))
    else:
        _emit(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    common.add_argument("--budget", type=int, default=None,
                        help="subset budget (default: $PATHLYAP_BUDGET or 1e6)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="pathlyap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pathlyap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="decide path-completeness")
    c.add_argument("graph")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("missing-word", parents=[common],
                       help="shortest unreadable word (same exit codes as check)")
    c.add_argument("graph")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("counterexample", parents=[common],
                       help="unstable matrix set and integer certificate for a non-path-complete graph")
    c.add_argument("graph")
    c.add_argument("-o", "--output")
    c.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    c.set_defaults(func=cmd_counterexample)

    c = sub.add_parser("verify", parents=[common], help="verify a certificate")
    c.add_argument("files", nargs="*", metavar="FILE", help="GRAPH SYSTEM CERTIFICATE")
    c.add_argument("--from-bundle", nargs="?", const="-", default=None, metavar="BUNDLE",
                   help="read graph, matrices and certificate from a counterexample bundle "
                        "(stdin when no file is given)")
    c.add_argument("--delta", type=float, default=None)
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("jsr", parents=[common], help="JSR lower bound and verified upper bound")
    c.add_argument("graph")
    c.add_argument("system")
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--depth", type=int, default=6)
    c.add_argument("--iterations", type=int, default=4000, help="solver iterations per gamma")
    c.add_argument("--certificate-out")
    c.set_defaults(func=cmd_jsr)

    c = sub.add_parser("invariant", parents=[common], help="build the common Lyapunov function W")
    c.add_argument("graph")
    c.add_argument("system")
    c.add_argument("certificate")
    c.add_argument("--gamma", type=float, required=True)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_invariant)

    c = sub.add_parser("reduce", parents=[common], help="reduce NFA universality to path-completeness")
    c.add_argument("nfa")
    c.add_argument("--fresh", default=None, help="fresh symbol (default f, renamed on collision)")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.budget is None:
        args.budget = default_budget()
    inputs = _Inputs()
    started = time.perf_counter()
    try:
        return args.func(args, inputs, started)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NotPathCompleteError as exc:
        print(f"not applicable: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except CertificateError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    except (PathLyapError, ValueError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
