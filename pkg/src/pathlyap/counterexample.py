"""Unstable matrix sets that satisfy the inequalities of a non-path-complete graph.

Given a word ``w`` that cannot be read on the graph, the 0/1 matrices of
:func:`build_sigma_w` form a cycle of length ``|w| + 1`` whose long nonzero
products all pass through ``w``.  Their transposes are not stable, yet admit
integer diagonal forms satisfying every edge inequality; the forms come from a
topological numbering of an auxiliary graph on (node, coordinate) pairs.
All arithmetic here is exact integer arithmetic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, CertificateError, CycleDetected
from .graph import LabeledGraph, Word, check_word, graph_to_dict

DEFAULT_ENUM_BUDGET = 10**7


@dataclass(frozen=True)
class SigmaW:
    word: Word
    alphabet: tuple[str, ...]
    matrices: np.ndarray  # (r, n, n) int64, untransposed

    @property
    def n(self) -> int:
        return len(self.word) + 1

    def __getitem__(self, symbol: str) -> np.ndarray:
        return self.matrices[self.alphabet.index(symbol)]

    def product(self, word: Sequence[str]) -> np.ndarray:
        """``A_u1 A_u2 ... A_ut`` (left to right in reading order)."""
        out = np.eye(self.n, dtype=np.int64)
        for s in word:
            out = out @ self[s]
        return out


def build_sigma_w(w: Sequence[str], alphabet: Sequence[str] | None = None) -> SigmaW:
    """0/1 matrices with ``A[w_i][i, i+1] = 1`` and ``A[alphabet[0]][n, 1] = 1`` (1-based).

    The first alphabet symbol plays the role of symbol 1 and closes the cycle.
    Symbols that do not occur in ``w`` (other than the first) get zero matrices.
    """
    w = tuple(w)
    if not w:
        raise ValueError("the word must be nonempty")
    if alphabet is None:
        alphabet = tuple(dict.fromkeys(sorted(w)))
    alphabet = tuple(alphabet)
    check_word(w, alphabet)
    n = len(w) + 1
    mats = np.zeros((len(alphabet), n, n), dtype=np.int64)
    for i, s in enumerate(w):
        mats[alphabet.index(s), i, i + 1] = 1
    mats[0, n - 1, 0] = 1
    mats.setflags(write=False)
    return SigmaW(w, alphabet, mats)


def _partial_map(a: np.ndarray) -> tuple:
    """Row -> column map of a sub-permutation 0/1 matrix (-1 for zero rows)."""
    out = []
    for row in a:
        nz = np.flatnonzero(row)
        out.append(int(nz[0]) if len(nz) else -1)
    return tuple(out)


def subproduct_property(s: SigmaW, length: int, budget: int = DEFAULT_ENUM_BUDGET) -> bool:
    """True iff every nonzero product of exactly ``length`` matrices of ``s`` has
    an index sequence containing ``s.word`` as a contiguous factor.

    Depth-first over index sequences.  A zero prefix product stays zero and a
    prefix that already contains the word keeps containing it, so both prune
    their subtree; what remains is small for the cycle structure of ``s``.
    """
    maps = [_partial_map(a) for a in s.matrices]
    w = s.word
    k = len(w)
    visited = 0

    def compose(f, g):
        # product F @ G as partial maps: row i -> g[f[i]]
        return tuple(-1 if x < 0 else g[x] for x in f)

    stack = [((), tuple(range(s.n)))]
    while stack:
        seq, f = stack.pop()
        visited += 1
        if visited > budget:
            raise BudgetExceeded(f"more than {budget} prefixes enumerated", required=visited)
        if len(seq) == length:
            return False  # nonzero, full length, word not seen
        for idx in range(len(maps)):
            h = compose(f, maps[idx])
            if all(x < 0 for x in h):
                continue
            nseq = seq + (s.alphabet[idx],)
            if len(nseq) >= k and nseq[-k:] == w:
                continue
            stack.append((nseq, h))
    return True


@dataclass(frozen=True)
class AuxiliaryGraph:
    """Vertices ``(node, l)``; an edge ``(i, l) -> (j, l')`` for every graph edge
    ``i -> j`` with label ``u`` such that ``(A_u1 ... A_ut)[l, l'] = 1``."""

    vertices: tuple[tuple[str, int], ...]
    edges: tuple[tuple[tuple[str, int], tuple[str, int], int], ...]  # (v, v', graph edge index)


def auxiliary_graph(g: LabeledGraph, sigma: SigmaW) -> AuxiliaryGraph:
    n = sigma.n
    vertices = tuple((v, l) for v in g.nodes for l in range(n))
    edges = []
    for ei, e in enumerate(g.edges):
        prod = sigma.product(e.label)
        for l, lp in zip(*np.nonzero(prod)):
            edges.append(((e.src, int(l)), (e.dst, int(lp)), ei))
    return AuxiliaryGraph(vertices, tuple(edges))


def reverse_topological_numbering(aux: AuxiliaryGraph) -> dict:
    """Numbering ``s`` with ``s(v) > s(v')`` along every edge (Kahn's algorithm).

    Sources are removed one at a time, lowest vertex index first, and each gets
    the largest number not yet used.
    """
    order = {v: k for k, v in enumerate(aux.vertices)}
    indeg = {v: 0 for v in aux.vertices}
    succ = {v: [] for v in aux.vertices}
    for a, b, _ in aux.edges:
        succ[a].append(b)
        indeg[b] += 1
    heap = [order[v] for v in aux.vertices if indeg[v] == 0]
    heapq.heapify(heap)
    number = {}
    nxt = len(aux.vertices)
    while heap:
        v = aux.vertices[heapq.heappop(heap)]
        number[v] = nxt
        nxt -= 1
        for b in succ[v]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, order[b])
    if len(number) != len(aux.vertices):
        stuck = [v for v in aux.vertices if v not in number]
        raise CycleDetected(
            f"auxiliary graph has a cycle through {stuck[0]}; the word is readable on the graph"
        )
    return number


@dataclass(frozen=True)
class EdgeCheck:
    src: str
    dst: str
    label: Word
    lhs: tuple[int, ...]  # A_u p_j
    rhs: tuple[int, ...]  # p_i
    holds: bool


@dataclass(frozen=True)
class CounterexampleBundle:
    graph: LabeledGraph
    word: Word
    sigma: SigmaW
    diagonals: dict  # node -> tuple of positive ints
    checks: tuple[EdgeCheck, ...]

    @property
    def n(self) -> int:
        return self.sigma.n

    @property
    def transposed(self) -> np.ndarray:
        """The shipped matrix set: transposes of the Sigma_w matrices, one per symbol."""
        return np.swapaxes(self.sigma.matrices, 1, 2).copy()

    @property
    def exact_ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_dict(self, quadratic_report: dict | None = None) -> dict:
        doc = {
            "word": list(self.word),
            "n": self.n,
            "graph": graph_to_dict(self.graph),
            "matrices": {s: self.transposed[k].tolist() for k, s in enumerate(self.sigma.alphabet)},
            "diagonals": {v: list(map(int, p)) for v, p in self.diagonals.items()},
            "verification": {
                "exact": self.exact_ok,
                "edges": [
                    {"from": c.src, "to": c.dst, "label": list(c.label),
                     "lhs": list(c.lhs), "rhs": list(c.rhs), "holds": c.holds}
                    for c in self.checks
                ],
            },
        }
        if quadratic_report is not None:
            doc["verification"]["quadratic"] = quadratic_report
        return doc


def exact_checks(g: LabeledGraph, sigma: SigmaW, diagonals: dict) -> tuple[EdgeCheck, ...]:
    """``A_u p_j < p_i`` on every nonzero row of ``A_u``, for every edge ``i -> j`` labeled ``u``."""
    out = []
    for e in g.edges:
        prod = sigma.product(e.label)
        lhs = prod @ np.asarray(diagonals[e.dst], dtype=np.int64)
        rhs = np.asarray(diagonals[e.src], dtype=np.int64)
        rows = prod.any(axis=1)
        holds = bool(np.all(lhs[rows] < rhs[rows]))
        out.append(EdgeCheck(e.src, e.dst, e.label, tuple(map(int, lhs)), tuple(map(int, rhs)), holds))
    return tuple(out)


def synthesize_counterexample(g: LabeledGraph, w: Sequence[str]) -> CounterexampleBundle:
    """Build ``Sigma_w`` and integer diagonal forms ``p_i(l) = s((i, l))``.

    ``w`` must be unreadable on ``g``; a readable word shows up as a cycle in the
    auxiliary graph and raises :class:`CycleDetected`.
    """
    w = check_word(w, g.alphabet)
    sigma = build_sigma_w(w, g.alphabet)
    aux = auxiliary_graph(g, sigma)
    number = reverse_topological_numbering(aux)
    diagonals = {v: tuple(number[(v, l)] for l in range(sigma.n)) for v in g.nodes}
    checks = exact_checks(g, sigma, diagonals)
    if not all(c.holds for c in checks):
        bad = next(c for c in checks if not c.holds)
        raise CertificateError(
            f"internal error: entrywise check failed on edge {bad.src}->{bad.dst}"
        )
    return CounterexampleBundle(g, w, sigma, diagonals, checks)
