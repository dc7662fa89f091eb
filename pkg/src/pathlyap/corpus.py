"""Seeded random instances used by the test and acceptance suites.

Graphs: up to 4 nodes, alphabets of 2 or 3 symbols, labels of length 1 or 2.
Edge density is itself drawn at random so a corpus mixes path-complete and
non-path-complete graphs.

NFAs: up to 4 states over a 2-letter alphabet, no epsilon moves.  Universality
here includes the empty word, i.e. some start state must also accept.  The
reduction to path-completeness captures that case too (``ff`` is readable on
the reduced graph iff a start state accepts), so the corpus needs no filtering
on empty-word acceptance.
"""

from __future__ import annotations

import numpy as np

from .graph import Edge, LabeledGraph, Nfa
from .lyapunov import MatrixSet, jsr_lower_bound


def random_graph(rng: np.random.Generator, max_nodes: int = 4, alphabets=(2, 3),
                 max_label: int = 2) -> LabeledGraph:
    m = int(rng.choice(alphabets))
    alphabet = tuple(str(k + 1) for k in range(m))
    n_nodes = int(rng.integers(1, max_nodes + 1))
    nodes = tuple(f"P{k + 1}" for k in range(n_nodes))
    density = rng.uniform(0.5, 4.0)
    n_edges = int(rng.poisson(density * n_nodes * m / 2))
    edges = []
    for _ in range(n_edges):
        length = int(rng.integers(1, max_label + 1))
        label = tuple(alphabet[int(k)] for k in rng.integers(0, m, size=length))
        a, b = rng.integers(0, n_nodes, size=2)
        edges.append(Edge(nodes[int(a)], nodes[int(b)], label))
    return LabeledGraph(alphabet, nodes, tuple(edges))


def graph_corpus(count: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [random_graph(rng) for _ in range(count)]


def random_nfa(rng: np.random.Generator, max_states: int = 4, alphabet=("a", "b")) -> Nfa:
    k = int(rng.integers(1, max_states + 1))
    states = tuple(f"q{i}" for i in range(k))
    p = rng.uniform(0.2, 0.8)
    trans = tuple(
        (a, s, b) for a in states for s in alphabet for b in states if rng.random() < p
    )
    start = frozenset(q for q in states if rng.random() < 0.5) or frozenset([states[0]])
    if rng.random() < 0.1:
        start = frozenset()
    accept = frozenset(q for q in states if rng.random() < rng.uniform(0.3, 0.9))
    return Nfa(states, tuple(alphabet), trans, start, accept)


def nfa_corpus(count: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return [random_nfa(rng) for _ in range(count)]


def random_pair(rng: np.random.Generator, n: int = 2, target: float = 0.9, depth: int = 8) -> MatrixSet:
    """Two Gaussian ``n x n`` matrices scaled so the depth-``depth`` lower bound equals ``target``."""
    s = MatrixSet(("1", "2"), rng.normal(size=(2, n, n)))
    lower, _ = jsr_lower_bound(s, depth)
    return s.scaled(target / lower)


# Two nodes, unit labels; every word is readable.
COMPLETE_GRAPH = {
    "alphabet": ["1", "2"],
    "nodes": ["P1", "P2"],
    "edges": [
        {"from": "P1", "to": "P1", "label": ["1"]},
        {"from": "P2", "to": "P1", "label": ["1"]},
        {"from": "P1", "to": "P2", "label": ["2"]},
        {"from": "P2", "to": "P2", "label": ["2"]},
    ],
}

# Same shape with the 2->1 edge relabeled "2"; "121" is not readable.
GAP_GRAPH = {
    "alphabet": ["1", "2"],
    "nodes": ["P1", "P2"],
    "edges": [
        {"from": "P1", "to": "P1", "label": ["1"]},
        {"from": "P2", "to": "P1", "label": ["2"]},
        {"from": "P1", "to": "P2", "label": ["2"]},
        {"from": "P2", "to": "P2", "label": ["2"]},
    ],
}

# Two 3x3 matrices with JSR above 1 (rho(A1 A2 A1)**(1/3) is about 1.0105), yet
# the GAP_GRAPH inequalities are feasible for them.
EXAMPLE_MATRICES = {
    "n": 3,
    "matrices": {
        "1": [[-0.7, 0.3, 0.4], [0.4, 0.0, 0.8], [-0.7, 0.5, 0.7]],
        "2": [[-0.3, -0.95, 0.0], [0.4, 0.5, 0.8], [-0.6, 0.0, 0.2]],
    },
}


def cqlf_graph(symbols) -> LabeledGraph:
    """One node with a self-loop per symbol: a common quadratic Lyapunov function."""
    symbols = tuple(symbols)
    return LabeledGraph(symbols, ("P",), tuple(Edge("P", "P", (s,)) for s in symbols))
