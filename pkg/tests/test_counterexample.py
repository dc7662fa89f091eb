import itertools

import numpy as np
import pytest

from pathlyap.corpus import graph_corpus
from pathlyap.counterexample import (
    auxiliary_graph,
    build_sigma_w,
    reverse_topological_numbering,
    subproduct_property,
    synthesize_counterexample,
)
from pathlyap.errors import CycleDetected
from pathlyap.graph import LabeledGraph
from pathlyap.lyapunov import Certificate, MatrixSet, entrywise_equivalence, jsr_lower_bound, verify_certificate
from pathlyap.pathcomplete import check_path_complete

from conftest import sigma_oracle


def ones(a):
    return {(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(a))}


def test_sigma_121():
    s = build_sigma_w(tuple("121"))
    assert s.n == 4
    assert ones(s["1"]) == {(1, 2), (3, 4), (4, 1)}
    assert ones(s["2"]) == {(2, 3)}


def test_sigma_single_symbol():
    s = build_sigma_w(("1",))
    assert s.n == 2
    assert s["1"].tolist() == [[0, 1], [1, 0]]


def test_sigma_eight_node_cycle():
    s = build_sigma_w(tuple("2212111"))
    assert s.n == 8
    expected = {"2": {(1, 2), (2, 3), (4, 5)}, "1": {(3, 4), (5, 6), (6, 7), (7, 8), (8, 1)}}
    assert ones(s["1"]) == expected["1"]
    assert ones(s["2"]) == expected["2"]


def test_sigma_matches_dense_oracle():
    for t in range(1, 5):
        for w in itertools.product("123", repeat=t):
            s = build_sigma_w(w, ("1", "2", "3"))
            ref = sigma_oracle(w, ("1", "2", "3"))
            for sym in "123":
                assert np.array_equal(s[sym], ref[sym])


def brute_subproduct(w, alphabet, length):
    """Every nonzero product of ``length`` matrices must contain ``A_w`` as a factor."""
    mats = sigma_oracle(w, alphabet)
    target = "".join(w)
    for seq in itertools.product(alphabet, repeat=length):
        prod = np.eye(len(w) + 1, dtype=int)
        for s in seq:
            prod = prod @ mats[s]
        if prod.any() and target not in "".join(seq):
            return False
    return True


def test_subproduct_121_length_8():
    s = build_sigma_w(tuple("121"))
    assert brute_subproduct(tuple("121"), ("1", "2"), 8)
    assert subproduct_property(s, 8)


def test_subproduct_single_symbol():
    assert subproduct_property(build_sigma_w(("1",)), 4)


def test_subproduct_agrees_with_bruteforce():
    for t in range(1, 4):
        for w in itertools.product("12", repeat=t):
            n = t + 1
            for length in (2, n, 2 * n):
                got = subproduct_property(build_sigma_w(w, ("1", "2")), length)
                assert got == brute_subproduct(w, ("1", "2"), length), (w, length)


def test_subproduct_short_length_may_fail():
    # only guaranteed at length 2n; "12" alone is a nonzero product without "121"
    assert not subproduct_property(build_sigma_w(tuple("121")), 2)


def test_gap_graph_bundle(gap_graph):
    b = synthesize_counterexample(gap_graph, tuple("121"))
    assert b.n == 4
    assert b.transposed.shape == (2, 4, 4)
    assert set(np.unique(b.transposed)) <= {0, 1}
    assert b.exact_ok
    for p in b.diagonals.values():
        assert all(isinstance(x, int) and x > 0 for x in p)
    s = MatrixSet(gap_graph.alphabet, b.transposed)
    assert verify_certificate(gap_graph, s, Certificate.from_diagonals(b.diagonals)).passed


def test_edgeless_bundle():
    g = LabeledGraph(("1",), ("a",), ())
    sigma = build_sigma_w(("1",), g.alphabet)
    assert auxiliary_graph(g, sigma).edges == ()
    b = synthesize_counterexample(g, ("1",))
    assert b.exact_ok and b.checks == ()


def test_readable_word_gives_cycle(gap_graph):
    with pytest.raises(CycleDetected, match="cycle"):
        synthesize_counterexample(gap_graph, ("1", "1"))


def test_numbering_decreases_along_edges(gap_graph):
    sigma = build_sigma_w(tuple("121"), gap_graph.alphabet)
    aux = auxiliary_graph(gap_graph, sigma)
    s = reverse_topological_numbering(aux)
    assert sorted(s.values()) == list(range(1, len(aux.vertices) + 1))
    for a, b, _ in aux.edges:
        assert s[a] > s[b]


def test_corpus_soundness():
    checked = 0
    for g in graph_corpus(200, seed=4):
        pc = check_path_complete(g)
        if pc.complete:
            continue
        b = synthesize_counterexample(g, pc.missing_word)
        s = MatrixSet(g.alphabet, b.transposed)
        quad = verify_certificate(g, s, Certificate.from_diagonals(b.diagonals))
        assert b.exact_ok and quad.passed
        # exact and floating checks agree edge by edge
        for c in b.checks:
            phi = s.product(c.label).astype(int)
            lmi, entry = entrywise_equivalence(phi.T, b.diagonals[c.src], b.diagonals[c.dst])
            assert lmi == entry == c.holds
        lower, _ = jsr_lower_bound(s, b.n)
        assert lower == 1.0
        checked += 1
    assert checked > 20
