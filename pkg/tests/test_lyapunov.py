import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pathlyap.corpus import cqlf_graph
from pathlyap.counterexample import synthesize_counterexample
from pathlyap.errors import BudgetExceeded, CertificateError, DimensionError
from pathlyap.graph import Edge, LabeledGraph
from pathlyap.io import certificate_from_dict, certificate_to_dict, matrix_set_to_dict, parse_matrix_set
from pathlyap.linalg import eig_extremes, spectral_radius
from pathlyap.lyapunov import (
    Certificate,
    MatrixSet,
    entrywise_equivalence,
    iter_products,
    jsr_lower_bound,
    verify_certificate,
)


def numpy_rho(a):
    return float(np.abs(np.linalg.eigvals(a)).max())


@pytest.mark.parametrize("a,expected", [
    ([[0, 1], [0, 0]], 0.0),
    (2 * np.eye(3), 2.0),
    ([[0, 2], [-2, 0]], 2.0),
    ([[0, 1, 0], [0, 0, 1], [1, 0, 0]], 1.0),
])
def test_spectral_radius_examples(a, expected):
    assert spectral_radius(a) == pytest.approx(expected, abs=1e-12)


def test_spectral_radius_against_eig():
    rng = np.random.default_rng(0)
    stack = rng.normal(size=(300, 4, 4))
    got = spectral_radius(stack)
    ref = np.array([numpy_rho(a) for a in stack])
    np.testing.assert_allclose(got, ref, rtol=1e-10)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-10, 10)))
def test_spectral_radius_property(a):
    rho = spectral_radius(a)
    assert rho <= np.linalg.norm(a, 2) * (1 + 1e-9) + 1e-12
    # non-normal/defective cases converge slowly; compare loosely
    assert rho == pytest.approx(numpy_rho(a), rel=1e-6, abs=1e-6)


def test_zero_matrices_pass():
    g = LabeledGraph(("1", "2"), ("a", "b"), (Edge("a", "b", ("1",)), Edge("b", "a", ("2", "1"))))
    s = MatrixSet(("1", "2"), np.zeros((2, 3, 3)))
    c = Certificate({"a": np.eye(3), "b": np.eye(3)})
    r = verify_certificate(g, s, c, delta=0.5)
    assert r.passed
    assert [m.margin for m in r.edges] == [1.0, 1.0]


def test_identity_self_loop_fails():
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.eye(2)[None])
    r = verify_certificate(g, s, Certificate({"P": np.eye(2)}), delta=0.0)
    assert not r.passed
    assert r.edges[0].margin == 0.0


def test_margin_scaling():
    rng = np.random.default_rng(1)
    g = cqlf_graph("12")
    s = MatrixSet(("1", "2"), 0.3 * rng.normal(size=(2, 3, 3)))
    q = rng.normal(size=(3, 3))
    c = Certificate({"P": q @ q.T + np.eye(3)})
    base = verify_certificate(g, s, c, delta=0.0)
    for k in (0.01, 3.0, 1e4):
        r = verify_certificate(g, s, c.scaled(k), delta=0.0)
        assert r.passed == base.passed
        for m0, m1 in zip(base.edges, r.edges):
            assert m1.margin == pytest.approx(k * m0.margin, rel=1e-9, abs=1e-12)
            assert m1.relative == pytest.approx(m0.relative, rel=1e-9, abs=1e-12)


def test_verifier_rejects_bad_forms():
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.zeros((1, 2, 2)))
    with pytest.raises(CertificateError):
        verify_certificate(g, s, Certificate({"P": [[1.0, 1.0], [0.0, 1.0]]}))
    with pytest.raises(DimensionError):
        verify_certificate(g, s, Certificate({"P": np.eye(3)}))
    with pytest.raises(CertificateError):
        verify_certificate(g, s, Certificate({}))


def test_not_positive_definite_fails():
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.zeros((1, 2, 2)))
    r = verify_certificate(g, s, Certificate({"P": np.diag([1.0, -1.0])}))
    assert not r.passed


@pytest.mark.parametrize("p,pp,expected", [
    ((1, 2), (0.5, 1.5), (True, True)),
    ((1, 2), (1, 1), (False, False)),
])
def test_entrywise_examples(p, pp, expected):
    assert entrywise_equivalence(np.eye(2, dtype=int), p, pp) == expected


def random_subperm(rng, n):
    a = np.zeros((n, n), dtype=int)
    perm = rng.permutation(n)
    keep = rng.random(n) < 0.7
    a[np.arange(n)[keep], perm[keep]] = 1
    return a


def test_entrywise_equivalence_random():
    rng = np.random.default_rng(2)
    seen = set()
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        a = random_subperm(rng, n)
        p = rng.integers(1, 6, size=n)
        pp = rng.integers(1, 6, size=n)
        lmi, entry = entrywise_equivalence(a, p, pp)
        assert lmi == entry
        seen.add(lmi)
    assert seen == {True, False}


def test_entrywise_rejects_non_subpermutation():
    with pytest.raises(ValueError):
        entrywise_equivalence([[1, 1], [0, 0]], (1, 1), (1, 1))


def test_lower_bound_scalar():
    s = MatrixSet(("1",), np.ones((1, 1, 1)))
    assert jsr_lower_bound(s, 3) == (1.0, ("1",))


def test_lower_bound_sigma_121():
    g = LabeledGraph(("1", "2"), ("a",), ())
    b = synthesize_counterexample(g, tuple("121"))
    s = MatrixSet(("1", "2"), b.transposed)
    value, witness = jsr_lower_bound(s, 4)
    assert value == 1.0
    assert len(witness) == 4
    # the witness is a rotation of the cycle word "1211" read on the transposes
    assert spectral_radius(s.product(witness)) == 1.0


def test_lower_bound_example_matrices(example_set):
    value, witness = jsr_lower_bound(example_set, 3)
    assert 1.005 <= value <= 1.015
    assert witness == ("1", "2", "1")
    assert value == pytest.approx(numpy_rho(example_set.product(witness)) ** (1 / 3), rel=1e-12)


def test_lower_bound_is_max_over_words():
    rng = np.random.default_rng(3)
    s = MatrixSet(("a", "b", "c"), rng.normal(size=(3, 3, 3)))
    value, witness = jsr_lower_bound(s, 4)
    best = max(numpy_rho(s.product(w)) ** (1 / len(w))
               for t in range(1, 5) for w in itertools.product("abc", repeat=t))
    assert value == pytest.approx(best, rel=1e-9)
    assert spectral_radius(s.product(witness)) ** (1 / len(witness)) == pytest.approx(value)


def test_products_lex_order_chronological():
    rng = np.random.default_rng(4)
    s = MatrixSet(("1", "2"), rng.normal(size=(2, 2, 2)))
    for t, prods in iter_products(s, 3):
        for k, w in enumerate(itertools.product("12", repeat=t)):
            ref = np.eye(2)
            for sym in w:
                ref = s[sym] @ ref
            np.testing.assert_allclose(prods[k], ref)


def test_product_budget():
    s = MatrixSet(("1", "2"), np.zeros((2, 2, 2)))
    with pytest.raises(BudgetExceeded):
        jsr_lower_bound(s, 25, budget=1000)


def test_io_round_trip():
    s = MatrixSet(("1", "2"), np.arange(8.0).reshape(2, 2, 2))
    back = parse_matrix_set(matrix_set_to_dict(s))
    np.testing.assert_array_equal(back.matrices, s.matrices)
    c = Certificate({"P": np.eye(2)})
    assert np.array_equal(certificate_from_dict(certificate_to_dict(c)).forms["P"], np.eye(2))


def test_eig_extremes():
    lo, hi = eig_extremes(np.diag([3.0, -1.0, 2.0]))
    assert (lo, hi) == (-1.0, 3.0)
