import math

import numpy as np
import pytest

from pathlyap.corpus import cqlf_graph, random_pair
from pathlyap.errors import BudgetExceeded, CertificateError, NotPathCompleteError
from pathlyap.invariant import bi_invariance_check, build_invariant, check_decrease, eval_W
from pathlyap.lyapunov import Certificate, MatrixSet
from pathlyap.solver import baseline_solver


def scalar_case(p):
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.array([[[0.5]]]))
    return g, s, build_invariant(g, s, 1.5, Certificate({"P": np.array([[p]])}))


def verified_instances(graph, count, gamma=1.2, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        s = random_pair(rng, target=0.75)
        res = baseline_solver(graph, s.scaled(gamma))
        if res.feasible:
            out.append((s, res.certificate))
    return out


@pytest.mark.parametrize("p", [1.0, 4.0])
def test_scalar_examples(p):
    _, _, f = scalar_case(p)
    assert f.xi == 1.0
    assert f.horizon == 1
    x = np.random.default_rng(0).normal(size=(20, 1))
    np.testing.assert_allclose(eval_W(f, x), (x**2).sum(axis=1))


def test_two_node_horizon(complete_graph):
    s = MatrixSet(("1", "2"), 0.1 * np.stack([np.eye(2), np.eye(2)]))
    c = Certificate({"P1": np.eye(2), "P2": 4 * np.eye(2)})
    f = build_invariant(complete_graph, s, 2.0, c)
    assert f.xi == 4.0
    assert f.horizon == 2
    assert [len(level) for level in f.products] == [1, 2]
    np.testing.assert_array_equal(f.products[0][0], np.eye(2))
    np.testing.assert_array_equal(f.products[1], s.matrices)


def test_exact_tie_rounds_up(complete_graph):
    # xi = 4 and gamma = 2: 2 / 2**1 = 1 is not < 1, so r = 2
    s = MatrixSet(("1", "2"), np.zeros((2, 2, 2)))
    c = Certificate({"P1": np.eye(2), "P2": 4 * np.eye(2)})
    assert build_invariant(complete_graph, s, 2.0, c).horizon == 2


def test_homogeneity_and_positivity(complete_graph):
    rng = np.random.default_rng(1)
    for s, c in verified_instances(complete_graph, 3, seed=1):
        f = build_invariant(complete_graph, s, 1.2, c)
        assert eval_W(f, np.zeros(2)) == 0.0
        x = rng.normal(size=(100, 2))
        np.testing.assert_allclose(eval_W(f, 2 * x), 4 * eval_W(f, x), rtol=1e-12)
        assert (eval_W(f, x) > 0).all()


def test_scalar_decrease_gap():
    _, s, f = scalar_case(1.0)
    rep = check_decrease(f, s, samples=1000)
    assert rep.violations == 0
    assert rep.min_relative_gap == pytest.approx(0.75, abs=1e-15)


def test_random_instances_decrease_and_minimal_horizon(complete_graph):
    rng = np.random.default_rng(2)
    for k, (s, c) in enumerate(verified_instances(complete_graph, 6, seed=2)):
        f = build_invariant(complete_graph, s, 1.2, c)
        root = math.sqrt(f.xi)
        assert root / 1.2**f.horizon < 1 <= root / 1.2 ** (f.horizon - 1)
        assert check_decrease(f, s, samples=1000, seed=k).passed
        # every product of length r is a strict contraction
        for _ in range(200):
            w = tuple(rng.choice(s.symbols, size=f.horizon))
            assert np.linalg.norm(s.product(w), 2) < 1


def test_gamma_must_exceed_one():
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.array([[[0.5]]]))
    with pytest.raises(ValueError):
        build_invariant(g, s, 1.0, Certificate({"P": np.eye(1)}))


def test_rejects_incomplete_graph(gap_graph, example_set):
    c = Certificate({"P1": np.eye(3), "P2": np.eye(3)})
    with pytest.raises(NotPathCompleteError):
        build_invariant(gap_graph, example_set, 1.1, c)


def test_rejects_certificate_invalid_for_scaled_set():
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.array([[[0.9]]]))
    with pytest.raises(CertificateError):
        build_invariant(g, s, 1.5, Certificate({"P": np.eye(1)}))


def test_product_cap(complete_graph):
    s = MatrixSet(("1", "2"), np.zeros((2, 2, 2)))
    c = Certificate({"P1": np.eye(2), "P2": 1e12 * np.eye(2)})
    with pytest.raises(BudgetExceeded):
        build_invariant(complete_graph, s, 1.01, c, cap=1000)


def test_bi_invariance_unit_ball():
    g = cqlf_graph("1")
    s = MatrixSet(("1",), np.array([[[0.6, 0.3], [-0.2, 0.5]]]))
    rep = bi_invariance_check(g, s, Certificate({"P": np.eye(2)}), 1.0, samples=500)
    assert rep.passed and rep.samples == 500
    assert rep.max_ratio < 1


def test_bi_invariance_level_zero(complete_graph):
    s, c = verified_instances(complete_graph, 1, seed=3)[0]
    rep = bi_invariance_check(complete_graph, s, c, 0.0)
    assert rep.samples == 1 and rep.violations == 0


def test_bi_invariance_random(complete_graph):
    for k, (s, c) in enumerate(verified_instances(complete_graph, 4, seed=4)):
        rep = bi_invariance_check(complete_graph, s, c, 1.0, samples=500, depth=6, seed=k)
        assert rep.passed
        assert rep.samples == 500


def test_bi_invariance_requires_valid_certificate(complete_graph):
    s = MatrixSet(("1", "2"), 2 * np.stack([np.eye(2), np.eye(2)]))
    c = Certificate({"P1": np.eye(2), "P2": np.eye(2)})
    with pytest.raises(CertificateError):
        bi_invariance_check(complete_graph, s, c, 1.0)
