"""A single common Lyapunov function assembled from per-node quadratic certificates.

If forms ``P_i`` satisfy the edge inequalities of a path-complete graph for
the scaled set ``{gamma A_i}`` with ``gamma > 1``, every product of length
``s`` has spectral norm at most ``sqrt(xi) / gamma**s``.  Taking ``r`` as the
first length where that bound drops below one, ::

    W(x) = sum_{t=0}^{r-1} max_{|u| = t} ||Phi(u) x||^2

decreases strictly along every ``A_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, CertificateError, NotPathCompleteError
from .graph import LabeledGraph
from .linalg import eig_extremes
from .lyapunov import Certificate, MatrixSet, iter_products, verify_certificate
from .pathcomplete import check_path_complete

PRODUCT_CAP = 10**5


@dataclass(frozen=True)
class InvariantFunction:
    gamma: float
    xi: float
    horizon: int  # r
    alphas: dict
    betas: dict
    products: tuple  # products[t] has shape (m**t, n, n); products[0] is the identity
    degree: int = 2

    @property
    def n(self) -> int:
        return self.products[0].shape[-1]

    @property
    def product_count(self) -> int:
        return sum(len(p) for p in self.products)

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "xi": self.xi,
            "r": self.horizon,
            "degree": self.degree,
            "alphas": self.alphas,
            "betas": self.betas,
            "products": [[m.tolist() for m in level] for level in self.products],
        }


def _horizon(xi: float, gamma: float, m: int, cap: int) -> int:
    """Smallest s with sqrt(xi) / gamma**s < 1, found by direct iteration."""
    root = math.sqrt(xi)
    s = 1
    count = 1  # products of length < s
    while not root / gamma**s < 1:
        count += m**s
        s += 1
        if count > cap:
            raise BudgetExceeded(
                f"horizon exceeds {s} (m**(r-1) >= {m ** (s - 1)}); more than {cap} products needed",
                required=count,
            )
    return s


def _require_path_complete(g: LabeledGraph):
    pc = check_path_complete(g)
    if not pc.complete:
        raise NotPathCompleteError(
            f"graph is not path-complete (missing word {list(pc.missing_word)})"
        )


def build_invariant(g: LabeledGraph, s: MatrixSet, gamma: float, c: Certificate,
                    cap: int = PRODUCT_CAP) -> InvariantFunction:
    """Assemble ``W`` from a certificate that is valid for ``{gamma * A_i}`` on ``g``."""
    if not gamma > 1:
        raise ValueError("gamma must be greater than 1")
    if not g.unit_labels:
        raise ValueError("the construction expects single-symbol edge labels")
    _require_path_complete(g)
    s = s.restricted_to(g.alphabet)
    report = verify_certificate(g, s.scaled(gamma), c)
    if not report.passed:
        w = report.worst
        raise CertificateError(
            f"certificate fails on the scaled set (worst relative margin {w.relative:.3g})"
        )
    alphas, betas = {}, {}
    for v in g.nodes:
        alphas[v], betas[v] = eig_extremes(np.asarray(c.forms[v], dtype=float))
    xi = max(betas.values()) / min(alphas.values())
    r = _horizon(xi, gamma, s.m, cap)
    count = sum(s.m**t for t in range(r))
    if count > cap:
        raise BudgetExceeded(
            f"horizon r={r} needs {count} products (m**(r-1) = {s.m ** (r - 1)}), cap is {cap}",
            required=count,
        )
    levels = [np.eye(s.n)[None]]
    if r > 1:
        levels += [p.copy() for _, p in iter_products(s, r - 1, budget=cap)]
    return InvariantFunction(gamma, xi, r, alphas, betas, tuple(levels))


def eval_W(f: InvariantFunction, x) -> np.ndarray | float:
    """Evaluate ``W`` at a vector ``x`` or at each row of a ``(k, n)`` array."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None] if single else x
    if X.shape[-1] != f.n:
        raise ValueError(f"expected vectors of dimension {f.n}, got {X.shape[-1]}")
    total = np.zeros(len(X))
    for level in f.products:
        images = np.einsum("pij,kj->kpi", level, X)
        total += (images**2).sum(axis=-1).max(axis=1)
    return float(total[0]) if single else total


@dataclass(frozen=True)
class DecreaseReport:
    samples: int
    violations: int
    min_relative_gap: float  # min over samples and i of 1 - W(A_i x) / W(x)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _unit_vectors(rng, k, n):
    x = rng.normal(size=(k, n))
    norms = np.linalg.norm(x, axis=1)
    keep = norms > 0
    return x[keep] / norms[keep, None]


def check_decrease(f: InvariantFunction, s: MatrixSet, samples: int = 1000, seed: int = 0) -> DecreaseReport:
    rng = np.random.default_rng(seed)
    X = _unit_vectors(rng, samples, f.n)
    w0 = eval_W(f, X)
    worst = np.inf
    violations = 0
    for a in s.matrices:
        w1 = eval_W(f, X @ a.T)
        violations += int(np.count_nonzero(~(w1 < w0)))
        worst = min(worst, float((1 - w1 / w0).min()))
    return DecreaseReport(len(X), violations, worst)


@dataclass(frozen=True)
class BiInvarianceReport:
    level: float
    depth: int
    samples: int
    violations: int
    empty: bool = False
    max_ratio: float = 0.0  # max over images of min_l V_l(image) / level

    @property
    def passed(self) -> bool:
        return self.violations == 0 and not self.empty


def bi_invariance_check(g: LabeledGraph, s: MatrixSet, c: Certificate, level: float,
                        samples: int = 500, seed: int = 0, depth: int = 6,
                        max_tries: int = 1000) -> BiInvarianceReport:
    """Sample the intersection of the sublevel sets ``{V_l <= level}`` and check that
    every product image up to ``depth`` lands in their union."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    _require_path_complete(g)
    s = s.restricted_to(g.alphabet)
    if not verify_certificate(g, s, c).passed:
        raise CertificateError("certificate does not pass verification on the given set")
    forms = np.array([np.asarray(c.forms[v], dtype=float) for v in g.nodes])
    n = s.n
    if level == 0:
        X = np.zeros((1, n))
    else:
        rng = np.random.default_rng(seed)
        radius = math.sqrt(level / min(eig_extremes(p)[0] for p in forms))
        kept = []
        tries = 0
        while sum(len(k) for k in kept) < samples and tries < max_tries:
            tries += 1
            d = _unit_vectors(rng, samples, n)
            pts = d * radius * rng.random(len(d))[:, None] ** (1.0 / n)
            vals = np.einsum("ki,lij,kj->kl", pts, forms, pts)
            kept.append(pts[vals.max(axis=1) <= level])
        X = np.concatenate(kept)[:samples] if kept else np.zeros((0, n))
        if len(X) == 0:
            return BiInvarianceReport(level, depth, 0, 0, empty=True)
    tol = level * 1e-12
    violations = 0
    worst = 0.0
    for _, prods in iter_products(s, depth):
        images = np.einsum("pij,kj->pki", prods, X)
        vals = np.einsum("pki,lij,pkj->pkl", images, forms, images).min(axis=-1)
        violations += int(np.count_nonzero(vals > level + tol))
        if level > 0:
            worst = max(worst, float(vals.max() / level))
    return BiInvarianceReport(level, depth, len(X), violations, max_ratio=worst)
