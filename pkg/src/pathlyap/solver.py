"""Heuristic search for quadratic certificates and gamma bisection for JSR upper bounds.

The search never decides feasibility on its own: a candidate is returned only
after :func:`verify_certificate` accepts it.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import NotPathCompleteError
from .graph import LabeledGraph
from .linalg import operator_norm
from .lyapunov import DEFAULT_DELTA, Certificate, JsrBounds, MatrixSet, jsr_lower_bound, verify_certificate
from .pathcomplete import check_path_complete

log = logging.getLogger(__name__)

EPS_FLOOR = 1e-10
SMOOTHING = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9)


@dataclass(frozen=True)
class SolverResult:
    certificate: Optional[Certificate]
    iterations: int
    best_relative_margin: float

    @property
    def feasible(self) -> bool:
        return self.certificate is not None


class _Problem:
    """Smoothed worst-case margin of the LMIs as a function of the factors ``L_i``."""

    def __init__(self, g: LabeledGraph, s: MatrixSet):
        self.n = s.n
        self.nodes = g.nodes
        self.N = len(g.nodes)
        idx = {v: k for k, v in enumerate(g.nodes)}
        self.edges = [(idx[e.src], idx[e.dst], s.product(e.label)) for e in g.edges]

    def forms(self, x):
        L = x.reshape(self.N, self.n, self.n)
        return L, L @ np.swapaxes(L, 1, 2) + EPS_FLOOR * np.eye(self.n)

    def constraints(self, P):
        mats = [P[i] for i in range(self.N)]
        for i, j, phi in self.edges:
            mats.append(P[i] - phi.T @ P[j] @ phi)
        return np.array(mats)

    def objective(self, x, mu):
        L, P = self.forms(x)
        T = float(np.trace(P, axis1=1, axis2=2).sum())
        C = self.constraints(P)
        lam, vec = np.linalg.eigh((C + np.swapaxes(C, 1, 2)) / 2)
        z = lam / T
        zmin = z.min()
        w = np.exp(-(z - zmin) / mu)
        total = w.sum()
        soft = zmin - mu * np.log(total)
        pi = w / total
        # d soft / d C_c and d soft / d T
        G = np.einsum("cik,ck,cjk->cij", vec, pi, vec) / T
        gT = -float((pi * z).sum()) / T
        H = G[: self.N].copy()
        for k, (i, j, phi) in enumerate(self.edges):
            Ge = G[self.N + k]
            H[i] += Ge
            H[j] -= phi @ Ge @ phi.T
        H += gT * np.eye(self.n)
        grad = 2.0 * H @ L
        return -soft / mu, -grad.ravel() / mu

    def certificate(self, x, delta):
        _, P = self.forms(x)
        P = (P + np.swapaxes(P, 1, 2)) / 2
        return Certificate({v: P[k] for k, v in enumerate(self.nodes)}, delta=delta)


def _sum_start(prob: _Problem) -> Optional[np.ndarray]:
    """Factors of the solution of ``P_i = I + sum_(i->j) Phi' P_j Phi`` when it is positive definite."""
    n, N = prob.n, prob.N
    size = N * n * n
    T = np.zeros((size, size))
    for i, j, phi in prob.edges:
        T[i * n * n:(i + 1) * n * n, j * n * n:(j + 1) * n * n] += np.kron(phi.T, phi.T)
    rhs = np.tile(np.eye(n).ravel(), N)
    try:
        vec = np.linalg.solve(np.eye(size) - T, rhs)
    except np.linalg.LinAlgError:
        return None
    P = vec.reshape(N, n, n)
    P = (P + np.swapaxes(P, 1, 2)) / 2
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        return None
    return (L / np.sqrt(np.trace(P, axis1=1, axis2=2).sum())).ravel()


def baseline_solver(g: LabeledGraph, s: MatrixSet, iterations: int = 20000, seed: int = 0,
                    delta: float = DEFAULT_DELTA, initial: Optional[Certificate] = None,
                    restarts: int = 3) -> SolverResult:
    """Look for forms ``P_i = L_i L_i' + eps I`` satisfying every edge inequality of ``g``.

    Runs L-BFGS on a log-sum-exp smoothed minimum of all constraint eigenvalues
    (normalized by the total trace), tightening the smoothing in stages.  Returns
    a result whose ``certificate`` is set only if it passes verification at
    ``delta``; otherwise the outcome is unknown, not infeasible.
    """
    s = s.restricted_to(g.alphabet)
    prob = _Problem(g, s)
    rng = np.random.default_rng(seed)
    starts = []
    if initial is not None:
        try:
            P0 = np.array([np.asarray(initial.forms[v], dtype=float) for v in g.nodes])
            L0 = np.linalg.cholesky((P0 + np.swapaxes(P0, 1, 2)) / 2)
            starts.append((L0 / np.sqrt(np.trace(P0, axis1=1, axis2=2).sum())).ravel())
        except (KeyError, np.linalg.LinAlgError):
            pass
    warm = _sum_start(prob)
    if warm is not None:
        starts.append(warm)
    starts.append(np.tile(np.eye(s.n), (prob.N, 1, 1)).ravel() / np.sqrt(prob.N * s.n))
    while len(starts) < restarts + 1:
        starts.append(rng.normal(size=prob.N * s.n * s.n) / np.sqrt(prob.N * s.n * s.n))

    used = 0
    best = -np.inf
    per_start = max(1, iterations // len(starts))
    for x in starts:
        cert = prob.certificate(x, delta)
        report = verify_certificate(g, s, cert, delta)
        best = max(best, report.worst.relative)
        if report.passed:
            return SolverResult(cert, used, report.worst.relative)
        per_stage = max(1, per_start // len(SMOOTHING))
        for mu in SMOOTHING:
            if used >= iterations:
                break
            budget = min(per_stage, iterations - used)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                res = minimize(prob.objective, x, args=(mu,), jac=True, method="L-BFGS-B",
                               options={"maxiter": budget, "gtol": 1e-14, "ftol": 1e-15})
            used += max(int(res.nit), 1)
            if not np.all(np.isfinite(res.x)):
                break
            x = res.x / np.linalg.norm(res.x) * np.sqrt(prob.N)
            cert = prob.certificate(x, delta)
            report = verify_certificate(g, s, cert, delta)
            best = max(best, report.worst.relative)
            if report.passed:
                log.debug("certificate found after %d iterations (mu=%g)", used, mu)
                return SolverResult(cert, used, report.worst.relative)
        if used >= iterations:
            break
    return SolverResult(None, used, best)


def _identity_certificate(g: LabeledGraph, n: int, delta: float) -> Certificate:
    return Certificate({v: np.eye(n) for v in g.nodes}, delta=delta)


def gamma_star_bisection(g: LabeledGraph, s: MatrixSet, tol: float = 1e-6, iterations: int = 4000,
                         seed: int = 0, lower_depth: int = 4, delta: float = DEFAULT_DELTA,
                         max_steps: int = 200) -> JsrBounds:
    """Bracket the JSR: a word-based lower bound and the smallest verified-feasible scaling.

    The upper bound is the least ``gamma`` at which :func:`baseline_solver`
    produced a certificate for ``s / gamma`` that passed verification.  Since
    the solver is a heuristic this over-estimates the true optimal scaling.
    Refuses graphs that are not path-complete, for which no upper bound is valid.
    """
    pc = check_path_complete(g)
    if not pc.complete:
        raise NotPathCompleteError(
            "graph is not path-complete (missing word "
            f"{''.join(pc.missing_word)!r}); its inequalities do not bound the JSR: "
            "an unstable matrix set satisfies them"
        )
    s = s.restricted_to(g.alphabet)
    lower, witness = jsr_lower_bound(s, lower_depth)
    top = max(operator_norm(a) for a in s.matrices) + tol
    hi = top
    cert = _identity_certificate(g, s.n, delta)
    if not verify_certificate(g, s.scaled(1.0 / hi), cert, delta).passed:
        raise AssertionError("identity forms must certify gamma above the largest operator norm")
    lo = lower
    calls = 0
    found = False
    for _ in range(max_steps):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        res = baseline_solver(g, s.scaled(1.0 / mid), iterations=iterations, seed=seed,
                              delta=delta, initial=cert)
        calls += 1
        if res.feasible:
            hi, cert, found = mid, res.certificate, True
        else:
            lo = mid
    if not found and hi == top and top - lower > tol * top:
        log.warning("solver found no certificate below the operator-norm bound %.6g", top)
    return JsrBounds(lower, witness, hi, cert, upper_is_fallback=not found, solver_calls=calls)
