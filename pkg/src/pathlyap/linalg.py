"""Spectral radius and symmetric eigenvalue helpers."""

from __future__ import annotations

import numpy as np

GELFAND_SQUARINGS = 60


def _inf_norm(a: np.ndarray) -> np.ndarray:
    return np.abs(a).sum(axis=-1).max(axis=-1)


def spectral_radius(a) -> np.ndarray | float:
    """Largest eigenvalue modulus via Gelfand's formula with repeated squaring.

    ``a`` may be a single ``(n, n)`` matrix or a stack ``(..., n, n)``.  Each
    squaring is renormalized by the max-row-sum norm and the logarithms of the
    normalizers are accumulated, so ``log rho = lim 2**-k log ||a**(2**k)||``
    is evaluated without overflow.  Matrices whose powers have norm exactly one
    (permutations, sub-permutations) come out exact.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scalar = a.ndim == 2
    b = a[None] if scalar else a
    norm = _inf_norm(b)
    alive = norm > 0
    log_rho = np.where(alive, np.log(np.where(alive, norm, 1.0)), -np.inf)
    b = b / np.where(alive, norm, 1.0)[..., None, None]
    weight = 1.0
    for _ in range(GELFAND_SQUARINGS):
        if not alive.any():
            break
        b = b @ b
        weight *= 0.5
        c = _inf_norm(b)
        died = alive & (c == 0)
        log_rho = np.where(died, -np.inf, log_rho)
        alive = alive & ~died
        safe = np.where(alive, c, 1.0)
        log_rho = np.where(alive, log_rho + weight * np.log(safe), log_rho)
        b = b / safe[..., None, None]
    rho = np.exp(log_rho)
    return float(rho[0]) if scalar else rho


def eig_extremes(p: np.ndarray) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric matrix."""
    w = np.linalg.eigvalsh(p)
    return float(w[0]), float(w[-1])


def lambda_min(p: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(p)[0])


def operator_norm(a: np.ndarray) -> float:
    """Spectral (largest singular value) norm."""
    return float(np.linalg.norm(a, 2))


def is_symmetric(p: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = max(float(np.abs(p).max()), 1e-300)
    return float(np.abs(p - p.T).max()) <= rtol * scale
