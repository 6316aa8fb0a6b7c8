"""Condition numbers and Smale point estimates for homogeneous systems.

For ``x`` on the unit sphere:

* ``mu_norm(f, x) = ||f|| * ||Df(x)^+ Delta||``, computed as ``||f||`` over the
  smallest singular value of ``Delta^-1 Df(x)``;
* ``kappa(f, x) = ||f|| / sqrt(||f||^2 mu^-2 + ||f(x)||^2)``;
* the computable bounds ``beta_bar = mu ||f(x)|| / ||f||``,
  ``gamma_bar = D^(3/2) mu / 2`` and ``alpha_bar = beta_bar * gamma_bar``.

Every function has a ``*_batch`` twin working on stacks of points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid
from .errors import NewtonDiverged, NewtonUndefined
from .polysys import PolynomialSystem, evaluate, jacobian

RANK_RTOL = 1e-12
ALPHA0 = 0.125
NEWTON_MAX_ITER = 60


def _require_unit(x, tol=1e-9):
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > tol:
        raise ValueError(f"point must lie on the unit sphere (norm {np.linalg.norm(x)!r})")
    return x


def scaled_singular_values(system: PolynomialSystem, X) -> np.ndarray:
    """Singular values of ``Delta^-1 Df(x)`` for unit points, shape ``(..., m)``."""
    J = jacobian(system, X)
    J = J / np.sqrt(np.array(system.degrees, dtype=float))[:, None]
    return np.linalg.svd(J, compute_uv=False)


def mu_from_singular_values(system, sv) -> np.ndarray:
    smax = sv[..., 0]
    smin = sv[..., system.m - 1]
    tol = RANK_RTOL * np.maximum(1.0, smax)
    with np.errstate(divide="ignore"):
        return np.where(smin <= tol, np.inf, system.weyl_norm / smin)


def mu_norm_batch(system, X) -> np.ndarray:
    return mu_from_singular_values(system, scaled_singular_values(system, X))


def kappa_from(system, mu, residual):
    fn = system.weyl_norm
    with np.errstate(divide="ignore"):
        inv_mu_sq = np.where(np.isinf(mu), 0.0, 1.0 / np.square(mu))
        denom = np.sqrt(fn * fn * inv_mu_sq + np.square(residual))
        return np.where(denom == 0, np.inf, fn / denom)


def kappa_batch(system, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    residual = np.linalg.norm(evaluate(system, X), axis=-1)
    return kappa_from(system, mu_norm_batch(system, X), residual)


def mu_norm(system: PolynomialSystem, x) -> float:
    """Normalized condition number at a point of the unit sphere (may be ``inf``)."""
    x = _require_unit(x)
    return float(mu_norm_batch(system, x))


def kappa_at(system: PolynomialSystem, x) -> float:
    x = _require_unit(x)
    return float(kappa_batch(system, x))


@dataclass(frozen=True)
class PointEstimates:
    mu: float
    alpha_bar: float
    beta_bar: float
    gamma_bar: float
    residual_norm: float
    kappa_at: float


def estimates_batch(system, X):
    """Arrays ``(mu, residual, beta_bar, gamma_bar, alpha_bar, kappa)`` for unit points."""
    X = np.asarray(X, dtype=float)
    residual = np.linalg.norm(evaluate(system, X), axis=-1)
    mu = mu_norm_batch(system, X)
    return _bounds(system, mu, residual)


def _bounds(system, mu, residual):
    finite = np.isfinite(mu)
    with np.errstate(invalid="ignore"):
        beta = np.where(finite, mu * residual / system.weyl_norm, np.inf)
        gamma = np.where(finite, 0.5 * system.D ** 1.5 * mu, np.inf)
        alpha = np.where(finite, beta * gamma, np.inf)
    return mu, residual, beta, gamma, alpha, kappa_from(system, mu, residual)


def point_estimates(system: PolynomialSystem, x) -> PointEstimates:
    x = _require_unit(x)
    mu, res, beta, gamma, alpha, kappa = estimates_batch(system, x)
    return PointEstimates(float(mu), float(alpha), float(beta), float(gamma),
                          float(res), float(kappa))


def newton_mp(system: PolynomialSystem, x) -> np.ndarray:
    """One Moore-Penrose Newton step ``x - Df(x)^+ f(x)``."""
    x = np.asarray(x, dtype=float)
    J = jacobian(system, x)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[-1] <= RANK_RTOL * max(1.0, sv[0]):
        raise NewtonUndefined("Newton undefined: Jacobian is rank deficient")
    step, *_ = np.linalg.lstsq(J, evaluate(system, x), rcond=None)
    return x - step


def refine_zero(system: PolynomialSystem, x, tol: float = 1e-12) -> np.ndarray:
    """Newton-iterate a certified point (``alpha_bar <= 1/8``) onto the zero set.

    Returns a point ``p`` with ``||f(p)|| / ||f|| <= tol``.  The iterate is not
    projected back to the sphere.
    """
    est = point_estimates(system, x)
    if not est.alpha_bar <= ALPHA0:
        raise ValueError(f"precondition violated: alpha_bar = {est.alpha_bar} > {ALPHA0}")
    fn = system.weyl_norm
    p = np.asarray(x, dtype=float)
    steps = []
    for _ in range(NEWTON_MAX_ITER + 1):
        if np.linalg.norm(evaluate(system, p)) / fn <= tol:
            return p
        q = newton_mp(system, p)
        steps.append(np.linalg.norm(q - p))
        p = q
        if len(steps) >= 3 and steps[-1] > steps[-2] > steps[-3]:
            raise NewtonDiverged("Newton steps grew twice in a row")
    raise NewtonDiverged(f"no convergence within {NEWTON_MAX_ITER} iterations")


def kappa_upper_estimate(system: PolynomialSystem, k: int,
                         budget: int = grid.DEFAULT_POINT_BUDGET,
                         chunk_size: int = 1 << 16) -> float:
    """Maximum of ``kappa(f, x)`` over the grid of mesh ``2**-k``.

    This never exceeds the true ``kappa(f)`` (a maximum over the sphere); it is a
    diagnostic, not a certificate.
    """
    if k < grid.initial_mesh_exponent(system.n):
        raise ValueError(f"mesh exponent {k} is below the initial exponent")
    best = 0.0
    for _, coords in grid.iter_chunks(grid.GridSpec(system.n, k), chunk_size, budget):
        best = max(best, float(np.max(kappa_batch(system, grid.coords_to_sphere(coords)))))
    return best


def tau_proxy(system: PolynomialSystem, points) -> float:
    """``1 / (87 max gamma_bar)`` over ``points``; a diagnostic only."""
    if len(points) == 0:
        return math.inf
    gamma = estimates_batch(system, points)[3]
    return float(1.0 / (87.0 * np.max(gamma)))
