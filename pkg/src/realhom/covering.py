"""Certified covering of the spherical zero set by equal balls.

``run_covering`` scans the projected grid of mesh ``eta``.  Each point is
accepted (a zero is certified nearby and the local condition is small enough
for the current ``r = sqrt(sep(eta))``), excluded (``||f(x)|| >= delta``, so no
zero lies within ``sep(eta)``), or left undecided.  One undecided point sends
the scan to the next mesh ``eta / 2``.  When a pass finishes, the accepted
points ``X`` and the radius ``epsilon = epsilon_factor * r`` describe a union
of balls that deformation-retracts onto the zero set.

Fast exclusion
    By default ``||f(x)||`` is tested against ``delta`` before the acceptance
    conjunction.  Excluded balls contain no zeros, so the Hausdorff bound
    ``d_H(X, M) <= r`` still holds, while most points skip the SVD.
"""
from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import grid
from .errors import BudgetExceeded, InvalidInputError
from .pointestimates import PointEstimates, _bounds, estimates_batch, mu_norm_batch
from .polysys import PolynomialSystem, evaluate

log = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 16
EXTRA_PASSES = 40


@dataclass(frozen=True)
class Profile:
    """Constants of the covering loop.

    ``certified`` uses the published constants, ``guarded`` the halved/doubled
    tolerances that leave room for rounding, and ``practical`` trades the
    worst-case guarantee for a coarser final mesh.
    """

    name: str = "certified"
    alpha0: float = 0.125
    gamma_factor: float = 531.0
    beta_factor: float = 2.2
    epsilon_factor: float = 3.5
    exclusion_margin: float = 1.1
    thin_theta: float = 0.0
    max_k: int | None = None
    point_budget: int = grid.DEFAULT_POINT_BUDGET

    def __post_init__(self):
        if self.name not in ("certified", "guarded", "practical"):
            raise ValueError(f"unknown profile {self.name!r}")
        if not 0 < self.alpha0 <= 0.125:
            raise ValueError(f"alpha0 must lie in (0, 0.125], got {self.alpha0}")
        if self.thin_theta < 0:
            raise ValueError("thin_theta must be nonnegative")
        if min(self.gamma_factor, self.beta_factor, self.epsilon_factor,
               self.exclusion_margin) <= 0:
            raise ValueError("profile factors must be positive")
        if self.name != "practical":
            s = 1.0 + self.thin_theta
            lo, hi = 3.0 * s, 4.0 * s
            if not lo * (1 - 1e-12) <= self.epsilon_factor <= hi * (1 + 1e-12):
                raise ValueError(
                    f"epsilon_factor {self.epsilon_factor} outside the admissible "
                    f"interval [{lo}, {hi}] for thin_theta={self.thin_theta}")
            if self.gamma_factor < 531.0 * s * (1 - 1e-12):
                raise ValueError(
                    f"gamma_factor must be at least 531(1+theta) = {531.0 * s}")
            if self.beta_factor < 2.2 or self.exclusion_margin < 1.1:
                raise ValueError("beta_factor >= 2.2 and exclusion_margin >= 1.1 required")

    @classmethod
    def certified(cls, thin_theta=0.0, **overrides):
        s = 1.0 + thin_theta
        kw = dict(gamma_factor=531.0 * s, epsilon_factor=3.5 * s)
        kw.update(overrides)
        return cls("certified", thin_theta=thin_theta, **kw)

    @classmethod
    def guarded(cls, thin_theta=0.0, **overrides):
        s = 1.0 + thin_theta
        kw = dict(alpha0=0.0625, gamma_factor=1000.0 * s, beta_factor=4.4,
                  exclusion_margin=2.2, epsilon_factor=3.5 * s)
        kw.update(overrides)
        return cls("guarded", thin_theta=thin_theta, **kw)

    @classmethod
    def practical(cls, **overrides):
        kw = dict(gamma_factor=5.0, epsilon_factor=5.0, thin_theta=2.0)
        kw.update(overrides)
        return cls("practical", **kw)

    @classmethod
    def named(cls, name, **overrides):
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return getattr(cls, name)(**overrides)

    def epsilon_interval(self):
        """Admissible ``[3, 4] * (1 + theta)`` range for ``epsilon / r``."""
        s = 1.0 + self.thin_theta
        return 3.0 * s, 4.0 * s


class Verdict(enum.IntEnum):
    ACCEPT = 0
    EXCLUDE = 1
    REFINE = 2


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    estimates: PointEstimates | None


def sep(eta: float, n: int) -> float:
    return grid.sep(eta, n)


def delta(system: PolynomialSystem, eta: float, margin: float = 1.1) -> float:
    """Exclusion threshold ``margin * sqrt(D (n + 1)) ||f|| eta``."""
    return margin * math.sqrt(system.D * (system.n + 1)) * system.weyl_norm * eta


def _verdicts(system, X, eta, profile, fast_exclude=True):
    """Vectorised classification; returns ``(verdicts, residuals)``."""
    r = math.sqrt(sep(eta, system.n))
    thresh = delta(system, eta, profile.exclusion_margin)
    residual = np.linalg.norm(evaluate(system, X), axis=-1)
    excluded = residual >= thresh
    verdict = np.full(len(X), Verdict.REFINE, dtype=np.int8)
    todo = ~excluded if fast_exclude else np.ones(len(X), dtype=bool)
    if np.any(todo):
        mu = mu_norm_batch(system, X[todo])
        _, _, beta, gamma, alpha, _ = _bounds(system, mu, residual[todo])
        with np.errstate(divide="ignore"):
            ok = ((alpha <= profile.alpha0)
                  & (1.0 / (profile.gamma_factor * gamma) >= r)
                  & (profile.beta_factor * beta < r))
        sub = np.where(ok, Verdict.ACCEPT, Verdict.REFINE).astype(np.int8)
        verdict[todo] = sub
    if fast_exclude:
        verdict[excluded] = Verdict.EXCLUDE
    else:
        verdict[(verdict == Verdict.REFINE) & excluded] = Verdict.EXCLUDE
    return verdict, residual


def classify_point(system: PolynomialSystem, x, eta: float, profile: Profile | None = None,
                   fast_exclude: bool = True) -> Classification:
    profile = profile or Profile.certified()
    x = np.asarray(x, dtype=float)[None, :]
    v, _ = _verdicts(system, x, eta, profile, fast_exclude)
    est = None
    if not (fast_exclude and v[0] == Verdict.EXCLUDE):
        mu, res, beta, gamma, alpha, kappa = estimates_batch(system, x)
        est = PointEstimates(float(mu[0]), float(alpha[0]), float(beta[0]),
                             float(gamma[0]), float(res[0]), float(kappa[0]))
    return Classification(Verdict(int(v[0])), est)


def canonical_sign(coords) -> np.ndarray:
    """``+1`` or ``-1`` per row so that the first nonzero coordinate becomes positive."""
    coords = np.asarray(coords)
    nz = coords != 0
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(coords, first[..., None], axis=-1)[..., 0]
    return np.where(lead < 0, -1, 1)


def canonical_sphere_points(coords) -> np.ndarray:
    """Sphere points of integer coords, bitwise antipodally symmetric."""
    s = canonical_sign(coords)
    canon = grid.coords_to_sphere(coords * s[:, None])
    return canon * s[:, None]


@dataclass
class PassStats:
    k: int
    eta: float
    scanned: int
    accepted: int
    excluded: int
    refine: int
    complete: bool


@dataclass
class CoveringResult:
    points: np.ndarray
    coords: np.ndarray
    epsilon: float
    eta: float
    r: float
    k: int
    profile: str
    passes: int
    stats: list = field(default_factory=list)
    accepted_before_thinning: int = 0

    @property
    def empty(self) -> bool:
        return len(self.points) == 0

    @property
    def n(self) -> int:
        return self.points.shape[1] - 1

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "r": self.r,
            "epsilon": self.epsilon,
            "profile": self.profile,
            "points": [[float(v) for v in p] for p in self.points],
        }

    def diagnostics(self) -> dict:
        lo, hi = 3.0 * self.r, 4.0 * self.r
        return {
            "eta": self.eta,
            "k": self.k,
            "r": self.r,
            "epsilon": self.epsilon,
            "epsilon_interval": [lo, hi],
            "points": len(self.points),
            "accepted_before_thinning": self.accepted_before_thinning,
            "passes": self.passes,
        }


def covering_from_dict(doc, n=None) -> CoveringResult:
    try:
        points = np.array(doc["points"], dtype=float)
        if points.size == 0:
            points = points.reshape(0, (n or 0) + 1)
        if points.ndim != 2:
            raise InvalidInputError("points must be a list of equal-length vectors")
        return CoveringResult(points=points, coords=np.zeros((0, points.shape[1]), dtype=np.int64),
                              epsilon=float(doc["epsilon"]), eta=float(doc["eta"]),
                              r=float(doc["r"]), k=-int(round(math.log2(float(doc["eta"])))),
                              profile=str(doc.get("profile", "certified")), passes=0)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed covering document: {exc!r}") from exc


def _scan_chunk(system, spec, start, eta, profile, fast_exclude, chunk_size):
    coords = grid.grid_coords(spec.n, spec.k, start, start + chunk_size)
    # classify canonical representatives so that x and -x always agree
    s = canonical_sign(coords)
    X = grid.coords_to_sphere(coords * s[:, None])
    v, _ = _verdicts(system, X, eta, profile, fast_exclude)
    return coords[v == Verdict.ACCEPT], int(np.sum(v == Verdict.EXCLUDE)), int(np.sum(v == Verdict.REFINE)), len(coords)


def resolve_workers(workers=None) -> int:
    if workers is None:
        workers = int(os.environ.get("REALHOM_WORKERS", "1") or 1)
    return max(1, int(workers))


def run_covering(system: PolynomialSystem, profile: Profile | None = None, *,
                 workers: int | None = None, fast_exclude: bool = True,
                 chunk_size: int = CHUNK_SIZE) -> CoveringResult:
    """Halve the mesh until a full pass leaves no undecided point.

    Raises
    ------
    BudgetExceeded
        If ``max_k`` or the point budget is reached first (the system may be
        ill-posed, i.e. have a singular real zero).
    """
    profile = profile or Profile.certified()
    workers = resolve_workers(workers)
    n = system.n
    k0 = grid.initial_mesh_exponent(n)
    max_k = profile.max_k if profile.max_k is not None else k0 + EXTRA_PASSES
    stats = []
    last_refine = 0
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for k in range(k0, max_k + 1):
            spec = grid.GridSpec(n, k)
            eta = spec.eta
            total = spec.size
            if total > profile.point_budget:
                raise BudgetExceeded(
                    f"grid at eta=2^-{k} has {total} points, over the budget "
                    f"of {profile.point_budget}", eta=eta, refine_count=last_refine, count=total)
            starts = list(range(0, total, chunk_size))
            accepted, excluded, refine, scanned = [], 0, 0, 0
            for b in range(0, len(starts), workers):
                batch = starts[b:b + workers]

                def scan(start):
                    return _scan_chunk(system, spec, start, eta, profile, fast_exclude, chunk_size)

                results = list(pool.map(scan, batch)) if pool else [scan(batch[0])]
                for acc, exc, ref, cnt in results:
                    accepted.append(acc)
                    excluded += exc
                    refine += ref
                    scanned += cnt
                    if ref:
                        break
                if refine:
                    break
            complete = refine == 0
            n_acc = int(sum(len(a) for a in accepted))
            stats.append(PassStats(k, eta, scanned, n_acc, excluded, refine, complete))
            log.info("pass k=%d eta=%g scanned=%d accepted=%d refine=%d",
                     k, eta, scanned, n_acc, refine)
            if complete:
                coords = (np.vstack(accepted) if accepted
                          else np.zeros((0, n + 1), dtype=np.int64))
                points = canonical_sphere_points(coords) if len(coords) else np.zeros((0, n + 1))
                r = math.sqrt(sep(eta, n))
                before = len(points)
                if profile.thin_theta > 0 and len(points):
                    keep = thin_to_net(points, profile.thin_theta * r)
                    points, coords = points[keep], coords[keep]
                return CoveringResult(points=points, coords=coords,
                                      epsilon=profile.epsilon_factor * r, eta=eta, r=r, k=k,
                                      profile=profile.name, passes=len(stats), stats=stats,
                                      accepted_before_thinning=before)
            last_refine = refine
    finally:
        if pool is not None:
            pool.shutdown()
    raise BudgetExceeded(
        f"no certified covering up to eta=2^-{max_k}; {last_refine} undecided points remain",
        eta=math.ldexp(1.0, -max_k), refine_count=last_refine)


def _row_keys(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float) + 0.0)  # folds -0.0 into 0.0
    return a.view(np.dtype((np.void, a.dtype.itemsize * a.shape[1]))).ravel()


def _mirror_indices(points, idx):
    """Index of ``-points[i]`` for each ``i`` in ``idx``."""
    keys = _row_keys(points)
    order = np.argsort(keys, kind="stable")
    want = _row_keys(-points[idx])
    pos = np.minimum(np.searchsorted(keys[order], want), len(order) - 1)
    found = order[pos]
    if not np.all(keys[found] == want):
        raise InvalidInputError("thin_to_net needs an antipodally closed point set")
    return found


def thin_to_net(points, radius: float) -> np.ndarray:
    """Boolean mask of a ``radius``-net of an antipodally closed set.

    Canonical representatives (first nonzero coordinate positive) are first
    snapped to cubes of diameter ``radius / 4``, keeping the lowest index per
    cube; the survivors are scanned in order and one is kept iff no kept
    representative lies within ``3 radius / 4``.  Every dropped point is thus
    within ``radius`` of a kept one.  Mirrors of kept points are kept too, so
    the output stays closed under ``x -> -x``.
    """
    points = np.asarray(points, dtype=float)
    keep = np.zeros(len(points), dtype=bool)
    if radius <= 0:
        keep[:] = True
        return keep
    dim = points.shape[1]
    reps = np.flatnonzero(canonical_sign(points) > 0)
    if len(reps) == 0:
        return keep
    snap = 0.25 * radius / math.sqrt(dim)
    _, first = np.unique(np.floor(points[reps] / snap).astype(np.int64), axis=0, return_index=True)
    candidates = reps[np.sort(first)]
    radius = 0.75 * radius
    cells: dict = {}
    offsets = [tuple(o) for o in np.array(np.meshgrid(*[[-1, 0, 1]] * dim, indexing="ij")).reshape(dim, -1).T]
    r2 = radius * radius
    keys = np.floor(points[candidates] / radius).astype(np.int64)
    kept_reps = []
    for i, key in zip(candidates, map(tuple, keys)):
        p = points[i]
        close = False
        for off in offsets:
            for j in cells.get(tuple(a + b for a, b in zip(key, off)), ()):
                d = points[j] - p
                if d @ d <= r2:
                    close = True
                    break
            if close:
                break
        if not close:
            cells.setdefault(key, []).append(i)
            kept_reps.append(i)
    keep[kept_reps] = True
    if kept_reps:
        keep[_mirror_indices(points, np.array(kept_reps))] = True
    return keep


__all__ = [
    "Profile", "Verdict", "Classification", "CoveringResult", "PassStats", "sep", "delta",
    "classify_point", "run_covering", "thin_to_net", "covering_from_dict",
    "canonical_sign", "canonical_sphere_points",
]
