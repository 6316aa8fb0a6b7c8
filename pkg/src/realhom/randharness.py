"""Empirical check of the condition-number tail bound on Kostlan systems.

``kappa(f)`` is estimated from below by its maximum over a grid, so the
comparison against the tail bound is one-sided: the empirical exceedance of
the estimate can never legitimately exceed the bound.  It says nothing about
how sharp the bound is.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import grid
from .covering import resolve_workers
from .errors import BudgetExceeded
from .pointestimates import kappa_batch
from .polysys import sample_kostlan


def theoretical_tail_bound(n: int, m: int, D: int, N: int, t: float) -> float:
    """``min(1, 4e m^(n+2) (n+1) D^(n+1) N / t)``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return min(1.0, 4.0 * math.e * m ** (n + 2) * (n + 1) * D ** (n + 1) * N / t)


@dataclass
class TailReport:
    thresholds: list
    empirical: list
    bound: list
    samples: int
    seed: int
    mean_log2: float = math.nan
    estimates: list = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "empirical", "bound", "samples", "seed"])
        for t, e, b in zip(self.thresholds, self.empirical, self.bound):
            w.writerow([repr(float(t)), repr(float(e)), repr(float(b)), self.samples, self.seed])
        return buf.getvalue()


def _grid_sphere_points(n, k, budget):
    spec = grid.GridSpec(n, k)
    if spec.size > budget:
        raise BudgetExceeded(f"grid at eta=2^-{k} has {spec.size} points, over the budget of {budget}",
                             eta=spec.eta, count=spec.size)
    return grid.coords_to_sphere(grid.grid_coords(n, k, 0, spec.size))


def empirical_tail(n: int, m: int, degrees, samples: int, thresholds, k: int | None = None,
                   seed: int = 0, workers: int | None = None,
                   budget: int = 1_000_000) -> TailReport:
    """Exceedance fractions of the grid estimate of ``kappa`` over Kostlan samples.

    Sample ``i`` is drawn with seed ``seed + i``; results are merged in sample
    order, so the report does not depend on ``workers``.
    """
    if samples <= 0:
        raise ValueError("no samples")
    degrees = tuple(int(d) for d in degrees)
    if k is None:
        k = grid.initial_mesh_exponent(n) + 3
    X = _grid_sphere_points(n, k, budget)

    def one(i):
        f = sample_kostlan(n, m, degrees, seed=seed + i)
        return float(np.max(kappa_batch(f, X))), f.D, f.N

    workers = resolve_workers(workers)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            out = list(pool.map(one, range(samples)))
    else:
        out = [one(i) for i in range(samples)]
    est = np.array([o[0] for o in out])
    D, N = out[0][1], out[0][2]
    thresholds = sorted(float(t) for t in thresholds)
    empirical = [float(np.mean(est >= t)) for t in thresholds]
    bound = [theoretical_tail_bound(n, m, D, N, t) for t in thresholds]
    with np.errstate(divide="ignore"):
        mean_log2 = float(np.mean(np.log2(est)))
    return TailReport(thresholds, empirical, bound, samples, seed, mean_log2, est.tolist())


__all__ = ["TailReport", "theoretical_tail_bound", "empirical_tail"]
