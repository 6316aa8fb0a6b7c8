"""Cube-surface grids and their projection onto the unit sphere.

The grid of mesh ``eta = 2**-k`` consists of the integer vectors
``v in [-2**k, 2**k]**(n+1)`` with ``max|v_j| = 2**k``; the cube point is
``v * eta`` and the sphere point is ``v / ||v||``.  Points are addressed by
their rank in the lexicographic order of ``v``, which makes any contiguous
index range independently enumerable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded

DEFAULT_POINT_BUDGET = 500_000_000


def initial_mesh_exponent(n: int) -> int:
    """Smallest ``k`` with ``2**k >= 4 sqrt(n + 1)``, i.e. ``sep(2**-k) <= 1/4``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    k = 0
    while 4 ** k < 16 * (n + 1):
        k += 1
    return k


def grid_size(n: int, k: int) -> int:
    """Exact number of points of the grid of mesh ``2**-k`` on the n-cube surface."""
    M = 2 ** k
    return (2 * M + 1) ** (n + 1) - (2 * M - 1) ** (n + 1)


def grid_cardinality_bound(n: int, eta: float) -> int:
    """The bound ``2 (n + 1) (2 / eta)**n`` on the grid size, as an exact integer."""
    mant, exp = math.frexp(eta)
    if eta <= 0 or mant != 0.5:
        raise ValueError(f"eta must be a positive power of two, got {eta!r}")
    k = 1 - exp  # eta = 2**-k
    if k < 0:
        raise ValueError(f"eta must be at most 1, got {eta!r}")
    return 2 * (n + 1) * 2 ** ((k + 1) * n)


@dataclass(frozen=True)
class GridSpec:
    n: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"mesh exponent must be >= 1, got {self.k}")

    @property
    def eta(self) -> float:
        return math.ldexp(1.0, -self.k)

    @property
    def size(self) -> int:
        return grid_size(self.n, self.k)


@dataclass(frozen=True)
class GridPoint:
    coords: tuple  # integer lattice coordinates
    cube: np.ndarray
    sphere: np.ndarray


def grid_coords(n: int, k: int, start: int, stop: int) -> np.ndarray:
    """Integer coordinates of the grid points ranked ``start <= i < stop``.

    Returns an ``(stop - start, n + 1)`` int64 array in lexicographic order.
    """
    M = 2 ** k
    total = grid_size(n, k)
    start = max(0, start)
    stop = min(stop, total)
    if (2 * M + 1) ** (n + 1) >= 2 ** 62:
        raise BudgetExceeded(f"grid with n={n}, k={k} is too large to index", count=total)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, n + 1), dtype=np.int64)
    hit = np.zeros(idx.size, dtype=bool)  # some earlier coordinate is +-M
    for p in range(n + 1):
        rest = n - p
        free = (2 * M + 1) ** rest
        # completions when the remaining coordinates must still reach +-M
        constrained = free - (2 * M - 1) ** rest
        v = np.empty(idx.size, dtype=np.int64)

        h = hit
        v[h] = idx[h] // free - M
        idx[h] = idx[h] % free

        u = ~hit
        iu = idx[u]
        vu = np.empty(iu.size, dtype=np.int64)
        low = iu < free
        vu[low] = -M
        mid_end = free + (2 * M - 1) * constrained
        mid = ~low & (iu < mid_end)
        high = ~low & ~mid
        if constrained:
            off = iu[mid] - free
            vu[mid] = -M + 1 + off // constrained
            iu[mid] = off % constrained
        vu[high] = M
        iu[high] = iu[high] - mid_end
        v[u] = vu
        idx[u] = iu
        hit = hit | (np.abs(v) == M)
        out[:, p] = v
    return out


def coords_to_sphere(coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    return c / np.linalg.norm(c, axis=-1, keepdims=True)


def iter_chunks(spec: GridSpec, chunk_size: int = 1 << 16, budget: int = DEFAULT_POINT_BUDGET):
    """Yield ``(start, coords)`` blocks covering the whole grid in order."""
    total = spec.size
    if total > budget:
        raise BudgetExceeded(
            f"grid at eta=2^-{spec.k} has {total} points, over the budget of {budget}",
            eta=spec.eta, count=total)
    for start in range(0, total, chunk_size):
        yield start, grid_coords(spec.n, spec.k, start, start + chunk_size)


def enumerate_grid(spec: GridSpec, budget: int = DEFAULT_POINT_BUDGET):
    """Stream every grid point once, in lexicographic order of integer coordinates."""
    for _, block in iter_chunks(spec, budget=budget):
        cubes = block * spec.eta
        spheres = coords_to_sphere(block)
        for c, y, x in zip(block, cubes, spheres):
            yield GridPoint(tuple(int(a) for a in c), y, x)


def project_cube_to_sphere(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    norm = np.linalg.norm(y, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("cannot project the origin")
    return y / norm


def sphere_to_cube(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    norm = np.max(np.abs(x), axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("cannot project the origin")
    return x / norm


def sep(eta: float, n: int) -> float:
    """Covering radius ``eta * sqrt(n + 1)`` of the projected grid."""
    return eta * math.sqrt(n + 1)
