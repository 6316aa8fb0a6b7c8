"""Shared fixtures-as-functions for the test suite."""
import itertools
import math

import numpy as np

from realhom.nerve import NerveComplex, circumball, min_enclosing_ball
from realhom.pointestimates import mu_norm
from realhom.polysys import PolynomialSystem, sample_kostlan

# the minimal 6-vertex triangulation of the real projective plane
RP2_FACETS = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (1, 3, 4), (1, 3, 5), (2, 3, 5), (2, 4, 5),
]
OCTAHEDRON_FACETS = [
    (a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)
]
HOLLOW_TRIANGLE_FACETS = [(0, 1), (0, 2), (1, 2)]


def complex_from_facets(facets, q_max=None):
    """Downward closure of ``facets`` as a NerveComplex."""
    top = max(len(f) for f in facets) - 1
    q_max = top if q_max is None else q_max
    levels = [set() for _ in range(q_max + 1)]
    for f in facets:
        f = tuple(sorted(f))
        for q in range(min(len(f), q_max + 1)):
            levels[q].update(itertools.combinations(f, q + 1))
    simplices = [sorted(s) for s in levels]
    return NerveComplex(len(simplices[0]), simplices)


def sphere_system():
    # x0^2 + x1^2 + x2^2: no real zeros
    return PolynomialSystem.from_terms(2, [(2, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0})])


def four_points_system():
    # x0^2 - x1^2: four zeros (+-1, +-1)/sqrt(2) on the circle
    return PolynomialSystem.from_terms(1, [(2, {(2, 0): 1.0, (0, 2): -1.0})])


def two_circles_system():
    # x0^2 + x1^2 - 2 x2^2: the circles x2 = +-1/sqrt(3) on S^2
    return PolynomialSystem.from_terms(2, [(2, {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): -2.0})])


def torus_system():
    return PolynomialSystem.from_terms(
        3, [(2, {(2, 0, 0, 0): 1.0, (0, 2, 0, 0): 1.0, (0, 0, 2, 0): -1.0, (0, 0, 0, 2): -1.0})])


FOUR_ZEROS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]]) / np.sqrt(2.0)


def random_unit(rng, dim, size=None):
    shape = (dim,) if size is None else (size, dim)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def two_circles_samples(count=2000):
    t = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    rho = np.sqrt(2.0 / 3.0)
    up = np.column_stack([rho * np.cos(t), rho * np.sin(t), np.full(count, 1 / np.sqrt(3.0))])
    return np.vstack([up, up * [1, 1, -1]])


def batched_newton(system, Y, steps=30):
    """Moore-Penrose Newton on a stack of starts; returns the final iterates."""
    from realhom.polysys import evaluate, jacobian

    Y = np.array(Y, dtype=float)
    for _ in range(steps):
        J = jacobian(system, Y)
        F = evaluate(system, Y)
        Y = Y - np.einsum("kij,kj->ki", np.linalg.pinv(J), F)
        Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    return Y


def excluded_points(system, k, count, profile=None):
    """The ``count`` excluded grid points at mesh ``2**-k`` with smallest residual."""
    from realhom import grid
    from realhom.covering import Profile, Verdict, _verdicts

    profile = profile or Profile.certified()
    X = grid.coords_to_sphere(grid.grid_coords(system.n, k, 0, grid.grid_size(system.n, k)))
    v, _ = _verdicts(system, X, 2.0 ** -k, profile)
    ex = X[v == Verdict.EXCLUDE]
    from realhom.polysys import evaluate
    res = np.linalg.norm(evaluate(system, ex), axis=1)
    return ex[np.argsort(res, kind="stable")[:count]]


def exclusion_violations(system, points, eta, starts=100, seed=0):
    """Count excluded points whose ``sep(eta)``-ball holds a zero found by Newton."""
    from realhom.grid import sep
    from realhom.polysys import evaluate

    rng = np.random.default_rng(seed)
    radius = sep(eta, system.n)
    bad = 0
    for x in points:
        d = rng.standard_normal((starts, len(x)))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        Y = x + d * radius * rng.uniform(0, 1, (starts, 1)) ** (1 / len(x))
        Y /= np.linalg.norm(Y, axis=1, keepdims=True)
        Y = Y[np.linalg.norm(Y - x, axis=1) < radius]
        Z = batched_newton(system, Y)
        zero = np.linalg.norm(evaluate(system, Z), axis=1) <= 1e-10 * system.weyl_norm
        inside = np.linalg.norm(Z - x, axis=1) < radius
        bad += int(np.any(zero & inside))
    return bad


def bareiss_det(M):
    """Exact integer determinant by fraction-free elimination."""
    A = [list(row) for row in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def minor_gcds(A):
    """``g_k`` = gcd of all k x k minors, for k = 1, 2, ... while nonzero."""
    import math

    A = [[int(v) for v in row] for row in A]
    rows, cols = len(A), len(A[0]) if A else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for R in itertools.combinations(range(rows), k):
            for C in itertools.combinations(range(cols), k):
                g = math.gcd(g, bareiss_det([[A[i][j] for j in C] for i in R]))
                if g == 1:
                    break
            if g == 1:
                break
        if g == 0:
            break
        out.append(g)
    return out


def snf_oracle_violations(count, seed=0):
    """Random integer matrices whose SNF disagrees with minor gcds or rational rank."""
    from realhom.homology import gcd_chain_ok, rational_rank, smith_normal_form

    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(count):
        rows, cols = (int(v) for v in rng.integers(1, 9, size=2))
        A = rng.integers(-5, 6, size=(rows, cols))
        if rng.random() < 0.3:  # low-rank and structured cases
            A = rng.integers(-3, 4, size=(rows, 2)) @ rng.integers(-3, 4, size=(2, cols))
        diag = smith_normal_form(A).diagonal
        g = minor_gcds(A)
        products = [int(np.prod(diag[:k + 1], dtype=object)) for k in range(len(diag))]
        if products != g or len(diag) != rational_rank(A) or (diag and not gcd_chain_ok(diag)):
            bad += 1
    return bad


def brute_force_radius(P):
    """Minimum over pair and circumsphere candidate balls that contain all points."""
    best = math.inf
    for size in range(2, len(P) + 1):
        for sub in itertools.combinations(range(len(P)), size):
            S = P[list(sub)]
            if size > 2 and np.linalg.matrix_rank(S[1:] - S[0], tol=1e-10) < size - 1:
                continue
            B = circumball(S)
            if np.all(np.linalg.norm(P - B.center, axis=1) <= B.radius * (1 + 1e-10) + 1e-12):
                best = min(best, B.radius)
    return best


def meb_violations(trials, seed=0):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        dim = int(rng.integers(1, 5))
        count = int(rng.integers(2, 7))
        P = rng.standard_normal((count, dim))
        B = min_enclosing_ball(P)
        contained = np.all(np.linalg.norm(P - B.center, axis=1) <= B.radius + 1e-12 * (1 + B.radius))
        if not contained or abs(B.radius - brute_force_radius(P)) > 1e-9:
            bad += 1
    return bad


def tangent_step(rng, y, chord):
    """Point of the sphere at Euclidean distance ``chord`` from ``y``."""
    t = rng.standard_normal(len(y))
    t -= (t @ y) * y
    t /= np.linalg.norm(t)
    theta = 2 * math.asin(min(1.0, chord / 2))
    return math.cos(theta) * y + math.sin(theta) * t


def mu_stability_violations(trials, seed=0):
    """Count instances breaking ``mu(z)/mu(y) in [1/(1+2.5e), 1+2.5e]``."""
    rng = np.random.default_rng(seed)
    bad = 0
    for trial in range(trials):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, n + 1))
        f = sample_kostlan(n, m, tuple(int(d) for d in rng.integers(2, 4, size=m)), seed=seed + trial)
        y = random_unit(rng, n + 1)
        mu_y = mu_norm(f, y)
        for eps in (0.1, 0.5):
            z = tangent_step(rng, y, 2 * eps / (f.D ** 1.5 * mu_y))
            ratio = mu_norm(f, z) / mu_y
            hi = 1 + 2.5 * eps
            if not (1 / hi - 1e-9 <= ratio <= hi + 1e-9):
                bad += 1
    return bad
