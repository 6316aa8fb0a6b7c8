"""Cech nerves of equal-radius ball covers.

A set of centers spans a simplex iff their open ``epsilon``-balls share a
point, i.e. iff the smallest ball enclosing the centers has radius below
``epsilon``.  Simplices are tuples of increasing vertex indices; a
``q``-simplex has ``q + 1`` vertices.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, InvalidInputError

log = logging.getLogger(__name__)

MEB_SEED = 20240611
TIE_TOL = 1e-12
DEFAULT_SIMPLEX_BUDGET = 10_000_000


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, p, slack=1e-12) -> bool:
        return float(np.linalg.norm(np.asarray(p) - self.center)) <= self.radius + slack * (1 + self.radius)


def circumball(S) -> Ball:
    """Smallest ball with all points of ``S`` on its boundary.

    The center lies in the affine hull of ``S``; for affinely dependent input
    the least-squares solution is used.
    """
    S = np.asarray(S, dtype=float)
    if len(S) == 1:
        return Ball(S[0].copy(), 0.0)
    U = S[1:] - S[0]
    G = U @ U.T
    b = 0.5 * np.einsum("ij,ij->i", U, U)
    try:
        lam = np.linalg.solve(G, b)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(G, b, rcond=None)[0]
    c = S[0] + lam @ U
    return Ball(c, float(np.max(np.linalg.norm(S - c, axis=1))))


def _welzl(P, R, n, dim):
    if n == 0 or len(R) == dim + 1:
        if not R:
            return Ball(np.zeros(dim), -1.0)
        return circumball(R)
    p = P[n - 1]
    B = _welzl(P, R, n - 1, dim)
    if B.radius >= 0 and np.linalg.norm(p - B.center) <= B.radius * (1 + 1e-12) + 1e-15:
        return B
    return _welzl(P, R + [p], n - 1, dim)


def min_enclosing_ball(points, seed: int = MEB_SEED) -> Ball:
    """Smallest enclosing ball by Welzl's algorithm on a seeded shuffle.

    The result is checked for containment; if rounding broke it the ball is
    recomputed by exhaustive search over support sets.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or len(P) == 0:
        raise ValueError("min_enclosing_ball needs at least one point")
    order = np.random.default_rng(seed).permutation(len(P))
    B = _welzl([P[i] for i in order], [], len(P), P.shape[1])
    if np.all(np.linalg.norm(P - B.center, axis=1) <= B.radius + 1e-12 * (1 + B.radius)):
        return B
    log.debug("Welzl containment check failed, falling back to exhaustive search")
    return enclosing_ball_exhaustive(P)


def enclosing_ball_exhaustive(points) -> Ball:
    """Minimum over circumballs of all subsets that enclose every point."""
    P = np.asarray(points, dtype=float)
    best = None
    for size in range(1, min(len(P), P.shape[1] + 1) + 1):
        for sub in itertools.combinations(range(len(P)), size):
            B = circumball(P[list(sub)])
            if np.all(np.linalg.norm(P - B.center, axis=1) <= B.radius * (1 + 1e-9) + 1e-12):
                if best is None or B.radius < best.radius:
                    best = B
    return best


def enclosing_radii(P) -> np.ndarray:
    """Smallest enclosing radii of a batch of small point sets, shape ``(B, k, d)``.

    Vectorized exhaustive search: the smallest circumball of a subset that
    contains all ``k`` points.  Meant for ``k <= 5``; rows where rounding
    rejects every subset fall back to :func:`min_enclosing_ball`.
    """
    P = np.asarray(P, dtype=float)
    B, k, _ = P.shape
    best = np.full(B, np.inf)
    for size in range(1, k + 1):
        for sub in itertools.combinations(range(k), size):
            S = P[:, sub, :]
            if size == 1:
                c = S[:, 0]
                ok = np.ones(B, dtype=bool)
            else:
                U = S[:, 1:] - S[:, :1]
                G = np.einsum("bid,bjd->bij", U, U)
                rhs = 0.5 * np.einsum("bid,bid->bi", U, U)
                det = np.linalg.det(G)
                scale = np.prod(np.einsum("bii->bi", G), axis=1)
                ok = np.abs(det) > 1e-12 * scale
                if not ok.any():
                    continue
                G[~ok] = np.eye(size - 1)
                lam = np.linalg.solve(G, rhs[..., None])[..., 0]
                c = S[:, 0] + np.einsum("bi,bid->bd", lam, U)
            dist = np.linalg.norm(P - c[:, None, :], axis=2)
            rad = np.max(dist[:, list(sub)], axis=1)
            inside = np.all(dist <= rad[:, None] * (1 + 1e-12) + 1e-15, axis=1)
            take = ok & inside & (rad < best)
            best[take] = rad[take]
    for i in np.flatnonzero(~np.isfinite(best)):
        best[i] = min_enclosing_ball(P[i]).radius
    return best


def _jung_ratio(q):
    # radius <= diam * sqrt(q / (2 (q + 1))) for q + 1 points
    return math.sqrt(q / (2.0 * (q + 1))) if q > 0 else 0.0


@dataclass
class NerveComplex:
    vertex_count: int
    simplices: list  # simplices[q] = sorted list of (q+1)-tuples
    ties: int = 0
    mode: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def q_max(self) -> int:
        return len(self.simplices) - 1

    def counts(self):
        return [len(s) for s in self.simplices]

    def to_dict(self) -> dict:
        doc = {"q_max": self.q_max,
               "simplices": {str(q): [list(s) for s in sims] for q, sims in enumerate(self.simplices)}}
        if self.mode is not None:
            doc["mode"] = self.mode
        return doc

    @classmethod
    def from_dict(cls, doc) -> "NerveComplex":
        try:
            q_max = int(doc["q_max"])
            raw = doc["simplices"]
            simplices = []
            for q in range(q_max + 1):
                sims = sorted(tuple(int(v) for v in s) for s in raw.get(str(q), []))
                for s in sims:
                    if len(s) != q + 1 or any(a >= b for a, b in zip(s, s[1:])):
                        raise InvalidInputError(f"bad {q}-simplex {list(s)}")
                if len(set(sims)) != len(sims):
                    raise InvalidInputError(f"duplicate {q}-simplices")
                simplices.append(sims)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InvalidInputError(f"malformed nerve document: {exc!r}") from exc
        verts = {s[0] for s in simplices[0]} if simplices else set()
        complex_ = cls(len(verts), simplices, mode=doc.get("mode"))
        check_downward_closed(complex_)
        return complex_


def check_downward_closed(complex_: NerveComplex):
    for q in range(1, len(complex_.simplices)):
        lower = set(complex_.simplices[q - 1])
        for s in complex_.simplices[q]:
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                if face not in lower:
                    raise InvalidInputError(f"face {list(face)} of {list(s)} is missing")


class SpatialHash:
    """Uniform-grid bucket index for fixed-radius neighbor queries."""

    def __init__(self, points, cell):
        self.points = np.asarray(points, dtype=float)
        self.cell = float(cell)
        self.keys = np.floor(self.points / self.cell).astype(np.int64)
        self.buckets: dict = {}
        for i, key in enumerate(map(tuple, self.keys)):
            self.buckets.setdefault(key, []).append(i)
        dim = self.points.shape[1]
        self.offsets = [tuple(o) for o in itertools.product((-1, 0, 1), repeat=dim)]

    def pairs_within(self, radius):
        """All index pairs ``i < j`` with ``||p_i - p_j|| < radius <= cell``."""
        out = []
        for key, members in self.buckets.items():
            cand = []
            for off in self.offsets:
                cand.extend(self.buckets.get(tuple(a + b for a, b in zip(key, off)), ()))
            cand = np.array(sorted(cand))
            for i in members:
                c = cand[cand > i]
                if len(c) == 0:
                    continue
                d = np.linalg.norm(self.points[c] - self.points[i], axis=1)
                out.extend((i, int(j)) for j in c[d < radius])
        out.sort()
        return out


_PAIR_CHUNK = 1 << 16


def _extend(simplices_q, adjacency, test, budget, total):
    """Clique extension of q-simplices by larger vertices passing ``test``.

    Candidate pairs (simplex, vertex) are collected first and decided in
    vectorized chunks.
    """
    rows, cols = [], []
    for r, s in enumerate(simplices_q):
        common = adjacency[s[0]]
        for v in s[1:]:
            common = common & adjacency[v]
        cand = sorted(u for u in common if u > s[-1])
        rows.extend([r] * len(cand))
        cols.extend(cand)
    if not rows:
        return []
    V = np.array(simplices_q, dtype=np.int64)
    rows = np.array(rows, dtype=np.int64)
    cols = np.array(cols, dtype=np.int64)
    out = []
    for start in range(0, len(rows), _PAIR_CHUNK):
        r, c = rows[start:start + _PAIR_CHUNK], cols[start:start + _PAIR_CHUNK]
        ok = test.decide(V[r], c)
        out.extend(zip(*np.column_stack([V[r[ok]], c[ok]]).T.tolist()))
        if total + len(out) > budget:
            raise BudgetExceeded(f"nerve exceeds the simplex budget of {budget}",
                                 count=total + len(out))
    out.sort()
    return out


def _adjacency(count, pairs):
    adj = [set() for _ in range(count)]
    for i, j in pairs:
        adj[i].add(j)
        adj[j].add(i)
    return adj


class _CechTest:
    """Face predicate: MEB radius of the centers below ``epsilon``.

    ``batch`` decides all extensions of one simplex at once; Jung's bound
    accepts and the diameter rejects most candidates without an MEB.
    """

    def __init__(self, points, epsilon, seed=MEB_SEED):
        self.points = points
        self.epsilon = epsilon
        self.seed = seed
        self.ties = 0

    def _patterns(self, k):
        return [np.ones(k)]

    _candidate_signs = (1.0,)

    def _below(self, radii):
        near = np.abs(radii - self.epsilon) <= TIE_TOL
        for rad in radii[near]:
            self.ties += 1
            log.warning("enclosing radius %r within %g of epsilon", float(rad), TIE_TOL)
        return radii < self.epsilon

    def radius_below(self, P):
        return bool(self._below(np.array([min_enclosing_ball(P, self.seed).radius]))[0])

    def decide(self, V, cand):
        """Mask over rows: is ``V[i] + (cand[i],)`` a face?  ``V`` has shape ``(B, k)``."""
        eps = self.epsilon
        S = self.points[V]
        C = self.points[cand]
        ratio = _jung_ratio(V.shape[1])
        accepted = np.zeros(len(cand), dtype=bool)
        for e in self._patterns(V.shape[1]):
            Q = S * e[None, :, None]
            dq = Q[:, :, None, :] - Q[:, None, :, :]
            base = np.max(np.einsum("bijd,bijd->bij", dq, dq), axis=(1, 2))
            for sigma in self._candidate_signs:
                idx = np.flatnonzero(~accepted & (base < (2 * eps) ** 2))
                if len(idx) == 0:
                    break
                Qi, Cs = Q[idx], sigma * C[idx]
                d = Cs[:, None, :] - Qi
                diam = np.sqrt(np.maximum(base[idx], np.max(np.einsum("bkd,bkd->bk", d, d), axis=1)))
                acc = diam * ratio < eps * (1 - 1e-9)
                accepted[idx[acc]] = True
                open_ = ~acc & (diam < 2 * eps * (1 + 1e-9))
                if open_.any():
                    sets = np.concatenate([Qi[open_], Cs[open_][:, None, :]], axis=1)
                    accepted[idx[open_][self._below(enclosing_radii(sets))]] = True
        return accepted

    def batch(self, s, cand):
        """Mask of the vertices ``v`` in ``cand`` for which ``s + (v,)`` is a face."""
        cand = np.asarray(cand, dtype=np.int64)
        V = np.broadcast_to(np.asarray(s, dtype=np.int64), (len(cand), len(s)))
        return self.decide(V, cand)

    def __call__(self, cand):
        cand = tuple(cand)
        return bool(self.batch(cand[:-1], np.array([cand[-1]]))[0])


def build_nerve(points, epsilon: float, q_max: int,
                simplex_budget: int = DEFAULT_SIMPLEX_BUDGET, seed: int = MEB_SEED) -> NerveComplex:
    """Nerve of ``{B(x, epsilon)}`` up to dimension ``q_max``."""
    P = np.asarray(points, dtype=float)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    K = len(P)
    simplices = [[(i,) for i in range(K)]]
    if K and q_max >= 1:
        reach = 2 * (epsilon + TIE_TOL)
        pairs, ties = [], 0
        for i, j in SpatialHash(P, reach).pairs_within(reach):
            half = float(np.linalg.norm(P[i] - P[j])) / 2
            if abs(half - epsilon) <= TIE_TOL:
                ties += 1
                log.warning("edge radius %r within %g of epsilon", half, TIE_TOL)
            if half < epsilon:
                pairs.append((i, j))
        test = _CechTest(P, epsilon, seed)
        adjacency = _adjacency(K, pairs)
        simplices.append(pairs)
        total = K + len(pairs)
        if total > simplex_budget:
            raise BudgetExceeded(f"nerve exceeds the simplex budget of {simplex_budget}", count=total)
        for q in range(2, q_max + 1):
            simplices.append(_extend(simplices[-1], adjacency, test, simplex_budget, total))
            total += len(simplices[-1])
        return NerveComplex(K, simplices, ties=ties + test.ties, mode="sphere")
    simplices += [[] for _ in range(q_max)]
    return NerveComplex(K, simplices, mode="sphere")


def projective_reduce(points) -> np.ndarray:
    """Indices of representatives of ``{x, -x}`` with first nonzero coordinate positive."""
    P = np.asarray(points, dtype=float)
    present = {tuple(p) for p in P}
    reps = []
    for i, p in enumerate(P):
        if tuple(-p) not in present:
            raise InvalidInputError("point set is not closed under x -> -x")
        nz = np.flatnonzero(p)
        if len(nz) and p[nz[0]] > 0:
            reps.append(i)
    return np.array(reps, dtype=np.int64)


class _ProjectiveTest(_CechTest):
    """Face predicate on classes: some sign choice with ``e_0 = +1`` has MEB radius below ``epsilon``."""

    _candidate_signs = (1.0, -1.0)

    def _patterns(self, k):
        return [np.array((1.0,) + signs) for signs in itertools.product((1.0, -1.0), repeat=k - 1)]


def build_projective_nerve(representatives, epsilon: float, q_max: int,
                           simplex_budget: int = DEFAULT_SIMPLEX_BUDGET,
                           seed: int = MEB_SEED) -> NerveComplex:
    """Nerve of the projective balls ``{B(x, eps), B(-x, eps)}`` over classes ``[x]``."""
    if not epsilon < 1:
        raise ValueError("projective mode requires epsilon < 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    R = np.asarray(representatives, dtype=float)
    K = len(R)
    simplices = [[(i,) for i in range(K)]]
    if K and q_max >= 1:
        both = np.vstack([R, -R])
        raw = SpatialHash(both, 2 * epsilon).pairs_within(2 * epsilon)
        pairs = sorted({(min(i % K, j % K), max(i % K, j % K)) for i, j in raw if i % K != j % K})
        adjacency = _adjacency(K, pairs)
        simplices.append(pairs)
        test = _ProjectiveTest(R, epsilon, seed)
        total = K + len(pairs)
        for q in range(2, q_max + 1):
            simplices.append(_extend(simplices[-1], adjacency, test, simplex_budget, total))
            total += len(simplices[-1])
        return NerveComplex(K, simplices, ties=test.ties, mode="projective")
    simplices += [[] for _ in range(q_max)]
    return NerveComplex(K, simplices, mode="projective")
