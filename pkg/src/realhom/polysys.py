"""Homogeneous polynomial systems: representation, evaluation, Weyl geometry.

A system ``f = (f_1, ..., f_m)`` lives in ``n + 1`` variables ``x_0, ..., x_n``.
Each polynomial is stored as a dense map from exponent tuples to float
coefficients.  Evaluation and differentiation accept a single point or a
stack of points with shape ``(..., n + 1)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidSystemError


def multinomial(exponents) -> int:
    """Multinomial coefficient ``d! / (a_0! ... a_n!)`` with ``d = sum(a)``."""
    out = math.factorial(sum(exponents))
    for a in exponents:
        out //= math.factorial(a)
    return out


def exponent_vectors(nvars: int, degree: int):
    """All exponent tuples of length ``nvars`` summing to ``degree``.

    Ordered lexicographically decreasing, so ``x_0^d`` comes first.
    """
    if nvars == 1:
        yield (degree,)
        return
    for a in range(degree, -1, -1):
        for rest in exponent_vectors(nvars - 1, degree - a):
            yield (a,) + rest


@dataclass(frozen=True)
class HomogeneousPolynomial:
    degree: int
    terms: dict  # exponent tuple -> float

    def __post_init__(self):
        if self.degree < 1:
            raise InvalidSystemError(f"degree must be positive, got {self.degree}")
        for exps, coeff in self.terms.items():
            if any(a < 0 for a in exps):
                raise InvalidSystemError(f"negative exponent in {exps}")
            if sum(exps) != self.degree:
                raise InvalidSystemError(
                    f"inconsistent term: exponents {list(exps)} sum to {sum(exps)}, "
                    f"degree is {self.degree}"
                )
            if not math.isfinite(coeff):
                raise InvalidSystemError(f"non-finite coefficient {coeff!r}")

    @property
    def nvars(self):
        return len(next(iter(self.terms))) if self.terms else None

    def weyl_norm_sq(self) -> float:
        return sum(c * c / multinomial(a) for a, c in self.terms.items())


@dataclass(frozen=True)
class PolynomialSystem:
    """``m`` homogeneous polynomials in ``n + 1`` variables, ``1 <= m <= n``."""

    n: int
    polys: tuple
    _arrays: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if self.n < 1:
            raise InvalidSystemError(f"n must be at least 1, got {self.n}")
        if not 1 <= self.m <= self.n:
            raise InvalidSystemError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        for i, p in enumerate(self.polys):
            if p.degree < 2:
                raise InvalidSystemError(
                    f"polynomial {i} has degree {p.degree}; linear equations must be "
                    "eliminated beforehand (reduce to fewer equations and unknowns)"
                )
            for exps in p.terms:
                if len(exps) != self.n + 1:
                    raise InvalidSystemError(
                        f"polynomial {i}: exponent vector {list(exps)} has length "
                        f"{len(exps)}, expected {self.n + 1}"
                    )
        if not self.weyl_norm > 0:
            raise InvalidSystemError("the zero system is not a valid input")
        object.__setattr__(self, "_arrays", [_term_arrays(p, self.n + 1) for p in self.polys])

    @classmethod
    def from_terms(cls, n, polys):
        """Build from ``[(degree, {exponents: coeff}), ...]``."""
        return cls(n, tuple(
            HomogeneousPolynomial(d, {tuple(int(a) for a in e): float(c) for e, c in t.items()})
            for d, t in polys
        ))

    @property
    def m(self) -> int:
        return len(self.polys)

    @property
    def degrees(self) -> tuple:
        return tuple(p.degree for p in self.polys)

    @property
    def D(self) -> int:
        return max(self.degrees)

    @property
    def N(self) -> int:
        return sum(math.comb(self.n + d, self.n) for d in self.degrees)

    @cached_property
    def weyl_norm(self) -> float:
        return math.sqrt(sum(p.weyl_norm_sq() for p in self.polys))

    def scaled(self, factor: float) -> "PolynomialSystem":
        return PolynomialSystem(self.n, tuple(
            HomogeneousPolynomial(p.degree, {e: factor * c for e, c in p.terms.items()})
            for p in self.polys
        ))

    def __call__(self, x):
        return evaluate(self, x)


def _term_arrays(poly, nvars):
    if poly.terms:
        exps = np.array(list(poly.terms), dtype=np.int64).reshape(-1, nvars)
        coeffs = np.array(list(poly.terms.values()), dtype=float)
    else:
        exps = np.zeros((0, nvars), dtype=np.int64)
        coeffs = np.zeros(0)
    # derivative w.r.t. x_j: a_j * x^(a - e_j)
    deriv = []
    for j in range(nvars):
        keep = exps[:, j] > 0
        dexps = exps[keep].copy()
        dexps[:, j] -= 1
        deriv.append((dexps, coeffs[keep] * exps[keep, j]))
    return exps, coeffs, deriv


def _check_points(system, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (system.n + 1,):
        raise ValueError(
            f"dimension mismatch: points have {x.shape[-1] if x.ndim else 0} "
            f"coordinates, system needs {system.n + 1}"
        )
    return x


def _monomial_sum(x, exps, coeffs):
    if len(coeffs) == 0:
        return np.zeros(x.shape[:-1])
    mons = np.prod(x[..., None, :] ** exps, axis=-1)
    return (mons * coeffs).sum(axis=-1)


def evaluate(system: PolynomialSystem, x) -> np.ndarray:
    """Values ``f(x)`` with shape ``(..., m)``."""
    x = _check_points(system, x)
    return np.stack([_monomial_sum(x, e, c) for e, c, _ in system._arrays], axis=-1)


def jacobian(system: PolynomialSystem, x) -> np.ndarray:
    """Derivative ``Df(x)`` with shape ``(..., m, n + 1)``."""
    x = _check_points(system, x)
    rows = []
    for _, _, deriv in system._arrays:
        rows.append(np.stack([_monomial_sum(x, e, c) for e, c in deriv], axis=-1))
    return np.stack(rows, axis=-2)


def delta_scaling(system: PolynomialSystem, x) -> np.ndarray:
    """Diagonal matrix with entries ``||x||^(d_i - 1) * sqrt(d_i)``."""
    x = _check_points(system, x)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("delta_scaling is undefined at the origin")
    d = np.array(system.degrees, dtype=float)
    return np.diag(norm ** (d - 1) * np.sqrt(d))


def weyl_norm(system: PolynomialSystem) -> float:
    return system.weyl_norm


def _poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, 0.0) + ca * cb
    return out


def pullback_orthogonal(system: PolynomialSystem, U, tol=1e-12) -> PolynomialSystem:
    """The system ``x -> f(U x)`` for an orthogonal matrix ``U``."""
    U = np.asarray(U, dtype=float)
    size = system.n + 1
    if U.shape != (size, size):
        raise ValueError(f"U must be {size}x{size}, got {U.shape}")
    if np.max(np.abs(U.T @ U - np.eye(size))) > tol:
        raise ValueError("U is not orthogonal")
    unit = [tuple(int(i == j) for i in range(size)) for j in range(size)]
    # (U x)_i as a linear form in x
    forms = [{unit[j]: float(U[i, j]) for j in range(size) if U[i, j] != 0.0} for i in range(size)]
    polys = []
    for p in system.polys:
        out = {}
        for exps, coeff in p.terms.items():
            term = {tuple([0] * size): coeff}
            for i, a in enumerate(exps):
                for _ in range(a):
                    term = _poly_mul(term, forms[i])
            for e, c in term.items():
                out[e] = out.get(e, 0.0) + c
        polys.append(HomogeneousPolynomial(p.degree, out))
    return PolynomialSystem(system.n, tuple(polys))


def sample_kostlan(n: int, m: int, degrees, seed=None, normalize=True) -> PolynomialSystem:
    """Random system from the Kostlan ensemble, scaled to unit Weyl norm.

    Coefficient ``f_{i,a}`` is Gaussian with variance ``multinomial(d_i; a)``;
    normalizing gives the uniform distribution on the Weyl unit sphere.
    """
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) != m:
        raise InvalidSystemError(f"expected {m} degrees, got {len(degrees)}")
    if not 1 <= m <= n:
        raise InvalidSystemError(f"need 1 <= m <= n, got m={m}, n={n}")
    if min(degrees) < 2:
        raise InvalidSystemError("all degrees must be at least 2")
    rng = np.random.default_rng(seed)
    polys = []
    for d in degrees:
        exps = list(exponent_vectors(n + 1, d))
        std = np.sqrt([multinomial(e) for e in exps])
        coeffs = rng.standard_normal(len(exps)) * std
        polys.append((d, exps, coeffs))
    if normalize:
        norm = math.sqrt(sum(
            float(np.sum(c ** 2 / np.array([multinomial(e) for e in exps])))
            for _, exps, c in polys
        ))
        polys = [(d, exps, c / norm) for d, exps, c in polys]
    return PolynomialSystem(n, tuple(
        HomogeneousPolynomial(d, {e: float(c) for e, c in zip(exps, cs)}) for d, exps, cs in polys
    ))


def system_to_dict(system: PolynomialSystem) -> dict:
    return {
        "n": system.n,
        "m": system.m,
        "polynomials": [
            {"degree": p.degree,
             "terms": [{"exponents": list(e), "coeff": c} for e, c in p.terms.items()]}
            for p in system.polys
        ],
    }


def system_from_dict(doc) -> PolynomialSystem:
    try:
        n = doc["n"]
        m = doc["m"]
        raw = doc["polynomials"]
        if not isinstance(n, int) or not isinstance(m, int) or not isinstance(raw, list):
            raise InvalidSystemError("fields n, m must be integers and polynomials a list")
        if len(raw) != m:
            raise InvalidSystemError(f"m={m} but {len(raw)} polynomials given")
        polys = []
        for p in raw:
            terms = {}
            for t in p["terms"]:
                e = tuple(t["exponents"])
                if not all(isinstance(a, int) and not isinstance(a, bool) for a in e):
                    raise InvalidSystemError(f"exponents must be integers: {list(e)}")
                if len(e) != n + 1:
                    raise InvalidSystemError(f"exponents {list(e)} must have length {n + 1}")
                if e in terms:
                    raise InvalidSystemError(f"duplicate term {list(e)}")
                coeff = t["coeff"]
                if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
                    raise InvalidSystemError(f"coefficient must be a number: {coeff!r}")
                terms[e] = float(coeff)
            polys.append(HomogeneousPolynomial(int(p["degree"]), terms))
    except (KeyError, TypeError) as exc:
        raise InvalidSystemError(f"malformed system document: {exc!r}") from exc
    return PolynomialSystem(n, tuple(polys))


def parse_system(text: str) -> PolynomialSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSystemError(f"malformed system document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidSystemError("system document must be a JSON object")
    return system_from_dict(doc)


def serialize_system(system: PolynomialSystem) -> str:
    return json.dumps(system_to_dict(system))


def load_system(path) -> PolynomialSystem:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidSystemError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_system(text)


__all__ = [
    "HomogeneousPolynomial", "PolynomialSystem", "multinomial", "exponent_vectors",
    "evaluate", "jacobian", "delta_scaling", "weyl_norm", "pullback_orthogonal",
    "sample_kostlan", "parse_system", "serialize_system", "system_to_dict",
    "system_from_dict", "load_system",
]
