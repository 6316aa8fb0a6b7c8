"""Condition numbers, alpha-theory bounds and Newton refinement on a circle pair.

The quadric x0^2 + x1^2 - 2 x2^2 cuts S^2 in the two circles x2 = +-1/sqrt(3).
Run with ``python3 demos/point_estimates.py``.
"""
import numpy as np

from realhom import kappa_at, load_system, mu_norm, point_estimates, refine_zero
from realhom.polysys import evaluate

f = load_system(__file__.replace("point_estimates.py", "systems/two_circles.json"))
print(f"n={f.n} m={f.m} D={f.D} N={f.N} Weyl norm={f.weyl_norm:.4f}")

# a point near the upper circle, and one far from both
near = np.array([0.8, 0.0, 0.6])
near /= np.linalg.norm(near)
far = np.array([0.0, 0.0, 1.0])

for name, x in [("near", near), ("far", far)]:
    est = point_estimates(f, x)
    print(f"{name:>4}: mu={mu_norm(f, x):.3f} kappa={kappa_at(f, x):.3f} "
          f"alpha={est.alpha_bar:.3g} beta={est.beta_bar:.3g} gamma={est.gamma_bar:.3g}")

# alpha_bar near is small enough for Newton to converge quadratically
z = refine_zero(f, near)
print("refined zero:", np.round(z, 6), "residual:", float(np.abs(evaluate(f, z)).max()))
# refinement leaves the sphere; the zero set is a cone, so normalizing keeps f = 0
print("on the sphere:", np.round(z / np.linalg.norm(z), 6))
print("expected |x2| = 1/sqrt(3):", round(1 / np.sqrt(3), 6))
