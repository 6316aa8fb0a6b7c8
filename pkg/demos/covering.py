"""Adaptive grid covering of a zero set, certified and practical profiles.

Run with ``python3 demos/covering.py``.  The certified run on the four points
of x0^2 - x1^2 on S^1 refines the grid down to eta = 2^-20 (a few seconds).
"""
import os

import numpy as np

from realhom import Profile, load_system, run_covering
from realhom.grid import grid_size, initial_mesh_exponent

here = os.path.dirname(os.path.abspath(__file__))

for n in (1, 2, 3):
    k = initial_mesh_exponent(n)
    print(f"S^{n}: first mesh 2^-{k}, {grid_size(n, k)} grid points")

f = load_system(os.path.join(here, "systems", "four_points.json"))
cov = run_covering(f, Profile.certified())
print(f"\nfour points, certified: eta=2^{int(np.log2(cov.eta))} after {cov.passes} passes")
for s in cov.stats:
    print(f"  k={s.k:2d} scanned={s.scanned:8d} accepted={s.accepted:6d} "
          f"excluded={s.excluded:8d} refine={s.refine:4d} complete={s.complete}")
print(f"  {len(cov.points)} centres, r={cov.r:.3g}, eps={cov.epsilon:.3g}")

f = load_system(os.path.join(here, "systems", "two_circles.json"))
cov = run_covering(f, Profile.practical())
print(f"\ntwo circles, practical: eta=2^{int(np.log2(cov.eta))}, "
      f"{cov.accepted_before_thinning} accepted, {len(cov.points)} after thinning")
print("  closed under x -> -x:",
      {tuple(p + 0.0) for p in cov.points} == {tuple(-p + 0.0) for p in cov.points})
