"""Cech nerves and integral homology, from hand-made complexes to a zero set.

Run with ``python3 demos/nerve_homology.py``.
"""
import itertools
import os

import numpy as np

from realhom import NerveComplex, Profile, build_nerve, homology_from_complex, load_system
from realhom import min_enclosing_ball, run_covering
from realhom.cli import nerve_of

here = os.path.dirname(os.path.abspath(__file__))


def closure(facets, q_max):
    levels = [set() for _ in range(q_max + 1)]
    for f in facets:
        for q in range(min(len(f), q_max + 1)):
            levels[q].update(itertools.combinations(sorted(f), q + 1))
    return NerveComplex(len(levels[0]), [sorted(s) for s in levels])


# the 6-vertex projective plane: H_1 = Z/2
rp2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
       (1, 2, 4), (1, 3, 4), (1, 3, 5), (2, 3, 5), (2, 4, 5)]
h = homology_from_complex(closure(rp2, 3), q_top=2)
print("RP^2:", h.betti, "torsion", h.torsion)

# smallest enclosing ball of a triangle: obtuse, so the ball sits on the long edge
ball = min_enclosing_ball(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.3]]))
print("MEB centre", ball.center, "radius", ball.radius)

# eight points on a circle: isolated balls, then a ring with one 1-cycle,
# then everything overlaps and the cycle is filled
circle = np.array([[np.cos(t), np.sin(t)] for t in np.arange(8) * np.pi / 4])
for eps in (0.3, 0.5, 1.1):
    nerve = build_nerve(circle, eps, 2)
    print(f"circle eps={eps}: simplices {nerve.counts()} betti "
          f"{homology_from_complex(nerve, 1).betti}")

# full pipeline on the two circles, both on the sphere and in the projective plane
f = load_system(os.path.join(here, "systems", "two_circles.json"))
cov = run_covering(f, Profile.practical())
for mode in ("sphere", "projective"):
    nerve = nerve_of(cov.points, cov.epsilon, mode, f.n - f.m + 1, 10_000_000)
    h = homology_from_complex(nerve, f.n - f.m)
    print(f"two circles, {mode}: simplices {nerve.counts()} betti {h.betti} torsion {h.torsion}")
