"""Gromov-Hausdorff distance between small metric spaces.

Exact values come from branch-and-bound over correspondences and are only
affordable for a handful of points; larger spaces get a bracket from the
diameter lower bound and a greedy correspondence.
"""

import numpy as np

from gromovkit import FiniteMetricSpace, gh_bounds, gh_exact, gh_upper_greedy
from gromovkit.constructions import path_space

triangle = FiniteMetricSpace.from_points([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]], ["a", "b", "c"])
segment = path_space(3, 0.5)
point = FiniteMetricSpace.point()

print("GH(point, triangle) =", gh_exact(point, triangle).value, "(half the diameter)")
res = gh_exact(triangle, segment)
print(f"GH(triangle, 3-point path) = {res.value:.6f}")
print("  optimal correspondence:", res.witness.to_list())

rng = np.random.default_rng(1)
A = FiniteMetricSpace.from_points(rng.random((5, 2)))
B = FiniteMetricSpace.from_points(rng.random((5, 2)))
print("bounds for two random 5-point clouds:", {k: v for k, v in gh_bounds(A, B).items() if k != "witness"})

big_a = FiniteMetricSpace.from_points(rng.random((60, 2)))
big_b = FiniteMetricSpace.from_points(rng.random((60, 2)) * 1.1)
up, _ = gh_upper_greedy(big_a, big_b)
print(f"60-point clouds: greedy upper bound {up:.4f}")
