# Multi-parameter ergodic averages on small l_p spaces.
#
# x_n averages T_1^{k_1} ... T_d^{k_d} x over the cube [0, n]^d.  Because the
# operators commute the cube average factors into one Cesaro average per operator.

from fractions import Fraction

import numpy as np

from metastability import rates, spaces

rng = np.random.default_rng(0)

# A quarter turn in the plane: the averages of (1, 0) vanish every fourth step.
fam = spaces.build_family(spaces.NormedSpace(2), "rotation:90")
traj = spaces.Trajectory(fam, [1.0, 0.0])
print("||x_n||, n = 0..8:", np.round(np.linalg.norm(traj.rows(0, 8), axis=1), 4))

# Three commuting contractions on l_3^4, built as shifts of one permutation.
space = spaces.NormedSpace(4, 3)
fam = spaces.build_family(space, "perm:random", 3, rng)
x = spaces.make_vector(space, "random", rng)
print("||x_n|| in l_3:", [round(space.norm(traj_row), 4) for traj_row in spaces.Trajectory(fam, x).rows(0, 6)])

# Replacing x by a convex combination z of its iterates barely moves x_n:
# the gap is at most 2^d Q / (n + 1).
fam = spaces.build_family(spaces.NormedSpace(4), "poly:random", 2, rng)
x = spaces.make_vector(fam.space, "random", rng)
w = spaces.ConvexWeights.random(3, 2, rng)
for n in (3, 10, 30, 100):
    residual, bound = spaces.claim1_residual(fam, x, w, n)
    print(f"n={n:3d}: ||x_n - z_n|| = {residual:.4f} <= {bound:.4f}")

# Uniform convexity: midpoints of far-apart points sit strictly inside the ball.
u = rates.u_from_eta(rates.eta_hilbert())
x, y = spaces.random_unit_ball_pair(spaces.NormedSpace(3), rng)
eps = Fraction(int(np.linalg.norm(x - y) * 1000), 1000)
print("midpoint inequality holds:", spaces.uprop_check(spaces.NormedSpace(3), u, x, y, eps))
