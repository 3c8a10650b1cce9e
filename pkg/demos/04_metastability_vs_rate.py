# Empirical metastability witnesses against the extracted rate.
#
# The least N with ||x_i - x_j|| <= eps on [N, N + g(N)] is found by direct
# search; the rate guarantees it never exceeds Theta.

from fractions import Fraction

from metastability.harness import ExperimentConfig, cmd_metastable

configs = [
    ExperimentConfig(recipe="neg", eps=Fraction(1, 2), g="const 1", u_override="const 2"),
    ExperimentConfig(space="l2:4", recipe="rotation:random", d=2, x="random", eps=Fraction(3, 2),
                     g="affine 1 1", seed=3),
    ExperimentConfig(space="l2:2", recipe="rotation:45", x="e0", eps=Fraction(1, 10), g="const 5",
                     u_override="const 1", n_cap=500),
    # Hilbert modulus at eps = 1: Theta only has a log2 bound, so the verdict is CONSISTENT
    ExperimentConfig(recipe="neg", eps=1, g="const 1"),
]

for cfg in configs:
    r = cmd_metastable(cfg)
    theta = r.theta.get("exact_value")
    shown = theta if theta is not None and len(theta) < 12 else (
        f"<{len(theta)} digits>" if theta else f"2^{r.theta['log2_upper']}")
    print(f"{cfg.recipe:18s} eps={str(cfg.eps):5s} g={cfg.g!r:14s} witness={r.witness} "
          f"theta={shown} -> {r.verdict}")
