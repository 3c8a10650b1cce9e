"""Rates of metastability for multi-parameter ergodic averages.

``rates`` holds the exact bound calculus, ``spaces`` the finite-dimensional
simulation layer, and ``harness`` the experiment commands behind the CLI.
"""

from metastability.rates import (  # noqa: F401
    BoundValue,
    FuncNN,
    Modulus,
    big_G,
    cantor_pair,
    cantor_unpair,
    eta_hilbert,
    glb2_witness,
    glb_witness,
    phi,
    psi,
    theta,
    theta_scaled,
    u_from_eta,
)

__version__ = "0.1.0"
