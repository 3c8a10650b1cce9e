"""Exit criteria, one test per criterion; each prints a PASS/FAIL line."""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from acceptance_matrix import MATRIX
from conftest import ACCEPTANCE_LINES
from metastability import harness, rates, spaces
from metastability.gexpr import g_func
from metastability.rates import big_G, cantor_pair, cantor_unpair, const_func, eta_hilbert, psi, theta, u_from_eta

HILBERT_U = u_from_eta(eta_hilbert())


def record(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def run_suite(prop, trials, seed, index):
    passed, failed, failures = harness.run_property(prop.__name__, prop, trials, seed, index)
    return passed, failed, failures


def test_01_pairing_oracle():
    t0 = time.perf_counter()
    bad = 0
    for m, n in itertools.product(range(201), repeat=2):
        c = cantor_pair(m, n)
        s = max(m, n)
        if cantor_unpair(c) != (m, n) or not (m <= c and n <= c <= 2 * s * s + 2 * s):
            bad += 1
    dt = time.perf_counter() - t0
    record(1, "pairing round-trip and bounds, m,n <= 200", bad == 0 and dt < 1, f"{bad} failures, {dt:.2f}s")


def test_02_G_closed_form_for_constant_g():
    t0 = time.perf_counter()
    bad = []
    for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 10)):
        for c in range(51):
            got = big_G(eps, const_func(c)).exact_value
            if not got == oracles.big_G(eps, lambda n: c) == 2 * c * c + 2 * c:
                bad.append((eps, c, got))
    dt = time.perf_counter() - t0
    record(2, "G(eps, const c) = 2c^2+2c", not bad and dt < 1, f"{len(bad)} failures, {dt:.2f}s")


def test_03_hand_derived_values():
    p = psi(1, 1, const_func(1)).exact_value
    t = theta(HILBERT_U, 1, 2, const_func(0)).exact_value
    op = oracles.psi(1, 1, lambda n: 1)
    ot = oracles.theta(lambda e: min(e, 2) ** 2 / 8, 1, 2, lambda n: 0)
    record(3, "psi(1,1,const 1) = 2448 and theta(hilbert,1,2,const 0) = 0",
           p == op == 2448 and t == ot == 0, f"psi={p}, theta={t}")


@pytest.mark.parametrize("kind, prop", [("single", harness.prop_glb), ("double", harness.prop_glb2)])
def test_04_glb_principles(kind, prop):
    t0 = time.perf_counter()
    passed, failed, _ = run_suite(prop, 1000, 2024, 40 if kind == "single" else 41)
    dt = time.perf_counter() - t0
    record(4, f"greatest-lower-bound principle ({kind} sequence), 1000 instances",
           failed == 0 and dt < 60, f"{passed} passed, {failed} failed, {dt:.1f}s")


def test_05_boundary_bound():
    t0 = time.perf_counter()
    bad = 0
    for d in range(1, 7):
        for n in range(41):
            for Q in range(n + 1):
                count, bound = rates.boundary_count(n, Q, d)
                if count != (n + Q + 1) ** d - (n - Q + 1) ** d or count > bound:
                    bad += 1
                if d <= 2 and count != bound:
                    bad += 1
    dt = time.perf_counter() - t0
    record(5, "boundary count <= 2^d (n+1)^(d-1) Q, equality for d <= 2", bad == 0 and dt < 5,
           f"{bad} failures, {dt:.2f}s")


def test_06_claim1():
    t0 = time.perf_counter()
    passed, failed, _ = run_suite(harness.prop_claim1, 1000, 2024, 42)
    dt = time.perf_counter() - t0
    record(6, "||x_n - z_n|| <= 2^d Q/(n+1) + 1e-9, 1000 instances", failed == 0 and dt < 120,
           f"{passed} passed, {failed} failed, {dt:.1f}s")


def test_07_uniform_convexity_inequality():
    t0 = time.perf_counter()
    passed, failed, _ = run_suite(harness.prop_uprop_hilbert, 1000, 2024, 43)
    dt = time.perf_counter() - t0
    record(7, "||(x+y)/2|| <= ||y|| - u(eps) (Hilbert), 1000 instances", failed == 0 and dt < 30,
           f"{passed} passed, {failed} failed, {dt:.1f}s")


def test_08_separable_vs_direct():
    worst = 0.0
    for t in range(200):
        rng = np.random.default_rng([2024, 44, t])
        d, dim, n = int(rng.integers(1, 4)), int(rng.integers(1, 6)), int(rng.integers(0, 9))
        fam = spaces.build_family(spaces.NormedSpace(dim), "random", d, rng)
        x = spaces.make_vector(fam.space, "random", rng)
        direct = oracles.direct_average(fam.matrices, x, n)
        worst = max(worst, float(np.max(np.abs(spaces.ergodic_average(fam, x, n) - direct))),
                    float(np.max(np.abs(spaces.Trajectory(fam, x)[n] - direct))))
    record(8, "composed Cesaro averages equal the cube sum, 200 instances", worst <= 1e-10,
           f"max deviation {worst:.2e}")


def test_09_end_to_end_metastability():
    verdicts = []
    neg_witness = None
    for cfg in MATRIX:
        report = harness.cmd_metastable(cfg)
        verdicts.append(report.verdict)
        if (cfg.recipe, cfg.eps, cfg.g, cfg.u_override) == ("neg", Fraction(1, 2), "const 1", "const 2"):
            neg_witness = report.witness
    ok = len(MATRIX) >= 20 and all(v == "CONFIRMED" for v in verdicts) and neg_witness == 1
    record(9, f"metastable verdict CONFIRMED on {len(MATRIX)} configurations", ok,
           f"{verdicts.count('CONFIRMED')} confirmed, -identity witness {neg_witness}")


def test_10_log2_soundness():
    cases = [(lambda e: Fraction(2), 1, Fraction(1), "const 1", None),
             (HILBERT_U, 1, Fraction(2), "const 0", None)]
    for cfg in MATRIX:
        space = harness.parse_space(cfg.space, cfg.modulus)
        cases.append((harness.make_u(cfg, space), cfg.d, cfg.eps, cfg.g, cfg.norm_bound))
    bad = 0
    for u, d, eps, g, b in cases:
        if b is not None:
            eps = eps / b
        exact = theta(u, d, eps, g_func(g))
        upper = theta(u, d, eps, g_func(g), mode="log2")
        assert exact.is_exact and upper.mode == "log2-upper"
        if not exact.exact_value <= 2 ** int(upper.log2_upper):
            bad += 1
    record(10, f"2^log2_upper >= exact theta on {len(cases)} configurations", bad == 0, f"{bad} failures")
