from fractions import Fraction

import numpy as np
import pytest

import oracles
from metastability import spaces
from metastability.gexpr import g_func
from metastability.rates import InvariantViolation, eta_hilbert, u_from_eta
from metastability.spaces import (
    ConstructionError,
    ConvexWeights,
    NormedSpace,
    OperatorFamily,
    PreconditionError,
    build_family,
    claim1_residual,
    convex_combination_z,
    ergodic_average,
    metastability_witness,
    uprop_check,
)

L2 = NormedSpace(2)
HILBERT_U = u_from_eta(eta_hilbert())


def test_identity_family_fixes_x():
    fam = build_family(NormedSpace(3), "identity", d=2)
    x = np.array([0.3, -0.2, 0.5])
    for n in (0, 1, 7):
        np.testing.assert_allclose(ergodic_average(fam, x, n), x)


def test_negation_averages_to_zero_at_odd_n():
    fam = build_family(L2, "neg", d=1)
    np.testing.assert_allclose(ergodic_average(fam, [1.0, 0.0], 1), 0.0)


def test_quarter_rotation_cancels():
    fam = build_family(L2, "rotation:90")
    np.testing.assert_allclose(ergodic_average(fam, [1.0, 0.0], 3), 0.0, atol=1e-15)


def test_average_budget():
    fam = build_family(L2, "identity", d=1)
    with pytest.raises(spaces.BudgetExceeded):
        ergodic_average(fam, [1.0, 0.0], 11, cap=10)


@pytest.mark.parametrize("recipe, d", [("diag:random", 3), ("rotation:random", 2), ("poly:random", 3),
                                       ("perm:random", 2)])
def test_separable_average_matches_direct_sum(recipe, d):
    rng = np.random.default_rng(11)
    fam = build_family(NormedSpace(4), recipe, d, rng)
    x = rng.standard_normal(4)
    for n in range(6):
        direct = oracles.direct_average(fam.matrices, x, n)
        np.testing.assert_allclose(ergodic_average(fam, x, n), direct, atol=1e-12)
        np.testing.assert_allclose(spaces.Trajectory(fam, x)[n], direct, atol=1e-12)


def test_convex_combination_examples():
    fam = build_family(L2, "neg", d=1)
    x = np.array([0.6, 0.8])
    np.testing.assert_allclose(convex_combination_z(fam, x, ConvexWeights.point(2, 1)), x)
    np.testing.assert_allclose(convex_combination_z(fam, x, ConvexWeights(np.array([0.5, 0.5]))), 0.0)
    fam2 = build_family(NormedSpace(3), "poly:random", 2, np.random.default_rng(3))
    x3 = np.array([0.1, 0.7, -0.4])
    np.testing.assert_allclose(convex_combination_z(fam2, x3, ConvexWeights.uniform(3, 2)),
                               ergodic_average(fam2, x3, 3), atol=1e-12)


def test_convex_weights_validation():
    with pytest.raises(PreconditionError):
        ConvexWeights(np.array([0.5, 0.6]))
    with pytest.raises(PreconditionError):
        ConvexWeights(np.array([1.5, -0.5]))


def test_claim1_trivial_cases():
    fam = build_family(NormedSpace(3), "identity", d=2)
    x = np.array([0.5, 0.5, 0.5])
    assert claim1_residual(fam, x, ConvexWeights.random(2, 2, np.random.default_rng(0)), 4)[0] == pytest.approx(0, abs=1e-15)
    fam = build_family(NormedSpace(3), "rotation:random", 2, np.random.default_rng(1))
    assert claim1_residual(fam, x, ConvexWeights.point(2, 2), 5)[0] == 0.0


def test_claim1_random_instance():
    rng = np.random.default_rng(5)
    fam = build_family(NormedSpace(4), "rotation:random", 2, rng)
    x = spaces.make_vector(fam.space, "random", rng)
    residual, bound = claim1_residual(fam, x, ConvexWeights.random(2, 2, rng), 10)
    assert bound == pytest.approx(2**2 * 2 / 11)
    assert residual <= bound


def test_claim1_preconditions():
    fam = build_family(L2, "identity", d=1)
    with pytest.raises(PreconditionError):
        claim1_residual(fam, [1.0, 0.0], ConvexWeights.uniform(3, 1), 2)
    with pytest.raises(PreconditionError):
        claim1_residual(fam, [2.0, 0.0], ConvexWeights.uniform(1, 1), 2)


def test_claim1_detects_violation_on_non_contraction():
    # bypass validation: an expanding operator breaks the inequality
    fam = object.__new__(OperatorFamily)
    object.__setattr__(fam, "space", L2)
    object.__setattr__(fam, "ops", (spaces.LinearOperator(3 * np.eye(2)),))
    with pytest.raises(InvariantViolation):
        claim1_residual(fam, np.array([1.0, 0.0]), ConvexWeights.point(1, 1, (1,)), 1)


def test_uprop_examples():
    y = np.array([1.0, 0.0])
    assert uprop_check(L2, HILBERT_U, -y, y, 2)
    with pytest.raises(PreconditionError):
        uprop_check(L2, HILBERT_U, y, y, Fraction(1, 10))
    with pytest.raises(PreconditionError):
        uprop_check(L2, HILBERT_U, y, 0.5 * y, Fraction(1, 10))


def test_uprop_sampled_pairs_at_distance_one():
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 200:
        x, y = spaces.random_unit_ball_pair(NormedSpace(5), rng)
        if np.linalg.norm(x - y) >= 1:
            assert uprop_check(NormedSpace(5), HILBERT_U, x, y, 1)
            checked += 1


@pytest.mark.parametrize("p", [Fraction(3, 2), Fraction(3), Fraction(5, 2)])
def test_uprop_lp_moduli(p):
    space = NormedSpace(4, p)
    u = u_from_eta(space.modulus)
    rng = np.random.default_rng(2)
    for _ in range(300):
        x, y = spaces.random_unit_ball_pair(space, rng)
        eps = Fraction(int(space.norm(x - y) * 10**6), 10**6)
        if eps > 0:
            assert uprop_check(space, u, x, y, eps)


def test_metastability_witness_examples():
    x = np.array([1.0, 0.0])
    assert metastability_witness(build_family(L2, "identity", d=2), x, Fraction(1, 100), g_func("affine 2 3"), 10) == 0
    neg = build_family(L2, "neg", d=1)
    assert metastability_witness(neg, x, Fraction(1, 2), g_func("const 1"), 10) == 1
    assert metastability_witness(neg, x, Fraction(1, 2), g_func("const 0"), 10) == 0
    assert metastability_witness(neg, x, Fraction(1, 100), g_func("const 1"), 5) is None


def test_metastability_witness_needs_unit_ball():
    with pytest.raises(PreconditionError):
        metastability_witness(build_family(L2, "neg", d=1), [2.0, 0.0], Fraction(1, 2), g_func("const 1"), 5)


def test_norm_boundedness():
    rng = np.random.default_rng(4)
    for recipe in ("diag:random", "rotation:random", "poly:random", "perm:random"):
        fam = build_family(NormedSpace(5), recipe, 3, rng)
        x = spaces.make_vector(fam.space, "random", rng)
        rows = spaces.Trajectory(fam, x).rows(0, 40)
        assert np.all(np.linalg.norm(rows, axis=1) <= 1 + 1e-12)


def test_build_family_examples():
    fam = build_family(NormedSpace(3), "diag:1,1,1")
    np.testing.assert_array_equal(fam.matrices[0], np.eye(3))
    fam = build_family(NormedSpace(3), "diag:1,0.5,-1;0.2,0.3,0.4")
    A, B = fam.matrices
    assert np.array_equal(A @ B, B @ A)
    fam = build_family(L2, "rotation:30,70")
    A, B = fam.matrices
    assert np.max(np.abs(A @ B - B @ A)) <= 1e-12


def test_build_family_rejects_bad_recipes():
    with pytest.raises(ConstructionError):
        build_family(L2, "diag:2,0")
    with pytest.raises(ConstructionError):
        build_family(NormedSpace(2, 4), "rotation:45")  # rotations expand l_4 norms
    with pytest.raises(ConstructionError):
        OperatorFamily(NormedSpace(2), (np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])))
    with pytest.raises(ConstructionError):
        build_family(L2, "bogus:1")
    with pytest.raises(ConstructionError):
        build_family(L2, "diag:random")


def test_spectral_norm_estimate():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((6, 6))
    assert spaces.spectral_norm_estimate(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-8)


def test_lp_contraction_check_by_sampling():
    space = NormedSpace(3, 3)
    assert spaces.is_contraction(space, np.roll(np.eye(3), 1, axis=0))
    assert not spaces.is_contraction(space, 1.01 * np.eye(3))
