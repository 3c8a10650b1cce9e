"""Finite-dimensional uniformly convex spaces and commuting contractions.

Vectors are plain 1-d float64 numpy arrays.  Operators are matrices acting on
``l_p^dim``; families of them are built commuting by construction, and the
contractivity/commutativity checks below are only a safety net.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from metastability.rates import (
    BudgetExceeded,
    FuncNN,
    InvariantViolation,
    MetastabilityError,
    Modulus,
    as_fraction,
    lp_modulus,
)

CONTRACTION_TOL = 1e-10
COMMUTATOR_TOL = 1e-10
CLAIM1_SLACK = 1e-9
UPROP_SLACK = 1e-12
WINDOW_SLACK = 1e-12
NORM_SLACK = 1e-12
MAX_AVERAGE_INDEX = 100_000
POWER_ITERATIONS = 200
CONTRACTION_SAMPLES = 10_000


class PreconditionError(ValueError):
    """Inputs violate a stated precondition."""


class ConstructionError(MetastabilityError, ValueError):
    """A recipe produced a non-contractive or non-commuting family."""


@dataclass(frozen=True)
class NormedSpace:
    """``R^dim`` with the l_p norm (p rational, p > 1)."""

    dim: int
    p: Fraction = Fraction(2)
    modulus: Optional[Modulus] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        p = as_fraction(self.p)
        if p <= 1:
            raise ValueError("need p > 1 for uniform convexity")
        object.__setattr__(self, "p", p)
        if self.modulus is None:
            object.__setattr__(self, "modulus", lp_modulus(p))

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if self.is_euclidean:
            return float(np.linalg.norm(v))
        return float(np.linalg.norm(v, ord=float(self.p)))

    def norms(self, rows) -> np.ndarray:
        return np.linalg.norm(np.atleast_2d(rows), ord=float(self.p), axis=1)

    def max_distance(self, rows) -> float:
        """Largest pairwise distance among the rows."""
        if len(rows) < 2:
            return 0.0
        if self.is_euclidean:
            return float(pdist(rows).max())
        return float(pdist(rows, "minkowski", p=float(self.p)).max())

    def describe(self) -> str:
        return f"l2:{self.dim}" if self.is_euclidean else f"lp:{self.p}:{self.dim}"


def check_vector(space: NormedSpace, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (space.dim,):
        raise PreconditionError(f"expected a vector of length {space.dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise PreconditionError("vector has non-finite entries")
    return x


@dataclass(frozen=True)
class LinearOperator:
    matrix: np.ndarray
    provenance: str = ""


def spectral_norm_estimate(M, iterations: int = POWER_ITERATIONS, tol: float = CONTRACTION_TOL,
                           seed: int = 0) -> float:
    """Largest singular value of M by power iteration on ``M^T M``."""
    M = np.asarray(M, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    MtM = M.T @ M
    for _ in range(iterations):
        w = MtM @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new_sigma = float(np.sqrt(nw))
        v = w / nw
        if abs(new_sigma - sigma) <= tol * max(1.0, new_sigma):
            sigma = new_sigma
            break
        sigma = new_sigma
    return max(sigma, float(np.linalg.norm(M @ v)))


def is_contraction(space: NormedSpace, M, seed: int = 0) -> bool:
    M = np.asarray(M, dtype=float)
    limit = 1 + CONTRACTION_TOL
    basis_ok = all(space.norm(M[:, i]) <= limit for i in range(space.dim))
    if not basis_ok:
        return False
    if space.is_euclidean:
        return spectral_norm_estimate(M, seed=seed) <= limit
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((CONTRACTION_SAMPLES, space.dim))
    V /= space.norms(V)[:, None]
    return bool(np.all(space.norms(V @ M.T) <= limit))


@dataclass(frozen=True)
class OperatorFamily:
    """d commuting linear contractions on a shared space.

    Construction validates both hypotheses and raises ConstructionError.
    """

    space: NormedSpace
    ops: tuple

    def __post_init__(self):
        ops = tuple(
            op if isinstance(op, LinearOperator) else LinearOperator(np.asarray(op, dtype=float))
            for op in self.ops
        )
        object.__setattr__(self, "ops", ops)
        if not ops:
            raise ConstructionError("a family needs at least one operator")
        n = self.space.dim
        for l, op in enumerate(ops):
            if op.matrix.shape != (n, n):
                raise ConstructionError(f"operator {l} has shape {op.matrix.shape}, expected {(n, n)}")
            if not is_contraction(self.space, op.matrix, seed=l):
                raise ConstructionError(f"operator {l} ({op.provenance}) is not a contraction")
        for a, b in itertools.combinations(range(len(ops)), 2):
            A, B = ops[a].matrix, ops[b].matrix
            if np.max(np.abs(A @ B - B @ A)) > COMMUTATOR_TOL:
                raise ConstructionError(f"operators {a} and {b} do not commute")

    @property
    def d(self) -> int:
        return len(self.ops)

    @property
    def matrices(self) -> list:
        return [op.matrix for op in self.ops]


@dataclass(frozen=True)
class ConvexWeights:
    """Weights ``c_j`` on the cube ``[0, Q]^d``, stored as a d-dim array."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim < 1 or len(set(w.shape)) != 1:
            raise PreconditionError("weights must be a cube array of shape (Q+1,)*d")
        if np.any(w < 0):
            raise PreconditionError("weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise PreconditionError(f"weights sum to {w.sum()!r}, not 1")

    @property
    def Q(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def d(self) -> int:
        return self.weights.ndim

    @classmethod
    def uniform(cls, Q: int, d: int) -> ConvexWeights:
        return cls(np.full((Q + 1,) * d, 1.0 / (Q + 1) ** d))

    @classmethod
    def point(cls, Q: int, d: int, index=None) -> ConvexWeights:
        w = np.zeros((Q + 1,) * d)
        w[tuple(index) if index is not None else (0,) * d] = 1.0
        return cls(w)

    @classmethod
    def random(cls, Q: int, d: int, rng: np.random.Generator) -> ConvexWeights:
        w = rng.dirichlet(np.full((Q + 1) ** d, 0.5)).reshape((Q + 1,) * d)
        return cls(w / w.sum())


# ---------------------------------------------------------------------------
# ergodic averages


def _cesaro(T: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    s = v.copy()
    acc = v.copy()
    for _ in range(n):
        s = T @ s
        acc += s
    return acc / (n + 1)


def ergodic_average(fam: OperatorFamily, x, n: int, cap: int = MAX_AVERAGE_INDEX) -> np.ndarray:
    """``x_n``, the average of ``T^k x`` over the cube ``[0, n]^d``.

    The T_l commute, so the cube average factors into one Cesaro average per
    operator.
    """
    if n < 0:
        raise PreconditionError("n must be a natural number")
    if n > cap:
        raise BudgetExceeded(f"average index {n} exceeds cap {cap}")
    v = check_vector(fam.space, x)
    for T in fam.matrices:
        v = _cesaro(T, v, n)
    return v


class Trajectory:
    """Lazily extended sequence ``x_0, x_1, ...`` of ergodic averages.

    Keeps the partial sums ``M_l(n) = sum_{k<=n} T_l^k`` so each new term
    costs O(d dim^3).
    """

    def __init__(self, fam: OperatorFamily, x, cap: int = MAX_AVERAGE_INDEX):
        self.fam = fam
        self.x = check_vector(fam.space, x)
        self.cap = cap
        dim = fam.space.dim
        self._powers = [np.eye(dim) for _ in fam.ops]
        self._sums = [np.eye(dim) for _ in fam.ops]
        self._rows = [self.x.copy()]

    def __len__(self):
        return len(self._rows)

    def extend_to(self, n: int) -> None:
        if n > self.cap:
            raise BudgetExceeded(f"average index {n} exceeds cap {self.cap}")
        d = self.fam.d
        while len(self._rows) <= n:
            m = len(self._rows)
            v = self.x
            for l, T in enumerate(self.fam.matrices):
                self._powers[l] = T @ self._powers[l]
                self._sums[l] = self._sums[l] + self._powers[l]
            for S in self._sums:
                v = S @ v
            self._rows.append(v / float(m + 1) ** d)

    def __getitem__(self, n: int) -> np.ndarray:
        self.extend_to(n)
        return self._rows[n]

    def rows(self, start: int, stop: int) -> np.ndarray:
        """Averages with indices in ``[start, stop]``."""
        self.extend_to(stop)
        return np.array(self._rows[start:stop + 1])


def convex_combination_z(fam: OperatorFamily, x, w: ConvexWeights) -> np.ndarray:
    """``z = sum_j c_j T^j x`` over ``j in [0, Q]^d``."""
    x = check_vector(fam.space, x)
    if w.d != fam.d:
        raise PreconditionError(f"weights are over {w.d} indices, family has d={fam.d}")
    Q = w.Q
    powers = []
    for T in fam.matrices:
        P = [np.eye(fam.space.dim)]
        for _ in range(Q):
            P.append(T @ P[-1])
        powers.append(P)
    z = np.zeros(fam.space.dim)
    for j in itertools.product(range(Q + 1), repeat=fam.d):
        c = w.weights[j]
        if c == 0.0:
            continue
        v = x
        for P, e in zip(powers, j):
            v = P[e] @ v
        z += c * v
    return z


def claim1_residual(fam: OperatorFamily, x, w: ConvexWeights, n: int) -> tuple[float, float]:
    """``(||x_n - z_n||, 2^d Q / (n+1))``; raises InvariantViolation if the first exceeds the second."""
    x = check_vector(fam.space, x)
    if fam.space.norm(x) > 1 + NORM_SLACK:
        raise PreconditionError("need ||x|| <= 1")
    if n < w.Q:
        raise PreconditionError(f"need n >= Q, got n={n}, Q={w.Q}")
    z = convex_combination_z(fam, x, w)
    residual = fam.space.norm(ergodic_average(fam, x, n) - ergodic_average(fam, z, n))
    bound = 2**fam.d * w.Q / (n + 1)
    if residual > bound + CLAIM1_SLACK:
        raise InvariantViolation(f"||x_n - z_n|| = {residual} > {bound}")
    return residual, bound


def uprop_check(space: NormedSpace, u: Callable, x, y, eps) -> bool:
    """Whether ``||(x+y)/2|| <= ||y|| - u(eps)`` (with 1e-12 slack)."""
    x = check_vector(space, x)
    y = check_vector(space, y)
    eps = as_fraction(eps)
    nx, ny = space.norm(x), space.norm(y)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if not nx <= ny <= 1 + NORM_SLACK:
        raise PreconditionError(f"need ||x|| <= ||y|| <= 1, got {nx}, {ny}")
    if space.norm(x - y) < float(eps):
        raise PreconditionError(f"need ||x - y|| >= eps = {eps}")
    return space.norm((x + y) / 2) <= ny - float(u(eps)) + UPROP_SLACK


def metastability_witness(fam: OperatorFamily, x, eps, g: FuncNN, n_cap: int,
                          trajectory: Optional[Trajectory] = None) -> Optional[int]:
    """Least ``N <= n_cap`` on whose window ``[N, N+g(N)]`` the averages vary by at most eps.

    Returns None when no such N exists up to n_cap.
    """
    traj = trajectory or Trajectory(fam, x)
    if fam.space.norm(traj.x) > 1 + NORM_SLACK:
        raise PreconditionError("need ||x|| <= 1")
    tol = float(as_fraction(eps)) + WINDOW_SLACK
    for N in range(n_cap + 1):
        rows = traj.rows(N, N + g(N))
        if fam.space.max_distance(rows) <= tol:
            return N
    return None


# ---------------------------------------------------------------------------
# family recipes


def _rotation(angle: float, r: float = 1.0) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return r * np.array([[c, -s], [s, c]])


def diagonal_family(space: NormedSpace, diagonals: Sequence[Sequence[float]]) -> OperatorFamily:
    ops = []
    for entries in diagonals:
        entries = np.asarray(entries, dtype=float)
        if entries.shape != (space.dim,) or np.any(np.abs(entries) > 1):
            raise ConstructionError("diagonal entries must be dim numbers in [-1, 1]")
        ops.append(LinearOperator(np.diag(entries), "diag"))
    return OperatorFamily(space, tuple(ops))


def rotation_family(space: NormedSpace, angles: Sequence[Sequence[float]],
                    radii: Optional[Sequence[Sequence[float]]] = None) -> OperatorFamily:
    """Block-diagonal scaled planar rotations; an odd leftover coordinate is scaled by the last radius.

    ``angles[l][b]`` is the angle of block b in operator l (a single angle per
    operator is broadcast over the blocks).
    """
    nblocks = space.dim // 2
    ops = []
    for l, ang in enumerate(angles):
        ang = np.broadcast_to(np.asarray(ang, dtype=float), (max(nblocks, 1),))
        rad = np.ones(max(nblocks, 1)) if radii is None else np.broadcast_to(
            np.asarray(radii[l], dtype=float), (max(nblocks, 1),))
        M = np.zeros((space.dim, space.dim))
        for b in range(nblocks):
            M[2 * b:2 * b + 2, 2 * b:2 * b + 2] = _rotation(ang[b], rad[b])
        if space.dim % 2:
            M[-1, -1] = rad[-1]
        ops.append(LinearOperator(M, "rotation"))
    return OperatorFamily(space, tuple(ops))


def _norm_upper(space: NormedSpace, A: np.ndarray) -> float:
    """An upper bound on the l_p operator norm of A."""
    if space.is_euclidean:
        return float(np.linalg.norm(A, 2))
    # Riesz-Thorin: ||A||_p <= ||A||_1^(1/p) ||A||_inf^(1-1/p)
    return float(max(np.linalg.norm(A, 1), np.linalg.norm(A, np.inf)))


def polynomial_family(space: NormedSpace, A: np.ndarray,
                      coefficients: Sequence[Sequence[float]]) -> OperatorFamily:
    """``T_l = sum_k c_{l,k} A^k`` after rescaling A to a contraction.

    Contractive when ``sum_k |c_{l,k}| <= 1``.
    """
    A = np.asarray(A, dtype=float)
    scale = _norm_upper(space, A)
    if scale > 1:
        A = A / (scale * (1 + 1e-12))
    ops = []
    for coeffs in coefficients:
        coeffs = np.asarray(coeffs, dtype=float)
        if np.abs(coeffs).sum() > 1 + 1e-12:
            raise ConstructionError("polynomial coefficients must have l1 norm <= 1")
        M = np.zeros_like(A)
        P = np.eye(space.dim)
        for c in coeffs:
            M += c * P
            P = P @ A
        ops.append(LinearOperator(M, "polynomial"))
    return OperatorFamily(space, tuple(ops))


def permutation_family(space: NormedSpace, shifts: Sequence[int], decays: Sequence[float]) -> OperatorFamily:
    """``T_l = r_l P^{s_l}`` with P the cyclic coordinate shift."""
    P = np.roll(np.eye(space.dim), 1, axis=0)
    ops = []
    for s, r in zip(shifts, decays):
        if not 0 <= r <= 1:
            raise ConstructionError("decay factors must lie in [0, 1]")
        ops.append(LinearOperator(r * np.linalg.matrix_power(P, int(s)), "permutation"))
    return OperatorFamily(space, tuple(ops))


RECIPES = ("identity", "neg", "diag", "rotation", "poly", "perm", "random")


def _parse_rows(text: str) -> list:
    return [[float(t) for t in row.split(",") if t.strip()] for row in text.split(";") if row.strip()]


def build_family(space: NormedSpace, recipe: str, d: Optional[int] = None,
                 rng: Optional[np.random.Generator] = None) -> OperatorFamily:
    """Build a commuting contraction family from a ``NAME[:ARGS]`` recipe.

    Recipes::

        identity            every T_l = I (needs d)
        neg                 every T_l = -I (needs d)
        diag:a,b,..;c,..    explicit diagonals, one row per operator
        diag:random         random diagonals in [-1, 1]
        rotation:90,45      planar rotations by the given angles in degrees
        rotation:random     random angles and radii per block
        poly:random         polynomials in one random contraction
        perm:1,2           shifts of the cyclic permutation (no decay)
        perm:random         random shifts and decays
        random              one of diag/rotation/poly/perm at random
    """
    name, _, args = recipe.partition(":")
    args = args.strip()
    rng = rng if rng is not None else np.random.default_rng(0)
    if name == "random":
        choices = ["diag", "poly", "perm"] + (["rotation"] if space.is_euclidean else [])
        name, args = choices[rng.integers(len(choices))], "random"
    if args == "random" and d is None:
        raise ConstructionError(f"recipe {recipe!r} needs d")
    fam = _build(space, name, args, d, rng)
    if d is not None and fam.d != d:
        raise ConstructionError(f"recipe {recipe!r} gives {fam.d} operators, expected d={d}")
    return fam


def _build(space, name, args, d, rng):
    dim = space.dim
    if name in ("identity", "neg"):
        if d is None:
            raise ConstructionError(f"recipe {name!r} needs d")
        sign = 1.0 if name == "identity" else -1.0
        return diagonal_family(space, [[sign] * dim] * d)
    if name == "diag":
        if args == "random":
            return diagonal_family(space, rng.uniform(-1, 1, size=(d, dim)))
        return diagonal_family(space, _parse_rows(args))
    if name == "rotation":
        if args == "random":
            nb = max(dim // 2, 1)
            return rotation_family(space, rng.uniform(0, 2 * np.pi, size=(d, nb)),
                                   rng.uniform(0.5, 1.0, size=(d, nb)))
        angles = [np.deg2rad(a) for a in _parse_rows(args.replace(";", ","))[0]]
        return rotation_family(space, [[a] for a in angles])
    if name == "poly":
        if args != "random":
            raise ConstructionError("poly recipe supports only 'poly:random'")
        A = rng.standard_normal((dim, dim))
        coeffs = rng.standard_normal((d, 4))
        coeffs /= np.abs(coeffs).sum(axis=1, keepdims=True)
        return polynomial_family(space, A, coeffs)
    if name == "perm":
        if args == "random":
            return permutation_family(space, rng.integers(0, dim, size=d), rng.uniform(0.5, 1.0, size=d))
        shifts = [int(s) for s in _parse_rows(args.replace(";", ","))[0]]
        return permutation_family(space, shifts, [1.0] * len(shifts))
    raise ConstructionError(f"unknown recipe {name!r}; expected one of {RECIPES}")


def make_vector(space: NormedSpace, desc: str, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Starting point from a descriptor: ``e<i>``, ``vec:a,b,..``, ``ones`` or ``random`` (unit norm)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    if desc.startswith("e") and desc[1:].isdigit():
        i = int(desc[1:])
        if i >= space.dim:
            raise PreconditionError(f"basis index {i} out of range for dim {space.dim}")
        v = np.zeros(space.dim)
        v[i] = 1.0
        return v
    if desc.startswith("vec:"):
        return check_vector(space, [float(t) for t in desc[4:].split(",")])
    if desc == "ones":
        v = np.ones(space.dim)
        return v / space.norm(v)
    if desc == "random":
        v = rng.standard_normal(space.dim)
        return v / space.norm(v)
    raise PreconditionError(f"unknown vector descriptor {desc!r}")


def random_unit_ball_pair(space: NormedSpace, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random ``(x, y)`` with ``||x|| <= ||y|| <= 1``."""
    a = rng.standard_normal(space.dim)
    b = rng.standard_normal(space.dim)
    a *= rng.uniform() ** 0.5 / space.norm(a)
    b *= rng.uniform() ** 0.5 / space.norm(b)
    if space.norm(a) <= space.norm(b):
        return a, b
    return b, a
