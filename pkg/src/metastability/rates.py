"""Exact bound calculus for rates of metastability.

All bound values are Python integers (arbitrary precision) and all
tolerances are :class:`fractions.Fraction`.  The functionals grow doubly
exponentially in ``ceil(1/eps)``, so every iteration is guarded by a digit
budget; past it a computation either aborts with :class:`DigitBudgetError`
or, when the caller opts in, continues on integer upper bounds of log2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

DEFAULT_DIGIT_BUDGET = 10**6
# below this many bits log2-mode iterates are still tracked exactly
LOG2_EXACT_BITS = 64
DEFAULT_SCAN_LIMIT = 10**6


class MetastabilityError(Exception):
    """Base class for errors raised by this package."""


class BudgetExceeded(MetastabilityError):
    """A configured computation budget was exhausted."""


class DigitBudgetError(BudgetExceeded):
    """An exact big-integer value outgrew the digit budget.

    ``log2_partial`` is the bit length of the value that overflowed, a lower
    estimate of log2 of the quantity that was being computed.
    """

    def __init__(self, message: str, log2_partial: Optional[int] = None):
        super().__init__(message)
        self.log2_partial = log2_partial


class InvariantViolation(MetastabilityError):
    """A guaranteed bound or inequality failed; indicates a bug."""


class ModulusError(ValueError):
    """A modulus of uniform convexity returned a value outside (0, 1]."""


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(x, float):
        raise TypeError("floats are not accepted in the exact bound calculus")
    return Fraction(x)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def clog2(n: int) -> int:
    """Least L >= 0 with n <= 2**L (n >= 0)."""
    if n <= 1:
        return 0
    return (n - 1).bit_length()


def digits_to_bits(digits: int) -> int:
    return math.ceil(digits * math.log2(10))


# ---------------------------------------------------------------------------
# bound values


@dataclass(frozen=True)
class BoundValue:
    """Either an exact natural number or an upper bound on its log2.

    In ``"log2-upper"`` mode the represented quantity V satisfies
    ``V <= 2**log2_upper``.
    """

    mode: str
    exact_value: Optional[int] = None
    log2_upper: Optional[Fraction] = None

    def __post_init__(self):
        if self.mode == "exact":
            if self.exact_value is None or self.log2_upper is not None:
                raise ValueError("exact BoundValue needs exact_value only")
            if self.exact_value < 0:
                raise ValueError("bound values are natural numbers")
        elif self.mode == "log2-upper":
            if self.log2_upper is None or self.exact_value is not None:
                raise ValueError("log2-upper BoundValue needs log2_upper only")
            if self.log2_upper < 0:
                raise ValueError("log2_upper must be non-negative")
        else:
            raise ValueError(f"unknown BoundValue mode {self.mode!r}")

    @classmethod
    def exact(cls, value: int) -> BoundValue:
        return cls("exact", exact_value=int(value))

    @classmethod
    def log2(cls, upper) -> BoundValue:
        return cls("log2-upper", log2_upper=Fraction(upper))

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    def upper_log2(self) -> Fraction:
        """An upper bound on log2 of the value, valid in both modes."""
        if self.is_exact:
            return Fraction(clog2(self.exact_value))
        return self.log2_upper

    def admits(self, n: int) -> bool:
        """Whether ``n <= value`` is guaranteed (exact) or possible (log2)."""
        if self.is_exact:
            return n <= self.exact_value
        return clog2(n) <= self.log2_upper

    def to_dict(self) -> dict:
        if self.is_exact:
            return {"mode": self.mode, "exact_value": int_to_decimal(self.exact_value)}
        return {"mode": self.mode, "log2_upper": str(self.log2_upper)}

    @classmethod
    def from_dict(cls, data: dict) -> BoundValue:
        if data["mode"] == "exact":
            return cls.exact(int_from_decimal(data["exact_value"]))
        return cls.log2(Fraction(data["log2_upper"]))


def _lift_str_limit():
    import sys

    if hasattr(sys, "set_int_max_str_digits"):
        old = sys.get_int_max_str_digits()
        sys.set_int_max_str_digits(0)
        return lambda: sys.set_int_max_str_digits(old)
    return lambda: None


def int_to_decimal(n: int) -> str:
    restore = _lift_str_limit()
    try:
        return str(n)
    finally:
        restore()


def int_from_decimal(s: str) -> int:
    restore = _lift_str_limit()
    try:
        return int(s)
    finally:
        restore()


# ---------------------------------------------------------------------------
# functions N -> N


class FuncNN:
    """A total function on the naturals with memoized evaluation.

    ``monotone`` declares the function nondecreasing, which lets the
    majorant be read off a single evaluation.  ``log2_bound`` (optional)
    maps an integer L to an integer L' such that ``f(n) <= 2**L'`` for every
    ``n <= 2**L``; it is what makes log2-mode bounds possible.
    """

    def __init__(
        self,
        evaluator: Callable[[int], int],
        monotone: bool = False,
        log2_bound: Optional[Callable[[int], int]] = None,
        name: str = "",
    ):
        self._evaluator = evaluator
        self.declared_monotone = monotone
        self.log2_bound = log2_bound
        self.name = name or getattr(evaluator, "__name__", "f")
        self._cache: dict[int, int] = {}
        self._running_max: list[int] = []

    def __call__(self, n: int) -> int:
        try:
            return self._cache[n]
        except KeyError:
            pass
        value = self._evaluator(n)
        if not isinstance(value, int) or value < 0:
            raise ValueError(f"{self.name}({n}) = {value!r} is not a natural number")
        self._cache[n] = value
        return value

    def __repr__(self):
        return f"FuncNN({self.name})"

    def majorant(self, n: int, scan_limit: int = DEFAULT_SCAN_LIMIT) -> int:
        """``max(f(i) for i <= n)``, using a running max for non-monotone f."""
        if self.declared_monotone:
            return self(n)
        if n >= len(self._running_max) and n > scan_limit:
            raise BudgetExceeded(
                f"majorant of non-monotone {self.name} needs a scan up to {n} "
                f"(scan limit {scan_limit})"
            )
        rm = self._running_max
        while len(rm) <= n:
            i = len(rm)
            rm.append(max(rm[-1], self(i)) if rm else self(0))
        return rm[n]


def const_func(k: int) -> FuncNN:
    return FuncNN(lambda n: k, monotone=True, log2_bound=lambda L: clog2(k), name=f"const {k}")


def identity_func() -> FuncNN:
    return FuncNN(lambda n: n, monotone=True, log2_bound=lambda L: L, name="id")


def affine_func(a: int, b: int) -> FuncNN:
    # a*n + b <= (a + b) * max(n, 1)
    c = clog2(a + b)
    return FuncNN(
        lambda n: a * n + b, monotone=True, log2_bound=lambda L: c + L, name=f"affine {a} {b}"
    )


def compose(outer: FuncNN, inner: FuncNN) -> FuncNN:
    """``n -> outer(inner(n))``."""
    if outer.log2_bound is not None and inner.log2_bound is not None:
        lo, li = outer.log2_bound, inner.log2_bound
        bound = lambda L: lo(li(L))  # noqa: E731
    else:
        bound = None
    return FuncNN(
        lambda n: outer(inner(n)),
        monotone=outer.declared_monotone and inner.declared_monotone,
        log2_bound=bound,
        name=f"({outer.name} o {inner.name})",
    )


def monotone_majorant(g: FuncNN, n: int, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    value = g.majorant(n)
    if value.bit_length() > digits_to_bits(digit_budget):
        raise DigitBudgetError(
            f"majorant of {g.name} at {n} exceeds {digit_budget} digits",
            log2_partial=value.bit_length(),
        )
    return value


def tilde(g: FuncNN) -> FuncNN:
    """``n -> n + g(n)``."""
    if g.log2_bound is not None:
        gl = g.log2_bound
        bound = lambda L: max(L, gl(L)) + 1  # noqa: E731
    else:
        bound = None
    return FuncNN(lambda n: n + g(n), monotone=g.declared_monotone, log2_bound=bound,
                  name=f"tilde {g.name}")


def iterate_compose(F, k: int, start: int, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    """``F`` applied ``k`` times to ``start``; stops early at a fixed point."""
    budget_bits = digits_to_bits(digit_budget)
    v = start
    for _ in range(k):
        w = F(v)
        if w.bit_length() > budget_bits:
            raise DigitBudgetError(
                f"iterate exceeds {digit_budget} digits", log2_partial=w.bit_length()
            )
        if w == v:
            break
        v = w
    return v


# ---------------------------------------------------------------------------
# Cantor pairing


def cantor_pair(m: int, n: int) -> int:
    if m < 0 or n < 0:
        raise ValueError("cantor_pair is defined on naturals")
    return (m + n) * (m + n + 1) // 2 + n


def cantor_unpair(s: int) -> tuple[int, int]:
    if s < 0:
        raise ValueError("cantor_unpair is defined on naturals")
    w = (math.isqrt(8 * s + 1) - 1) // 2
    n = s - w * (w + 1) // 2
    return w - n, n


def f_quad(s: int) -> int:
    return 2 * s * s + 2 * s


# 2s^2 + 2s <= 4s^2 for s >= 1
f_quad_func = FuncNN(f_quad, monotone=True, log2_bound=lambda L: 2 * L + 2, name="f")


# ---------------------------------------------------------------------------
# majorant iteration with budget control

_MODES = ("exact", "log2")


def _iterate_majorant(
    F: FuncNN,
    k: int,
    mode: str,
    digit_budget: int,
    log_fallback: bool,
    scan_limit: int = DEFAULT_SCAN_LIMIT,
) -> BoundValue:
    """``(F^M)^(k)(0)`` as a BoundValue."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    budget_bits = digits_to_bits(digit_budget)
    value = 0
    L = None
    for step in range(k):
        if L is None:
            if mode == "log2" and value.bit_length() > LOG2_EXACT_BITS:
                L = clog2(value)
            else:
                new = F.majorant(value, scan_limit)
                if new == value:
                    return BoundValue.exact(value) if mode == "exact" else BoundValue.log2(clog2(value))
                if new.bit_length() > budget_bits and mode == "exact" and not log_fallback:
                    raise DigitBudgetError(
                        f"exact bound exceeds {digit_budget} digits after {step + 1} of {k} "
                        "iterations; use log2 mode",
                        log2_partial=new.bit_length(),
                    )
                if new.bit_length() > budget_bits:
                    L = clog2(new)
                else:
                    value = new
                continue
        if F.log2_bound is None:
            raise BudgetExceeded(f"{F.name} has no log2 bound; cannot continue in log2 mode")
        L = F.log2_bound(L)
        if L.bit_length() > budget_bits:
            raise DigitBudgetError(
                f"even log2 of the bound exceeds {digit_budget} digits", log2_partial=None
            )
    if L is None:
        return BoundValue.exact(value) if mode == "exact" else BoundValue.log2(clog2(value))
    return BoundValue.log2(L)


def _ceil_inv(eps: Fraction) -> int:
    if eps <= 0:
        raise ValueError("eps must be positive")
    return ceil_div(eps.denominator, eps.numerator)


def big_G(
    eps,
    g: FuncNN,
    mode: str = "exact",
    digit_budget: int = DEFAULT_DIGIT_BUDGET,
    log_fallback: bool = False,
) -> BoundValue:
    """``((f o g)^M)^(ceil(1/eps))(0)`` with ``f(s) = 2s^2 + 2s``."""
    eps = as_fraction(eps)
    k = _ceil_inv(eps)
    return _iterate_majorant(compose(f_quad_func, g), k, mode, digit_budget, log_fallback)


def phi(d: int, delta, Q: int) -> int:
    """``max(Q, ceil(2^d Q / delta))``."""
    delta = as_fraction(delta)
    if d < 1:
        raise ValueError("d must be >= 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    return max(Q, ceil_div(2**d * Q * delta.denominator, delta.numerator))


def _phi_log2_offset(d: int, delta: Fraction) -> int:
    # phi(d, delta, Q) <= Q * max(1, ceil(2^d / delta)) since ceil(Q x) <= Q ceil(x)
    return clog2(max(1, ceil_div(2**d * delta.denominator, delta.numerator)))


def phi_bound(d: int, delta, Q: BoundValue) -> BoundValue:
    """phi lifted to BoundValue arguments."""
    delta = as_fraction(delta)
    if Q.is_exact:
        return BoundValue.exact(phi(d, delta, Q.exact_value))
    return BoundValue.log2(Q.log2_upper + _phi_log2_offset(d, delta))


def h_gamma(gamma, g: FuncNN, d: int) -> FuncNN:
    """``n -> tilde(g)(phi(d, gamma/2, n))``."""
    gamma = as_fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    off = _phi_log2_offset(d, gamma / 2)
    phi_fn = FuncNN(lambda n: phi(d, gamma / 2, n), monotone=True,
                    log2_bound=lambda L: L + off, name=f"phi({d},{gamma / 2},.)")
    return compose(tilde(g), phi_fn)


def psi(
    d: int,
    gamma,
    g: FuncNN,
    mode: str = "exact",
    digit_budget: int = DEFAULT_DIGIT_BUDGET,
    log_fallback: bool = False,
) -> BoundValue:
    gamma = as_fraction(gamma)
    G = big_G(gamma / 2, h_gamma(gamma, g, d), mode, digit_budget, log_fallback)
    return phi_bound(d, gamma / 2, G)


def theta(
    u: Callable[[Fraction], Fraction],
    d: int,
    eps,
    g: FuncNN,
    mode: str = "exact",
    digit_budget: int = DEFAULT_DIGIT_BUDGET,
    log_fallback: bool = False,
) -> BoundValue:
    """Rate of metastability for d commuting contractions, ``psi(d, u(eps)/2, g)``."""
    eps = as_fraction(eps)
    ue = as_fraction(u(eps))
    if ue <= 0:
        raise ValueError(f"u({eps}) = {ue} must be positive")
    return psi(d, ue / 2, g, mode, digit_budget, log_fallback)


def theta_scaled(u, d: int, b, eps, g: FuncNN, **kwargs) -> BoundValue:
    """Rate for starting points of norm at most ``b``."""
    b = as_fraction(b)
    if b <= 0:
        raise ValueError("b must be positive")
    return theta(u, d, as_fraction(eps) / b, g, **kwargs)


# ---------------------------------------------------------------------------
# witness searches


def glb_bound(eps, g: FuncNN, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    """``(g^M)^(ceil(1/eps))(0)``, the bound on the single-sequence witness."""
    k = _ceil_inv(as_fraction(eps))
    return _iterate_majorant(g, k, "exact", digit_budget, False).exact_value


def _least_witness(b, eps: Fraction, window: Callable[[int], int], bound: int) -> int:
    """Least N <= bound with ``b(N) <= b(s) + eps`` for all ``s <= window(N)``."""
    prefix_min: list = []

    def min_upto(t):
        while len(prefix_min) <= t:
            v = b(len(prefix_min))
            prefix_min.append(v if not prefix_min else min(prefix_min[-1], v))
        return prefix_min[t]

    N = 0
    while N <= bound:
        if b(N) <= min_upto(window(N)) + eps:
            return N
        N += 1
    raise InvariantViolation(f"no witness N <= {bound}; the greatest-lower-bound bound failed")


def _memo(a):
    cache = {}

    def b(s):
        try:
            return cache[s]
        except KeyError:
            v = cache[s] = a(s)
            return v

    return b


def glb_witness(a: Callable[[int], Fraction], eps, g: FuncNN,
                digit_budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Least N with ``a_N <= a_s + eps`` for all ``s <= g(N)``.

    Raises InvariantViolation if no such N lies below ``(g^M)^(ceil(1/eps))(0)``.
    """
    eps = as_fraction(eps)
    bound = glb_bound(eps, g, digit_budget)
    return _least_witness(_memo(a), eps, g, bound)


def glb2_witness(a: Callable[[int, int], Fraction], eps, g: FuncNN,
                 digit_budget: int = DEFAULT_DIGIT_BUDGET) -> tuple[int, int, int]:
    """Witness ``(N, p, q)`` for the double-sequence principle.

    The search runs on the flattened sequence ``b_s = a(cantor_unpair(s))``
    with window ``f(g(N))``; ``(p, q) = cantor_unpair(N)``.  The returned
    witness is then checked directly against every ``i, j <= g(N)``.
    """
    eps = as_fraction(eps)
    G = big_G(eps, g, "exact", digit_budget).exact_value
    b = _memo(lambda s: a(*cantor_unpair(s)))
    fg = compose(f_quad_func, g)
    N = _least_witness(b, eps, fg, G)
    p, q = cantor_unpair(N)
    apq = a(p, q)
    top = g(N)
    for i in range(top + 1):
        for j in range(top + 1):
            if apq > a(i, j) + eps:
                raise InvariantViolation(
                    f"witness ({N}, {p}, {q}) fails at ({i}, {j}): {apq} > {a(i, j)} + {eps}"
                )
    return N, p, q


def boundary_count(n: int, Q: int, d: int) -> tuple[int, int]:
    """Size of ``[0, n+Q]^d minus [Q, n]^d`` and its bound ``2^d (n+1)^(d-1) Q``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 <= Q <= n:
        raise ValueError(f"need 0 <= Q <= n, got Q={Q}, n={n}")
    m = n + 1
    count = (m + Q) ** d - (m - Q) ** d
    bound = 2**d * m ** (d - 1) * Q
    if count > bound:
        raise InvariantViolation(f"boundary count {count} exceeds {bound} (n={n}, Q={Q}, d={d})")
    return count, bound


# ---------------------------------------------------------------------------
# moduli of uniform convexity


@dataclass(frozen=True)
class Modulus:
    """A modulus of uniform convexity eta with values in (0, 1].

    ``evaluator`` receives ``min(eps, 2)``: distances in the unit ball never
    exceed 2.  ``has_nondecreasing_factorization`` asserts
    ``eta(eps) = eps * eta'(eps)`` with eta' nondecreasing, in which case
    eta itself serves as ``u``.
    """

    kind: str
    evaluator: Callable[[Fraction], Fraction] = field(compare=False)
    has_nondecreasing_factorization: bool = False
    description: str = ""

    def __call__(self, eps) -> Fraction:
        eps = as_fraction(eps)
        if eps <= 0:
            raise ValueError("the modulus is defined for eps > 0")
        value = as_fraction(self.evaluator(min(eps, Fraction(2))))
        if not 0 < value <= 1:
            raise ModulusError(f"eta({eps}) = {value} lies outside (0, 1]")
        return value


def eta_hilbert() -> Modulus:
    return Modulus("hilbert", lambda e: e * e / 8, True, "eps^2/8")


def power_modulus(coefficient, exponent: int, factorized: bool, kind: str = "user-supplied") -> Modulus:
    """``eta(eps) = coefficient * min(eps, 2)**exponent``."""
    c = as_fraction(coefficient)
    if c <= 0 or exponent < 0:
        raise ModulusError("power modulus needs coefficient > 0 and exponent >= 0")
    return Modulus(kind, lambda e: c * e**exponent, factorized, f"{c}*eps^{exponent}")


def lp_modulus(p) -> Modulus:
    """A rational lower bound on the modulus of convexity of l_p.

    For ``1 < p < 2``: ``(p-1) eps^2 / 8`` (two-uniform convexity).
    For ``p >= 2``: ``(eps/2)^k / k`` with ``k = ceil(p)``, below Clarkson's
    ``1 - (1 - (eps/2)^p)^(1/p)``.
    """
    p = as_fraction(p)
    if p <= 1:
        raise ModulusError("l_p is uniformly convex only for p > 1")
    if p == 2:
        return eta_hilbert()
    if p < 2:
        return power_modulus((p - 1) / 8, 2, True, kind=f"lp:{p}")
    k = math.ceil(p)
    return power_modulus(Fraction(1, 2**k * k), k, True, kind=f"lp:{p}")


def u_from_eta(eta: Modulus) -> Callable[[Fraction], Fraction]:
    """The function u with ``||(x+y)/2|| <= ||y|| - u(eps)`` under the usual hypotheses."""
    if eta.has_nondecreasing_factorization:
        return eta

    def u(eps):
        eps = as_fraction(eps)
        return eps / 2 * eta(eps)

    return u


__all__ = [
    "BoundValue", "BudgetExceeded", "boundary_count", "DigitBudgetError", "FuncNN", "InvariantViolation",
    "MetastabilityError", "Modulus", "ModulusError", "affine_func", "big_G", "cantor_pair",
    "cantor_unpair", "clog2", "compose", "const_func", "eta_hilbert", "f_quad", "f_quad_func",
    "glb2_witness", "glb_bound", "glb_witness", "h_gamma", "identity_func", "iterate_compose",
    "lp_modulus", "monotone_majorant", "phi", "phi_bound", "power_modulus", "psi", "theta",
    "theta_scaled", "tilde", "u_from_eta",
]
