# Exact bound calculus: how the rate of metastability is assembled.
#
# Every quantity here is an exact Python integer or Fraction.  The rate grows
# doubly exponentially in ceil(1/eps), which is why log2 mode exists.

from fractions import Fraction

from metastability import rates
from metastability.gexpr import g_func

# The counterexample function g fixes the length of the window [N, N + g(N)].
g = g_func("const 1")

# G iterates the majorant of f o g, with f(s) = 2s^2 + 2s, ceil(1/eps) times from 0.
print("G(1/2, const 1) =", rates.big_G(Fraction(1, 2), g).exact_value)

# Phi trades the size Q of a convex combination for the index where averages
# are within delta of it.
print("Phi(1, 1/2, 3) =", rates.phi(1, Fraction(1, 2), 3))

# Psi combines both; with gamma = 1 and d = 1 the value is small enough to print.
print("Psi(1, 1, const 1) =", rates.psi(1, 1, g).exact_value)

# For a Hilbert space u(eps) = eps^2/8.  eps = 2 and eps = 3/2 are still exact...
u = rates.u_from_eta(rates.eta_hilbert())
for eps in (Fraction(2), Fraction(3, 2)):
    value = rates.theta(u, 1, eps, g).exact_value
    print(f"Theta(eps={eps}) has {len(rates.int_to_decimal(value))} decimal digits")

# ...but eps = 1 already overflows a million digits.  log2 mode still gives a bound.
try:
    rates.theta(u, 1, 1, g)
except rates.DigitBudgetError as exc:
    print("exact mode:", exc)
bound = rates.theta(u, 1, 1, g, mode="log2")
print("log2 mode: Theta(eps=1) <= 2 **", bound.log2_upper)

# Smaller eps only moves the exponent: the log2 bound itself grows like 2^ceil(1/eps).
for eps in (Fraction(1, 2), Fraction(1, 4)):
    L = rates.theta(u, 1, eps, g, mode="log2").log2_upper
    print(f"log2 Theta(eps={eps}) <= a number with {L.numerator.bit_length()} bits")

# With g = const 0 the window is a single index and the rate collapses to 0.
print("Theta(eps=1/100, const 0) =", rates.theta(u, 3, Fraction(1, 100), g_func("const 0")).exact_value)
