# Greatest-lower-bound principles, checked by exhaustive witness search.
#
# For a sequence in [0, 1] there is an index N below an explicit bound such
# that a_N is within eps of every a_s with s <= g(N).  The double-sequence
# version flattens a_{m,n} along the Cantor pairing.

from fractions import Fraction

from metastability import rates
from metastability.gexpr import g_func

print("pairing:", [(s, rates.cantor_unpair(s)) for s in range(7)])

# A slowly decreasing sequence makes the witness non-trivial.
a = lambda n: max(Fraction(0), 1 - Fraction(n, 5))  # noqa: E731
g = g_func("affine 1 3")
for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
    N = rates.glb_witness(a, eps, g)
    print(f"eps={eps}: least witness N={N}, guaranteed bound {rates.glb_bound(eps, g)}")

# Double sequence: a_{m,n} = 1/(m+n+1) with a tolerance of 1/4.
b = lambda m, n: Fraction(1, m + n + 1)  # noqa: E731
for gtext in ("const 0", "const 2", "id"):
    N, p, q = rates.glb2_witness(b, Fraction(1, 4), g_func(gtext))
    G = rates.big_G(Fraction(1, 4), g_func(gtext)).exact_value
    print(f"g={gtext!r}: witness N={N} -> (p, q)=({p}, {q}); bound G has {len(str(G))} digits")
