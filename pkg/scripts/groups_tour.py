"""The groups G_a: prime expansion, divisibility, and the map from Q.

Run with ``python3 scripts/groups_tour.py``.
"""
from symtate.groups import (GaElement, IntSequence, divisible, iso_h, phi_Q, phi_inverse,
                            prime_expand)

succ = IntSequence.successor()
print("a = k+1 expands to", prime_expand(succ, 12).primes)

# x_1 is divisible by 7 once a_1 ... a_l contains a factor 7
for depth in (6, 7):
    print(f"x_1 divisible by 7 at depth {depth}:", divisible(GaElement(1, 1), 7, succ, depth))

for p, q in [(1, 2), (5, 6), (-7, 12)]:
    x = phi_Q(p, q)
    print(f"phi({p}/{q}) = {x.coeff} x_{x.level}, back to {phi_inverse(x)}")

a = prime_expand(succ, 500).sequence()
b = prime_expand(IntSequence.repeated(2), 500).sequence()
h = iso_h(a, b, K=10)
print("isomorphism between two prime-dense expansions:", h.report())
