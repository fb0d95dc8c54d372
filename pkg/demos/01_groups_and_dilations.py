"""Graded groups from structure constants: exact arithmetic and dilations.

Every group lives on R^n through exponential coordinates; the product is the
closed Baker-Campbell-Hausdorff series (exact through nilpotency step 3), so
every identity below holds with integer/rational equality, not tolerance.
"""

from fractions import Fraction as F

import carnot_bcp as cb

# The first Heisenberg group: basis (X, Y, Z), [X, Y] = Z, weights (1, 1, 2).
h1 = cb.heisenberg_group(1)
print("group:", h1.name, "| dim", h1.dim, "| step", h1.step, "| weights", h1.weights)

p = (F(1), F(0), F(0))
q = (F(0), F(1), F(0))
print("exp(X) * exp(Y) =", cb.multiply(p, q, h1), " (the 1/2 is the area term)")
print("p * p^-1       =", cb.multiply(p, cb.inverse(p, h1), h1))

# Dilations scale coordinate i by lambda^(weight_i).  The non-standard grading
# of the same group puts Y in degree alpha and Z in degree alpha + 1:
hn = cb.heisenberg_nonstandard_group(2)
print("\nnon-standard grading weights:", hn.weights)
print("delta_2(1,1,1) =", cb.dilate((F(1), F(1), F(1)), F(2), hn))

# Dilations are group automorphisms: delta(p*q) = delta(p)*delta(q), exactly.
a, b = (F(1, 2), F(-1, 3), F(2)), (F(3), F(1, 5), F(-1))
lhs = cb.dilate(cb.multiply(a, b, hn), F(3), hn)
rhs = cb.multiply(cb.dilate(a, F(3), hn), cb.dilate(b, F(3), hn), hn)
print("automorphism law holds exactly:", lhs == rhs)

# Free-nilpotent step 2: rank r, dimension r + r(r-1)/2.  Rank 2 is the
# Heisenberg algebra again, on the nose:
f22 = cb.free_step2_group(2)
print("\nfree step-2 rank 2 equals heisenberg(1):", f22.algebra == h1.algebra)
f42 = cb.free_step2_group(4)
print("free step-2 rank 4: dim", f42.dim, "weights", tuple(map(str, f42.weights)))

# Products merge layers weight by weight; powers rescale all the weights.
prod = cb.product_group(h1, cb.abelian_group([1]))
print("\nproduct weights (resorted adapted order):", prod.weights)
print("power(h1, 3) weights:", cb.power_group(h1, 3).weights)

# A step-3 group: rank 3 with the single relation [e2, e3] = 0 (dim 10).
g3 = cb.step3_rank3_group()
print("\nstep-3 fixture: dim", g3.dim, "step", g3.step)
r = (F(1), F(1, 2), F(-1), F(0), F(1), F(0), F(0), F(1, 3), F(0), F(-2))
s = (F(0), F(2), F(1), F(1), F(0), F(-1), F(0), F(0), F(1, 2), F(0))
t = (F(1), F(0), F(0), F(0), F(0), F(0), F(1), F(0), F(0), F(1))
assoc = cb.multiply(cb.multiply(r, s, g3), t, g3) == cb.multiply(r, cb.multiply(s, t, g3), g3)
print("step-3 associativity, exact rationals:", assoc)

# Groups serialize to a JSON format with rationals as "p/q" strings.
print("\nJSON form of the non-standard group:")
import json
print(json.dumps(cb.group_to_json(hn), indent=1, sort_keys=True))
