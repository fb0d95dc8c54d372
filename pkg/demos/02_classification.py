"""The algebraic criterion deciding whether covering certificates can exist.

A graded group admits continuous homogeneous quasi-distances with the
Besicovitch Covering Property exactly when all layers of different degree
commute.  When they do, the group splits into powers of stratified pieces of
step at most 2; when they don't, a three-dimensional quotient witness maps a
generated subalgebra onto a power of a non-standard Heisenberg algebra.
All the linear algebra below is exact rational rank computation.
"""

from fractions import Fraction as F

import carnot_bcp as cb
from carnot_bcp.structure import (
    decompose_commuting,
    has_commuting_different_layers,
    heisenberg_quotient_witness,
    is_graded_isomorphism,
    is_stratification,
    stratification_from_layer,
    validate_morphism,
)

for g in (cb.heisenberg_group(2),
          cb.heisenberg_nonstandard_group(2),
          cb.step3_rank3_group(),
          cb.product_group(cb.heisenberg_group(1), cb.abelian_group([1, 2]))):
    v = has_commuting_different_layers(g.algebra)
    print(f"{g.name:45s} commuting layers: {v.commuting_different_layers}")
    if v.witness:
        t, s, i, j = v.witness
        print(f"{'':45s} witness: [X_{i+1}, X_{j+1}] != 0 across degrees {t}, {s}")

# Positive case: the splitting into powers of step <= 2 stratified factors,
# verified by an explicit isomorphism.
g = cb.product_group(cb.power_group(cb.heisenberg_group(1), 2),
                     cb.abelian_group([1]))
factors, iso = decompose_commuting(g.algebra)
print("\nsplitting of", g.name)
for t, f in factors:
    print(f"  power t={t}: dim {f.dim}, stratified: {is_stratification(f)[0]}")
print("reassembly is a graded isomorphism:", is_graded_isomorphism(iso))

# Negative case: the quotient witness.
basis, m, (t, s) = heisenberg_quotient_witness(cb.step3_rank3_group().algebra)
print("\nstep-3 group witness: generated subalgebra of dim", m.source.dim,
      "onto weights", tuple(map(str, m.target.weights)))
print("morphism valid:", validate_morphism(m).ok, "| surjective:", m.is_surjective())

# A subspace complementary to the derived algebra need not generate a
# stratification: the slanted candidate below fails at depth 3.
g3 = cb.step3_rank3_group()
slanted = [(1, 0, 0, 0, 0, 0, 0, 0, 0, 0),
           (0, 1, 0, 1, 0, 0, 0, 0, 0, 0),
           (0, 0, 1, 0, 0, 0, 0, 0, 0, 0)]
ok, why = stratification_from_layer(g3.algebra, slanted)
print("\nslanted first-layer candidate stratifies:", ok, "|", why)
