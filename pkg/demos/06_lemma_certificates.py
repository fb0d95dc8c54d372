"""Sweep certificates for the free step-2 covering bound.

The covering argument on the free step-2 group with the Euclidean-ball
quasi-distance runs through: (1) an exact quadratic form whose sign decides
ball membership around sphere points, (2) a parabolic three-region partition
with parameters a = 0.9 and a' = 1.9, and (3) three containment lemmas for
small-angle pairs inside each region.  The epsilon room in each lemma is
certified on a dyadic grid with outward-rounded rational square-root
enclosures; the sweeps then hammer the conclusions with hypothesis-constrained
random samples.
"""

from fractions import Fraction as F

import numpy as np

import carnot_bcp as cb
from carnot_bcp.certificates import (
    RegionParams,
    a_form,
    admissible_epsilon,
    calibrate_delta,
    lemma_sweep,
    rational_sphere_points,
    region_classify,
    sphere_packing_estimate,
)
from carnot_bcp.metrics import HSDistance

params = RegionParams(r=2, R=F(1))

# the membership form, exactly:
rng = np.random.default_rng(0)
p = rational_sphere_points(3, F(1), 1, rng)[0]
q = (F(1, 4), F(-1, 3), F(1, 8))
print("sphere point p:", tuple(map(str, p)))
print("a_form(p, q) =", a_form(p, q, params))
d = HSDistance(cb.free_step2_group(2), F(1))
print("ball membership sign agrees:", d.compare(p, q, F(1)),
      "(negative form <=> inside)")

# the parabolic partition
for pt in ((F(1), F(0), F(0)), (F(0), F(0), F(1)), (F(1), F(0), F(3, 2))):
    print("region of", tuple(map(str, pt)), "->", region_classify(pt, params))

# certified epsilon room per lemma, with the 10% safety margin
print()
for lemma in ("away", "near2a", "inbetween"):
    eps, eps_max = admissible_epsilon(lemma, params)
    print(f"lemma '{lemma}': certified epsilon up to {eps_max}, using {eps}")

eps, _ = admissible_epsilon("away", params)
delta = calibrate_delta(eps, 2, samples=50_000, seed=1)
print(f"calibrated angle threshold delta for epsilon={eps}: {delta:.6f}")

# the sweeps: zero violations expected at tolerance 1e-9
print()
for lemma in ("away", "near2a", "inbetween"):
    rep = lemma_sweep(lemma, params, sample_count=5000, seed=0)
    print(f"sweep '{lemma}': {rep.accepted} hypothesis-satisfying samples, "
          f"{len(rep.violations)} violations, max form value {rep.max_a_form:.3e}")

# the pigeonhole endgame needs a packing count: vectors pairwise separated by
# more than delta/2 in angle
n, note = sphere_packing_estimate(2, delta / 2, samples=4096, seed=0)
print(f"\npacking estimate in the plane at separation {delta/2:.4f}: {n} "
      f"vectors -> family bound 3N^2 = {note['bound_3N2']} ({note['note']})")
