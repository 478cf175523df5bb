"""Image measures, transfer densities and regularity exponents."""

import math

from conjugate_ifs.measure import fan_lau_dimension, pushforward_check, transfer_density
from conjugate_ifs.regularity import holder_thresholds, local_exponent_probe
from conjugate_ifs.zoo import lebesgue, mobius_dimension_pair, question_mark

s = lebesgue(1 / 3)
print("KS statistic, matched weights:", round(pushforward_check(s, n=50_000), 4))
print("KS statistic, mismatched weights:", round(pushforward_check(s, n=50_000, p_nu=(0.3, 0.7)), 4))

for a in (0.5, 0.25, 1 / 3):
    print(f"dimension for a={a:.4g}: {fan_lau_dimension(lebesgue(a)):.6f}")

dens = transfer_density(mobius_dimension_pair().y_side)
print("smooth pair density at 1/2:", dens(0.5), "exact", 15 / 16)

h = holder_thresholds(s, (0.5, 0.5), 50_000)
print(f"alpha* = {h.alpha_star:.6f}, closed form {math.log(4.5) / (2 * math.log(2)):.6f}")
print("probe ratio at depth 30:", round(local_exponent_probe(s, seed=1, depth=30).final_ratio, 4))

tr = local_exponent_probe(question_mark(), word=[0] * 100, depth=100)
print("question mark along 0^n, ratios at n=1,10,100:", [round(float(tr.ratios[k]), 2) for k in (0, 9, 99)])
