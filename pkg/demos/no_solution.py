"""Overlapping cells: validation finds a point with two forced values."""

from conjugate_ifs import IncompatibleSystem, evaluate, validate
from conjugate_ifs.zoo import lebesgue, moebius_parametric, overlap

for a, b in ((0.75, 0.5), (0.5, 0.75), (2 / 3, 0.75)):
    print(f"overlap({a:.4g}, {b:.4g})")
    print(validate(overlap(a, b)).summary(), end="\n\n")

try:
    evaluate(overlap(0.75, 0.5), 0.3)
except IncompatibleSystem as exc:
    print("evaluation refused:", str(exc).splitlines()[0])

print(validate(lebesgue(1 / 3)).status, "for the Lebesgue system")
print(validate(moebius_parametric(2.0)).status, "when a target map expands")
