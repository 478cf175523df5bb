"""Hausdorff distances between attractor approximations and solution graphs."""

from conjugate_ifs.stability import (
    deformation_experiment,
    discrete_approximation_experiment,
    uniform_vs_hausdorff_check,
)
from conjugate_ifs.zoo import gasket_ifs, lebesgue

print("gasket approximations:", discrete_approximation_experiment(gasket_ifs(), range(1, 7)))
print("deformed graphs:", deformation_experiment())
sup, haus = uniform_vs_hausdorff_check(lebesgue(1 / 3), lebesgue(2 / 3), 10)
print(f"a=1/3 vs a=2/3: sup gap {sup:.4f}, Hausdorff gap {haus:.4f}")
