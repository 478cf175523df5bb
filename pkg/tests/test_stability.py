import math

import numpy as np
import pytest

from conjugate_ifs import BudgetExceeded, DomainError, EmptyCloud, attractor_points
from conjugate_ifs.stability import (
    deformation_experiment,
    deformation_family,
    discrete_approximation_experiment,
    experiment_csv,
    graph_cloud,
    hausdorff_distance,
    product_ifs,
    uniform_vs_hausdorff_check,
)
from conjugate_ifs.zoo import dyadic_ifs, gasket, gasket_ifs, lebesgue


def brute_hausdorff(a, b):
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_hausdorff_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a, b = rng.normal(size=(40, 2)), rng.normal(size=(25, 2))
        assert hausdorff_distance(a, b) == pytest.approx(brute_hausdorff(a, b), abs=1e-15)


def test_hausdorff_errors():
    with pytest.raises(EmptyCloud):
        hausdorff_distance(np.zeros((0, 1)), np.zeros((3, 1)))
    with pytest.raises(DomainError):
        hausdorff_distance(np.zeros((2, 1)), np.zeros((2, 2)))
    with pytest.raises(BudgetExceeded):
        hausdorff_distance(np.zeros((100, 1)), np.zeros((100, 1)), max_pairs=50)


def test_discrete_approximations_halve():
    for ifs in (dyadic_ifs(), gasket_ifs()):
        rows = discrete_approximation_experiment(ifs, [1, 2, 3, 4, 5])
        assert [d for _, d in rows] == pytest.approx([2.0**-k for k in range(1, 6)], abs=1e-12)


def test_graph_cloud_equals_product_attractor():
    for s in (lebesgue(1 / 3), gasket()):
        g = graph_cloud(s, 3)
        p = attractor_points(product_ifs(s), 4)
        assert len(g) == len(p)
        assert hausdorff_distance(g, p) < 1e-12


def test_deformation_rescales_back_to_limit():
    rows = deformation_experiment((4, 8), depth=6, placement="rescaled")
    assert all(d < 1e-12 for _, d in rows)


def test_deformation_inclusion_distance_closed_form():
    rows = deformation_experiment((2, 4, 8), depth=6)
    assert [d for _, d in rows] == pytest.approx([math.sqrt(2) / n for n in (2, 4, 8)], abs=1e-12)


def test_deformation_family_limits():
    assert deformation_family(math.inf).system.name == lebesgue(1 / 3).name
    with pytest.raises(DomainError):
        deformation_family(1)
    fam = deformation_family(2)
    with pytest.raises(DomainError):
        fam.rescale(np.zeros((1, 2)))


def test_uniform_gap_dominates_hausdorff():
    sup, haus = uniform_vs_hausdorff_check(lebesgue(1 / 3), lebesgue(0.34), 8)
    assert 0 < haus <= sup < 0.02
    sup, haus = uniform_vs_hausdorff_check(lebesgue(1 / 3), lebesgue(2 / 3), 10)
    # the graphs stay close in Hausdorff distance even though the functions
    # differ by more than 1/3 somewhere
    assert sup > 1 / 3 and 0.25 < haus < sup


def test_experiment_csv():
    assert experiment_csv([(2, 0.5)]) == "n,distance\n2,0.5\n"
