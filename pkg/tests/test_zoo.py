import math

import pytest

from conjugate_ifs import DomainError, evaluate
from conjugate_ifs.zoo import (
    CATALOG,
    build,
    derivative_zero,
    derivative_zero_constraints,
    lebesgue,
    moebius_parameter,
    moebius_parametric,
    overlap,
    parse_reference,
)


def test_parse_reference_accepts_fractions():
    assert parse_reference("lebesgue:1/3") == ("lebesgue", (1 / 3,))
    assert parse_reference("question_mark") == ("question_mark", ())
    with pytest.raises(DomainError):
        parse_reference("lebesgue:x")


def test_build_by_reference_and_catalog_name():
    assert build("overlap:3/4,1/2").name == overlap(0.75, 0.5).name
    assert build("lebesgue_identity").name == lebesgue(0.5).name
    with pytest.raises(DomainError):
        build("nope")
    with pytest.raises(DomainError):
        build("lebesgue:0.1,0.2")


def test_catalog_references_rebuild():
    for e in CATALOG:
        assert build(e.reference).name == e.build().name


def test_builder_parameter_ranges():
    with pytest.raises(DomainError):
        lebesgue(1.0)
    with pytest.raises(DomainError):
        overlap(0.4, 0.5)
    with pytest.raises(DomainError):
        moebius_parametric(0.0)


def test_lebesgue_identity():
    s = lebesgue(0.5)
    for x in (0.1, 0.3, 0.77):
        y, err = evaluate(s, x)
        assert abs(y - x) <= err + 1e-15


def test_moebius_parametric_flags_and_contraction_boundary():
    assert moebius_parametric(1.0).flags == ()
    assert moebius_parametric(2.0).flags == ("g1:not_contractive",)
    # derivative of g_1 at 1 equals u^2 x_u and crosses 1 at u = sqrt(3)
    u = math.sqrt(3.0)
    assert u * u * moebius_parameter(u) == pytest.approx(1.0)


def test_moebius_parametric_fixed_points_are_corners():
    s = moebius_parametric(1.0)
    assert s.y_side.maps[0].fixed_point == 0.0
    assert s.y_side.maps[1].fixed_point == pytest.approx(1.0, abs=1e-15)


def test_derivative_zero_constraints_hold():
    c = derivative_zero_constraints()
    assert all(v for k, v in c.items() if k != "gap")
    assert c["gap"] == pytest.approx(0.015)


def test_derivative_zero_constraint_check_detects_violation():
    from conjugate_ifs.conjugate import ConjugateSystem
    from conjugate_ifs.ifs_core import IFSystem, affine, piecewise_linear
    from conjugate_ifs.zoo import ENDS, UNIT, dyadic_ifs

    # steep first piece breaks the slope and sandwich conditions
    g0 = piecewise_linear(((0, 0), (0.25, 0.2), (0.5, 0.25), (1, 0.755)))
    ys = IFSystem(UNIT, (g0, affine(0.245, 0.755)))
    bad = derivative_zero_constraints(ConjugateSystem(dyadic_ifs(), ys, "monotone_interval", ENDS))
    assert not bad["slope_near_zero"] and not bad["sandwich"]


def test_derivative_zero_contact_value():
    y, err = evaluate(derivative_zero(), 0.5)
    assert (y, err) == (0.755, 0.0)
