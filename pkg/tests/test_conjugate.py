from fractions import Fraction

import numpy as np
import pytest

from conjugate_ifs import (
    DepthExceeded,
    DomainError,
    IncompatibleSystem,
    MissingBoundary,
    evaluate,
    evaluate_word,
    validate,
)
from conjugate_ifs.conjugate import (
    COMPATIBLE,
    INCOMPATIBLE,
    UNDECIDED,
    ConjugateSystem,
    code_point,
    evaluate_grid,
    evaluate_many,
    load_system,
    save_system,
)
from conjugate_ifs.zoo import (
    CATALOG,
    conway_box,
    derivative_zero,
    dyadic_ifs,
    gasket,
    lebesgue,
    moebius_parametric,
    overlap,
    question_mark,
)


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_catalog_validation_status(entry):
    assert validate(entry.build()).status == entry.expected_validation


def test_overlap_witness_points():
    rep = validate(overlap(0.75, 0.5))
    assert rep.status == INCOMPATIBLE
    w = rep.witnesses[0]
    assert w.point == 0.5625 and {w.left, w.right} == {0.25, 0.5}
    assert "incompatible" in rep.summary()


def test_expanding_target_is_undecided():
    rep = validate(moebius_parametric(2.0))
    assert rep.status == UNDECIDED and not rep.ok
    assert any("not" in n for n in rep.notes)


def test_incompatible_system_refuses_evaluation():
    with pytest.raises(IncompatibleSystem):
        evaluate(overlap(0.5, 0.75), 0.3)


def test_code_point_examples():
    assert code_point(lebesgue(0.5), 0.625, 3) == ([1, 0, 1], 0.0)
    word, r = code_point(question_mark(), 1 / 3, 2)
    assert word == [0, 1] and r == 0.0


def test_contact_points_take_lowest_preimage():
    # 1/2 = f_0(1) = f_1(0); the coding continues from 0 in cell 1
    word, r = code_point(lebesgue(1 / 3), 0.5, 1)
    assert word == [1] and r == 0.0


def test_exact_values_at_rationals():
    assert evaluate(question_mark(), 2 / 5) == (0.375, 0.0)
    assert evaluate(conway_box(), 0.25)[0] == 1 / 3
    assert evaluate(lebesgue(1 / 3), 0.5) == (1 / 3, 0.0)


def test_error_bound_holds_for_irrational_points():
    s = lebesgue(1 / 4)
    x = np.sqrt(2) - 1
    y, err = evaluate(s, x, 1e-10)
    # independent check: binary digits of x, exact weights
    a, value, weight, t = Fraction(1, 4), Fraction(0), Fraction(1), Fraction(x)
    for _ in range(80):
        t *= 2
        if t >= 1:
            t -= 1
            value += weight * a
            weight *= 1 - a
        else:
            weight *= a
    assert err <= 1e-10 / 2 + 1e-16
    assert abs(y - float(value)) <= err + 1e-15


def test_tiny_dyadic_is_not_snapped_to_the_corner():
    assert evaluate(conway_box(), 2.0**-63, 1e-7) == (1 / 64, 0.0)
    assert evaluate(question_mark(), 1 / 64, 1e-30)[0] == 2.0**-63


def test_depth_cap_reports_best_bound():
    with pytest.raises(DepthExceeded) as info:
        evaluate(question_mark(), np.sqrt(2) - 1, 1e-14, depth_cap=5)
    assert info.value.best_bound > 0 and info.value.value is not None


def test_out_of_domain_point():
    with pytest.raises(DomainError):
        evaluate(lebesgue(0.3), 1.5)


def test_evaluate_many_matches_scalar():
    s = derivative_zero()
    xs = np.linspace(0, 1, 33)
    ys, errs = evaluate_many(s, xs)
    for x, y in zip(xs, ys):
        assert y == pytest.approx(evaluate(s, x)[0], abs=1e-9)
    assert np.all(errs <= 1e-9)


def test_evaluate_word_and_missing_boundary():
    s = lebesgue(1 / 3)
    assert evaluate_word(s, [1, 0], corner="left") == 1 / 3
    assert evaluate_word(s, [0], corner="right") == pytest.approx(1 / 3)
    partial = ConjugateSystem(s.x_side, s.y_side, s.kind, {0: 0.0})
    with pytest.raises(MissingBoundary):
        evaluate_word(partial, [0], corner=1)


def test_grid_is_sorted_unique_and_exact():
    table = evaluate_grid(lebesgue(1 / 3), 2)
    assert table.x[:, 0].tolist() == [0, 0.25, 0.5, 0.75, 1]
    assert np.allclose(table.y, [0, 1 / 9, 1 / 3, 5 / 9, 1], atol=1e-16)
    assert table.to_csv().splitlines()[0] == "x,y,err_bound"


def test_gasket_grid_depth_one():
    table = evaluate_grid(gasket(), 1)
    assert sorted(np.round(table.y, 15)) == sorted(np.round([0, 0.5, 1, 1 / 6, 5 / 6, 0.5], 15))


def test_system_round_trip(tmp_path):
    for s in (lebesgue(1 / 3), question_mark(), gasket(), overlap(0.75, 0.5)):
        path = tmp_path / "s.json"
        save_system(s, path)
        back = load_system(path)
        assert back.kind == s.kind and back.boundary == s.boundary
        assert validate(back).status == validate(s).status
        if validate(s).status == COMPATIBLE and s.kind != "gasket":
            assert evaluate(back, 0.3)[0] == evaluate(s, 0.3)[0]


def test_mismatched_sides_rejected():
    with pytest.raises(DomainError):
        ConjugateSystem(dyadic_ifs(), gasket().y_side, "monotone_interval")


def test_gasket_edge_values_agree_across_meeting_words():
    s = gasket()
    # f_i(q_j) = f_j(q_i) is the midpoint of edge q_i q_j
    for i, j in ((0, 1), (1, 2), (0, 2)):
        assert evaluate_word(s, [i], corner=j) == pytest.approx(evaluate_word(s, [j], corner=i), abs=1e-15)
