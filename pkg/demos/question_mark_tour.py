"""Evaluate the question-mark function and its inverse, then write a graph CSV."""

from fractions import Fraction

from conjugate_ifs import evaluate, validate
from conjugate_ifs.conjugate import code_point, evaluate_grid
from conjugate_ifs.zoo import conway_box, question_mark

qm = question_mark()
print(validate(qm).summary())

for q in (Fraction(1, 3), Fraction(2, 5), Fraction(3, 7)):
    y, err = evaluate(qm, float(q))
    back, _ = evaluate(conway_box(), y, 1e-7)
    print(f"?({q}) = {y!r} (bound {err:g}); conway gives back {back!r}")

word, r = code_point(qm, 3 / 7, 6)
print("address of 3/7:", word, "residual", r)

evaluate_grid(qm, 8).to_csv("question_mark_depth8.csv")
print("wrote question_mark_depth8.csv")
