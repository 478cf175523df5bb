"""Named systems with known behaviour, and a small reference grammar.

``build("overlap:0.75,0.5")`` looks a builder up by name and passes the
comma-separated parameters (decimals or fractions such as ``1/3``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .conjugate import COMPATIBLE, INCOMPATIBLE, UNDECIDED, ConjugateSystem, load_system
from .errors import DomainError
from .ifs_core import IFSystem, Interval, Triangle, affine, moebius, piecewise_linear

UNIT = Interval(0.0, 1.0)
ENDS = {0: 0.0, 1: 1.0}
GASKET_CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


def dyadic_ifs(name="dyadic"):
    """``f_0(x) = x/2``, ``f_1(x) = (x+1)/2`` on [0, 1]."""
    return IFSystem(UNIT, (affine(0.5, 0.0), affine(0.5, 0.5)), name)


def gasket_ifs(name="gasket"):
    """``f_i(x) = (x + q_i)/2`` on the unit-side triangle."""
    maps = tuple(affine(0.5, np.asarray(q) / 2.0) for q in GASKET_CORNERS)
    return IFSystem(Triangle(GASKET_CORNERS), maps, name)


def stern_brocot_ifs(name="stern_brocot"):
    """``x/(x+1)`` and ``1/(2-x)``: both maps are parabolic at their fixed points."""
    maps = (moebius(1, 0, 1, 1, parabolic=True), moebius(0, 1, -1, 2, parabolic=True))
    return IFSystem(UNIT, maps, name, burn_in=1000)


def linear_pair(a, name=""):
    return IFSystem(UNIT, (affine(a, 0.0), affine(1.0 - a, a)), name)


def lebesgue(a):
    """Dyadic maps against ``a*y`` and ``(1-a)*y + a``; the solution is
    Lebesgue's singular function (the identity at ``a = 1/2``)."""
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError("lebesgue needs 0 < a < 1")
    return ConjugateSystem(dyadic_ifs(), linear_pair(a, f"linear:{a!r}"), "monotone_interval",
                           ENDS, name=f"lebesgue:{a!r}")


def question_mark():
    """Minkowski's question-mark function: Stern-Brocot maps against dyadic maps."""
    return ConjugateSystem(stern_brocot_ifs(), dyadic_ifs(), "monotone_interval", name="question_mark")


def conway_box():
    """Conway's box function, the inverse of the question-mark function."""
    return ConjugateSystem(dyadic_ifs(), stern_brocot_ifs(), "monotone_interval", name="conway_box")


def overlap(a, b):
    """``f_i`` with ratio ``a`` and ``g_i`` with ratio ``b``, both anchored at 0 and 1.

    For ``a > 1/2`` the cells overlap and most choices admit no solution.
    """
    a, b = float(a), float(b)
    if not (0.5 <= a < 1.0 and 0.5 <= b < 1.0):
        raise DomainError("overlap needs a, b in [1/2, 1)")
    xs = IFSystem(UNIT, (affine(a, 0.0), affine(a, 1.0 - a)), f"overlap_x:{a!r}")
    ys = IFSystem(UNIT, (affine(b, 0.0), affine(b, 1.0 - b)), f"overlap_y:{b!r}")
    return ConjugateSystem(xs, ys, "generic", ENDS, name=f"overlap:{a!r},{b!r}")


def moebius_parameter(u):
    return 2.0 / (1.0 + math.sqrt(1.0 + 8.0 * u * u))


def moebius_parametric(u):
    """Dyadic maps against a one-parameter Moebius pair.

    ``g_1`` has derivative ``u^2 x_u`` at its fixed point 1, so it stops
    being a weak contraction once ``u > sqrt(3)``; the system is then
    flagged and validation is undecided.
    """
    u = float(u)
    if not u > 0:
        raise DomainError("moebius_parametric needs u > 0")
    x = moebius_parameter(u)
    k = u * u * x * x
    g0 = moebius(x, 0.0, -k, 1.0)
    g1 = moebius(0.0, x, -k, 1.0 - k)
    flags = ("g1:not_contractive",) if u > math.sqrt(3.0) else ()
    ys = IFSystem(UNIT, (g0, g1), f"moebius_pair:{u!r}", burn_in=1000)
    return ConjugateSystem(dyadic_ifs(), ys, "monotone_interval", name=f"moebius_parametric:{u!r}",
                           flags=flags)


def gasket():
    """Fractal function on the Sierpinski gasket with corner values 0, 1/2, 1."""
    g0 = moebius(1, 0, -2, 4)          # 1/(2-y) - 1/2
    g1 = moebius(4, 1, 0, 6)           # 2y/3 + 1/6 with integer coefficients
    g2 = moebius(3, 1, 2, 2)           # y/(y+1) + 1/2
    ys = IFSystem(UNIT, (g0, g1, g2), "gasket_values", burn_in=1000)
    return ConjugateSystem(gasket_ifs(), ys, "gasket", name="gasket")


DERIVATIVE_ZERO_G0 = ((0.0, 0.0), (0.25, 0.1225), (0.5, 0.25), (1.0, 0.755))
DERIVATIVE_ZERO_G1 = (0.245, 0.755)


def derivative_zero():
    """Singular solution with zero derivative at every dyadic rational.

    ``g_0`` is a piecewise-linear perturbation of ``y/2`` on [0, 1/2] and
    ``y - 1/4`` on [1/2, 1]; ``g_1`` perturbs ``(y+3)/4``. The breakpoints
    satisfy the construction's constraints with slack 0.02, see
    :func:`derivative_zero_constraints`.
    """
    g0 = piecewise_linear(DERIVATIVE_ZERO_G0)
    g1 = affine(*DERIVATIVE_ZERO_G1)
    ys = IFSystem(UNIT, (g0, g1), "derivative_zero_g")
    return ConjugateSystem(dyadic_ifs(), ys, "monotone_interval", ENDS, name="derivative_zero")


def derivative_zero_constraints(system=None, eps=0.02, n=4001):
    """Evaluate the five construction constraints on a grid; returns a dict
    of booleans plus the derivative gap used for the last one."""
    if system is None:
        system = derivative_zero()
    g0, g1 = system.y_side.maps
    y = np.linspace(0.0, 1.0, n)
    ref0 = np.where(y <= 0.5, y / 2.0, y - 0.25)
    d0 = g0.derivative(y)
    dref0 = np.where(y < 0.5, 0.5, 1.0)
    gap = float(np.max(np.abs(dref0 - d0)) + abs(0.25 - g1.derivative(0.5)))
    lower = (y > 0) & (y < 0.5)
    upper = (y > 0.5) & (y <= 1)
    inner = (y > 0) & (y < 0.25)
    return {
        "endpoints": bool(g0(0.0) == 0.0 and 0.75 < g0(1.0) and abs(g0(1.0) - g1(0.0)) < 1e-15
                          and g1(0.0) < g1(1.0) and abs(g1(1.0) - 1.0) < 1e-15),
        "shapes": g0.kind == "piecewise_linear" and g1.kind == "affine",
        "sandwich": bool(np.all(g0(y[lower]) < ref0[lower]) and np.all(g0(y[upper]) > ref0[upper])),
        "slope_near_zero": bool(np.all((d0[inner] > 0) & (d0[inner] < 0.5))),
        "derivative_gap": bool(gap < eps),
        "gap": gap,
    }


def mobius_dimension_pair():
    """Dyadic maps against ``5y/(10-2y)`` and ``(y+5)/(8-2y)``.

    The solution is the smooth map ``5x/(3+2x)``, so the transfer density is
    ``15/(5-2y)^2`` and the dimension of the image measure is 1.
    """
    ys = IFSystem(UNIT, (moebius(5, 0, -2, 10), moebius(1, 5, -2, 8)), "mobius_dimension_g", burn_in=1000)
    return ConjugateSystem(dyadic_ifs(), ys, "monotone_interval", name="mobius_dimension_pair")


@dataclass
class CatalogEntry:
    name: str
    builder: object
    params: tuple = ()
    expected_validation: str = COMPATIBLE
    notes: str = ""

    def build(self):
        return self.builder(*self.params)

    @property
    def reference(self):
        if not self.params:
            return self.builder.__name__
        return self.builder.__name__ + ":" + ",".join(repr(float(p)) for p in self.params)


CATALOG = [
    CatalogEntry("lebesgue", lebesgue, (1.0 / 3.0,), COMPATIBLE, "Lebesgue singular function"),
    CatalogEntry("lebesgue_identity", lebesgue, (0.5,), COMPATIBLE, "a = 1/2 gives the identity"),
    CatalogEntry("question_mark", question_mark, (), COMPATIBLE, "Minkowski question mark"),
    CatalogEntry("conway_box", conway_box, (), COMPATIBLE, "inverse of the question mark"),
    CatalogEntry("overlap_i", overlap, (0.75, 0.5), INCOMPATIBLE, "phi(2/3) forced to 0 and into [1/2, 1]"),
    CatalogEntry("overlap_ii", overlap, (0.5, 0.75), INCOMPATIBLE, "g_0(1) != g_1(0) at the contact 1/2"),
    CatalogEntry("overlap_iii", overlap, (2.0 / 3.0, 0.75), INCOMPATIBLE, "two candidate values for phi(1/2)"),
    CatalogEntry("moebius_parametric", moebius_parametric, (1.0,), COMPATIBLE, "contractive Moebius pair"),
    CatalogEntry("moebius_parametric_expanding", moebius_parametric, (2.0,), UNDECIDED,
                 "g_1 expands at its fixed point for u > sqrt(3)"),
    CatalogEntry("gasket", gasket, (), COMPATIBLE, "fractal function on the Sierpinski gasket"),
    CatalogEntry("derivative_zero", derivative_zero, (), COMPATIBLE, "zero derivative at dyadic rationals"),
    CatalogEntry("mobius_dimension_pair", mobius_dimension_pair, (), COMPATIBLE, "smooth Moebius solution"),
]

BUILDERS = {
    f.__name__: f
    for f in (lebesgue, question_mark, conway_box, overlap, moebius_parametric, gasket,
              derivative_zero, mobius_dimension_pair)
}


def _number(s):
    return float(Fraction(s.strip()))


def parse_reference(ref):
    """Split ``name[:p1,p2,...]`` into the name and a tuple of floats."""
    name, _, rest = ref.strip().partition(":")
    try:
        params = tuple(_number(s) for s in rest.split(",")) if rest else ()
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad parameters in {ref!r}") from exc
    return name, params


def build(ref):
    """Build a system from a catalog reference or a path to a JSON config."""
    name, params = parse_reference(ref)
    if name in BUILDERS:
        try:
            return BUILDERS[name](*params)
        except TypeError as exc:
            raise DomainError(f"wrong number of parameters for {name}") from exc
    for entry in CATALOG:
        if entry.name == name and not params:
            return entry.build()
    if ref.endswith(".json"):
        return load_system(ref)
    raise DomainError(f"unknown system {ref!r}")
