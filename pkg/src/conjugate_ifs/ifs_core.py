"""Iterated function systems: maps, domains, words and discrete attractors.

Points are plain floats (or 1-D arrays) on an interval and length-``d``
arrays in the plane. Every built-in map also accepts a stacked array of
points, shape ``(n,)`` for an interval or ``(n, d)`` otherwise, so the
heavier routines can work on whole clouds at once.

A word is a tuple of indices ``(i1, ..., in)``. ``apply_word`` composes
left to right, i.e. ``f_{i1} o ... o f_{in}``, so the last letter acts
first.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import BudgetExceeded, DomainError, NoConvergence, NonFinite

Word = tuple
DEDUP_TOL = 1e-12
DEFAULT_CAP = 10**7


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``. ``lo == hi`` is allowed (a point)."""

    lo: float = 0.0
    hi: float = 1.0

    tag = "interval"
    dim = 1

    def __post_init__(self):
        if not self.hi >= self.lo:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def diameter(self):
        return self.hi - self.lo

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        return (x >= self.lo - tol) & (x <= self.hi + tol)

    def grid(self, n):
        return np.linspace(self.lo, self.hi, n)

    def random(self, n, rng):
        return rng.uniform(self.lo, self.hi, size=n)

    def to_config(self):
        return {"tag": "interval", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Triangle:
    """Closed triangle, the convex hull of a Sierpinski gasket.

    The default corners give unit side length.
    """

    corners: tuple = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))

    tag = "gasket"
    dim = 2

    @cached_property
    def vertices(self):
        return np.asarray(self.corners, dtype=float)

    @property
    def diameter(self):
        v = self.vertices
        return max(np.linalg.norm(v[i] - v[j]) for i in range(3) for j in range(3))

    def barycentric(self, x):
        """Barycentric coordinates, shape ``(..., 3)``."""
        v = self.vertices
        x = np.asarray(x, dtype=float)
        t = np.column_stack([v[1] - v[0], v[2] - v[0]])
        lam12 = np.linalg.solve(t, (x - v[0]).reshape(-1, 2).T).T
        lam = np.column_stack([1.0 - lam12.sum(axis=1), lam12])
        return lam.reshape(x.shape[:-1] + (3,))

    def contains(self, x, tol=1e-12):
        return np.all(self.barycentric(x) >= -tol, axis=-1)

    def grid(self, n):
        k = max(int(math.sqrt(2 * n)), 2)
        pts = [
            (i / k) * self.vertices[1] + (j / k) * self.vertices[2] + (1 - (i + j) / k) * self.vertices[0]
            for i in range(k + 1)
            for j in range(k + 1 - i)
        ]
        return np.asarray(pts)

    def random(self, n, rng):
        lam = rng.dirichlet(np.ones(3), size=n)
        return lam @ self.vertices

    def to_config(self):
        return {"tag": "gasket", "corners": [list(c) for c in self.corners]}


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in R^d."""

    lo: tuple
    hi: tuple

    tag = "box"

    @property
    def dim(self):
        return len(self.lo)

    @property
    def diameter(self):
        return float(np.linalg.norm(np.subtract(self.hi, self.lo)))

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        return np.all((x >= np.asarray(self.lo) - tol) & (x <= np.asarray(self.hi) + tol), axis=-1)

    def grid(self, n):
        k = max(int(round(n ** (1.0 / self.dim))), 2)
        axes = [np.linspace(a, b, k) for a, b in zip(self.lo, self.hi)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)

    def random(self, n, rng):
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))

    def to_config(self):
        return {"tag": "box", "lo": list(self.lo), "hi": list(self.hi)}


Domain = Union[Interval, Triangle, Box]


def domain_from_config(cfg):
    tag = cfg.get("tag", "interval")
    if tag == "interval":
        return Interval(float(cfg.get("lo", 0.0)), float(cfg.get("hi", 1.0)))
    if tag == "gasket":
        if "corners" in cfg:
            return Triangle(tuple(tuple(float(v) for v in c) for c in cfg["corners"]))
        return Triangle()
    if tag == "box":
        return Box(tuple(map(float, cfg["lo"])), tuple(map(float, cfg["hi"])))
    raise DomainError(f"unknown domain tag {tag!r}")


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class MapSpec:
    """One map of an IFS.

    ``eval`` and the optional ``derivative``/``inverse`` must accept a single
    point or a stacked array of points. ``params`` holds the coefficients
    needed to serialise built-in kinds; it is empty for custom maps.
    """

    eval: Callable
    kind: str = "custom"
    derivative: Optional[Callable] = None
    inverse: Optional[Callable] = None
    lipschitz_hint: Optional[float] = None
    params: dict = field(default_factory=dict)
    parabolic: bool = False
    domain: Optional[Domain] = None

    def __call__(self, x):
        return self.eval(x)

    @cached_property
    def fixed_point(self):
        return fixed_point(self, tol=1e-12, domain=self.domain)

    @cached_property
    def matrix(self):
        """2x2 projective matrix for 1-D affine and Moebius maps, else None."""
        p = self.params
        if self.kind == "moebius":
            return np.array([[p["a"], p["b"]], [p["c"], p["d"]]], dtype=float)
        if self.kind == "affine" and np.ndim(p["slope"]) == 0 and np.ndim(p["offset"]) == 0:
            return np.array([[p["slope"], p["offset"]], [0.0, 1.0]], dtype=float)
        return None

    def with_domain(self, domain):
        return MapSpec(
            self.eval, self.kind, self.derivative, self.inverse,
            self.lipschitz_hint, self.params, self.parabolic, domain,
        )

    def to_config(self):
        if self.kind == "custom":
            raise ValueError("custom maps cannot be serialised")
        cfg = {"kind": self.kind}
        for k, v in self.params.items():
            cfg[k] = np.asarray(v).tolist()
        if self.parabolic:
            cfg["parabolic"] = True
        return cfg


def affine(slope, offset, **kw):
    """``x -> slope * x + offset``; ``slope`` may be a scalar or a matrix."""
    s = np.asarray(slope, dtype=float)
    o = np.asarray(offset, dtype=float)
    if s.ndim == 0:
        s_f = float(s)
        o_f = float(o) if o.ndim == 0 else o

        def ev(x):
            return s_f * x + o_f

        def inv(y):
            return (y - o_f) / s_f

        if o.ndim == 0:
            def der(x):
                return s_f if np.ndim(x) == 0 else np.full(np.shape(x), s_f)
        else:
            eye = s_f * np.eye(o.size)

            def der(x):
                return eye

        lip = abs(s_f)
    else:
        s_inv = np.linalg.inv(s)

        def ev(x):
            return np.asarray(x) @ s.T + o

        def inv(y):
            return (np.asarray(y) - o) @ s_inv.T

        def der(x):
            return s

        lip = float(np.linalg.norm(s, 2))
    return MapSpec(ev, "affine", der, inv, kw.pop("lipschitz_hint", lip),
                   {"slope": s.tolist() if s.ndim else float(s), "offset": o.tolist() if o.ndim else float(o)}, **kw)


def moebius(a, b, c, d, **kw):
    """``x -> (a x + b) / (c x + d)`` on a real interval."""
    a, b, c, d = (float(v) for v in (a, b, c, d))
    det = a * d - b * c
    if det == 0:
        raise DomainError("degenerate Moebius matrix")

    def ev(x):
        return (a * x + b) / (c * x + d)

    def der(x):
        return det / (c * x + d) ** 2

    def inv(y):
        return (d * y - b) / (a - c * y)

    return MapSpec(ev, "moebius", der, inv, kw.pop("lipschitz_hint", None),
                   {"a": a, "b": b, "c": c, "d": d}, **kw)


def piecewise_linear(breakpoints, **kw):
    """Continuous piecewise-linear map through ``[(x0, y0), (x1, y1), ...]``."""
    bp = np.asarray(breakpoints, dtype=float)
    xs, ys = bp[:, 0].copy(), bp[:, 1].copy()
    if bp.ndim != 2 or bp.shape[1] != 2 or len(xs) < 2 or np.any(np.diff(xs) <= 0):
        raise DomainError("breakpoints need >= 2 points with increasing x")
    slopes = np.diff(ys) / np.diff(xs)

    def ev(x):
        return np.interp(x, xs, ys)

    def der(x):
        k = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
        return slopes[k]

    inv = None
    if np.all(np.diff(ys) > 0):
        def inv(y):
            return np.interp(y, ys, xs)

    return MapSpec(ev, "piecewise_linear", der, inv,
                   kw.pop("lipschitz_hint", float(np.max(np.abs(slopes)))),
                   {"breakpoints": bp.tolist()}, **kw)


def custom(fn, derivative=None, inverse=None, lipschitz_hint=None, fixed=None, **kw):
    """Arbitrary map; ``fixed`` optionally supplies a known fixed point."""
    params = {} if fixed is None else {"fixed_point": fixed}
    return MapSpec(fn, "custom", derivative, inverse, lipschitz_hint, params, **kw)


def map_from_config(cfg):
    kind = cfg["kind"]
    extra = {"parabolic": bool(cfg.get("parabolic", False))}
    if kind == "affine":
        return affine(cfg["slope"], cfg["offset"], **extra)
    if kind == "moebius":
        return moebius(cfg["a"], cfg["b"], cfg["c"], cfg["d"], **extra)
    if kind == "piecewise_linear":
        return piecewise_linear(cfg["breakpoints"], **extra)
    raise ValueError(f"unknown map kind {kind!r}")


def derivative_of(m, x, h=1e-7):
    """Derivative from the oracle, or a central difference for 1-D custom maps."""
    if m.derivative is not None:
        return m.derivative(x)
    x = np.asarray(x, dtype=float)
    return (m(x + h) - m(x - h)) / (2 * h)


# ---------------------------------------------------------------------------
# fixed points and preimages


def _moebius_fixed_point(m, domain):
    a, b, c, d = (m.params[k] for k in "abcd")
    # c y^2 + (d - a) y - b = 0
    if c == 0:
        return b / (d - a)
    qa, qb, qc = c, d - a, -b
    disc = qb * qb - 4 * qa * qc
    scale = max(qb * qb, abs(4 * qa * qc), 1e-300)
    if disc < 0:
        if disc > -1e-12 * scale:
            disc = 0.0
        else:
            raise NoConvergence("Moebius map has no real fixed point")
    sq = math.sqrt(disc)
    q = -0.5 * (qb + math.copysign(sq, qb)) if qb != 0 else -0.5 * sq
    roots = [q / qa] if q == 0 else [q / qa, qc / q]
    if domain is not None and isinstance(domain, Interval):
        inside = [r for r in roots if domain.lo - 1e-12 <= r <= domain.hi + 1e-12]
        if inside:
            roots = inside
    # prefer the attracting root
    roots.sort(key=lambda r: (abs(m.derivative(r)), r))
    return roots[0]


def _pl_fixed_point(m):
    bp = np.asarray(m.params["breakpoints"])
    for (x0, y0), (x1, y1) in zip(bp[:-1], bp[1:]):
        s = (y1 - y0) / (x1 - x0)
        if s == 1.0:
            if y0 == x0:
                return float(x0)
            continue
        t = (y0 - s * x0) / (1.0 - s)
        if x0 - 1e-15 <= t <= x1 + 1e-15:
            return float(t)
    raise NoConvergence("piecewise-linear map has no fixed point")


def fixed_point(m, tol=1e-12, domain=None, start=None, max_iter=10**6):
    """Fixed point of a weakly contractive map.

    Affine, Moebius and piecewise-linear maps are solved in closed form;
    anything else runs the damped iteration ``x <- (x + f(x)) / 2``.
    """
    if m.kind == "affine":
        s = np.asarray(m.params["slope"], dtype=float)
        o = np.asarray(m.params["offset"], dtype=float)
        if s.ndim == 0 and o.ndim == 0:
            # exact rational solve, so e.g. y -> 2y/3 + 1/6 gives 0.5 and not 0.49999999999999994
            return float(Fraction(float(o)) / (1 - Fraction(float(s))))
        if s.ndim == 0:
            x = o / (1.0 - float(s))
        else:
            x = np.linalg.solve(np.eye(len(o)) - s, o)
        return float(x) if np.ndim(x) == 0 else x
    if m.kind == "moebius":
        return float(_moebius_fixed_point(m, domain))
    if m.kind == "piecewise_linear":
        return _pl_fixed_point(m)
    if "fixed_point" in m.params:
        return m.params["fixed_point"]

    if start is None:
        if domain is None:
            start = 0.0
        elif isinstance(domain, Interval):
            start = 0.5 * (domain.lo + domain.hi)
        else:
            start = domain.grid(3).mean(axis=0)
    x = np.asarray(start, dtype=float)
    for _ in range(max_iter):
        fx = np.asarray(m(x), dtype=float)
        if np.max(np.abs(fx - x)) <= tol:
            return float(x) if x.ndim == 0 else x
        x = 0.5 * (x + fx)
    raise NoConvergence(f"fixed-point iteration did not reach tol={tol} in {max_iter} steps")


def preimage(m, x, domain, tol=1e-12):
    """Leftmost ``t`` in an interval domain with ``m(t) = x``, ``m`` increasing.

    Uses the closed-form inverse when the map has one; otherwise bisects at
    ``tol / 4``. Works elementwise on arrays.
    """
    if m.inverse is not None:
        return m.inverse(x)
    if not isinstance(domain, Interval):
        raise DomainError("bisection preimages need an interval domain")
    x = np.asarray(x, dtype=float)
    lo = np.full(x.shape, domain.lo)
    hi = np.full(x.shape, domain.hi)
    if np.any(x < m(lo) - tol) or np.any(x > m(hi) + tol):
        raise NoConvergence("value outside the range of the map")
    step_tol = tol / 4
    for _ in range(400):
        if np.all(hi - lo <= step_tol):
            break
        mid = 0.5 * (lo + hi)
        below = m(mid) < x
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    else:
        raise NoConvergence("bisection did not converge")
    return hi if hi.ndim else float(hi)


# ---------------------------------------------------------------------------
# map checks


@dataclass
class MapCheck:
    max_ratio: float
    maps_into_domain: bool
    fixed_point_residual: float
    weak_contraction: bool
    within_hint: bool

    @property
    def ok(self):
        return self.maps_into_domain and self.weak_contraction and self.within_hint


def _pairs(domain, n_pairs, rng):
    a = domain.random(n_pairs, rng)
    b = domain.random(n_pairs, rng)
    g = domain.grid(32)
    a = np.concatenate([a, g[:-1]])
    b = np.concatenate([b, g[1:]])
    return a, b


def _dist(u, v):
    d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    return np.abs(d) if d.ndim == 1 else np.linalg.norm(d, axis=-1)


def lipschitz_ratio(fn, domain, n_pairs=1000, seed=0):
    """Largest sampled difference quotient of ``fn`` on ``domain``."""
    rng = np.random.default_rng(seed)
    a, b = _pairs(domain, n_pairs, rng)
    dx = _dist(a, b)
    keep = dx > 1e-9
    if not keep.any():
        return 0.0  # single-point domain
    dy = _dist(fn(a), fn(b))
    return float(np.max(dy[keep] / dx[keep]))


def check_map(m, domain, n_pairs=1000, seed=0):
    """Spot-check a map on a sample of its domain.

    Weak contractivity is judged by ``d(f x, f y) < d(x, y)`` on every sampled
    pair, which admits parabolic fixed points; when a Lipschitz hint below one
    is declared the quotients must also stay under it.
    """
    rng = np.random.default_rng(seed)
    a, b = _pairs(domain, n_pairs, rng)
    dx = _dist(a, b)
    keep = dx > 1e-9
    fa, fb = m(a), m(b)
    ratios = _dist(fa, fb)[keep] / dx[keep]
    max_ratio = float(np.max(ratios)) if ratios.size else 0.0
    into = bool(np.all(domain.contains(fa, 1e-9)) and np.all(domain.contains(fb, 1e-9)))
    try:
        fp = fixed_point(m, domain=domain)
        res = float(np.max(np.abs(np.asarray(m(fp)) - fp)))
    except NoConvergence:
        res = float("inf")
    within = True
    if m.lipschitz_hint is not None and m.lipschitz_hint < 1:
        within = max_ratio <= m.lipschitz_hint + 1e-9
    return MapCheck(max_ratio, into, res, bool(np.all(ratios < 1.0)), within)


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True, eq=False)
class IFSystem:
    """A finite family of maps on a common domain.

    ``burn_in`` is the chaos-game burn-in suggested for this system; builders
    with parabolic maps raise it.
    """

    domain: Domain
    maps: tuple
    name: str = ""
    burn_in: int = 100

    def __post_init__(self):
        maps = tuple(m if m.domain is not None else m.with_domain(self.domain) for m in self.maps)
        if len(maps) < 2:
            raise DomainError("an IFS needs at least two maps")
        object.__setattr__(self, "maps", maps)

    @property
    def N(self):
        return len(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    @cached_property
    def fixed_points(self):
        return [m.fixed_point for m in self.maps]

    @property
    def parabolic(self):
        return any(m.parabolic for m in self.maps)

    def check_maps(self, n_pairs=1000, seed=0):
        return [check_map(m, self.domain, n_pairs, seed) for m in self.maps]

    def contraction_order(self, max_len=4, n_pairs=1000, seed=0):
        """Smallest ``k`` such that every k-fold composition passes the
        sampled weak-contraction check; ``None`` if no ``k <= max_len`` does.
        """
        for k in range(1, max_len + 1):
            ok = True
            for w in itertools.product(range(self.N), repeat=k):
                r = lipschitz_ratio(lambda x, w=w: apply_word(self, w, x), self.domain, n_pairs, seed)
                if not r < 1.0:
                    ok = False
                    break
            if ok:
                return k
        return None

    def check_covering(self, tol=1e-9, n=2001):
        """True when every grid point of the domain lies in some cell ``f_i(X)``
        (up to ``tol``)."""
        dom = self.domain
        if isinstance(dom, Interval):
            x = dom.grid(n)
            covered = np.zeros(x.shape, dtype=bool)
            for m in self.maps:
                a, b = sorted((float(m(dom.lo)), float(m(dom.hi))))
                covered |= (x >= a - tol) & (x <= b + tol)
            return bool(covered.all())
        if isinstance(dom, Triangle):
            pts = attractor_points(self, 6).points
            covered = np.zeros(len(pts), dtype=bool)
            for m in self.maps:
                cell = Triangle(tuple(map(tuple, m(dom.vertices))))
                covered |= cell.contains(pts, tol)
            return bool(covered.all())
        pts = dom.grid(n)
        covered = np.zeros(len(pts), dtype=bool)
        for m in self.maps:
            img = m(dom.grid(n))
            lo, hi = img.min(axis=0), img.max(axis=0)
            covered |= np.all((pts >= lo - tol) & (pts <= hi + tol), axis=-1)
        return bool(covered.all())

    def to_config(self):
        return {
            "name": self.name,
            "domain": self.domain.to_config(),
            "maps": [m.to_config() for m in self.maps],
            "burn_in": self.burn_in,
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(
            domain_from_config(cfg.get("domain", {})),
            tuple(map_from_config(m) for m in cfg["maps"]),
            cfg.get("name", ""),
            int(cfg.get("burn_in", 100)),
        )


def check_word(ifs, w):
    w = tuple(int(i) for i in w)
    if any(i < 0 or i >= ifs.N for i in w):
        raise DomainError(f"word {w} has letters outside 0..{ifs.N - 1}")
    return w


def apply_word(ifs, w, x):
    """``f_{w[0]} o f_{w[1]} o ... o f_{w[-1]}`` applied to ``x``."""
    for i in reversed(w):
        x = ifs.maps[i](x)
    return x


def word_image_interval(ifs, w):
    """Endpoints of the cell ``f_w([lo, hi])`` for increasing interval maps."""
    if not isinstance(ifs.domain, Interval):
        raise DomainError("word images as intervals need an interval domain")
    a = float(apply_word(ifs, w, ifs.domain.lo))
    b = float(apply_word(ifs, w, ifs.domain.hi))
    return (a, b) if a <= b else (b, a)


# ---------------------------------------------------------------------------
# point clouds and attractors


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite sample of a metric space, stored as an ``(n, d)`` array.

    Distances are Euclidean; for a product of two spaces this is the
    root-sum-square of the factor distances.
    """

    points: np.ndarray
    space: str = "euclidean"

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        elif p.ndim != 2:
            raise ValueError("points must be a 1-D or 2-D array")
        if not np.all(np.isfinite(p)):
            raise NonFinite("point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", p)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]

    def dedup(self, tol=DEDUP_TOL):
        return PointCloud(dedup_points(self.points, tol), self.space)


def dedup_points(points, tol=DEDUP_TOL):
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        p = p.reshape(-1, 1)
    if len(p) == 0:
        return p
    keys = np.round(p / tol).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    out = p[np.sort(idx)]
    order = np.lexsort(out.T[::-1])
    return out[order]


def attractor_points(ifs, depth, cap=DEFAULT_CAP, tol=DEDUP_TOL):
    """Discrete attractor approximation from fixed points.

    Returns every point ``f_{i1} o ... o f_{i(k-1)}(fix f_{ik})`` for words of
    length ``k <= depth``, deduplicated within ``tol``. Since fixed points are
    reproduced by their own map, the level sets are nested and the result is
    the level ``depth`` set ``P_k = U_i f_i(P_{k-1})``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if ifs.N ** depth > cap:
        raise BudgetExceeded(f"{ifs.N}^{depth} words exceed the cap {cap}")
    pts = np.array([np.atleast_1d(np.asarray(fp, dtype=float)) for fp in ifs.fixed_points])
    flat = pts.shape[1] == 1
    level = dedup_points(pts, tol)
    for _ in range(depth - 1):
        arg = level[:, 0] if flat else level
        imgs = [np.asarray(m(arg), dtype=float) for m in ifs.maps]
        level = dedup_points(np.concatenate([i.reshape(len(arg), -1) for i in imgs]), tol)
    return PointCloud(level)
