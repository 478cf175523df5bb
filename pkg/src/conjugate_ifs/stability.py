"""Hausdorff distances between attractors and solution graphs.

Graphs live in the product space with the root-sum-square metric, which for
subsets of R^d x R is the Euclidean metric on stacked coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from . import csvio
from .conjugate import ConjugateSystem, evaluate_grid
from .errors import BudgetExceeded, DomainError, EmptyCloud
from .ifs_core import Box, IFSystem, Interval, PointCloud, affine, attractor_points, custom
from .zoo import lebesgue

__all__ = [
    "PointCloud", "hausdorff_distance", "graph_cloud", "product_ifs",
    "discrete_approximation_experiment", "DeformationFamily", "deformation_family",
    "deformation_experiment", "uniform_vs_hausdorff_check", "experiment_csv",
]

MAX_PAIRS = 10**7


def _as_points(c):
    pts = c.points if isinstance(c, PointCloud) else np.asarray(c, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


def hausdorff_distance(a, b, max_pairs=MAX_PAIRS):
    """Exact Hausdorff distance between two finite clouds in the same space."""
    pa, pb = _as_points(a), _as_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyCloud("Hausdorff distance needs two nonempty clouds")
    if pa.shape[1] != pb.shape[1]:
        raise DomainError("clouds live in spaces of different dimension")
    if len(pa) * len(pb) > max_pairs:
        raise BudgetExceeded(f"{len(pa)} x {len(pb)} pairs exceed the cap {max_pairs}")
    # exact; the seed only fixes the internal visiting order
    d_ab = directed_hausdorff(pa, pb, seed=0)[0]
    d_ba = directed_hausdorff(pb, pa, seed=0)[0]
    return float(max(d_ab, d_ba))


def graph_cloud(system, depth, tol=1e-9):
    """Points ``(x, phi(x))`` at every depth-``depth`` word endpoint."""
    return evaluate_grid(system, depth, tol).as_cloud()


def product_ifs(system):
    """The maps ``h_i(x, y) = (f_i(x), g_i(y))`` on the product domain.

    Its attractor is the graph of the solution; ``attractor_points`` of this
    system at depth ``d + 1`` enumerates the same points as
    ``graph_cloud(system, d)``.
    """
    xs, ys = system.x_side, system.y_side
    if not isinstance(ys.domain, Interval):
        raise DomainError("product systems need an interval target")
    dx = xs.domain.dim if not isinstance(xs.domain, Interval) else 1
    if isinstance(xs.domain, Interval):
        lo, hi = [xs.domain.lo], [xs.domain.hi]
    else:
        g = xs.domain.grid(16)
        lo, hi = list(g.min(axis=0)), list(g.max(axis=0))
    dom = Box(tuple(lo + [ys.domain.lo]), tuple(hi + [ys.domain.hi]))

    def make(f, g):
        def h(z):
            z = np.asarray(z, dtype=float)
            flat = z.ndim == 1
            z2 = z.reshape(-1, dx + 1)
            xa = z2[:, 0] if dx == 1 else z2[:, :dx]
            out = np.column_stack([np.asarray(f(xa)).reshape(len(z2), -1), g(z2[:, dx])])
            return out[0] if flat else out

        fixed = np.concatenate([np.ravel(f.fixed_point), [g.fixed_point]])
        return custom(h, fixed=fixed)

    maps = tuple(make(f, g) for f, g in zip(xs.maps, ys.maps))
    return IFSystem(dom, maps, f"product:{system.name}")


def discrete_approximation_experiment(ifs, depths, cap=None):
    """``(n, d(K_n, K_{n+1}))`` for the fixed-point approximations ``K_n``."""
    depths = [int(d) for d in depths]
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise DomainError("depths must be increasing")
    kw = {} if cap is None else {"cap": cap}
    clouds = {}

    def cloud(n):
        if n not in clouds:
            clouds[n] = attractor_points(ifs, n, **kw)
        return clouds[n]

    return [(n, hausdorff_distance(cloud(n), cloud(n + 1))) for n in depths]


@dataclass
class DeformationFamily:
    """Deformed system on ``[-1/n, 1+1/n] x [1/n, 1-1/n]`` and its rescalers.

    ``e_x`` and ``e_y`` are stored as ``(c, L)`` with ``e^{-1}(t) = c + L t``;
    ``L = 0`` (``n = 2``) collapses the target to a point.
    """

    n: float
    e_x: tuple
    e_y: tuple
    system: ConjugateSystem

    def rescale(self, pts):
        (cx, Lx), (cy, Ly) = self.e_x, self.e_y
        if Lx == 0 or Ly == 0:
            raise DomainError("rescaling is singular for this n")
        pts = np.asarray(pts, dtype=float)
        return np.column_stack([(pts[:, 0] - cx) / Lx, (pts[:, 1] - cy) / Ly])


def _conjugated(m, c, L):
    # e^{-1} o m o e for m(t) = s t + o and e^{-1}(t) = c + L t
    s, o = m.params["slope"], m.params["offset"]
    return affine(s, (1.0 - s) * c + L * o)


def deformation_family(n, base=None):
    """Build the deformed copy of ``base`` (default: dyadic maps against
    ``y/3``, ``(2y+1)/3``) for a finite ``n >= 2``; ``n = inf`` gives ``base``."""
    if base is None:
        base = lebesgue(1.0 / 3.0)
    if math.isinf(n):
        return DeformationFamily(n, (0.0, 1.0), (0.0, 1.0), base)
    if n < 2:
        raise DomainError("deformations need n >= 2")
    ex = (-1.0 / n, 1.0 + 2.0 / n)
    ey = (1.0 / n, 1.0 - 2.0 / n)
    X = Interval(ex[0], ex[0] + ex[1])
    Y = Interval(ey[0], ey[0] + ey[1])
    xs = IFSystem(X, tuple(_conjugated(m, *ex) for m in base.x_side.maps), f"deformed_x:{n}")
    ys = IFSystem(Y, tuple(_conjugated(m, *ey) for m in base.y_side.maps), f"deformed_y:{n}")
    boundary = {c: ey[0] + ey[1] * v for c, v in base.boundary.items()}
    sys_n = ConjugateSystem(xs, ys, base.kind, boundary, f"deformed:{n}")
    return DeformationFamily(n, ex, ey, sys_n)


def deformation_experiment(n_list=(2, 4, 8, 16, 32), depth=10, tol=1e-9, placement="inclusion"):
    """Distances between deformed solution graphs and the limit graph.

    ``placement="inclusion"`` compares both graphs as subsets of the plane,
    an isometric placement, so the distance bounds the Gromov-Hausdorff
    distance. ``placement="rescaled"`` first maps the deformed graph through
    ``(e_x, e_y)``; that recovers the limit graph exactly and serves as a
    check of the construction.
    """
    if placement not in ("inclusion", "rescaled"):
        raise ValueError("placement must be 'inclusion' or 'rescaled'")
    limit = graph_cloud(deformation_family(math.inf).system, depth, tol)
    out = []
    for n in n_list:
        fam = deformation_family(n)
        pts = graph_cloud(fam.system, depth, tol).points
        if placement == "rescaled":
            pts = fam.rescale(pts)
        out.append((n, hausdorff_distance(pts, limit)))
    return out


def uniform_vs_hausdorff_check(system_a, system_b, depth, tol=1e-9):
    """Sup-norm gap of two solutions on a shared word-endpoint grid, and the
    Hausdorff distance of the two graph clouds."""
    ga = evaluate_grid(system_a, depth, tol)
    gb = evaluate_grid(system_b, depth, tol)
    if ga.x.shape != gb.x.shape or np.max(np.abs(ga.x - gb.x)) > 1e-12:
        raise DomainError("the two systems do not share a grid")
    sup = float(np.max(np.abs(ga.y - gb.y)))
    haus = hausdorff_distance(ga.as_cloud(), gb.as_cloud())
    return sup, haus


def experiment_csv(rows, dest=None):
    return csvio.write_csv(dest, ["n", "distance"], rows)
