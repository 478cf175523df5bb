"""Conjugate systems ``phi(f_i(x)) = g_i(phi(x))``: validation, coding, evaluation.

The solution is never tabulated. A point ``x`` is coded by repeatedly
pulling it back through the cell ``f_i(X)`` that contains it, and the same
letters are pushed forward on the target side: after ``n`` letters
``phi(x)`` lies in ``g_w(Y)``. Once that interval is shorter than the
tolerance its midpoint is returned together with half its length.

When the residual lands on a corner (a fixed point ``fix f_c`` with a known
boundary value) the word stops and the value ``g_w(phi0(c))`` is exact.
1-D affine and Moebius maps are handled through 2x2 projective matrices,
with the x-side residual recomputed from the original input at every step
so rounding does not accumulate along the word.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import csvio
from .errors import (
    BudgetExceeded,
    DepthExceeded,
    DomainError,
    IncompatibleSystem,
    MissingBoundary,
    NoConvergence,
)
from .ifs_core import (
    DEFAULT_CAP,
    IFSystem,
    Interval,
    PointCloud,
    Triangle,
    apply_word,
    check_word,
    dedup_points,
    derivative_of,
    preimage,
)

SNAP = 1e-13
SNAP_FACTOR = 16.0
EPS = np.finfo(float).eps
KINDS = ("monotone_interval", "gasket", "generic")
COMPATIBLE, INCOMPATIBLE, UNDECIDED = "compatible", "incompatible", "undecided"


@dataclass
class Witness:
    """A point where two routes force different values of the solution."""

    point: object
    left: float
    right: float
    discrepancy: float
    note: str = ""


@dataclass
class CompatibilityReport:
    status: str
    witnesses: list = field(default_factory=list)
    checks_run: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status == COMPATIBLE

    def summary(self):
        lines = [f"status: {self.status}", "checks: " + ", ".join(self.checks_run)]
        for w in self.witnesses:
            pt = np.round(np.asarray(w.point, dtype=float), 15).tolist()
            lines.append(
                f"witness at {pt}: {w.left!r} vs {w.right!r} (gap {w.discrepancy:.3g})"
                + (f" [{w.note}]" if w.note else "")
            )
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class ConjugateSystem:
    """Two IFS with the same number of maps plus boundary data.

    ``boundary`` maps a corner index ``c`` to the required value of the
    solution at ``fix(f_c)``; by default every corner gets ``fix(g_c)``.
    Only target maps that ignore ``x`` are supported. A dependence
    ``g_i(x, y)`` would enter through the target side of the evaluation
    engine, which currently pushes words through ``y_side`` alone.
    """

    x_side: IFSystem
    y_side: IFSystem
    kind: str = "monotone_interval"
    boundary: dict = None
    name: str = ""
    depth_cap: int = 10**4
    flags: tuple = ()

    def __post_init__(self):
        if self.x_side.N != self.y_side.N:
            raise DomainError(f"x side has {self.x_side.N} maps, y side {self.y_side.N}")
        if self.kind not in KINDS:
            raise DomainError(f"unknown kind {self.kind!r}")
        if self.boundary is None:
            b = {}
            for c, m in enumerate(self.y_side.maps):
                try:
                    b[c] = float(m.fixed_point)
                except NoConvergence:
                    pass
        else:
            b = {int(k): float(v) for k, v in dict(self.boundary).items()}
        object.__setattr__(self, "boundary", b)
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def N(self):
        return self.x_side.N

    def corner_index(self, corner):
        if isinstance(corner, str):
            named = {"left": 0, "right": self.N - 1}
            if corner in named:
                return named[corner]
            corner = int(corner)
        c = int(corner)
        if not 0 <= c < self.N:
            raise DomainError(f"corner {c} out of range")
        return c

    def corner_point(self, corner):
        return self.x_side.maps[self.corner_index(corner)].fixed_point

    @cached_property
    def report(self):
        return validate(self)

    @cached_property
    def _engine(self):
        return _Engine(self)

    def to_config(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "x_side": self.x_side.to_config(),
            "y_side": self.y_side.to_config(),
            "boundary": {str(k): v for k, v in self.boundary.items()},
            "depth_cap": self.depth_cap,
            "flags": list(self.flags),
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(
            IFSystem.from_config(cfg["x_side"]),
            IFSystem.from_config(cfg["y_side"]),
            cfg.get("kind", "monotone_interval"),
            cfg.get("boundary"),
            cfg.get("name", ""),
            int(cfg.get("depth_cap", 10**4)),
            tuple(cfg.get("flags", ())),
        )


def load_system(path):
    with open(path) as fh:
        return ConjugateSystem.from_config(json.load(fh))


def save_system(system, path):
    with open(path, "w") as fh:
        json.dump(system.to_config(), fh, indent=2)


# ---------------------------------------------------------------------------
# validation


def _gap_witness(point, have, new, note=""):
    (l1, h1), (l2, h2) = have, new
    if l2 > h1:
        return Witness(point, h1, l2, l2 - h1, note)
    return Witness(point, l1, h2, l1 - h2, note)


def _contractivity(ifs, side, notes):
    checks = ifs.check_maps()
    bad = [k for k, c in enumerate(checks) if not c.ok]
    if not bad:
        return True
    if all(c.maps_into_domain for c in checks):
        order = ifs.contraction_order()
        if order is not None:
            notes.append(f"{side}-side maps {bad} contract only after {order}-fold composition")
            return True
    notes.append(f"{side}-side maps {bad} are not weak contractions on the sampled domain")
    return False


def _interval_chain(ifs, tol):
    dom = ifs.domain
    ms = ifs.maps
    ok = abs(ms[0](dom.lo) - dom.lo) <= tol and abs(ms[-1](dom.hi) - dom.hi) <= tol
    for i in range(1, len(ms)):
        ok = ok and abs(ms[i - 1](dom.hi) - ms[i](dom.lo)) <= tol
    return bool(ok)


def validate(system, tol=1e-9, depth=12, node_cap=2000):
    """Check the matching conditions a solution needs.

    ``monotone_interval`` systems use the endpoint chain
    ``g_{i-1}(phi0(1)) = g_i(phi0(0))``; gasket systems use the pairwise
    corner identities ``g_i(fix g_j) = g_j(fix g_i)``. Systems whose cells
    overlap (``generic``, or a broken endpoint chain) run interval constraint
    propagation over points reachable from the seeds within ``depth`` steps;
    an empty intersection is reported with its witness. If a map on either
    side fails the contractivity check the status is ``undecided``.
    """
    checks, wits, notes = [], [], []
    contractive = True
    for side, ifs in (("x", system.x_side), ("y", system.y_side)):
        checks.append(f"contractivity_{side}")
        contractive &= _contractivity(ifs, side, notes)

    checks.append("boundary_fixed_points")
    for c, v in system.boundary.items():
        try:
            fg = system.y_side.maps[c].fixed_point
        except NoConvergence:
            notes.append(f"g_{c} has no fixed point for the boundary check")
            continue
        if abs(fg - v) > tol:
            wits.append(Witness(system.corner_point(c), v, fg, abs(fg - v), f"phi0 vs fix g_{c}"))

    xs, ys = system.x_side, system.y_side
    propagate = system.kind == "generic"
    if system.kind == "monotone_interval":
        checks.append("endpoint_chain_f")
        if not _interval_chain(xs, tol):
            notes.append("f cells do not form an endpoint chain; falling back to propagation")
            propagate = True
        else:
            checks.append("endpoint_chain_g")
            left, right = system.boundary.get(0), system.boundary.get(system.N - 1)
            if left is None or right is None:
                notes.append("missing boundary value at an end corner")
                contractive = False
            else:
                for i in range(1, system.N):
                    lv = float(ys.maps[i - 1](right))
                    rv = float(ys.maps[i](left))
                    if abs(lv - rv) > tol:
                        wits.append(Witness(float(xs.maps[i](xs.domain.lo)), lv, rv, abs(lv - rv),
                                            f"g_{i - 1}(phi(1)) vs g_{i}(phi(0))"))
    elif system.kind == "gasket":
        checks.append("gasket_corner_identities")
        for i, j in itertools.combinations(range(system.N), 2):
            if i not in system.boundary or j not in system.boundary:
                continue
            lv = float(ys.maps[i](system.boundary[j]))
            rv = float(ys.maps[j](system.boundary[i]))
            if abs(lv - rv) > tol:
                pt = xs.maps[i](system.corner_point(j))
                wits.append(Witness(pt, lv, rv, abs(lv - rv), f"g_{i}(phi(q_{j})) vs g_{j}(phi(q_{i}))"))

    if propagate and not wits:
        if isinstance(xs.domain, Interval) and isinstance(ys.domain, Interval):
            checks.append(f"constraint_propagation_depth_{depth}")
            w = _propagate(system, tol, depth, node_cap)
            if w is not None:
                wits.append(w)
        else:
            notes.append("propagation needs interval domains")
            contractive = False

    if not contractive:
        status = UNDECIDED
    elif any(w.discrepancy > tol for w in wits):
        status = INCOMPATIBLE
    else:
        status = COMPATIBLE
    return CompatibilityReport(status, wits, checks, notes)


def _propagate(system, tol, depth, node_cap, max_updates=200_000):
    xs, ys = system.x_side, system.y_side
    X, Y = xs.domain, ys.domain
    fs, gs = xs.maps, ys.maps

    def key(v):
        return round(float(v), 12)

    cells = [tuple(sorted((float(m(X.lo)), float(m(X.hi))))) for m in fs]
    seeds = [X.lo, X.hi] + [float(m.fixed_point) for m in fs]
    for n in (1, 2):
        for w in itertools.product(range(len(fs)), repeat=n):
            seeds += [float(apply_word(xs, w, X.lo)), float(apply_word(xs, w, X.hi))]
    for (a1, b1), (a2, b2) in itertools.combinations(cells, 2):
        lo, hi = max(a1, a2), min(b1, b2)
        if hi > lo:
            seeds += list(np.linspace(lo, hi, 5))

    nodes = {}
    frontier = []
    for s in seeds:
        k = key(s)
        if k not in nodes:
            nodes[k] = float(s)
            frontier.append(float(s))
    for _ in range(depth):
        nxt = []
        for x in frontier:
            cands = [float(m(x)) for m in fs]
            for m, (a, b) in zip(fs, cells):
                if a - 1e-12 <= x <= b + 1e-12:
                    p = float(np.clip(preimage(m, min(max(x, a), b), X), X.lo, X.hi))
                    cands.append(p)
            for c in cands:
                k = key(c)
                if k not in nodes and len(nodes) < node_cap:
                    nodes[k] = c
                    nxt.append(c)
        frontier = nxt
        if not frontier:
            break

    edges = []
    for k, x in nodes.items():
        for i, m in enumerate(fs):
            k2 = key(m(x))
            if k2 in nodes:
                edges.append((k, i, k2))
    incident = {k: [] for k in nodes}
    for e, (a, _, b) in enumerate(edges):
        incident[a].append(e)
        incident[b].append(e)

    enc = {k: (Y.lo, Y.hi) for k in nodes}
    for c, v in system.boundary.items():
        k = key(fs[c].fixed_point)
        if k in enc:
            enc[k] = (v, v)
    gimg = [tuple(sorted((float(g(Y.lo)), float(g(Y.hi))))) for g in gs]

    def meet(k, new, note):
        have = enc[k]
        lo, hi = max(have[0], new[0]), min(have[1], new[1])
        if lo > hi + tol:
            return _gap_witness(nodes[k], have, new, note), False
        if lo > hi:
            lo = hi = 0.5 * (lo + hi)
        changed = (lo - have[0]) > 1e-14 or (have[1] - hi) > 1e-14
        enc[k] = (lo, hi)
        return None, changed

    def g_range(i, lo, hi):
        a, b = float(gs[i](lo)), float(gs[i](hi))
        return (a, b) if a <= b else (b, a)

    def g_pre(i, lo, hi):
        ga, gb = gimg[i]
        lo, hi = max(lo, ga), min(hi, gb)
        a = float(np.clip(preimage(gs[i], lo, Y), Y.lo, Y.hi))
        b = float(np.clip(preimage(gs[i], hi, Y), Y.lo, Y.hi))
        return (a, b) if a <= b else (b, a)

    queue = deque(range(len(edges)))
    queued = set(queue)
    forward_only = set(queue)
    updates = 0
    while queue and updates < max_updates:
        e = queue.popleft()
        queued.discard(e)
        a, i, b = edges[e]
        updates += 1
        touched = []
        w, ch = meet(b, g_range(i, *enc[a]), f"phi(f_{i}({nodes[a]:.12g})) = g_{i}(phi({nodes[a]:.12g}))")
        if w is not None:
            return w
        if ch:
            touched.append(b)
        if e in forward_only:
            # first sweep is forward only so endpoint clashes surface at the contact point
            forward_only.discard(e)
            queue.append(e)
            queued.add(e)
            continue
        lo, hi = enc[b]
        ga, gb = gimg[i]
        if lo > gb + tol or hi < ga - tol:
            return _gap_witness(nodes[b], enc[b], gimg[i], f"phi({nodes[b]:.12g}) outside g_{i}(Y)")
        w, ch = meet(a, g_pre(i, lo, hi), f"phi({nodes[a]:.12g}) = g_{i}^-1(phi({nodes[b]:.12g}))")
        if w is not None:
            return w
        if ch:
            touched.append(a)
        for k in touched:
            for e2 in incident[k]:
                if e2 not in queued:
                    queue.append(e2)
                    queued.add(e2)
    return None


# ---------------------------------------------------------------------------
# evaluation engine


def _proj(M, y):
    return (M[0] * y + M[1]) / (M[2] * y + M[3])


def _mul(A, B):
    return (
        A[0] * B[0] + A[1] * B[2],
        A[0] * B[1] + A[1] * B[3],
        A[2] * B[0] + A[3] * B[2],
        A[2] * B[1] + A[3] * B[3],
    )


def _normalize(M):
    # scale by a power of two so integer entries stay exact
    s = np.maximum(np.maximum(np.abs(M[0]), np.abs(M[1])), np.maximum(np.abs(M[2]), np.abs(M[3])))
    _, e = np.frexp(s)
    return tuple(np.ldexp(m, -e) for m in M)


def _take(M, sel):
    return tuple(m[sel] for m in M)


def _pick(mats, letters):
    return tuple(mats[letters, j] for j in range(4))


def _identity(k):
    return (np.ones(k), np.zeros(k), np.zeros(k), np.ones(k))


def _matrices(ifs):
    ms = [m.matrix for m in ifs.maps]
    if any(m is None for m in ms) or not isinstance(ifs.domain, Interval):
        return None
    return np.array([m.ravel() for m in ms])


def _inverse_matrices(ifs):
    ms = _matrices(ifs)
    if ms is None:
        return None
    return np.column_stack([ms[:, 3], -ms[:, 1], -ms[:, 2], ms[:, 0]])


def _min_gain(m, x):
    """Smallest local stretch factor of ``m`` at ``x`` (per point)."""
    if m.kind == "affine":
        s = np.asarray(m.params["slope"], dtype=float)
        gain = abs(float(s)) if s.ndim == 0 else np.linalg.svd(s, compute_uv=False)[-1]
        return np.full(len(x), max(gain, 1e-300))
    d = np.abs(np.asarray(derivative_of(m, x), dtype=float))
    return np.maximum(np.broadcast_to(d, (len(x),)), 1e-300)


class _Engine:
    """Vectorised word extension shared by ``evaluate`` and ``code_point``.

    The state only holds the points still being refined; matrices are kept
    as four separate entry arrays.
    """

    def __init__(self, system):
        self.s = system
        xs, ys = system.x_side, system.y_side
        if not isinstance(ys.domain, Interval):
            raise DomainError("evaluation needs an interval target")
        self.ylo, self.yhi = ys.domain.lo, ys.domain.hi
        self.interval = isinstance(xs.domain, Interval)
        self.gasket = isinstance(xs.domain, Triangle)
        if not (self.interval or self.gasket):
            raise DomainError("point coding supports interval and gasket domains")
        self.xinv = _inverse_matrices(xs)
        self.ymat = _matrices(ys)
        self.corners = [(c, np.asarray(system.corner_point(c), dtype=float), v)
                        for c, v in sorted(system.boundary.items())]
        if self.interval:
            cells = [sorted((float(m(xs.domain.lo)), float(m(xs.domain.hi)))) for m in xs.maps]
            self.cell_lo = np.array([c[0] for c in cells])
            self.cell_hi = np.array([c[1] for c in cells])

    def start(self, x):
        k = len(x)
        return {
            "x": x,
            "idx": np.arange(k),
            "F": _identity(k) if self.xinv is not None else None,
            "r": None if self.xinv is not None else x.copy(),
            # forward estimate of the rounding error carried by ``r``
            "e": None if self.xinv is not None else EPS * np.abs(x).reshape(k, -1).max(axis=1),
            "n": 0,
            "G": _identity(k) if self.ymat is not None else None,
            "words": [],
            "k": k,
        }

    @staticmethod
    def compress(st, keep):
        st["x"] = st["x"][keep]
        st["idx"] = st["idx"][keep]
        for key in ("F", "G"):
            if st[key] is not None:
                st[key] = _take(st[key], keep)
        if st["r"] is not None:
            st["r"] = st["r"][keep]
            st["e"] = st["e"][keep]

    @staticmethod
    def residual(st):
        if st["F"] is not None:
            return _proj(st["F"], st["x"])
        return st["r"]

    @staticmethod
    def rounding(st):
        """Bound on the float error of the residual, up to a modest constant."""
        if st["F"] is None:
            return st["e"]
        F0, F1, F2, F3 = st["F"]
        x = st["x"]
        den = np.abs(F2 * x + F3)
        r = np.abs(_proj(st["F"], x))
        terms = np.abs(F0 * x) + np.abs(F1) + r * (np.abs(F2 * x) + np.abs(F3))
        cond = np.abs(F0 * F3 - F1 * F2) / den**2 * np.abs(x)
        return EPS * (st["n"] + 2) * (terms / den + cond)

    def gvalue(self, st, v, sel=slice(None)):
        if st["G"] is not None:
            return _proj(_take(st["G"], sel), v)
        idx = st["idx"][sel]
        val = np.full(len(idx), float(v))
        gs = self.s.y_side.maps
        for w in reversed(st["words"]):
            letters = w[idx]
            for i, g in enumerate(gs):
                m = letters == i
                if m.any():
                    val[m] = g(val[m])
        return val

    def corner_hits(self, r, snap):
        hit = np.full(len(r), -1)
        for c, pt, _ in self.corners:
            d = np.abs(r - pt) if r.ndim == 1 else np.linalg.norm(r - pt, axis=-1)
            hit[(d <= snap) & (hit < 0)] = c
        return hit

    def choose(self, st, r, snap):
        """Pick one admissible cell per point; return (letters, preimages)."""
        xs = self.s.x_side
        if self.gasket:
            choice = np.argmax(xs.domain.barycentric(r), axis=1)
            pre = np.empty_like(r)
            for i, m in enumerate(xs.maps):
                sel = choice == i
                if sel.any():
                    pre[sel] = m.inverse(r[sel])
            return choice, pre
        cand = np.full((len(r), xs.N), np.inf)
        for i, m in enumerate(xs.maps):
            adm = (r >= self.cell_lo[i] - snap) & (r <= self.cell_hi[i] + snap)
            if not adm.any():
                continue
            if st["F"] is not None:
                M = _mul(tuple(self.xinv[i]), _take(st["F"], adm))
                cand[adm, i] = _proj(M, st["x"][adm])
            else:
                rr = np.clip(r[adm], self.cell_lo[i], self.cell_hi[i])
                cand[adm, i] = np.clip(preimage(m, rr, xs.domain), xs.domain.lo, xs.domain.hi)
        lost = np.all(np.isinf(cand), axis=1)
        if lost.any():
            raise DomainError(f"point {r[lost][0]!r} lies in no cell")
        choice = np.argmin(cand, axis=1)
        return choice, cand[np.arange(len(r)), choice]

    def advance(self, st, choice, pre):
        st["n"] += 1
        if st["F"] is not None:
            st["F"] = _normalize(_mul(_pick(self.xinv, choice), st["F"]))
        else:
            grow = np.empty(len(pre))
            for i, m in enumerate(self.s.x_side.maps):
                sel = choice == i
                if sel.any():
                    grow[sel] = 1.0 / _min_gain(m, pre[sel])
            mag = np.abs(pre).reshape(len(pre), -1).max(axis=1)
            st["e"] = st["e"] * grow + EPS * np.maximum(1.0, mag)
            st["r"] = pre
        if st["G"] is not None:
            st["G"] = _normalize(_mul(st["G"], _pick(self.ymat, choice)))
        else:
            w = np.full(st["k"], -1)
            w[st["idx"]] = choice
            st["words"].append(w)

    def evaluate(self, x, tol, cap, snap):
        k = len(x)
        y = np.full(k, np.nan)
        err = np.full(k, np.nan)
        st = self.start(x)
        for n in range(cap + 1):
            r = self.residual(st)
            hit = self.corner_hits(r, np.minimum(snap, SNAP_FACTOR * self.rounding(st)))
            for c, _, v in self.corners:
                sel = hit == c
                if sel.any():
                    y[st["idx"][sel]] = self.gvalue(st, v, sel)
                    err[st["idx"][sel]] = 0.0
            rem = hit < 0
            if not rem.all():
                self.compress(st, rem)
                r = r[rem]
            if len(r) == 0:
                break
            a = self.gvalue(st, self.ylo)
            b = self.gvalue(st, self.yhi)
            diam = np.abs(b - a)
            fin = diam < tol
            if fin.any():
                y[st["idx"][fin]] = 0.5 * (a[fin] + b[fin])
                err[st["idx"][fin]] = 0.5 * diam[fin]
                self.compress(st, ~fin)
                r, a, b, diam = r[~fin], a[~fin], b[~fin], diam[~fin]
            if len(r) == 0:
                break
            if n == cap:
                mid = 0.5 * (a + b)
                raise DepthExceeded(
                    f"word length {cap} reached with error bound {0.5 * diam.max():.3g} > tol/2",
                    best_bound=float(0.5 * diam.max()),
                    value=mid if k > 1 else float(mid[0]),
                )
            choice, pre = self.choose(st, r, snap)
            self.advance(st, choice, pre)
        return y, err

    def code(self, x, depth, snap):
        st = self.start(x)
        word = []
        for _ in range(depth):
            choice, pre = self.choose(st, self.residual(st), snap)
            word.append(int(choice[0]))
            self.advance(st, choice, pre)
        return word, self.residual(st)


def _check_point(system, x):
    dom = system.x_side.domain
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite point")
    if isinstance(dom, Interval):
        if x.ndim != 0 and not (x.ndim == 1 and x.size == 1):
            raise DomainError("interval systems take a scalar point")
        x = x.reshape(1)
    else:
        if x.shape != (dom.dim,):
            raise DomainError(f"expected a point of shape ({dom.dim},)")
        x = x.reshape(1, dom.dim)
    if not np.all(dom.contains(x, 1e-12)):
        raise DomainError(f"point {x.ravel().tolist()} outside the domain")
    return x


def _require_evaluable(system):
    if system.report.status == INCOMPATIBLE:
        raise IncompatibleSystem(f"system {system.name!r} failed validation:\n{system.report.summary()}")


def code_point(system, x, depth, tol=1e-12, snap=SNAP):
    """Address of ``x``: a word ``w`` of length ``depth`` and the residual
    ``r`` with ``apply_word(x_side, w, r) = x``.

    Where cells touch, the cell giving the smallest preimage is chosen
    (lowest index on exact ties), so contact points continue through the
    left endpoint of the next cell.
    """
    xa = _check_point(system, x)
    word, r = system._engine.code(xa, int(depth), snap)
    r = r[0]
    back = apply_word(system.x_side, word, r)
    if np.max(np.abs(np.asarray(back) - xa[0])) > max(tol, 1e-9):
        raise NoConvergence(f"coding residual does not reproduce x within {tol}")
    return word, (float(r) if np.ndim(r) == 0 else r)


def evaluate(system, x, tol=1e-9, depth_cap=None, snap=SNAP):
    """Solution value at ``x`` as ``(y, err_bound)`` with ``err_bound <= tol``."""
    _require_evaluable(system)
    xa = _check_point(system, x)
    cap = system.depth_cap if depth_cap is None else int(depth_cap)
    y, err = system._engine.evaluate(xa, float(tol), cap, snap)
    return float(y[0]), float(err[0])


def evaluate_many(system, xs, tol=1e-9, depth_cap=None, snap=SNAP):
    """Vectorised ``evaluate`` over an array of points; returns ``(y, err)`` arrays."""
    _require_evaluable(system)
    dom = system.x_side.domain
    xs = np.asarray(xs, dtype=float)
    xs = xs.reshape(-1) if isinstance(dom, Interval) else xs.reshape(-1, dom.dim)
    if xs.size and not np.all(dom.contains(xs, 1e-12)):
        raise DomainError("some points lie outside the domain")
    cap = system.depth_cap if depth_cap is None else int(depth_cap)
    return system._engine.evaluate(xs, float(tol), cap, snap)


def evaluate_word(system, w, corner=0):
    """Exact solution value at ``f_w(fix f_corner)``, i.e. ``g_w(phi0(corner))``."""
    c = system.corner_index(corner)
    if c not in system.boundary:
        raise MissingBoundary(f"corner {c} has no boundary value")
    w = check_word(system.y_side, w)
    return float(apply_word(system.y_side, w, system.boundary[c]))


@dataclass
class GridTable:
    x: np.ndarray
    y: np.ndarray
    err: np.ndarray

    def __len__(self):
        return len(self.y)

    def header(self):
        if self.x.shape[1] == 1:
            return ["x", "y", "err_bound"]
        return [f"x{k + 1}" for k in range(self.x.shape[1])] + ["y", "err_bound"]

    def rows(self):
        return np.column_stack([self.x, self.y, self.err])

    def to_csv(self, dest=None):
        return csvio.write_csv(dest, self.header(), self.rows())

    def as_cloud(self):
        return PointCloud(np.column_stack([self.x, self.y]), space="product")


def grid_pairs(system, depth, cap=DEFAULT_CAP):
    """All pairs ``(f_w(fix f_c), g_w(phi0(c)))`` with ``|w| = depth``."""
    cs = sorted(system.boundary)
    if len(cs) * system.N ** depth > cap:
        raise BudgetExceeded(f"{len(cs)} x {system.N}^{depth} grid points exceed the cap {cap}")
    xs_all, ys_all = [], []
    for c in cs:
        X = np.atleast_2d(np.asarray(system.corner_point(c), dtype=float)).reshape(1, -1)
        Y = np.array([system.boundary[c]])
        for _ in range(depth):
            arg = X[:, 0] if X.shape[1] == 1 else X
            X = np.concatenate([np.asarray(f(arg)).reshape(len(arg), -1) for f in system.x_side.maps])
            Y = np.concatenate([np.asarray(g(Y), dtype=float) for g in system.y_side.maps])
        xs_all.append(X)
        ys_all.append(Y)
    return np.concatenate(xs_all), np.concatenate(ys_all)


def evaluate_grid(system, depth, tol=1e-9):
    """Exact values at every depth-``depth`` word endpoint, one row per
    distinct point, sorted by ``x``."""
    _require_evaluable(system)
    X, Y = grid_pairs(system, int(depth))
    keys = np.round(X / 1e-12).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = np.sort(first)
    X, Y = X[first], Y[first].copy()
    for c, v in system.boundary.items():
        at = np.all(np.abs(X - np.ravel(system.corner_point(c))) <= 1e-12, axis=1)
        Y[at] = v
    order = np.lexsort(X.T[::-1])
    return GridTable(X[order], Y[order], np.zeros(len(order)))


__all__ = [
    "SNAP", "Witness", "CompatibilityReport", "ConjugateSystem", "validate",
    "code_point", "evaluate", "evaluate_many", "evaluate_word", "evaluate_grid",
    "GridTable", "grid_pairs", "load_system", "save_system", "dedup_points",
]
