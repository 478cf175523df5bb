"""Hoelder thresholds, local exponent probes and dimension estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import csvio
from .conjugate import evaluate_many
from .errors import DegenerateFit, DepthExceeded, DomainError, EmptyCloud, NonFinite
from .ifs_core import Interval, PointCloud, apply_word, derivative_of
from .measure import WordStream, chaos_game, check_probability_vector, integrate, self_similar_dimension, uniform


@dataclass
class HolderThresholds:
    alpha_star: float
    beta_star: float
    stderr_alpha: float
    stderr_beta: float

    @property
    def consistent(self):
        return self.alpha_star <= self.beta_star + 2 * (self.stderr_alpha + self.stderr_beta)


def _norms(m, pts):
    """Operator norm of ``Dm`` and of its inverse at each sample point."""
    D = np.asarray(derivative_of(m, pts), dtype=float)
    n = len(pts)
    if pts.ndim == 1:
        a = np.abs(np.broadcast_to(D, (n,)))
        with np.errstate(divide="ignore"):
            return a, 1.0 / a
    if D.ndim == 2:
        sv = np.linalg.svd(D, compute_uv=False)
        hi, lo = np.full(n, sv[0]), np.full(n, sv[-1])
    else:
        sv = np.linalg.svd(D, compute_uv=False)
        hi, lo = sv[:, 0], sv[:, -1]
    with np.errstate(divide="ignore"):
        return hi, 1.0 / lo


def _weighted_log(ifs, p, pts, which):
    """Per-sample ``sum_i p_i log(...)`` for the four integrands."""
    total = np.zeros(len(pts))
    with np.errstate(divide="ignore"):
        for pi, m in zip(p, ifs.maps):
            norm, inv_norm = _norms(m, pts)
            if which == "log_inv_norm":
                total += pi * np.log(inv_norm)
            elif which == "log_recip_norm":
                total += pi * np.log(1.0 / norm)
            else:
                raise ValueError(which)
    return total


def _ratio(num, den):
    (a, sa), (b, sb) = num, den
    if b == 0:
        raise NonFinite("threshold denominator vanishes")
    r = a / b
    # delta method for a ratio of independent means
    rel = math.hypot(sa / a if a else 0.0, sb / b)
    return r, abs(r) * rel


def holder_thresholds(system, p=None, n_samples=100_000, seed=42, nu_from="game", tol=1e-9):
    """Monte Carlo estimates of the two Hoelder thresholds.

    ``alpha_star = sum p_i E_nu[log 1/|Dg_i|] / sum p_i E_mu[log |Df_i^-1|]`` and
    ``beta_star`` uses ``|Dg_i^-1|`` and ``|Df_i|`` instead. ``mu`` is sampled
    by the chaos game on the x side; ``nu`` either by the game on the y side
    (``nu_from="game"``) or as the image of the ``mu`` sample under the
    solution (``nu_from="pushforward"``).
    """
    p = uniform(system.N) if p is None else check_probability_vector(p, system.N)
    s_mu, s_nu = np.random.SeedSequence(seed).spawn(2)
    mu = chaos_game(system.x_side, p, n_samples, seed=s_mu)
    if nu_from == "game":
        nu = chaos_game(system.y_side, p, n_samples, seed=s_nu).points
    elif nu_from == "pushforward":
        nu, _ = evaluate_many(system, mu.points, tol)
    else:
        raise ValueError("nu_from must be 'game' or 'pushforward'")
    xs, ys = system.x_side, system.y_side
    a_num = integrate(nu, lambda y: _weighted_log(ys, p, y, "log_recip_norm"))
    a_den = integrate(mu, lambda x: _weighted_log(xs, p, x, "log_inv_norm"))
    b_num = integrate(nu, lambda y: _weighted_log(ys, p, y, "log_inv_norm"))
    b_den = integrate(mu, lambda x: _weighted_log(xs, p, x, "log_recip_norm"))
    alpha, sa = _ratio(a_num, a_den)
    beta, sb = _ratio(b_num, b_den)
    return HolderThresholds(alpha, beta, sa, sb)


@dataclass
class ExponentTrace:
    depths: np.ndarray
    log_F: np.ndarray
    log_G: np.ndarray
    word: tuple = ()

    @property
    def ratios(self):
        return self.log_G / self.log_F

    @property
    def final_ratio(self):
        return float(self.ratios[-1])

    def to_csv(self, dest=None):
        return csvio.write_csv(dest, ["n", "logF", "logG", "ratio"],
                               np.column_stack([self.depths, self.log_F, self.log_G, self.ratios]))


def _log_gaps_projective(mats, word, a, b):
    """``log |h_w(a) - h_w(b)|`` for every prefix of ``word``, with ``h`` given by
    2x2 matrices; stays finite far below the float range."""
    M = np.eye(2)
    log_det = 0.0
    out = []
    for i in word:
        A = mats[i]
        M = M @ A
        log_det += math.log(abs(np.linalg.det(A)))
        s = np.max(np.abs(M))
        e = math.frexp(s)[1]
        M = np.ldexp(M, -e)
        log_det -= 2 * e * math.log(2.0)
        c, d = M[1]
        out.append(log_det + math.log(abs(a - b)) - math.log(abs(c * a + d)) - math.log(abs(c * b + d)))
    return np.array(out)


def _log_gaps_direct(ifs, word, a, b):
    out = []
    for n in range(1, len(word) + 1):
        w = word[:n]
        gap = np.linalg.norm(np.atleast_1d(apply_word(ifs, w, a) - apply_word(ifs, w, b)))
        if gap == 0:
            raise DepthExceeded(f"cell diameter underflowed at depth {n}", best_bound=0.0)
        out.append(math.log(gap))
    return np.array(out)


def _log_gaps(ifs, word, a, b):
    mats = [m.matrix for m in ifs.maps]
    if isinstance(ifs.domain, Interval) and all(M is not None for M in mats):
        return _log_gaps_projective(mats, word, float(a), float(b))
    return _log_gaps_direct(ifs, word, a, b)


def local_exponent_probe(system, seed=42, depth=30, p=None, word=None):
    """Ratio ``log G_n / log F_n`` along one coding sequence.

    ``F_n`` is the distance between the images of ``fix(f_0)`` and
    ``fix(f_{N-1})`` under the first ``n`` letters, and ``G_n`` the same
    quantity on the y side using the boundary values. Letters come from a
    word stream with law ``p`` unless ``word`` is given.
    """
    N = system.N
    if word is None:
        p = uniform(N) if p is None else check_probability_vector(p, N)
        word = tuple(int(i) for i in WordStream(seed, p).take(depth))
    else:
        word = tuple(int(i) for i in word)[:depth] if depth else tuple(int(i) for i in word)
    if any(not 0 <= i < N for i in word):
        raise DomainError("word letters out of range")
    a_x, b_x = system.corner_point(0), system.corner_point(N - 1)
    if 0 not in system.boundary or N - 1 not in system.boundary:
        raise DomainError("probe needs boundary values at the extreme corners")
    a_y, b_y = system.boundary[0], system.boundary[N - 1]
    log_F = _log_gaps(system.x_side, word, a_x, b_x)
    log_G = _log_gaps(system.y_side, word, a_y, b_y)
    return ExponentTrace(np.arange(1, len(word) + 1), log_F, log_G, word)


def _similitude_ratios(ifs):
    ratios = []
    for m in ifs.maps:
        if m.kind != "affine":
            raise DomainError("dimension ratios need similitudes")
        s = np.asarray(m.params["slope"], dtype=float)
        if s.ndim == 0:
            ratios.append(abs(float(s)))
            continue
        sv = np.linalg.svd(s, compute_uv=False)
        if not np.allclose(sv, sv[0], rtol=1e-12):
            raise DomainError("dimension ratios need similitudes")
        ratios.append(float(sv[0]))
    return ratios


def dimension_ratio_threshold(system, p=None):
    """Ratio of the self-similar dimensions of ``mu_p`` and ``nu_p``."""
    p = uniform(system.N) if p is None else check_probability_vector(p, system.N)
    return self_similar_dimension(p, _similitude_ratios(system.x_side)) / self_similar_dimension(
        p, _similitude_ratios(system.y_side))


def fixed_point_exponent(system, i):
    """``log(1/|g_i'(fix g_i)|) / log(1/|f_i'(fix f_i)|)`` for 1-D maps."""
    f, g = system.x_side.maps[i], system.y_side.maps[i]
    df = abs(float(derivative_of(f, f.fixed_point)))
    dg = abs(float(derivative_of(g, g.fixed_point)))
    if not 0.0 < df < 1.0 or abs(df - 1.0) < 1e-12:
        raise DomainError(f"|f_{i}'| at its fixed point is {df}, need a value in (0, 1)")
    if dg == 0.0:
        raise DomainError(f"g_{i}' vanishes at its fixed point")
    return math.log(1.0 / dg) / math.log(1.0 / df)


def box_counting_dimension(cloud, scales):
    """Least-squares slope of ``log N(s)`` against ``log(1/s)``.

    Boxes are anchored at the origin (``floor(x / s)``). Returns the slope and
    the RMS residual of the fit.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if len(pts) == 0:
        raise EmptyCloud("box counting on an empty cloud")
    scales = np.asarray(sorted(float(s) for s in scales))
    if len(scales) < 2 or np.any(scales <= 0):
        raise DomainError("need at least two positive scales")
    if len(np.unique(pts, axis=0)) == 1:
        return 0.0, 0.0
    counts = np.array([len(np.unique(np.floor(pts / s).astype(np.int64), axis=0)) for s in scales])
    if np.all(counts == counts[0]):
        raise DegenerateFit("all box counts are equal; choose smaller scales")
    x, y = np.log(1.0 / scales), np.log(counts)
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return float(slope), resid
