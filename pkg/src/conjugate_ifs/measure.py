"""Self-similar measures, Monte Carlo integrals and the transfer density."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import csvio
from .conjugate import evaluate_many
from .errors import DomainError, NoConvergence, NonFinite
from .ifs_core import Interval, derivative_of


def check_probability_vector(p, N=None):
    """Return ``p`` as an array after checking positivity and unit sum."""
    p = np.asarray(p, dtype=float).ravel()
    if N is not None and len(p) != N:
        raise DomainError(f"probability vector has length {len(p)}, expected {N}")
    if len(p) < 2 or np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise DomainError("probabilities must be positive")
    if abs(p.sum() - 1.0) > 1e-12:
        raise DomainError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def uniform(N):
    return np.full(N, 1.0 / N)


class WordStream:
    """I.i.d. letters with law ``p``; deterministic for a given seed."""

    def __init__(self, seed, p):
        self.seed = seed
        self.p = check_probability_vector(p)
        self._rng = np.random.default_rng(seed)

    def take(self, n):
        return self._rng.choice(len(self.p), size=int(n), p=self.p)

    def __iter__(self):
        while True:
            yield from self.take(4096).tolist()


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    points: np.ndarray
    seed: int
    p: np.ndarray
    source_ifs: str = ""
    burn_in: int = 100

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return 1 if self.points.ndim == 1 else self.points.shape[1]

    def to_csv(self, dest=None):
        if self.dim == 1:
            return csvio.write_csv(dest, ["x"], self.points.reshape(-1, 1))
        return csvio.write_csv(dest, [f"x{k + 1}" for k in range(self.dim)], self.points)


def _orbit(ifs, letters, burn_in, start):
    maps = [m.eval for m in ifs.maps]
    x = start
    out = []
    append = out.append
    for k, i in enumerate(letters.tolist()):
        x = maps[i](x)
        if k >= burn_in:
            append(x)
    return np.asarray(out, dtype=float)


def chaos_game(ifs, p=None, n=100_000, burn_in=None, seed=42, n_streams=1, threads=None):
    """Sample the self-similar measure ``mu_p`` of ``ifs`` by a random orbit.

    The orbit starts at ``fix(f_0)``; the first ``burn_in`` points (default
    ``ifs.burn_in``) are dropped. With ``n_streams > 1`` the sample is the
    concatenation of independent orbits whose seeds are spawned from
    ``seed`` by ``numpy.random.SeedSequence``; that mode is deterministic but
    differs from the single-stream sample.
    """
    p = uniform(ifs.N) if p is None else check_probability_vector(p, ifs.N)
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    burn_in = ifs.burn_in if burn_in is None else int(burn_in)
    start = ifs.maps[0].fixed_point
    if n_streams <= 1:
        letters = WordStream(seed, p).take(burn_in + n)
        pts = _orbit(ifs, letters, burn_in, start)
    else:
        children = np.random.SeedSequence(seed).spawn(n_streams)
        sizes = [n // n_streams + (k < n % n_streams) for k in range(n_streams)]

        def run(k):
            letters = WordStream(children[k], p).take(burn_in + sizes[k])
            return _orbit(ifs, letters, burn_in, start)

        with ThreadPoolExecutor(max_workers=threads) as ex:
            pts = np.concatenate(list(ex.map(run, range(n_streams))))
    return EmpiricalMeasure(pts, seed, p, ifs.name, burn_in)


def integrate(measure, fn):
    """Monte Carlo mean of ``fn`` over the sample, with its standard error."""
    pts = measure.points if isinstance(measure, EmpiricalMeasure) else np.asarray(measure)
    try:
        # non-finite values are reported below, so silence numpy's warnings
        with np.errstate(all="ignore"):
            vals = np.asarray(fn(pts), dtype=float)
        if vals.shape != (len(pts),):
            vals = np.broadcast_to(vals, (len(pts),)).astype(float) if vals.ndim == 0 else None
    except (TypeError, ValueError):
        vals = None
    if vals is None:
        vals = np.array([float(fn(x)) for x in pts])
    if not np.all(np.isfinite(vals)):
        raise NonFinite("integrand is not finite on every sample point")
    n = len(vals)
    se = float(vals.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return float(vals.mean()), se


def pushforward_check(system, p=None, n=100_000, seed=42, p_nu=None, tol=1e-9):
    """Two-sample KS statistic between ``phi`` applied to ``mu_p`` samples and
    independent ``nu`` samples. ``p_nu`` (default ``p``) sets the target
    weights, so a different vector gives a negative control."""
    if not isinstance(system.x_side.domain, Interval):
        raise DomainError("the KS comparison needs an interval system")
    p = uniform(system.N) if p is None else check_probability_vector(p, system.N)
    p_nu = p if p_nu is None else check_probability_vector(p_nu, system.N)
    s_mu, s_nu = np.random.SeedSequence(seed).spawn(2)
    mu = chaos_game(system.x_side, p, n, seed=s_mu)
    nu = chaos_game(system.y_side, p_nu, n, seed=s_nu)
    y, _ = evaluate_many(system, np.clip(mu.points, system.x_side.domain.lo, system.x_side.domain.hi), tol)
    return float(stats.ks_2samp(y, nu.points).statistic)


@dataclass
class DensityTable:
    y: np.ndarray
    H: np.ndarray
    iterations: int
    residual: float

    def __call__(self, t):
        return np.interp(t, self.y, self.H)

    def to_csv(self, dest=None):
        return csvio.write_csv(dest, ["y", "H"], np.column_stack([self.y, self.H]))


def transfer_operator(y_ifs, ygrid, H, weight_at="source"):
    """One application of the transfer operator to the tabulated density ``H``.

    ``weight_at="source"`` gives ``sum_i g_i'(y) H(g_i(y))``, the operator
    whose unit-mass fixed point is the density of the inverse solution.
    ``weight_at="image"`` evaluates the derivative at ``g_i(y)`` instead.
    """
    out = np.zeros_like(ygrid)
    for g in y_ifs.maps:
        gy = g(ygrid)
        at = ygrid if weight_at == "source" else gy
        out += derivative_of(g, at) * np.interp(gy, ygrid, H)
    return out


def transfer_density(y_ifs, grid=4096, iters=200, tol=1e-10, weight_at="source"):
    """Invariant density of the transfer operator on a uniform grid.

    Each sweep applies :func:`transfer_operator` with linear interpolation
    and renormalises to unit trapezoid mass. Stops once successive sweeps
    agree within ``tol`` in sup norm, or after ``iters`` sweeps.
    """
    if weight_at not in ("source", "image"):
        raise ValueError("weight_at must be 'source' or 'image'")
    dom = y_ifs.domain
    if not isinstance(dom, Interval) or dom.diameter == 0:
        raise DomainError("transfer density needs a non-degenerate interval")
    y = np.linspace(dom.lo, dom.hi, int(grid) + 1)
    H = np.full_like(y, 1.0 / dom.diameter)
    res = np.inf
    k = 0
    for k in range(1, int(iters) + 1):
        Hn = transfer_operator(y_ifs, y, H, weight_at)
        mass = np.trapezoid(Hn, y)
        if not np.isfinite(mass) or mass <= 0:
            raise NoConvergence("transfer iteration lost all mass")
        Hn /= mass
        res = float(np.max(np.abs(Hn - H)))
        H = Hn
        if res < tol:
            break
    if res > 1e-6:
        raise NoConvergence(f"transfer density residual {res:.3g} after {k} sweeps")
    return DensityTable(y, H, k, res)


def _check_uniform_x_side(system):
    N = system.N
    for i, m in enumerate(system.x_side.maps):
        ok = m.kind == "affine" and np.ndim(m.params["slope"]) == 0
        ok = ok and abs(m.params["slope"] - 1.0 / N) < 1e-12 and abs(m.params["offset"] - i / N) < 1e-12
        if not ok:
            raise DomainError("the dimension formula needs f_i(x) = (x + i)/N")


def fan_lau_dimension(system, grid=4096, iters=200, weight_at="source", density=None):
    """Dimension of the measure with distribution function the inverse solution.

    Computes ``sum_i int H(g_i y) g_i'(y) log(1/g_i'(y)) dy / log N`` by the
    trapezoid rule on the density grid. ``weight_at="image"`` takes the
    logarithm at ``g_i'(g_i(y))`` and uses the matching operator.
    """
    _check_uniform_x_side(system)
    if density is None:
        density = transfer_density(system.y_side, grid, iters, weight_at=weight_at)
    y = density.y
    total = 0.0
    for g in system.y_side.maps:
        gy = g(y)
        d = derivative_of(g, y)
        dlog = d if weight_at == "source" else derivative_of(g, gy)
        total += np.trapezoid(np.interp(gy, y, density.H) * d * np.log(1.0 / dlog), y)
    return float(total / np.log(system.N))


def self_similar_dimension(p, ratios):
    """Entropy over Lyapunov exponent, ``sum p log p / sum p log r``."""
    p = check_probability_vector(p)
    r = np.asarray(ratios, dtype=float)
    if r.shape != p.shape or np.any((r <= 0) | (r >= 1)):
        raise DomainError("ratios must lie in (0, 1), one per weight")
    return float(np.sum(p * np.log(p)) / np.sum(p * np.log(r)))


def delta_limit_profile(ifs, p0_values, n=100_000, seed=42, index=0):
    """Mean distance of chaos-game samples to ``fix(f_index)`` as ``p_index``
    grows, the remaining mass spread evenly over the other maps."""
    target = np.asarray(ifs.maps[index].fixed_point, dtype=float)
    out = []
    for p0 in p0_values:
        p = np.full(ifs.N, (1.0 - p0) / (ifs.N - 1))
        p[index] = p0
        p = p / p.sum()
        pts = chaos_game(ifs, p, n, seed=seed).points
        d = np.abs(pts - target) if pts.ndim == 1 else np.linalg.norm(pts - target, axis=1)
        out.append((float(p0), float(d.mean())))
    return out
