"""Sublevel-set measures, window integrals and covering machinery on R^n.

All measures are quadrature estimates over balls.  Two backends share one
interface:

* ``grid``: cell centres of a cube of side ``2r`` at spacing ``step``
  (default ``r/64``); a cell counts when its centre lies in the ball.
  Deterministic, ``stderr == 0``.
* ``monte_carlo``: uniform samples in the ball from a seeded generator.  The
  same unit-ball samples are reused for every centre and level (common random
  numbers), so ladders over ``a`` and ``lambda`` are monotone sample-wise.

``method="auto"`` picks grid for ``n <= 2`` and Monte Carlo otherwise.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy import signal
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial import cKDTree

from .potential import PotentialSpec

MC_CHUNK = 1 << 16


def ball_volume(n: int, r: float = 1.0) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r ** n


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return ball_volume(self.dim, self.radius)


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    stderr: float
    method: str
    samples: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LadderSpec:
    a0: float = 4.0
    factor: float = 2.0
    count: int = 5

    def radii(self, count: int | None = None) -> np.ndarray:
        return self.a0 * self.factor ** np.arange(count or self.count)


@dataclass(frozen=True)
class Thresholds:
    decay_ratio: float = 0.2
    slope_decay: float = -0.2
    slope_flat: float = -0.05
    flat_ratio: float = 0.8
    plateau_tol: float = 0.05


@dataclass(frozen=True)
class QuadConfig:
    method: str = "auto"
    samples: int = 100_000
    step: float | None = None
    seed: int = 0
    directions: tuple | None = None
    ladder: LadderSpec = field(default_factory=LadderSpec)
    thresholds: Thresholds = field(default_factory=Thresholds)
    max_count: int = 10
    workers: int = 1

    def resolved_method(self, n: int) -> str:
        if self.method == "auto":
            return "grid" if n <= 2 else "monte_carlo"
        if self.method not in ("grid", "monte_carlo"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        return self.method

    def with_(self, **changes) -> "QuadConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return QuadConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["directions"] = None if self.directions is None else [list(v) for v in self.directions]
        return d

    @classmethod
    def from_dict(cls, d: dict | None) -> "QuadConfig":
        d = dict(d or {})
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown quadrature fields: {sorted(unknown)}")
        if "ladder" in d:
            d["ladder"] = LadderSpec(**d["ladder"])
        if "thresholds" in d:
            d["thresholds"] = Thresholds(**d["thresholds"])
        if d.get("directions") is not None:
            d["directions"] = tuple(tuple(float(x) for x in v) for v in d["directions"])
        return cls(**d)


# --- sample generation ---------------------------------------------------------

def _chunk_samples(n, size, seed_seq):
    rng = np.random.default_rng(seed_seq)
    g = rng.standard_normal((size, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random((size, 1)) ** (1.0 / n)


@lru_cache(maxsize=8)
def unit_ball_samples(n: int, samples: int, seed: int, workers: int = 1) -> np.ndarray:
    """Uniform samples in the unit ball.

    The budget is cut into fixed chunks, each with its own spawned seed, so the
    output does not depend on ``workers``.
    """
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seqs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda j: _chunk_samples(n, *j), jobs))
    else:
        parts = [_chunk_samples(n, *j) for j in jobs]
    out = np.concatenate(parts)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def unit_ball_cells(n: int, cells_per_radius: int) -> np.ndarray:
    """Cell centres (unit radius) whose centre lies in the closed unit ball."""
    m = cells_per_radius
    c = (np.arange(2 * m) + 0.5) / m - 1.0
    pts = np.stack(np.meshgrid(*([c] * n), indexing="ij"), -1).reshape(-1, n)
    pts = pts[np.einsum("ij,ij->i", pts, pts) <= 1.0]
    pts.setflags(write=False)
    return pts


def _ball_quadrature(n, radius, cfg):
    """(unit offsets, weight per point, method, number of points)."""
    method = cfg.resolved_method(n)
    if method == "grid":
        step = cfg.step if cfg.step is not None else radius / 64
        m = max(1, int(round(radius / step)))
        offs = unit_ball_cells(n, m)
        return offs, (1.0 / m) ** n * radius ** n, method, len(offs)
    offs = unit_ball_samples(n, int(cfg.samples), int(cfg.seed), int(cfg.workers))
    return offs, ball_volume(n, radius) / len(offs), method, len(offs)


def _ball_points(V_dim, a, radius, cfg):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.shape != (V_dim,):
        raise ValueError(f"centre has dimension {a.size}, expected {V_dim}")
    offs, w, method, count = _ball_quadrature(V_dim, radius, cfg)
    return a + radius * offs, w, method, count


def _estimate(f, w, method, count, n, radius):
    """Integral of sampled values ``f`` over the ball."""
    value = float(f.sum() * w)
    if method == "grid":
        return MeasureEstimate(value, 0.0, method, count)
    vol = ball_volume(n, radius)
    std = float(np.std(f, ddof=1)) if count > 1 else 0.0
    return MeasureEstimate(value, vol * std / math.sqrt(count), method, count)


def _binomial_estimate(ind, w, method, count, n, radius):
    value = float(ind.sum() * w)
    if method == "grid":
        return MeasureEstimate(value, 0.0, method, count)
    vol = ball_volume(n, radius)
    p = ind.mean()
    return MeasureEstimate(value, vol * math.sqrt(p * (1 - p) / count), method, count)


# --- sublevel measures and window integrals ---------------------------------------

def omega_lambda(V: PotentialSpec, a, lam: float, cfg: QuadConfig | None = None,
                 radius: float = 1.0) -> MeasureEstimate:
    """|{x in B_a(radius) : V(x) < lam}|."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return omega_levels(V, a, [lam], cfg, radius)[0]


def omega_levels(V: PotentialSpec, a, lams, cfg: QuadConfig | None = None,
                 radius: float = 1.0) -> list[MeasureEstimate]:
    """Sublevel measures at several levels from one evaluation of V."""
    cfg = cfg or QuadConfig()
    pts, w, method, count = _ball_points(V.dim, a, radius, cfg)
    v = V(pts)
    return [_binomial_estimate(v < lam, w, method, count, V.dim, radius) for lam in lams]


def weak_vanishing_integral(V: PotentialSpec, a, cfg: QuadConfig | None = None,
                            radius: float = 1.0) -> MeasureEstimate:
    """Integral of 1/(1+V+) over B_a(radius), using the exact (unclamped) V+."""
    cfg = cfg or QuadConfig()
    pts, w, method, count = _ball_points(V.dim, a, radius, cfg)
    f = 1.0 / (1.0 + np.maximum(V(pts), 0.0))
    return _estimate(f, w, method, count, V.dim, radius)


def window_integral(phi: PotentialSpec, a, W: Ball, cfg: QuadConfig | None = None) -> MeasureEstimate:
    """Integral of phi over the window a + W."""
    cfg = cfg or QuadConfig()
    pts, w, method, count = _ball_points(phi.dim, np.asarray(a, float) + W.center, W.radius, cfg)
    return _estimate(phi(pts), w, method, count, phi.dim, W.radius)


def superlevel_measure(phi: PotentialSpec, a, lam: float, W: Ball,
                       cfg: QuadConfig | None = None) -> MeasureEstimate:
    """|(a + W) ∩ {phi > lam}|."""
    cfg = cfg or QuadConfig()
    pts, w, method, count = _ball_points(phi.dim, np.asarray(a, float) + W.center, W.radius, cfg)
    return _binomial_estimate(phi(pts) > lam, w, method, count, phi.dim, W.radius)


# --- decay verdicts -------------------------------------------------------------

@dataclass
class DecayVerdict:
    radii: list
    values: list
    verdict: str
    loglog_slope: float
    reason: str = ""
    stderrs: list | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def loglog_slope(radii, values) -> float:
    """Least-squares slope of log(value) against log(radius).

    Zeros are floored at 1e-12 times the largest value so that eventually
    vanishing ladders get a steep negative slope rather than a NaN.
    """
    r = np.asarray(radii, float)
    v = np.asarray(values, float)
    top = v.max()
    if top <= 0:
        return 0.0
    v = np.maximum(v, 1e-12 * top)
    return float(np.polyfit(np.log(r), np.log(v), 1)[0])


def decay_test(radii, values, thresholds: Thresholds | None = None, stderrs=None) -> DecayVerdict:
    """Finite-ladder surrogate for ``lim value(a) = 0``.

    Rules, in order:

    1. all values zero: ``decaying`` (vacuous).
    2. the running minimum stalls at a positive level over the final half of
       the ladder (drops by less than ``plateau_tol``): ``not_decaying``.
    3. ``last < decay_ratio * first`` and slope ``< slope_decay``: ``decaying``.
    4. slope ``> slope_flat`` and ``last > flat_ratio * first``: ``not_decaying``.
    5. otherwise ``inconclusive``.
    """
    t = thresholds or Thresholds()
    r = np.asarray(radii, float)
    v = np.asarray(values, float)
    if r.shape != v.shape:
        raise ValueError("radii and values differ in length")
    if r.size < 4:
        raise ValueError("decay_test needs at least 4 ladder points")
    if np.any(np.diff(r) <= 0):
        raise ValueError("radii must be strictly increasing")
    if np.any(v < 0):
        raise ValueError("values must be nonnegative")
    se = None if stderrs is None else [float(s) for s in stderrs]
    out = dict(radii=r.tolist(), values=v.tolist(), stderrs=se)
    if not np.any(v > 0):
        return DecayVerdict(**out, verdict="decaying", loglog_slope=0.0, reason="identically zero")
    slope = loglog_slope(r, v)
    run_min = np.minimum.accumulate(v)
    start = v.size - math.ceil(v.size / 2)
    if run_min[-1] > 0 and run_min[-1] >= (1 - t.plateau_tol) * run_min[start]:
        return DecayVerdict(**out, verdict="not_decaying", loglog_slope=slope,
                            reason="running minimum plateaus at a positive level")
    if v[-1] < t.decay_ratio * v[0] and slope < t.slope_decay:
        return DecayVerdict(**out, verdict="decaying", loglog_slope=slope, reason="ratio and slope")
    if slope > t.slope_flat and v[-1] > t.flat_ratio * v[0]:
        return DecayVerdict(**out, verdict="not_decaying", loglog_slope=slope, reason="flat")
    return DecayVerdict(**out, verdict="inconclusive", loglog_slope=slope, reason="between thresholds")


def default_directions(n: int) -> list[np.ndarray]:
    """Coordinate axes and diagonals: all nonzero vectors of {-1,0,1}^n, normalised."""
    dirs = []
    for v in itertools.product((-1, 0, 1), repeat=n):
        if any(v):
            v = np.asarray(v, float)
            dirs.append(v / np.linalg.norm(v))
    return dirs


def directions_for(n: int, cfg: QuadConfig) -> list[np.ndarray]:
    if cfg.directions is None:
        return default_directions(n)
    out = []
    for d in cfg.directions:
        d = np.asarray(d, float)
        if d.shape != (n,) or not np.linalg.norm(d) > 0:
            raise ValueError(f"bad direction {d.tolist()} for dimension {n}")
        out.append(d / np.linalg.norm(d))
    return out


def ladder_verdict(quantity, V: PotentialSpec, direction, cfg: QuadConfig | None = None,
                   extend: bool = True) -> DecayVerdict:
    """Decay verdict of ``quantity(V, a, cfg)`` along ``a = radius * direction``.

    An ``inconclusive`` ladder is extended by one more rung at a time, up to
    ``cfg.max_count`` rungs.
    """
    cfg = cfg or QuadConfig()
    d = np.asarray(direction, float)
    count = cfg.ladder.count
    cache = {}
    while True:
        radii = cfg.ladder.radii(count)
        ests = []
        for r in radii:
            if r not in cache:
                cache[r] = quantity(V, r * d, cfg)
            ests.append(cache[r])
        verdict = decay_test(radii, [e.value for e in ests], cfg.thresholds,
                             [e.stderr for e in ests])
        if verdict.verdict != "inconclusive" or not extend or count >= cfg.max_count:
            return verdict
        count += 1


def omega_ladder(V: PotentialSpec, lam: float, direction, cfg: QuadConfig | None = None,
                 extend: bool = True) -> DecayVerdict:
    return ladder_verdict(lambda V_, a, c: omega_lambda(V_, a, lam, c), V, direction, cfg, extend)


def weak_ladder(V: PotentialSpec, direction, cfg: QuadConfig | None = None,
                extend: bool = True) -> DecayVerdict:
    return ladder_verdict(weak_vanishing_integral, V, direction, cfg, extend)


@dataclass
class BallSample:
    """V sampled once on the quadrature points of one ball, for reuse across levels."""

    values: np.ndarray
    weight: float
    method: str
    count: int
    dim: int
    radius: float

    def sublevel(self, lam: float) -> MeasureEstimate:
        return _binomial_estimate(self.values < lam, self.weight, self.method, self.count,
                                  self.dim, self.radius)

    def weak(self) -> MeasureEstimate:
        f = 1.0 / (1.0 + np.maximum(self.values, 0.0))
        return _estimate(f, self.weight, self.method, self.count, self.dim, self.radius)


def ball_sample(V: PotentialSpec, a, cfg: QuadConfig | None = None, radius: float = 1.0) -> BallSample:
    cfg = cfg or QuadConfig()
    pts, w, method, count = _ball_points(V.dim, a, radius, cfg)
    return BallSample(V(pts), w, method, count, V.dim, radius)


def direction_ladders(V: PotentialSpec, direction, lams, cfg: QuadConfig | None = None,
                      weak: bool = True) -> tuple[dict, DecayVerdict | None]:
    """omega_lam ladders for every level plus the 1/(1+V+) ladder along one ray.

    Each ball is sampled once and shared; inconclusive ladders are extended one
    rung at a time as in :func:`ladder_verdict`.
    """
    cfg = cfg or QuadConfig()
    d = np.asarray(direction, float)
    cache = {}

    def at(i):
        if i not in cache:
            cache[i] = ball_sample(V, cfg.ladder.radii(i + 1)[-1] * d, cfg)
        return cache[i]

    def run(extract):
        count = cfg.ladder.count
        while True:
            radii = cfg.ladder.radii(count)
            ests = [extract(at(i)) for i in range(count)]
            v = decay_test(radii, [e.value for e in ests], cfg.thresholds, [e.stderr for e in ests])
            if v.verdict != "inconclusive" or count >= cfg.max_count:
                return v
            count += 1

    out = {float(lam): run(lambda b, lam=lam: b.sublevel(lam)) for lam in lams}
    return out, (run(BallSample.weak) if weak else None)


# --- p-integrals of omega --------------------------------------------------------

def _kernel(n, m):
    c = np.arange(-m, m + 1) / m
    grids = np.meshgrid(*([c] * n), indexing="ij")
    return (sum(g * g for g in grids) <= 1.0 + 1e-12).astype(float)


def omega_field(mask: np.ndarray, step: float) -> np.ndarray:
    """omega(x) = |B_x(1) ∩ Omega| at every cell of a boolean grid ``mask``.

    ``Omega`` is the union of cells flagged in ``mask``; the unit radius must be
    a whole number of cells.  Cells outside the array count as outside Omega.
    """
    m = int(round(1.0 / step))
    if not math.isclose(m * step, 1.0, rel_tol=1e-9):
        raise ValueError("1/step must be an integer")
    n = mask.ndim
    vol = step ** n
    if n == 1:
        cs = np.concatenate([[0], np.cumsum(mask.astype(np.int64))])
        idx = np.arange(mask.size)
        hi = np.minimum(idx + m + 1, mask.size)
        lo = np.maximum(idx - m, 0)
        return (cs[hi] - cs[lo]) * vol
    counts = signal.fftconvolve(mask.astype(float), _kernel(n, m), mode="same")
    return np.rint(counts) * vol


@dataclass
class OmegaPLadder:
    radii: list
    values: list
    verdict: str  # converges | diverges | inconclusive
    growth_exponent: float
    method: str

    def to_dict(self) -> dict:
        return asdict(self)


def _grid_axes(R, step, n):
    m = int(math.ceil((R + 1.0) / step))
    c = (np.arange(-m, m) + 0.5) * step
    return [c] * n


def omega_p_values(V: PotentialSpec, lam: float, p: float, radii, cfg: QuadConfig | None = None):
    """Truncated integrals of omega_lam^p over Omega_lam ∩ B_0(R) for each R.

    Exact at grid resolution in n <= 2 (omega from a convolution of the sublevel
    indicator with the unit-ball kernel); n >= 3 interpolates omega from a
    coarse node grid and integrates by Monte Carlo.
    """
    cfg = cfg or QuadConfig()
    if not p > 0:
        raise ValueError("p must be positive")
    radii = np.asarray(radii, float)
    if np.any(radii <= 1):
        raise ValueError("truncation radius must exceed 1")
    n = V.dim
    R = float(radii.max())
    if cfg.resolved_method(n) == "grid" and n <= 2:
        step = cfg.step if cfg.step is not None else 1.0 / 64
        axes = _grid_axes(R, step, n)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], -1)
        inside = (V(pts) < lam).reshape(mesh[0].shape)
        om = omega_field(inside, step)
        r2 = sum(g * g for g in mesh)
        vol = step ** n
        vals = [float((om[inside & (r2 <= Rk * Rk)] ** p).sum() * vol) for Rk in radii]
        count = int(inside.size)
        return [MeasureEstimate(x, 0.0, "grid", count) for x in vals]
    node = 0.5
    axes = [np.arange(-R - node, R + 2 * node, node)] * n
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
    small = cfg.with_(method="monte_carlo", samples=min(cfg.samples, 2000))
    om_nodes = np.array([omega_lambda(V, x, lam, small).value for x in mesh])
    interp = RegularGridInterpolator(axes, om_nodes.reshape([len(a) for a in axes]))
    x = R * unit_ball_samples(n, int(cfg.samples), int(cfg.seed) + 1)
    f = np.where(V(x) < lam, np.clip(interp(x), 0, None) ** p, 0.0)
    out = []
    for Rk in radii:
        g = f * (np.linalg.norm(x, axis=1) <= Rk)
        vol = ball_volume(n, R)
        out.append(MeasureEstimate(float(vol * g.mean()),
                                   float(vol * g.std(ddof=1) / math.sqrt(len(g))),
                                   "monte_carlo", len(g)))
    return out


def omega_p_integral(V: PotentialSpec, lam: float, p: float, truncation_radius: float,
                     cfg: QuadConfig | None = None) -> MeasureEstimate:
    return omega_p_values(V, lam, p, [truncation_radius], cfg)[0]


def omega_p_ladder(V: PotentialSpec, lam: float, p: float, radii, cfg: QuadConfig | None = None,
                   cauchy_tol: float = 1e-2) -> OmegaPLadder:
    """Convergence verdict for the truncation ladder of the omega^p integral.

    ``converges`` when the last two truncations agree to ``cauchy_tol``
    (relative); ``diverges`` when the fitted growth exponent over the second
    half of the ladder is at least 0.5.
    """
    ests = omega_p_values(V, lam, p, radii, cfg)
    vals = np.array([e.value for e in ests])
    r = np.asarray(radii, float)
    half = r.size // 2
    pos = vals[half:] > 0
    if pos.sum() >= 2:
        growth = float(np.polyfit(np.log(r[half:][pos]), np.log(vals[half:][pos]), 1)[0])
    else:
        growth = 0.0
    if vals[-1] == 0 or abs(vals[-1] - vals[-2]) <= cauchy_tol * abs(vals[-1]):
        verdict = "converges"
    elif growth >= 0.5:
        verdict = "diverges"
    else:
        verdict = "inconclusive"
    return OmegaPLadder(r.tolist(), vals.tolist(), verdict, growth, ests[0].method)


# --- covering machinery ---------------------------------------------------------

def covering_lower_bound(omega_a: float, nu: int, p: float) -> float:
    """Lower bound (omega(a)/nu)^(p+1) for the integral of omega^p over Omega(|a|-1).

    The printed form ``[nu*omega(a)]^(p+1)`` does not follow from the covering
    argument; this is the bound the argument actually yields.
    """
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if omega_a < 0:
        raise ValueError("omega_a must be nonnegative")
    return (omega_a / nu) ** (p + 1)


def verify_covering(centers, small_radius: float, target: Ball, grid_step: float,
                    margin: float = 0.0) -> bool:
    """True iff every grid sample of ``target`` lies in some ball B(center, small_radius).

    Samples are the points of the lattice ``grid_step * Z^n`` (shifted to the
    target centre) inside the closed target ball.  With ``margin > 0`` each
    sample must be covered with that much room to spare.
    """
    C = np.atleast_2d(np.asarray(centers, float))
    if C.size == 0:
        raise ValueError("empty center list")
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    n = target.dim
    if C.shape[1] != n:
        raise ValueError("center dimension does not match target")
    tree = cKDTree(C)
    c0 = np.asarray(target.center)
    m = int(math.floor(target.radius / grid_step + 1e-9))
    ticks = np.arange(-m, m + 1) * grid_step
    limit = small_radius - margin + 1e-12
    rest = np.stack(np.meshgrid(*([ticks] * (n - 1)), indexing="ij"), -1).reshape(-1, n - 1) \
        if n > 1 else np.zeros((1, 0))
    rest2 = np.einsum("ij,ij->i", rest, rest)
    R2 = target.radius ** 2 * (1 + 1e-12)
    for t in ticks:
        keep = rest2 + t * t <= R2
        if not keep.any():
            continue
        pts = np.column_stack([np.full(keep.sum(), t), rest[keep]]) + c0
        d, _ = tree.query(pts, distance_upper_bound=limit + 1e-9)
        if np.any(d > limit):
            return False
    return True


def hexagonal_covering() -> np.ndarray:
    ang = np.arange(6) * np.pi / 3
    ring = math.sqrt(3) / 2 * np.column_stack([np.cos(ang), np.sin(ang)])
    return np.vstack([[0.0, 0.0], ring])


def _shipped_covering_3d() -> np.ndarray:
    from .data import COVERING_3D
    return np.asarray(COVERING_3D, float)


COVERING_STEPS = {1: 1e-3, 2: 1e-3, 3: 2e-2}


@lru_cache(maxsize=None)
def certified_covering(n: int) -> tuple[np.ndarray, int]:
    """Centres of radius-1/2 balls covering the unit ball, certified on a grid.

    Raises ``RuntimeError`` when the shipped configuration fails certification.
    """
    if n == 1:
        C = np.array([[-0.5], [0.5]])
    elif n == 2:
        C = hexagonal_covering()
    elif n == 3:
        C = _shipped_covering_3d()
    else:
        raise ValueError("coverings ship for n = 1, 2, 3 only")
    if not verify_covering(C, 0.5, Ball(np.zeros(n)), COVERING_STEPS[n]):
        raise RuntimeError(f"shipped covering for n={n} failed certification")
    C.setflags(write=False)
    return C, len(C)


@dataclass
class Lemma5Check:
    omega_a: float
    nu: int
    p: float
    R: float
    bound: float
    integral: float

    @property
    def ok(self) -> bool:
        return self.bound <= self.integral * (1 + 1e-12) + 1e-15


def lemma5_check(mask: np.ndarray, step: float, a, p: float = 1.0,
                 nu: int | None = None) -> Lemma5Check:
    """Compare (omega(a)/nu)^(p+1) with the integral of omega^p over Omega(|a|-1).

    ``mask`` is a boolean cell grid centred on the origin: cell index ``i``
    along an axis has centre ``(i - size/2 + 1/2) * step``.
    """
    n = mask.ndim
    a = np.atleast_1d(np.asarray(a, float))
    R = float(np.linalg.norm(a)) - 1.0
    if R < 0:
        raise ValueError("|a| must be at least 1")
    if nu is None:
        nu = certified_covering(n)[1]
    axes = [(np.arange(s) - s / 2 + 0.5) * step for s in mask.shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    om = omega_field(mask, step)
    r2 = sum(g * g for g in mesh)
    d2 = sum((g - ai) ** 2 for g, ai in zip(mesh, a))
    vol = step ** n
    omega_a = float(np.count_nonzero(mask & (d2 <= 1.0 + 1e-12)) * vol)
    integral = float((om[mask & (r2 >= R * R)] ** p).sum() * vol)
    return Lemma5Check(omega_a, nu, p, R, covering_lower_bound(omega_a, nu, p), integral)


# --- Lemma 3 sandwich -----------------------------------------------------------

@dataclass
class SandwichResult:
    ok: bool
    lower: float
    middle: float
    upper: float
    tol: float


def wv_sandwich_check(phi: PotentialSpec, a, lam: float, W: Ball,
                      cfg: QuadConfig | None = None, phi_sup: float | None = None) -> SandwichResult:
    """Check lam*|W_a ∩ {phi>lam}| <= ∫_{W_a} phi <= sup(phi)*|W_a ∩ {phi>lam}| + lam*|W|.

    Both sides come from the same sample set; the tolerance is three combined
    standard errors.  ``phi_sup`` defaults to the sample maximum.
    """
    cfg = cfg or QuadConfig()
    centre = np.asarray(a, float) + np.asarray(W.center)
    pts, w, method, count = _ball_points(phi.dim, centre, W.radius, cfg)
    f = phi(pts)
    if np.any(f < 0):
        raise ValueError("phi must be nonnegative")
    sup = float(f.max()) if phi_sup is None else float(phi_sup)
    meas = _binomial_estimate(f > lam, w, method, count, phi.dim, W.radius)
    integ = _estimate(f, w, method, count, phi.dim, W.radius)
    lower = lam * meas.value
    upper = sup * meas.value + lam * W.volume
    tol = 3.0 * math.hypot(lam * meas.stderr + sup * meas.stderr, integ.stderr) + 1e-12
    ok = lower <= integ.value + tol and integ.value <= upper + tol
    return SandwichResult(ok, lower, integ.value, upper, tol)
