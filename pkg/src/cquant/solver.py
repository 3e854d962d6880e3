"""Multi-start numerical search for optimal constrained codebooks.

Codebooks are parametrized by their constraint-curve parameters, which turns
the constrained problem into a box-constrained one.  Local descent is
coordinate-wise damped Newton on central-difference derivatives; multi-start
combines an equal-mass seeding heuristic with stratified random draws.
Derivatives of the objective ignore breakpoint motion (the boundary terms
cancel because breakpoints are equidistant from both owners); the analytic
per-cell gradient is exposed for verification against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .distortion import Codebook, SupportFrame, build_partition, distortion
from .geometry import (
    TWO_PI,
    CircleArc,
    Curve,
    Segment,
    UniformMeasure,
    param_range,
    point_at,
)


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 16
    max_iters: int = 500
    tol: float = 1e-12          # stop when a sweep decreases the objective by less
    fd_step: float = 1e-6       # finite-difference step (scaled by window width)
    merge_tol: float = 1e-7     # parameter distance for merging coincident points
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if min(self.tol, self.fd_step, self.merge_tol) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class SolveResult:
    codebook: Codebook
    value: float
    n: int
    effective_n: int
    starts_converged: int
    per_start: tuple[float, ...]
    seed: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "effective_n": self.effective_n,
            "params": list(self.codebook.params),
            "points": [list(p) for p in self.codebook.points],
            "value": self.value,
            "seed": self.seed,
        }


class _ConstraintMap:
    """Vectorized parameter -> point map of a constraint curve."""

    def __init__(self, constraint: Curve):
        self.constraint = constraint
        if isinstance(constraint, Segment):
            self.kind = "segment"
            self.p0 = np.array(constraint.start, dtype=float)
            self.vec = np.array(constraint.direction, dtype=float)
        else:
            self.kind = "circle"
            self.center = np.array(constraint.center, dtype=float)
            self.radius = constraint.radius

    def points(self, params: np.ndarray) -> np.ndarray:
        if self.kind == "segment":
            return self.p0[None, :] + params[:, None] * self.vec[None, :]
        return self.center[None, :] + self.radius * np.stack(
            [np.cos(params), np.sin(params)], axis=1
        )

    def velocity(self, t: float) -> tuple[float, float]:
        if self.kind == "segment":
            return (self.vec[0], self.vec[1])
        return (-self.radius * math.sin(t), self.radius * math.cos(t))

    def nearest_param(self, point, window) -> float:
        lo, hi = window
        if self.kind == "segment":
            rel = np.asarray(point, dtype=float) - self.p0
            t = float(rel @ self.vec) / float(self.vec @ self.vec)
            return min(max(t, lo), hi)
        dx = point[0] - self.center[0]
        dy = point[1] - self.center[1]
        if dx * dx + dy * dy < 1e-30:
            return 0.5 * (lo + hi)
        ang = math.atan2(dy, dx)
        t = lo + math.fmod(ang - lo, TWO_PI)
        if t < lo:
            t += TWO_PI
        if t <= hi:
            return t
        # outside the window: clamp to the angularly nearer end
        return hi if t - hi <= lo + TWO_PI - t else lo


class Objective:
    """Distortion as a function of the sorted constraint parameters."""

    def __init__(self, measure: UniformMeasure, constraint: Curve):
        self.measure = measure
        self.frame = SupportFrame(measure)
        self.cmap = _ConstraintMap(constraint)

    def value(self, params: np.ndarray) -> float:
        return self.frame.value(self.cmap.points(params))

    def cells(self, params: np.ndarray):
        return self.frame.cells(self.cmap.points(params))


def _equal_mass_params(obj: Objective, window, n: int) -> np.ndarray:
    """Place parameters so their projections hit the support's mass midpoints."""
    support = obj.measure.support
    lo, hi = param_range(support)
    params = []
    for i in range(1, n + 1):
        frac = (2 * i - 1) / (2.0 * n)
        pt = point_at(support, lo + frac * (hi - lo))
        params.append(obj.cmap.nearest_param(pt, window))
    return np.sort(np.array(params, dtype=float))


def _stratified_params(rng: np.random.Generator, window, n: int) -> np.ndarray:
    lo, hi = window
    edges = np.linspace(lo, hi, n + 1)
    return edges[:-1] + rng.random(n) * (edges[1:] - edges[:-1])


def _fd_derivatives(obj, t, i, ti, F, h, lo, hi):
    """Central (or one-sided at the box) first/second derivative estimates."""
    if ti - h >= lo and ti + h <= hi:
        t[i] = ti + h
        fp = obj.value(t)
        t[i] = ti - h
        fm = obj.value(t)
        t[i] = ti
        return (fp - fm) / (2.0 * h), (fp - 2.0 * F + fm) / (h * h)
    sign = 1.0 if ti - h < lo else -1.0
    t[i] = ti + sign * h
    f1 = obj.value(t)
    t[i] = ti + sign * 2.0 * h
    f2 = obj.value(t)
    t[i] = ti
    d1 = sign * (-3.0 * F + 4.0 * f1 - f2) / (2.0 * h)
    d2 = (F - 2.0 * f1 + f2) / (h * h)
    return d1, d2


def _descend(obj: Objective, t0: np.ndarray, window, cfg: SolverConfig):
    """Coordinate-wise damped Newton sweep loop; returns (params, value, converged)."""
    lo, hi = window
    width = hi - lo
    h = cfg.fd_step * max(1.0, width)
    max_step = 0.5 * width
    t = np.clip(np.sort(np.asarray(t0, dtype=float)), lo, hi)
    F = obj.value(t)
    converged = False
    for _ in range(cfg.max_iters):
        F_sweep = F
        for i in range(len(t)):
            ti = t[i]
            d1, d2 = _fd_derivatives(obj, t, i, ti, F, h, lo, hi)
            if d1 == 0.0:
                continue
            if d2 > 0.0:
                step = -d1 / d2
            else:
                step = -math.copysign(max_step / 8.0, d1)
            step = max(-max_step, min(max_step, step))
            improved = False
            for _damp in range(12):
                cand = min(max(ti + step, lo), hi)
                if cand == ti:
                    break
                t[i] = cand
                Fc = obj.value(t)
                if Fc < F:
                    F = Fc
                    improved = True
                    break
                step *= 0.5
            if not improved:
                t[i] = ti
        t.sort()
        t = _revive_lost_points(obj, t, window)
        F = obj.value(t)
        if F_sweep - F < cfg.tol:
            converged = True
            break
    return np.sort(t), F, converged


def _revive_lost_points(obj: Objective, t: np.ndarray, window) -> np.ndarray:
    """Move points that own no support onto midpoints of the largest cells."""
    breaks, owners = obj.cells(t)
    owned = set(owners)
    lost = [i for i in range(len(t)) if i not in owned]
    if not lost:
        return t
    widths = [(breaks[i + 1] - breaks[i], i) for i in range(len(owners))]
    widths.sort(reverse=True)
    support = obj.measure.support
    for k, idx in enumerate(lost):
        w, cell_i = widths[k % len(widths)]
        mid = 0.5 * (breaks[cell_i] + breaks[cell_i + 1])
        t[idx] = obj.cmap.nearest_param(point_at(support, mid), window)
    return np.sort(t)


def _merge_params(t: np.ndarray, merge_tol: float) -> np.ndarray:
    """Cluster sorted parameters closer than merge_tol into their means."""
    merged = []
    cluster = [t[0]]
    for v in t[1:]:
        if v - cluster[-1] <= merge_tol:
            cluster.append(v)
        else:
            merged.append(sum(cluster) / len(cluster))
            cluster = [v]
    merged.append(sum(cluster) / len(cluster))
    return np.array(merged, dtype=float)


def _check_window(constraint: Curve, window):
    lo, hi = param_range(constraint)
    if window is None:
        return (lo, hi)
    w0, w1 = float(window[0]), float(window[1])
    if not w0 < w1:
        raise ValueError("window is empty")
    slack = 1e-9 * max(1.0, abs(lo), abs(hi))
    if w0 < lo - slack or w1 > hi + slack:
        raise ValueError("window exceeds the constraint parameter range")
    return (w0, w1)


def solve(
    measure: UniformMeasure,
    constraint: Curve,
    window=None,
    n: int = 1,
    config: SolverConfig | None = None,
    warm_starts=(),
) -> SolveResult:
    """Best n-point codebook on the constraint for the given measure.

    Runs cfg.starts descents (equal-mass seeding first, then stratified
    uniform draws), plus one descent per extra warm start; merges coincident
    points and reports the effective cardinality of the best result.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = config or SolverConfig()
    window = _check_window(constraint, window)
    obj = Objective(measure, constraint)
    rng = np.random.default_rng(cfg.seed)

    seeds = [_equal_mass_params(obj, window, n)]
    for w in warm_starts:
        seeds.append(np.clip(np.sort(np.asarray(w, dtype=float)), window[0], window[1]))
    while len(seeds) < cfg.starts + len(warm_starts):
        seeds.append(_stratified_params(rng, window, n))

    best = None
    per_start = []
    converged_count = 0
    for k, t0 in enumerate(seeds):
        t, _, conv = _descend(obj, t0, window, cfg)
        converged_count += int(conv)
        t = _merge_params(t, cfg.merge_tol)
        codebook = Codebook.from_params(constraint, t)
        report = distortion(measure, codebook)
        per_start.append(report.value)
        if best is None or report.value < best[0]:
            best = (report.value, k, codebook, report)
    value, _, codebook, report = best
    return SolveResult(
        codebook=codebook,
        value=value,
        n=n,
        effective_n=report.effective_count,
        starts_converged=converged_count,
        per_start=tuple(per_start),
        seed=cfg.seed,
    )


def _pad_params(obj: Objective, params, window, n: int) -> np.ndarray:
    """Grow a parameter vector to length n by inserting points at midpoints
    of the currently largest cells."""
    t = np.sort(np.asarray(params, dtype=float))
    support = obj.measure.support
    while len(t) < n:
        breaks, owners = obj.cells(t)
        widths = [(breaks[i + 1] - breaks[i], i) for i in range(len(owners))]
        w, cell_i = max(widths)
        mid = 0.5 * (breaks[cell_i] + breaks[cell_i + 1])
        t = np.sort(np.append(t, obj.cmap.nearest_param(point_at(support, mid), window)))
    return t


def solve_sequence(
    measure: UniformMeasure,
    constraint: Curve,
    window=None,
    n_max: int = 1,
    config: SolverConfig | None = None,
) -> list[SolveResult]:
    """SolveResults for n = 1..n_max, warm-starting each n from the previous
    solution plus one point at the largest cell's midpoint.  The value
    sequence is checked to be non-increasing; a violation triggers one
    re-solve with doubled starts."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    cfg = config or SolverConfig()
    window_checked = _check_window(constraint, window)
    obj = Objective(measure, constraint)
    results: list[SolveResult] = []
    for n in range(1, n_max + 1):
        warm = []
        if results:
            warm.append(_pad_params(obj, results[-1].codebook.params, window_checked, n))
        res = solve(measure, constraint, window, n, cfg, warm_starts=warm)
        if results and res.value > results[-1].value + 1e-12:
            res2 = solve(
                measure, constraint, window, n,
                replace(cfg, starts=2 * cfg.starts), warm_starts=warm,
            )
            if res2.value < res.value:
                res = res2
        results.append(res)
    return results


def stationarity_check(
    measure: UniformMeasure,
    codebook: Codebook,
    window=None,
    fd_step: float = 1e-6,
) -> float:
    """Maximum first-order optimality violation over the codebook parameters.

    Interior parameters contribute their |central-difference derivative|;
    parameters at the window bounds contribute only a derivative pointing
    into the feasible region (a negative inward slope).
    """
    constraint = codebook.constraint
    window = _check_window(constraint, window)
    lo, hi = window
    h = fd_step * max(1.0, hi - lo)
    obj = Objective(measure, constraint)
    t = np.array(codebook.params, dtype=float)
    F = obj.value(t)
    worst = 0.0
    for i in range(len(t)):
        ti = t[i]
        at_lo = ti - lo <= h
        at_hi = hi - ti <= h
        if not at_lo and not at_hi:
            d1, _ = _fd_derivatives(obj, t, i, ti, F, h, lo, hi)
            worst = max(worst, abs(d1))
        elif at_lo:
            t[i] = ti + h
            d1 = (obj.value(t) - F) / h
            t[i] = ti
            worst = max(worst, max(0.0, -d1))
        else:
            t[i] = ti - h
            d1 = (F - obj.value(t)) / h
            t[i] = ti
            worst = max(worst, max(0.0, d1))
    return worst


def objective_gradient(measure: UniformMeasure, codebook: Codebook) -> np.ndarray:
    """Analytic objective derivative per parameter with the partition held
    fixed (envelope form: breakpoint-motion terms cancel)."""
    part = build_partition(measure, codebook)
    frame = SupportFrame(measure)
    cmap = _ConstraintMap(codebook.constraint)
    grad = np.zeros(len(codebook))
    for cell in part.cells:
        k = cell.owner
        px, py = codebook.points[k]
        vx, vy = cmap.velocity(codebook.params[k])
        if frame.kind == "segment":
            rx, ry = px - frame.origin[0], py - frame.origin[1]
            a = rx * frame.unit[0] + ry * frame.unit[1]
            da = vx * frame.unit[0] + vy * frame.unit[1]
            dh2 = 2.0 * (rx * vx + ry * vy) - 2.0 * a * da
            u1, u2 = cell.lo * frame.length, cell.hi * frame.length
            term = -da * ((u2 - a) ** 2 - (u1 - a) ** 2) + dh2 * (u2 - u1)
            grad[k] += term * frame.density
        else:
            R = frame.radius
            qx, qy = px - frame.center[0], py - frame.center[1]
            s1, s2 = cell.lo, cell.hi
            term = 2.0 * (qx * vx + qy * vy) * (s2 - s1) - 2.0 * R * (
                vx * (math.sin(s2) - math.sin(s1)) + vy * (math.cos(s1) - math.cos(s2))
            )
            grad[k] += term * R * frame.density
    return grad
