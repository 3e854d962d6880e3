"""Limit, decay-exponent, dimension, and coefficient estimation for error
sequences (n, V_n).

V_infinity is extrapolated by iterated Aitken acceleration down a doubling
ladder of n (which reduces to the classic three-point estimate when only one
(n, 2n, 4n) triple is available), with a nonlinear power-law fit as the
fallback for irregular grids.  The decay exponent p of V_n - V_inf ~ C n^-p
is fitted in log space with a 1/n finite-size correction term; the dimension
is r/p.  Coefficients n^{r/kappa} (V_n - V_inf) are extrapolated by a
two-level Richardson scheme on the largest doubling triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# Gaps below this are floating-point noise and are excluded from fits.
GAP_FLOOR = 1e-13


@dataclass(frozen=True)
class CoefficientEstimate:
    value: float
    diverging: bool


@dataclass(frozen=True)
class ErrorSequence:
    """Sorted (n, V_n) pairs with the extrapolated limit and fitted decay."""

    entries: tuple[tuple[int, float], ...]
    v_infinity: float
    v_infinity_supplied: bool
    exponent: Optional[float]   # p in V_n - V_inf ~ C n^-p; None for flat input
    prefactor: Optional[float]  # C
    flat: bool

    @classmethod
    def from_entries(cls, entries, v_infinity: Optional[float] = None) -> "ErrorSequence":
        ents = _normalize_entries(entries)
        vals = np.array([v for _, v in ents])
        supplied = v_infinity is not None
        if supplied:
            v_inf = float(v_infinity)
        else:
            v_inf = estimate_v_infinity(ents)
        gaps = vals - v_inf
        if np.any(gaps < -1e-9):
            raise ValueError(
                "entries drop below the supplied v_infinity; re-estimate v_infinity"
            )
        flat = bool(np.all(np.abs(gaps) <= GAP_FLOOR * max(1.0, np.abs(vals).max())))
        exponent = prefactor = None
        if not flat:
            try:
                exponent, prefactor, _ = _fit_decay(ents, v_inf)
            except ValueError:
                pass
        return cls(
            entries=ents,
            v_infinity=v_inf,
            v_infinity_supplied=supplied,
            exponent=exponent,
            prefactor=prefactor,
            flat=flat,
        )

    def gaps(self):
        return tuple((n, v - self.v_infinity) for n, v in self.entries)


def _normalize_entries(entries) -> tuple[tuple[int, float], ...]:
    ents = sorted((int(n), float(v)) for n, v in entries)
    if len(ents) < 1:
        raise ValueError("empty error sequence")
    ns = [n for n, _ in ents]
    if len(set(ns)) != len(ns):
        raise ValueError("duplicate n in error sequence")
    vals = [v for _, v in ents]
    for a, b in zip(vals, vals[1:]):
        if b > a + 1e-9:
            raise ValueError("error sequence must be non-increasing")
    return tuple(ents)


# ---------------------------------------------------------------------------
# V_infinity


def _doubling_ladder(ents) -> list[float]:
    """Values at n_max, n_max/2, n_max/4, ... returned in increasing n."""
    by_n = {n: v for n, v in ents}
    n = max(by_n)
    ladder = [by_n[n]]
    while n % 2 == 0 and (n // 2) in by_n:
        n //= 2
        ladder.append(by_n[n])
    return ladder[::-1]


def _aitken_pass(seq: list[float], scale: float) -> list[float]:
    out = []
    for j in range(len(seq) - 2):
        d1 = seq[j + 1] - seq[j]
        d2 = seq[j + 2] - seq[j + 1]
        den = d2 - d1
        if abs(den) <= 1e3 * np.finfo(float).eps * scale:
            out.append(seq[j + 2])
        else:
            out.append(seq[j + 2] - d2 * d2 / den)
    return out


def estimate_v_infinity(entries) -> float:
    """Extrapolated limit of the error sequence.

    Iterated Aitken acceleration over the doubling ladder ending at the
    largest n (a single triple gives the classic (V_2n^2 - V_n V_4n) /
    (2 V_2n - V_n - V_4n) estimate); least-squares power-law fit when no
    doubling triple exists.  A flat sequence returns its constant value.
    """
    ents = _normalize_entries(entries)
    vals = np.array([v for _, v in ents])
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.max() - vals.min() <= GAP_FLOOR * scale:
        return float(vals[-1])
    if len(ents) < 3:
        raise ValueError("need at least 3 entries to extrapolate")
    ladder = _doubling_ladder(ents)
    if len(ladder) >= 3:
        seq = ladder
        folds = min(3, (len(ladder) - 1) // 2)
        for _ in range(folds):
            if len(seq) < 3:
                break
            seq = _aitken_pass(seq, scale)
        return float(seq[-1])
    return _fit_limit_least_squares(ents)


def _fit_limit_least_squares(ents) -> float:
    """Fit V_n = V_inf + C n^-p by scanning p and solving (V_inf, C) linearly."""
    ns = np.array([n for n, _ in ents], dtype=float)
    vs = np.array([v for _, v in ents])

    def sse(p: float):
        X = np.column_stack([np.ones_like(ns), ns ** (-p)])
        coef, *_ = np.linalg.lstsq(X, vs, rcond=None)
        r = vs - X @ coef
        return float(r @ r), coef

    ps = np.linspace(0.1, 8.0, 80)
    errs = [sse(p)[0] for p in ps]
    k = int(np.argmin(errs))
    from scipy.optimize import minimize_scalar

    lo = ps[max(k - 1, 0)]
    hi = ps[min(k + 1, len(ps) - 1)]
    res = minimize_scalar(lambda p: sse(p)[0], bounds=(lo, hi), method="bounded")
    _, coef = sse(float(res.x))
    return float(coef[0])


# ---------------------------------------------------------------------------
# decay exponent / dimension


def _positive_gaps(ents, v_inf):
    out = [(n, v - v_inf) for n, v in ents]
    scale = max(1.0, max(abs(v) for _, v in ents))
    return [(n, g) for n, g in out if g > GAP_FLOOR * scale]


def _largest_decade(pairs):
    n_max = max(n for n, _ in pairs)
    dec = [(n, g) for n, g in pairs if n >= n_max / 10.0]
    return dec if len(dec) >= 3 else pairs


def _fit_decay(ents, v_inf):
    """Fit log gap = c0 - p log n (+ c1/n correction) over the largest decade.

    Returns (p, C, rms_residual).  The 1/n regressor absorbs the leading
    finite-size deviation from a pure power law; with fewer than four points
    the fit falls back to the pure two-parameter form.
    """
    pairs = _largest_decade(_positive_gaps(ents, v_inf))
    if len(pairs) < 3:
        raise ValueError("need at least 3 positive gaps; re-estimate v_infinity")
    ns = np.array([n for n, _ in pairs], dtype=float)
    ys = np.log(np.array([g for _, g in pairs]))
    cols = [np.ones_like(ns), -np.log(ns)]
    if len(pairs) >= 4:
        cols.append(1.0 / ns)
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, ys, rcond=None)
    resid = ys - X @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return float(coef[1]), float(math.exp(coef[0])), rms


def estimate_dimension(seq: ErrorSequence, r: float = 2.0) -> float:
    """Dimension r/p from the fitted decay exponent of the gap sequence."""
    if seq.flat:
        raise ValueError("flat sequence: dimension is undefined")
    p, _, _ = _fit_decay(seq.entries, seq.v_infinity)
    if p <= 0:
        raise ValueError("gap sequence does not decay; re-estimate v_infinity")
    return r / p


def local_slopes(seq: ErrorSequence):
    """Per-n log-log slopes of the gap between consecutive entries."""
    pairs = _positive_gaps(seq.entries, seq.v_infinity)
    out = []
    for (n0, g0), (n1, g1) in zip(pairs, pairs[1:]):
        out.append((n1, math.log(g1 / g0) / math.log(n1 / n0)))
    return tuple(out)


def literal_dimension_ratios(seq: ErrorSequence, r: float = 2.0):
    """The defining ratios r log n / (-log gap) per entry; converges only
    like 1 + O(1/log n), kept as a diagnostic."""
    out = []
    for n, g in _positive_gaps(seq.entries, seq.v_infinity):
        if n > 1 and 0 < g < 1:
            out.append((n, r * math.log(n) / (-math.log(g))))
    return tuple(out)


# ---------------------------------------------------------------------------
# coefficient


def estimate_coefficient(seq: ErrorSequence, kappa: float, r: float = 2.0) -> CoefficientEstimate:
    """Limit of n^{r/kappa} (V_n - V_inf), Richardson-extrapolated on the
    largest (n, 2n, 4n) triple; flags kappa/decay mismatch."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if seq.flat:
        return CoefficientEstimate(0.0, False)
    pairs = _positive_gaps(seq.entries, seq.v_infinity)
    if not pairs:
        return CoefficientEstimate(0.0, False)
    by_n = {n: g for n, g in pairs}
    expo = r / kappa

    triple = None
    for n in sorted(by_n, reverse=True):
        if n % 4 == 0 and n // 2 in by_n and n // 4 in by_n:
            triple = (n // 4, n // 2, n)
            break
    if triple is None:
        tail = pairs[-3:] if len(pairs) >= 3 else pairs
        ns = [n for n, _ in tail]
        ss = [n**expo * g for n, g in tail]
    else:
        ns = list(triple)
        ss = [n**expo * by_n[n] for n in ns]

    diverging = False
    if len(ss) >= 3 and ss[0] > 0 and ss[1] > 0:
        q1, q2 = ss[1] / ss[0], ss[2] / ss[1]
        if (q1 > 1.25 and q2 > 1.25) or (q1 < 0.8 and q2 < 0.8):
            diverging = True

    if len(ss) < 3:
        return CoefficientEstimate(float(ss[-1]), diverging)
    if triple is not None:
        t1a = 2.0 * ss[1] - ss[0]
        t1b = 2.0 * ss[2] - ss[1]
        value = (4.0 * t1b - t1a) / 3.0
    else:
        value = float(ss[-1])
    return CoefficientEstimate(float(value), diverging)


# ---------------------------------------------------------------------------
# report / export


@dataclass(frozen=True)
class AsymptoticsReport:
    v_infinity: float
    v_infinity_supplied: bool
    dimension: Optional[float]
    kappa: Optional[float]
    coefficient: float
    coefficient_diverging: bool
    fit_residual: Optional[float]
    local_slopes: tuple[tuple[int, float], ...]
    literal_ratios: tuple[tuple[int, float], ...]

    def to_json(self) -> dict:
        return {
            "v_infinity": self.v_infinity,
            "v_infinity_supplied": self.v_infinity_supplied,
            "dimension": self.dimension,
            "kappa": self.kappa,
            "coefficient": self.coefficient,
            "coefficient_diverging": self.coefficient_diverging,
            "fit_residual": self.fit_residual,
            "local_slopes": [[n, s] for n, s in self.local_slopes],
            "literal_dimension_ratios": [[n, s] for n, s in self.literal_ratios],
        }


def build_report(
    entries,
    r: float = 2.0,
    v_infinity: Optional[float] = None,
    kappa: Optional[float] = None,
) -> tuple[ErrorSequence, AsymptoticsReport]:
    """ErrorSequence plus a full report; kappa defaults to the estimated
    dimension."""
    seq = ErrorSequence.from_entries(entries, v_infinity=v_infinity)
    if seq.flat:
        return seq, AsymptoticsReport(
            v_infinity=seq.v_infinity,
            v_infinity_supplied=seq.v_infinity_supplied,
            dimension=None,
            kappa=kappa,
            coefficient=0.0,
            coefficient_diverging=False,
            fit_residual=None,
            local_slopes=(),
            literal_ratios=(),
        )
    dim = estimate_dimension(seq, r=r)
    _, _, rms = _fit_decay(seq.entries, seq.v_infinity)
    kap = kappa if kappa is not None else dim
    coef = estimate_coefficient(seq, kap, r=r)
    return seq, AsymptoticsReport(
        v_infinity=seq.v_infinity,
        v_infinity_supplied=seq.v_infinity_supplied,
        dimension=dim,
        kappa=kap,
        coefficient=coef.value,
        coefficient_diverging=coef.diverging,
        fit_residual=rms,
        local_slopes=local_slopes(seq),
        literal_ratios=literal_dimension_ratios(seq, r=r),
    )


def csv_rows(seq: ErrorSequence, kappa: float, r: float = 2.0):
    """Rows (n, V_n, gap, local_slope, scaled_gap) for plotting export."""
    slopes = dict(local_slopes(seq))
    rows = []
    for n, v in seq.entries:
        gap = v - seq.v_infinity
        rows.append(
            {
                "n": n,
                "V_n": v,
                "gap": gap,
                "local_slope": slopes.get(n),
                "scaled_gap": n ** (r / kappa) * gap if kappa else None,
            }
        )
    return rows
