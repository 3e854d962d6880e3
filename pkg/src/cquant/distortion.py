"""Voronoi partitions of a 1-D support induced by a planar codebook, and the
squared-distance distortion integral.

The support is always a segment or a circle arc, so every codebook point
meets it in at most one interval (one arc, possibly split by the parameter
cut of a full circle).  Cell boundaries solve the equidistance equation
between the two adjacent owners and are computed in closed form: on a
segment the squared distances are parabolas with a common leading term, so
their lower envelope is an envelope of lines; on a circle the pairwise
differences are sinusoids with explicit roots.  Cell integrals are exact
antiderivatives in both cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    TWO_PI,
    CircleArc,
    Curve,
    Segment,
    UniformMeasure,
    point_at,
)

# Plane distance under which two codebook points are considered coincident.
MERGE_EPS = 1e-9

R_ORDER = 2  # distortion order is fixed; every closed form below assumes it


@dataclass(frozen=True)
class Codebook:
    """Candidate points on a constraint curve, stored as sorted parameters."""

    constraint: Curve
    params: tuple[float, ...]
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.params) < 1:
            raise ValueError("codebook needs at least one point")
        if any(b < a for a, b in zip(self.params, self.params[1:])):
            raise ValueError("codebook parameters must be sorted")

    @classmethod
    def from_params(cls, constraint: Curve, params) -> "Codebook":
        ps = tuple(sorted(float(t) for t in params))
        pts = tuple(point_at(constraint, t) for t in ps)
        return cls(constraint=constraint, params=ps, points=pts)

    def __len__(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class Cell:
    lo: float
    hi: float
    owner: int


@dataclass(frozen=True)
class Partition:
    """Cells tiling the support parameter interval, owners by codebook index."""

    breakpoints: tuple[float, ...]
    owners: tuple[int, ...]
    effective_count: int

    @property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(
            Cell(self.breakpoints[i], self.breakpoints[i + 1], self.owners[i])
            for i in range(len(self.owners))
        )


@dataclass(frozen=True)
class CellContribution:
    lo: float
    hi: float
    owner: int
    contribution: float


@dataclass(frozen=True)
class DistortionReport:
    value: float
    per_cell: tuple[CellContribution, ...]
    effective_count: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "effective_n": self.effective_count,
            "cells": [
                {"from": c.lo, "to": c.hi, "owner": c.owner, "contribution": c.contribution}
                for c in self.per_cell
            ],
        }


def squared_distance(p, q) -> float:
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def _dedupe(points: np.ndarray) -> np.ndarray:
    """Indices of cluster representatives (lowest index wins) under MERGE_EPS."""
    n = len(points)
    rep = np.arange(n)
    for i in range(n):
        if rep[i] != i:
            continue
        d2 = (points[i + 1 :, 0] - points[i, 0]) ** 2 + (points[i + 1 :, 1] - points[i, 1]) ** 2
        for j in np.nonzero(d2 <= MERGE_EPS * MERGE_EPS)[0] + i + 1:
            if rep[j] == j:
                rep[j] = i
    return np.unique(rep)


def _cleanup_cells(breaks, owners, lo, hi):
    """Drop zero-width cells and merge adjacent cells with the same owner."""
    floor = 1e-15 * max(1.0, abs(hi - lo))
    cells = []
    start = lo
    for i, o in enumerate(owners):
        end = breaks[i + 1]
        if end - start > floor:
            if cells and cells[-1][2] == o:
                cells[-1] = (cells[-1][0], end, o)
            else:
                cells.append((start, end, o))
            start = end
    if not cells:
        cells = [(lo, hi, owners[0] if owners else 0)]
    cells[0] = (lo, cells[0][1], cells[0][2])
    cells[-1] = (cells[-1][0], hi, cells[-1][2])
    return [c[0] for c in cells] + [cells[-1][1]], [c[2] for c in cells]


# ---------------------------------------------------------------------------
# segment support: lower envelope of lines


def _segment_cells(a, q, idx, lo, hi):
    """Cells of min_i [(u - a_i)^2 + h2_i] on [lo, hi] in the arc-length
    coordinate u.  a: projections, q = a^2 + h2.  Owners drawn from idx."""
    order = np.argsort(a, kind="stable")
    cand: list[int] = []
    for k in order:
        k = int(k)
        if cand and a[k] == a[cand[-1]]:
            if q[k] < q[cand[-1]]:
                cand[-1] = k
        else:
            cand.append(k)

    def cross(i, j):
        # u where the residual lines of i and j meet (requires a_i < a_j)
        return (q[j] - q[i]) / (2.0 * (a[j] - a[i]))

    stack: list[int] = []
    for k in cand:
        while stack:
            if len(stack) >= 2 and cross(stack[-2], k) <= cross(stack[-2], stack[-1]):
                stack.pop()
            else:
                break
        stack.append(k)

    xs = [cross(stack[i], stack[i + 1]) for i in range(len(stack) - 1)]
    breaks = [lo]
    owners = []
    prev = -math.inf
    for i, k in enumerate(stack):
        start = prev
        end = xs[i] if i < len(xs) else math.inf
        prev = end
        s, e = max(start, lo), min(end, hi)
        if e > s:
            breaks.append(e)
            owners.append(int(idx[k]))
    breaks[-1] = hi
    return breaks, owners


# ---------------------------------------------------------------------------
# circle support: arcs of min_i [d_i^2 - 2 R d_i cos(t - phi_i)]  (common R^2 dropped)


def _circle_pair_roots(di, phii, dj, phij, R, lo, hi):
    """Roots of g_i(t) - g_j(t) = 0 inside (lo, hi)."""
    C = di * di - dj * dj
    ax = di * math.cos(phii) - dj * math.cos(phij)
    ay = di * math.sin(phii) - dj * math.sin(phij)
    K = 2.0 * R * math.hypot(ax, ay)
    if K < 1e-300:
        return []
    ratio = C / K
    if abs(ratio) >= 1.0:
        return []
    psi = math.atan2(ay, ax)
    base = math.acos(ratio)
    roots = []
    j0 = math.floor((lo - psi) / TWO_PI) - 1
    j1 = math.ceil((hi - psi) / TWO_PI) + 1
    for j in range(j0, j1 + 1):
        for s in (psi + base + TWO_PI * j, psi - base + TWO_PI * j):
            if lo < s < hi:
                roots.append(s)
    roots.sort()
    out = []
    for s in roots:
        if not out or s - out[-1] > 1e-13:
            out.append(s)
    return out


def _circle_cells_incremental(d, phi, idx, R, lo, hi):
    """Exact Voronoi arcs on [lo, hi] by inserting points one at a time."""

    def closer(i, k, t):
        # True where point k beats point i strictly (ties stay with i < k)
        return (d[i] * d[i] - d[k] * d[k]) - 2.0 * R * (
            d[i] * math.cos(t - phi[i]) - d[k] * math.cos(t - phi[k])
        ) > 0.0

    cells = [(lo, hi, 0)]
    for k in range(1, len(d)):
        new_cells = []
        for (a, b, own) in cells:
            pts = [a] + _circle_pair_roots(d[own], phi[own], d[k], phi[k], R, a, b) + [b]
            for j in range(len(pts) - 1):
                clo, chi = pts[j], pts[j + 1]
                winner = k if chi > clo and closer(own, k, 0.5 * (clo + chi)) else own
                if new_cells and new_cells[-1][2] == winner:
                    new_cells[-1] = (new_cells[-1][0], chi, winner)
                else:
                    new_cells.append((clo, chi, winner))
        cells = new_cells
    breaks = [cells[0][0]] + [c[1] for c in cells]
    owners = [int(idx[c[2]]) for c in cells]
    return breaks, owners


def _circle_cells_equal_radius(phi, idx, lo, hi):
    """Full-circle support with all points equidistant from the center:
    ownership is angular-nearest, boundaries at cyclic midpoints."""
    n = len(phi)
    if n == 1:
        return [lo, hi], [int(idx[0])]
    order = np.argsort(phi, kind="stable")
    ph = phi[order]
    mids = [(ph[i] + ph[i + 1]) / 2.0 for i in range(n - 1)]
    mids.append((ph[-1] + ph[0] + TWO_PI) / 2.0)
    bs = []
    for m in mids:
        r = math.fmod(m - lo, TWO_PI)
        if r < 0.0:
            r += TWO_PI
        if 0.0 < r < hi - lo:
            bs.append(lo + r)
    breaks = [lo] + sorted(bs) + [hi]
    owners = []
    for i in range(len(breaks) - 1):
        mid = 0.5 * (breaks[i] + breaks[i + 1])
        ang = np.mod(ph - mid + math.pi, TWO_PI) - math.pi
        owners.append(int(idx[order[int(np.argmin(np.abs(ang)))]]))
    return breaks, owners


# ---------------------------------------------------------------------------
# support frames: precomputed geometry for repeated evaluation


class SupportFrame:
    """Support-side precomputation shared by partitioning and integration."""

    def __init__(self, measure: UniformMeasure):
        self.measure = measure
        self.support = measure.support
        self.density = measure.density
        if isinstance(self.support, Segment):
            self.kind = "segment"
            self.origin = np.array(self.support.start, dtype=float)
            d = np.array(self.support.direction, dtype=float)
            self.length = float(np.hypot(*d))
            self.unit = d / self.length
            self.lo, self.hi = 0.0, self.length  # arc-length coordinate
        else:
            arc: CircleArc = self.support
            self.kind = "circle"
            self.center = np.array(arc.center, dtype=float)
            self.radius = arc.radius
            self.lo, self.hi = arc.angle_start, arc.angle_end
            self.full = arc.is_full_circle

    # -- cells ------------------------------------------------------------

    def cells(self, points: np.ndarray, idx=None):
        """(breaks, owners) in support parameter units for the given points."""
        if idx is None:
            idx = np.arange(len(points))
        pts = points[idx] if len(idx) != len(points) else points
        if self.kind == "segment":
            rel = pts - self.origin
            a = rel @ self.unit
            h2 = np.maximum(np.einsum("ij,ij->i", rel, rel) - a * a, 0.0)
            breaks_u, owners = _segment_cells(a, a * a + h2, idx, self.lo, self.hi)
            breaks = [u / self.length for u in breaks_u]
            breaks, owners = _cleanup_cells(breaks, owners, 0.0, 1.0)
            return breaks, owners
        rel = pts - self.center
        d = np.hypot(rel[:, 0], rel[:, 1])
        phi = np.arctan2(rel[:, 1], rel[:, 0])
        if self.full and len(d) > 0 and d.max() - d.min() <= 1e-12 and d.min() > 1e-12:
            breaks, owners = _circle_cells_equal_radius(phi, idx, self.lo, self.hi)
        else:
            breaks, owners = _circle_cells_incremental(d, phi, idx, self.radius, self.lo, self.hi)
        return _cleanup_cells(breaks, owners, self.lo, self.hi)

    # -- integrals ----------------------------------------------------------

    def cell_integral(self, point, lo, hi):
        """Exact distortion mass of the cell [lo, hi] owned by `point`
        (probability-normalized)."""
        if self.kind == "segment":
            rel = (point[0] - self.origin[0], point[1] - self.origin[1])
            a = rel[0] * self.unit[0] + rel[1] * self.unit[1]
            h2 = max(rel[0] * rel[0] + rel[1] * rel[1] - a * a, 0.0)
            u1, u2 = lo * self.length, hi * self.length
            val = ((u2 - a) ** 3 - (u1 - a) ** 3) / 3.0 + h2 * (u2 - u1)
            return val * self.density
        R = self.radius
        qx, qy = point[0] - self.center[0], point[1] - self.center[1]
        d2 = qx * qx + qy * qy
        d = math.sqrt(d2)
        ph = math.atan2(qy, qx)
        val = (R * R + d2) * (hi - lo) - 2.0 * R * d * (math.sin(hi - ph) - math.sin(lo - ph))
        return val * R * self.density

    def value(self, points: np.ndarray) -> float:
        """Distortion of the point set (no report objects; solver hot path).

        Fully vectorized when ownership is consecutive along the support
        (the generic case during descent); falls back to the exact envelope
        construction otherwise.
        """
        fast = self._value_consecutive(points)
        if fast is not None:
            return fast
        breaks, owners = self.cells(points)
        total = 0.0
        for i, o in enumerate(owners):
            total += self.cell_integral(points[o], breaks[i], breaks[i + 1])
        return total

    def _value_consecutive(self, points: np.ndarray):
        """Closed-form distortion when every point owns one cell in order;
        None when that structure does not hold."""
        if self.kind == "segment":
            rel = points - self.origin
            a = rel @ self.unit
            if len(a) > 1:
                order = np.argsort(a, kind="stable")
                a = a[order]
                rel = rel[order]
                da = np.diff(a)
                if np.any(da <= 0.0):
                    return None
            h2 = np.maximum(np.einsum("ij,ij->i", rel, rel) - a * a, 0.0)
            if len(a) > 1:
                q = a * a + h2
                u = np.diff(q) / (2.0 * da)
                if np.any(np.diff(u) < 0.0):
                    return None
                u = np.clip(u, self.lo, self.hi)
                u1 = np.concatenate(([self.lo], u))
                u2 = np.concatenate((u, [self.hi]))
            else:
                u1 = np.array([self.lo])
                u2 = np.array([self.hi])
            val = np.sum(((u2 - a) ** 3 - (u1 - a) ** 3) / 3.0 + h2 * (u2 - u1))
            return float(val * self.density)
        if not self.full:
            return None
        rel = points - self.center
        d = np.hypot(rel[:, 0], rel[:, 1])
        if len(d) == 0 or d.max() - d.min() > 1e-12 or d.min() <= 1e-12:
            return None
        R = self.radius
        phi = np.sort(np.arctan2(rel[:, 1], rel[:, 0]))
        dd = d[0]
        if len(phi) == 1:
            return float((R * R + dd * dd) * R * TWO_PI * self.density)
        mids = 0.5 * (phi[:-1] + phi[1:])
        wrap = 0.5 * (phi[-1] + phi[0] + TWO_PI)
        m1 = np.concatenate(([wrap - TWO_PI], mids))
        m2 = np.concatenate((mids, [wrap]))
        val = (R * R + dd * dd) * (m2 - m1) - 2.0 * R * dd * (
            np.sin(m2 - phi) - np.sin(m1 - phi)
        )
        return float(np.sum(val) * R * self.density)


# ---------------------------------------------------------------------------
# public surface


def build_partition(measure: UniformMeasure, codebook: Codebook) -> Partition:
    """Voronoi partition of the support induced by the codebook.

    Coincident codebook points (within MERGE_EPS in the plane) are merged to
    the lowest index before partitioning; exact distance ties go to the lower
    index.  Points whose Voronoi region misses the support own no cell.
    """
    frame = SupportFrame(measure)
    points = np.asarray(codebook.points, dtype=float)
    live = _dedupe(points)
    breaks, owners = frame.cells(points, live)
    return Partition(
        breakpoints=tuple(breaks),
        owners=tuple(owners),
        effective_count=len(set(owners)),
    )


def _cell_integral_quad(measure: UniformMeasure, point, lo, hi):
    from scipy.integrate import quad

    support = measure.support
    arc_speed = (
        math.hypot(*support.direction) if isinstance(support, Segment) else support.radius
    )

    def integrand(t):
        return squared_distance(point_at(support, t), point)

    val, _ = quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val * arc_speed * measure.density


def distortion(
    measure: UniformMeasure, codebook: Codebook, method: str = "analytic"
) -> DistortionReport:
    """Distortion integral of the codebook.

    Exact per-cell antiderivatives by default; method="quad" integrates each
    cell by adaptive quadrature (abs tol 1e-12) instead.
    """
    frame = SupportFrame(measure)
    points = np.asarray(codebook.points, dtype=float)
    live = _dedupe(points)
    breaks, owners = frame.cells(points, live)
    per_cell = []
    for i, o in enumerate(owners):
        if method == "analytic":
            v = frame.cell_integral(codebook.points[o], breaks[i], breaks[i + 1])
        else:
            v = _cell_integral_quad(measure, codebook.points[o], breaks[i], breaks[i + 1])
        per_cell.append(CellContribution(breaks[i], breaks[i + 1], o, v))
    return DistortionReport(
        value=float(sum(c.contribution for c in per_cell)),
        per_cell=tuple(per_cell),
        effective_count=len(set(owners)),
    )


def distortion_with_breakpoints(measure: UniformMeasure, codebook: Codebook, breaks, owners):
    """Distortion under an explicit (not necessarily optimal) cell assignment."""
    frame = SupportFrame(measure)
    total = 0.0
    for i, o in enumerate(owners):
        total += frame.cell_integral(codebook.points[o], breaks[i], breaks[i + 1])
    return total
