"""Constraint/support curves in the plane and the uniform measures they carry.

Two curve kinds are supported: line segments, parametrized by the length
fraction t in [0, 1], and circle arcs, parametrized by the angle itself.
Full circles (span exactly 2*pi) are treated as periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

TWO_PI = 2.0 * math.pi

# Slack for parameter-domain checks; purely a floating-point guard.
_PARAM_EPS = 1e-9


@dataclass(frozen=True)
class Segment:
    """Straight segment from `start` to `end`, parameter t in [0, 1]."""

    start: tuple[float, float]
    end: tuple[float, float]

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError("segment endpoints must be distinct")

    @property
    def direction(self) -> tuple[float, float]:
        return (self.end[0] - self.start[0], self.end[1] - self.start[1])


@dataclass(frozen=True)
class CircleArc:
    """Arc of the circle |x - center| = radius, angles in radians.

    Requires angle_start < angle_end and span at most 2*pi; a span of
    exactly 2*pi encodes the full (periodic) circle.
    """

    center: tuple[float, float]
    radius: float
    angle_start: float
    angle_end: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("circle arc radius must be positive")
        if not self.angle_start < self.angle_end:
            raise ValueError("angle_start must be strictly below angle_end")
        if self.angle_end - self.angle_start > TWO_PI + 1e-12:
            raise ValueError("arc span cannot exceed 2*pi")

    @property
    def span(self) -> float:
        return self.angle_end - self.angle_start

    @property
    def is_full_circle(self) -> bool:
        return abs(self.span - TWO_PI) <= 1e-12


Curve = Union[Segment, CircleArc]


def param_range(curve: Curve) -> tuple[float, float]:
    """Parameter interval [t_lo, t_hi] of the curve."""
    if isinstance(curve, Segment):
        return (0.0, 1.0)
    return (curve.angle_start, curve.angle_end)


def _check_param(curve: Curve, t: float) -> None:
    lo, hi = param_range(curve)
    slack = _PARAM_EPS * max(1.0, abs(lo), abs(hi))
    if not (lo - slack <= t <= hi + slack):
        raise ValueError(f"parameter {t} outside [{lo}, {hi}]")


def point_at(curve: Curve, t: float) -> tuple[float, float]:
    """Plane point at parameter t (affine for segments, angle for arcs)."""
    _check_param(curve, t)
    if isinstance(curve, Segment):
        dx, dy = curve.direction
        return (curve.start[0] + t * dx, curve.start[1] + t * dy)
    cx, cy = curve.center
    return (cx + curve.radius * math.cos(t), cy + curve.radius * math.sin(t))


def arc_length(curve: Curve) -> float:
    if isinstance(curve, Segment):
        dx, dy = curve.direction
        return math.hypot(dx, dy)
    return curve.radius * curve.span


def speed(curve: Curve, t: float) -> float:
    """Norm of the parametrization velocity at t (constant for both kinds)."""
    _check_param(curve, t)
    if isinstance(curve, Segment):
        dx, dy = curve.direction
        return math.hypot(dx, dy)
    return curve.radius


@dataclass(frozen=True)
class UniformMeasure:
    """Uniform probability measure supported on a curve."""

    support: Curve

    @property
    def total_length(self) -> float:
        return arc_length(self.support)

    @property
    def density(self) -> float:
        """Constant density per unit arc length (1 / total length)."""
        return 1.0 / self.total_length


def measure_of_interval(measure: UniformMeasure, t1: float, t2: float) -> float:
    """Probability of the parameter interval [t1, t2] of the support."""
    if t2 < t1:
        raise ValueError("interval is reversed (t2 < t1)")
    _check_param(measure.support, t1)
    _check_param(measure.support, t2)
    lo, hi = param_range(measure.support)
    return (t2 - t1) / (hi - lo)


def curve_to_json(curve: Curve) -> dict:
    if isinstance(curve, Segment):
        return {"kind": "segment", "from": list(curve.start), "to": list(curve.end)}
    return {
        "kind": "circle_arc",
        "center": list(curve.center),
        "radius": curve.radius,
        "from_angle": curve.angle_start,
        "to_angle": curve.angle_end,
    }


def curve_from_json(obj: dict) -> Curve:
    try:
        kind = obj["kind"]
        if kind == "segment":
            return Segment(start=tuple(map(float, obj["from"])), end=tuple(map(float, obj["to"])))
        if kind == "circle_arc":
            return CircleArc(
                center=tuple(map(float, obj["center"])),
                radius=float(obj["radius"]),
                angle_start=float(obj["from_angle"]),
                angle_end=float(obj["to_angle"]),
            )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed curve object: {obj!r}") from exc
    raise ValueError(f"unknown curve kind: {obj.get('kind')!r}")
