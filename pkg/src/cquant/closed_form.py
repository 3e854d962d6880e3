"""Closed-form optimal codebooks and error values for the supported families.

Each family pairs a uniform support measure with a constraint curve and
yields the optimal n-point configuration plus its distortion in closed form.
These serve as ground truth for the numerical solver and for the error-decay
analysis.  Families are addressable by string id for the CLI:
"segment-line", "clamped", "one-sided", "circle-circle", "diameter", "chord".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .distortion import Codebook
from .geometry import TWO_PI, CircleArc, Curve, Segment, UniformMeasure

SQRT3 = math.sqrt(3.0)


class UnsupportedClosedForm(ValueError):
    """No closed form for the requested (family, n); use the numerical solver."""


@dataclass(frozen=True)
class SegmentLineFamily:
    """Uniform measure on [a, b] x {0}; codebook on the line y = m x + c
    restricted to x in [d, e]."""

    a: float
    b: float
    m: float
    c: float
    d: float
    e: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("support needs a < b")
        if not self.d < self.e:
            raise ValueError("window needs d < e")

    def foot(self, x: float) -> float:
        """x-coordinate on the support hit by the perpendicular to the
        constraint line through the line point with x-coordinate `x`."""
        return (self.m * self.m + 1.0) * x + self.m * self.c

    @property
    def interior_ok(self) -> bool:
        """True when the window is wide enough that every optimal point is
        interior (the free-optimum feet stay inside the support)."""
        return self.foot(self.d) <= self.a and self.foot(self.e) >= self.b

    @property
    def measure(self) -> UniformMeasure:
        return UniformMeasure(Segment((self.a, 0.0), (self.b, 0.0)))

    @property
    def constraint(self) -> Segment:
        return Segment(
            (self.d, self.m * self.d + self.c), (self.e, self.m * self.e + self.c)
        )

    def line_x_to_param(self, x: float) -> float:
        return (x - self.d) / (self.e - self.d)


@dataclass(frozen=True)
class ThresholdReport:
    """Largest codebook sizes before the window endpoints start binding.

    n1/n2 are None when the corresponding endpoint can never bind; a value
    of 0 means the endpoint binds already at n = 1.
    """

    n1: Optional[int]
    n2: Optional[int]
    n: Optional[int]


def _largest_integer_below(u: float) -> int:
    n = int(math.ceil(u - 1e-12)) - 1
    return max(n, 0)


def threshold_N(family: SegmentLineFamily) -> ThresholdReport:
    """Sizes beyond which optimal codebooks must contain the window endpoints.

    For all n >= n1 + 1 the left endpoint (d, md+c) belongs to every optimal
    set; n2 is the analogue for the right endpoint; n = max of the defined
    ones.
    """
    a, b, m, c, d, e = family.a, family.b, family.m, family.c, family.d, family.e
    mm1 = m * m + 1.0
    n1 = n2 = None
    if family.foot(d) > a:
        # d < (b-a)/(2 N mm1) + (a-cm)/mm1  <=>  N < (b-a) / (2 (mm1 d + cm - a))
        n1 = _largest_integer_below((b - a) / (2.0 * (mm1 * d + c * m - a)))
    if family.foot(e) < b:
        n2 = _largest_integer_below((b - a) / (2.0 * (b - mm1 * e - c * m)))
    defined = [v for v in (n1, n2) if v is not None]
    return ThresholdReport(n1=n1, n2=n2, n=max(defined) if defined else None)


def segment_line_v_infinity(family: SegmentLineFamily) -> float:
    """Limit of the family's error sequence: the mean squared distance from
    the support to the constraint line."""
    a, b, m, c = family.a, family.b, family.m, family.c
    g = m * a + c
    return (g * g + m * g * (b - a) + m * m * (b - a) ** 2 / 3.0) / (m * m + 1.0)


def segment_line_error(family: SegmentLineFamily, n: int) -> float:
    """Closed-form distortion of the optimal n-point set (interior case)."""
    a, b, m = family.a, family.b, family.m
    return segment_line_v_infinity(family) + (b - a) ** 2 / (
        12.0 * n * n * (m * m + 1.0)
    )


def segment_line_codebook(family: SegmentLineFamily, n: int) -> tuple[Codebook, float]:
    """Optimal n-point codebook on the constraint line, interior case.

    The points have x-coordinates
        x_i = (2i-1)(b-a) / (2n(1+m^2)) + (a - c m)/(1+m^2),
    equally spaced so that their perpendicular feet are the midpoints of n
    equal subintervals of the support.
    """
    if n < 2:
        raise UnsupportedClosedForm(
            "segment-line closed form needs n >= 2; use the numerical solver for n=1"
        )
    if not family.interior_ok:
        raise ValueError(
            "window endpoints bind for this family; see threshold_N and the "
            "clamped/one-sided families for endpoint-pinned solutions"
        )
    a, b, m, c = family.a, family.b, family.m, family.c
    mm1 = m * m + 1.0
    xs = [(2 * i - 1) * (b - a) / (2.0 * n * mm1) + (a - c * m) / mm1 for i in range(1, n + 1)]
    params = [family.line_x_to_param(x) for x in xs]
    return Codebook.from_params(family.constraint, params), segment_line_error(family, n)


# ---------------------------------------------------------------------------
# fixed families on the support [0, 2] x {0} with constraint on y = 1

_CLAMPED_CONSTRAINT = Segment((0.5, 1.0), (1.5, 1.0))
_ONE_SIDED_CONSTRAINT = Segment((0.0, 1.0), (28.0 / 15.0, 1.0))
_UNIT_SUPPORT = UniformMeasure(Segment((0.0, 0.0), (2.0, 0.0)))


def clamped_line_error(n: int) -> float:
    if n == 1:
        return 4.0 / 3.0
    return (25.0 * n * n - 50.0 * n + 26.0) / (24.0 * (n - 1.0) ** 2)


def clamped_line_codebook(n: int) -> tuple[Codebook, float]:
    """Optimal n points on y = 1 with x restricted to [1/2, 3/2]: both window
    endpoints are pinned for n >= 2 and the interior is an equal grid."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        params = [0.5]
    else:
        params = [(i - 1) / (n - 1.0) for i in range(1, n + 1)]
    return Codebook.from_params(_CLAMPED_CONSTRAINT, params), clamped_line_error(n)


def one_sided_line_error(n: int) -> float:
    if n <= 7:
        return 1.0 + 1.0 / (3.0 * n * n)
    return 7.0 * (5788.0 * (n - 1.0) * n + 3015.0) / (10125.0 * (1.0 - 2.0 * n) ** 2)


def one_sided_line_codebook(n: int) -> tuple[Codebook, float]:
    """Optimal n points on y = 1 with x restricted to [0, 28/15]: free
    midpoint placement up to n = 7, right endpoint pinned from n = 8 on."""
    if n < 1:
        raise ValueError("n must be positive")
    w = 28.0 / 15.0
    if n <= 7:
        params = [(2 * i - 1) / (n * w) for i in range(1, n + 1)]
    else:
        params = [(2 * i - 1) / (2.0 * n - 1.0) for i in range(1, n)] + [1.0]
    return Codebook.from_params(_ONE_SIDED_CONSTRAINT, params), one_sided_line_error(n)


# ---------------------------------------------------------------------------
# circle and chord families (unit support circle / unit constraint circle)


def _unit_circle() -> CircleArc:
    return CircleArc((0.0, 0.0), 1.0, 0.0, TWO_PI)


def circle_on_circle_error(a: float, n: int) -> float:
    return a * a + 1.0 - (2.0 * a * n / math.pi) * math.sin(math.pi / n)


def circle_on_circle_codebook(a: float, n: int) -> tuple[Codebook, float]:
    """Optimal n points on the concentric circle of radius a for the uniform
    measure on the unit circle: equally spaced angles.  For n = 1 every angle
    is optimal and for n = 2 every antipodal pair is; angle 0 is the
    canonical representative of those orbits."""
    if a <= 0:
        raise ValueError("constraint radius must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    constraint = CircleArc((0.0, 0.0), a, 0.0, TWO_PI)
    if n == 1:
        params = [0.0]
        value = 1.0 + a * a
    elif n == 2:
        params = [0.0, math.pi]
        value = 1.0 + a * a - 4.0 * a / math.pi
    else:
        params = [(2 * i - 1) * math.pi / n for i in range(1, n + 1)]
        value = circle_on_circle_error(a, n)
    return Codebook.from_params(constraint, params), value


def diameter_error(n: int) -> float:
    return 4.0 / 3.0 if n == 1 else 1.0 / 3.0


def diameter_codebook(n: int) -> tuple[Codebook, float]:
    """Optimal points on the unit circle for the uniform measure on the
    horizontal diameter: a single point anywhere for n = 1 (canonically
    (0, 1)), and exactly the two diameter endpoints for every n >= 2."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        params = [math.pi / 2.0]
    else:
        params = [0.0, math.pi]
    return Codebook.from_params(_unit_circle(), params), diameter_error(n)


CHORD_TWO_POINT_ANGLE = 2.0 * math.pi - 2.0 * math.atan((SQRT3 + math.sqrt(7.0)) / 2.0)


def chord_error(n: int) -> float:
    if n == 1:
        return 0.5
    if n == 2:
        return (3.0 - math.sqrt(7.0)) / 2.0
    raise UnsupportedClosedForm(
        f"no closed form for the chord family at n={n}; use the numerical solver"
    )


def chord_small_codebook(n: int) -> tuple[Codebook, float]:
    """Optimal 1- and 2-point sets on the unit circle for the uniform measure
    on the chord y = -1/2: the bottom of the circle for n = 1, a mirror pair
    for n = 2."""
    value = chord_error(n)  # raises for n not in {1, 2}
    if n == 1:
        params = [1.5 * math.pi]
    else:
        left = CHORD_TWO_POINT_ANGLE
        right = 3.0 * math.pi - CHORD_TWO_POINT_ANGLE  # mirror across the y-axis
        params = sorted([left, right])
    return Codebook.from_params(_unit_circle(), params), value


# ---------------------------------------------------------------------------
# family registry


@dataclass(frozen=True)
class FamilySetup:
    """Geometry plus closed-form dispatch for one named problem family."""

    family_id: str
    measure: UniformMeasure
    constraint: Curve
    window: tuple[float, float]
    codebook_fn: Optional[Callable[[int], tuple[Codebook, float]]]
    error_fn: Optional[Callable[[int], float]]
    v_infinity: Optional[float]

    def closed_form(self, n: int) -> tuple[Codebook, float]:
        if self.codebook_fn is None:
            raise UnsupportedClosedForm(f"family {self.family_id!r} has no closed form")
        return self.codebook_fn(n)


FAMILY_IDS = ("segment-line", "clamped", "one-sided", "circle-circle", "diameter", "chord")


def family_setup(family_id: str, **params) -> FamilySetup:
    """Build the measure/constraint/window (and closed forms) for a family id.

    segment-line requires a, b, m, c, d, e; circle-circle requires a (the
    constraint radius); the remaining families take no parameters.
    """
    if family_id == "segment-line":
        try:
            fam = SegmentLineFamily(**{k: float(params[k]) for k in ("a", "b", "m", "c", "d", "e")})
        except KeyError as exc:
            raise ValueError("segment-line needs parameters a, b, m, c, d, e") from exc
        return FamilySetup(
            family_id=family_id,
            measure=fam.measure,
            constraint=fam.constraint,
            window=(0.0, 1.0),
            codebook_fn=lambda n: segment_line_codebook(fam, n),
            error_fn=lambda n: segment_line_error(fam, n),
            v_infinity=segment_line_v_infinity(fam),
        )
    if family_id == "clamped":
        return FamilySetup(
            family_id=family_id,
            measure=_UNIT_SUPPORT,
            constraint=_CLAMPED_CONSTRAINT,
            window=(0.0, 1.0),
            codebook_fn=clamped_line_codebook,
            error_fn=clamped_line_error,
            v_infinity=25.0 / 24.0,
        )
    if family_id == "one-sided":
        return FamilySetup(
            family_id=family_id,
            measure=_UNIT_SUPPORT,
            constraint=_ONE_SIDED_CONSTRAINT,
            window=(0.0, 1.0),
            codebook_fn=one_sided_line_codebook,
            error_fn=one_sided_line_error,
            v_infinity=10129.0 / 10125.0,
        )
    if family_id == "circle-circle":
        if "a" not in params:
            raise ValueError("circle-circle needs the constraint radius a")
        a = float(params["a"])
        return FamilySetup(
            family_id=family_id,
            measure=UniformMeasure(_unit_circle()),
            constraint=CircleArc((0.0, 0.0), a, 0.0, TWO_PI),
            window=(0.0, TWO_PI),
            codebook_fn=lambda n: circle_on_circle_codebook(a, n),
            error_fn=lambda n: circle_on_circle_error(a, n),
            v_infinity=(a - 1.0) ** 2,
        )
    if family_id == "diameter":
        return FamilySetup(
            family_id=family_id,
            measure=UniformMeasure(Segment((-1.0, 0.0), (1.0, 0.0))),
            constraint=_unit_circle(),
            window=(0.0, TWO_PI),
            codebook_fn=diameter_codebook,
            error_fn=diameter_error,
            v_infinity=1.0 / 3.0,
        )
    if family_id == "chord":
        return FamilySetup(
            family_id=family_id,
            measure=UniformMeasure(Segment((-SQRT3 / 2.0, -0.5), (SQRT3 / 2.0, -0.5))),
            constraint=_unit_circle(),
            window=(0.0, TWO_PI),
            codebook_fn=chord_small_codebook,
            error_fn=chord_error,
            v_infinity=None,
        )
    raise ValueError(f"unknown family id {family_id!r}; known: {', '.join(FAMILY_IDS)}")
