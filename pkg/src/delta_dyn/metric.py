"""Metric-space layer: spaces, points, ball regions, distances, neighbourhoods.

Three concrete spaces are supported:

* the unit circle R/Z with the geodesic metric (diameter 1/2),
* the Euclidean plane under the capped metric min{1, rho} (diameter 1),
* l^2 sequence space over N0 or Z, carried by finitely supported vectors.

Circle coordinates and sequence coefficients may be `Fraction`s, in which
case all distance comparisons are exact; floats degrade gracefully and the
checkers compensate with a guard margin.  Open sets are represented as
finite unions of open balls (arcs on the circle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from random import Random
from typing import Iterable, Mapping, Union

from .errors import SpaceMismatchError, UnsupportedSpaceError
from .verdicts import Status, Verdict

Scalar = Union[int, Fraction, float, complex]
Real = Union[int, Fraction, float]

#: default guard margin for floating-point comparisons inside checkers
GUARD_DEFAULT = Fraction(1, 10**9)


def is_exact(x) -> bool:
    """True when x carries exact rational arithmetic."""
    return isinstance(x, (int, Fraction))


def abs_sq(c: Scalar):
    """|c|^2, exact for int/Fraction, without a square root."""
    if isinstance(c, complex):
        return c.real * c.real + c.imag * c.imag
    return c * c


def reciprocal(c: Scalar) -> Scalar:
    if isinstance(c, int):
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    return 1.0 / c if not isinstance(c, complex) else 1 / c


def mod_one(x: Real) -> Real:
    """Reduce into [0, 1), preserving exactness."""
    return x - math.floor(x)


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CirclePt:
    """A point of R/Z; the coordinate is reduced mod 1 into [0, 1)."""

    coord: Real

    def __post_init__(self):
        object.__setattr__(self, "coord", mod_one(self.coord))


@dataclass(frozen=True)
class PlanePt:
    x: float
    y: float


class SparseVec:
    """Finitely supported coefficient sequence (indices in N0 or Z).

    Immutable after construction; zero coefficients are dropped so equality
    and support are canonical.  Arithmetic never truncates: results carry
    every nonzero coefficient exactly.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Union[Mapping[int, Scalar], Iterable[tuple]] = ()):
        items = coeffs.items() if hasattr(coeffs, "items") else coeffs
        d = {}
        for i, c in items:
            if c != 0:
                d[int(i)] = c
        self._coeffs = d

    @classmethod
    def basis(cls, i: int, c: Scalar = 1) -> "SparseVec":
        return cls({i: c})

    @classmethod
    def zero(cls) -> "SparseVec":
        return cls()

    def coeff(self, i: int) -> Scalar:
        return self._coeffs.get(i, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._coeffs))

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def max_index(self) -> int:
        """Largest support index; -1 for the zero vector."""
        return max(self._coeffs) if self._coeffs else -1

    def min_index(self) -> int:
        return min(self._coeffs) if self._coeffs else 0

    def items(self):
        return sorted(self._coeffs.items())

    def __add__(self, other: "SparseVec") -> "SparseVec":
        d = dict(self._coeffs)
        for i, c in other._coeffs.items():
            s = d.get(i, 0) + c
            if s == 0:
                d.pop(i, None)
            else:
                d[i] = s
        out = SparseVec.zero()
        out._coeffs = d
        return out

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self + other.scale(-1)

    def scale(self, s: Scalar) -> "SparseVec":
        if s == 0:
            return SparseVec.zero()
        out = SparseVec.zero()
        out._coeffs = {i: c * s for i, c in self._coeffs.items()}
        return out

    def shift_indices(self, offset: int) -> "SparseVec":
        out = SparseVec.zero()
        out._coeffs = {i + offset: c for i, c in self._coeffs.items()}
        return out

    def norm_sq(self):
        """Exact squared l^2 norm (a Fraction/int when all coefficients are)."""
        total = 0
        for c in self._coeffs.values():
            total += abs_sq(c)
        return total

    def norm(self) -> float:
        return math.sqrt(float(self.norm_sq()))

    def to_float(self) -> dict[int, float]:
        return {i: float(c) for i, c in self._coeffs.items()}

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseVec) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        if not self._coeffs:
            return "SparseVec(0)"
        body = ", ".join(f"{i}: {c}" for i, c in self.items())
        return f"SparseVec({{{body}}})"


Pt = Union[CirclePt, PlanePt, SparseVec]


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


class SpaceKind(Enum):
    CIRCLE = "circle"
    CAPPED_PLANE = "capped_plane"
    SEQUENCE_L2 = "sequence_l2"


_POINT_TYPE = {
    SpaceKind.CIRCLE: CirclePt,
    SpaceKind.CAPPED_PLANE: PlanePt,
    SpaceKind.SEQUENCE_L2: SparseVec,
}


@dataclass(frozen=True)
class Space:
    """A concrete metric space; `dim_cap` bounds sequence-space working indices."""

    kind: SpaceKind
    dim_cap: int = 64

    @classmethod
    def circle(cls) -> "Space":
        return cls(SpaceKind.CIRCLE)

    @classmethod
    def capped_plane(cls) -> "Space":
        return cls(SpaceKind.CAPPED_PLANE)

    @classmethod
    def sequence_l2(cls, dim_cap: int = 64) -> "Space":
        return cls(SpaceKind.SEQUENCE_L2, dim_cap)

    @property
    def diameter(self) -> Real:
        if self.kind is SpaceKind.CIRCLE:
            return Fraction(1, 2)
        if self.kind is SpaceKind.CAPPED_PLANE:
            return 1
        return math.inf

    def check_point(self, p: Pt) -> None:
        if not isinstance(p, _POINT_TYPE[self.kind]):
            raise SpaceMismatchError(
                f"point {p!r} does not belong to a {self.kind.value} space"
            )


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    """Open metric ball; on the circle this is an open arc of length 2*radius."""

    center: Pt
    radius: Real

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be strictly positive")


@dataclass(frozen=True)
class OpenRegion:
    """A nonempty finite union of open balls, all in one space."""

    balls: tuple[Ball, ...]

    def __post_init__(self):
        if not self.balls:
            raise ValueError("a region needs at least one ball")
        kinds = {type(b.center) for b in self.balls}
        if len(kinds) > 1:
            raise SpaceMismatchError("all ball centers must live in the same space")

    @classmethod
    def single(cls, center: Pt, radius: Real) -> "OpenRegion":
        return cls((Ball(center, radius),))


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def circle_dist(a: Real, b: Real) -> Real:
    d = abs(mod_one(a) - mod_one(b))
    return min(d, 1 - d)


def dist(space: Space, x: Pt, y: Pt) -> Real:
    """Metric of the space; capped at 1 on the plane, geodesic on the circle."""
    space.check_point(x)
    space.check_point(y)
    if space.kind is SpaceKind.CIRCLE:
        return circle_dist(x.coord, y.coord)
    if space.kind is SpaceKind.CAPPED_PLANE:
        return min(1.0, math.hypot(x.x - y.x, x.y - y.y))
    return (x - y).norm()


def dist_sq_exact(x: SparseVec, y: SparseVec):
    """Exact squared l^2 distance, for comparisons that must not round."""
    return (x - y).norm_sq()


def dist_to_region(space: Space, x: Pt, region: OpenRegion) -> Real:
    """Distance from x to the open union; exact for these ball regions."""
    best = None
    for ball in region.balls:
        d = dist(space, x, ball.center)
        gap = d - ball.radius
        if isinstance(gap, float) or isinstance(d, float):
            val = max(0.0, gap)
        else:
            val = max(0, gap)
        if best is None or val < best:
            best = val
        if best == 0:
            break
    return best


def in_delta_neighborhood(space: Space, x: Pt, region: OpenRegion, delta: Real) -> bool:
    """Strict membership test x in B_delta(region)."""
    if not delta > 0:
        raise ValueError("delta must be strictly positive")
    return dist_to_region(space, x, region) < delta


def region_gap(space: Space, u: OpenRegion, v: OpenRegion) -> Real:
    """inf distance between the two open unions (exact ball-pair geometry)."""
    best = None
    for bu in u.balls:
        for bv in v.balls:
            d = dist(space, bu.center, bv.center)
            g = d - bu.radius - bv.radius
            val = max(0.0, g) if isinstance(g, float) else max(0, g)
            if best is None or val < best:
                best = val
    if space.kind is SpaceKind.CAPPED_PLANE:
        best = min(1, best)
    return best


# ---------------------------------------------------------------------------
# B_delta(V) = M decision
# ---------------------------------------------------------------------------


def _circle_covered_by_arcs(arcs: list[tuple[Real, Real]]) -> tuple[bool, Real]:
    """Decide whether open arcs (start, length) cover R/Z.

    The complement of the union is closed with boundary inside the endpoint
    set, so the circle is covered iff every endpoint lies strictly inside
    some arc.  Returns (covered, witness uncovered point or None).
    """
    for _, length in arcs:
        if length > 1:
            return True, None
    endpoints = []
    for start, length in arcs:
        endpoints.append(mod_one(start))
        endpoints.append(mod_one(start + length))

    def covered(p) -> bool:
        for start, length in arcs:
            off = mod_one(p - start)
            if 0 < off < length:
                return True
        return False

    for p in endpoints:
        if not covered(p):
            return False, p
    return True, None


def neighborhood_is_whole_space(space: Space, region: OpenRegion, delta: Real) -> Verdict:
    """Decide B_delta(region) == whole space.

    Above the diameter this is automatic.  On the circle the fattened arcs
    are intersected exactly; on the capped plane a bounded union can never
    cover, so any delta <= 1 refutes with an explicit far point.
    """
    if not delta > 0:
        raise ValueError("delta must be strictly positive")
    if space.kind is SpaceKind.SEQUENCE_L2:
        raise UnsupportedSpaceError("sequence space has infinite diameter")
    if delta > space.diameter:
        return Verdict(
            Status.CERTIFIED,
            note=f"delta={delta} exceeds the space diameter {space.diameter}",
            details={"analytic": "diameter"},
        )
    if space.kind is SpaceKind.CAPPED_PLANE:
        # bounded union of rho-balls; a point far enough away sits at capped
        # distance exactly 1 >= delta from the region
        far = 1.0 + delta + max(
            abs(b.center.x) + abs(b.center.y) + float(b.radius) for b in region.balls
        )
        return Verdict(
            Status.REFUTED,
            counterexamples=(
                {"reason": "region is bounded, the plane is not", "point": PlanePt(far, 0.0)},
            ),
            note="capped distance from far points equals 1 >= delta",
        )
    arcs = [
        (b.center.coord - (b.radius + delta), 2 * b.radius + 2 * delta)
        for b in region.balls
    ]
    exact = all(is_exact(s) and is_exact(l) for s, l in arcs)
    covered, miss = _circle_covered_by_arcs(arcs)
    if covered:
        return Verdict(Status.CERTIFIED, note="fattened arcs cover the circle exactly")
    if exact:
        return Verdict(
            Status.REFUTED,
            counterexamples=({"uncovered_point": miss},),
            note="exact arc arithmetic: fattening leaves the circle uncovered",
        )
    return Verdict(
        Status.INCONCLUSIVE,
        note="float endpoints too close to call; supply rational data for an exact verdict",
        details={"closest_uncovered": miss},
    )


# ---------------------------------------------------------------------------
# Seeded region sampling
# ---------------------------------------------------------------------------

_SAMPLE_GRID = 2**20


def _rational_unit(rng: Random) -> Fraction:
    return Fraction(rng.randrange(1, _SAMPLE_GRID), _SAMPLE_GRID)


def _sqrt_upper_bound(s: Fraction) -> Fraction:
    """A rational upper bound on sqrt(s) for exact strict-inclusion scaling."""
    s = Fraction(s)
    p, q = s.numerator, s.denominator
    return Fraction(math.isqrt(p * q) + 1, q)


def sample_ball_point(space: Space, ball: Ball, rng: Random) -> Pt:
    """One point strictly inside the ball; rational wherever the data is."""
    if space.kind is SpaceKind.CIRCLE:
        off = (2 * _rational_unit(rng) - 1) * ball.radius
        return CirclePt(ball.center.coord + off)
    if space.kind is SpaceKind.CAPPED_PLANE:
        r = float(ball.radius)
        while True:
            dx = rng.uniform(-r, r)
            dy = rng.uniform(-r, r)
            if dx * dx + dy * dy < r * r:
                return PlanePt(ball.center.x + dx, ball.center.y + dy)
    center: SparseVec = ball.center
    indices = list(center.support)
    target = min(space.dim_cap, len(indices) + 2)
    nxt = center.max_index() + 1
    while len(indices) < target:
        indices.append(nxt)
        nxt += 1
    if not indices:
        indices = [0, 1]
    u = SparseVec(
        {i: Fraction(rng.randrange(-_SAMPLE_GRID, _SAMPLE_GRID), _SAMPLE_GRID) for i in indices}
    )
    if u.is_zero:
        return center
    if is_exact(ball.radius):
        scale = _rational_unit(rng) * Fraction(ball.radius) / _sqrt_upper_bound(u.norm_sq())
    else:
        scale = float(_rational_unit(rng)) * ball.radius / u.norm() * 0.999
    return center + u.scale(scale)


def sample_region_points(space: Space, region: OpenRegion, count: int, rng: Random) -> list[Pt]:
    """Deterministic (seeded) sample of `count` points of the region."""
    pts = []
    for _ in range(count):
        ball = region.balls[rng.randrange(len(region.balls))]
        pts.append(sample_ball_point(space, ball, rng))
    return pts
