"""Concrete dynamical systems and their exact iteration.

Systems: the identity map on any space, circle rotation by a rational angle
(standing in for an irrational via a declared convergent), unilateral and
bilateral weighted backward shifts on l^2, and the scalar multiple of the
plain backward shift (lambda*B with |lambda| > 1).

Shifts act on finitely supported vectors exactly: T(e_i) = a_i e_{i-1},
with T(e_0) = 0 in the unilateral case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Union

from .errors import CoefficientOverflowError, UnsupportedSystemError
from .metric import (
    CirclePt,
    OpenRegion,
    Pt,
    Scalar,
    SparseVec,
    Space,
    reciprocal,
    sample_region_points,
)

# iterate() aborts when any coefficient magnitude passes 2**_OVERFLOW_BITS
_OVERFLOW_BITS = 4096


# ---------------------------------------------------------------------------
# Weight sequences
# ---------------------------------------------------------------------------


class WeightSeq:
    """Bounded, nowhere-zero weight sequence; queried lazily by index."""

    def weight(self, i: int) -> Scalar:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def bound(self) -> float:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantWeights(WeightSeq):
    value: Scalar

    def __post_init__(self):
        if self.value == 0:
            raise ValueError("weights must be nonzero")
        if isinstance(self.value, int):
            object.__setattr__(self, "value", Fraction(self.value))

    def weight(self, i: int) -> Scalar:
        return self.value

    @property
    def bound(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class ExplicitWeights(WeightSeq):
    """Explicit window of weights with constant defaults outside it.

    `values[j]` is the weight at index `start + j`; `default_above` applies
    beyond the window and `default_below` (defaults to `default_above`)
    before it, so bilateral shifts can have different asymptotics in the
    two directions.
    """

    values: tuple
    start: int = 1
    default_above: Scalar = 1
    default_below: Scalar = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.default_below is None:
            object.__setattr__(self, "default_below", self.default_above)
        if any(v == 0 for v in self.values) or self.default_above == 0 or self.default_below == 0:
            raise ValueError("weights must be nonzero")

    def weight(self, i: int) -> Scalar:
        j = i - self.start
        if 0 <= j < len(self.values):
            return self.values[j]
        return self.default_above if j >= len(self.values) else self.default_below

    @property
    def bound(self) -> float:
        mags = [abs(v) for v in self.values]
        mags += [abs(self.default_above), abs(self.default_below)]
        return max(mags)


@dataclass(frozen=True)
class BlockOscillatingWeights(WeightSeq):
    """Alternating runs of c and 1/c with run lengths 1, 2, 3, ...

    Partial products climb to c^k at the end of each odd run and return to
    unit scale afterwards, so sup_n prod = infinity while the products do
    not tend to infinity.  Indices i <= 0 (bilateral use) get weight 1.
    """

    factor: Fraction

    def __post_init__(self):
        f = self.factor
        if isinstance(f, int):
            f = Fraction(f)
            object.__setattr__(self, "factor", f)
        if not isinstance(f, Fraction) or f <= 0 or f == 1:
            raise ValueError("factor must be a positive rational != 1")

    def weight(self, i: int) -> Scalar:
        if i <= 0:
            return Fraction(1)
        # run m covers indices (m-1)m/2 < i <= m(m+1)/2
        m = (math.isqrt(8 * i - 7) + 1) // 2
        while m * (m + 1) // 2 < i:
            m += 1
        while (m - 1) * m // 2 >= i:
            m -= 1
        return self.factor if m % 2 == 1 else 1 / self.factor

    @property
    def bound(self) -> float:
        return float(max(self.factor, 1 / self.factor))


# ---------------------------------------------------------------------------
# System definitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityMap:
    space: Space


@dataclass(frozen=True)
class Rotation:
    """x -> x + angle (mod 1) on the circle.

    `angle` is an exact rational.  When it approximates an irrational the
    `source` string declares which one and with what convergent, and every
    verdict derived from this system echoes that declaration.
    """

    angle: Fraction
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "angle", Fraction(self.angle))
        if not 0 < self.angle < 1:
            raise ValueError("rotation angle must lie in (0, 1)")

    @property
    def space(self) -> Space:
        return Space.circle()


@dataclass(frozen=True)
class UnilateralShift:
    weights: WeightSeq
    dim_cap: int = 64

    @property
    def space(self) -> Space:
        return Space.sequence_l2(self.dim_cap)


@dataclass(frozen=True)
class BilateralShift:
    weights: WeightSeq
    dim_cap: int = 64

    @property
    def space(self) -> Space:
        return Space.sequence_l2(self.dim_cap)


@dataclass(frozen=True)
class RolewiczLambdaB:
    """lambda * (backward shift) on l^2(N0); requires |lambda| > 1."""

    lam: Scalar
    dim_cap: int = 64

    def __post_init__(self):
        lam = self.lam
        if isinstance(lam, int):
            lam = Fraction(lam)
            object.__setattr__(self, "lam", lam)
        if not abs(lam) > 1:
            raise ValueError("|lambda| must exceed 1")

    @property
    def weights(self) -> ConstantWeights:
        return ConstantWeights(self.lam)

    @property
    def space(self) -> Space:
        return Space.sequence_l2(self.dim_cap)


SystemDef = Union[IdentityMap, Rotation, UnilateralShift, BilateralShift, RolewiczLambdaB]

_UNILATERAL = (UnilateralShift, RolewiczLambdaB)
_SHIFTS = (UnilateralShift, BilateralShift, RolewiczLambdaB)


def is_shift(sys: SystemDef) -> bool:
    return isinstance(sys, _SHIFTS)


def is_unilateral(sys: SystemDef) -> bool:
    return isinstance(sys, _UNILATERAL)


# ---------------------------------------------------------------------------
# Iteration
# ---------------------------------------------------------------------------


def _apply_shift(sys, x: SparseVec) -> SparseVec:
    unilateral = is_unilateral(sys)
    w = sys.weights
    out = {}
    for i, c in x.items():
        if unilateral and i <= 0:
            continue  # T(e_0) = 0
        out[i - 1] = w.weight(i) * c
    return SparseVec(out)


def apply(sys: SystemDef, x: Pt) -> Pt:
    """One application of the system map; exact on exact inputs."""
    sys.space.check_point(x)
    if isinstance(sys, IdentityMap):
        return x
    if isinstance(sys, Rotation):
        return CirclePt(x.coord + sys.angle)
    return _apply_shift(sys, x)


def _check_magnitudes(x: SparseVec, step: int) -> None:
    for c in x._coeffs.values():
        if isinstance(c, float):
            if math.isinf(c) or math.isnan(c):
                raise CoefficientOverflowError(step)
        elif isinstance(c, complex):
            if math.isinf(abs(c)):
                raise CoefficientOverflowError(step)
        else:
            f = Fraction(c)
            if f.numerator.bit_length() - f.denominator.bit_length() > _OVERFLOW_BITS:
                raise CoefficientOverflowError(step)


def iterate(sys: SystemDef, x: Pt, n: int) -> Pt:
    """n-fold composition; n = 0 returns x unchanged."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    sys.space.check_point(x)
    if isinstance(sys, IdentityMap):
        return x
    if isinstance(sys, Rotation):
        return CirclePt(x.coord + n * sys.angle)
    y = x
    for step in range(1, n + 1):
        y = _apply_shift(sys, y)
        _check_magnitudes(y, step)
    return y


def orbit_segment(sys: SystemDef, x: Pt, n_max: int) -> list[Pt]:
    """[x, f(x), ..., f^n_max(x)], computed incrementally."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    sys.space.check_point(x)
    seg = [x]
    for step in range(1, n_max + 1):
        nxt = apply(sys, seg[-1])
        if isinstance(nxt, SparseVec):
            _check_magnitudes(nxt, step)
        seg.append(nxt)
    return seg


def shift_right_inverse(sys: SystemDef, n: int, w: SparseVec) -> SparseVec:
    """The natural right inverse of T^n: e_i -> e_{i+n} / (a_{i+1} ... a_{i+n}).

    Satisfies T^n(S_n w) = w exactly for every finitely supported w (both
    lateralities).  For constant weights lambda this is the forward shift
    scaled by lambda^{-n}.
    """
    if not is_shift(sys):
        raise UnsupportedSystemError("right inverse is defined for shifts only")
    if n < 0:
        raise ValueError("n must be nonnegative")
    weights = sys.weights
    out = {}
    for i, c in w.items():
        denom = 1
        for j in range(i + 1, i + n + 1):
            denom = denom * weights.weight(j)
        out[i + n] = c * reciprocal(denom) if denom != 1 else c
    return SparseVec(out)


def image_of_region_sample(
    sys: SystemDef, region: OpenRegion, n: int, samples: int, seed: int
) -> list[Pt]:
    """Seeded finite stand-in for f^n(region): sample, then push forward."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = Random(f"image:{seed}")
    pts = sample_region_points(sys.space, region, samples, rng)
    return [iterate(sys, p, n) for p in pts]
