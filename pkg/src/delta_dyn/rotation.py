"""Exact arc arithmetic mod 1 for circle rotations.

Everything here runs on exact rationals.  An irrational rotation angle is
represented by a continued-fraction convergent p/q with a declarable
minimum denominator; orbit points {n p/q} are then exact, periodic with
period q, and a single failing time implies infinitely many (n + kq).
Verdicts always name the approximant they were computed for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .errors import ConfigError, DegenerateWindowError, PreconditionError
from .metric import Ball, CirclePt, mod_one
from .verdicts import Status, Verdict

#: default minimum denominator for convergents standing in for irrationals
MIN_DENOMINATOR_DEFAULT = 10**6

#: default resolution of the eta grid in the uniform-radius refutation
ETA_GRID_SIZE_DEFAULT = 64


# ---------------------------------------------------------------------------
# Arcs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Open arc {start + t mod 1 : 0 < t < length} with rational endpoints.

    length = 1 is allowed and denotes the circle minus the start point.
    """

    start: Fraction
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", mod_one(Fraction(self.start)))
        object.__setattr__(self, "length", Fraction(self.length))
        if not 0 < self.length <= 1:
            raise ValueError("arc length must lie in (0, 1]")

    @property
    def end(self) -> Fraction:
        return mod_one(self.start + self.length)

    @property
    def midpoint(self) -> Fraction:
        return mod_one(self.start + self.length / 2)

    def contains(self, t) -> bool:
        off = mod_one(Fraction(t) - self.start)
        return 0 < off < self.length

    def translate(self, t) -> "Arc":
        return Arc(self.start + Fraction(t), self.length)


class FullCircle:
    """Marker for a delta-neighbourhood that covers the whole circle."""

    length = Fraction(1)

    def contains(self, t) -> bool:
        return True

    def __repr__(self) -> str:
        return "FullCircle()"


FULL_CIRCLE = FullCircle()


def arc_from_ball(ball: Ball) -> Arc:
    """Open geodesic ball on the circle as an arc; needs radius < 1/2."""
    if not isinstance(ball.center, CirclePt):
        raise TypeError("expected a circle ball")
    if ball.radius >= Fraction(1, 2):
        raise ValueError("a ball of radius >= 1/2 is the whole circle, not an arc")
    r = Fraction(ball.radius)
    return Arc(Fraction(ball.center.coord) - r, 2 * r)


def ball_from_arc(arc: Arc) -> Ball:
    return Ball(CirclePt(arc.midpoint), arc.length / 2)


def arcs_intersect(a: Arc, b: Arc) -> bool:
    """Exact open-arc intersection test."""
    off = mod_one(b.start - a.start)
    # b starts inside a, or a starts strictly inside b (wrap case)
    if off < a.length:
        return off + b.length > 0  # always true; b extends past its start
    return off + b.length > 1


def arc_overlap_point(a: Arc, b: Arc) -> Fraction | None:
    """A point strictly inside both arcs, or None when they are disjoint.

    Works in the frame of `a`: b occupies (off, off + |b|) with off in
    [0, 1); the overlap with (0, |a|) may come from the direct segment or
    from the wrapped one.
    """
    off = mod_one(b.start - a.start)
    lo, hi = max(off, Fraction(0)), min(off + b.length, a.length)
    if lo < hi:
        return mod_one(a.start + (lo + hi) / 2)
    hi2 = min(off + b.length - 1, a.length)
    if hi2 > 0:
        return mod_one(a.start + hi2 / 2)
    return None


# ---------------------------------------------------------------------------
# delta-fattening and the intersection window
# ---------------------------------------------------------------------------


def delta_fatten(v: Arc, delta) -> Arc | FullCircle:
    """The open delta-neighbourhood of an arc: start - delta, length + 2*delta.

    Returns FULL_CIRCLE once length + 2*delta exceeds 1 (the fattening wraps
    onto itself); length exactly 1 stays a proper arc missing one point.
    """
    delta = Fraction(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    new_len = v.length + 2 * delta
    if new_len > 1:
        return FULL_CIRCLE
    return Arc(v.start - delta, new_len)


@dataclass(frozen=True)
class WindowA:
    """Shift window: the set of t with (U + t) intersecting W, as an exact arc."""

    arc: Arc

    @property
    def length(self) -> Fraction:
        return self.arc.length

    def contains(self, t) -> bool:
        return self.arc.contains(t)


def window_A(u: Arc, w: Arc) -> WindowA:
    """Exact window of translates of U meeting W.

    With W = (a, b) and U = (c, d), the translate U + t meets W exactly for
    t in (a - d, b - c) mod 1, an open arc of length |U| + |W|; this needs
    |U| + |W| < 1, otherwise the complement is empty or degenerate.
    """
    total = u.length + w.length
    if total >= 1:
        raise DegenerateWindowError(
            f"|U| + |W| = {total} >= 1: the window complement is degenerate"
        )
    a, d = w.start, u.start + u.length
    return WindowA(Arc(a - d, total))


# ---------------------------------------------------------------------------
# Exact orbit scanning
# ---------------------------------------------------------------------------


def orbit_point(alpha: Fraction, n: int) -> Fraction:
    """{n * alpha} as an exact rational in [0, 1)."""
    p, q = alpha.numerator, alpha.denominator
    return Fraction(n * p % q, q)


def scan_misses(
    alpha: Fraction, windows: list[WindowA | FullCircle], horizon: int, n_start: int = 1
) -> list[int]:
    """Times n in [n_start, horizon] whose orbit point misses every window."""
    if any(isinstance(w, FullCircle) for w in windows):
        return []
    p, q = alpha.numerator, alpha.denominator
    misses = []
    for n in range(n_start, horizon + 1):
        t = Fraction(n * p % q, q)
        if not any(w.contains(t) for w in windows):
            misses.append(n)
    return misses


def first_miss(
    alpha: Fraction, windows: list[WindowA | FullCircle], n_start: int = 1
) -> int | None:
    """Smallest n >= n_start missing every window, scanning one full period.

    The orbit of p/q is periodic with period q, so a scan over q steps is
    exhaustive: None means no time ever misses.
    """
    if any(isinstance(w, FullCircle) for w in windows):
        return None
    q = alpha.denominator
    for n in range(n_start, n_start + q):
        t = orbit_point(alpha, n)
        if not any(w.contains(t) for w in windows):
            return n
    return None


# ---------------------------------------------------------------------------
# Refutations
# ---------------------------------------------------------------------------


def refute_delta_tm(
    alpha: Fraction, u: Arc, v: Arc, delta, horizon: int, source: str = ""
) -> Verdict:
    """Exhibit failing times: rotated copies of U that miss B_delta(V).

    Requires |U| + |V| + 2*delta < 1, so the window has a nonempty open
    complement.  A failing time n satisfies {n*alpha} outside the window;
    by periodicity of the convergent, n + k*q fails for every k, which is
    what upgrades the finite scan to a refutation.
    """
    alpha = Fraction(alpha)
    delta = Fraction(delta)
    if not u.length + v.length + 2 * delta < 1:
        raise PreconditionError(
            f"|U| + |V| + 2*delta = {u.length + v.length + 2 * delta} must be < 1"
        )
    w = delta_fatten(v, delta)
    window = window_A(u, w)
    failing = scan_misses(alpha, [window], horizon)
    extended = None
    if not failing:
        extended = first_miss(alpha, [window], n_start=horizon + 1)
        if extended is None:  # unreachable when |A| < 1; kept for honesty
            return Verdict(
                Status.INCONCLUSIVE,
                note="no failing time found in a full period of the approximant",
            )
        failing = [extended]
    density = len(failing) / horizon if extended is None else 0.0
    expected_density = 1.0 - float(window.length)
    counter = {
        "pair": 0,
        "first_failing_n": failing[0],
        "failing_count": len(failing) if extended is None else 0,
        "period": alpha.denominator,
        "failing_density": density,
        "expected_density": expected_density,
    }
    note = (
        f"failing times recur with period {alpha.denominator}; "
        f"density {density:.4f} vs 1 - |A| = {expected_density:.4f}"
    )
    if extended is not None:
        note = f"first failing time {extended} lies beyond the horizon; widened scan"
    return Verdict(
        Status.REFUTED,
        counterexamples=(counter,),
        note=note,
        details={
            "alpha_convergent": str(alpha),
            "alpha_source": source,
            "window_length": str(window.length),
            "window_start": str(window.arc.start),
            "failing_times": failing,
            "horizon": horizon,
        },
    )


def default_eta_grid(delta: Fraction, size: int = ETA_GRID_SIZE_DEFAULT) -> list[Fraction]:
    return [delta * i / (size + 1) for i in range(1, size + 1)]


def refute_ufb(
    alpha: Fraction,
    delta=Fraction(1, 2),
    eta_grid: list[Fraction] | None = None,
    horizon: int = 10**4,
    source: str = "",
) -> Verdict:
    """Refute the uniform-radius variant over a finite grid of radii.

    For each eta the target arc V is chosen small enough that B_eta(V) is a
    proper subset of the circle, and failing times are exhibited as in the
    tolerance-mixing refutation.  The existential over eta in (0, delta) is
    negated over the grid only; the note records the grid resolution.
    """
    alpha = Fraction(alpha)
    delta = Fraction(delta)
    if eta_grid is None:
        eta_grid = default_eta_grid(delta)
    if not eta_grid:
        raise ConfigError("eta grid must be nonempty")
    if any(not 0 < e < delta for e in eta_grid):
        raise ConfigError("every eta must lie strictly between 0 and delta")

    rows = []
    skipped = []
    for eta in sorted(Fraction(e) for e in eta_grid):
        v_len = min(Fraction(1, 10), 1 - 2 * eta) / 2
        if v_len + 2 * eta >= 1:
            # fattening covers the circle: this radius cannot separate anything
            skipped.append(str(eta))
            continue
        v = Arc(Fraction(0), v_len)
        w = delta_fatten(v, eta)
        u_len = min(v_len, (1 - w.length) / 2)
        u = Arc(Fraction(0), u_len)
        window = window_A(u, w)
        n0 = first_miss(alpha, [window])
        if n0 is None:  # defensively: no failure within one period
            return Verdict(
                Status.INCONCLUSIVE,
                note=f"eta={eta}: no failing time in one period of the approximant",
            )
        failing = scan_misses(alpha, [window], horizon)
        rows.append(
            {
                "eta": str(eta),
                "v_length": str(v_len),
                "u_length": str(u_len),
                "first_failing_n": n0,
                "failing_count": len(failing),
            }
        )
    if not rows:
        raise ConfigError("every eta in the grid was degenerate")
    return Verdict(
        Status.REFUTED,
        counterexamples=tuple(rows),
        note=(
            f"every radius on a {len(rows)}-point grid in (0, {delta}) admits "
            "failing times; the full existential over eta is approximated by this grid"
        ),
        details={
            "alpha_convergent": str(alpha),
            "alpha_source": source,
            "grid_size": len(rows),
            "skipped_etas": skipped,
            "horizon": horizon,
        },
    )


def equidistribution_count(alpha: Fraction, window: WindowA, horizon: int) -> tuple[int, float]:
    """(#{1 <= n <= horizon : {n*alpha} in A}, horizon * |A|).

    A statistical sanity check against the equidistribution heuristic,
    never a certificate.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    alpha = Fraction(alpha)
    p, q = alpha.numerator, alpha.denominator
    hits = 0
    for n in range(1, horizon + 1):
        if window.contains(Fraction(n * p % q, q)):
            hits += 1
    return hits, horizon * float(window.length)


def image_arc(arc: Arc, alpha, n: int) -> Arc:
    """Exact image of an arc under n rotation steps: a rigid translate."""
    return arc.translate(n * Fraction(alpha))


# ---------------------------------------------------------------------------
# Rational approximants
# ---------------------------------------------------------------------------


def convergents(x: Fraction):
    """Continued-fraction convergents of x, in increasing accuracy."""
    x = Fraction(x)
    a = math.floor(x)
    h_prev, h = 1, a
    k_prev, k = 0, 1
    yield Fraction(h, k)
    rest = x - a
    while rest != 0:
        x = 1 / rest
        a = math.floor(x)
        rest = x - a
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield Fraction(h, k)


def convergent_with_min_denominator(x: Fraction, min_q: int) -> Fraction:
    """First continued-fraction convergent of x with denominator >= min_q."""
    last = None
    for c in convergents(x):
        last = c
        if c.denominator >= min_q:
            return c
    return last  # x itself is rational with a small denominator


def golden_mean_convergent(min_q: int = MIN_DENOMINATOR_DEFAULT) -> tuple[Fraction, str]:
    """Fibonacci-ratio convergent F_k / F_{k+1} of (sqrt(5) - 1) / 2."""
    a, b = 1, 1
    while b < min_q:
        a, b = b, a + b
    frac = Fraction(a, b)
    return frac, f"golden mean (sqrt(5)-1)/2, convergent {a}/{b}"


def parse_angle(spec, min_q: int = MIN_DENOMINATOR_DEFAULT) -> tuple[Fraction, str]:
    """Resolve an angle declaration to (exact rational, source description).

    Accepts "golden", a "p/q" rational string, a decimal string (treated as
    an exact decimal and replaced by a convergent when its denominator is
    large), or an int/Fraction.
    """
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s == "golden":
            return golden_mean_convergent(min_q)
        if "/" in s:
            return Fraction(s), f"rational {s}"
        exact = Fraction(Decimal(s))
        if exact.denominator <= min_q:
            return exact, f"rational {exact}"
        conv = convergent_with_min_denominator(exact, min_q)
        return conv, f"decimal {spec} via convergent {conv}"
    if isinstance(spec, (int, Fraction)):
        return Fraction(spec), f"rational {Fraction(spec)}"
    if isinstance(spec, float):
        exact = Fraction(Decimal(str(spec)))
        conv = convergent_with_min_denominator(exact, min_q)
        return conv, f"decimal {spec} via convergent {conv}"
    raise TypeError(f"cannot interpret angle {spec!r}")
