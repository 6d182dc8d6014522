"""Three-valued certifiers for tolerance-relaxed transitivity and mixing.

Every checker quantifies over a finite family of (U, V) region pairs and a
finite time horizon, never over all open sets: verdicts are relative to
the supplied cover and say so.  Certification always goes through witness
replay (iterate, then measure); refutation is reserved for exact engines:

* identity maps, whose iterates never move, decided by ball geometry;
* rotations by an exact rational angle, decided by arc-window membership,
  where one failing time implies infinitely many by periodicity.

"For all n >= N" claims certified only by a finite scan are labelled
"up to horizon"; an analytic argument (neighbourhood covering the whole
space, constant orbits, exhausted rotation period) upgrades them to
genuine unbounded claims.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable, Sequence

from .errors import ConfigError, UnsupportedSpaceError
from .metric import (
    GUARD_DEFAULT,
    Ball,
    CirclePt,
    OpenRegion,
    PlanePt,
    Pt,
    SparseVec,
    Space,
    SpaceKind,
    circle_dist,
    dist,
    dist_sq_exact,
    dist_to_region,
    is_exact,
    mod_one,
    neighborhood_is_whole_space,
    region_gap,
    sample_region_points,
)
from .rotation import (
    FULL_CIRCLE,
    Arc,
    arc_from_ball,
    arc_overlap_point,
    delta_fatten,
    first_miss,
    orbit_point,
    scan_misses,
    window_A,
)
from .systems import (
    IdentityMap,
    Rotation,
    SystemDef,
    is_shift,
    iterate,
    shift_right_inverse,
)
from .verdicts import Status, Verdict, Witness

THREADS_ENV = "DELTA_DYN_THREADS"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckConfig:
    """Shared checker configuration.

    `eta` is the uniform radius of the from-below variant and must sit
    strictly inside (0, delta) when present.  `guard` is subtracted from
    every certification threshold so floating-point near-misses never
    produce an unsound certificate.
    """

    delta: object
    horizon: int
    pair_cover: tuple[tuple[OpenRegion, OpenRegion], ...]
    eta: object = None
    samples_per_region: int = 8
    seed: int = 0
    guard: object = GUARD_DEFAULT

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError("delta must be strictly positive")
        if self.eta is not None and not 0 < self.eta < self.delta:
            raise ConfigError("eta must lie strictly between 0 and delta")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        cover = tuple(tuple(p) for p in self.pair_cover)
        object.__setattr__(self, "pair_cover", cover)
        if not cover:
            raise ConfigError("pair cover must be nonempty")
        if self.samples_per_region < 1:
            raise ConfigError("need at least one sample per region")
        if self.guard < 0:
            raise ConfigError("guard must be nonnegative")


def default_pair_cover(space: Space) -> tuple[tuple[OpenRegion, OpenRegion], ...]:
    """8 reference regions, paired every-with-every (64 ordered pairs)."""
    radius = Fraction(1, 32)
    if space.kind is SpaceKind.CIRCLE:
        regions = [
            OpenRegion.single(CirclePt(Fraction(k, 8)), radius) for k in range(8)
        ]
    elif space.kind is SpaceKind.CAPPED_PLANE:
        import math

        regions = [
            OpenRegion.single(
                PlanePt(
                    0.5 + 0.25 * math.cos(2 * math.pi * k / 8),
                    0.5 + 0.25 * math.sin(2 * math.pi * k / 8),
                ),
                radius,
            )
            for k in range(8)
        ]
    else:
        regions = [OpenRegion.single(SparseVec.basis(k), radius) for k in range(8)]
    return tuple((u, v) for u in regions for v in regions)


# ---------------------------------------------------------------------------
# Per-pair outcomes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairOutcome:
    index: int
    status: Status
    witnesses: tuple[Witness, ...] = ()
    refutation: dict | None = None
    threshold_n: int | None = None  # N for eventual claims, first hit n otherwise
    analytic: bool = False          # True when the claim holds beyond the horizon
    closest_miss: float | None = None
    note: str = ""


def _exactish(*values) -> bool:
    return all(is_exact(v) for v in values)


def _below(value, bound) -> bool:
    """value < bound with exact arithmetic when both sides allow it."""
    if _exactish(value, bound):
        return value < bound
    return float(value) < float(bound)


def _verify_witness(
    sys: SystemDef, x: Pt, n: int, target: OpenRegion, cert_threshold
) -> tuple[bool, object]:
    """Replay a candidate witness through iterate + distance measurement."""
    achieved = dist_to_region(sys.space, iterate(sys, x, n), target)
    return _below(achieved, cert_threshold), achieved


def _move_toward(space: Space, src: Ball, dst: Ball, amount) -> Pt | None:
    """A point of `src` moved `amount` of the way toward `dst`'s center."""
    if space.kind is SpaceKind.CIRCLE:
        diff = mod_one(dst.center.coord - src.center.coord)
        signed = diff if diff <= Fraction(1, 2) else diff - 1
        if signed == 0:
            return src.center
        step = amount if signed > 0 else -amount
        return CirclePt(src.center.coord + step)
    if space.kind is SpaceKind.CAPPED_PLANE:
        dx = dst.center.x - src.center.x
        dy = dst.center.y - src.center.y
        norm = (dx * dx + dy * dy) ** 0.5
        if norm == 0:
            return src.center
        f = float(amount) / norm
        return PlanePt(src.center.x + f * dx, src.center.y + f * dy)
    direction = dst.center - src.center
    norm_sq = direction.norm_sq()
    if norm_sq == 0:
        return src.center
    f = Fraction(float(amount) / direction.norm()).limit_denominator(10**12)
    return src.center + direction.scale(f)


def _static_witness(
    sys: SystemDef, u: OpenRegion, v: OpenRegion, cert_threshold
) -> tuple[Pt, object] | None:
    """A point of U within the threshold of V, measured at time 0.

    Construct-and-verify: candidate points are checked by replay, so the
    geometry used to propose them never needs to be trusted.
    """
    space = sys.space
    best = None
    for bu in u.balls:
        for bv in v.balls:
            g = dist(space, bu.center, bv.center) - bu.radius - bv.radius
            if best is None or float(g) < float(best[0]):
                best = (g, bu, bv)
    _, bu, bv = best
    centers_gap = dist(space, bu.center, bv.center)
    gap = region_gap(space, u, v)
    if _exactish(gap, cert_threshold):
        target = (gap + cert_threshold) / 2
    else:
        target = (float(gap) + float(cert_threshold)) / 2
    moves = [0, centers_gap - bv.radius - target]
    moves += [bu.radius * Fraction(s, 256) for s in (255, 128)]
    for m in moves:
        if m < 0:
            continue
        if m >= bu.radius:
            m = bu.radius * Fraction(255, 256)
        x = bu.center if m == 0 else _move_toward(space, bu, bv, m)
        if x is None:
            continue
        if not any(_below(dist(space, x, b.center), b.radius) for b in u.balls):
            continue
        ok, achieved = _verify_witness(sys, x, 0, v, cert_threshold)
        if ok:
            return x, achieved
    return None


def _static_pair(
    sys: SystemDef, idx: int, u: OpenRegion, v: OpenRegion, threshold, guard
) -> PairOutcome:
    """Exact decision when f^n(U) = U for every n (identity map)."""
    space = sys.space
    g = region_gap(space, u, v)
    cert_threshold = threshold - guard
    if _exactish(g, threshold, guard):
        certifiable = g < cert_threshold
        refutable = g >= threshold
    else:
        gf, tf, gdf = float(g), float(threshold), float(guard)
        certifiable = gf < tf - gdf
        refutable = gf > tf + gdf
    if certifiable:
        found = _static_witness(sys, u, v, cert_threshold)
        if found is not None:
            x, achieved = found
            return PairOutcome(
                idx,
                Status.CERTIFIED,
                witnesses=(Witness(idx, 0, x, achieved),),
                threshold_n=0,
                analytic=True,
                note="orbit is constant; the time-0 witness settles every n",
            )
        return PairOutcome(idx, Status.INCONCLUSIVE, closest_miss=float(g))
    if refutable:
        return PairOutcome(
            idx,
            Status.REFUTED,
            refutation={
                "pair": idx,
                "reason": "iterates never move U and its gap to V meets or exceeds the threshold",
                "gap": float(g),
                "threshold": float(threshold),
            },
        )
    return PairOutcome(
        idx,
        Status.INCONCLUSIVE,
        closest_miss=float(g),
        note="gap inside the guard band",
    )


# ---------------------------------------------------------------------------
# Rotation pairs (exact arc engine)
# ---------------------------------------------------------------------------


class _AllButOnePoint:
    """Window for the singular case |U| + |W| = 1: one translate fails."""

    def __init__(self, u_arc: Arc, fat: Arc):
        self.bad = mod_one(fat.start - (u_arc.start + u_arc.length))

    def contains(self, t) -> bool:
        return mod_one(Fraction(t)) != self.bad


def _rotation_windows(u: OpenRegion, v: OpenRegion, threshold):
    """Per sub-pair windows; `always` means some sub-pair works at every n."""
    windows = []
    always = False
    for bu in u.balls:
        for bv in v.balls:
            u_arc = arc_from_ball(bu)
            fat = delta_fatten(arc_from_ball(bv), threshold)
            if fat is FULL_CIRCLE or u_arc.length + fat.length > 1:
                always = True
                continue
            if u_arc.length + fat.length == 1:
                windows.append((_AllButOnePoint(u_arc, fat), bu, bv, u_arc, fat))
                continue
            windows.append((window_A(u_arc, fat), bu, bv, u_arc, fat))
    return windows, always


def _rotation_witness_at(
    sys: Rotation, n: int, bu: Ball, u_arc: Arc, fat, v: OpenRegion, cert_threshold
) -> tuple[Pt, object] | None:
    t_n = orbit_point(sys.angle, n)
    moved = u_arc.translate(t_n)  # exact image of the U-arc after n steps
    if fat is FULL_CIRCLE:
        y = moved.midpoint
    else:
        y = arc_overlap_point(moved, fat)
        if y is None:
            return None
    x = CirclePt(y - t_n)
    ok, achieved = _verify_witness(sys, x, n, v, cert_threshold)
    if ok and circle_dist(x.coord, Fraction(bu.center.coord)) < bu.radius:
        return x, achieved
    return None


def _rotation_pair(
    sys: Rotation,
    idx: int,
    u: OpenRegion,
    v: OpenRegion,
    threshold,
    guard,
    horizon: int,
    want_all_n: bool,
) -> PairOutcome:
    threshold = Fraction(threshold)
    guard = Fraction(guard)
    cert_threshold = threshold - guard
    windows, always = _rotation_windows(u, v, threshold)

    def witness_at(n: int) -> tuple[Pt, object] | None:
        t_n = orbit_point(sys.angle, n)
        for window, bu, _bv, u_arc, fat in windows:
            if window.contains(t_n):
                found = _rotation_witness_at(sys, n, bu, u_arc, fat, v, cert_threshold)
                if found is not None:
                    return found
        # 'always' sub-pairs have no window entry; build from the raw arcs
        for bu in u.balls:
            for bv in v.balls:
                u_arc = arc_from_ball(bu)
                fat = delta_fatten(arc_from_ball(bv), threshold)
                if fat is FULL_CIRCLE or u_arc.length + fat.length > 1:
                    found = _rotation_witness_at(sys, n, bu, u_arc, fat, v, cert_threshold)
                    if found is not None:
                        return found
        return None

    if always:
        found = witness_at(0)
        if found is not None:
            x, achieved = found
            return PairOutcome(
                idx,
                Status.CERTIFIED,
                witnesses=(Witness(idx, 0, x, achieved),),
                threshold_n=0,
                analytic=True,
                note="the fattened target meets every translate of U",
            )
        return PairOutcome(idx, Status.INCONCLUSIVE, note="analytic witness construction failed")

    plain = [w for (w, *_rest) in windows]
    if want_all_n:
        miss = first_miss(sys.angle, plain, n_start=0)
        if miss is None:
            found = witness_at(0)
            if found is None:
                return PairOutcome(idx, Status.INCONCLUSIVE, note="witness construction failed")
            x, achieved = found
            return PairOutcome(
                idx,
                Status.CERTIFIED,
                witnesses=(Witness(idx, 0, x, achieved),),
                threshold_n=0,
                analytic=True,
                note="no failing time in one full period of the approximant",
            )
        failing = scan_misses(sys.angle, plain, horizon, n_start=0) or [miss]
        return PairOutcome(
            idx,
            Status.REFUTED,
            refutation={
                "pair": idx,
                "first_failing_n": miss,
                "failing_times_to_horizon": failing[:1000],
                "failing_count": len(failing),
                "period": sys.angle.denominator,
                "reason": "failing times recur with the approximant period",
            },
        )

    closest = None
    for n in range(0, horizon + 1):
        t_n = orbit_point(sys.angle, n)
        if any(w.contains(t_n) for w in plain):
            found = witness_at(n)
            if found is not None:
                x, achieved = found
                return PairOutcome(
                    idx,
                    Status.CERTIFIED,
                    witnesses=(Witness(idx, n, x, achieved),),
                    threshold_n=n,
                )
        for w in plain:
            if hasattr(w, "arc"):
                gap = circle_dist(t_n, w.arc.midpoint) - w.arc.length / 2
                gapf = float(max(0, gap))
                if closest is None or gapf < closest:
                    closest = gapf
    if horizon + 1 >= sys.angle.denominator:
        return PairOutcome(
            idx,
            Status.REFUTED,
            refutation={
                "pair": idx,
                "reason": "exhausted one full period of the approximant without a hit",
                "period": sys.angle.denominator,
            },
        )
    return PairOutcome(idx, Status.INCONCLUSIVE, closest_miss=closest)


# ---------------------------------------------------------------------------
# Sampled pairs with constructed candidates (shifts)
# ---------------------------------------------------------------------------


def _pair_rng(cfg: CheckConfig, idx: int) -> Random:
    return Random(f"pair:{cfg.seed}:{idx}")


def _sampled_pair(
    sys: SystemDef,
    cfg: CheckConfig,
    idx: int,
    u: OpenRegion,
    v: OpenRegion,
    threshold,
    want_all_n: bool,
) -> PairOutcome:
    """Witness search by seeded sampling plus right-inverse construction.

    Samples of U are iterated incrementally across the n-scan; for shifts
    an additional candidate center(U) + S_n(center(V)) is proposed at each
    n.  Candidates only ever certify through replay.
    """
    space = sys.space
    cert_threshold = threshold - cfg.guard
    rng = _pair_rng(cfg, idx)
    samples = sample_region_points(space, u, cfg.samples_per_region, rng)
    states = list(samples)

    constructed: Callable[[int], Pt | None]
    if is_shift(sys):
        cu, ru = u.balls[0].center, u.balls[0].radius
        cv = v.balls[0].center

        def constructed(n: int) -> Pt | None:
            shifted = shift_right_inverse(sys, n, cv)
            x = cu + shifted
            inside_sq = dist_sq_exact(x, cu)
            if _exactish(inside_sq, ru):
                if inside_sq >= Fraction(ru) ** 2:
                    return None
            elif float(inside_sq) ** 0.5 >= float(ru):
                return None
            return x
    else:
        def constructed(n: int) -> Pt | None:
            return None

    hits: dict[int, Witness] = {}
    closest = None
    for n in range(0, cfg.horizon + 1):
        got = None
        x = constructed(n)
        if x is not None:
            ok, achieved = _verify_witness(sys, x, n, v, cert_threshold)
            if ok:
                got = Witness(idx, n, x, achieved)
        if got is None:
            for s_idx, state in enumerate(states):
                achieved = dist_to_region(space, state, v)
                if _below(achieved, cert_threshold):
                    got = Witness(idx, n, samples[s_idx], achieved)
                    break
                af = float(achieved)
                if closest is None or af < closest:
                    closest = af
        if got is not None:
            hits[n] = got
            if not want_all_n:
                return PairOutcome(
                    idx, Status.CERTIFIED, witnesses=(got,), threshold_n=n
                )
        states = [iterate(sys, s, 1) for s in states]

    if not want_all_n:
        return PairOutcome(idx, Status.INCONCLUSIVE, closest_miss=closest)

    missing = [n for n in range(cfg.horizon + 1) if n not in hits]
    if not missing:
        start_n = 0
    elif missing[-1] < cfg.horizon:
        start_n = missing[-1] + 1
    else:
        return PairOutcome(
            idx,
            Status.INCONCLUSIVE,
            closest_miss=closest,
            note="no tail of fully witnessed times inside the horizon",
        )
    wits = (hits[start_n],) if start_n == cfg.horizon else (hits[start_n], hits[cfg.horizon])
    return PairOutcome(
        idx,
        Status.CERTIFIED,
        witnesses=wits,
        threshold_n=start_n,
        analytic=False,
        note="every time from N through the horizon carries a replayed witness",
    )


# ---------------------------------------------------------------------------
# Dispatch and aggregation
# ---------------------------------------------------------------------------


def _pair_outcome(
    sys: SystemDef,
    cfg: CheckConfig,
    idx: int,
    u: OpenRegion,
    v: OpenRegion,
    threshold,
    want_all_n: bool,
) -> PairOutcome:
    if want_all_n:
        try:
            whole = neighborhood_is_whole_space(sys.space, v, threshold)
        except UnsupportedSpaceError:
            whole = None
        if whole is not None and whole.certified:
            found = _static_witness(sys, u, v, threshold - cfg.guard)
            if found is not None:
                x, achieved = found
                return PairOutcome(
                    idx,
                    Status.CERTIFIED,
                    witnesses=(Witness(idx, 0, x, achieved),),
                    threshold_n=0,
                    analytic=True,
                    note="the fattened target is the whole space, so every time works",
                )
    if isinstance(sys, IdentityMap):
        return _static_pair(sys, idx, u, v, threshold, cfg.guard)
    if isinstance(sys, Rotation):
        return _rotation_pair(
            sys, idx, u, v, threshold, cfg.guard, cfg.horizon, want_all_n
        )
    return _sampled_pair(sys, cfg, idx, u, v, threshold, want_all_n)


def _map_pairs(fn, pairs) -> list[PairOutcome]:
    threads = int(os.environ.get(THREADS_ENV, "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(len(pairs))))
    return [fn(i) for i in range(len(pairs))]


def _aggregate(
    outcomes: list[PairOutcome], claim: str, threshold, cfg: CheckConfig, want_all_n: bool
) -> Verdict:
    refuted = [o for o in outcomes if o.status is Status.REFUTED]
    details = {
        "threshold": threshold,
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "pairs": len(outcomes),
        "per_pair": [
            {
                "pair": o.index,
                "status": o.status.value,
                "N": o.threshold_n,
                "analytic": o.analytic,
                "closest_miss": o.closest_miss,
            }
            for o in outcomes
        ],
    }
    if refuted:
        return Verdict(
            Status.REFUTED,
            counterexamples=tuple(o.refutation for o in refuted),
            note=f"{claim} fails on pair(s) {[o.index for o in refuted]}",
            details=details,
        )
    if all(o.status is Status.CERTIFIED for o in outcomes):
        witnesses = tuple(w for o in outcomes for w in o.witnesses)
        if want_all_n and not all(o.analytic for o in outcomes):
            note = (
                f"{claim} certified up to horizon {cfg.horizon}; "
                "tails beyond the horizon are not claimed"
            )
        elif want_all_n:
            note = f"{claim} certified for every time (per-pair analytic arguments)"
        else:
            note = f"{claim} certified with one replayed witness per pair"
        return Verdict(Status.CERTIFIED, witnesses=witnesses, note=note, details=details)
    bad = [o.index for o in outcomes if o.status is not Status.CERTIFIED]
    return Verdict(
        Status.INCONCLUSIVE,
        note=f"{claim}: pairs {bad} neither witnessed nor exactly refuted",
        details=details,
    )


def check_delta_tt(sys: SystemDef, cfg: CheckConfig) -> Verdict:
    """Some iterate of U meets the delta-neighbourhood of V, per cover pair."""
    outcomes = _map_pairs(
        lambda i: _pair_outcome(
            sys, cfg, i, cfg.pair_cover[i][0], cfg.pair_cover[i][1], cfg.delta, False
        ),
        cfg.pair_cover,
    )
    return _aggregate(outcomes, "tolerance transitivity", cfg.delta, cfg, False)


def check_delta_tm(sys: SystemDef, cfg: CheckConfig) -> Verdict:
    """Beyond some per-pair N, every iterate of U meets B_delta(V)."""
    outcomes = _map_pairs(
        lambda i: _pair_outcome(
            sys, cfg, i, cfg.pair_cover[i][0], cfg.pair_cover[i][1], cfg.delta, True
        ),
        cfg.pair_cover,
    )
    return _aggregate(outcomes, "tolerance mixing", cfg.delta, cfg, True)


def check_ufb(sys: SystemDef, cfg: CheckConfig) -> Verdict:
    """Tolerance mixing at the single uniform radius eta < delta.

    Certification at eta implies certification at delta with the very same
    witnesses; the closing assertion checks that explicitly.
    """
    if cfg.eta is None:
        raise ConfigError("the uniform-from-below check needs cfg.eta")
    outcomes = _map_pairs(
        lambda i: _pair_outcome(
            sys, cfg, i, cfg.pair_cover[i][0], cfg.pair_cover[i][1], cfg.eta, True
        ),
        cfg.pair_cover,
    )
    verdict = _aggregate(
        outcomes, f"uniform-radius mixing at eta={cfg.eta}", cfg.eta, cfg, True
    )
    if verdict.certified:
        for w in verdict.witnesses:
            assert _below(w.achieved, cfg.delta - cfg.guard), (
                "uniform-radius witness must also certify at the outer tolerance"
            )
        verdict = Verdict(
            verdict.status,
            verdict.witnesses,
            verdict.counterexamples,
            verdict.note + "; witnesses remain valid at the outer tolerance",
            verdict.details,
        )
    return verdict


# ---------------------------------------------------------------------------
# Tolerance-transitive points
# ---------------------------------------------------------------------------


def check_delta_transitive_point(
    sys: SystemDef,
    x: Pt,
    targets: Sequence[OpenRegion],
    delta,
    horizon: int,
    guard=GUARD_DEFAULT,
) -> Verdict:
    """Does the orbit of x pass strictly within delta of every target region?"""
    if not targets:
        raise ConfigError("need at least one target region")
    if not delta > 0:
        raise ConfigError("delta must be positive")
    space = sys.space
    cert_threshold = delta - guard

    if isinstance(sys, IdentityMap):
        witnesses, refutations, band = [], [], []
        for t_idx, region in enumerate(targets):
            d = dist_to_region(space, x, region)
            if _below(d, cert_threshold):
                witnesses.append(Witness(t_idx, 0, x, d))
            elif (d >= delta) if _exactish(d, delta) else (float(d) > float(delta) + float(guard)):
                refutations.append(
                    {"target": t_idx, "reason": "orbit is {x}", "distance": float(d)}
                )
            else:
                band.append(t_idx)
        if refutations:
            return Verdict(Status.REFUTED, counterexamples=tuple(refutations))
        if band:
            return Verdict(Status.INCONCLUSIVE, note=f"targets {band} inside the guard band")
        return Verdict(
            Status.CERTIFIED,
            witnesses=tuple(witnesses),
            note="constant orbit lies within the tolerance of every target",
        )

    if isinstance(sys, Rotation):
        return _rotation_transitive_point(sys, x, targets, delta, horizon, guard)

    # sampled scan: cheap float pass proposes, exact verification disposes
    witnesses: dict[int, Witness] = {}
    best: dict[int, float] = {}
    state = x
    for n in range(0, horizon + 1):
        for t_idx, region in enumerate(targets):
            if t_idx in witnesses:
                continue
            d = dist_to_region(space, state, region)
            df = float(d)
            if df < best.get(t_idx, float("inf")):
                best[t_idx] = df
            if _below(d, cert_threshold):
                witnesses[t_idx] = Witness(t_idx, n, x, d)
        if len(witnesses) == len(targets):
            break
        state = iterate(sys, state, 1)
    if len(witnesses) == len(targets):
        return Verdict(
            Status.CERTIFIED,
            witnesses=tuple(witnesses[i] for i in range(len(targets))),
            note=f"orbit scan up to horizon {horizon}",
            details={"min_distances": best},
        )
    missing = [i for i in range(len(targets)) if i not in witnesses]
    return Verdict(
        Status.INCONCLUSIVE,
        witnesses=tuple(witnesses.values()),
        note=f"targets {missing} not reached within horizon {horizon}",
        details={"min_distances": best},
    )


def _rotation_transitive_point(
    sys: Rotation, x: Pt, targets, delta, horizon: int, guard
) -> Verdict:
    delta = Fraction(delta)
    guard = Fraction(guard)
    q = sys.angle.denominator
    scan_to = min(horizon, q - 1)
    witnesses, misses = {}, []
    for t_idx, region in enumerate(targets):
        fats = []
        for ball in region.balls:
            fat = delta_fatten(arc_from_ball(ball), delta - guard)
            fats.append(fat)
        hit = None
        for n in range(0, scan_to + 1):
            t_n = mod_one(Fraction(x.coord) + n * sys.angle)
            if any(f is FULL_CIRCLE or f.contains(t_n) for f in fats):
                achieved = dist_to_region(sys.space, iterate(sys, x, n), region)
                if _below(achieved, delta - guard):
                    hit = Witness(t_idx, n, x, achieved)
                    break
        if hit is None:
            misses.append(t_idx)
        else:
            witnesses[t_idx] = hit
    if not misses:
        return Verdict(
            Status.CERTIFIED,
            witnesses=tuple(witnesses[i] for i in range(len(targets))),
            note=f"exact arc membership scan up to n={scan_to}",
            details={"alpha_convergent": str(sys.angle)},
        )
    if scan_to >= q - 1:
        return Verdict(
            Status.REFUTED,
            counterexamples=tuple(
                {"target": i, "reason": "exhausted one full period without a hit"}
                for i in misses
            ),
            note="the approximant orbit is periodic; the scan was exhaustive",
            details={"alpha_convergent": str(sys.angle)},
        )
    return Verdict(
        Status.INCONCLUSIVE,
        witnesses=tuple(witnesses.values()),
        note=f"targets {misses} not reached within horizon {horizon} < period {q}",
        details={"alpha_convergent": str(sys.angle)},
    )


# ---------------------------------------------------------------------------
# Implication chain harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImplicationReport:
    """Verdicts of the three checkers on identical inputs plus chain audit.

    A violation here is a defect of the artifact, never a property of the
    system: the uniform-radius witnesses are literally witnesses for the
    outer tolerance, and an eventual intersection contains a first one.
    """

    tt: Verdict
    tm: Verdict
    ufb: Verdict
    chain_violations: tuple[str, ...] = ()

    @property
    def chain_ok(self) -> bool:
        return not self.chain_violations


def run_implication_harness(sys: SystemDef, cfg: CheckConfig) -> ImplicationReport:
    if cfg.eta is None:
        raise ConfigError("the implication harness needs cfg.eta")
    ufb = check_ufb(sys, cfg)
    tm = check_delta_tm(sys, cfg)
    tt = check_delta_tt(sys, cfg)
    violations = []
    if ufb.certified and not tm.certified:
        violations.append("uniform-radius mixing certified but tolerance mixing not")
    if tm.certified and not tt.certified:
        violations.append("tolerance mixing certified but tolerance transitivity not")
    return ImplicationReport(tt=tt, tm=tm, ufb=ufb, chain_violations=tuple(violations))
