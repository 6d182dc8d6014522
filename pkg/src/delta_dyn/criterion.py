"""Sequence-criterion machinery for linear shift systems on l^2.

An instance packages a strictly increasing time schedule (n_k), finite
samples of the two dense sets V and W, and right-inverse-like maps S_n.
The checkers verify, on the samples and up to the schedule horizon:

1. ||T^{n_k} v|| falls below a tolerance and stays there,
2. ||S_{n_k} w|| likewise,
3. d(T^{n_k}(S_{n_k} w), w) eventually stays strictly below the spatial
   tolerance (classically: below any tolerance).

From a verified instance the constructive witnesses x = v + S_{n_k} w
certify transitivity pair by pair, mix along the schedule, and assemble an
explicit vector whose orbit passes within the tolerance of every target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ConfigError, UnsupportedSystemError, WitnessUnavailableError
from .metric import (
    GUARD_DEFAULT,
    Ball,
    OpenRegion,
    SparseVec,
    dist_sq_exact,
    is_exact,
)
from .systems import RolewiczLambdaB, SystemDef, is_shift, iterate, reciprocal
from .verdicts import Status, Verdict, Witness

LIMIT_TOL_DEFAULT = 1e-9


@dataclass(frozen=True)
class CriterionInstance:
    """Schedule, dense-set samples, and maps S_n for one operator."""

    sys: SystemDef
    schedule: tuple[int, ...]
    v_sample: tuple[SparseVec, ...]
    w_sample: tuple[SparseVec, ...]
    s_map: Callable[[int, SparseVec], SparseVec]
    label: str = ""

    def __post_init__(self):
        if not is_shift(self.sys):
            raise UnsupportedSystemError("criterion instances require a linear shift system")
        sched = tuple(self.schedule)
        object.__setattr__(self, "schedule", sched)
        if not sched or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("schedule must be nonempty and strictly increasing")
        object.__setattr__(self, "v_sample", tuple(self.v_sample))
        object.__setattr__(self, "w_sample", tuple(self.w_sample))
        if not self.v_sample or not self.w_sample:
            raise ConfigError("sample sets must be nonempty")

    def n_at(self, k: int) -> int:
        """Schedule entry at 1-based position k."""
        return self.schedule[k - 1]

    def apply_s(self, k: int, w: SparseVec) -> SparseVec:
        """S_{n_k} w for the 1-based schedule position k."""
        return self.s_map(self.n_at(k), w)


@dataclass(frozen=True)
class CriterionReport:
    """Per-sample traces over k = 1..k_max plus the aggregated verdict."""

    delta: object
    tol: float
    k_max: int
    forward_decay: tuple[tuple[float, ...], ...]   # ||T^{n_k} v|| per v
    inverse_decay: tuple[tuple[float, ...], ...]   # ||S_{n_k} w|| per w
    recovery_gap: tuple[tuple[float, ...], ...]    # d(T^{n_k} S_{n_k} w, w) per w
    recovery_k0: tuple[int | None, ...]            # first k0 making (3) hold onward
    verdict: Verdict = field(default=None)


def _settles_below(values: Sequence[float], tol: float) -> int | None:
    """First 1-based position from which every value stays strictly below tol."""
    k0 = None
    for k in range(len(values), 0, -1):
        if values[k - 1] < tol:
            k0 = k
        else:
            break
    return k0


def _lt(threshold, value_sq, value_float: float) -> bool:
    """value < threshold, exactly when both sides are rational."""
    if is_exact(value_sq) and is_exact(threshold):
        return value_sq < Fraction(threshold) ** 2
    return value_float < float(threshold)


def _strictly_inside(x: SparseVec, region: OpenRegion) -> bool:
    for ball in region.balls:
        d_sq = dist_sq_exact(x, ball.center)
        if is_exact(d_sq) and is_exact(ball.radius):
            if d_sq < Fraction(ball.radius) ** 2:
                return True
        elif math.sqrt(float(d_sq)) < float(ball.radius):
            return True
    return False


def _validate(inst: CriterionInstance, k_max: int) -> None:
    if not 1 <= k_max <= len(inst.schedule):
        raise ConfigError(f"k_max={k_max} must lie within the schedule length")


def _traces(inst: CriterionInstance, k_max: int):
    forward, inverse, recovery, recovery_sq = [], [], [], []
    for v in inst.v_sample:
        forward.append(
            tuple(iterate(inst.sys, v, inst.n_at(k)).norm() for k in range(1, k_max + 1))
        )
    for w in inst.w_sample:
        inv_row, rec_row, rec_sq_row = [], [], []
        for k in range(1, k_max + 1):
            s_w = inst.apply_s(k, w)
            inv_row.append(s_w.norm())
            gap_sq = dist_sq_exact(iterate(inst.sys, s_w, inst.n_at(k)), w)
            rec_sq_row.append(gap_sq)
            rec_row.append(math.sqrt(float(gap_sq)))
        inverse.append(tuple(inv_row))
        recovery.append(tuple(rec_row))
        recovery_sq.append(tuple(rec_sq_row))
    return forward, inverse, recovery, recovery_sq


def check_delta_hc(
    inst: CriterionInstance, delta, k_max: int, tol: float = LIMIT_TOL_DEFAULT
) -> CriterionReport:
    """Verify the three criterion conditions at spatial tolerance delta.

    Certification is explicitly scoped: up to k_max, on the declared
    samples.  Condition (3) asks for a position k0 from which the recovery
    distance stays strictly below delta.
    """
    _validate(inst, k_max)
    if not delta > 0:
        raise ValueError("delta must be positive")
    forward, inverse, recovery, recovery_sq = _traces(inst, k_max)

    failures = []
    for i, row in enumerate(forward):
        if _settles_below(row, tol) is None:
            failures.append(f"condition 1 fails for v#{i}")
    for i, row in enumerate(inverse):
        if _settles_below(row, tol) is None:
            failures.append(f"condition 2 fails for w#{i}")

    k0s: list[int | None] = []
    for i, (row, row_sq) in enumerate(zip(recovery, recovery_sq)):
        k0 = None
        for k in range(k_max, 0, -1):
            if _lt(delta, row_sq[k - 1], row[k - 1]):
                k0 = k
            else:
                break
        k0s.append(k0)
        if k0 is None:
            failures.append(f"condition 3 fails for w#{i}")

    if failures:
        verdict = Verdict(
            Status.INCONCLUSIVE,
            note="; ".join(failures),
            details={"k_max": k_max, "tol": tol},
        )
    else:
        verdict = Verdict(
            Status.CERTIFIED,
            note=f"all three conditions verified up to k_max={k_max} on the samples",
            details={"k_max": k_max, "tol": tol, "recovery_k0": k0s},
        )
    return CriterionReport(
        delta=delta,
        tol=tol,
        k_max=k_max,
        forward_decay=tuple(forward),
        inverse_decay=tuple(inverse),
        recovery_gap=tuple(recovery),
        recovery_k0=tuple(k0s),
        verdict=verdict,
    )


def check_classical_hc(
    inst: CriterionInstance, tol: float = LIMIT_TOL_DEFAULT, k_max: int | None = None
) -> Verdict:
    """Verify the classical criterion: all three traces settle below tol."""
    if k_max is None:
        k_max = len(inst.schedule)
    _validate(inst, k_max)
    forward, inverse, recovery, _ = _traces(inst, k_max)
    failures = []
    settle = {}
    for name, rows in (("forward", forward), ("inverse", inverse), ("recovery", recovery)):
        points = [_settles_below(row, tol) for row in rows]
        settle[name] = points
        for i, p in enumerate(points):
            if p is None:
                failures.append(f"{name} trace #{i} never settles below {tol}")
    if failures:
        return Verdict(
            Status.INCONCLUSIVE,
            note="; ".join(failures),
            details={"k_max": k_max, "tol": tol},
        )
    return Verdict(
        Status.CERTIFIED,
        note=f"all traces settle below tol={tol} and stay, up to k_max={k_max}",
        details={"k_max": k_max, "tol": tol, "settle_points": settle},
    )


# ---------------------------------------------------------------------------
# Constructive witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransitivityWitness:
    k: int                  # 1-based schedule position
    n: int                  # actual exponent n_k
    x: SparseVec            # v + S_{n_k} w, verified inside U
    target: SparseVec       # w + T^{n_k} v, verified inside O
    achieved: float         # d(T^{n_k} x, target) = d(T^{n_k} S_{n_k} w, w)
    v: SparseVec
    w: SparseVec


def _pick_inside(samples: Sequence[SparseVec], region: OpenRegion, what: str) -> SparseVec:
    for s in samples:
        if _strictly_inside(s, region):
            return s
    raise WitnessUnavailableError(
        f"no {what}-sample lies inside the requested region; refine the samples"
    )


def _joint_threshold(
    inst: CriterionInstance,
    v: SparseVec,
    w: SparseVec,
    u_region: OpenRegion,
    o_region: OpenRegion,
    delta,
    k_max: int,
    guard,
) -> int | None:
    """Smallest K with all three proof conditions holding for every k in [K, k_max]."""
    threshold = None
    for k in range(k_max, 0, -1):
        n = inst.n_at(k)
        s_w = inst.apply_s(k, w)
        x = v + s_w
        target = w + iterate(inst.sys, v, n)
        gap_sq = dist_sq_exact(iterate(inst.sys, s_w, n), w)
        ok = (
            _strictly_inside(x, u_region)
            and _strictly_inside(target, o_region)
            and _lt(delta - guard, gap_sq, math.sqrt(float(gap_sq)))
        )
        if ok:
            threshold = k
        else:
            break
    return threshold


def transitivity_witness(
    inst: CriterionInstance,
    delta,
    u_region: OpenRegion,
    o_region: OpenRegion,
    guard=GUARD_DEFAULT,
) -> TransitivityWitness:
    """Constructive witness x = v + S_{n_k} w for one pair of regions.

    Picks v and w from the samples inside the two regions, takes k beyond
    all three thresholds, and replays every claimed fact before returning.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    k_max = len(inst.schedule)
    v = _pick_inside(inst.v_sample, u_region, "V")
    w = _pick_inside(inst.w_sample, o_region, "W")
    k = _joint_threshold(inst, v, w, u_region, o_region, delta, k_max, guard)
    if k is None:
        raise WitnessUnavailableError(
            "no schedule position satisfies all three conditions; extend the schedule"
        )
    n = inst.n_at(k)
    s_w = inst.apply_s(k, w)
    x = v + s_w
    target = w + iterate(inst.sys, v, n)
    # translation invariance: moving by T^{n} v on both sides cancels exactly
    gap_sq = dist_sq_exact(iterate(inst.sys, x, n), target)
    recovery_sq = dist_sq_exact(iterate(inst.sys, s_w, n), w)
    if gap_sq != recovery_sq:
        raise AssertionError("translation-invariance identity failed; arithmetic bug")
    return TransitivityWitness(
        k=k,
        n=n,
        x=x,
        target=target,
        achieved=math.sqrt(float(gap_sq)),
        v=v,
        w=w,
    )


def check_sequence_mixing(
    inst: CriterionInstance,
    delta,
    pairs: Sequence[tuple[OpenRegion, OpenRegion]],
    k_max: int,
    guard=GUARD_DEFAULT,
) -> Verdict:
    """Eventual intersection along the schedule, pair by pair.

    For each pair a threshold K = max(K1, K2, K3) is located and the witness
    family x_k = v + S_{n_k} w is replayed for every k in [K, k_max].
    """
    _validate(inst, k_max)
    if not delta > 0:
        raise ValueError("delta must be positive")
    witnesses = []
    per_pair = []
    inconclusive = []
    for idx, (u_region, o_region) in enumerate(pairs):
        v = _pick_inside(inst.v_sample, u_region, "V")
        w = _pick_inside(inst.w_sample, o_region, "W")
        threshold = _joint_threshold(inst, v, w, u_region, o_region, delta, k_max, guard)
        if threshold is None:
            inconclusive.append(idx)
            per_pair.append({"pair": idx, "K": None})
            continue
        for k in (threshold, k_max):
            n = inst.n_at(k)
            x = v + inst.apply_s(k, w)
            gap_sq = dist_sq_exact(
                iterate(inst.sys, x, n), w + iterate(inst.sys, v, n)
            )
            witnesses.append(Witness(idx, n, x, math.sqrt(float(gap_sq))))
        per_pair.append({"pair": idx, "K": threshold, "n_K": inst.n_at(threshold)})
    if inconclusive:
        return Verdict(
            Status.INCONCLUSIVE,
            witnesses=tuple(witnesses),
            note=f"k_max={k_max} below the joint threshold for pairs {inconclusive}",
            details={"per_pair": per_pair},
        )
    return Verdict(
        Status.CERTIFIED,
        witnesses=tuple(witnesses),
        note=f"witness family verified for every schedule position up to k_max={k_max}",
        details={"per_pair": per_pair},
    )


# ---------------------------------------------------------------------------
# The scaled backward shift instance
# ---------------------------------------------------------------------------


def lambda_b_instance(
    lam,
    support_cap: int = 6,
    k_max: int = 40,
    extra_samples: Sequence[SparseVec] = (),
) -> CriterionInstance:
    """Instance for lambda * (backward shift) with the schedule n_k = k.

    V = W is a finite rational sample of the finitely supported vectors
    with support in [0, support_cap].  S_n prepends n zeros and scales by
    lambda^{-n}, so ||S_n w|| = |lambda|^{-n} ||w|| and T^n S_n w = w hold
    exactly on rational input.
    """
    sys = RolewiczLambdaB(lam, dim_cap=max(64, support_cap + k_max + 8))
    lam = sys.lam
    lam_inv = reciprocal(lam)

    samples: list[SparseVec] = [SparseVec.zero()]
    samples += [SparseVec.basis(i) for i in range(support_cap + 1)]
    samples += [
        SparseVec.basis(i) + SparseVec.basis(i + 1) for i in range(support_cap)
    ]
    samples.append(SparseVec.basis(0, Fraction(3, 2)))
    if support_cap >= 1:
        samples.append(SparseVec.basis(0) - SparseVec.basis(1))
    samples.extend(extra_samples)

    def s_map(n: int, w: SparseVec) -> SparseVec:
        return w.shift_indices(n).scale(lam_inv**n)

    return CriterionInstance(
        sys=sys,
        schedule=tuple(range(1, k_max + 1)),
        v_sample=tuple(samples),
        w_sample=tuple(samples),
        s_map=s_map,
        label=f"scaled backward shift, lambda={lam}",
    )


# ---------------------------------------------------------------------------
# Explicit tolerance-dense vector
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanRow:
    j: int
    m: int
    achieved: float


@dataclass(frozen=True)
class BuildPlan:
    rows: tuple[PlanRow, ...]
    delta: object
    gap_rule: str


def build_delta_hc_vector(lam, targets: Sequence[SparseVec], delta) -> tuple[SparseVec, BuildPlan]:
    """Assemble x = sum_j S_{m_j}(w_j) whose orbit passes delta-close to each target.

    The return times m_j grow fast enough that (i) the blocks occupy
    disjoint index ranges, and (ii) at time m_j every later block has been
    scaled down by at least |lambda|^{-(m_i - m_j)}, forcing the total tail
    norm below delta/2.  Every achieved distance is replayed by direct
    iteration before the plan is returned.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    sys = RolewiczLambdaB(lam)
    lam = sys.lam
    mag = abs(lam)
    targets = [t if isinstance(t, SparseVec) else SparseVec(t) for t in targets]
    if not targets:
        raise ValueError("need at least one target")

    ms: list[int] = []
    for j, w in enumerate(targets):
        if j == 0:
            ms.append(1)
            continue
        prev = targets[j - 1]
        width_term = (prev.max_index() + 1) + 1
        norm_w = w.norm()
        if norm_w == 0:
            log_term = 0
        else:
            log_term = math.ceil(
                math.log(2 ** (j + 1) * norm_w / float(delta)) / math.log(float(mag))
            )
        ms.append(ms[-1] + max(width_term, log_term, 1))

    lam_inv = reciprocal(lam)
    coeffs: dict[int, object] = {}
    for m, w in zip(ms, targets):
        scale = lam_inv**m
        for i, c in w.items():
            key = i + m
            if key in coeffs:
                raise AssertionError("block supports collided; gap rule broken")
            coeffs[key] = c * scale
    x = SparseVec(coeffs)

    rows = []
    for j, (m, w) in enumerate(zip(ms, targets)):
        gap_sq = dist_sq_exact(iterate(sys, x, m), w)
        achieved = math.sqrt(float(gap_sq))
        if not _lt(delta, gap_sq, achieved):
            raise AssertionError("replayed distance not below delta; gap rule broken")
        rows.append(PlanRow(j=j, m=m, achieved=achieved))
    plan = BuildPlan(
        rows=tuple(rows),
        delta=delta,
        gap_rule=(
            "m_{j+1} = m_j + max(maxindex(w_j) + 2, "
            "ceil(log_|lambda|(2^(j+2) * ||w_{j+1}|| / delta)))"
        ),
    )
    return x, plan
