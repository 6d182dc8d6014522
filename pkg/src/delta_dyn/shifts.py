"""Weight-product analytics for backward shifts.

The mixing behaviour of a weighted backward shift is governed by the
running products of weight magnitudes: divergence of the forward products
(and, bilaterally, the backward ones too) is sufficient for classical
mixing, hence for mixing at every positive tolerance.  Divergence of a
limit is undecidable from a finite trace, so the classifier applies
explicit recorded thresholds and falls back to exact family rules for the
closed-form weight families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import UnsupportedSystemError
from .systems import (
    BilateralShift,
    BlockOscillatingWeights,
    ConstantWeights,
    ExplicitWeights,
    SystemDef,
    WeightSeq,
    is_shift,
    is_unilateral,
)
from .verdicts import Status, Verdict

# classifier thresholds; all recorded in every trace
DIVERGENCE_THRESHOLD = 1e6      # products must exceed this to count as escaping
RETURN_BAND = 2.0               # dropping back below this is a "return"
BOUNDED_CEILING = 1e3           # staying under this for the whole horizon
MIN_RETURN_WITNESSES = 3
TRACE_HORIZON_DEFAULT = 10**4


class ProductDirection(Enum):
    FORWARD = "forward"     # prod_{i=1..n} |a_i|
    BACKWARD = "backward"   # prod_{i=0..n} |a_{-i}|


class ProductClass(Enum):
    DIVERGES_MONOTONICALLY = "DivergesMonotonically"
    SUP_INFINITE_LIM_NOT = "SupInfiniteLimNot"
    BOUNDED = "Bounded"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ProductTrace:
    """Running log-products with their threshold classification.

    `log_values[j]` is log of the product at n = n_start + j; products are
    accumulated in log space so horizons far beyond float range stay exact
    enough to classify.
    """

    direction: ProductDirection
    n_start: int
    log_values: tuple[float, ...]
    classification: ProductClass
    return_witnesses: tuple[int, ...]
    crossings: tuple[int, ...]
    analytic: bool = False
    analytic_reason: str = ""
    thresholds: dict = field(
        default_factory=lambda: {
            "divergence": DIVERGENCE_THRESHOLD,
            "return_band": RETURN_BAND,
            "bounded_ceiling": BOUNDED_CEILING,
            "min_returns": MIN_RETURN_WITNESSES,
        }
    )

    def ns(self) -> range:
        return range(self.n_start, self.n_start + len(self.log_values))


def weight_product(weights: WeightSeq, k: int, n: int, unilateral: bool = False):
    """Product of the n weights ending at index k: a_{k-n+1} * ... * a_k.

    n = 0 gives the empty product 1.  In the unilateral case an
    inadmissible range (k < n) returns exact 0, the annihilation marker:
    genuine products are never zero because weights are nowhere zero.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1
    if unilateral and k < n:
        return 0
    prod = 1
    for j in range(k - n + 1, k + 1):
        prod = prod * weights.weight(j)
    return prod


def _classify_numeric(logs: list[float]) -> tuple[ProductClass, list[int], list[int]]:
    log_t0 = math.log(DIVERGENCE_THRESHOLD)
    log_band = math.log(RETURN_BAND)
    log_ceiling = math.log(BOUNDED_CEILING)

    crossings = []
    prev = 0.0  # empty product before the trace starts
    for j, v in enumerate(logs):
        if v > log_t0 and prev <= log_t0:
            crossings.append(j)
        prev = v

    returns = []
    prev = 0.0
    for j, v in enumerate(logs):
        if v < log_band and prev >= log_band:
            returns.append(j)
        prev = v

    if crossings:
        diverges = True
        for c in crossings:
            tail_min = min(logs[c:])
            if tail_min < logs[c] - math.log(2):
                diverges = False
                break
        if diverges:
            return ProductClass.DIVERGES_MONOTONICALLY, returns, crossings
    if logs and max(logs) > log_t0 and len(returns) >= MIN_RETURN_WITNESSES:
        return ProductClass.SUP_INFINITE_LIM_NOT, returns, crossings
    if logs and max(logs) < log_ceiling:
        return ProductClass.BOUNDED, returns, crossings
    return ProductClass.INCONCLUSIVE, returns, crossings


def _analytic_class(
    weights: WeightSeq, direction: ProductDirection
) -> tuple[ProductClass, str] | None:
    """Exact classification for closed-form families, direction-aware."""
    if isinstance(weights, ConstantWeights):
        mag = abs(weights.value)
        if mag > 1:
            return ProductClass.DIVERGES_MONOTONICALLY, "constant |a| > 1: geometric growth"
        return ProductClass.BOUNDED, "constant |a| <= 1: products never exceed 1"
    if isinstance(weights, BlockOscillatingWeights):
        if direction is ProductDirection.BACKWARD:
            return ProductClass.BOUNDED, "oscillating blocks sit at positive indices only"
        return (
            ProductClass.SUP_INFINITE_LIM_NOT,
            "growing runs push peaks to c^k while each counter-run returns to unit scale",
        )
    if isinstance(weights, ExplicitWeights):
        tail = weights.default_above if direction is ProductDirection.FORWARD else weights.default_below
        mag = abs(tail)
        if mag > 1:
            return (
                ProductClass.DIVERGES_MONOTONICALLY,
                f"tail weight magnitude {mag} > 1 dominates the finite window",
            )
        return ProductClass.BOUNDED, f"tail weight magnitude {mag} <= 1: bounded by the window"
    return None


def trace_products(
    weights: WeightSeq, direction: ProductDirection, horizon: int
) -> ProductTrace:
    """Accumulate running products (log space) and classify their behaviour."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if direction is ProductDirection.FORWARD:
        indices = range(1, horizon + 1)
        n_start = 1
    else:
        indices = range(0, horizon + 1)
        n_start = 0
    logs: list[float] = []
    acc = 0.0
    for i in indices:
        a = weights.weight(i if direction is ProductDirection.FORWARD else -i)
        acc += math.log(abs(a))
        logs.append(acc)

    classification, returns, crossings = _classify_numeric(logs)
    analytic = _analytic_class(weights, direction)
    if analytic is not None:
        cls, reason = analytic
        return ProductTrace(
            direction=direction,
            n_start=n_start,
            log_values=tuple(logs),
            classification=cls,
            return_witnesses=tuple(n_start + j for j in returns),
            crossings=tuple(n_start + j for j in crossings),
            analytic=True,
            analytic_reason=reason,
        )
    return ProductTrace(
        direction=direction,
        n_start=n_start,
        log_values=tuple(logs),
        classification=classification,
        return_witnesses=tuple(n_start + j for j in returns),
        crossings=tuple(n_start + j for j in crossings),
    )


def reclassify(trace: ProductTrace, weights: WeightSeq | None = None) -> ProductClass:
    """Re-derive the classification of a stored trace (soundness check)."""
    if trace.analytic and weights is not None:
        analytic = _analytic_class(weights, trace.direction)
        if analytic is not None:
            return analytic[0]
    cls, _, _ = _classify_numeric(list(trace.log_values))
    return cls


def delta_mixing_sufficiency(
    sys: SystemDef, delta, horizon: int = TRACE_HORIZON_DEFAULT
) -> Verdict:
    """Certify tolerance-mixing of a shift from divergent weight products.

    The divergence condition is sufficient for classical mixing, and the
    target set sits inside its own delta-neighbourhood, so certification
    transfers to every delta > 0 at once.  Non-divergent classifications
    are never refutations here: the criterion is one-directional.
    """
    if not is_shift(sys):
        raise UnsupportedSystemError("mixing sufficiency applies to shifts only")
    if not delta > 0:
        raise ValueError("delta must be positive")
    weights = sys.weights
    required = [ProductDirection.FORWARD]
    if isinstance(sys, BilateralShift):
        required.append(ProductDirection.BACKWARD)
    traces = {d: trace_products(weights, d, horizon) for d in required}
    summary = {
        d.value: {
            "classification": t.classification.value,
            "analytic": t.analytic,
            "analytic_reason": t.analytic_reason,
            "returns": len(t.return_witnesses),
        }
        for d, t in traces.items()
    }
    details = {
        "delta": delta,
        "horizon": horizon,
        "unilateral": is_unilateral(sys),
        "traces": summary,
        "thresholds": next(iter(traces.values())).thresholds,
    }
    classes = {d: t.classification for d, t in traces.items()}
    if all(c is ProductClass.DIVERGES_MONOTONICALLY for c in classes.values()):
        return Verdict(
            Status.CERTIFIED,
            note=(
                "weight products diverge in every required direction; the sufficient "
                "condition is tolerance-independent, so this holds for every delta > 0"
            ),
            details=details,
        )
    if any(c is ProductClass.INCONCLUSIVE for c in classes.values()):
        return Verdict(
            Status.INCONCLUSIVE,
            note="product trace classification inconclusive at this horizon",
            details=details,
        )
    details["not_applicable"] = True
    return Verdict(
        Status.INCONCLUSIVE,
        note=(
            "not applicable: the divergence hypothesis fails "
            f"({', '.join(f'{d.value}: {c.value}' for d, c in classes.items())}); "
            "sufficiency gives no refutation"
        ),
        details=details,
    )
