"""Three-valued certifier output.

A sampling checker can certify an existential claim by exhibiting a witness,
and can refute only when an exact engine proves impossibility.  Everything
else is Inconclusive.  Certified verdicts carry replayable witnesses;
refuted verdicts carry explicit counterexample records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Status(Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Witness:
    """One replayable success record: pair (or target) index, time, start point, distance."""

    pair: int
    n: int
    point: Any
    achieved: Any  # distance actually reached, strictly below threshold - guard


@dataclass(frozen=True)
class Verdict:
    status: Status
    witnesses: tuple[Witness, ...] = ()
    counterexamples: tuple[dict, ...] = ()
    note: str = ""
    details: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def inconclusive(self) -> bool:
        return self.status is Status.INCONCLUSIVE

    def __str__(self) -> str:
        base = self.status.value
        if self.note:
            base += f" ({self.note})"
        return base
