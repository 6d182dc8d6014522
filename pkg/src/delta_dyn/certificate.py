"""Machine-readable certificates and CSV sidecars.

A certificate echoes the full resolved scenario, the verdict with its
witnesses, and the environment (version, seed, thresholds, rotation
approximant), so that replaying the echoed configuration reproduces the
verdict byte for byte; only the timing field is excluded from comparison.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .metric import CirclePt, PlanePt, SparseVec
from .rotation import Arc
from .shifts import ProductTrace

SCHEMA_VERSION = "1"


def jsonable(obj):
    """Recursively encode package objects into JSON-ready structures."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, CirclePt):
        return {"space": "circle", "coord": jsonable(obj.coord)}
    if isinstance(obj, PlanePt):
        return {"space": "plane", "xy": [obj.x, obj.y]}
    if isinstance(obj, SparseVec):
        return {"space": "seq", "coeffs": {str(i): jsonable(c) for i, c in obj.items()}}
    if isinstance(obj, Arc):
        return {"arc": {"start": jsonable(obj.start), "length": jsonable(obj.length)}}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {
            f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, range):
        return list(obj)
    raise TypeError(f"cannot encode {type(obj).__name__} into a certificate")


def build_certificate(
    scenario: dict, verdict, environment: dict, timing_ms: float, sidecars: list[str]
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": jsonable(scenario),
        "verdict": jsonable(verdict),
        "environment": jsonable(environment),
        "sidecars": sorted(sidecars),
        "timing_ms": timing_ms,
    }


def canonical_json(cert: dict) -> str:
    return json.dumps(cert, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def comparable(cert: dict) -> dict:
    """The certificate without its timing field (the only nondeterministic part)."""
    out = dict(cert)
    out.pop("timing_ms", None)
    return out


def write_certificate(path: Path, cert: dict) -> None:
    Path(path).write_text(canonical_json(cert), encoding="utf-8")


def load_certificate(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# CSV sidecars (plot-ready, header rows)
# ---------------------------------------------------------------------------


def write_orbit_membership_csv(
    path: Path, alpha: Fraction, window, horizon: int
) -> None:
    """Columns: n, frac_part, in_A for n = 1..horizon."""
    p, q = alpha.numerator, alpha.denominator
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "frac_part", "in_A"])
        for n in range(1, horizon + 1):
            t = Fraction(n * p % q, q)
            w.writerow([n, float(t), int(window.contains(t))])


def write_trace_csv(path: Path, trace: ProductTrace) -> None:
    """Columns: n, log_product."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "log_product"])
        for n, log_p in zip(trace.ns(), trace.log_values):
            w.writerow([n, repr(log_p)])


def write_plan_csv(path: Path, plan) -> None:
    """Columns: j, m_j, achieved_distance."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "m_j", "achieved_distance"])
        for row in plan.rows:
            w.writerow([row.j, row.m, repr(row.achieved)])


def write_eta_grid_csv(path: Path, rows: list[dict]) -> None:
    """Columns: eta, v_length, first_failing_n, failing_count."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["eta", "v_length", "first_failing_n", "failing_count"])
        for r in rows:
            w.writerow([r["eta"], r["v_length"], r["first_failing_n"], r["failing_count"]])
