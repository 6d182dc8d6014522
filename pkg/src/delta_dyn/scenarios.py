"""Scenario files: parsing, validation, bundled registry, and dispatch.

A scenario is a flat TOML file naming one check, the system it runs on,
and the check's parameters.  Rationals are written as strings ("1/10" or
"0.05") and parsed exactly; every sampled check must declare a seed.
Running a scenario produces a JSON certificate plus CSV sidecars.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from importlib import resources
from pathlib import Path
from random import Random

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from ._version import __version__
from .certificate import (
    build_certificate,
    jsonable,
    write_certificate,
    write_eta_grid_csv,
    write_orbit_membership_csv,
    write_plan_csv,
    write_trace_csv,
)
from .certify import (
    CheckConfig,
    check_delta_tm,
    check_delta_transitive_point,
    check_delta_tt,
    check_ufb,
    default_pair_cover,
    run_implication_harness,
)
from .criterion import (
    build_delta_hc_vector,
    check_classical_hc,
    check_delta_hc,
    check_sequence_mixing,
    lambda_b_instance,
)
from .errors import ScenarioError
from .metric import GUARD_DEFAULT, Ball, CirclePt, OpenRegion, PlanePt, SparseVec, SpaceKind
from .rotation import (
    MIN_DENOMINATOR_DEFAULT,
    Arc,
    delta_fatten,
    parse_angle,
    refute_delta_tm,
    refute_ufb,
    window_A,
)
from .shifts import ProductDirection, delta_mixing_sufficiency, trace_products
from .systems import (
    BilateralShift,
    BlockOscillatingWeights,
    ConstantWeights,
    ExplicitWeights,
    IdentityMap,
    Rotation,
    RolewiczLambdaB,
    UnilateralShift,
    is_shift,
)
from .verdicts import Status, Verdict

CHECK_KINDS = (
    "delta_tt",
    "delta_tm",
    "ufb",
    "transitive_point",
    "rotation_refute_tm",
    "rotation_refute_ufb",
    "shift_sufficiency",
    "criterion_delta_hc",
    "criterion_classical",
    "sequence_mixing",
    "build_vector",
    "implication_harness",
)

_SAMPLED_CHECKS = {"delta_tt", "delta_tm", "ufb", "implication_harness", "build_vector"}

_DELTA_FREE_CHECKS = {"shift_sufficiency", "criterion_classical", "rotation_refute_ufb"}


@dataclass(frozen=True)
class Scenario:
    name: str
    check: str
    claim: str
    system: dict
    params: dict

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "check": self.check,
            "claim": self.claim,
            "system": self.system,
            "params": self.params,
        }


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_number(value) -> Fraction | int:
    """Exact numeric parsing: '1/10', '0.05', ints, and TOML floats."""
    if isinstance(value, bool):
        raise ScenarioError(f"expected a number, got boolean {value}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        s = value.strip()
        try:
            if "/" in s:
                return Fraction(s)
            return Fraction(Decimal(s))
        except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
            raise ScenarioError(f"cannot parse number {value!r}") from exc
    raise ScenarioError(f"cannot parse number {value!r}")


def _coeff_table(table: dict) -> SparseVec:
    try:
        return SparseVec({int(k): parse_number(v) for k, v in table.items()})
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"bad coefficient table {table!r}") from exc


def _parse_point(space_kind: SpaceKind, spec):
    if space_kind is SpaceKind.CIRCLE:
        return CirclePt(parse_number(spec))
    if space_kind is SpaceKind.CAPPED_PLANE:
        return PlanePt(float(parse_number(spec[0])), float(parse_number(spec[1])))
    return _coeff_table(spec)


def load_scenario_text(text: str, name_hint: str = "<inline>") -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{name_hint}: TOML parse error: {exc}") from exc
    return _validate_scenario(data, name_hint)


def load_scenario(path: Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return load_scenario_text(text, str(path))


def _validate_scenario(data: dict, name_hint: str) -> Scenario:
    for key in ("name", "check"):
        if key not in data:
            raise ScenarioError(f"{name_hint}: missing required key {key!r}")
    check = data["check"]
    if check not in CHECK_KINDS:
        raise ScenarioError(f"{name_hint}: unknown check {check!r}; one of {CHECK_KINDS}")
    system = data.get("system", {})
    params = data.get("params", {})
    if not isinstance(system, dict) or not isinstance(params, dict):
        raise ScenarioError(f"{name_hint}: [system] and [params] must be tables")
    if check in _SAMPLED_CHECKS and "seed" not in params:
        raise ScenarioError(f"{name_hint}: sampled check {check!r} requires params.seed")
    if check not in _DELTA_FREE_CHECKS and "delta" not in params:
        raise ScenarioError(f"{name_hint}: check {check!r} requires params.delta")
    return Scenario(
        name=data["name"],
        check=check,
        claim=data.get("claim", ""),
        system=system,
        params=params,
    )


def build_system(system: dict):
    kind = system.get("kind")
    if kind == "identity":
        space_name = system.get("space", "capped_plane")
        from .metric import Space

        spaces = {
            "capped_plane": Space.capped_plane(),
            "circle": Space.circle(),
            "sequence_l2": Space.sequence_l2(),
        }
        if space_name not in spaces:
            raise ScenarioError(f"unknown identity space {space_name!r}")
        return IdentityMap(spaces[space_name])
    if kind == "rotation":
        min_q = int(system.get("min_denominator", MIN_DENOMINATOR_DEFAULT))
        angle, source = parse_angle(system.get("alpha", "golden"), min_q)
        return Rotation(angle, source)
    if kind in ("unilateral_shift", "bilateral_shift"):
        weights = _build_weights(system.get("weights", {}))
        cls = UnilateralShift if kind == "unilateral_shift" else BilateralShift
        return cls(weights)
    if kind == "rolewicz":
        return RolewiczLambdaB(parse_number(system.get("lam", "2")))
    raise ScenarioError(f"unknown system kind {kind!r}")


def _build_weights(spec: dict):
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantWeights(parse_number(spec.get("value", "2")))
    if kind == "explicit":
        return ExplicitWeights(
            values=tuple(parse_number(v) for v in spec.get("values", [])),
            start=int(spec.get("start", 1)),
            default_above=parse_number(spec.get("default_above", 1)),
            default_below=(
                parse_number(spec["default_below"]) if "default_below" in spec else None
            ),
        )
    if kind == "block_oscillating":
        return BlockOscillatingWeights(parse_number(spec.get("factor", "2")))
    raise ScenarioError(f"unknown weights kind {kind!r}")


# ---------------------------------------------------------------------------
# Regions and covers
# ---------------------------------------------------------------------------


def build_regions(space, spec: dict) -> list[OpenRegion]:
    kind = spec.get("type")
    if kind == "arc_grid":
        count = int(spec.get("count", 8))
        radius = parse_number(spec.get("radius", "1/32"))
        return [
            OpenRegion.single(CirclePt(Fraction(k, count)), radius) for k in range(count)
        ]
    if kind == "seq_basis":
        count = int(spec.get("count", 8))
        radius = parse_number(spec.get("radius", "1/32"))
        return [OpenRegion.single(SparseVec.basis(k), radius) for k in range(count)]
    if kind == "plane_ring":
        import math

        count = int(spec.get("count", 8))
        radius = float(parse_number(spec.get("radius", "1/32")))
        return [
            OpenRegion.single(
                PlanePt(
                    0.5 + 0.25 * math.cos(2 * math.pi * k / count),
                    0.5 + 0.25 * math.sin(2 * math.pi * k / count),
                ),
                radius,
            )
            for k in range(count)
        ]
    if kind == "list":
        space_kind = space.kind
        out = []
        for entry in spec.get("regions", []):
            center = _parse_point(space_kind, entry["center"])
            out.append(OpenRegion.single(center, parse_number(entry["radius"])))
        return out
    raise ScenarioError(f"unknown region spec type {kind!r}")


def build_pair_cover(space, params: dict):
    spec = params.get("cover")
    if spec is None:
        return default_pair_cover(space)
    if spec.get("type") == "pairs":
        pairs = []
        for entry in spec.get("pairs", []):
            u = OpenRegion.single(
                _parse_point(space.kind, entry["u_center"]), parse_number(entry["u_radius"])
            )
            v = OpenRegion.single(
                _parse_point(space.kind, entry["v_center"]), parse_number(entry["v_radius"])
            )
            pairs.append((u, v))
        if not pairs:
            raise ScenarioError("cover of type 'pairs' needs at least one pair")
        return tuple(pairs)
    regions = build_regions(space, spec)
    return tuple((u, v) for u in regions for v in regions)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    scenario: Scenario
    verdict: Verdict
    certificate: dict
    certificate_path: Path | None
    sidecar_paths: list[Path]


def _check_config(sys, params: dict) -> CheckConfig:
    space = sys.space
    return CheckConfig(
        delta=parse_number(params["delta"]),
        horizon=int(params.get("horizon", 64)),
        pair_cover=build_pair_cover(space, params),
        eta=parse_number(params["eta"]) if "eta" in params else None,
        samples_per_region=int(params.get("samples_per_region", 8)),
        seed=int(params["seed"]),
        guard=parse_number(params.get("guard", GUARD_DEFAULT)),
    )


def _random_targets(seed: int, count: int, support_cap: int) -> list[SparseVec]:
    rng = Random(f"targets:{seed}")
    targets = []
    for _ in range(count):
        size = rng.randrange(1, 4)
        idxs = rng.sample(range(support_cap + 1), min(size, support_cap + 1))
        coeffs = {}
        for i in idxs:
            num = rng.choice([n for n in range(-8, 9) if n != 0])
            coeffs[i] = Fraction(num, rng.randrange(1, 5))
        targets.append(SparseVec(coeffs))
    return targets


def _execute(scenario: Scenario, out_dir: Path | None):
    """Run the named check; returns (verdict, environment, sidecar writers)."""
    params = scenario.params
    check = scenario.check
    sidecars = []  # (filename, writer callable)
    env = {"version": __version__, "thresholds": {"guard": str(GUARD_DEFAULT)}}

    if check in ("delta_tt", "delta_tm", "ufb", "implication_harness"):
        sys = build_system(scenario.system)
        cfg = _check_config(sys, params)
        env["seed"] = cfg.seed
        env["thresholds"]["guard"] = str(cfg.guard)
        if isinstance(sys, Rotation):
            env["alpha_convergent"] = str(sys.angle)
            env["alpha_source"] = sys.source
        if check == "delta_tt":
            verdict = check_delta_tt(sys, cfg)
        elif check == "delta_tm":
            verdict = check_delta_tm(sys, cfg)
        elif check == "ufb":
            verdict = check_ufb(sys, cfg)
        else:
            report = run_implication_harness(sys, cfg)
            status = Status.CERTIFIED if report.chain_ok else Status.REFUTED
            verdict = Verdict(
                status,
                note=(
                    "implication chain holds on this scenario"
                    if report.chain_ok
                    else "implication chain violated: artifact defect"
                ),
                counterexamples=tuple({"violation": v} for v in report.chain_violations),
                details={
                    "ufb": jsonable(report.ufb),
                    "tm": jsonable(report.tm),
                    "tt": jsonable(report.tt),
                },
            )
        return verdict, env, sidecars

    if check == "transitive_point":
        sys = build_system(scenario.system)
        if isinstance(sys, Rotation):
            env["alpha_convergent"] = str(sys.angle)
            env["alpha_source"] = sys.source
        x = _parse_point(sys.space.kind, params["x"])
        targets = build_regions(sys.space, params["targets"])
        verdict = check_delta_transitive_point(
            sys, x, targets, parse_number(params["delta"]), int(params["horizon"])
        )
        return verdict, env, sidecars

    if check == "rotation_refute_tm":
        sys = build_system(scenario.system)
        if not isinstance(sys, Rotation):
            raise ScenarioError("rotation_refute_tm needs a rotation system")
        env["alpha_convergent"] = str(sys.angle)
        env["alpha_source"] = sys.source
        u = Arc(parse_number(params["u"]["start"]), parse_number(params["u"]["length"]))
        v = Arc(parse_number(params["v"]["start"]), parse_number(params["v"]["length"]))
        delta = parse_number(params["delta"])
        horizon = int(params["horizon"])
        verdict = refute_delta_tm(sys.angle, u, v, delta, horizon, source=sys.source)
        window = window_A(u, delta_fatten(v, delta))
        sidecars.append(
            (
                f"{scenario.name}.failing-times.csv",
                lambda p: write_orbit_membership_csv(p, sys.angle, window, horizon),
            )
        )
        return verdict, env, sidecars

    if check == "rotation_refute_ufb":
        sys = build_system(scenario.system)
        if not isinstance(sys, Rotation):
            raise ScenarioError("rotation_refute_ufb needs a rotation system")
        env["alpha_convergent"] = str(sys.angle)
        env["alpha_source"] = sys.source
        delta = parse_number(params.get("delta", "1/2"))
        horizon = int(params.get("horizon", 10**4))
        grid_size = int(params.get("eta_grid_size", 64))
        from .rotation import default_eta_grid

        verdict = refute_ufb(
            sys.angle,
            delta,
            default_eta_grid(Fraction(delta), grid_size),
            horizon,
            source=sys.source,
        )
        rows = list(verdict.counterexamples)
        sidecars.append(
            (f"{scenario.name}.eta-grid.csv", lambda p: write_eta_grid_csv(p, rows))
        )
        return verdict, env, sidecars

    if check == "shift_sufficiency":
        sys = build_system(scenario.system)
        if not is_shift(sys):
            raise ScenarioError("shift_sufficiency needs a shift system")
        delta = parse_number(params.get("delta", "1/10"))
        horizon = int(params.get("horizon", 10**4))
        verdict = delta_mixing_sufficiency(sys, delta, horizon)
        directions = [ProductDirection.FORWARD]
        if isinstance(sys, BilateralShift):
            directions.append(ProductDirection.BACKWARD)
        for d in directions:
            trace = trace_products(sys.weights, d, horizon)
            sidecars.append(
                (
                    f"{scenario.name}.products-{d.value}.csv",
                    lambda p, t=trace: write_trace_csv(p, t),
                )
            )
        return verdict, env, sidecars

    if check in ("criterion_delta_hc", "criterion_classical"):
        lam = parse_number(scenario.system.get("lam", "2"))
        support_cap = int(params.get("support_cap", 6))
        k_max = int(params.get("k_max", 40))
        inst = lambda_b_instance(lam, support_cap, k_max)
        if check == "criterion_delta_hc":
            tol = float(parse_number(params.get("tol", "1e-9")))
            report = check_delta_hc(inst, parse_number(params["delta"]), k_max, tol)
            verdict = Verdict(
                report.verdict.status,
                report.verdict.witnesses,
                report.verdict.counterexamples,
                report.verdict.note,
                {
                    **report.verdict.details,
                    "recovery_k0": list(report.recovery_k0),
                    "max_recovery_gap": max(
                        (max(row) for row in report.recovery_gap), default=0.0
                    ),
                },
            )
        else:
            tol = float(parse_number(params.get("tol", "1e-9")))
            verdict = check_classical_hc(inst, tol, k_max)
        return verdict, env, sidecars

    if check == "sequence_mixing":
        lam = parse_number(scenario.system.get("lam", "2"))
        support_cap = int(params.get("support_cap", 6))
        k_max = int(params.get("k_max", 40))
        inst = lambda_b_instance(lam, support_cap, k_max)
        space = inst.sys.space
        pairs_spec = params.get("pairs", {"type": "seq_basis", "count": 4, "radius": "1/5"})
        if pairs_spec.get("type") == "pairs":
            pairs = build_pair_cover(space, {"cover": pairs_spec})
        else:
            regions = build_regions(space, pairs_spec)
            pairs = tuple((u, v) for u in regions for v in regions)
        verdict = check_sequence_mixing(inst, parse_number(params["delta"]), pairs, k_max)
        return verdict, env, sidecars

    if check == "build_vector":
        lam = parse_number(scenario.system.get("lam", "2"))
        delta = parse_number(params["delta"])
        support_cap = int(params.get("support_cap", 6))
        count = int(params.get("target_count", 16))
        seed = int(params["seed"])
        env["seed"] = seed
        targets = _random_targets(seed, count, support_cap)
        x, plan = build_delta_hc_vector(lam, targets, delta)
        sys = RolewiczLambdaB(lam)
        regions = [OpenRegion((Ball(t, delta),)) for t in targets]
        horizon = max(row.m for row in plan.rows) + 1
        verdict = check_delta_transitive_point(sys, x, regions, delta, horizon)
        verdict = Verdict(
            verdict.status,
            verdict.witnesses,
            verdict.counterexamples,
            verdict.note,
            {**verdict.details, "plan": jsonable(plan), "vector": jsonable(x)},
        )
        sidecars.append(
            (f"{scenario.name}.plan.csv", lambda p: write_plan_csv(p, plan))
        )
        return verdict, env, sidecars

    raise ScenarioError(f"unhandled check {check!r}")


def run_scenario(scenario: Scenario, out_dir: Path | None = None) -> RunResult:
    start = time.perf_counter()
    verdict, env, sidecar_specs = _execute(scenario, out_dir)
    timing_ms = (time.perf_counter() - start) * 1000.0

    sidecar_paths = []
    names = []
    for filename, writer in sidecar_specs:
        names.append(filename)
        if out_dir is not None:
            path = Path(out_dir) / filename
            writer(path)
            sidecar_paths.append(path)

    cert = build_certificate(scenario.as_dict(), verdict, env, timing_ms, names)
    cert_path = None
    if out_dir is not None:
        cert_path = Path(out_dir) / f"{scenario.name}.cert.json"
        write_certificate(cert_path, cert)
    return RunResult(scenario, verdict, cert, cert_path, sidecar_paths)


# ---------------------------------------------------------------------------
# Bundled scenarios
# ---------------------------------------------------------------------------


def bundled_scenario_names() -> list[str]:
    files = resources.files(__package__) / "scenarios"
    return sorted(p.name[: -len(".toml")] for p in files.iterdir() if p.name.endswith(".toml"))


def load_bundled_scenario(name: str) -> Scenario:
    res = resources.files(__package__) / "scenarios" / f"{name}.toml"
    if not res.is_file():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return load_scenario_text(res.read_text(encoding="utf-8"), f"bundled:{name}")


def list_scenarios() -> list[tuple[str, str, str]]:
    """(name, check, claim) rows for every bundled scenario."""
    rows = []
    for name in bundled_scenario_names():
        scn = load_bundled_scenario(name)
        rows.append((scn.name, scn.check, scn.claim))
    return rows
