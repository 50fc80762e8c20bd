"""Scenario loading and the end-to-end packet-delivery pipeline.

flows -> classification -> margin profile -> cone kernels -> P-intervals -> diagram.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Sequence

import jsonschema
import numpy as np

from hrnflow import __version__
from hrnflow.cosheaf import ConeMode, SheafKind, cone_table, cone_table_csv
from hrnflow.dataflow import (
    CapacityMode,
    Classification,
    DataFlow,
    FlowPolicy,
    MarginProfile,
    QuiverRep,
    check_stitching,
    classify,
    margin_profile,
    simulate_flow,
)
from hrnflow.hrn import build_hrn, subprogram
from hrnflow.persistence import (
    INF,
    DiagramStats,
    ErrorDiagram,
    ErrorEvent,
    MagnitudeRule,
    MatchPolicy,
    bottleneck_distance,
    diagram_statistics,
    generate_p_intervals,
)

REPORT_FORMAT = "hrnflow-report/1"
RNG_NAME = "numpy PCG64 seeded by SeedSequence([seed, instance])"
UINT64_MAX = 2**64 - 1

_nat = {"type": "integer", "minimum": 0}
_modes = {"enum": [m.value for m in CapacityMode]}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["network", "subprograms", "desired_outputs"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "network": {
            "type": "object",
            "required": ["m", "cycle_lengths"],
            "additionalProperties": False,
            "properties": {
                "m": {"type": "integer", "minimum": 1},
                "cycle_lengths": {"type": "array", "items": {"type": "integer", "minimum": 3}},
            },
        },
        "subprograms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["capacities", "ell", "initial", "iterations"],
                "additionalProperties": False,
                "properties": {
                    "capacities": {"type": "array", "items": _nat},
                    "ell": _nat,
                    "iterations": {"type": "integer", "minimum": 1},
                    "capacity_mode": _modes,
                    "initial": {
                        "type": "object",
                        "minProperties": 1,
                        "maxProperties": 1,
                        "additionalProperties": False,
                        "properties": {
                            "fixed": _nat,
                            "uniform": {
                                "type": "object",
                                "required": ["lo", "hi"],
                                "additionalProperties": False,
                                "properties": {"lo": _nat, "hi": _nat},
                            },
                        },
                    },
                },
            },
        },
        "desired_outputs": {"type": "array", "items": _nat},
        "policy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "capacity_mode": _modes,
                "beta_adds": {"type": "boolean"},
                "strict_stitching": {"type": "boolean"},
                "magnitude_rule": {"enum": [r.value for r in MagnitudeRule]},
                "require_subsequent": {"type": "boolean"},
                "kernel_mode": {"enum": [m.value for m in ConeMode]},
                "noise_threshold": {"type": "number", "minimum": 0},
            },
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": UINT64_MAX},
    },
}


class ScenarioError(ValueError):
    """Invalid scenario document; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")


@dataclass(frozen=True)
class SubprogramSpec:
    capacities: tuple[int, ...]
    ell: int
    iterations: int
    initial_fixed: Optional[int] = None
    initial_range: Optional[tuple[int, int]] = None
    capacity_mode: Optional[CapacityMode] = None

    def draw_initial(self, rng: np.random.Generator) -> int:
        if self.initial_fixed is not None:
            return self.initial_fixed
        lo, hi = self.initial_range
        return int(rng.integers(lo, hi, endpoint=True))


@dataclass(frozen=True)
class Scenario:
    m: int
    cycle_lengths: tuple[int, ...]
    subprograms: tuple[SubprogramSpec, ...]
    desired_outputs: tuple[int, ...]
    flow_policy: FlowPolicy = FlowPolicy()
    match_policy: MatchPolicy = MatchPolicy()
    kernel_mode: ConeMode = ConeMode.ABSOLUTE
    noise_threshold: float = 1
    seed: int = 0
    name: str = ""

    @property
    def ells(self) -> tuple[int, ...]:
        return tuple(s.ell for s in self.subprograms)

    def with_overrides(
        self, capacity_mode: Optional[str] = None, kernel_mode: Optional[str] = None
    ) -> "Scenario":
        """Override policy fields; a capacity mode override applies to every subprogram."""
        s = self
        if capacity_mode is not None:
            s = replace(
                s,
                flow_policy=replace(s.flow_policy, capacity_mode=CapacityMode(capacity_mode)),
                subprograms=tuple(replace(sp, capacity_mode=None) for sp in s.subprograms),
            )
        if kernel_mode is not None:
            s = replace(s, kernel_mode=ConeMode(kernel_mode))
        return s

    def to_dict(self) -> dict:
        subs = []
        for sp in self.subprograms:
            d: dict[str, Any] = {
                "capacities": list(sp.capacities),
                "ell": sp.ell,
                "iterations": sp.iterations,
                "initial": (
                    {"fixed": sp.initial_fixed}
                    if sp.initial_fixed is not None
                    else {"uniform": {"lo": sp.initial_range[0], "hi": sp.initial_range[1]}}
                ),
            }
            if sp.capacity_mode is not None:
                d["capacity_mode"] = sp.capacity_mode.value
            subs.append(d)
        return {
            "name": self.name,
            "network": {"m": self.m, "cycle_lengths": list(self.cycle_lengths)},
            "subprograms": subs,
            "desired_outputs": list(self.desired_outputs),
            "policy": {
                "capacity_mode": self.flow_policy.capacity_mode.value,
                "beta_adds": self.flow_policy.beta_adds,
                "strict_stitching": self.flow_policy.strict_stitching,
                "magnitude_rule": self.match_policy.magnitude_rule.value,
                "require_subsequent": self.match_policy.require_subsequent,
                "kernel_mode": self.kernel_mode.value,
                "noise_threshold": self.noise_threshold,
            },
            "seed": self.seed,
        }


def _schema_path(err: jsonschema.ValidationError) -> str:
    path = "/".join(str(p) for p in err.absolute_path)
    if err.validator == "required":
        missing = err.message.split("'")[1]
        path = f"{path}/{missing}" if path else missing
    return path


def load_scenario(source: str | bytes | dict) -> Scenario:
    """Parse and fully validate a scenario given as JSON text or an already-parsed dict."""
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ScenarioError("", f"not valid JSON: {exc}") from exc
    else:
        doc = source

    validator = jsonschema.Draft7Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise ScenarioError(_schema_path(err), err.message)

    m = doc["network"]["m"]
    lengths = doc["network"]["cycle_lengths"]
    for field_path, seq in (
        ("network/cycle_lengths", lengths),
        ("subprograms", doc["subprograms"]),
        ("desired_outputs", doc["desired_outputs"]),
    ):
        if len(seq) != m:
            raise ScenarioError(field_path, f"length {len(seq)} does not match m={m}")

    subs = []
    for n, (raw, k) in enumerate(zip(doc["subprograms"], lengths)):
        if len(raw["capacities"]) != k:
            raise ScenarioError(
                f"subprograms/{n}/capacities",
                f"{len(raw['capacities'])} capacities for a cycle of length {k}",
            )
        init = raw["initial"]
        fixed, rng_range = init.get("fixed"), None
        if "uniform" in init:
            lo, hi = init["uniform"]["lo"], init["uniform"]["hi"]
            if lo > hi:
                raise ScenarioError(f"subprograms/{n}/initial/uniform", f"lo={lo} > hi={hi}")
            rng_range = (lo, hi)
        mode = raw.get("capacity_mode")
        subs.append(
            SubprogramSpec(
                capacities=tuple(raw["capacities"]),
                ell=raw["ell"],
                iterations=raw["iterations"],
                initial_fixed=fixed,
                initial_range=rng_range,
                capacity_mode=CapacityMode(mode) if mode else None,
            )
        )

    pol = doc.get("policy", {})
    return Scenario(
        m=m,
        cycle_lengths=tuple(lengths),
        subprograms=tuple(subs),
        desired_outputs=tuple(doc["desired_outputs"]),
        flow_policy=FlowPolicy(
            capacity_mode=pol.get("capacity_mode", "cap"),
            beta_adds=pol.get("beta_adds", True),
            strict_stitching=pol.get("strict_stitching", False),
        ),
        match_policy=MatchPolicy(
            magnitude_rule=pol.get("magnitude_rule", "exact"),
            require_subsequent=pol.get("require_subsequent", True),
        ),
        kernel_mode=ConeMode(pol.get("kernel_mode", "absolute")),
        noise_threshold=pol.get("noise_threshold", 1),
        seed=doc.get("seed", 0),
        name=doc.get("name", ""),
    )


def load_scenario_file(path: str | os.PathLike) -> Scenario:
    return load_scenario(Path(path).read_text())


class SimulationError(RuntimeError):
    def __init__(self, subprogram: int, cause: Exception):
        self.subprogram = subprogram
        super().__init__(f"subprogram {subprogram}: {cause}")


def events_from_table(rows: Sequence[dict], mode: ConeMode) -> tuple[list[ErrorEvent], list[ErrorEvent]]:
    """Deficit (S1) and surplus (S2) events read off a cone table."""
    mode = ConeMode(mode)
    S1, S2 = [], []
    for row in rows:
        if row["k"] == 0:
            continue
        e = row[f"cone_{SheafKind.ERROR.value}_{mode.value}"]
        f = row[f"cone_{SheafKind.FIX.value}_{mode.value}"]
        if e > 0:
            S1.append(ErrorEvent(row["k"], e))
        if f > 0:
            S2.append(ErrorEvent(row["k"], f))
    return S1, S2


@dataclass(frozen=True)
class InstanceReport:
    scenario: Scenario
    seed: int
    instance: int
    flows: tuple[DataFlow, ...]
    thetas: tuple[int, ...]
    classifications: tuple[Classification, ...]
    profile: MarginProfile
    cone_rows: tuple[dict, ...]
    S1: tuple[ErrorEvent, ...]
    S2: tuple[ErrorEvent, ...]
    diagram: ErrorDiagram
    stats: DiagramStats
    stitching: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "generator": {"name": "hrnflow", "version": __version__, "rng": RNG_NAME},
            "scenario": self.scenario.to_dict(),
            "seed": self.seed,
            "instance": self.instance,
            "initial_dims": [f.initial for f in self.flows],
            "flows": [
                {"subprogram": n, "dims": [list(r) for r in f.dims]}
                for n, f in enumerate(self.flows, start=1)
            ],
            "thetas": list(self.thetas),
            "classifications": [
                {"kind": c.kind.value, "margin": c.margin, "theta": c.theta, "delta": c.delta}
                for c in self.classifications
            ],
            "margin_profile": [list(p) for p in self.profile.pairs],
            "cone_table": list(self.cone_rows),
            "events": {
                "S1": [[e.index, e.magnitude] for e in self.S1],
                "S2": [[e.index, e.magnitude] for e in self.S2],
            },
            "diagram": self.diagram.to_dict(),
            "statistics": self.stats.to_dict(),
            "stitching": list(self.stitching),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def flows_csv(self) -> str:
        lines = []
        for n, f in enumerate(self.flows, start=1):
            body = f.to_csv().splitlines()
            if n == 1:
                lines.append("subprogram," + body[0])
            lines.extend(f"{n},{row}" for row in body[1:])
        return "\n".join(lines) + "\n"


def instance_rng(seed: int, instance: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, instance])))


def run_instance(s: Scenario, seed_override: Optional[int] = None, instance: int = 0) -> InstanceReport:
    seed = s.seed if seed_override is None else seed_override
    if not 0 <= seed <= UINT64_MAX:
        raise ScenarioError("seed", f"{seed} is not a 64-bit unsigned integer")
    rng = instance_rng(seed, instance)
    hrn = build_hrn(s.m, s.cycle_lengths)

    flows = []
    for n, spec in enumerate(s.subprograms, start=1):
        sp = subprogram(hrn, n)
        rep = QuiverRep(n, spec.capacities, spec.ell, spec.draw_initial(rng))
        if rep.k != sp.k:
            raise ScenarioError(f"subprograms/{n - 1}/capacities", f"{rep.k} capacities for a cycle of length {sp.k}")
        policy = s.flow_policy
        if spec.capacity_mode is not None:
            policy = replace(policy, capacity_mode=spec.capacity_mode)
        try:
            flows.append(simulate_flow(rep, spec.iterations, policy))
        except ValueError as exc:
            raise SimulationError(n, exc) from exc

    stitching = check_stitching(flows, strict=s.flow_policy.strict_stitching)
    classes = tuple(classify(f, d) for f, d in zip(flows, s.desired_outputs))
    profile = margin_profile(flows, s.desired_outputs)
    rows = tuple(cone_table(profile))
    S1, S2 = events_from_table(rows, s.kernel_mode)
    diagram = generate_p_intervals(S1, S2, s.match_policy)
    return InstanceReport(
        scenario=s,
        seed=seed,
        instance=instance,
        flows=tuple(flows),
        thetas=tuple(f.theta for f in flows),
        classifications=classes,
        profile=profile,
        cone_rows=rows,
        S1=tuple(S1),
        S2=tuple(S2),
        diagram=diagram,
        stats=diagram_statistics(diagram, s.noise_threshold),
        stitching=tuple(stitching.messages()),
    )


def run_batch(s: Scenario, count: int, seed_override: Optional[int] = None) -> list[InstanceReport]:
    """Independent instances; instance ``j`` is seeded from ``(seed, j)`` only."""
    return [run_instance(s, seed_override, j) for j in range(count)]


def write_report_bundle(report: InstanceReport, outdir: str | os.PathLike) -> dict[str, Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report": (out / "report.json", report.to_json()),
        "flows": (out / "flows.csv", report.flows_csv()),
        "cone": (out / "cone.csv", cone_table_csv(report.cone_rows)),
        "diagram": (out / "diagram.json", report.diagram.to_json()),
        "diagram_csv": (out / "diagram.csv", report.diagram.to_csv()),
    }
    for path, text in files.values():
        path.write_text(text)
    return {k: p for k, (p, _) in files.items()}


def diagram_from_report(doc: dict) -> ErrorDiagram:
    """Re-derive the diagram of a serialized report from its own cone table and policy."""
    try:
        pol = doc["scenario"]["policy"]
        S1, S2 = events_from_table(doc["cone_table"], ConeMode(pol["kernel_mode"]))
        policy = MatchPolicy(pol["magnitude_rule"], pol["require_subsequent"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"corrupt report: {exc}") from exc
    return generate_p_intervals(S1, S2, policy)


@dataclass(frozen=True)
class Comparison:
    distance: float
    stats: tuple[DiagramStats, DiagramStats]
    verdict: str
    warnings: tuple[str, ...] = ()


def compare_diagrams(d1: ErrorDiagram, d2: ErrorDiagram, threshold: float = 1) -> Comparison:
    dist = bottleneck_distance(d1, d2)
    if dist == INF:
        verdict = (
            "incomparable: the diagrams have different numbers of unresolved errors "
            f"(points at infinity: {sum(m for *_, m in d1.at_infinity)} vs "
            f"{sum(m for *_, m in d2.at_infinity)})"
        )
    elif dist == 0:
        verdict = "identical error persistence"
    else:
        verdict = f"bottleneck distance {dist:g}; lower distance means more similar flows"
    return Comparison(dist, (diagram_statistics(d1, threshold), diagram_statistics(d2, threshold)), verdict)


def compare_instances(r1: InstanceReport, r2: InstanceReport) -> Comparison:
    c = compare_diagrams(r1.diagram, r2.diagram, r1.scenario.noise_threshold)
    warnings = []
    if r1.scenario.cycle_lengths != r2.scenario.cycle_lengths:
        warnings.append(
            f"HRN shapes differ: cycle lengths {list(r1.scenario.cycle_lengths)} "
            f"vs {list(r2.scenario.cycle_lengths)}"
        )
    return replace(c, warnings=tuple(warnings))
