"""Command line interface.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from hrnflow.cosheaf import ConeMode
from hrnflow.dataflow import CapacityMode
from hrnflow.packet_sim import (
    ScenarioError,
    SimulationError,
    compare_diagrams,
    diagram_from_report,
    load_scenario,
    run_instance,
    write_report_bundle,
)
from hrnflow.persistence import ErrorDiagram
from hrnflow.render import render_ascii, render_svg

OK, DOMAIN, USAGE, IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(IO, f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(IO, f"cannot write {path}: {exc.strerror or exc}") from exc


def _scenario(path: str):
    try:
        return load_scenario(_read(path))
    except ScenarioError as exc:
        raise CliError(DOMAIN, f"invalid scenario {path}: {exc}") from exc


def _load_json(path: str) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / "report.json"
    try:
        return json.loads(_read(str(p)))
    except json.JSONDecodeError as exc:
        raise CliError(DOMAIN, f"{p} is not valid JSON: {exc}") from exc


def _diagram(path: str) -> ErrorDiagram:
    doc = _load_json(path)
    if isinstance(doc, dict) and "diagram" in doc:  # a full report
        doc = doc["diagram"]
    try:
        return ErrorDiagram.from_dict(doc)
    except ValueError as exc:
        raise CliError(DOMAIN, f"{path}: {exc}") from exc


def cmd_validate(args) -> int:
    s = _scenario(args.scenario)
    print(f"ok: {args.scenario} (m={s.m}, cycle lengths {list(s.cycle_lengths)})")
    return OK


def cmd_simulate(args) -> int:
    s = _scenario(args.scenario).with_overrides(args.capacity_mode, args.kernel_mode)
    try:
        report = run_instance(s, seed_override=args.seed, instance=args.instance)
    except (SimulationError, ScenarioError) as exc:
        raise CliError(DOMAIN, f"simulation failed: {exc}") from exc
    try:
        files = write_report_bundle(report, args.out)
    except OSError as exc:
        raise CliError(IO, f"cannot write report bundle to {args.out}: {exc}") from exc
    print(f"thetas: {list(report.thetas)}")
    print("classes: " + ", ".join(c.kind.value for c in report.classifications))
    print(f"diagram points: {len(report.diagram)}")
    print(f"wrote {', '.join(str(p) for p in files.values())}")
    return OK


def cmd_diagram(args) -> int:
    doc = _load_json(args.report)
    try:
        derived = diagram_from_report(doc)
        embedded = ErrorDiagram.from_dict(doc["diagram"])
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(DOMAIN, f"corrupt report {args.report}: {exc}") from exc
    if derived != embedded:
        raise CliError(
            DOMAIN,
            f"report diagram {list(embedded.points)} does not match the diagram "
            f"re-derived from its cone table {list(derived.points)}",
        )
    _write(args.out, derived.to_json())
    return OK


def _fmt(x: float) -> str:
    return f"{x:g}"


def cmd_compare(args) -> int:
    a, b = _diagram(args.a), _diagram(args.b)
    c = compare_diagrams(a, b, args.threshold)
    print(f"distance: {_fmt(c.distance)}")
    print(f"verdict: {c.verdict}")
    for label, st in zip((args.a, args.b), c.stats):
        print(
            f"{label}: {len(st.noise)} noise, {len(st.significant)} significant, "
            f"{st.n_infinite} unresolved"
        )
    return OK


def cmd_render(args) -> int:
    d = _diagram(args.diagram)
    text = render_svg(d) if args.format == "svg" else render_ascii(d)
    _write(args.out, text)
    return OK


def cmd_check(args) -> int:
    from hrnflow.selfcheck import run_checks

    results = run_checks()
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name.ljust(width)}  {detail}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return OK if not failed else DOMAIN


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hrnflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a scenario file")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="run one instance and write a report bundle")
    s.add_argument("scenario")
    s.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    s.add_argument("--instance", type=int, default=0, help="instance index mixed into the seed")
    s.add_argument("--out", default="report", help="output directory (default: ./report)")
    s.add_argument("--policy.capacity-mode", dest="capacity_mode", choices=[m.value for m in CapacityMode])
    s.add_argument("--policy.kernel-mode", dest="kernel_mode", choices=[m.value for m in ConeMode])
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("diagram", help="re-derive the diagram of a report and check it")
    d.add_argument("report", help="report.json or a bundle directory")
    d.add_argument("--out", default=None, help="diagram file (default: stdout)")
    d.set_defaults(func=cmd_diagram)

    c = sub.add_parser("compare", help="bottleneck distance between two diagrams")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--threshold", type=float, default=1, help="noise threshold on persistence")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("render", help="draw a diagram")
    r.add_argument("diagram")
    r.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_render)

    k = sub.add_parser("check", help="run the embedded property and oracle checks")
    k.set_defaults(func=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
