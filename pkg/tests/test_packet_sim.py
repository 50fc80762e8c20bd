import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrnflow.builtin_scenarios import NOISY_DELIVERY
from hrnflow.cosheaf import ConeMode
from hrnflow.dataflow import Kind
from hrnflow.packet_sim import (
    ScenarioError,
    SimulationError,
    compare_diagrams,
    compare_instances,
    diagram_from_report,
    events_from_table,
    load_scenario,
    load_scenario_file,
    run_batch,
    run_instance,
    write_report_bundle,
)
from hrnflow.persistence import INF, ErrorDiagram, generate_p_intervals

ROOT = Path(__file__).resolve().parents[1]


def test_load_three_cycle(three_cycle_doc):
    s = load_scenario(three_cycle_doc)
    assert s.m == 3
    assert s.ells == (2, 0, 1)
    assert s.desired_outputs == (1, 2, 3)
    assert s.subprograms[0].capacities == (2, 3, 2)
    assert load_scenario(json.dumps(three_cycle_doc)) == s
    assert load_scenario_file(ROOT / "scenarios" / "three_cycle.json") == s
    assert load_scenario(s.to_dict()) == s


def test_missing_field_named(three_cycle_doc):
    del three_cycle_doc["desired_outputs"]
    with pytest.raises(ScenarioError) as exc:
        load_scenario(three_cycle_doc)
    assert exc.value.path == "desired_outputs"


def test_length_mismatch(three_cycle_doc):
    doc = three_cycle_doc
    doc["network"] = {"m": 2, "cycle_lengths": [3, 4]}
    doc["desired_outputs"] = [1, 2]
    with pytest.raises(ScenarioError) as exc:
        load_scenario(doc)
    assert exc.value.path == "subprograms"
    assert "does not match m=2" in str(exc.value)


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d["subprograms"][1].update(ell=-1), "subprograms/1/ell"),
        (lambda d: d["subprograms"][2].update(capacities=[3, 3]), "subprograms/2/capacities"),
        (lambda d: d["desired_outputs"].__setitem__(0, -4), "desired_outputs/0"),
        (lambda d: d["policy"].update(capacity_mode="squash"), "policy/capacity_mode"),
        (lambda d: d["subprograms"][0].update(initial={"uniform": {"lo": 3, "hi": 1}}),
         "subprograms/0/initial/uniform"),
        (lambda d: d.update(seed=2**64), "seed"),
        (lambda d: d["network"].update(cycle_lengths=[3, 2, 3]), "network/cycle_lengths/1"),
    ],
)
def test_schema_errors_carry_paths(three_cycle_doc, mutate, path):
    mutate(three_cycle_doc)
    with pytest.raises(ScenarioError) as exc:
        load_scenario(three_cycle_doc)
    assert exc.value.path == path


def test_not_json():
    with pytest.raises(ScenarioError):
        load_scenario("{nope")


def test_run_three_cycle(three_cycle_doc):
    r = run_instance(load_scenario(three_cycle_doc))
    assert r.thetas == (7, 0, 3)
    assert [c.kind for c in r.classifications] == [Kind.ABLE, Kind.FAULTY, Kind.SUFFICIENT]
    assert r.profile.pairs == ((0, 6), (2, 0), (0, 0))
    assert [(e.index, e.magnitude) for e in r.S1] == [(2, 2)]
    assert [(e.index, e.magnitude) for e in r.S2] == [(1, 6)]
    assert r.diagram.points == ((2, INF, 2),)
    assert r.stitching == ("boundary 1->2: final dimension 7 != initial dimension 0",
                           "boundary 2->3: final dimension 0 != initial dimension 1")


def test_strict_stitching_rejects_three_cycle(three_cycle_doc):
    three_cycle_doc["policy"]["strict_stitching"] = True
    with pytest.raises(ValueError):
        run_instance(load_scenario(three_cycle_doc))


def test_all_sufficient(three_cycle_doc):
    three_cycle_doc["desired_outputs"] = [7, 0, 3]
    r = run_instance(load_scenario(three_cycle_doc))
    assert r.diagram.points == ()
    assert r.S1 == r.S2 == ()


def test_reject_overflow_names_location(three_cycle_doc):
    s = load_scenario(three_cycle_doc).with_overrides(capacity_mode="reject")
    with pytest.raises(SimulationError) as exc:
        run_instance(s)
    assert exc.value.subprogram == 1
    assert "vertex 1" in str(exc.value)


def test_cap_everywhere_changes_first_subprogram(three_cycle_doc):
    three_cycle_doc["subprograms"][0]["initial"] = {"fixed": 2}
    s = load_scenario(three_cycle_doc).with_overrides(capacity_mode="cap")
    r = run_instance(s)
    assert r.flows[0].dims == ((2,), (3,), (2,))


def test_determinism_and_seed_sensitivity():
    s = load_scenario(NOISY_DELIVERY)
    a, b = run_instance(s), run_instance(s)
    assert a.to_json() == b.to_json()
    others = {run_instance(s, seed_override=k).to_json() for k in range(8)}
    assert len(others) > 1
    batch = run_batch(s, 4)
    assert batch[2].to_json() == run_instance(s, instance=2).to_json()
    assert "PCG64" in json.loads(a.to_json())["generator"]["rng"]


def test_uniform_initial_in_range():
    s = load_scenario(NOISY_DELIVERY)
    for j in range(30):
        r = run_instance(s, instance=j)
        for spec, f in zip(s.subprograms, r.flows):
            lo, hi = spec.initial_range
            assert lo <= f.initial <= hi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(list(ConeMode)))
def test_pipeline_consistency(seed, mode):
    s = load_scenario(NOISY_DELIVERY).with_overrides(kernel_mode=mode.value)
    r = run_instance(s, seed_override=seed)
    S1, S2 = events_from_table(r.cone_rows, mode)
    assert generate_p_intervals(S1, S2, s.match_policy) == r.diagram
    assert diagram_from_report(json.loads(r.to_json())) == r.diagram


def test_compare_instances(three_cycle_doc):
    r = run_instance(load_scenario(three_cycle_doc))
    assert compare_instances(r, r).distance == 0
    c = compare_diagrams(ErrorDiagram.from_points([(2, 5, 1)]), ErrorDiagram.from_points([(2, 7, 1)]))
    assert c.distance == 2
    c = compare_diagrams(r.diagram, ErrorDiagram())
    assert c.distance == INF and "incomparable" in c.verdict
    other = run_instance(load_scenario(NOISY_DELIVERY))
    c1, c2 = compare_instances(r, other), compare_instances(other, r)
    assert c1.distance == c2.distance
    assert c1.warnings and "HRN shapes differ" in c1.warnings[0]


def test_bundle(tmp_path, three_cycle_doc):
    r = run_instance(load_scenario(three_cycle_doc))
    files = write_report_bundle(r, tmp_path / "out")
    assert {p.name for p in files.values()} == {
        "report.json", "flows.csv", "cone.csv", "diagram.json", "diagram.csv"
    }
    assert files["flows"].read_text().splitlines()[:2] == ["subprogram,vertex,iter1", "1,1,3"]
    assert ErrorDiagram.from_json(files["diagram"].read_text()) == r.diagram


def test_scenario_files_match_builtins():
    from hrnflow.builtin_scenarios import THREE_CYCLE

    assert json.loads((ROOT / "scenarios" / "three_cycle.json").read_text()) == THREE_CYCLE
    assert json.loads((ROOT / "scenarios" / "noisy_delivery.json").read_text()) == NOISY_DELIVERY
