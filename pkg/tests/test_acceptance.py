"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""
import copy
import filecmp
import itertools
import time

import numpy as np

from hrnflow import oracles
from hrnflow.builtin_scenarios import THREE_CYCLE
from hrnflow.cli import main
from hrnflow.cosheaf import ConeMode, SheafKind, cone_homology_dim
from hrnflow.dataflow import Kind, MarginProfile
from hrnflow.packet_sim import load_scenario, run_instance
from hrnflow.persistence import (
    INF,
    ErrorDiagram,
    ErrorEvent,
    MatchPolicy,
    bottleneck_distance,
    generate_p_intervals,
    persistent_error_dim,
)


def test_criterion_1_three_cycle_reproduction(criterion):
    start = time.perf_counter()
    r = run_instance(load_scenario(copy.deepcopy(THREE_CYCLE)))
    elapsed = time.perf_counter() - start
    kinds = tuple(c.kind for c in r.classifications)
    ok = (
        r.thetas == (7, 0, 3)
        and kinds == (Kind.ABLE, Kind.FAULTY, Kind.SUFFICIENT)
        and elapsed < 1.0
    )
    criterion(1, "three-cycle thetas and classes", ok,
              f"thetas={r.thetas}, classes={[k.value for k in kinds]}, {elapsed * 1000:.1f} ms")
    assert ok


def _random_absorbing_doc(rng):
    m = int(rng.integers(1, 5))
    lengths = [int(k) for k in rng.integers(3, 7, size=m)]
    subs, targets = [], []
    for n, k in enumerate(lengths):
        caps = [int(c) for c in rng.integers(0, 8, size=k)]
        ell = int(rng.integers(0, 4))
        if n == 0 or rng.random() < 0.5:
            ell = 0
            caps[int(rng.integers(0, k))] = 0
            targets.append(n)
        subs.append({
            "capacities": caps,
            "ell": ell,
            "initial": {"uniform": {"lo": 0, "hi": caps[0]}},
            "iterations": int(rng.integers(1, 4)),
        })
    doc = {
        "network": {"m": m, "cycle_lengths": lengths},
        "subprograms": subs,
        "desired_outputs": [int(d) for d in rng.integers(0, 6, size=m)],
        "policy": {"capacity_mode": "cap", "beta_adds": bool(rng.random() < 0.5)},
        "seed": int(rng.integers(0, 2**63)),
    }
    return doc, targets


def test_criterion_2_zero_capacity_absorption(criterion):
    rng = np.random.default_rng(2)
    failures = []
    for _ in range(100):
        doc, targets = _random_absorbing_doc(rng)
        r = run_instance(load_scenario(doc))
        failures += [(doc, n) for n in targets if r.thetas[n] != 0]
    ok = not failures
    criterion(2, "zero capacity with ell=0 forces theta=0", ok, f"100 scenarios, {len(failures)} failures")
    assert ok


def _isolated(p):
    return not any(
        (p.faulty(n) and p.faulty(n + 1)) or (p.able(n) and p.able(n + 1)) for n in range(1, p.n)
    )


def test_criterion_3_detection_property(criterion):
    start = time.perf_counter()
    abs_bad, inc_bad = [], []
    n_profiles = n_isolated = 0
    for n in range(1, 6):
        for signed in itertools.product(range(-3, 4), repeat=n):
            p = MarginProfile.from_signed(signed)
            n_profiles += 1
            iso = _isolated(p)
            n_isolated += iso
            for k in range(1, n + 1):
                for kind, truth in ((SheafKind.ERROR, p.faulty(k)), (SheafKind.FIX, p.able(k))):
                    if (cone_homology_dim(kind, p, k, ConeMode.ABSOLUTE) > 0) != truth:
                        abs_bad.append((p.pairs, k, kind.value))
                    if iso and (cone_homology_dim(kind, p, k, ConeMode.INCREMENTAL) > 0) != truth:
                        inc_bad.append((p.pairs, k, kind.value))
    elapsed = time.perf_counter() - start
    inc_degrees = sorted({k for _, k, _ in inc_bad})
    ok = not abs_bad and not inc_bad and elapsed < 30
    criterion(
        3, "cone dimension detects errors/fixes", ok,
        f"{n_profiles} profiles, absolute mismatches {len(abs_bad)}; "
        f"{n_isolated} isolated profiles, incremental mismatches {len(inc_bad)} "
        f"at degrees {inc_degrees}; {elapsed:.1f} s",
    )
    assert not abs_bad, abs_bad[:5]
    assert not inc_bad, (
        f"{len(inc_bad)} incremental mismatches at degrees {inc_degrees}, e.g. {inc_bad[:3]}"
    )
    assert elapsed < 30


def test_criterion_4_p_intervals_oracle(criterion):
    cases = bad = 0
    for labels in itertools.product((0, 1, 2), repeat=6):
        s1 = [i + 1 for i, t in enumerate(labels) if t == 1]
        s2 = [i + 1 for i, t in enumerate(labels) if t == 2]
        if len(s1) > 4 or len(s2) > 4:
            continue
        for m1 in itertools.product((1, 2, 3), repeat=len(s1)):
            S1 = list(zip(s1, m1))
            E1 = [ErrorEvent(*e) for e in S1]
            for m2 in itertools.product((1, 2, 3), repeat=len(s2)):
                S2 = list(zip(s2, m2))
                E2 = [ErrorEvent(*e) for e in S2]
                for sub in (True, False):
                    d = generate_p_intervals(E1, E2, MatchPolicy("exact", sub))
                    deaths = [dd for _, dd, _ in d.points if dd != INF]
                    good = (
                        list(d.points) == oracles.greedy_p_intervals(S1, S2, sub)
                        and len(deaths) == len(set(deaths))
                        and sorted(b for b, _, _ in d.points) == s1
                        and d.total_multiplicity == sum(m1)
                    )
                    cases += 1
                    bad += not good
    ok = bad == 0
    criterion(4, "P-intervals equal the greedy oracle", ok, f"{cases} cases, {bad} failures")
    assert ok


def _random_points(rng, count, span=8):
    pts = []
    while len(pts) < count:
        b = int(rng.integers(0, span))
        mult = int(min(rng.choice([1, 1, 1, 2]), count - len(pts)))
        death = INF if rng.random() < 0.15 else b + int(rng.integers(1, span))
        pts.extend([(b, death)] * mult)
    return pts


def test_criterion_5_bottleneck(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    mismatches = 0
    for _ in range(1000):
        total = int(rng.integers(0, 7))
        n1 = int(rng.integers(0, total + 1))
        a = ErrorDiagram.from_points(_random_points(rng, n1))
        b = ErrorDiagram.from_points(_random_points(rng, total - n1))
        if bottleneck_distance(a, b) != oracles.brute_bottleneck(a.expanded(), b.expanded()):
            mismatches += 1
    axiom_failures = 0
    for _ in range(1000):
        x, y, z = (ErrorDiagram.from_points(_random_points(rng, int(rng.integers(0, 6)))) for _ in range(3))
        xy, yz, xz = bottleneck_distance(x, y), bottleneck_distance(y, z), bottleneck_distance(x, z)
        if bottleneck_distance(x, x) != 0 or xy != bottleneck_distance(y, x) or xz > xy + yz:
            axiom_failures += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and axiom_failures == 0 and elapsed < 60
    criterion(5, "bottleneck equals brute force; pseudometric", ok,
              f"1000 pairs, {mismatches} mismatches; 1000 triples, {axiom_failures} failures; {elapsed:.1f} s")
    assert ok


def test_criterion_6_persistent_dims(criterion):
    rng = np.random.default_rng(6)
    failures = 0
    for _ in range(500):
        pts = [(b, d, 1) for b, d in _random_points(rng, int(rng.integers(0, 7)))]
        d = ErrorDiagram.from_points(pts)
        grid = np.array([[persistent_error_dim(d, i, j) for j in range(-1, 18)] for i in range(-1, 10)])
        direct = np.array([[oracles.persistent_dim_sum(d.points, i, j) for j in range(-1, 18)]
                           for i in range(-1, 10)])
        monotone = (np.diff(grid, axis=0) >= 0).all() and (np.diff(grid, axis=1) >= 0).all()
        failures += not (monotone and (grid == direct).all())
    ok = failures == 0
    criterion(6, "persistent error dims monotone and equal to summation", ok,
              f"500 diagrams, {failures} failures")
    assert ok


def test_criterion_7_simulate_determinism(criterion, tmp_path):
    scenario = tmp_path / "s.json"
    scenario.write_text(__import__("json").dumps(THREE_CYCLE))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", str(scenario), "--seed", "123", "--out", str(a)]) == 0
    assert main(["simulate", str(scenario), "--seed", "123", "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    ok = not mismatch and not errors and names == sorted(p.name for p in b.iterdir())
    criterion(7, "simulate bundles byte-identical across runs", ok, f"{len(match)} files compared")
    assert ok
