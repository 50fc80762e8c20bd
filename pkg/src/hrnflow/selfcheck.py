"""Embedded property/oracle checks behind ``hrnflow check``.

Each check returns ``(ok, detail)``.  Sizes are kept small enough to finish in
a few seconds; the pytest suite runs the full exhaustive versions.
"""
from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from hrnflow import oracles
from hrnflow.builtin_scenarios import THREE_CYCLE
from hrnflow.cosheaf import ConeMode, SheafKind, cone_homology_dim
from hrnflow.dataflow import FlowPolicy, MarginProfile, QuiverRep, classify_dims, simulate_flow
from hrnflow.hrn import build_hrn, subprogram, validate
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

Check = Callable[[], tuple[bool, str]]


def check_hrn_shapes() -> tuple[bool, str]:
    n = 0
    for m in range(1, 4):
        for lengths in itertools.product(range(3, 7), repeat=m):
            h = build_hrn(m, lengths)
            if validate(h):
                return False, f"build_hrn({m}, {lengths}) fails validation"
            if len(h.edges) != 2 * m + sum(k - 1 for k in lengths):
                return False, f"edge count off for {lengths}"
            if len(h.vertices) != 2 * m + 1 + sum(k - 2 for k in lengths):
                return False, f"vertex count off for {lengths}"
            for i in range(1, m + 1):
                if subprogram(h, i).k != lengths[i - 1]:
                    return False, f"subprogram {i} length off for {lengths}"
            n += 1
    return True, f"{n} shapes"


def check_flow_closed_forms() -> tuple[bool, str]:
    n = 0
    for k, m, ell, init, adds in itertools.product(range(3, 6), range(1, 5), range(0, 4), range(0, 3), (True, False)):
        rep = QuiverRep(1, (0,) * k, ell, init)
        f = simulate_flow(rep, m, FlowPolicy("ignore", beta_adds=adds))
        want = init + ell * (k * m - 1) if adds else init + ell * m * (k - 1)
        if f.theta != want:
            return False, f"k={k} m={m} ell={ell} beta_adds={adds}: {f.theta} != {want}"
        n += 1
    return True, f"{n} grids"


def check_zero_absorption() -> tuple[bool, str]:
    rng = np.random.default_rng(1)
    for _ in range(100):
        k = int(rng.integers(3, 7))
        caps = rng.integers(0, 6, size=k)
        caps[rng.integers(0, k)] = 0
        init = int(rng.integers(0, caps[0] + 1))
        f = simulate_flow(QuiverRep(1, caps, 0, init), int(rng.integers(1, 4)))
        if f.theta != 0:
            return False, f"caps={caps.tolist()} init={init}: theta={f.theta}"
    return True, "100 random scenarios"


def check_classification() -> tuple[bool, str]:
    for theta, delta in itertools.product(range(8), repeat=2):
        c = classify_dims(theta, delta)
        if c.margin != abs(theta - delta):
            return False, f"margin wrong at {(theta, delta)}"
    return True, "64 pairs"


def _profiles(n_max: int, margin_max: int):
    for n in range(1, n_max + 1):
        for signed in itertools.product(range(-margin_max, margin_max + 1), repeat=n):
            yield MarginProfile.from_signed(signed)


def check_detection_absolute() -> tuple[bool, str]:
    count = 0
    for p in _profiles(4, 3):
        for k in range(1, p.n + 1):
            e = cone_homology_dim(SheafKind.ERROR, p, k, ConeMode.ABSOLUTE)
            f = cone_homology_dim(SheafKind.FIX, p, k, ConeMode.ABSOLUTE)
            if (e > 0) != p.faulty(k) or (f > 0) != p.able(k):
                return False, f"profile {p.pairs} degree {k}"
        count += 1
    return True, f"{count} profiles"


def _isolated(p: MarginProfile) -> bool:
    return not any(
        (p.faulty(n) and p.faulty(n + 1)) or (p.able(n) and p.able(n + 1)) for n in range(1, p.n)
    )


def check_detection_incremental() -> tuple[bool, str]:
    # degree 1 compares against the whole line, whose least subprogram is 1 itself
    count = 0
    for p in _profiles(4, 3):
        if not _isolated(p):
            continue
        for k in range(2, p.n + 1):
            e = cone_homology_dim(SheafKind.ERROR, p, k, ConeMode.INCREMENTAL)
            f = cone_homology_dim(SheafKind.FIX, p, k, ConeMode.INCREMENTAL)
            if (e > 0) != p.faulty(k) or (f > 0) != p.able(k):
                return False, f"profile {p.pairs} degree {k}"
        count += 1
    return True, f"{count} isolated profiles, degrees >= 2"


def check_p_intervals() -> tuple[bool, str]:
    count = 0
    for labels in itertools.product((0, 1, 2), repeat=4):
        slots1 = [i + 1 for i, t in enumerate(labels) if t == 1]
        slots2 = [i + 1 for i, t in enumerate(labels) if t == 2]
        for mags1 in itertools.product(range(1, 4), repeat=len(slots1)):
            for mags2 in itertools.product(range(1, 4), repeat=len(slots2)):
                S1 = list(zip(slots1, mags1))
                S2 = list(zip(slots2, mags2))
                for sub in (True, False):
                    got = generate_p_intervals(
                        [ErrorEvent(*e) for e in S1], [ErrorEvent(*e) for e in S2], MatchPolicy("exact", sub)
                    )
                    if list(got.points) != oracles.greedy_p_intervals(S1, S2, sub):
                        return False, f"S1={S1} S2={S2} subsequent={sub}"
                    count += 1
    return True, f"{count} cases"


def random_diagram(rng: np.random.Generator, max_points: int, span: int = 8) -> ErrorDiagram:
    pts = []
    for _ in range(int(rng.integers(0, max_points + 1))):
        b = int(rng.integers(0, span))
        if rng.random() < 0.2:
            pts.append((b, INF, 1))
        else:
            pts.append((b, b + int(rng.integers(1, span)), 1))
    return ErrorDiagram.from_points(pts)


def check_bottleneck() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = random_diagram(rng, 3)
        b = random_diagram(rng, 3)
        fast = bottleneck_distance(a, b)
        slow = oracles.brute_bottleneck(a.expanded(), b.expanded())
        if fast != slow:
            return False, f"{a.points} vs {b.points}: {fast} != {slow}"
    return True, "200 random pairs"


def check_persistent_dims() -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = random_diagram(rng, 5)
        for i in range(-1, 10):
            for j in range(-1, 18):
                v = persistent_error_dim(d, i, j)
                if v != oracles.persistent_dim_sum(d.points, i, j):
                    return False, f"{d.points} at {(i, j)}"
                if v > persistent_error_dim(d, i + 1, j) or v > persistent_error_dim(d, i, j + 1):
                    return False, f"not monotone: {d.points} at {(i, j)}"
    return True, "100 random diagrams"


def check_pipeline() -> tuple[bool, str]:
    s = load_scenario(THREE_CYCLE)
    r1, r2 = run_instance(s), run_instance(s)
    if r1.thetas != (7, 0, 3):
        return False, f"thetas {r1.thetas}"
    if r1.diagram.points != ((2, INF, 2),):
        return False, f"diagram {r1.diagram.points}"
    if r1.to_json() != r2.to_json():
        return False, "two runs differ"
    return True, "three-cycle scenario"


CHECKS: list[tuple[str, Check]] = [
    ("hrn shapes and counts", check_hrn_shapes),
    ("flow closed forms", check_flow_closed_forms),
    ("zero-capacity absorption", check_zero_absorption),
    ("classification partition", check_classification),
    ("error/fix detection (absolute)", check_detection_absolute),
    ("error/fix detection (incremental, isolated)", check_detection_incremental),
    ("P-intervals vs greedy oracle", check_p_intervals),
    ("bottleneck vs brute force", check_bottleneck),
    ("persistent error dims", check_persistent_dims),
    ("pipeline reproduction", check_pipeline),
]


def run_checks() -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
