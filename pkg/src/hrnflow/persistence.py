"""Error persistence diagrams: P-interval generation, persistent error
dimensions and the bottleneck distance.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

INF = math.inf
DIAGRAM_FORMAT = "hrnflow-diagram/1"


class MagnitudeRule(str, enum.Enum):
    EXACT = "exact"
    PARTIAL = "partial"


@dataclass(frozen=True)
class ErrorEvent:
    index: int
    magnitude: int

    def __post_init__(self):
        if self.magnitude < 1:
            raise ValueError(f"event at {self.index} has magnitude {self.magnitude} < 1")


@dataclass(frozen=True)
class MatchPolicy:
    magnitude_rule: MagnitudeRule = MagnitudeRule.EXACT
    require_subsequent: bool = True

    def __post_init__(self):
        object.__setattr__(self, "magnitude_rule", MagnitudeRule(self.magnitude_rule))


Point = tuple[int, float, int]  # (birth, death, multiplicity); death may be INF


@dataclass(frozen=True)
class ErrorDiagram:
    """Multiset of (birth, death) points, stored sorted by birth then death.

    Diagrams produced with ``require_subsequent`` always have birth < death;
    without it a deficit may be paired with an earlier surplus, giving
    death < birth.  Such points are kept as is.
    """

    points: tuple[Point, ...] = field(default_factory=tuple)

    @classmethod
    def from_points(cls, pts: Iterable[Sequence]) -> "ErrorDiagram":
        agg: Counter = Counter()
        for p in pts:
            b, d = p[0], p[1]
            mult = p[2] if len(p) > 2 else 1
            if mult < 1:
                raise ValueError(f"multiplicity must be positive, got {mult} for {(b, d)}")
            d = INF if d == INF else int(d)
            agg[(int(b), d)] += int(mult)
        return cls(tuple((b, d, m) for (b, d), m in sorted(agg.items())))

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    @property
    def proper(self) -> list[Point]:
        return [p for p in self.points if p[1] != INF]

    @property
    def at_infinity(self) -> list[Point]:
        return [p for p in self.points if p[1] == INF]

    @property
    def total_multiplicity(self) -> int:
        return sum(p[2] for p in self.points)

    def multiplicity(self, birth: int, death: float) -> int:
        return dict(((b, d), m) for b, d, m in self.points).get((birth, death), 0)

    def expanded(self) -> list[tuple[int, float]]:
        return [(b, d) for b, d, m in self.points for _ in range(m)]

    def to_dict(self) -> dict:
        return {
            "format": DIAGRAM_FORMAT,
            "points": [
                {"birth": b, "death": "inf" if d == INF else d, "multiplicity": m}
                for b, d, m in self.points
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "ErrorDiagram":
        try:
            pts = [
                (p["birth"], INF if p["death"] == "inf" else p["death"], p["multiplicity"])
                for p in doc["points"]
            ]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed diagram record: {exc}") from exc
        return cls.from_points(pts)

    @classmethod
    def from_json(cls, text: str) -> "ErrorDiagram":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["birth", "death", "multiplicity"])
        for b, d, m in self.points:
            w.writerow([b, "inf" if d == INF else d, m])
        return buf.getvalue()


def _check_events(events: Sequence[ErrorEvent], name: str) -> None:
    idx = [e.index for e in events]
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"{name} must be sorted by strictly increasing index, got {idx}")


def generate_p_intervals(
    S1: Sequence[ErrorEvent], S2: Sequence[ErrorEvent], policy: MatchPolicy = MatchPolicy()
) -> ErrorDiagram:
    """Pair every deficit event in ``S1`` with the least usable surplus event in ``S2``.

    Exact rule: the surplus magnitude must equal the deficit and each surplus is
    used at most once.  Partial rule: the remaining surplus must cover the
    deficit, which is then subtracted; the leftover stays available.
    Unmatched deficits become points at infinity.
    """
    _check_events(S1, "S1")
    _check_events(S2, "S2")
    remaining = {e.index: e.magnitude for e in S2}
    used: set[int] = set()
    points = []
    for err in S1:
        match = None
        for fix in S2:
            if policy.require_subsequent and fix.index <= err.index:
                continue
            if policy.magnitude_rule is MagnitudeRule.EXACT:
                ok = fix.index not in used and fix.magnitude == err.magnitude
            else:
                ok = remaining[fix.index] >= err.magnitude
            if ok:
                match = fix.index
                break
        if match is None:
            points.append((err.index, INF, err.magnitude))
        else:
            used.add(match)
            remaining[match] -= err.magnitude
            points.append((err.index, match, err.magnitude))
    return ErrorDiagram.from_points(points)


def persistent_error_dim(d: ErrorDiagram, i: int, j: float) -> int:
    if j == INF:
        raise ValueError("persistent error dimension is only defined for finite j")
    return sum(m for b, dd, m in d.proper if b <= i and dd <= j)


# bottleneck distance; all costs are doubled so half-integers stay integral


def _infinite_cost2(a: list[int], b: list[int]) -> float:
    if len(a) != len(b):
        return INF
    return max((2 * abs(x - y) for x, y in zip(sorted(a), sorted(b))), default=0)


def _matchable(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n == 0:
        return True
    match = maximum_bipartite_matching(csr_matrix(adj.astype(np.int8)), perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck_distance(d1: ErrorDiagram, d2: ErrorDiagram) -> float:
    """Bottleneck distance with diagonal augmentation.

    Points at infinity only match each other (cost = birth difference);
    ``inf`` is returned when their counts differ.
    """
    inf_a = [b for b, d in d1.expanded() if d == INF]
    inf_b = [b for b, d in d2.expanded() if d == INF]
    inf_cost = _infinite_cost2(inf_a, inf_b)
    if inf_cost == INF:
        return INF

    A = np.array([(2 * b, 2 * d) for b, d in d1.expanded() if d != INF], dtype=np.int64).reshape(-1, 2)
    B = np.array([(2 * b, 2 * d) for b, d in d2.expanded() if d != INF], dtype=np.int64).reshape(-1, 2)
    n1, n2 = len(A), len(B)
    pair = np.abs(A[:, None, :] - B[None, :, :]).max(axis=2) if n1 and n2 else np.zeros((n1, n2), np.int64)
    diag_a = np.abs(A[:, 1] - A[:, 0]) // 2
    diag_b = np.abs(B[:, 1] - B[:, 0]) // 2

    candidates = np.unique(np.concatenate([[0], pair.ravel(), diag_a, diag_b]))
    n = n1 + n2

    def feasible(t: int) -> bool:
        # rows: A points then diagonal copies of B; columns: B points then diagonal copies of A
        adj = np.zeros((n, n), dtype=bool)
        adj[:n1, :n2] = pair <= t
        adj[np.arange(n1), n2 + np.arange(n1)] = diag_a <= t
        adj[n1 + np.arange(n2), np.arange(n2)] = diag_b <= t
        adj[n1:, n2:] = True
        return _matchable(adj)

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(int(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    proper_cost = int(candidates[lo])
    return max(proper_cost, inf_cost) / 2


@dataclass(frozen=True)
class DiagramStats:
    threshold: float
    persistences: tuple[tuple[int, float, int, float], ...]  # (birth, death, mult, persistence)
    n_infinite: int
    noise: tuple[Point, ...]
    significant: tuple[Point, ...]

    def to_dict(self) -> dict:
        enc = lambda x: "inf" if x == INF else x  # noqa: E731
        return {
            "threshold": self.threshold,
            "n_infinite": self.n_infinite,
            "persistences": [[b, enc(d), m, enc(p)] for b, d, m, p in self.persistences],
            "noise": [[b, enc(d), m] for b, d, m in self.noise],
            "significant": [[b, enc(d), m] for b, d, m in self.significant],
        }


def diagram_statistics(d: ErrorDiagram, threshold: float = 1) -> DiagramStats:
    """Persistence of each point and its noise/significant split.

    A proper point is noise when its absolute persistence is at most ``threshold``.
    Points at infinity are counted separately and never count as noise.
    """
    pers = tuple((b, dd, m, dd - b) for b, dd, m in d.points)
    noise = tuple((b, dd, m) for b, dd, m, p in pers if dd != INF and abs(p) <= threshold)
    sig = tuple((b, dd, m) for b, dd, m, p in pers if not (dd != INF and abs(p) <= threshold))
    return DiagramStats(
        threshold=threshold,
        persistences=pers,
        n_infinite=sum(m for _, dd, m in d.points if dd == INF),
        noise=noise,
        significant=sig,
    )
