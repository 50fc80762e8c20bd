"""Dimension-valued data flows through subprogram representations.

Vector spaces are tracked by dimension only.  Each edge map raises the
dimension by the subprogram's increment ``ell`` and the capacity policy then
decides what happens when a vertex capacity is exceeded.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Sequence


class CapacityMode(str, enum.Enum):
    CAP = "cap"
    REJECT = "reject"
    IGNORE = "ignore"


class Kind(str, enum.Enum):
    FAULTY = "Faulty"
    ABLE = "Able"
    SUFFICIENT = "Sufficient"


class FlowError(ValueError):
    pass


class CapacityOverflow(FlowError):
    def __init__(self, vertex: int, column: int, dim: int, capacity: int):
        self.vertex, self.column, self.dim, self.capacity = vertex, column, dim, capacity
        super().__init__(
            f"capacity overflow at vertex {vertex}, iteration {column}: "
            f"dimension {dim} exceeds capacity {capacity}"
        )


@dataclass(frozen=True)
class FlowPolicy:
    capacity_mode: CapacityMode = CapacityMode.CAP
    beta_adds: bool = True
    strict_stitching: bool = False

    def __post_init__(self):
        object.__setattr__(self, "capacity_mode", CapacityMode(self.capacity_mode))


@dataclass(frozen=True)
class QuiverRep:
    """Capacities (in subprogram vertex order), increment and initial dimension."""

    subprogram_index: int
    capacities: tuple[int, ...]
    ell: int
    initial_dim: int

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))
        if len(self.capacities) < 3:
            raise FlowError(f"subprogram {self.subprogram_index}: need at least 3 capacities")
        if any(c < 0 for c in self.capacities) or self.ell < 0 or self.initial_dim < 0:
            raise FlowError(f"subprogram {self.subprogram_index}: dimensions must be natural numbers")

    @property
    def k(self) -> int:
        return len(self.capacities)


@dataclass(frozen=True)
class DataFlow:
    rep: QuiverRep
    iterations: int
    dims: tuple[tuple[int, ...], ...]  # dims[i][q]: vertex i, iteration q (0-based)

    @property
    def theta(self) -> int:
        return self.dims[-1][-1]

    @property
    def initial(self) -> int:
        return self.dims[0][0]

    def traversal(self) -> list[int]:
        """Dimensions in visiting order: column by column."""
        return [self.dims[i][q] for q in range(self.iterations) for i in range(self.rep.k)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", *(f"iter{q + 1}" for q in range(self.iterations))])
        for i, row in enumerate(self.dims, start=1):
            w.writerow([i, *row])
        return buf.getvalue()


@dataclass(frozen=True)
class Classification:
    kind: Kind
    margin: int
    theta: int
    delta: int


@dataclass(frozen=True)
class MarginProfile:
    """Per-subprogram ``(deficit, surplus)`` pairs, subprogram ``n`` at position ``n - 1``."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(d), int(s)) for d, s in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        for n, (d, s) in enumerate(pairs, start=1):
            if d < 0 or s < 0:
                raise ValueError(f"negative margin at subprogram {n}")
            if d and s:
                raise ValueError(f"subprogram {n} has both a deficit and a surplus")

    @classmethod
    def from_signed(cls, margins: Sequence[int]) -> "MarginProfile":
        """Build from signed margins ``delta - theta`` (positive means deficit)."""
        return cls(tuple((max(x, 0), max(-x, 0)) for x in margins))

    @property
    def n(self) -> int:
        return len(self.pairs)

    def deficit(self, n: int) -> int:
        return self.pairs[n - 1][0]

    def surplus(self, n: int) -> int:
        return self.pairs[n - 1][1]

    def faulty(self, n: int) -> bool:
        return self.deficit(n) > 0

    def able(self, n: int) -> bool:
        return self.surplus(n) > 0


def _step(dim: int, add: int, cap: int, mode: CapacityMode, vertex: int, column: int) -> int:
    nxt = dim + add
    if mode is CapacityMode.CAP:
        return min(nxt, cap)
    if mode is CapacityMode.REJECT and nxt > cap:
        raise CapacityOverflow(vertex, column, nxt, cap)
    return nxt


def simulate_flow(rep: QuiverRep, iterations: int, policy: FlowPolicy = FlowPolicy()) -> DataFlow:
    """Cycle data ``iterations`` times through the subprogram.

    Vertices and iterations in error messages are 1-based.
    """
    if iterations < 1:
        raise FlowError(f"iterations must be positive, got {iterations}")
    mode = policy.capacity_mode
    sigma, k = rep.capacities, rep.k
    if mode is not CapacityMode.IGNORE and rep.initial_dim > sigma[0]:
        raise FlowError(
            f"subprogram {rep.subprogram_index}: initial dimension {rep.initial_dim} "
            f"exceeds capacity {sigma[0]} of vertex 1"
        )
    beta_add = rep.ell if policy.beta_adds else 0
    grid = [[0] * iterations for _ in range(k)]
    dim = rep.initial_dim
    for q in range(iterations):
        if q > 0:
            dim = _step(dim, beta_add, sigma[0], mode, 1, q + 1)
        grid[0][q] = dim
        for i in range(1, k):
            dim = _step(dim, rep.ell, sigma[i], mode, i + 1, q + 1)
            grid[i][q] = dim
    return DataFlow(rep=rep, iterations=iterations, dims=tuple(tuple(r) for r in grid))


def final_data_dimension(flow: DataFlow) -> int:
    return flow.theta


def classify_dims(theta: int, delta: int) -> Classification:
    if theta < delta:
        return Classification(Kind.FAULTY, delta - theta, theta, delta)
    if theta > delta:
        return Classification(Kind.ABLE, theta - delta, theta, delta)
    return Classification(Kind.SUFFICIENT, 0, theta, delta)


def classify(flow: DataFlow, delta: int) -> Classification:
    return classify_dims(flow.theta, delta)


def margin_profile(flows: Sequence[DataFlow], deltas: Sequence[int]) -> MarginProfile:
    if len(flows) != len(deltas):
        raise ValueError(f"{len(flows)} flows but {len(deltas)} desired outputs")
    if not flows:
        raise ValueError("need at least one flow")
    return MarginProfile(tuple((max(d - f.theta, 0), max(f.theta - d, 0)) for f, d in zip(flows, deltas)))


@dataclass(frozen=True)
class StitchingReport:
    mismatches: tuple[tuple[int, int, int], ...]  # (boundary i, theta_i, initial_{i+1})

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def messages(self) -> list[str]:
        return [
            f"boundary {i}->{i + 1}: final dimension {a} != initial dimension {b}"
            for i, a, b in self.mismatches
        ]


def check_stitching(flows: Sequence[DataFlow], strict: bool = False) -> StitchingReport:
    """Compare each flow's final dimension with the next flow's initial dimension.

    With ``strict`` a mismatch raises :class:`FlowError` instead of only being reported.
    """
    bad = tuple(
        (i, a.theta, b.initial)
        for i, (a, b) in enumerate(zip(flows, flows[1:]), start=1)
        if a.theta != b.initial
    )
    report = StitchingReport(bad)
    if strict and bad:
        raise FlowError("; ".join(report.messages()))
    return report
