"""Hierarchical recurrent network (HRN) graphs.

An HRN is a directed spine path ``v1 ... v(2m+1)`` with edges ``v(2i) -> v(2i-1)``
and ``v(2i) -> v(2i+1)``, plus ``m`` directed cycles.  Cycle ``i`` contains the
spine edge ``v(2i) -> v(2i-1)`` and its remaining vertices are auxiliary.

Vertex ids are integers: spine vertices are ``1 .. 2m+1``, auxiliary vertices
are numbered consecutively afterwards in cycle order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

Edge = tuple[int, int]


class HrnError(ValueError):
    pass


@dataclass(frozen=True)
class Subprogram:
    """One recurrent subprogram (directed cycle) of an HRN.

    ``vertices`` is cyclically ordered: ``vertices[j] -> vertices[j+1]`` and the
    last vertex points back to the first.  The first vertex is the head
    ``v(2i-1)`` of the identified spine edge and the last is its tail ``v(2i)``.
    """

    index: int
    vertices: tuple[int, ...]
    identified_edge: Edge

    @property
    def k(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[Edge]:
        vs = self.vertices
        return [(vs[j], vs[(j + 1) % len(vs)]) for j in range(len(vs))]


@dataclass(frozen=True)
class Hrn:
    m: int
    spine: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    edges: frozenset[Edge] = field(default_factory=frozenset)

    @property
    def vertices(self) -> list[int]:
        seen = dict.fromkeys(self.spine)
        for cyc in self.cycles:
            seen.update(dict.fromkeys(cyc))
        return sorted(seen)

    @property
    def cycle_lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]


def spine_edges(m: int) -> list[Edge]:
    out = []
    for i in range(1, m + 1):
        out.append((2 * i, 2 * i - 1))
        out.append((2 * i, 2 * i + 1))
    return out


def build_hrn(m: int, cycle_lengths: Iterable[int]) -> Hrn:
    lengths = list(cycle_lengths)
    if m < 1:
        raise HrnError(f"m must be a positive integer, got {m}")
    if len(lengths) != m:
        raise HrnError(f"expected {m} cycle lengths, got {len(lengths)}")
    for i, k in enumerate(lengths, start=1):
        if k < 3:
            raise HrnError(f"cycle {i} has length {k}; a directed cycle needs at least 3 vertices")

    spine = tuple(range(1, 2 * m + 2))
    next_id = 2 * m + 2
    cycles = []
    edges = set(spine_edges(m))
    for i, k in enumerate(lengths, start=1):
        aux = tuple(range(next_id, next_id + k - 2))
        next_id += k - 2
        cyc = (2 * i - 1, *aux, 2 * i)
        cycles.append(cyc)
        edges.update((cyc[j], cyc[(j + 1) % k]) for j in range(k))
    return Hrn(m=m, spine=spine, cycles=tuple(cycles), edges=frozenset(edges))


def validate(h: Hrn) -> list[str]:
    """Return the list of invariant violations; empty means the HRN is valid."""
    problems: list[str] = []
    m = h.m
    if m < 1:
        return [f"m must be positive, got {m}"]
    if len(h.spine) != 2 * m + 1:
        problems.append(f"spine has {len(h.spine)} vertices, expected {2 * m + 1}")
        return problems
    if len(h.cycles) != m:
        problems.append(f"{len(h.cycles)} cycles recorded, expected {m}")
        return problems

    v = (None, *h.spine)  # 1-based
    for i in range(1, m + 1):
        for tail, head in ((v[2 * i], v[2 * i - 1]), (v[2 * i], v[2 * i + 1])):
            if (tail, head) not in h.edges:
                problems.append(f"missing spine edge {tail}->{head}")

    spine_set = set(h.spine)
    owner: dict[int, int] = {}
    for i, cyc in enumerate(h.cycles, start=1):
        k = len(cyc)
        if k < 3:
            problems.append(f"cycle {i} has length {k} < 3")
            continue
        if len(set(cyc)) != k:
            problems.append(f"cycle {i} repeats a vertex: {list(cyc)}")
            continue
        cyc_edges = [(cyc[j], cyc[(j + 1) % k]) for j in range(k)]
        missing = [e for e in cyc_edges if e not in h.edges]
        reversed_ = [e for e in missing if (e[1], e[0]) in h.edges]
        if reversed_:
            problems.append(
                f"orientation inconsistent on cycle {i}: edges {reversed_} appear reversed"
            )
        absent = [e for e in missing if e not in reversed_]
        if absent:
            problems.append(f"cycle {i} is not closed: missing edges {absent}")
        ident = (v[2 * i], v[2 * i - 1])
        if ident not in cyc_edges:
            if (ident[1], ident[0]) in cyc_edges:
                problems.append(
                    f"orientation inconsistent on cycle {i}: spine edge {ident[0]}->{ident[1]} traversed backwards"
                )
            else:
                problems.append(f"cycle {i} does not contain spine edge {ident[0]}->{ident[1]}")
        for u in cyc:
            if u in spine_set:
                if u not in (v[2 * i - 1], v[2 * i]):
                    problems.append(f"cycle {i} passes through foreign spine vertex {u}")
                continue
            if u in owner:
                problems.append(f"auxiliary vertex {u} shared by cycles {owner[u]} and {i}")
            owner[u] = i

    expected = set(spine_edges(m))
    for cyc in h.cycles:
        k = len(cyc)
        expected.update((cyc[j], cyc[(j + 1) % k]) for j in range(k))
    for e in sorted(h.edges - expected):
        problems.append(f"unexpected edge {e[0]}->{e[1]}")
    return problems


def subprogram(h: Hrn, i: int) -> Subprogram:
    if not 1 <= i <= h.m:
        raise IndexError(f"subprogram index {i} out of range 1..{h.m}")
    cyc = h.cycles[i - 1]
    return Subprogram(index=i, vertices=tuple(cyc), identified_edge=(cyc[-1], cyc[0]))


def subprograms(h: Hrn) -> list[Subprogram]:
    return [subprogram(h, i) for i in range(1, h.m + 1)]


def export_graph(h: Hrn) -> dict:
    """Plain-data description of ``h``: vertices, sorted edges and subprogram tags."""
    return {
        "m": h.m,
        "spine": list(h.spine),
        "vertices": h.vertices,
        "edges": [list(e) for e in sorted(h.edges)],
        "subprograms": [
            {
                "index": sp.index,
                "vertices": list(sp.vertices),
                "identified_edge": list(sp.identified_edge),
            }
            for sp in subprograms(h)
        ],
    }


def import_graph(doc: dict) -> Hrn:
    try:
        subs = sorted(doc["subprograms"], key=lambda s: s["index"])
        return Hrn(
            m=int(doc["m"]),
            spine=tuple(int(x) for x in doc["spine"]),
            cycles=tuple(tuple(int(x) for x in s["vertices"]) for s in subs),
            edges=frozenset((int(a), int(b)) for a, b in doc["edges"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise HrnError(f"malformed graph record: {exc}") from exc


def to_dot(h: Hrn, names: bool = True) -> str:
    def label(u: int) -> str:
        if not names:
            return str(u)
        if u <= len(h.spine):
            return f"v{u}"
        return f"w{u - len(h.spine)}"

    owner = {}
    for sp in subprograms(h):
        for e in sp.edges():
            owner[e] = sp.index
    lines = ["digraph hrn {", "  rankdir=LR;"]
    for u in h.vertices:
        shape = "circle" if u <= len(h.spine) else "point"
        lines.append(f'  {u} [label="{label(u)}", shape={shape}];')
    for a, b in sorted(h.edges):
        tag = f' [label="H{owner[(a, b)]}"]' if (a, b) in owner else ""
        lines.append(f"  {a} -> {b}{tag};")
    lines.append("}")
    return "\n".join(lines) + "\n"
