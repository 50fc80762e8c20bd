"""Error/fix precosheaves on the cofiltered cover of the real line.

Subprogram ``n`` sits at the point ``n``.  The cover is ``U0 ⊇ U1 ⊇ ... ⊇ UN``
with subprogram ``k`` in ``U_r`` iff ``r <= k``.  A precosheaf value on an open
set is the margin (deficit for the error sheaf, surplus for the fix sheaf) at
the distinguished subprogram of that set, taken to be its minimal index.

Everything is dimension bookkeeping: every corestriction and projection is
the canonical full-rank map between spaces of the given dimensions.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Sequence

from hrnflow.dataflow import MarginProfile

__all__ = [
    "SheafKind",
    "ConeMode",
    "CofilteredCover",
    "ChainData",
    "MapDescriptor",
    "MarginProfile",
    "build_cover",
    "evaluate_precosheaf",
    "cech_chain_data",
    "cech_homology_dims",
    "cosheaf_axiom_check",
    "phi_projection",
    "cone_homology_dim",
    "cone_table",
    "cone_table_csv",
]


class SheafKind(str, enum.Enum):
    ERROR = "error"  # records deficits
    FIX = "fix"  # records surpluses


class ConeMode(str, enum.Enum):
    ABSOLUTE = "absolute"
    INCREMENTAL = "incremental"


@dataclass(frozen=True)
class CofilteredCover:
    n: int
    sets: tuple[frozenset[int], ...]  # sets[r] = subprogram content of U_r

    def contains(self, k: int, r: int) -> bool:
        return k in self.sets[r]


@dataclass(frozen=True)
class ChainData:
    kind: SheafKind
    chain_dims: tuple[int, ...]  # C_0 .. C_N
    boundary_ranks: tuple[int, ...]  # rank of d_k : C_k -> C_{k-1}; index 0 is always 0


@dataclass(frozen=True)
class MapDescriptor:
    domain_dim: int
    codomain_dim: int
    rank: int

    @property
    def kernel_dim(self) -> int:
        return self.domain_dim - self.rank


def build_cover(n: int) -> CofilteredCover:
    if n < 1:
        raise ValueError(f"cover needs at least one subprogram, got N={n}")
    everything = frozenset(range(1, n + 1))
    sets = [everything] + [frozenset(range(r, n + 1)) for r in range(1, n + 1)]
    return CofilteredCover(n=n, sets=tuple(sets))


def evaluate_precosheaf(kind: SheafKind, profile: MarginProfile, U: AbstractSet[int]) -> int:
    if not U:
        return 0
    p = min(U)
    return profile.deficit(p) if SheafKind(kind) is SheafKind.ERROR else profile.surplus(p)


def cech_chain_data(kind: SheafKind, profile: MarginProfile, cover: CofilteredCover) -> ChainData:
    """Chain dimensions over the nested cover.

    The k-fold intersection of the nested sets is ``U_k`` so every chain group
    has a single summand.  Boundary ranks are full rank subject to
    ``d_{k-1} d_k = 0``, filled in from degree 1 upwards.
    """
    if cover.n != profile.n:
        raise ValueError(f"cover is for N={cover.n} but profile has {profile.n} subprograms")
    dims = tuple(evaluate_precosheaf(kind, profile, U) for U in cover.sets)
    ranks = [0]
    for k in range(1, len(dims)):
        ranks.append(min(dims[k], dims[k - 1] - ranks[k - 1]))
    return ChainData(kind=SheafKind(kind), chain_dims=dims, boundary_ranks=tuple(ranks))


def cech_homology_dims(data: ChainData) -> list[int]:
    ranks = list(data.boundary_ranks) + [0]
    return [c - ranks[k] - ranks[k + 1] for k, c in enumerate(data.chain_dims)]


def cosheaf_axiom_check(
    kind: SheafKind,
    profile: MarginProfile,
    U: AbstractSet[int],
    subcover: Sequence[AbstractSet[int]],
) -> bool:
    """Dimension-level exactness of ``⊕F(Ui ∩ Uj) -> ⊕F(Ui) -> F(U) -> 0``.

    All maps are taken full rank.  Exactness at ``F(U)`` is surjectivity of the
    sum map; exactness at ``⊕F(Ui)`` compares its kernel with the image of the
    intersection term.
    """
    U = frozenset(U)
    parts = [frozenset(s) for s in subcover]
    if not parts:
        raise ValueError("empty subcover")
    if any(not p <= U for p in parts):
        raise ValueError("subcover member is not contained in U")
    if frozenset().union(*parts) != U:
        raise ValueError("subcover does not cover U")

    top = evaluate_precosheaf(kind, profile, U)
    middle = sum(evaluate_precosheaf(kind, profile, p) for p in parts)
    overlaps = sum(
        evaluate_precosheaf(kind, profile, parts[i] & parts[j])
        for i in range(len(parts))
        for j in range(i + 1, len(parts))
    )
    onto = min(middle, top) == top
    kernel = middle - min(middle, top)
    return onto and kernel == min(overlaps, middle)


def _check_index(profile: MarginProfile, k: int) -> None:
    if not 1 <= k <= profile.n:
        raise IndexError(f"degree {k} out of range 1..{profile.n}")


def phi_projection(kind: SheafKind, profile: MarginProfile, k: int) -> MapDescriptor:
    """Projection from the degree-k chain term onto the shifted degree-(k-1) term."""
    _check_index(profile, k)
    data = cech_chain_data(kind, profile, build_cover(profile.n))
    dom, cod = data.chain_dims[k], data.chain_dims[k - 1]
    return MapDescriptor(dom, cod, min(dom, cod))


def cone_homology_dim(
    kind: SheafKind, profile: MarginProfile, k: int, mode: ConeMode = ConeMode.ABSOLUTE
) -> int:
    """Dimension of the degree-k homology of the projection's mapping cone.

    This is the kernel of the projection.  ``incremental`` uses the projection
    as is; ``absolute`` takes the kernel against a zero codomain, which is the
    full margin at ``k``.
    """
    phi = phi_projection(kind, profile, k)
    if ConeMode(mode) is ConeMode.ABSOLUTE:
        return phi.domain_dim
    return phi.kernel_dim


def cone_table(profile: MarginProfile) -> list[dict]:
    """One row per degree ``k = 0..N`` with chain dims, projection ranks and cone dims."""
    cover = build_cover(profile.n)
    data = {kind: cech_chain_data(kind, profile, cover) for kind in SheafKind}
    rows = []
    for k in range(profile.n + 1):
        row = {"k": k}
        for kind in SheafKind:
            row[f"C_{kind.value}"] = data[kind].chain_dims[k]
            if k == 0:
                row[f"phi_rank_{kind.value}"] = 0
                row[f"cone_{kind.value}_absolute"] = 0
                row[f"cone_{kind.value}_incremental"] = 0
                continue
            row[f"phi_rank_{kind.value}"] = phi_projection(kind, profile, k).rank
            for mode in ConeMode:
                row[f"cone_{kind.value}_{mode.value}"] = cone_homology_dim(kind, profile, k, mode)
        rows.append(row)
    return rows


def cone_table_csv(rows: Iterable[dict]) -> str:
    rows = list(rows)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
