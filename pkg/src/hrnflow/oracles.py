"""Slow reference implementations used to cross-check the fast paths.

Nothing here is imported by the pipeline itself; tests and ``hrnflow check``
compare the library against these.
"""
from __future__ import annotations

import itertools
import math

INF = math.inf


def greedy_p_intervals(S1, S2, require_subsequent=True):
    """Literal least-index greedy pairing with exact magnitude equality.

    ``S1``/``S2`` are lists of ``(index, magnitude)``.  Returns a sorted list of
    ``(birth, death, multiplicity)`` with duplicates merged.
    """
    chosen = []
    out = {}
    for i, mag in sorted(S1):
        options = [
            k for k, kmag in S2
            if k not in chosen and kmag == mag and (k > i or not require_subsequent)
        ]
        death = min(options) if options else INF
        if options:
            chosen.append(death)
        out[(i, death)] = out.get((i, death), 0) + mag
    return sorted((b, d, m) for (b, d), m in out.items())


def persistent_dim_sum(points, i, j):
    total = 0
    for u, v, mult in points:
        if v == INF:
            continue
        if u <= i and v <= j:
            total += mult
    return total


def _cost(p, q):
    """L-infinity cost between augmented points; ``None`` marks a diagonal slot."""
    if p is None and q is None:
        return 0
    if p is None or q is None:
        b, d = p if q is None else q
        return INF if d == INF else abs(d - b) / 2
    if (p[1] == INF) != (q[1] == INF):
        return INF
    if p[1] == INF:
        return abs(p[0] - q[0])
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def brute_bottleneck(a, b):
    """Minimum over all bijections of the diagonally augmented point lists.

    ``a`` and ``b`` are lists of expanded ``(birth, death)`` points.
    """
    left = list(a) + [None] * len(b)
    right = list(b) + [None] * len(a)
    best = INF
    for perm in itertools.permutations(range(len(right))):
        worst = 0
        for i, j in enumerate(perm):
            c = _cost(left[i], right[j])
            if c > worst:
                worst = c
                if worst >= best:
                    break
        best = min(best, worst)
    return best


def cone_dims_by_definition(margins, k, kind, mode):
    """Cone dimension straight from a list of ``(deficit, surplus)`` pairs.

    Degree ``k`` looks at subprogram ``k``; degree ``k-1`` at ``k-1``, except
    that degree 0 is the whole line, whose least subprogram is 1.
    """
    col = 0 if kind == "error" else 1
    here = margins[k - 1][col]
    if mode == "absolute":
        return here
    prev = margins[max(k - 2, 0)][col]
    return max(here - prev, 0)
