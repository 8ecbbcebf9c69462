"""Degeneracy orderings and greedy proper colorings.

The computed color count c of a first-fit coloring along a reverse degeneracy
order stands in everywhere a chromatic number would be needed: every use is
an independent-set extraction from color classes, so any proper coloring is
sound and only the constants move.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .graphs import FormatError, Graph, induced_subgraph


@dataclass(frozen=True)
class ColoringResult:
    order: tuple[int, ...]
    degeneracy: int
    color_of: tuple[int, ...]
    color_count: int

    def color_classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.color_count)]
        for v, c in enumerate(self.color_of):
            out[c].append(v)
        return out


def degeneracy_order(g: Graph) -> tuple[tuple[int, ...], int]:
    """Repeated minimum-degree removal (ties to the smallest id).

    Returns the removal order reversed, plus the degeneracy (the largest
    degree seen at removal time).
    """
    deg = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    removed: list[int] = []
    degeneracy = 0
    for _ in range(g.n):
        v = min((x for x in range(g.n) if alive[x]), key=lambda x: (deg[x], x))
        degeneracy = max(degeneracy, deg[v])
        alive[v] = False
        removed.append(v)
        for w in g.adjacency[v]:
            if alive[w]:
                deg[w] -= 1
    return tuple(reversed(removed)), degeneracy


def greedy_color(g: Graph, order: Iterable[int]) -> ColoringResult:
    """First-fit proper coloring along ``order`` (must be a permutation of V)."""
    order = tuple(order)
    if sorted(order) != list(range(g.n)):
        raise ValueError("order is not a permutation of the vertices")
    color = [-1] * g.n
    count = 0
    for v in order:
        used = {color[w] for w in g.adjacency[v] if color[w] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
        count = max(count, c + 1)
    _, degeneracy = degeneracy_order(g)
    return ColoringResult(order=order, degeneracy=degeneracy, color_of=tuple(color), color_count=count)


def color_graph(g: Graph) -> ColoringResult:
    order, _ = degeneracy_order(g)
    return greedy_color(g, order)


def extract_independent(g: Graph, pool: Iterable[int], target: int) -> frozenset[int] | None:
    """Largest color class of the induced subgraph on ``pool``, truncated to
    ``target`` lowest ids.  None when the largest class falls short.

    Succeeds whenever |pool| >= c' * target, where c' is the number of colors
    first-fit uses on the pool.
    """
    pool = sorted(set(pool))
    if target <= 0:
        return frozenset()
    if len(pool) < target:
        return None
    sub, back = induced_subgraph(g, pool)
    col = color_graph(sub)
    classes = col.color_classes()
    best = max(classes, key=len)
    if len(best) < target:
        return None
    return frozenset(back[v] for v in sorted(best)[:target])


def load_coloring(text: str, g: Graph) -> dict[int, int]:
    """Parse an externally supplied coloring (lines ``col <v> <color>``,
    1-indexed vertices) and validate properness and coverage."""
    colors: dict[int, int] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c "):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "col":
            raise FormatError(ln, "malformed coloring line")
        try:
            v, c = int(parts[1]) - 1, int(parts[2])
        except ValueError:
            raise FormatError(ln, "malformed coloring line") from None
        if not (0 <= v < g.n) or c < 0:
            raise FormatError(ln, "coloring entry out of range")
        if v in colors:
            raise FormatError(ln, f"duplicate color for vertex {v + 1}")
        colors[v] = c
    if len(colors) != g.n:
        raise FormatError(None, "coloring does not cover every vertex")
    for u, v in g.edges():
        if colors[u] == colors[v]:
            raise FormatError(None, f"coloring not proper on edge ({u + 1},{v + 1})")
    return colors


def coloring_color_count(colors: Mapping[int, int]) -> int:
    return len(set(colors.values()))
