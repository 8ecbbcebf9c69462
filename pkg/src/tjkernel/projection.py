"""Projection of non-token vertices onto the key-vertex set.

Every vertex outside X = source tokens union target tokens is grouped by its
exact neighborhood inside X.  Groups with two key neighbors (pair classes)
are the ones the kernels shrink; groups with at most one or at least three
key neighbors are bounded directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .graphs import Graph, Instance, _mask_of


class EmbeddingClassViolation(Exception):
    """A pair class has structure impossible under the declared graph class."""


@dataclass(frozen=True)
class TwoClassRef:
    key_pair: tuple[int, int]
    members: frozenset[int]


@dataclass(frozen=True)
class ProjectionDecomposition:
    key_set: frozenset[int]
    classes: dict[tuple[int, ...], frozenset[int]]
    light_vertices: frozenset[int]   # at most one key neighbor
    pair_vertices: frozenset[int]    # exactly two key neighbors
    heavy_vertices: frozenset[int]   # three or more key neighbors
    pair_class_count: int
    heavy_class_count: int

    def two_classes(self) -> list[TwoClassRef]:
        """Pair classes in canonical (ascending key tuple) order."""
        out = []
        for key in sorted(k for k in self.classes if len(k) == 2):
            out.append(TwoClassRef(key_pair=(key[0], key[1]), members=self.classes[key]))
        return out


def compute_projection(inst: Instance) -> ProjectionDecomposition:
    g = inst.graph
    keys = inst.key_vertices
    key_mask = _mask_of(keys)
    classes: dict[tuple[int, ...], set[int]] = {}
    for v in range(g.n):
        if v in keys:
            continue
        y = tuple(sorted(w for w in g.adjacency[v] if key_mask >> w & 1))
        classes.setdefault(y, set()).add(v)

    light: set[int] = set()
    pair: set[int] = set()
    heavy: set[int] = set()
    n2 = n3 = 0
    for y, members in classes.items():
        if len(y) <= 1:
            light |= members
        elif len(y) == 2:
            pair |= members
            n2 += 1
        else:
            heavy |= members
            n3 += 1
    return ProjectionDecomposition(
        key_set=frozenset(keys),
        classes={y: frozenset(m) for y, m in sorted(classes.items())},
        light_vertices=frozenset(light),
        pair_vertices=frozenset(pair),
        heavy_vertices=frozenset(heavy),
        pair_class_count=n2,
        heavy_class_count=n3,
    )


def locked_status(dec: ProjectionDecomposition, cls: TwoClassRef, tokens: frozenset[int] | set[int]) -> str:
    """"locked" iff both key vertices of the class carry tokens, else "unlocked".

    Only key vertices matter: a pair class's neighborhood inside X is exactly
    its key pair, so it can absorb a token as soon as one key is free.
    """
    key = tuple(sorted(cls.key_pair))
    if dec.classes.get(key) != cls.members:
        raise ValueError(f"class {key} not in decomposition")
    return "locked" if (key[0] in tokens and key[1] in tokens) else "unlocked"


@dataclass(frozen=True)
class TwoClassStructure:
    kind: str  # "cycle" | "path-union"
    max_independent_subset: frozenset[int]


def two_class_structure(g: Graph, members) -> TwoClassStructure:
    """Shape of the subgraph induced by one pair class, plus a maximum
    independent subset of it.

    Accepts a TwoClassRef or a bare member set.  On a correctly declared
    planar instance the induced subgraph is a single spanning cycle or a
    disjoint union of paths; anything else raises EmbeddingClassViolation.
    """
    if isinstance(members, TwoClassRef):
        members = members.members
    members = sorted(members)
    member_set = set(members)
    deg = {v: sum(1 for w in g.adjacency[v] if w in member_set) for v in members}
    if any(d >= 3 for d in deg.values()):
        v = min(v for v in members if deg[v] >= 3)
        raise EmbeddingClassViolation(f"member {v} has {deg[v]} neighbors inside its class")

    seen: set[int] = set()
    comps: list[list[int]] = []
    for s in members:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w in member_set and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(comp)

    cycles = [c for c in comps if all(deg[v] == 2 for v in c)]
    if cycles:
        if len(comps) > 1:
            raise EmbeddingClassViolation("cycle component does not span its class")
        cycle = cycles[0]
        # Walk the cycle from its smallest vertex and take alternate stops.
        start = min(cycle)
        order = [start]
        prev, cur = None, start
        while True:
            nxt = min(w for w in g.adjacency[cur] if w in member_set and w != prev)
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        chosen = frozenset(order[i] for i in range(0, 2 * (len(order) // 2), 2))
        return TwoClassStructure(kind="cycle", max_independent_subset=chosen)

    chosen: set[int] = set()
    for comp in comps:
        ends = [v for v in comp if deg[v] <= 1]
        start = min(ends)
        path = [start]
        prev, cur = None, start
        while True:
            nxts = [w for w in g.adjacency[cur] if w in member_set and w != prev]
            if not nxts:
                break
            path.append(nxts[0])
            prev, cur = cur, nxts[0]
        chosen.update(path[0::2])
    return TwoClassStructure(kind="path-union", max_independent_subset=frozenset(chosen))


def brute_force_max_independent(g: Graph, pool: frozenset[int] | set[int]) -> int:
    """Exact maximum independent subset size inside ``pool`` (testing oracle)."""
    pool = sorted(pool)
    if len(pool) > 20:
        raise ValueError("pool too large for brute force")
    best = 0
    for size in range(len(pool), best, -1):
        for combo in combinations(pool, size):
            m = _mask_of(combo)
            if all(g.adj_mask[v] & m == 0 for v in combo):
                return size
    return best
