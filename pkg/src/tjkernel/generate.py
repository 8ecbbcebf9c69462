"""Seeded instance generators: random stacked triangulations with
constructive rotation systems, and pair-class gadgets.

All randomness flows through SplitMix64, a 64-bit counter-based generator
with a published constant set, so identical seeds reproduce byte-identical
instances on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, Instance, K3rMinorFree, Planar, RotationSystem, is_independent

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: state += 0x9E3779B97F4A7C15; output is the mixed state."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        # rejection sampling keeps the draw unbiased
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            u = self.next_u64()
            if u <= limit:
                return u % n

    def random(self) -> float:
        return self.next_u64() / 2**64

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]


class GenerationError(RuntimeError):
    pass


def _random_independent_k(g: Graph, k: int, rng: SplitMix64, retries: int = 1000) -> frozenset[int]:
    """Random maximal independent set truncated to k vertices (with retries)."""
    for _ in range(retries):
        order = list(range(g.n))
        rng.shuffle(order)
        chosen: list[int] = []
        mask = 0
        for v in order:
            if g.adj_mask[v] & mask == 0 and not (mask >> v & 1):
                chosen.append(v)
                mask |= 1 << v
        if len(chosen) >= k:
            picked = list(chosen)
            rng.shuffle(picked)
            return frozenset(picked[:k])
    raise GenerationError(f"could not sample an independent set of size {k} in {retries} tries")


def gen_planar_instance(n: int, k: int, edge_keep_prob: float, seed: int) -> Instance:
    """Random planar instance built as a stacked triangulation.

    Starts from an embedded K4 and repeatedly inserts a vertex into a
    uniformly random face, connecting it to the three corners while updating
    the rotation system in place.  Each edge is then independently deleted
    with probability 1 - edge_keep_prob, skipping deletions that would
    disconnect the graph.  Token sets are random maximal independent sets
    truncated to k.
    """
    if n < 4:
        raise ValueError("stacked triangulation needs n >= 4")
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = SplitMix64(seed)

    # K4 with vertex 0 in the center; faces oriented so that the tracing rule
    # next(u,v) = (v, successor of u around v) closes every triangle.
    rot: list[list[int]] = [[1, 2, 3], [2, 0, 3], [3, 0, 1], [1, 0, 2]]
    faces: list[tuple[int, int, int]] = [(0, 1, 3), (0, 2, 1), (0, 3, 2), (1, 2, 3)]

    def insert_after(center: int, anchor: int, new: int) -> None:
        i = rot[center].index(anchor)
        rot[center].insert(i + 1, new)

    for v in range(4, n):
        a, b, c = faces.pop(rng.randrange(len(faces)))
        rot.append([a, c, b])
        insert_after(a, c, v)
        insert_after(b, a, v)
        insert_after(c, b, v)
        faces.extend([(a, b, v), (b, c, v), (c, a, v)])

    adj = [set(r) for r in rot]

    def is_bridge(u: int, w: int) -> bool:
        # connectivity of u..w after removing the edge
        adj[u].discard(w)
        adj[w].discard(u)
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        adj[u].add(w)
        adj[w].add(u)
        return w not in seen

    all_edges = sorted((u, w) for u in range(n) for w in adj[u] if u < w)
    for u, w in all_edges:
        if rng.random() < 1.0 - edge_keep_prob and not is_bridge(u, w):
            adj[u].discard(w)
            adj[w].discard(u)
            rot[u].remove(w)
            rot[w].remove(u)

    edges = [(u, w) for u in range(n) for w in adj[u] if u < w]
    graph = Graph.from_edges(n, edges)
    source = _random_independent_k(graph, k, rng)
    target = _random_independent_k(graph, k, rng)
    return Instance(
        graph=graph,
        source_set=source,
        target_set=target,
        k=k,
        graph_class=Planar(),
        embedding=RotationSystem(tuple(tuple(r) for r in rot)),
    )


WIRINGS = ("independent-fan", "path-fan", "cycle-fan", "shared-key", "triangle")


def _triangle_gadget(class_sizes, k_pad, planar, r, targets_per_class, extra_free):
    """Three fans on the sides of a key triangle; every pair of key tokens
    shares a class, which is what the red/uncolored reduction paths need."""
    import math

    if len(class_sizes) != 3:
        raise ValueError("triangle wiring needs exactly three class sizes")
    corners = [(0.0, 0.0), (10.0, 0.0), (5.0, 8.0)]
    pos: dict[int, tuple[float, float]] = {0: corners[0], 1: corners[1], 2: corners[2]}
    next_id = 3
    edges: list[tuple[int, int]] = []
    source = [0, 1, 2]
    target: list[int] = []
    sides = [(0, 1), (0, 2), (1, 2)]
    for (a, b), m in zip(sides, class_sizes):
        ax, ay = corners[a]
        bx, by = corners[b]
        mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
        length = math.hypot(bx - ax, by - ay)
        cx, cy = 5.0, 8.0 / 3.0  # triangle centroid
        nx, ny = (by - ay) / length, -(bx - ax) / length
        if (mx - cx) * nx + (my - cy) * ny < 0:
            nx, ny = -nx, -ny  # outward
        members = []
        for depth in range(m):
            v = next_id
            next_id += 1
            pos[v] = (mx + (1.5 + depth) * nx, my + (1.5 + depth) * ny)
            members.append(v)
            edges.append((a, v))
            edges.append((b, v))
        want = min(targets_per_class, m)
        target.extend(members[:want])
    for _ in range(k_pad):
        a, b = next_id, next_id + 1
        next_id += 2
        edges.append((a, b))
        source.append(a)
        target.append(b)
        pos[a] = (100.0 + a, 0.0)
        pos[b] = (100.0 + b, 5.0)
    free = []
    for _ in range(extra_free):
        pos[next_id] = (200.0 + next_id, 0.0)
        free.append(next_id)
        next_id += 1

    k = len(source)
    while len(target) > k:
        target.pop()
    if len(target) < k:
        raise GenerationError("gadget cannot seat enough target tokens; raise targets_per_class")
    graph = Graph.from_edges(next_id, edges)
    embedding = None
    if planar:
        rotations = []
        for v in range(next_id):
            vx, vy = pos[v]
            order = sorted(
                graph.adjacency[v],
                key=lambda w: math.atan2(pos[w][1] - vy, pos[w][0] - vx),
            )
            rotations.append(tuple(order))
        embedding = RotationSystem(tuple(rotations))
    return Instance(
        graph=graph,
        source_set=frozenset(source),
        target_set=frozenset(target),
        k=k,
        graph_class=Planar() if planar else K3rMinorFree(r),
        embedding=embedding,
    )


def gen_two_class_gadget(
    class_sizes: list[int],
    wiring: str = "independent-fan",
    k_pad: int = 0,
    planar: bool = True,
    r: int = 3,
    seed: int = 0,
    targets_per_class: int = 1,
    extra_free: int = 0,
) -> Instance:
    """Pair-class stress gadget: token pairs as key vertices with one
    K_{2,m} fan per requested size.

    Wirings: independent-fan (no member edges), path-fan (members form a
    path), cycle-fan (members form a cycle), shared-key (consecutive fans
    share their first key).  Source tokens sit on the keys plus k_pad padding
    edges; target tokens are fan members plus the padding partners.
    ``extra_free`` adds isolated vertices (light-class filler).
    """
    if wiring not in WIRINGS:
        raise ValueError(f"unknown wiring {wiring!r}")
    if any(m < 1 for m in class_sizes):
        raise ValueError("class sizes must be >= 1")
    if wiring == "cycle-fan" and any(m < 3 for m in class_sizes):
        raise ValueError("cycle-fan needs classes of size >= 3")
    if wiring == "triangle":
        return _triangle_gadget(class_sizes, k_pad, planar, r, targets_per_class, extra_free)

    rng = SplitMix64(seed)
    edges: list[tuple[int, int]] = []
    rot: dict[int, list[int]] = {}
    next_id = 0

    def fresh() -> int:
        nonlocal next_id
        next_id += 1
        return next_id - 1

    source: list[int] = []
    target: list[int] = []
    shared_key: int | None = None

    for ci, m in enumerate(class_sizes):
        if wiring == "shared-key" and shared_key is not None:
            x = shared_key
        else:
            x = fresh()
            rot[x] = []
            source.append(x)
        y = fresh()
        rot[y] = []
        source.append(y)
        if wiring == "shared-key" and shared_key is None:
            shared_key = x
        members = [fresh() for _ in range(m)]
        for u in members:
            edges.append((x, u))
            edges.append((y, u))
        rot[x].extend(members)
        for u in reversed(members):
            rot[y].append(u)
        if wiring == "path-fan":
            for a, b in zip(members, members[1:]):
                edges.append((a, b))
        if wiring == "cycle-fan":
            for a, b in zip(members, members[1:]):
                edges.append((a, b))
            edges.append((members[-1], members[0]))
        for i, u in enumerate(members):
            if wiring in ("path-fan", "cycle-fan"):
                order = []
                if i + 1 < m:
                    order.append(members[i + 1])
                elif wiring == "cycle-fan" and m >= 2:
                    order.append(members[0])
                order.append(x)
                if i > 0:
                    order.append(members[i - 1])
                elif wiring == "cycle-fan" and m >= 2:
                    order.append(members[-1])
                order.append(y)
            else:
                order = [x, y]
            rot[u] = order
        # targets: alternate members so path/cycle wirings stay independent
        if wiring == "independent-fan" or wiring == "shared-key":
            want = min(targets_per_class, m)
            target.extend(members[:want])
        elif wiring == "path-fan":
            want = min(targets_per_class, (m + 1) // 2)
            target.extend(members[0 : 2 * want : 2])
        else:  # cycle-fan: never take both ends of the cycle
            want = min(targets_per_class, m // 2)
            target.extend(members[0 : 2 * want : 2])

    for _ in range(k_pad):
        a, b = fresh(), fresh()
        edges.append((a, b))
        rot[a] = [b]
        rot[b] = [a]
        source.append(a)
        target.append(b)

    for _ in range(extra_free):
        v = fresh()
        rot[v] = []

    k = len(source)
    while len(target) > k:
        target.pop()
    if len(target) < k:
        raise GenerationError("gadget cannot seat enough target tokens; raise targets_per_class")

    graph = Graph.from_edges(next_id, edges)
    if not is_independent(graph, source) or not is_independent(graph, target):
        raise GenerationError("gadget token sets are not independent")
    embedding = RotationSystem(tuple(tuple(rot[v]) for v in range(next_id))) if planar else None
    graph_class = Planar() if planar else K3rMinorFree(r)
    return Instance(
        graph=graph,
        source_set=frozenset(source),
        target_set=frozenset(target),
        k=k,
        graph_class=graph_class,
        embedding=embedding,
    )
