"""Instance model: graphs, token sets, rotation systems, text serialization.

Vertices are 0-indexed internally and 1-indexed in the text format.
Adjacency is kept both as sorted tuples and as int bitmasks; the bitmasks
carry all independence and neighborhood-intersection queries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class FormatError(ValueError):
    """Malformed or inconsistent instance text.  Carries the offending line."""

    def __init__(self, line_no: int | None, message: str):
        self.line_no = line_no
        self.message = message
        if line_no is None:
            super().__init__(message)
        else:
            super().__init__(f"line {line_no}: {message}")


@dataclass(frozen=True)
class Planar:
    def __str__(self) -> str:
        return "planar"


@dataclass(frozen=True)
class K3rMinorFree:
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")

    def __str__(self) -> str:
        return f"k3r {self.r}"


GraphClass = Planar | K3rMinorFree


def _mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _bits(mask: int) -> Iterator[int]:
    """Set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency and bitmask adjacency."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int
    adj_mask: tuple[int, ...] = field(compare=False, repr=False)

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise ValueError(f"duplicate edge ({u},{v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
            m += 1
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        masks = tuple(_mask_of(s) for s in nbrs)
        return Graph(n=n, adjacency=adjacency, edge_count=m, adj_mask=masks)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj_mask[u] >> v & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def neighborhood_mask(self, vertices: Iterable[int]) -> int:
        m = 0
        for v in vertices:
            m |= self.adj_mask[v]
        return m

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            out.append(sorted(comp))
        return out


def is_independent(g: Graph, vertices: Iterable[int]) -> bool:
    """True iff no edge of ``g`` has both endpoints in ``vertices``."""
    vs = list(vertices)
    for v in vs:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    m = _mask_of(vs)
    for v in vs:
        if g.adj_mask[v] & m:
            return False
    return True


@dataclass(frozen=True)
class RotationSystem:
    """Cyclic neighbor order per vertex, encoding a combinatorial embedding."""

    rotations: tuple[tuple[int, ...], ...]

    def rotation(self, v: int) -> tuple[int, ...]:
        return self.rotations[v]


@dataclass(frozen=True)
class RotationReport:
    ok: bool
    face_count: int
    component_count: int
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_rotation_system(g: Graph, rot: RotationSystem) -> RotationReport:
    """Check a rotation system for genus 0 by traversing all faces.

    Accepts iff each vertex's rotation is a permutation of its neighbors
    and V - E + F = 1 + (number of connected components), where F counts
    traced faces with the outer faces of the components merged into one.
    """
    if len(rot.rotations) != g.n:
        return RotationReport(False, 0, 0, "rotation does not cover every vertex")
    for v in range(g.n):
        if tuple(sorted(rot.rotations[v])) != g.adjacency[v]:
            return RotationReport(
                False, 0, 0, f"rotation of vertex {v} is not a permutation of its neighbors"
            )
    succ = []
    for v in range(g.n):
        order = rot.rotations[v]
        d = len(order)
        succ.append({order[i]: order[(i + 1) % d] for i in range(d)})

    comps = g.components()
    n_comp = len(comps)
    isolated = sum(1 for c in comps if len(c) == 1 and g.degree(c[0]) == 0)

    unseen = {(u, v) for u in range(g.n) for v in g.adjacency[u]}
    traced = 0
    while unseen:
        start = min(unseen)
        e = start
        while True:
            unseen.discard(e)
            u, v = e
            e = (v, succ[v][u])
            if e == start:
                break
            if e not in unseen:
                return RotationReport(False, 0, n_comp, "face traversal failed to close")
        traced += 1

    face_count = traced + isolated - (n_comp - 1)
    ok = g.n - g.edge_count + face_count == 1 + n_comp
    msg = "" if ok else "Euler check failed (rotation is not planar)"
    return RotationReport(ok, face_count, n_comp, msg)


@dataclass(frozen=True)
class Instance:
    """A reconfiguration instance: graph, token sets, declared class, embedding."""

    graph: Graph
    source_set: frozenset[int]
    target_set: frozenset[int]
    k: int
    graph_class: GraphClass
    embedding: RotationSystem | None = None
    original_ids: tuple[int, ...] = ()

    def __post_init__(self):
        g = self.graph
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.source_set) != self.k or len(self.target_set) != self.k:
            raise ValueError("token sets must both have size k")
        if not is_independent(g, self.source_set):
            raise ValueError("source set not independent")
        if not is_independent(g, self.target_set):
            raise ValueError("target set not independent")
        orig = self.original_ids or tuple(range(g.n))
        if len(orig) != g.n or len(set(orig)) != g.n:
            raise ValueError("original_ids must be injective over all vertices")
        object.__setattr__(self, "original_ids", orig)

    @property
    def key_vertices(self) -> frozenset[int]:
        return self.source_set | self.target_set

    def source_mask(self) -> int:
        return _mask_of(self.source_set)

    def target_mask(self) -> int:
        return _mask_of(self.target_set)


def delete_vertices(inst: Instance, doomed: Iterable[int]) -> Instance:
    """Induced sub-instance on the surviving vertices, ids compacted.

    Token vertices may never be deleted; ``original_ids`` is composed so the
    result stays traceable to the originally loaded instance.
    """
    doomed_set = set(doomed)
    for v in doomed_set:
        if not (0 <= v < inst.graph.n):
            raise ValueError(f"vertex {v} out of range")
    if doomed_set & (inst.source_set | inst.target_set):
        raise ValueError("attempt to delete a token vertex")
    keep = [v for v in range(inst.graph.n) if v not in doomed_set]
    remap = {old: new for new, old in enumerate(keep)}
    g = inst.graph
    edges = [(remap[u], remap[v]) for u, v in g.edges() if u in remap and v in remap]
    new_graph = Graph.from_edges(len(keep), edges)
    embedding = None
    if inst.embedding is not None:
        rotations = tuple(
            tuple(remap[w] for w in inst.embedding.rotations[old] if w in remap)
            for old in keep
        )
        embedding = RotationSystem(rotations)
    return Instance(
        graph=new_graph,
        source_set=frozenset(remap[v] for v in inst.source_set),
        target_set=frozenset(remap[v] for v in inst.target_set),
        k=inst.k,
        graph_class=inst.graph_class,
        embedding=embedding,
        original_ids=tuple(inst.original_ids[old] for old in keep),
    )


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph plus the list mapping new ids back to old ids."""
    keep = sorted(set(vertices))
    remap = {old: new for new, old in enumerate(keep)}
    edges = []
    for u in keep:
        for v in g.adjacency[u]:
            if u < v and v in remap:
                edges.append((remap[u], remap[v]))
    return Graph.from_edges(len(keep), edges), keep


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_instance(text: str | bytes) -> Instance:
    """Parse the line-oriented instance format.  All errors carry line numbers.

    Format (1-indexed vertex ids):
        c <comment>
        p tjisr <n> <m> <k>      exactly once, first non-comment line
        e <u> <v>                m edge lines
        s <v1> ... <vk>          source tokens, exactly once
        t <v1> ... <vk>          target tokens, exactly once
        g planar | g k3r <r>     exactly once
        r <v> : <w1> <w2> ...    optional rotation lines, all-or-none
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    n = m = k = None
    edges: list[tuple[int, int]] = []
    edge_lines: list[int] = []
    seen_edges: set[tuple[int, int]] = set()
    s_line = t_line = g_line = None
    source: list[int] = []
    target: list[int] = []
    graph_class: GraphClass | None = None
    rot_lines: dict[int, tuple[int, list[int]]] = {}

    def parse_vertex(tok: str, ln: int) -> int:
        try:
            v = int(tok)
        except ValueError:
            raise FormatError(ln, f"malformed vertex id {tok!r}") from None
        if n is not None and not (1 <= v <= n):
            raise FormatError(ln, f"vertex {v} out of range 1..{n}")
        return v - 1

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        tag = parts[0]
        if n is None and tag != "p":
            raise FormatError(ln, "expected problem line 'p tjisr <n> <m> <k>' first")
        if tag == "p":
            if n is not None:
                raise FormatError(ln, "duplicate problem line")
            if len(parts) != 5 or parts[1] != "tjisr":
                raise FormatError(ln, "malformed problem line")
            try:
                n, m, k = int(parts[2]), int(parts[3]), int(parts[4])
            except ValueError:
                raise FormatError(ln, "malformed problem line") from None
            if n < 1 or m < 0 or k < 1:
                raise FormatError(ln, "problem line values out of range")
        elif tag == "e":
            if len(parts) != 3:
                raise FormatError(ln, "malformed edge line")
            u, v = parse_vertex(parts[1], ln), parse_vertex(parts[2], ln)
            if u == v:
                raise FormatError(ln, "self-loop not allowed")
            key = (min(u, v), max(u, v))
            if key in seen_edges:
                raise FormatError(ln, f"duplicate edge ({u + 1},{v + 1})")
            seen_edges.add(key)
            edges.append(key)
            edge_lines.append(ln)
        elif tag in ("s", "t"):
            if tag == "s" and s_line is not None:
                raise FormatError(ln, "duplicate s-line")
            if tag == "t" and t_line is not None:
                raise FormatError(ln, "duplicate t-line")
            verts = [parse_vertex(p, ln) for p in parts[1:]]
            if len(set(verts)) != len(verts):
                raise FormatError(ln, f"duplicate vertex in {tag}-line")
            if len(verts) != k:
                raise FormatError(ln, f"{tag}-line must list exactly k={k} vertices")
            if tag == "s":
                source, s_line = verts, ln
            else:
                target, t_line = verts, ln
        elif tag == "g":
            if g_line is not None:
                raise FormatError(ln, "duplicate g-line")
            g_line = ln
            if len(parts) == 2 and parts[1] == "planar":
                graph_class = Planar()
            elif len(parts) == 3 and parts[1] == "k3r":
                try:
                    graph_class = K3rMinorFree(int(parts[2]))
                except ValueError:
                    raise FormatError(ln, "malformed g-line") from None
            else:
                raise FormatError(ln, "malformed g-line")
        elif tag == "r":
            if len(parts) < 3 or parts[2] != ":":
                raise FormatError(ln, "malformed rotation line")
            v = parse_vertex(parts[1], ln)
            if v in rot_lines:
                raise FormatError(ln, f"duplicate rotation line for vertex {v + 1}")
            rot_lines[v] = (ln, [parse_vertex(p, ln) for p in parts[3:]])
        else:
            raise FormatError(ln, f"unknown line type {tag!r}")

    if n is None:
        raise FormatError(None, "missing problem line")
    if len(edges) != m:
        raise FormatError(None, f"expected {m} edge lines, found {len(edges)}")
    if s_line is None:
        raise FormatError(None, "missing s-line")
    if t_line is None:
        raise FormatError(None, "missing t-line")
    if graph_class is None:
        raise FormatError(None, "missing g-line")

    graph = Graph.from_edges(n, edges)
    if not is_independent(graph, source):
        raise FormatError(s_line, "source set not independent")
    if not is_independent(graph, target):
        raise FormatError(t_line, "target set not independent")

    embedding = None
    if rot_lines:
        if len(rot_lines) != n:
            missing = next(v for v in range(n) if v not in rot_lines)
            raise FormatError(None, f"rotation lines must cover all vertices (vertex {missing + 1} missing)")
        rotations = []
        for v in range(n):
            ln, order = rot_lines[v]
            if tuple(sorted(order)) != graph.adjacency[v]:
                raise FormatError(ln, "rotation line inconsistent with edges")
            rotations.append(tuple(order))
        embedding = RotationSystem(tuple(rotations))

    return Instance(
        graph=graph,
        source_set=frozenset(source),
        target_set=frozenset(target),
        k=k,
        graph_class=graph_class,
        embedding=embedding,
    )


def serialize_instance(inst: Instance) -> str:
    """Write an instance in the text format, with origin-tracking comments."""
    g = inst.graph
    out = [f"p tjisr {g.n} {g.edge_count} {inst.k}"]
    for cur, orig in enumerate(inst.original_ids):
        out.append(f"c orig {cur + 1} {orig + 1}")
    for u, v in g.edges():
        out.append(f"e {u + 1} {v + 1}")
    out.append("s " + " ".join(str(v + 1) for v in sorted(inst.source_set)))
    out.append("t " + " ".join(str(v + 1) for v in sorted(inst.target_set)))
    out.append(f"g {inst.graph_class}")
    if inst.embedding is not None:
        for v in range(g.n):
            order = " ".join(str(w + 1) for w in inst.embedding.rotations[v])
            out.append(f"r {v + 1} : {order}".rstrip())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Small-graph minor containment check (test-only validator)
# ---------------------------------------------------------------------------

def _connected_mask(g: Graph, mask: int) -> bool:
    low = mask & -mask
    seen = low
    frontier = low
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.adj_mask[v] & mask & ~seen
        seen |= nxt
        frontier = nxt
    return seen == mask


def check_k3r_minor_small(g: Graph, r: int, n_limit: int = 12) -> bool:
    """Exhaustively decide whether ``g`` contains a K_{3,r} minor.

    Searches over branch-set assignments: three connected disjoint sets on
    one side, plus r disjoint connected sets each adjacent to all three.
    Exponential; refuses graphs larger than ``n_limit``.
    """
    if g.n > n_limit:
        raise ValueError(f"graph too large for exhaustive minor check (n={g.n} > {n_limit})")
    if r < 1:
        raise ValueError("r must be >= 1")
    if g.n < 3 + r:
        return False

    full = (1 << g.n) - 1
    connected = [m for m in range(1, full + 1) if _connected_mask(g, m)]
    nbr_of: dict[int, int] = {}

    def nbrs(mask: int) -> int:
        cached = nbr_of.get(mask)
        if cached is None:
            acc = 0
            for v in _bits(mask):
                acc |= g.adj_mask[v]
            cached = acc & ~mask
            nbr_of[mask] = cached
        return cached

    def packs_r_pieces(rest: int, sides: tuple[int, int, int]) -> bool:
        # Quick necessary condition: r disjoint pieces each need a private
        # vertex adjacent to every side.
        for a in sides:
            if bin(nbrs(a) & rest).count("1") < r:
                return False
        memo: dict[int, int] = {}

        def best(avail: int) -> int:
            if avail == 0:
                return 0
            got = memo.get(avail)
            if got is not None:
                return got
            low = avail & -avail
            result = best(avail ^ low)  # lowest vertex unused
            rest_bits = avail ^ low
            sub = rest_bits
            while True:  # all subsets of avail containing `low`
                piece = sub | low
                if _connected_mask(g, piece) and all(nbrs(a) & piece for a in sides):
                    result = max(result, 1 + best(avail & ~piece))
                    if result >= r:
                        break
                if sub == 0:
                    break
                sub = (sub - 1) & rest_bits
            memo[avail] = result
            return result

        return best(rest) >= r

    for i, a1 in enumerate(connected):
        if bin(a1).count("1") > g.n - r - 2:
            continue
        for j in range(i + 1, len(connected)):
            a2 = connected[j]
            if a1 & a2:
                continue
            if bin(a1 | a2).count("1") > g.n - r - 1:
                continue
            for l in range(j + 1, len(connected)):
                a3 = connected[l]
                if (a1 | a2) & a3:
                    continue
                used = a1 | a2 | a3
                if bin(used).count("1") > g.n - r:
                    continue
                if packs_r_pieces(full & ~used, (a1, a2, a3)):
                    return True
    return False
