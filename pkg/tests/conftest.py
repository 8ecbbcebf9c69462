import itertools

from hypothesis import strategies as st

from tjkernel import Graph, Instance, K3rMinorFree, is_independent


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


@st.composite
def small_graphs(draw, max_n: int = 10, min_n: int = 1):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    all_pairs = list(itertools.combinations(range(n), 2))
    if all_pairs:
        chosen = draw(st.sets(st.sampled_from(all_pairs), max_size=len(all_pairs)))
    else:
        chosen = set()
    return Graph.from_edges(n, sorted(chosen))


def _greedy_independent(g: Graph, order) -> list[int]:
    out: list[int] = []
    for v in order:
        if is_independent(g, out + [v]):
            out.append(v)
    return out


@st.composite
def small_instances(draw, max_n: int = 10, max_k: int = 3):
    g = draw(small_graphs(max_n=max_n))
    first = _greedy_independent(g, draw(st.permutations(range(g.n))))
    second = _greedy_independent(g, draw(st.permutations(range(g.n))))
    k = draw(st.integers(min_value=1, max_value=max(1, min(max_k, len(first), len(second)))))
    return Instance(
        graph=g,
        source_set=frozenset(first[:k]),
        target_set=frozenset(second[:k]),
        k=k,
        graph_class=K3rMinorFree(3),
    )
