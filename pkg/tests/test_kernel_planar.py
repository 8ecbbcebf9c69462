import math
from itertools import combinations

import pytest
from hypothesis import given, settings

from conftest import complete_bipartite, cycle, small_graphs
from tjkernel import (
    Graph,
    GreedyUndecided,
    Instance,
    K3rMinorFree,
    Planar,
    RotationSystem,
    TwoClassRef,
    anticompleteify,
    apply_reduction_rules,
    build_kernel_planar,
    check_greedy,
    classify_clean,
    color_removal,
    compute_projection,
    find_clean_set,
    gen_two_class_gadget,
    greedy_oracle,
    important_vertices,
    is_independent,
    solve_bfs,
    sufficient_greedy_by_volume,
    validate_rotation_system,
)
from tjkernel.kernel_planar import (
    anticompleteify_with_outside,
    trim_outside_set,
    weakly_greedy_witnesses,
)


def rotation_from_coordinates(g: Graph, pos: dict[int, tuple[float, float]]) -> RotationSystem:
    """Counterclockwise angular order of neighbors; valid whenever the
    straight-line drawing at ``pos`` is planar."""
    rotations = []
    for v in range(g.n):
        x, y = pos[v]
        order = sorted(g.adjacency[v], key=lambda w: math.atan2(pos[w][1] - y, pos[w][0] - x))
        rotations.append(tuple(order))
    return RotationSystem(tuple(rotations))


def brute_anticomplete_feasible(g: Graph, member_sets, budget=2) -> bool:
    """Exhaustive oracle: does some at-most-``budget``-per-class deletion make
    the classes pairwise anticomplete?"""
    options = []
    for members in member_sets:
        members = sorted(members)
        opts = [frozenset()]
        opts += [frozenset([v]) for v in members]
        if budget >= 2:
            opts += [frozenset(p) for p in combinations(members, 2)]
        options.append(opts)

    def ok(kept):
        for i in range(len(kept)):
            for j in range(i + 1, len(kept)):
                ni = g.neighborhood_mask(kept[i])
                if any(ni >> v & 1 for v in kept[j]):
                    return False
        return True

    def search(idx, kept):
        if idx == len(member_sets):
            return ok(kept)
        for rm in options[idx]:
            if search(idx + 1, kept + [frozenset(member_sets[idx]) - rm]):
                return True
        return False

    return search(0, [])


# ---------------------------------------------------------------------------
# anticompleteify
# ---------------------------------------------------------------------------

def test_anticomplete_noop_when_already_anticomplete():
    inst = gen_two_class_gadget([4, 4], wiring="independent-fan", planar=True, seed=0,
                                targets_per_class=2)
    dec = compute_projection(inst)
    classes = dec.two_classes()
    trimmed = anticompleteify(inst.graph, inst.embedding, classes)
    for cls in classes:
        assert trimmed[cls.key_pair] == cls.members


def nested_class_gadget():
    # Outer fan keyed (0,8) with arc members 5,6,7; nested fan keyed (0,1)
    # with members 2,3,4 drawn inside the outer face between arcs 5 and 6.
    # Contacts 2-5 and 4-6 touch the nested fan only at its extreme arcs.
    edges = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4),
             (0, 5), (0, 6), (0, 7), (8, 5), (8, 6), (8, 7),
             (2, 5), (4, 6)]
    g = Graph.from_edges(9, edges)
    pos = {0: (0, 0), 8: (10, 0), 5: (5, 3), 6: (5, -3), 7: (5, -6),
           1: (6, 0), 2: (4, 1), 3: (4, 0), 4: (4, -1)}
    rot = rotation_from_coordinates(g, pos)
    assert validate_rotation_system(g, rot).ok
    nested = TwoClassRef(key_pair=(0, 1), members=frozenset({2, 3, 4}))
    outer = TwoClassRef(key_pair=(0, 8), members=frozenset({5, 6, 7}))
    return g, rot, nested, outer


def test_anticomplete_nested_boundary_pair_removed():
    g, rot, nested, outer = nested_class_gadget()
    trimmed = anticompleteify(g, rot, [nested, outer], protect_last=True)
    assert trimmed[(0, 1)] == frozenset({3})  # boundary pair {2,4} removed
    assert trimmed[(0, 8)] == outer.members
    assert brute_anticomplete_feasible(g, [nested.members, outer.members])


def three_sector_gadget():
    # Three size-4 fans sharing key 0, sectors around it; adjacent sectors
    # touch at their extreme arcs, so the classes are mutually in contact.
    def polar(r, deg):
        return (r * math.cos(math.radians(deg)), r * math.sin(math.radians(deg)))

    pos = {0: (0.0, 0.0), 1: polar(10, 90), 2: polar(10, 210), 9: polar(10, 330)}
    members = {
        (0, 1): [(3, 65), (4, 85), (5, 95), (6, 115)],
        (0, 2): [(7, 185), (8, 205), (10, 215), (11, 235)],
        (0, 9): [(12, 305), (13, 325), (14, 335), (15, 355)],
    }
    edges = []
    for (a, b), mems in members.items():
        for v, deg in mems:
            pos[v] = polar(5, deg)
            edges.append((a, v))
            edges.append((b, v))
    edges += [(6, 7), (11, 12), (15, 3)]  # contacts across sector gaps
    g = Graph.from_edges(16, edges)
    rot = rotation_from_coordinates(g, pos)
    assert validate_rotation_system(g, rot).ok
    classes = [
        TwoClassRef(key_pair=kp, members=frozenset(v for v, _ in mems))
        for kp, mems in sorted(members.items())
    ]
    return g, rot, classes


def test_anticomplete_three_touching_classes():
    g, rot, classes = three_sector_gadget()
    trimmed = anticompleteify(g, rot, classes, protect_last=True)
    kept = [trimmed[c.key_pair] for c in classes]
    for c, kc in zip(classes, kept):
        assert len(c.members) - len(kc) <= 2
        assert len(kc) >= 2
    for i in range(3):
        for j in range(i + 1, 3):
            assert not g.neighborhood_mask(kept[i]) & sum(1 << v for v in kept[j])
    assert brute_anticomplete_feasible(g, [c.members for c in classes])


def test_anticomplete_with_outside_set():
    # replace one sector by a connected path and separate the two fans from it
    def polar(r, deg):
        return (r * math.cos(math.radians(deg)), r * math.sin(math.radians(deg)))

    pos = {0: (0.0, 0.0), 1: polar(10, 90), 2: polar(10, 210)}
    edges = []
    for (a, b), mems in {(0, 1): [(3, 65), (4, 85), (5, 95), (6, 115)],
                         (0, 2): [(7, 185), (8, 205), (9, 215), (10, 235)]}.items():
        for v, deg in mems:
            pos[v] = polar(5, deg)
            edges.append((a, v))
            edges.append((b, v))
    # connected outside path in the remaining sector, touching both fans
    pos[11], pos[12], pos[13] = polar(5, 300), polar(5, 330), polar(5, 357)
    edges += [(11, 12), (12, 13), (10, 11), (3, 13)]
    g = Graph.from_edges(14, edges)
    rot = rotation_from_coordinates(g, pos)
    assert validate_rotation_system(g, rot).ok
    cls_a = TwoClassRef(key_pair=(0, 1), members=frozenset({3, 4, 5, 6}))
    cls_b = TwoClassRef(key_pair=(0, 2), members=frozenset({7, 8, 9, 10}))
    outside = frozenset({11, 12, 13})
    ka, kb = anticompleteify_with_outside(g, rot, cls_a, cls_b, outside)
    assert len(cls_a.members - ka) <= 2 and len(cls_b.members - kb) <= 2
    for s, t in ((ka, kb), (ka, outside), (kb, outside)):
        assert not g.neighborhood_mask(s) & sum(1 << v for v in t)


def test_trim_outside_set():
    g = Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (0, 4), (3, 5)])
    kept = trim_outside_set(g, frozenset({0, 1, 2, 3}), frozenset({4}), frozenset({5}))
    assert kept == frozenset({1, 2})


def test_trim_outside_set_overflow():
    g = Graph.from_edges(12, [(i, 10) for i in range(5)] + [(5, 11)])
    with pytest.raises(Exception):
        trim_outside_set(g, frozenset(range(6)), frozenset({10}), frozenset({11}))


def test_fallback_search_finds_trims():
    from tjkernel.kernel_planar import _anticomplete_fallback

    # three cross edges between two fan classes: coverable by 2 + 1 deletions
    edges = [(0, v) for v in range(4, 10)] + [(1, v) for v in range(4, 7)] + \
            [(2, v) for v in range(7, 10)] + [(4, 7), (5, 8), (6, 9)]
    g = Graph.from_edges(10, edges)
    classes = [
        TwoClassRef(key_pair=(0, 1), members=frozenset({4, 5, 6})),
        TwoClassRef(key_pair=(0, 2), members=frozenset({7, 8, 9})),
    ]
    trimmed = _anticomplete_fallback(g, classes, protect_last=False)
    kept = [trimmed[c.key_pair] for c in classes]
    assert all(len(c.members) - len(t) <= 2 for c, t in zip(classes, kept))
    assert not g.neighborhood_mask(kept[0]) & sum(1 << v for v in kept[1])


def test_fallback_infeasible_raises():
    from tjkernel.kernel_planar import EmbeddingInconsistent, _anticomplete_fallback

    # five disjoint cross edges cannot be covered by two deletions per side
    edges = [(0, v) for v in range(4, 14)] + [(v, v + 5) for v in range(4, 9)]
    g = Graph.from_edges(14, edges)
    classes = [
        TwoClassRef(key_pair=(0, 1), members=frozenset(range(4, 9))),
        TwoClassRef(key_pair=(0, 2), members=frozenset(range(9, 14))),
    ]
    with pytest.raises(EmbeddingInconsistent, match="no at-most-2"):
        _anticomplete_fallback(g, classes, protect_last=False)


def test_fallback_refuses_many_classes():
    from tjkernel.kernel_planar import EmbeddingInconsistent, _anticomplete_fallback

    g = Graph.from_edges(16, [(14, 15)])
    classes = [TwoClassRef(key_pair=(0, i + 1), members=frozenset({i + 8})) for i in range(7)]
    with pytest.raises(EmbeddingInconsistent, match="capped at 6"):
        _anticomplete_fallback(g, classes, protect_last=True)


# ---------------------------------------------------------------------------
# greedy / clean classification
# ---------------------------------------------------------------------------

def test_check_greedy_anticomplete():
    g = Graph.from_edges(4, [])
    got = check_greedy(g, {0, 1}, {2, 3})
    assert got is not None


def test_check_greedy_matching():
    g = Graph.from_edges(4, [(0, 2), (1, 3)])
    got = check_greedy(g, {0, 1}, {2, 3})
    assert got is not None
    i_order, j_order = got
    assert len(i_order) == len(j_order) == 2


def test_check_greedy_crossing_blocked():
    g = complete_bipartite(2, 2)
    assert check_greedy(g, {0, 1}, {2, 3}) is None


def test_check_greedy_oversize_targets():
    g = Graph.from_edges(5, [(0, 2)])
    got = check_greedy(g, {0}, {1, 2, 3, 4})
    assert got is not None


def test_check_greedy_guard():
    g = Graph.from_edges(26, [])
    with pytest.raises(GreedyUndecided):
        check_greedy(g, set(range(13)), set(range(13, 26)))


@settings(max_examples=120, deadline=None)
@given(small_graphs(max_n=8))
def test_check_greedy_agrees_with_oracle(g):
    import itertools

    indep = [frozenset(c) for size in (1, 2, 3)
             for c in itertools.combinations(range(g.n), size)
             if is_independent(g, c)]
    pairs = [(a, b) for a in indep for b in indep if len(a) == len(b)][:40]
    for a, b in pairs:
        assert (check_greedy(g, a, b) is not None) == greedy_oracle(g, a, b)


def figure_weakly_greedy_graph():
    # two-block shape: tokens 0..5, set vertices 6..11, dense block on the
    # first two columns and a sparse tail
    edges = [(0, 6), (6, 1), (1, 7), (7, 0), (0, 9), (9, 2), (2, 11), (11, 3),
             (8, 1), (1, 10), (10, 4), (5, 11)]
    return Graph.from_edges(12, edges)


def test_weakly_greedy_block_activation():
    g = figure_weakly_greedy_graph()
    wit = next(iter(weakly_greedy_witnesses(g, frozenset(range(6)), frozenset(range(6, 12)))))
    i_pair, j_pair, tail = wit
    assert i_pair == (0, 1)
    assert j_pair == (6, 7)
    assert len(tail[0]) == 4


def figure_three_clean_instance():
    # one pair class holding three set vertices (7,8,9 keyed by 0,1), two
    # more classes with two each; targets parked on isolated pads
    edges = [(0, 7), (7, 1), (1, 8), (8, 0), (0, 9), (9, 1),
             (2, 10), (10, 3), (3, 11), (11, 2), (4, 12), (12, 5), (5, 13), (13, 6)]
    g = Graph.from_edges(21, edges)
    return Instance(
        graph=g,
        source_set=frozenset(range(7)),
        target_set=frozenset(range(14, 21)),
        k=7,
        graph_class=K3rMinorFree(3),
    )


def test_classify_three_clean():
    inst = figure_three_clean_instance()
    dec = compute_projection(inst)
    clean_set = frozenset(range(7, 14))
    got = classify_clean(inst, dec, clean_set, "source")
    assert got.verdict == "three-clean"
    assert got.activation["host_class"] == (0, 1)
    assert set(got.activation["set_pair"]) <= {7, 8, 9}
    assert got.activation["auxiliary"][0] in {7, 8, 9}


def test_classify_greedy_when_anticomplete():
    g = Graph.from_edges(8, [(4, 5), (5, 6), (6, 7)])
    inst = Instance(graph=g, source_set=frozenset({0, 1}), target_set=frozenset({2, 3}), k=2,
                    graph_class=K3rMinorFree(3))
    dec = compute_projection(inst)
    got = classify_clean(inst, dec, frozenset({4, 6}), "source")
    assert got.verdict == "greedy"


def test_classify_undecided_propagates():
    g = Graph.from_edges(28, [])
    inst = Instance(graph=g, source_set=frozenset(range(13)), target_set=frozenset(range(13)),
                    k=13, graph_class=K3rMinorFree(3))
    dec = compute_projection(inst)
    with pytest.raises(GreedyUndecided):
        classify_clean(inst, dec, frozenset(range(13, 26)), "source")


# ---------------------------------------------------------------------------
# volume fast path, important vertices, color removal, rules
# ---------------------------------------------------------------------------

def _dec_stub(class_map):
    return class_map


def test_volume_threshold():
    side = frozenset({0, 1})
    k = len(side)
    classes = {(0, 5): frozenset(range(10, 16))}  # key 5 outside, size 6 = 2q+2k
    assert sufficient_greedy_by_volume(None, side, frozenset(), classes) is True
    classes = {(0, 5): frozenset(range(10, 15))}  # size 5 = 2q+2k-1
    assert sufficient_greedy_by_volume(None, side, frozenset(), classes) is False
    classes = {(0, 1): frozenset(range(10, 16))}  # q = 0
    assert sufficient_greedy_by_volume(None, side, frozenset(), classes) is False


def test_important_vertices():
    side = frozenset({0, 1, 2})
    classes = {
        (0, 1): frozenset(range(10, 17)),  # size 7
        (1, 2): frozenset(range(20, 26)),  # size 6
    }
    got = important_vertices(classes, side)
    assert got == frozenset({0, 1})  # 2 keys only a size-6 class

    classes = {
        (0, 1): frozenset(range(10, 15)),  # size 5
        (0, 2): frozenset(range(20, 25)),  # size 5
    }
    assert important_vertices(classes, side) == frozenset({0})


def test_color_removal_examples():
    # one important vertex keying two blue classes: one color is dropped
    classes = {(0, 1): frozenset(range(10, 17)), (0, 2): frozenset(range(20, 27))}
    coloring = color_removal(classes, frozenset({0}))
    assert list(coloring.colors.values()).count("blue") == 1

    # a single size-7 class keyed by an important vertex must stay blue
    classes = {(0, 1): frozenset(range(10, 17))}
    coloring = color_removal(classes, frozenset({0, 1}))
    assert coloring.colors == {(0, 1): "blue"}

    # no important vertices: everything is uncolored
    coloring = color_removal(classes, frozenset())
    assert coloring.colors == {}


def test_color_removal_idempotent_fixpoint():
    classes = {
        (0, 1): frozenset(range(10, 17)),
        (0, 2): frozenset(range(20, 25)),
        (1, 2): frozenset(range(30, 35)),
    }
    important = important_vertices(classes, frozenset({0, 1, 2}))
    first = color_removal(classes, important)
    kept = {kp: m for kp, m in classes.items() if kp in first.colors}
    second = color_removal(kept, important)
    assert second.colors == first.colors


def _rules_instance(n, edges, source, target, k):
    return Instance(graph=Graph.from_edges(n, edges), source_set=frozenset(source),
                    target_set=frozenset(target), k=k, graph_class=K3rMinorFree(3))


def test_rules_blue_keeps_seven_plus_clean():
    members = frozenset(range(10, 20))  # size 10
    edges = [(0, v) for v in members] + [(1, v) for v in members]
    inst = _rules_instance(22, edges, {0, 1}, {20, 21}, 2)
    clean_set = frozenset({10, 11})
    coloring = color_removal({(0, 1): members}, frozenset({0, 1}))
    reduced, counts = apply_reduction_rules(inst, {(0, 1): members}, clean_set, coloring)
    assert counts["rule2"] == 1  # 8 non-set members minus 7 kept
    assert reduced.graph.n == 21
    survivors = set(reduced.original_ids)
    assert clean_set <= survivors


def test_rules_uncolored_both_keys_important_keeps_only_clean():
    members = frozenset(range(10, 16))  # size 6, uncolored by hand
    edges = [(0, v) for v in members] + [(1, v) for v in members]
    inst = _rules_instance(18, edges, {0, 1}, {16, 17}, 2)
    clean_set = frozenset({10, 11, 12})
    from tjkernel import ClassColoring

    coloring = ClassColoring(colors={}, important=frozenset({0, 1}))
    reduced, counts = apply_reduction_rules(inst, {(0, 1): members}, clean_set, coloring)
    assert counts["rule1"] == 3
    assert set(reduced.original_ids) == set(range(18)) - {13, 14, 15}


def test_rules_small_class_untouched():
    members = frozenset(range(10, 14))  # size 4
    edges = [(0, v) for v in members] + [(1, v) for v in members]
    inst = _rules_instance(16, edges, {0, 1}, {14, 15}, 2)
    from tjkernel import ClassColoring

    coloring = ClassColoring(colors={}, important=frozenset({0, 1}))
    reduced, counts = apply_reduction_rules(inst, {(0, 1): members}, frozenset(), coloring)
    assert counts["deleted_total"] == 0
    assert reduced.graph.n == 16


# ---------------------------------------------------------------------------
# find_clean_set and the full pipeline
# ---------------------------------------------------------------------------

def cross_keyed_fans(size=6):
    # class (0,2) keyed by one source and one target token; same for (1,3):
    # every class is unlocked for both sides
    edges = []
    n = 4
    members_a = list(range(n, n + size))
    edges += [(0, v) for v in members_a] + [(2, v) for v in members_a]
    n += size
    members_b = list(range(n, n + size))
    edges += [(1, v) for v in members_b] + [(3, v) for v in members_b]
    n += size
    g = Graph.from_edges(n, edges)
    pos = {0: (0.0, 0.0), 2: (0.0, 10.0), 1: (20.0, 0.0), 3: (20.0, 10.0)}
    for i, v in enumerate(members_a):
        pos[v] = (-2.0 - i * 0.1, 5.0)
    for i, v in enumerate(members_b):
        pos[v] = (22.0 + i * 0.1, 5.0)
    rot = rotation_from_coordinates(g, pos)
    assert validate_rotation_system(g, rot).ok
    return Instance(graph=g, source_set=frozenset({0, 1}), target_set=frozenset({2, 3}), k=2,
                    graph_class=Planar(), embedding=rot)


def test_find_clean_set_all_good():
    inst = cross_keyed_fans()
    dec = compute_projection(inst)
    clean_set, info = find_clean_set(inst, dec, inst.embedding)
    assert clean_set is not None
    assert len(clean_set) <= 2 * inst.k
    assert info["routes"] == {"source": "good-classes", "target": "good-classes"}
    assert info["classifications"]["source"].verdict == "greedy"
    assert info["classifications"]["target"].verdict == "greedy"


def test_find_clean_set_two_two():
    inst = gen_two_class_gadget([6, 6], wiring="shared-key", planar=True, seed=0,
                                targets_per_class=2)
    dec = compute_projection(inst)
    clean_set, info = find_clean_set(inst, dec, inst.embedding)
    assert clean_set is not None
    assert info["routes"]["source"] == "two-two"
    assert info["classifications"]["source"].verdict == "two-two-clean"
    act = info["classifications"]["source"].activation
    assert set(act["host_class"]) & set(act["partner_class"])


def test_find_clean_set_three_clean():
    inst = gen_two_class_gadget([8], wiring="independent-fan", planar=True, seed=0,
                                targets_per_class=2)
    dec = compute_projection(inst)
    clean_set, info = find_clean_set(inst, dec, inst.embedding)
    assert clean_set is not None
    assert info["routes"]["source"] == "three-clean"
    assert info["classifications"]["source"].verdict == "three-clean"


def test_pipeline_below_mass_threshold_unchanged():
    inst = gen_two_class_gadget([10], wiring="independent-fan", planar=True, seed=0,
                                targets_per_class=2)
    res = build_kernel_planar(inst)
    assert res.verdict == "reduced"
    assert res.report["route"] == "pair mass below threshold"
    assert res.instance.graph.n == inst.graph.n


def test_pipeline_all_good_is_trivial_yes():
    inst = cross_keyed_fans(size=30)  # mass 60 >= 28k = 56
    res = build_kernel_planar(inst)
    assert res.verdict == "trivial-yes"
    assert res.report["route"] == "clean both sides"
    assert solve_bfs(inst).verdict == "yes"


def test_pipeline_rule2_gadget_reduces_and_agrees():
    inst = gen_two_class_gadget([60], wiring="independent-fan", planar=True, seed=5,
                                targets_per_class=2, extra_free=1)
    res = build_kernel_planar(inst, strict=True)
    assert res.verdict == "reduced"
    assert res.report["route"] == "reduction rules"
    assert res.report["rule2"] > 0
    assert res.instance.graph.n < inst.graph.n
    assert res.instance.graph.n <= res.report["size_bound"]
    assert solve_bfs(inst).verdict == solve_bfs(res.instance).verdict == "yes"


def test_pipeline_requires_embedding():
    inst = gen_two_class_gadget([6], wiring="independent-fan", planar=False, seed=0,
                                targets_per_class=2)
    inst = Instance(graph=inst.graph, source_set=inst.source_set, target_set=inst.target_set,
                    k=inst.k, graph_class=Planar(), embedding=None)
    with pytest.raises(ValueError, match="rotation system"):
        build_kernel_planar(inst)
