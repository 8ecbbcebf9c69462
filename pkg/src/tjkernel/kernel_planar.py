"""Planar kernel pipeline.

Stages: trivial-yes check on the light classes, embedding-guided trimming
that makes pair classes pairwise anticomplete, construction of an
independent set that is clean for both token sides, greedy / weakly-clean
classification, important vertices, a blue/red color-removal fixpoint, and
three reduction rules.  The reduced instance stays within (38 + c) * k
vertices, which is 42k under a supplied proper 4-coloring.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .coloring import color_graph, extract_independent
from .graphs import (
    Graph,
    Instance,
    Planar,
    RotationSystem,
    _bits,
    _mask_of,
    delete_vertices,
    is_independent,
    validate_rotation_system,
)
from .kernel_general import KernelResult, check_trivial_yes_c1
from .projection import ProjectionDecomposition, TwoClassRef, compute_projection, two_class_structure


class EmbeddingInconsistent(Exception):
    """Embedding-guided trimming failed and exhaustive repair is infeasible."""


class GreedyUndecided(Exception):
    """Exact greedy search refused: token count exceeds the backtracking guard."""


class KernelSizeError(AssertionError):
    """Strict mode: reduced instance exceeds the promised size bound."""


# ---------------------------------------------------------------------------
# Embedding-guided anticomplete trimming
# ---------------------------------------------------------------------------

def _restricted_faces(rot: RotationSystem, subset: set[int]):
    """Faces of the sub-embedding induced by ``subset``.

    Returns (face id per directed edge, list of faces as directed edge lists).
    """
    sub_rot = {v: [w for w in rot.rotations[v] if w in subset] for v in subset}
    succ = {
        v: {order[i]: order[(i + 1) % len(order)] for i in range(len(order))}
        for v, order in sub_rot.items()
    }
    face_of: dict[tuple[int, int], int] = {}
    faces: list[list[tuple[int, int]]] = []
    unseen = {(u, v) for u in subset for v in sub_rot[u]}
    while unseen:
        start = min(unseen)
        e = start
        fid = len(faces)
        face: list[tuple[int, int]] = []
        while True:
            face.append(e)
            face_of[e] = fid
            unseen.discard(e)
            u, v = e
            e = (v, succ[v][u])
            if e == start:
                break
        faces.append(face)
    return face_of, faces


def _face_of_reference(g: Graph, rot: RotationSystem, subset: set[int], face_of, ref: int):
    """Face of the sub-embedding on ``subset`` that contains ``ref``.

    Walks from ``ref`` outside the subset until a vertex with a subset
    neighbor is found, then reads off the angular corner it sits in.  None
    when ``ref``'s component never touches the subset (no contact possible).
    """
    if ref in subset:
        raise ValueError("reference vertex lies inside the subset")
    seen = {ref}
    queue = deque([ref])
    while queue:
        u = queue.popleft()
        for s in g.adjacency[u]:
            if s not in subset:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
                continue
            order = rot.rotations[s]
            i = order.index(u)
            d = len(order)
            for step in range(1, d + 1):
                b = order[(i - step) % d]
                if b in subset:
                    return face_of[(b, s)]
    return None


def _pairwise_anticomplete(g: Graph, sets: Sequence[frozenset[int]]) -> bool:
    masks = [_mask_of(s) for s in sets]
    nbr = [g.neighborhood_mask(s) for s in sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if nbr[i] & masks[j]:
                return False
    return True


def _conflict_members(g: Graph, members: frozenset[int], others_mask: int) -> list[int]:
    return [v for v in sorted(members) if g.adj_mask[v] & others_mask]


def _anticomplete_fallback(g: Graph, classes: Sequence[TwoClassRef], protect_last: bool):
    """Exhaustive at-most-2-deletions-per-class repair for up to 6 classes."""
    if len(classes) > 6:
        raise EmbeddingInconsistent(
            f"trim verification failed and exhaustive repair is capped at 6 classes ({len(classes)} given)"
        )
    candidates: list[list[frozenset[int]]] = []
    for idx, cls in enumerate(classes):
        if protect_last and idx == len(classes) - 1:
            candidates.append([frozenset()])
            continue
        others = 0
        for jdx, other in enumerate(classes):
            if jdx != idx:
                others |= _mask_of(other.members)
        touchy = _conflict_members(g, cls.members, others)
        opts = [frozenset()]
        opts += [frozenset([v]) for v in touchy]
        opts += [frozenset(pair) for pair in combinations(touchy, 2)]
        candidates.append(opts)

    kept: list[frozenset[int]] = []

    def compatible(new: frozenset[int]) -> bool:
        new_mask = _mask_of(new)
        new_nbr = g.neighborhood_mask(new)
        for old in kept:
            if new_nbr & _mask_of(old) or g.neighborhood_mask(old) & new_mask:
                return False
        return True

    def search(idx: int) -> dict | None:
        if idx == len(classes):
            return {cls.key_pair: kept[i] for i, cls in enumerate(classes)}
        for removal in candidates[idx]:
            trial = frozenset(classes[idx].members - removal)
            kept.append(trial)
            if compatible(trial):
                found = search(idx + 1)
                if found is not None:
                    return found
            kept.pop()
        return None

    found = search(0)
    if found is None:
        raise EmbeddingInconsistent("no at-most-2-deletions-per-class trim exists")
    return found


def anticompleteify(
    g: Graph,
    rot: RotationSystem,
    classes: Sequence[TwoClassRef],
    protect_last: bool = True,
) -> dict[tuple[int, int], frozenset[int]]:
    """Trim each pair class by at most two members so that the trimmed
    classes are pairwise anticomplete (verified, with exhaustive fallback).

    The trimmed members are the ones bounding the face of the class's own
    sub-embedding that contains a reference key of another class; everything
    reaching a class from that side enters through those two members.
    """
    if len(classes) <= 1:
        return {cls.key_pair: frozenset(cls.members) for cls in classes}
    trimmed: dict[tuple[int, int], frozenset[int]] = {}
    last = len(classes) - 1
    member_masks = [_mask_of(cls.members) for cls in classes]
    for idx, cls in enumerate(classes):
        others = 0
        for jdx in range(len(classes)):
            if jdx != idx:
                others |= member_masks[jdx]
        if (protect_last and idx == last) or not g.neighborhood_mask(cls.members) & others:
            trimmed[cls.key_pair] = frozenset(cls.members)
            continue
        other = classes[0] if idx == last else classes[last]
        refs = [x for x in other.key_pair if x not in cls.key_pair]
        subset = set(cls.members) | set(cls.key_pair)
        face_of, faces = _restricted_faces(rot, subset)
        boundary: set[int] = set()
        for ref in refs:
            fid = _face_of_reference(g, rot, subset, face_of, ref)
            if fid is not None:
                boundary = {u for e in faces[fid] for u in e if u in cls.members}
                break
        trimmed[cls.key_pair] = frozenset(cls.members - boundary)

    order = [cls.key_pair for cls in classes]
    if _pairwise_anticomplete(g, [trimmed[kp] for kp in order]):
        return trimmed
    return _anticomplete_fallback(g, classes, protect_last)


def anticompleteify_with_outside(
    g: Graph,
    rot: RotationSystem,
    cls_a: TwoClassRef,
    cls_b: TwoClassRef,
    outside: frozenset[int] | set[int],
):
    """Trim two pair classes by at most two members each so that both become
    anticomplete to the connected set ``outside`` and to each other."""
    outside = frozenset(outside)
    ref = min(outside)
    trimmed: list[frozenset[int]] = []
    for cls in (cls_a, cls_b):
        subset = set(cls.members) | set(cls.key_pair)
        face_of, faces = _restricted_faces(rot, subset)
        fid = _face_of_reference(g, rot, subset, face_of, ref)
        boundary: set[int] = set()
        if fid is not None:
            boundary = {u for e in faces[fid] for u in e if u in cls.members}
        trimmed.append(frozenset(cls.members - boundary))
    if _pairwise_anticomplete(g, [trimmed[0], trimmed[1], outside]):
        return trimmed[0], trimmed[1]
    # exhaustive repair over the two classes only
    out_mask = _mask_of(outside)
    opts = []
    for cls in (cls_a, cls_b):
        other = cls_b if cls is cls_a else cls_a
        touchy = _conflict_members(g, cls.members, out_mask | _mask_of(other.members))
        opts.append(
            [frozenset()]
            + [frozenset([v]) for v in touchy]
            + [frozenset(p) for p in combinations(touchy, 2)]
        )
    for rm_a in opts[0]:
        for rm_b in opts[1]:
            ka, kb = frozenset(cls_a.members - rm_a), frozenset(cls_b.members - rm_b)
            if _pairwise_anticomplete(g, [ka, kb, outside]):
                return ka, kb
    raise EmbeddingInconsistent("no at-most-2-deletions trim separates the classes from the outside set")


def trim_outside_set(
    g: Graph,
    outside: frozenset[int] | set[int],
    members_a: frozenset[int] | set[int],
    members_b: frozenset[int] | set[int],
) -> frozenset[int]:
    """Drop the at most four vertices of ``outside`` with edges into two
    (already mutually anticomplete) pair classes; the rest survives."""
    target = _mask_of(members_a) | _mask_of(members_b)
    doomed = {v for v in outside if g.adj_mask[v] & target}
    if len(doomed) > 4:
        raise EmbeddingInconsistent(
            f"outside set touches the classes at {len(doomed)} vertices (expected at most 4)"
        )
    return frozenset(outside) - doomed


# ---------------------------------------------------------------------------
# Greedy and weakly-greedy detection
# ---------------------------------------------------------------------------

def check_greedy(
    g: Graph,
    tokens: Iterable[int],
    targets: Iterable[int],
    guard: int = 12,
):
    """Exact backtracking search for a greedy ordering.

    Finds orderings i_1..i_k of ``tokens`` and j_1..j_k over ``targets``
    (which may be larger) such that every prefix swap keeps independence;
    returns (token_order, target_order) or None.  Vertices in both sets are
    matched to themselves.  Raises GreedyUndecided above the guard.
    """
    tokens = frozenset(tokens)
    targets = frozenset(targets)
    if len(tokens) > guard:
        raise GreedyUndecided(f"{len(tokens)} tokens exceed the exact-search guard {guard}")
    shared = sorted(tokens & targets)
    a = sorted(tokens - targets)
    b = sorted(targets - tokens)
    if len(a) > len(b):
        return None
    adj = g.adj_mask
    a_bits = {v: 1 << v for v in a}
    failed: set[tuple[int, int]] = set()
    order_i: list[int] = []
    order_j: list[int] = []

    def dfs(rem_a: int, rem_b: int) -> bool:
        if rem_a == 0:
            return True
        if (rem_a, rem_b) in failed:
            return False
        for i in _bits(rem_a):
            rest = rem_a ^ a_bits[i]
            for j in _bits(rem_b):
                if adj[j] & rest:
                    continue
                order_i.append(i)
                order_j.append(j)
                if dfs(rest, rem_b ^ (1 << j)):
                    return True
                order_i.pop()
                order_j.pop()
        failed.add((rem_a, rem_b))
        return False

    if not dfs(_mask_of(a), _mask_of(b)):
        return None
    return tuple(shared + order_i), tuple(shared + order_j)


def weakly_greedy_witnesses(
    g: Graph,
    tokens: frozenset[int],
    targets: frozenset[int],
    guard: int = 12,
):
    """Yield activation witnesses in canonical order: pairs (i1,i2) of tokens
    and (j1,j2) of targets whose swap is independent and leaves the rest
    greedy.  Each witness is (token_pair, target_pair, tail orders)."""
    tok = sorted(tokens)
    tgt = sorted(targets)
    for i_pair in combinations(tok, 2):
        rest_tokens = tokens - set(i_pair)
        for j_pair in combinations(tgt, 2):
            mixed = rest_tokens | set(j_pair)
            if len(mixed) != len(tokens) or not is_independent(g, mixed):
                continue
            tail = check_greedy(g, rest_tokens, targets - set(j_pair), guard)
            if tail is not None:
                yield i_pair, j_pair, tail


@dataclass(frozen=True)
class CleanClassification:
    verdict: str  # "greedy" | "three-clean" | "two-two-clean" | "not-clean"
    token_order: tuple[int, ...] | None = None
    set_order: tuple[int, ...] | None = None
    activation: dict = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return self.verdict in ("greedy", "three-clean", "two-two-clean")


def classify_clean(
    inst: Instance,
    dec: ProjectionDecomposition,
    clean_set: frozenset[int],
    side: str,
    class_members: Mapping[tuple[int, int], frozenset[int]] | None = None,
    guard: int = 12,
) -> CleanClassification:
    """Classify ``clean_set`` against one token side.

    Greedy when an exact ordering exists; otherwise activation pairs are
    searched and the hosting-class conditions decide three-clean (one class
    holding three set vertices including the activation pair) versus
    two-two-clean (two classes sharing a key, two set vertices each, the
    activation pair being exactly one class's share).
    """
    if side not in ("source", "target"):
        raise ValueError("side must be 'source' or 'target'")
    tokens = inst.source_set if side == "source" else inst.target_set
    g = inst.graph
    if class_members is None:
        class_members = {c.key_pair: c.members for c in dec.two_classes()}
    member_class: dict[int, tuple[int, int]] = {}
    for kp, members in class_members.items():
        for v in members:
            member_class[v] = kp

    direct = check_greedy(g, tokens, clean_set, guard)
    if direct is not None:
        return CleanClassification(verdict="greedy", token_order=direct[0], set_order=direct[1])

    fallback: CleanClassification | None = None
    for i_pair, j_pair, tail in weakly_greedy_witnesses(g, tokens, clean_set, guard):
        host = member_class.get(j_pair[0])
        if host is None or member_class.get(j_pair[1]) != host:
            continue
        host_share = class_members[host] & clean_set
        token_order = i_pair + tail[0]
        set_order = j_pair + tail[1]
        if len(host_share) >= 3:
            aux = min(host_share - set(j_pair))
            return CleanClassification(
                verdict="three-clean",
                token_order=token_order,
                set_order=set_order,
                activation={
                    "token_pair": i_pair,
                    "set_pair": j_pair,
                    "host_class": host,
                    "auxiliary": (aux,),
                },
            )
        if fallback is None and host_share == set(j_pair):
            for x in host:
                for kp, members in sorted(class_members.items()):
                    if kp == host or x not in kp:
                        continue
                    partner_share = members & clean_set
                    if len(partner_share) >= 2:
                        aux_token = kp[0] if kp[1] == x else kp[1]
                        fallback = CleanClassification(
                            verdict="two-two-clean",
                            token_order=token_order,
                            set_order=set_order,
                            activation={
                                "token_pair": i_pair,
                                "set_pair": j_pair,
                                "host_class": host,
                                "partner_class": kp,
                                "auxiliary": tuple(sorted(partner_share)[:2]),
                                "auxiliary_token": aux_token,
                            },
                        )
                        break
                if fallback is not None:
                    break
    if fallback is not None:
        return fallback
    return CleanClassification(verdict="not-clean")


def sufficient_greedy_by_volume(
    dec: ProjectionDecomposition,
    side_tokens: frozenset[int],
    clean_set: frozenset[int],
    class_members: Mapping[tuple[int, int], frozenset[int]] | None = None,
) -> bool:
    """Volume fast path: with q pair classes keyed at least once outside the
    side's tokens, total size >= 2q + 2k already forces the side greedy."""
    if class_members is None:
        class_members = {c.key_pair: c.members for c in dec.two_classes()}
    k = len(side_tokens)
    q = 0
    volume = 0
    for kp, members in class_members.items():
        if not members:
            continue
        if kp[0] not in side_tokens or kp[1] not in side_tokens:
            q += 1
            volume += len(members)
    return q >= 1 and volume >= 2 * q + 2 * k


# ---------------------------------------------------------------------------
# Important vertices, color removal, reduction rules
# ---------------------------------------------------------------------------

def important_vertices(
    class_members: Mapping[tuple[int, int], frozenset[int]],
    side_tokens: frozenset[int],
) -> frozenset[int]:
    """Tokens keying (a) a class of size >= 7 or (b) two classes of size >= 5,
    measured over the classes whose key pairs both carry side tokens."""
    sizes: dict[int, list[int]] = {}
    for kp, members in class_members.items():
        if kp[0] in side_tokens and kp[1] in side_tokens and members:
            for x in kp:
                sizes.setdefault(x, []).append(len(members))
    important = set()
    for x, ss in sizes.items():
        if max(ss) >= 7 or sum(1 for s in ss if s >= 5) >= 2:
            important.add(x)
    return frozenset(important)


@dataclass(frozen=True)
class ClassColoring:
    colors: dict[tuple[int, int], str]  # surviving colors only
    important: frozenset[int]


def color_removal(
    class_members: Mapping[tuple[int, int], frozenset[int]],
    important: frozenset[int],
) -> ClassColoring:
    """Greatest fixpoint of color removal.

    Start from blue (size >= 7) and red (size 5 or 6), then repeatedly
    uncolor any class, in canonical order, whose removal keeps every
    important vertex on at least one blue or two red classes.
    """
    colors: dict[tuple[int, int], str] = {}
    for kp, members in sorted(class_members.items()):
        if len(members) >= 7:
            colors[kp] = "blue"
        elif len(members) >= 5:
            colors[kp] = "red"

    def covered(x: int, removed: tuple[int, int] | None) -> bool:
        blues = reds = 0
        for kp, col in colors.items():
            if kp == removed or x not in kp:
                continue
            if col == "blue":
                blues += 1
            else:
                reds += 1
        return blues >= 1 or reds >= 2

    changed = True
    while changed:
        changed = False
        for kp in sorted(colors):
            if all(covered(x, kp) for x in important):
                del colors[kp]
                changed = True

    for x in important:
        assert covered(x, None), f"important vertex {x} uncovered at fixpoint"
    for kp, col in colors.items():
        if col != "red":
            continue
        side_ok = False
        for x in kp:
            blues = sum(1 for o, c in colors.items() if x in o and c == "blue")
            reds = sum(1 for o, c in colors.items() if x in o and c == "red")
            if blues == 0 and reds == 2:
                side_ok = True
        assert side_ok, f"red class {kp} lacks a key with exactly two reds and no blue"
    return ClassColoring(colors=colors, important=important)


def apply_reduction_rules(
    inst: Instance,
    class_members: Mapping[tuple[int, int], frozenset[int]],
    clean_set: frozenset[int],
    coloring: ClassColoring,
    also_delete: frozenset[int] = frozenset(),
):
    """Apply the three reduction rules and emit the reduced instance.

    Rule 1 empties uncolored classes (size >= 5, both keys important) down to
    their clean-set vertices; rule 2 keeps at most 7 non-set members of each
    blue class; rule 3 keeps at most 5 of each red class.  Survivors are the
    lowest ids.  Classes of size at most 4 are untouched.
    """
    doomed: set[int] = set(also_delete)
    counts = {"rule1": 0, "rule2": 0, "rule3": 0, "rule1_classes": 0, "rule2_classes": 0, "rule3_classes": 0}
    for kp, members in sorted(class_members.items()):
        color = coloring.colors.get(kp)
        non_set = sorted(members - clean_set)
        if color == "blue":
            cut = non_set[7:]
            counts["rule2"] += len(cut)
            counts["rule2_classes"] += 1
            doomed.update(cut)
        elif color == "red":
            cut = non_set[5:]
            counts["rule3"] += len(cut)
            counts["rule3_classes"] += 1
            doomed.update(cut)
        elif len(members) >= 5 and kp[0] in coloring.important and kp[1] in coloring.important:
            counts["rule1"] += len(non_set)
            counts["rule1_classes"] += 1
            doomed.update(non_set)
    assert not doomed & clean_set and not doomed & (inst.source_set | inst.target_set)
    reduced = delete_vertices(inst, doomed)
    counts["deleted_total"] = len(doomed)
    return reduced, counts


# ---------------------------------------------------------------------------
# Clean-set construction
# ---------------------------------------------------------------------------

def find_clean_set(inst: Instance, dec: ProjectionDecomposition, rot: RotationSystem):
    """Independent set of pair-class vertices that is clean for both sides.

    Trims all pair classes to be pairwise anticomplete, pools per-class
    maximum independent subsets, then builds one clean subset per side: out
    of unlocked classes when they carry enough vertices, otherwise out of
    locked classes sharing a key (two-two shape) or one class holding three
    pooled vertices (three-clean shape).  Returns (set or None, info dict).
    """
    g = inst.graph
    classes = dec.two_classes()
    info: dict = {"log": []}
    trimmed = anticompleteify(g, rot, classes, protect_last=True)
    info["trimmed"] = trimmed
    info["trim_deleted"] = frozenset(
        v for cls in classes for v in cls.members - trimmed[cls.key_pair]
    )

    pool: set[int] = set()
    for cls in classes:
        kept = trimmed[cls.key_pair]
        if kept:
            pool |= two_class_structure(g, kept).max_independent_subset
    assert is_independent(g, pool), "pooled per-class subsets are not independent"
    info["pool"] = frozenset(pool)

    def side_subset(
        side_tokens: frozenset[int], prefer: frozenset[int]
    ) -> tuple[frozenset[int] | None, str]:
        k = inst.k
        per_class = [
            (cls.key_pair, sorted(trimmed[cls.key_pair] & pool)) for cls in classes
        ]
        good = [
            v
            for kp, vs in per_class
            for v in vs
            if kp[0] not in side_tokens or kp[1] not in side_tokens
        ]
        if len(good) >= k:
            # any k of them work; favor the other side's picks to keep the
            # union small, then lowest ids
            ranked = sorted(good, key=lambda v: (v not in prefer, v))
            return frozenset(ranked[:k]), "good-classes"
        bad = [
            (kp, vs)
            for kp, vs in per_class
            if kp[0] in side_tokens and kp[1] in side_tokens and vs
        ]
        multi = [(kp, vs) for kp, vs in bad if len(vs) >= 2]
        if 2 * len(multi) > k:
            share = None
            for (kp1, vs1), (kp2, vs2) in combinations(multi, 2):
                if set(kp1) & set(kp2):
                    share = ((kp1, vs1), (kp2, vs2))
                    break
            if share is not None:
                (kp1, vs1), (kp2, vs2) = share
                chosen = list(vs1[:2]) + list(vs2[:2])
                for kp, vs in multi:
                    if kp in (kp1, kp2) or len(chosen) >= k:
                        continue
                    chosen.extend(vs[: k - len(chosen)])
                return frozenset(chosen), "two-two"
        host = next(((kp, vs) for kp, vs in bad if len(vs) >= 3), None)
        if host is not None:
            kp_host, vs_host = host
            chosen = list(vs_host[: max(3, k)])
            for kp, vs in multi:
                if kp == kp_host or len(chosen) >= k:
                    continue
                chosen.extend(vs[: k - len(chosen)])
            for kp, vs in bad:
                if len(chosen) >= k:
                    break
                if len(vs) == 1 and vs[0] not in chosen:
                    chosen.extend(vs)
            if len(chosen) >= k:
                return frozenset(chosen), "three-clean"
            return None, "exhausted (locked classes too thin)"
        return None, "exhausted (no hosting class)"

    picked: dict[str, frozenset[int]] = {}
    prefer: frozenset[int] = frozenset()
    for side, toks in (("source", inst.source_set), ("target", inst.target_set)):
        subset, route = side_subset(toks, prefer)
        info["log"].append(f"{side}: {route}")
        info.setdefault("routes", {})[side] = route
        if subset is None:
            return None, info
        picked[side] = subset
        prefer = subset

    clean_set = frozenset(picked["source"] | picked["target"])
    if len(clean_set) > 2 * inst.k:
        info["log"].append(f"union of side sets too large ({len(clean_set)} > 2k)")
        return None, info
    assert is_independent(g, clean_set)
    info["side_sets"] = picked

    classifications = {}
    for side in ("source", "target"):
        try:
            cls = classify_clean(inst, dec, clean_set, side, class_members=trimmed)
        except GreedyUndecided:
            info["log"].append(f"{side}: classification undecided")
            return None, info
        classifications[side] = cls
        if not cls.clean:
            info["log"].append(f"{side}: final gate failed ({cls.verdict})")
            return None, info
    info["classifications"] = classifications
    return clean_set, info


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def build_kernel_planar(
    inst: Instance,
    strict: bool = False,
    external_coloring: Mapping[int, int] | None = None,
) -> KernelResult:
    """End-to-end planar kernel.

    Returns trivial-yes (with a certificate on the light-class route), the
    untouched instance when the pair-class mass is below 28k, or the reduced
    instance after trimming and reduction rules.  Strict mode asserts the
    (38 + c) * k size bound on reduced outputs.
    """
    if not isinstance(inst.graph_class, Planar):
        raise ValueError("planar kernel requires a planar-declared instance")
    if inst.embedding is None:
        raise ValueError("planar kernel requires a rotation system")
    rep = validate_rotation_system(inst.graph, inst.embedding)
    if not rep.ok:
        raise ValueError(f"invalid rotation system: {rep.message}")

    dec = compute_projection(inst)
    if external_coloring is not None:
        c = len(set(external_coloring.values()))
    else:
        c = color_graph(inst.graph).color_count
    k = inst.k
    bound = (38 + c) * k
    report: dict = {
        "mode": "planar",
        "c": c,
        "k": k,
        "n2": dec.pair_class_count,
        "n3": dec.heavy_class_count,
        "pair_mass": len(dec.pair_vertices),
        "mass_threshold": 28 * k,
        "light_threshold": c * k,
        "size_bound": bound,
        "strict": strict,
        "flags": [],
    }

    certificate = check_trivial_yes_c1(inst, dec)
    if certificate is None and external_coloring is not None:
        # The supplied coloring's largest class inside the light vertices can
        # beat the recomputed one; use it when it reaches k.
        classes: dict[int, list[int]] = {}
        for v in dec.light_vertices:
            classes.setdefault(external_coloring[v], []).append(v)
        best = max(classes.values(), key=len, default=[])
        if len(best) >= k:
            middle = frozenset(sorted(best)[:k])
            from .kernel_general import _route_tokens_to_middle
            from .solver import verify_sequence

            fwd = _route_tokens_to_middle(inst, inst.source_set, middle)
            bwd = _route_tokens_to_middle(inst, inst.target_set, middle)
            certificate = tuple(fwd) + tuple((w, v) for v, w in reversed(bwd))
            assert verify_sequence(inst, certificate).ok
    if certificate is not None:
        report["route"] = "light-class certificate"
        return KernelResult(verdict="trivial-yes", certificate=certificate, report=report)

    if len(dec.pair_vertices) < 28 * k:
        report["route"] = "pair mass below threshold"
        report["final_n"] = inst.graph.n
        return KernelResult(verdict="reduced", instance=inst, report=report)

    clean_set, info = find_clean_set(inst, dec, inst.embedding)
    report["clean_set_log"] = info["log"]
    if clean_set is None:
        report["route"] = "no clean set"
        report["flags"].append("non-tight")
        report["final_n"] = inst.graph.n
        return KernelResult(verdict="reduced", instance=inst, report=report)
    trimmed = info["trimmed"]
    report["clean_set"] = sorted(clean_set)

    passes: dict[str, bool] = {}
    clean_verdicts: dict[str, str] = {}
    for side, toks in (("source", inst.source_set), ("target", inst.target_set)):
        cls = info["classifications"][side]
        clean_verdicts[side] = cls.verdict
        volume = sufficient_greedy_by_volume(dec, toks, clean_set, trimmed)
        covered = _mask_of(toks) | inst.graph.neighborhood_mask(toks)
        roomy = inst.graph.n - bin(covered).count("1") >= 3
        passes[side] = volume or cls.verdict == "greedy" or (cls.clean and roomy)
        report[f"{side}_volume"] = volume
        report[f"{side}_roomy"] = roomy
    report["clean_verdicts"] = clean_verdicts

    if passes["source"] and passes["target"]:
        report["route"] = "clean both sides"
        return KernelResult(verdict="trivial-yes", certificate=None, report=report)

    role = "source" if not passes["source"] else "target"
    role_tokens = inst.source_set if role == "source" else inst.target_set
    report["role"] = role

    both_key = {
        kp: members
        for kp, members in trimmed.items()
        if kp[0] in role_tokens and kp[1] in role_tokens and members
    }
    report["class_sizes"] = {
        str(kp): {"original": len(dec.classes[kp]), "trimmed": len(trimmed[kp])}
        for kp in trimmed
    }
    important = important_vertices(both_key, role_tokens)
    coloring = color_removal(both_key, important)
    report["important"] = sorted(important)
    report["color_fixpoint"] = {str(kp): col for kp, col in sorted(coloring.colors.items())}

    reduced, counts = apply_reduction_rules(
        inst, both_key, clean_set, coloring, also_delete=info["trim_deleted"]
    )
    report.update(counts)
    report["route"] = "reduction rules"
    report["final_n"] = reduced.graph.n
    if strict and reduced.graph.n > bound:
        raise KernelSizeError(
            f"reduced instance has {reduced.graph.n} vertices, above the bound {bound}"
        )
    return KernelResult(verdict="reduced", instance=reduced, report=report)
