"""Kernel for instances declared K_{3,r}-minor-free.

Either the light classes alone certify a yes-instance, or vertices are
deleted from big pair classes so that the surviving pair-class mass is
bounded by c * (n2 * (4r - 1) + k), with c the computed proper-coloring
color count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coloring import ColoringResult, color_graph, extract_independent
from .graphs import Instance, K3rMinorFree, Planar, delete_vertices
from .projection import ProjectionDecomposition, compute_projection
from .solver import verify_sequence


@dataclass
class KernelResult:
    verdict: str  # "trivial-yes" | "reduced"
    instance: Instance | None = None
    certificate: tuple[tuple[int, int], ...] | None = None
    report: dict = field(default_factory=dict)

    @property
    def trivial_yes(self) -> bool:
        return self.verdict == "trivial-yes"


def _route_tokens_to_middle(inst: Instance, side: frozenset[int], middle: frozenset[int]):
    """Jump sequence moving one side's tokens onto the middle set.

    Tokens with a middle neighbor move onto one first (each middle vertex has
    at most one key neighbor, so those moves never collide); the remaining
    tokens then take the free middle vertices in id order.
    """
    g = inst.graph
    jumps: list[tuple[int, int]] = []
    occupied: set[int] = set()
    deferred: list[int] = []
    for v in sorted(side):
        targets = [w for w in g.adjacency[v] if w in middle and w not in occupied]
        if targets:
            w = min(targets)
            jumps.append((v, w))
            occupied.add(w)
        else:
            deferred.append(v)
    free = sorted(middle - occupied)
    for v, w in zip(deferred, free):
        jumps.append((v, w))
    return jumps


def check_trivial_yes_c1(
    inst: Instance, dec: ProjectionDecomposition, col: ColoringResult | None = None
):
    """Certificate that both token sets reach a common independent set inside
    the light classes, or None when no size-k independent subset is found.

    The pigeonhole guarantee fires whenever the light classes hold at least
    c * k vertices.
    """
    middle = extract_independent(inst.graph, dec.light_vertices, inst.k)
    if middle is None:
        return None
    forward = _route_tokens_to_middle(inst, inst.source_set, middle)
    backward = _route_tokens_to_middle(inst, inst.target_set, middle)
    certificate = tuple(forward) + tuple((w, v) for v, w in reversed(backward))
    report = verify_sequence(inst, certificate)
    assert report.ok, f"trivial-yes certificate failed verification: {report.reason}"
    return certificate


def build_kernel_general(inst: Instance, r: int) -> KernelResult:
    """Shrink big pair classes, keeping an equivalent instance.

    Steps, with c the computed color count: return the instance untouched when
    the pair-class mass is at most c*(n2*(3r-2)+k); otherwise pick a helpful
    independent set I of size n2*(3r-2)+k inside the pair classes, then for
    every big class (size >= c*(2r-1)+1) either keep exactly its I-vertices
    (when it holds at least 3r-1 of them) or keep a 2r-vertex independent
    subset and drop its I-vertices from I.
    """
    if isinstance(inst.graph_class, K3rMinorFree) and inst.graph_class.r != r:
        raise ValueError(f"instance declares r={inst.graph_class.r}, got r={r}")
    if isinstance(inst.graph_class, Planar) and r != 3:
        raise ValueError("planar instances must be kernelized with r=3")

    dec = compute_projection(inst)
    col = color_graph(inst.graph)
    c, k = col.color_count, inst.k
    n2 = dec.pair_class_count
    report: dict = {
        "mode": "general",
        "r": r,
        "c": c,
        "k": k,
        "n2": n2,
        "n3": dec.heavy_class_count,
        "pair_mass": len(dec.pair_vertices),
        "threshold_construction": c * (n2 * (3 * r - 2) + k),
        "threshold_restated": c * (n2 * (4 * r - 1) + k),
        "big_cutoff": c * (2 * r - 1) + 1,
        "actions": [],
    }

    certificate = check_trivial_yes_c1(inst, dec, col)
    if certificate is not None:
        report["route"] = "light-class certificate"
        return KernelResult(verdict="trivial-yes", certificate=certificate, report=report)

    if len(dec.pair_vertices) <= report["threshold_construction"]:
        report["route"] = "pair mass below construction threshold"
        report["final_n"] = inst.graph.n
        report["pair_mass_after"] = len(dec.pair_vertices)
        return KernelResult(verdict="reduced", instance=inst, report=report)

    helpful_size = n2 * (3 * r - 2) + k
    helpful = extract_independent(inst.graph, dec.pair_vertices, helpful_size)
    assert helpful is not None, "helpful-set extraction failed above its pigeonhole threshold"
    helpful = set(helpful)

    big_cutoff = report["big_cutoff"]
    doomed: set[int] = set()
    for ref in dec.two_classes():
        members = ref.members
        entry = {"class": list(ref.key_pair), "size": len(members)}
        if len(members) < big_cutoff:
            entry["action"] = "small-untouched"
        else:
            inside = members & helpful
            if len(inside) >= 3 * r - 1:
                entry["action"] = "keep-helpful"
                doomed |= members - inside
                entry["kept"] = len(inside)
            else:
                kept = extract_independent(inst.graph, members, 2 * r)
                assert kept is not None, "big class lacks an independent subset of size 2r"
                entry["action"] = "keep-independent-2r"
                entry["kept"] = len(kept)
                doomed |= members - kept
                helpful -= inside
        report["actions"].append(entry)

    reduced = delete_vertices(inst, doomed)
    after = compute_projection(reduced)
    report["route"] = "construction"
    report["deleted"] = len(doomed)
    report["final_n"] = reduced.graph.n
    report["pair_mass_after"] = len(after.pair_vertices)
    return KernelResult(verdict="reduced", instance=reduced, report=report)


def theoretical_size_bound(r: int, k: int, planar: bool) -> int:
    """Closed-form kernel size bound, exact integer arithmetic.

    Planar instances: 42k.  Otherwise the general bound: tokens, light
    classes, heavy classes via the neighborhood-complexity estimate, and the
    reduced pair-class mass.
    """
    if r < 1 or k < 1:
        raise ValueError("r and k must be >= 1")
    if planar:
        return 42 * k
    chi = max(r, 6300) + 3
    n2_bound = 2 ** (5 * r + 13) * (r + 3) ** (2 * r + 5) * k
    light = chi * k
    heavy = (r - 1) * n2_bound
    pairs = chi * (n2_bound * (4 * r - 1) + k)
    return 2 * k + light + heavy + pairs
