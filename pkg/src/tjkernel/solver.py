"""Exact reconfiguration oracle: BFS over the space of size-k independent sets.

States are bitmasks of token positions.  A jump removes one token and places
it on any free vertex whose neighborhood avoids the other tokens.  BFS layers
give shortest sequences; parent links reconstruct them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import permutations

from .graphs import Graph, Instance, _bits, _mask_of

DEFAULT_MAX_STATES = 5_000_000
DEFAULT_MAX_MILLIS = 60_000


@dataclass(frozen=True)
class SolveOutcome:
    verdict: str  # "yes" | "no" | "resource-limit"
    sequence: tuple[tuple[int, int], ...] = ()
    length: int = 0
    states_explored: int = 0

    @property
    def decided(self) -> bool:
        return self.verdict in ("yes", "no")


def solve_bfs(
    inst: Instance,
    max_states: int = DEFAULT_MAX_STATES,
    max_millis: int = DEFAULT_MAX_MILLIS,
) -> SolveOutcome:
    g = inst.graph
    adj = g.adj_mask
    n = g.n
    start = inst.source_mask()
    goal = inst.target_mask()
    if start == goal:
        return SolveOutcome(verdict="yes", sequence=(), length=0, states_explored=1)

    parent: dict[int, tuple[int, tuple[int, int]] | None] = {start: None}
    frontier = [start]
    explored = 0
    deadline = time.monotonic() + max_millis / 1000.0

    while frontier:
        next_frontier: list[int] = []
        for state in frontier:
            explored += 1
            if explored % 1024 == 0 and time.monotonic() > deadline:
                return SolveOutcome(verdict="resource-limit", states_explored=explored)
            if explored > max_states:
                return SolveOutcome(verdict="resource-limit", states_explored=explored)
            for v in _bits(state):
                rest = state ^ (1 << v)
                for w in range(n):
                    wbit = 1 << w
                    if state & wbit or adj[w] & rest:
                        continue
                    new = rest | wbit
                    if new in parent:
                        continue
                    parent[new] = (state, (v, w))
                    if new == goal:
                        seq: list[tuple[int, int]] = []
                        cur = new
                        while parent[cur] is not None:
                            prev, jump = parent[cur]  # type: ignore[misc]
                            seq.append(jump)
                            cur = prev
                        seq.reverse()
                        return SolveOutcome(
                            verdict="yes",
                            sequence=tuple(seq),
                            length=len(seq),
                            states_explored=explored,
                        )
                    next_frontier.append(new)
        frontier = next_frontier
    return SolveOutcome(verdict="no", states_explored=explored)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_sequence(inst: Instance, sequence) -> VerifyReport:
    """Replay a jump sequence from the source tokens.

    Valid iff every jump moves an existing token to a token-free vertex, every
    intermediate set is independent, and the final set equals the targets.
    """
    g = inst.graph
    state = inst.source_mask()
    for i, (v, w) in enumerate(sequence):
        if not (0 <= v < g.n and 0 <= w < g.n):
            return VerifyReport(False, i, f"jump ({v},{w}) out of range")
        vbit, wbit = 1 << v, 1 << w
        if not state & vbit:
            return VerifyReport(False, i, f"no token on vertex {v}")
        if state & wbit:
            return VerifyReport(False, i, f"vertex {w} already carries a token")
        rest = state ^ vbit
        if g.adj_mask[w] & rest:
            return VerifyReport(False, i, f"placing on {w} breaks independence")
        state = rest | wbit
    if state != inst.target_mask():
        return VerifyReport(False, len(tuple(sequence)), "final set differs from targets")
    return VerifyReport(True)


def greedy_oracle(g: Graph, a: frozenset[int] | set[int], b: frozenset[int] | set[int]) -> bool:
    """Ground-truth greedy check by enumerating every ordering pair.

    True iff some orderings i_1..i_k of ``a`` and j_1..j_k of ``b`` keep each
    mixed prefix set {j_1..j_t, i_{t+1}..i_k} a size-k independent set.
    """
    a, b = sorted(a), sorted(b)
    if len(a) != len(b):
        raise ValueError("greedy oracle requires equal-size sets")
    if len(a) > 6:
        raise ValueError("greedy oracle capped at size 6")
    k = len(a)
    if k == 0:
        return True
    adj = g.adj_mask
    for i_order in permutations(a):
        for j_order in permutations(b):
            ok = True
            for t in range(1, k + 1):
                mixed = set(j_order[:t]) | set(i_order[t:])
                if len(mixed) != k:
                    ok = False
                    break
                m = _mask_of(mixed)
                if any(adj[v] & m for v in mixed):
                    ok = False
                    break
            if ok:
                return True
    return False
