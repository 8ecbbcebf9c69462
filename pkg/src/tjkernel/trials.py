"""End-to-end equivalence trials: kernelize, solve both instances, compare.

Trials are manifest-driven.  A manifest is a line-oriented text file; each
non-comment line describes one instance by generator parameters:

    planar name=p1 n=24 k=3 keep=0.7 seed=42 mode=planar
    gadget name=g1 kind=planar sizes=7,5 wiring=shared-key kpad=1 \
           targets=2 free=0 seed=3 mode=general r=3

Reports are JSON-serializable dicts, merged in manifest order.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .generate import gen_planar_instance, gen_two_class_gadget
from .graphs import Instance, K3rMinorFree, Planar
from .kernel_general import KernelResult, build_kernel_general
from .kernel_planar import build_kernel_planar
from .solver import DEFAULT_MAX_MILLIS, DEFAULT_MAX_STATES, solve_bfs, verify_sequence


@dataclass
class TrialReport:
    name: str
    mode: str
    params: dict
    kernel_verdict: str = ""
    original_verdict: str = ""
    kernel_instance_verdict: str = ""
    n_before: int = 0
    n_after: int = 0
    size_bound: int = 0
    agreement: bool = False
    inconclusive: bool = False
    detail: str = ""
    kernel_report: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def equivalence_trial(
    inst: Instance,
    mode: str,
    name: str = "",
    params: dict | None = None,
    r: int = 3,
    max_states: int = DEFAULT_MAX_STATES,
    max_millis: int = DEFAULT_MAX_MILLIS,
    strict: bool = True,
) -> TrialReport:
    """Run one kernel/oracle comparison.  Never raises on disagreement; the
    report carries the outcome for the caller to assert on."""
    rep = TrialReport(name=name, mode=mode, params=params or {}, n_before=inst.graph.n)
    if mode == "planar":
        result: KernelResult = build_kernel_planar(inst, strict=strict)
    elif mode == "general":
        result = build_kernel_general(inst, r=r)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep.kernel_verdict = result.verdict
    rep.kernel_report = result.report
    rep.size_bound = result.report.get("size_bound", 0)

    original = solve_bfs(inst, max_states=max_states, max_millis=max_millis)
    rep.original_verdict = original.verdict
    if not original.decided:
        rep.inconclusive = True
        rep.detail = "original solve hit resource limits"
        return rep

    if result.trivial_yes:
        rep.n_after = inst.graph.n
        cert_ok = True
        if result.certificate is not None:
            cert_ok = bool(verify_sequence(inst, result.certificate))
        rep.agreement = original.verdict == "yes" and cert_ok
        if not rep.agreement:
            rep.detail = "kernel claimed yes" + ("" if cert_ok else " (certificate invalid)")
        return rep

    assert result.instance is not None
    rep.n_after = result.instance.graph.n
    reduced = solve_bfs(result.instance, max_states=max_states, max_millis=max_millis)
    rep.kernel_instance_verdict = reduced.verdict
    if not reduced.decided:
        rep.inconclusive = True
        rep.detail = "kernel solve hit resource limits"
        return rep
    rep.agreement = original.verdict == reduced.verdict
    if not rep.agreement:
        rep.detail = f"original={original.verdict} kernel={reduced.verdict}"
    return rep


def _parse_kv(parts: list[str]) -> dict[str, str]:
    out = {}
    for p in parts:
        if "=" not in p:
            raise ValueError(f"malformed manifest token {p!r}")
        key, val = p.split("=", 1)
        out[key] = val
    return out


def instance_from_manifest_line(line: str) -> tuple[Instance, str, str, dict]:
    """Build (instance, name, mode, params) from one manifest line."""
    parts = line.split()
    kind, kv = parts[0], _parse_kv(parts[1:])
    name = kv.get("name", "")
    mode = kv.get("mode", "planar")
    if kind == "planar":
        inst = gen_planar_instance(
            n=int(kv["n"]), k=int(kv["k"]), edge_keep_prob=float(kv["keep"]), seed=int(kv["seed"])
        )
        if mode == "general":
            # random planar instances double as r=3 declarations
            inst = Instance(
                graph=inst.graph,
                source_set=inst.source_set,
                target_set=inst.target_set,
                k=inst.k,
                graph_class=K3rMinorFree(3),
                embedding=None,
            )
    elif kind == "gadget":
        planar_kind = kv.get("kind", "planar") == "planar"
        inst = gen_two_class_gadget(
            class_sizes=[int(s) for s in kv["sizes"].split(",")],
            wiring=kv.get("wiring", "independent-fan"),
            k_pad=int(kv.get("kpad", "0")),
            planar=planar_kind,
            r=int(kv.get("r", "3")),
            seed=int(kv.get("seed", "0")),
            targets_per_class=int(kv.get("targets", "1")),
            extra_free=int(kv.get("free", "0")),
        )
    else:
        raise ValueError(f"unknown manifest generator {kind!r}")
    return inst, name, mode, kv


def run_manifest(
    text: str,
    max_states: int = DEFAULT_MAX_STATES,
    max_millis: int = DEFAULT_MAX_MILLIS,
) -> list[TrialReport]:
    reports = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        inst, name, mode, kv = instance_from_manifest_line(line)
        reports.append(
            equivalence_trial(
                inst,
                mode,
                name=name,
                params=kv,
                r=int(kv.get("r", "3")),
                max_states=max_states,
                max_millis=max_millis,
            )
        )
    return reports
