"""Command line interface.

Subcommands: stats, solve, verify, kernelize, gen, trial.
"""

from __future__ import annotations

import argparse
import json
import sys

from .coloring import color_graph, load_coloring
from .generate import gen_planar_instance, gen_two_class_gadget
from .graphs import parse_instance, serialize_instance, validate_rotation_system
from .kernel_general import build_kernel_general, theoretical_size_bound
from .kernel_planar import build_kernel_planar
from .projection import compute_projection
from .solver import solve_bfs, verify_sequence
from .trials import run_manifest


def _load(path: str):
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def cmd_stats(args) -> int:
    inst = _load(args.instance)
    dec = compute_projection(inst)
    g = inst.graph
    x = len(dec.key_set)
    print(f"n {g.n}")
    print(f"m {g.edge_count}")
    print(f"k {inst.k}")
    print(f"|X| {x}")
    print(f"|<=1-key| {len(dec.light_vertices)}")
    print(f"|2-key| {len(dec.pair_vertices)}")
    print(f"|>=3-key| {len(dec.heavy_vertices)}")
    print(f"n2 {dec.pair_class_count} (bound 3|X| = {3 * x}, margin {3 * x - dec.pair_class_count})")
    print(f"n3 {dec.heavy_class_count} (bound 2|X| = {2 * x}, margin {2 * x - dec.heavy_class_count})")
    hist: dict[int, int] = {}
    for members in dec.classes.values():
        hist[len(members)] = hist.get(len(members), 0) + 1
    for size in sorted(hist):
        print(f"class-size {size} x{hist[size]}")
    if inst.embedding is not None:
        rep = validate_rotation_system(g, inst.embedding)
        print(f"embedding {'valid' if rep.ok else 'INVALID'} faces {rep.face_count}")
    return 0


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    outcome = solve_bfs(inst, max_states=args.limit_states, max_millis=args.limit_ms)
    print(f"verdict {outcome.verdict}")
    if outcome.verdict == "yes":
        print(f"length {outcome.length}")
        for v, w in outcome.sequence:
            print(f"j {v + 1} {w + 1}")
    print(f"states {outcome.states_explored}", file=sys.stderr)
    return 0 if outcome.decided else 2


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    jumps = []
    with open(args.sequence) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("c") or line.startswith("verdict") or line.startswith("length"):
                continue
            parts = line.split()
            if parts[0] != "j" or len(parts) != 3:
                print(f"line {ln}: malformed jump line", file=sys.stderr)
                return 2
            jumps.append((int(parts[1]) - 1, int(parts[2]) - 1))
    report = verify_sequence(inst, jumps)
    if report.ok:
        print("valid")
        return 0
    print(f"invalid at step {report.failed_step}: {report.reason}")
    return 1


def cmd_kernelize(args) -> int:
    inst = _load(args.instance)
    if args.mode == "general":
        result = build_kernel_general(inst, r=args.r)
    else:
        coloring = None
        if args.coloring:
            with open(args.coloring) as fh:
                coloring = load_coloring(fh.read(), inst.graph)
        result = build_kernel_planar(inst, strict=args.strict, external_coloring=coloring)

    lines = [json.dumps({"record": "summary", **{k: v for k, v in result.report.items() if k != "actions"}})]
    for action in result.report.get("actions", []):
        lines.append(json.dumps({"record": "class-action", **action}))
    report_text = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report_text)
    else:
        sys.stderr.write(report_text)

    if result.trivial_yes:
        print("trivial-yes")
        if result.certificate:
            for v, w in result.certificate:
                print(f"j {v + 1} {w + 1}")
        return 0
    text = serialize_instance(result.instance)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    if args.generator == "planar":
        inst = gen_planar_instance(n=args.n, k=args.k, edge_keep_prob=args.keep, seed=args.seed)
    else:
        inst = gen_two_class_gadget(
            class_sizes=[int(s) for s in args.sizes.split(",")],
            wiring=args.wiring,
            k_pad=args.kpad,
            planar=not args.k3r,
            r=args.r,
            seed=args.seed,
            targets_per_class=args.targets,
            extra_free=args.free,
        )
    text = serialize_instance(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_trial(args) -> int:
    with open(args.manifest) as fh:
        reports = run_manifest(fh.read())
    out = sys.stdout if not args.out else open(args.out, "w")
    try:
        for rep in reports:
            out.write(rep.to_json() + "\n")
    finally:
        if args.out:
            out.close()
    bad = [r for r in reports if not r.agreement and not r.inconclusive]
    inconclusive = sum(1 for r in reports if r.inconclusive)
    print(
        f"trials {len(reports)} agreed {len(reports) - len(bad) - inconclusive} "
        f"disagreed {len(bad)} inconclusive {inconclusive}",
        file=sys.stderr,
    )
    return 1 if bad else 0


def cmd_bound(args) -> int:
    print(theoretical_size_bound(args.r, args.k, args.planar))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tjkernel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="projection statistics for an instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("solve", help="exact BFS reconfiguration decision")
    p.add_argument("instance")
    p.add_argument("--limit-states", type=int, default=5_000_000)
    p.add_argument("--limit-ms", type=int, default=60_000)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="replay a jump sequence")
    p.add_argument("instance")
    p.add_argument("sequence")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kernelize", help="produce an equivalent bounded instance")
    p.add_argument("instance")
    p.add_argument("--mode", choices=("general", "planar"), required=True)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--coloring")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("gen", help="generate an instance")
    gsub = p.add_subparsers(dest="generator", required=True)
    gp = gsub.add_parser("planar")
    gp.add_argument("--n", type=int, required=True)
    gp.add_argument("--k", type=int, required=True)
    gp.add_argument("--keep", type=float, default=0.8)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--out")
    gp.set_defaults(func=cmd_gen)
    gg = gsub.add_parser("gadget")
    gg.add_argument("--sizes", required=True)
    gg.add_argument("--wiring", default="independent-fan")
    gg.add_argument("--kpad", type=int, default=0)
    gg.add_argument("--k3r", action="store_true")
    gg.add_argument("--r", type=int, default=3)
    gg.add_argument("--seed", type=int, default=0)
    gg.add_argument("--targets", type=int, default=1)
    gg.add_argument("--free", type=int, default=0)
    gg.add_argument("--out")
    gg.set_defaults(func=cmd_gen)

    p = sub.add_parser("trial", help="run a manifest of equivalence trials")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("bound", help="theoretical kernel size bound")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--planar", action="store_true")
    p.set_defaults(func=cmd_bound)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
