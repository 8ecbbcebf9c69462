#!/usr/bin/env python3
"""Regenerate the committed trial manifests (deterministic).

Every emitted line is test-built once here, so a committed manifest never
contains an instance the generators cannot produce.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from tjkernel import validate_rotation_system  # noqa: E402
from tjkernel.generate import GenerationError  # noqa: E402
from tjkernel.trials import instance_from_manifest_line  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parent.parent / "manifests"


def check(line: str) -> bool:
    try:
        inst, _, mode, _ = instance_from_manifest_line(line)
    except GenerationError:
        return False
    if inst.embedding is not None:
        assert validate_rotation_system(inst.graph, inst.embedding).ok, line
    return True


def random_block(mode: str, count: int) -> list[str]:
    lines = []
    seed = 0
    while len(lines) < count:
        seed += 1
        n = 14 + (seed * 7) % 11          # 14..24
        k = 2 + seed % 3                  # 2..4
        if k == 4 and n < 18:
            n += 6
        keep = (60 + (seed * 13) % 31) / 100.0  # 0.60..0.90
        line = f"planar name={mode[0]}r{seed} n={n} k={k} keep={keep} seed={seed} mode={mode}"
        if check(line):
            lines.append(line)
    return lines


def main() -> None:
    OUT.mkdir(exist_ok=True)

    general = ["# general-mode equivalence battery (random planar declared r=3 + fan gadgets)"]
    general += random_block("general", 272)
    for seed in range(1, 11):
        general.append(
            f"gadget name=g5a{seed} kind=k3r sizes=22 wiring=independent-fan targets=2 seed={seed} mode=general"
        )
    for seed, (sizes, wiring, targets) in enumerate(
        [
            ("14", "path-fan", "2"),
            ("12", "cycle-fan", "2"),
            ("8,8", "shared-key", "2"),
            ("10", "independent-fan", "2"),
            ("9,5", "independent-fan", "2"),
            ("16", "path-fan", "2"),
            ("11", "cycle-fan", "2"),
            ("6,6", "shared-key", "2"),
            ("18", "independent-fan", "2"),
            ("13", "path-fan", "2"),
        ]
    ):
        general.append(
            f"gadget name=gs{seed} kind=k3r sizes={sizes} wiring={wiring} targets={targets} "
            f"seed={seed} mode=general"
        )
    for seed in range(1, 11):
        general.append(
            f"gadget name=gpad{seed} kind=k3r sizes=20 wiring=independent-fan targets=2 "
            f"kpad=1 seed={seed} mode=general"
        )
    # larger fan pairs that drive the keep-independent-2r branch (n = 42)
    for seed in range(1, 7):
        general.append(
            f"gadget name=g5b{seed} kind=k3r sizes=19,22 wiring=independent-fan targets=2 "
            f"seed={seed} mode=general"
        )
        general.append(
            f"gadget name=g5c{seed} kind=k3r sizes=18,23 wiring=independent-fan targets=2 "
            f"seed={seed} mode=general"
        )

    planar = ["# planar-mode equivalence battery (random + rule/clean-set gadgets)"]
    planar += random_block("planar", 280)
    cleanset = [
        ("cs1", "6,6", "shared-key", "targets=2"),
        ("cs2", "8", "independent-fan", "targets=2"),
        ("cs3", "5,5", "shared-key", "targets=2"),
        ("cs4", "9", "cycle-fan", "targets=2"),
        ("cs5", "7,7", "shared-key", "targets=2"),
        ("cs6", "10", "path-fan", "targets=2"),
        ("cs7", "12", "independent-fan", "targets=2 kpad=1"),
        ("cs8", "6,6", "independent-fan", "targets=2"),
    ]
    for name, sizes, wiring, extra in cleanset:
        planar.append(
            f"gadget name={name} kind=planar sizes={sizes} wiring={wiring} {extra} seed=1 mode=planar"
        )
    for seed in range(1, 7):
        planar.append(
            f"gadget name=rule2y{seed} kind=planar sizes=60 wiring=independent-fan targets=2 "
            f"free=1 seed={seed} mode=planar"
        )
    for seed in range(1, 4):
        planar.append(
            f"gadget name=rule2n{seed} kind=planar sizes=60 wiring=independent-fan targets=2 "
            f"seed={seed} mode=planar"
        )
        planar.append(
            f"gadget name=rule2c{seed} kind=planar sizes=61 wiring=cycle-fan targets=2 "
            f"free=1 seed={seed} mode=planar"
        )
    for free in (1, 0):
        planar.append(
            f"gadget name=rule3f{free} kind=planar sizes=7,76,7 wiring=triangle targets=1 "
            f"free={free} seed=0 mode=planar"
        )
        planar.append(
            f"gadget name=rule1f{free} kind=planar sizes=76,8,8 wiring=triangle targets=1 "
            f"free={free} seed=0 mode=planar"
        )

    for name, lines in (("general.txt", general), ("planar.txt", planar)):
        for line in lines:
            if not line.startswith("#"):
                assert check(line), f"manifest line failed to build: {line}"
        (OUT / name).write_text("\n".join(lines) + "\n")
        print(f"wrote {name}: {sum(1 for l in lines if not l.startswith('#'))} trials")


if __name__ == "__main__":
    main()
