import pytest

from tjkernel import (
    check_k3r_minor_small,
    gen_planar_instance,
    gen_two_class_gadget,
    is_independent,
    serialize_instance,
    validate_rotation_system,
)
from tjkernel.generate import GenerationError, SplitMix64


def test_splitmix64_reference_vector():
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_splitmix64_shuffle_deterministic():
    a = list(range(10))
    SplitMix64(42).shuffle(a)
    b = list(range(10))
    SplitMix64(42).shuffle(b)
    assert a == b
    assert sorted(a) == list(range(10))


def test_gen_planar_base_k4():
    inst = gen_planar_instance(n=4, k=1, edge_keep_prob=1.0, seed=0)
    assert inst.graph.edge_count == 6
    rep = validate_rotation_system(inst.graph, inst.embedding)
    assert rep.ok and rep.face_count == 4


def test_gen_planar_deterministic():
    a = gen_planar_instance(n=24, k=3, edge_keep_prob=0.7, seed=9)
    b = gen_planar_instance(n=24, k=3, edge_keep_prob=0.7, seed=9)
    assert serialize_instance(a) == serialize_instance(b)
    c = gen_planar_instance(n=24, k=3, edge_keep_prob=0.7, seed=10)
    assert serialize_instance(a) != serialize_instance(c)


@pytest.mark.parametrize("seed", range(8))
def test_gen_planar_validity(seed):
    inst = gen_planar_instance(n=20 + seed, k=3, edge_keep_prob=0.6 + 0.05 * (seed % 4), seed=seed)
    assert validate_rotation_system(inst.graph, inst.embedding).ok
    assert is_independent(inst.graph, inst.source_set)
    assert is_independent(inst.graph, inst.target_set)
    assert len(inst.source_set) == len(inst.target_set) == 3


def test_gen_planar_k_too_large():
    with pytest.raises(GenerationError):
        gen_planar_instance(n=4, k=4, edge_keep_prob=1.0, seed=0)


@pytest.mark.parametrize("wiring", ["independent-fan", "path-fan", "cycle-fan", "shared-key"])
def test_gadget_embeddings_valid(wiring):
    inst = gen_two_class_gadget([7, 5], wiring=wiring, k_pad=1, planar=True, seed=3,
                                targets_per_class=2)
    assert validate_rotation_system(inst.graph, inst.embedding).ok


def test_gadget_deterministic():
    a = gen_two_class_gadget([9, 4], wiring="path-fan", planar=True, seed=5, targets_per_class=2)
    b = gen_two_class_gadget([9, 4], wiring="path-fan", planar=True, seed=5, targets_per_class=2)
    assert serialize_instance(a) == serialize_instance(b)


def test_small_gadgets_are_k33_minor_free():
    for wiring in ("independent-fan", "path-fan", "shared-key"):
        inst = gen_two_class_gadget([4], wiring=wiring, planar=False, r=3, seed=0,
                                    targets_per_class=2, extra_free=2)
        if inst.graph.n <= 12:
            assert check_k3r_minor_small(inst.graph, 3) is False


def test_gadget_target_seating_error():
    with pytest.raises(GenerationError):
        gen_two_class_gadget([5], wiring="independent-fan", planar=True, seed=0,
                             targets_per_class=1)
