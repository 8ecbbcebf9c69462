"""Token-jumping independent-set reconfiguration: linear kernels with an
exact oracle for desk-scale validation."""

from .coloring import ColoringResult, color_graph, degeneracy_order, extract_independent, greedy_color
from .generate import SplitMix64, gen_planar_instance, gen_two_class_gadget
from .graphs import (
    FormatError,
    Graph,
    Instance,
    K3rMinorFree,
    Planar,
    RotationSystem,
    check_k3r_minor_small,
    delete_vertices,
    is_independent,
    parse_instance,
    serialize_instance,
    validate_rotation_system,
)
from .kernel_general import KernelResult, build_kernel_general, check_trivial_yes_c1, theoretical_size_bound
from .kernel_planar import (
    CleanClassification,
    ClassColoring,
    EmbeddingInconsistent,
    GreedyUndecided,
    KernelSizeError,
    anticompleteify,
    apply_reduction_rules,
    build_kernel_planar,
    check_greedy,
    classify_clean,
    color_removal,
    find_clean_set,
    important_vertices,
    sufficient_greedy_by_volume,
)
from .projection import (
    EmbeddingClassViolation,
    ProjectionDecomposition,
    TwoClassRef,
    compute_projection,
    locked_status,
    two_class_structure,
)
from .solver import SolveOutcome, greedy_oracle, solve_bfs, verify_sequence
from .trials import TrialReport, equivalence_trial, run_manifest

__all__ = [name for name in dir() if not name.startswith("_")]
