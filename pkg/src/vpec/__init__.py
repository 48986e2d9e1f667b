"""Variable packet-error coding: constructions, adversarial verification
and rate-distortion bounds over small finite fields."""

from .budget import BudgetExceeded, DEFAULT_BUDGET, check_budget, get_budget
from .core import (
    ERASURE,
    INFINITY,
    CodeTable,
    PacketLayout,
    ReconstructionWord,
    VpecCodeSpec,
    ball_intersection_decode,
    erasure_distortion,
    run_adversary,
    verify_lemma1,
    worst_case_distortion,
)
from .gf import FieldSpec, field_build, field_of_order
from .interleave import InterleavedCode, iterative_list_decode
from .lincode import GrsParams, LinearCode, grs_build, is_l_mds, is_list_decodable, search_l_mds

__all__ = [
    "BudgetExceeded",
    "CodeTable",
    "DEFAULT_BUDGET",
    "ERASURE",
    "FieldSpec",
    "GrsParams",
    "INFINITY",
    "InterleavedCode",
    "LinearCode",
    "PacketLayout",
    "ReconstructionWord",
    "VpecCodeSpec",
    "ball_intersection_decode",
    "check_budget",
    "erasure_distortion",
    "field_build",
    "field_of_order",
    "get_budget",
    "grs_build",
    "is_l_mds",
    "is_list_decodable",
    "iterative_list_decode",
    "run_adversary",
    "search_l_mds",
    "verify_lemma1",
    "worst_case_distortion",
]
