"""Refined Deutsch-Jozsa on three transmon qutrits coupled to one cavity."""

from .boolean import TruthTable, anf_of, canonical_balanced_set, is_balanced, oracle_matrix
from .circuit import JointOp, dj_decision, ideal_joint_output, run_dj
from .params import CouplingParams, NoiseParams
from .synth import brute_force_synthesize, classify_all, synthesize

__all__ = [
    "CouplingParams",
    "JointOp",
    "NoiseParams",
    "TruthTable",
    "anf_of",
    "brute_force_synthesize",
    "canonical_balanced_set",
    "classify_all",
    "dj_decision",
    "ideal_joint_output",
    "is_balanced",
    "oracle_matrix",
    "run_dj",
    "synthesize",
]
