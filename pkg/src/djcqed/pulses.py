"""Lowering of CP and two-target CP gates to resonant qutrit-cavity segments.

A controlled phase ``C_jk`` is three resonant intervals: the control's
``|0⟩↔|1⟩`` transition swaps its excitation into the cavity (``π/2g01``), the
target's ``|1⟩↔|2⟩`` transition makes a full cycle with the photon and picks
up a sign (``π/g12``), and the control takes the photon back (``3π/2g01``).
The two-target gate inserts a second target cycle before the return.
Single-qubit layers are instantaneous unitaries on the qutrits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .circuit import JointOp
from .linalg import kron_all
from .params import CouplingParams
from .synth import Cp, GateOp, SigmaZ, TwoTargetCp

N_QUTRITS = 3
QUTRIT_DIM = 3

H_QUTRIT = np.array([[1, 1, 0], [1, -1, 0], [0, 0, math.sqrt(2)]], dtype=complex) / math.sqrt(2)
SZ_QUTRIT = np.diag([1, -1, 1]).astype(complex)
ID_QUTRIT = np.eye(QUTRIT_DIM, dtype=complex)


class Transition(enum.Enum):
    G01 = "G01"
    E12 = "E12"


@dataclass(frozen=True)
class PulseSegment:
    """One resonant interval; every other qutrit is detuned from the cavity."""

    active_qutrit: int
    transition: Transition
    duration: float
    label: str = ""

    def __post_init__(self):
        if self.active_qutrit not in range(1, N_QUTRITS + 1):
            raise ValueError(f"qutrit index {self.active_qutrit} outside 1..{N_QUTRITS}")
        if not self.duration > 0:
            raise ValueError("segment duration must be positive")

    def to_dict(self) -> dict:
        return {
            "kind": "segment",
            "qutrit": self.active_qutrit,
            "transition": self.transition.value,
            "duration_ns": self.duration * 1e9,
            "label": self.label,
        }


@dataclass(frozen=True, eq=False)
class InstantaneousLayer:
    """Zero-duration, noiseless unitary on the 27-dim three-qutrit space."""

    unitary: np.ndarray
    label: str

    def to_dict(self) -> dict:
        return {"kind": "layer", "qutrit": None, "transition": None,
                "duration_ns": 0.0, "label": self.label}


ScheduleItem = Union[PulseSegment, InstantaneousLayer]


@dataclass(frozen=True)
class Schedule:
    items: tuple[ScheduleItem, ...]
    source: str = ""

    @property
    def segments(self) -> list[PulseSegment]:
        return [it for it in self.items if isinstance(it, PulseSegment)]

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)

    def __add__(self, other: "Schedule") -> "Schedule":
        return Schedule(self.items + other.items, self.source)

    def to_dicts(self) -> list[dict]:
        return [it.to_dict() for it in self.items]


def _check_couplings(g01: float, g12: float) -> None:
    if not (g01 > 0 and g12 > 0):
        raise ValueError("couplings g01 and g12 must be positive")


def compile_cp(j: int, k: int, g01: float, g12: float) -> Schedule:
    if j == k:
        raise ValueError("control and target must differ")
    _check_couplings(g01, g12)
    name = f"C_{j}{k}"
    return Schedule((
        PulseSegment(j, Transition.G01, math.pi / (2 * g01), f"{name} step (i)"),
        PulseSegment(k, Transition.E12, math.pi / g12, f"{name} step (ii)"),
        PulseSegment(j, Transition.G01, 3 * math.pi / (2 * g01), f"{name} step (iii)"),
    ), name)


def compile_two_target(j: int, k: int, l: int, g01: float, g12: float) -> Schedule:
    if len({j, k, l}) != 3:
        raise ValueError("control and both targets must be distinct")
    _check_couplings(g01, g12)
    name = f"T_{j}{k}{l}"
    return Schedule((
        PulseSegment(j, Transition.G01, math.pi / (2 * g01), f"{name} step (i)"),
        PulseSegment(k, Transition.E12, math.pi / g12, f"{name} step (ii)"),
        PulseSegment(l, Transition.E12, math.pi / g12, f"{name} step (iii)"),
        PulseSegment(j, Transition.G01, 3 * math.pi / (2 * g01), f"{name} step (iv)"),
    ), name)


def qutrit_layer(local_ops: dict[int, np.ndarray], label: str) -> InstantaneousLayer:
    factors = [local_ops.get(q, ID_QUTRIT) for q in range(1, N_QUTRITS + 1)]
    return InstantaneousLayer(kron_all(*factors), label)


def hadamard_layer() -> InstantaneousLayer:
    return qutrit_layer({q: H_QUTRIT for q in range(1, N_QUTRITS + 1)}, "H x3")


def sigma_z_layer(qubits) -> InstantaneousLayer:
    qubits = sorted(qubits)
    return qutrit_layer({q: SZ_QUTRIT for q in qubits},
                        "sz layer {" + ",".join(map(str, qubits)) + "}")


def compile_gate(g: GateOp, params: CouplingParams) -> Schedule:
    if isinstance(g, Cp):
        return compile_cp(g.control, g.target, params.g01, params.g12)
    if isinstance(g, TwoTargetCp):
        return compile_two_target(g.control, g.target1, g.target2, params.g01, params.g12)
    raise TypeError(f"{g} has no pulse lowering")


def compile_joint_op(op: JointOp, params: CouplingParams) -> Schedule:
    """``H⊗3``, the σz layer, entangling blocks (rightmost first), ``H⊗3``."""
    zs = [g.qubit for g in op.gates if isinstance(g, SigmaZ)]
    entangling = [g for g in op.gates if isinstance(g, (Cp, TwoTargetCp))]
    items: list[ScheduleItem] = [hadamard_layer(), sigma_z_layer(zs)]
    for g in reversed(entangling):
        items.extend(compile_gate(g, params).items)
    items.append(hadamard_layer())
    return Schedule(tuple(items), op.name)
