"""Ideal refined Deutsch-Jozsa runs on the 8-dimensional qubit register."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .boolean import TruthTable, is_balanced, is_constant, oracle_matrix
from .synth import Cp, GateOp, SigmaZ, TwoTargetCp, circuit_matrix, hadamard_all

N_QUBITS = 3
DIM = 1 << N_QUBITS


class PromiseError(ValueError):
    """The function is neither constant nor balanced."""


class Decision(enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"


@dataclass(frozen=True)
class MeasurementDistribution:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.probabilities)
        if p.shape != (DIM,) or np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError("probabilities must be 8 values in [0, 1]")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {p.sum()!r}")

    @property
    def p000(self) -> float:
        return self.probabilities[0]

    def sample(self, shots: int, seed: int | None = None) -> dict[str, int]:
        """Draw measurement counts; keys are bit strings ``x1x2x3``."""
        rng = np.random.default_rng(seed)
        p = np.clip(np.asarray(self.probabilities), 0.0, None)
        counts = rng.multinomial(shots, p / p.sum())
        return {format(i, "03b"): int(c) for i, c in enumerate(counts) if c}


def dj_final_state(f: TruthTable) -> np.ndarray:
    if f.n != N_QUBITS:
        raise ValueError(f"the engine runs on {N_QUBITS} qubits, got n={f.n}")
    if not (is_constant(f) or is_balanced(f)):
        raise PromiseError("function is neither constant nor balanced")
    h = hadamard_all()
    psi = np.zeros(DIM, dtype=complex)
    psi[0] = 1.0
    psi = h @ psi
    psi = np.array(oracle_matrix(f).diagonal) * psi
    return h @ psi


def run_dj(f: TruthTable) -> MeasurementDistribution:
    psi = dj_final_state(f)
    return MeasurementDistribution(tuple(float(v) for v in np.abs(psi) ** 2))


def dj_decision(d: MeasurementDistribution, threshold: float = 0.5) -> Decision:
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return Decision.CONSTANT if d.p000 > threshold else Decision.BALANCED


class JointOp(enum.Enum):
    """``H⊗3 · U_f · H⊗3`` for the three oracles simulated physically.

    ``gates`` is the oracle decomposition in written order.
    """

    U1 = (Cp(1, 2), SigmaZ(1), SigmaZ(2), SigmaZ(3))
    U2 = (TwoTargetCp(2, 1, 3), SigmaZ(1), SigmaZ(2))
    U3 = (TwoTargetCp(1, 2, 3), Cp(2, 3), SigmaZ(1), SigmaZ(2))

    @property
    def gates(self) -> tuple[GateOp, ...]:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "JointOp":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown joint operation {name!r}; expected U1, U2 or U3") from None


def joint_op_matrix(op: JointOp) -> np.ndarray:
    h = hadamard_all()
    return h @ circuit_matrix(op.gates) @ h


def ideal_joint_output(op: JointOp) -> np.ndarray:
    """Output ket of ``op`` applied to ``|000⟩``, computed by matrix products."""
    psi = np.zeros(DIM, dtype=complex)
    psi[0] = 1.0
    return joint_op_matrix(op) @ psi


# Closed-form outputs, amplitude 1/2 on each listed basis label.
_REFERENCE_OUTPUTS = {
    JointOp.U1: {"001": -1, "011": 1, "101": 1, "111": 1},
    JointOp.U2: {"001": -1, "011": 1, "100": 1, "110": 1},
    JointOp.U3: {"001": -1, "010": 1, "100": 1, "111": 1},
}


def reference_joint_output(op: JointOp) -> np.ndarray:
    psi = np.zeros(DIM, dtype=complex)
    for label, sign in _REFERENCE_OUTPUTS[op].items():
        psi[int(label, 2)] = 0.5 * sign
    return psi
