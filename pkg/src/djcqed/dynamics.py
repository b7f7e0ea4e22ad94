"""Open-system dynamics of three qutrits sharing one cavity mode.

Each resonant segment evolves under

    dρ/dt = -i[H(t), ρ] + κ L[a]
            + Σ_j (γ21 L[|1⟩⟨2|_j] + γ20 L[|0⟩⟨2|_j] + γ10 L[|0⟩⟨1|_j])
            + Σ_j (γφ2 D[|2⟩⟨2|_j] + γφ1 D[|1⟩⟨1|_j])

with ``L[Λ]ρ = ΛρΛ† - {Λ†Λ, ρ}/2``.  ``H(t)`` holds the resonant coupling of
the active qutrit plus its detuned neighbouring transition, whose phase
``e^{-iδt}`` restarts at zero in every segment.  Integration is fixed-step
RK4, so reruns are bit-identical.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .circuit import JointOp, ideal_joint_output
from .linalg import (
    apply_unitary,
    dagger,
    density_diagnostics,
    embed,
    ket_to_dm,
    product_state,
    state_fidelity,
)
from .params import CouplingParams, NoiseParams
from .pulses import InstantaneousLayer, PulseSegment, Schedule, Transition, compile_joint_op

log = logging.getLogger(__name__)

QUTRIT_DIM = 3
MAX_PHASE_PER_STEP = 0.05  # rad
CUTOFF_POPULATION_LIMIT = 1e-6


class NumericalError(RuntimeError):
    pass


@dataclass(frozen=True)
class Space:
    """``n_qutrits`` qutrits followed by a cavity truncated at ``photon_cutoff``."""

    n_qutrits: int = 3
    photon_cutoff: int = 3

    def __post_init__(self):
        if self.n_qutrits < 1:
            raise ValueError("need at least one qutrit")
        if self.photon_cutoff < 1:
            raise ValueError("photon_cutoff must be >= 1")

    @property
    def cavity_dim(self) -> int:
        return self.photon_cutoff + 1

    @property
    def dims(self) -> tuple[int, ...]:
        return (QUTRIT_DIM,) * self.n_qutrits + (self.cavity_dim,)

    @property
    def dim(self) -> int:
        return QUTRIT_DIM ** self.n_qutrits * self.cavity_dim

    @classmethod
    def for_dim(cls, dim: int, n_qutrits: int = 3) -> "Space":
        cav, rem = divmod(dim, QUTRIT_DIM ** n_qutrits)
        if rem or cav < 2:
            raise ValueError(f"dimension {dim} does not fit {n_qutrits} qutrits and a cavity")
        return cls(n_qutrits, cav - 1)

    @cached_property
    def a(self) -> np.ndarray:
        n = self.cavity_dim
        local = np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)
        return embed(local, self.n_qutrits, self.dims)

    def transition(self, qutrit: int, lower: int, upper: int) -> np.ndarray:
        """``|lower⟩⟨upper|`` on ``qutrit`` (1-based)."""
        local = np.zeros((QUTRIT_DIM, QUTRIT_DIM), dtype=complex)
        local[lower, upper] = 1.0
        return embed(local, qutrit - 1, self.dims)

    def projector(self, qutrit: int, level: int) -> np.ndarray:
        return self.transition(qutrit, level, level)

    @cached_property
    def levels(self) -> np.ndarray:
        """``levels[i, s]`` is the level of subsystem ``s`` in basis state ``i``."""
        return np.array(list(np.ndindex(*self.dims)))

    @cached_property
    def excitation_number(self) -> np.ndarray:
        """Diagonal of ``a†a + Σ_j (|1⟩⟨1|_j + 2|2⟩⟨2|_j)``."""
        return self.levels.sum(axis=1).astype(float)

    def ket(self, qutrit_levels, photons: int = 0) -> np.ndarray:
        return product_state(tuple(qutrit_levels) + (photons,), self.dims)

    def embed_qubit_ket(self, psi) -> np.ndarray:
        """Map a ``2**n`` qubit-register ket into the qutrit space with the cavity empty."""
        psi = np.asarray(psi, dtype=complex)
        n = self.n_qutrits
        out = np.zeros(self.dim, dtype=complex)
        for i, amp in enumerate(psi):
            if amp:
                bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
                out += amp * self.ket(bits, 0)
        return out

    def qubit_subspace_indices(self) -> list[int]:
        """Full-space indices of ``|x1..xn⟩|0⟩_c`` in qubit-register order."""
        n = self.n_qutrits
        return [int(np.flatnonzero(self.ket([(i >> (n - 1 - k)) & 1 for k in range(n)]))[0])
                for i in range(1 << n)]

    def top_fock_population(self, rho) -> float:
        diag = np.real(np.diagonal(rho)).reshape(self.dims)
        return float(diag[..., -1].sum())

    def lift_layer(self, layer: InstantaneousLayer) -> np.ndarray:
        return np.kron(layer.unitary, np.eye(self.cavity_dim, dtype=complex))


# --- Hamiltonians ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SegmentHamiltonian:
    """``H(t) = static + e^{-iδt} offres + h.c.`` for one segment."""

    static: np.ndarray
    offres: np.ndarray
    delta: float

    def at(self, t: float) -> np.ndarray:
        if not self.offres.any():
            return self.static
        phase = np.exp(-1j * self.delta * t)
        v = phase * self.offres
        return self.static + v + dagger(v)


def segment_hamiltonian(seg: PulseSegment, p: CouplingParams,
                        space: Optional[Space] = None) -> SegmentHamiltonian:
    space = space or Space()
    j = seg.active_qutrit
    adag = dagger(space.a)
    s01 = space.transition(j, 0, 1)
    s12 = space.transition(j, 1, 2)
    if seg.transition is Transition.G01:
        res = p.g01 * adag @ s01
        off, delta = p.g12_spurious * adag @ s12, p.delta12
    else:
        res = p.g12 * adag @ s12
        off, delta = p.g01_spurious * adag @ s01, p.delta01
    return SegmentHamiltonian(res + dagger(res), off, delta)


def build_segment_hamiltonian(seg: PulseSegment, t: float, p: CouplingParams,
                              space: Optional[Space] = None) -> np.ndarray:
    if not 0.0 <= t <= seg.duration * (1 + 1e-12):
        raise ValueError(f"t={t} outside segment [0, {seg.duration}]")
    return segment_hamiltonian(seg, p, space).at(t)


# --- dissipator ------------------------------------------------------------

class Dissipator:
    """All non-Hamiltonian terms for a given space and set of rates.

    Every jump operator is a single matrix unit or the ladder ``a``, so
    ``ΛρΛ†`` is a block copy on a tensor view of ρ and ``Λ†Λ`` is diagonal.
    """

    def __init__(self, space: Space, noise: NoiseParams):
        self.space = space
        self.noise = noise
        lv = space.levels
        nq = space.n_qutrits
        decay = noise.kappa * lv[:, nq].astype(float)
        dephase = np.zeros((space.dim, space.dim))
        self.relaxations = []
        for q in range(nq):
            lq = lv[:, q]
            for upper, lower, rate in ((2, 1, noise.gamma21), (2, 0, noise.gamma20),
                                       (1, 0, noise.gamma10)):
                if rate:
                    self.relaxations.append((q, upper, lower, rate))
                    decay += rate * (lq == upper)
            for level, rate in ((2, noise.gamma_phi2), (1, noise.gamma_phi1)):
                if rate:
                    d = (lq == level).astype(float)
                    dephase += rate * np.outer(d, d)
                    decay += rate * d
        self.elementwise = dephase - 0.5 * (decay[:, None] + decay[None, :])
        s = np.sqrt(np.arange(1, space.cavity_dim, dtype=float))
        self.cavity_factor = noise.kappa * np.outer(s, s).reshape(
            (space.photon_cutoff,) + (1,) * nq + (space.photon_cutoff,))
        self.is_zero = noise.is_zero

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = self.elementwise * rho
        if self.is_zero:
            return out
        sp = self.space
        nq = sp.n_qutrits
        r = rho.reshape(sp.dims + sp.dims)
        o = out.reshape(sp.dims + sp.dims)
        full = [slice(None)] * (2 * nq + 2)
        for q, upper, lower, rate in self.relaxations:
            src, dst = list(full), list(full)
            src[q] = src[nq + 1 + q] = upper
            dst[q] = dst[nq + 1 + q] = lower
            o[tuple(dst)] += rate * r[tuple(src)]
        if self.noise.kappa:
            src, dst = list(full), list(full)
            src[nq] = src[2 * nq + 1] = slice(1, None)
            dst[nq] = dst[2 * nq + 1] = slice(None, -1)
            o[tuple(dst)] += self.cavity_factor * r[tuple(src)]
        return out


@lru_cache(maxsize=32)
def _dissipator(space: Space, noise: NoiseParams) -> Dissipator:
    return Dissipator(space, noise)


def lindblad_rhs(rho, h, noise: NoiseParams, space: Optional[Space] = None) -> np.ndarray:
    """``dρ/dt`` for Hamiltonian ``h`` and the decay/dephasing rates in ``noise``."""
    rho = np.asarray(rho, dtype=complex)
    h = np.asarray(h, dtype=complex)
    space = space or Space.for_dim(rho.shape[0])
    if rho.shape != (space.dim, space.dim) or h.shape != rho.shape:
        raise ValueError(f"shape mismatch: rho {rho.shape}, h {h.shape}, space dim {space.dim}")
    return -1j * (h @ rho - rho @ h) + _dissipator(space, noise)(rho)


# --- integration -----------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    """``dt=None`` picks the largest step with ``dt * max frequency <= 0.05 rad``."""

    photon_cutoff: int = 3
    dt: Optional[float] = None

    def __post_init__(self):
        if self.photon_cutoff < 3:
            raise ValueError("photon_cutoff must be at least 3")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")

    def step_for(self, p: CouplingParams) -> float:
        w = p.max_angular_frequency
        if self.dt is None:
            return MAX_PHASE_PER_STEP / w
        if self.dt * w > MAX_PHASE_PER_STEP * (1 + 1e-9):
            raise ValueError(f"dt={self.dt:.3e} s exceeds {MAX_PHASE_PER_STEP} rad per step "
                             f"at max frequency {w:.3e} rad/s")
        return self.dt

    @property
    def space(self) -> Space:
        return Space(3, self.photon_cutoff)


@dataclass
class RunLog:
    """Diagnostics gathered while integrating."""

    steps: int = 0
    max_cutoff_population: float = 0.0
    # largest |Δ⟨N⟩| over one segment; only conserved when the run is closed
    max_excitation_drift: float = 0.0
    warnings: list[str] = field(default_factory=list)


def evolve_segment(rho, seg: PulseSegment, p: CouplingParams, noise: NoiseParams,
                   cfg: SimConfig = SimConfig(), runlog: Optional[RunLog] = None,
                   space: Optional[Space] = None) -> np.ndarray:
    space = space or cfg.space
    rho = np.array(rho, dtype=complex)
    dt = cfg.step_for(p)
    n_steps = max(1, math.ceil(seg.duration / dt - 1e-9))
    h = seg.duration / n_steps
    ham = segment_hamiltonian(seg, p, space)
    diss = _dissipator(space, noise)

    def rhs(t, r):
        # r is Hermitian at every RK stage, so ρH = (Hρ)†
        x = ham.at(t) @ r
        return -1j * (x - dagger(x)) + diss(r)

    top = space.top_fock_population(rho)
    n_op = space.excitation_number
    n_start = float(np.real(np.diagonal(rho) @ n_op))
    for i in range(n_steps):
        t = i * h
        k1 = rhs(t, rho)
        k2 = rhs(t + h / 2, rho + (h / 2) * k1)
        k3 = rhs(t + h / 2, rho + (h / 2) * k2)
        k4 = rhs(t + h, rho + h * k3)
        rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + dagger(rho))
        if not np.isfinite(rho).all():
            raise NumericalError(f"non-finite density matrix in {seg.label or seg} "
                                 f"at step {i}; reduce dt")
        top = max(top, space.top_fock_population(rho))
    if runlog is not None:
        runlog.steps += n_steps
        runlog.max_cutoff_population = max(runlog.max_cutoff_population, top)
        drift = abs(float(np.real(np.diagonal(rho) @ n_op)) - n_start)
        runlog.max_excitation_drift = max(runlog.max_excitation_drift, drift)
        if top > CUTOFF_POPULATION_LIMIT:
            msg = f"top Fock level population {top:.2e} during {seg.label}"
            runlog.warnings.append(msg)
            log.warning(msg)
    return rho


def run_schedule(schedule: Schedule, rho, p: CouplingParams, noise: NoiseParams,
                 cfg: SimConfig = SimConfig(), runlog: Optional[RunLog] = None) -> np.ndarray:
    space = cfg.space
    for item in schedule.items:
        if isinstance(item, InstantaneousLayer):
            rho = apply_unitary(space.lift_layer(item), rho)
        else:
            rho = evolve_segment(rho, item, p, noise, cfg, runlog, space)
    return rho


@dataclass(frozen=True)
class SimResult:
    op: JointOp
    b0: float
    b1: float
    fidelity: float
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float
    cutoff_population: float
    excitation_drift: float = 0.0
    wall_time_s: float = field(default=0.0, compare=False)
    rho: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def flagged(self) -> bool:
        return self.cutoff_population > CUTOFF_POPULATION_LIMIT


def run_joint_op(op: JointOp, p: CouplingParams, noise: NoiseParams,
                 cfg: SimConfig = SimConfig(), keep_state: bool = False) -> SimResult:
    start = time.perf_counter()
    space = cfg.space
    rho = ket_to_dm(space.ket([0, 0, 0], 0))
    runlog = RunLog()
    rho = run_schedule(compile_joint_op(op, p), rho, p, noise, cfg, runlog)
    ideal = space.embed_qubit_ket(ideal_joint_output(op))
    diag = density_diagnostics(rho)
    return SimResult(
        op=op, b0=p.b0, b1=p.b1,
        fidelity=state_fidelity(ideal, rho),
        trace_error=diag.trace_error,
        hermiticity_error=diag.hermiticity_error,
        min_eigenvalue=diag.min_eigenvalue,
        cutoff_population=runlog.max_cutoff_population,
        excitation_drift=runlog.max_excitation_drift,
        wall_time_s=time.perf_counter() - start,
        rho=rho if keep_state else None,
    )


def _run_point(args) -> SimResult:
    op, p, noise, cfg = args
    return run_joint_op(op, p, noise, cfg)


def sweep_b0(ops: Sequence[JointOp], b0_values: Iterable[float], p: CouplingParams,
             noise: NoiseParams, cfg: SimConfig = SimConfig(), jobs: int = 1) -> list[SimResult]:
    """One run per ``(b0, op)``, b0-major; points are independent."""
    b0_values = list(b0_values)
    if not b0_values:
        raise ValueError("b0 sweep is empty")
    if any(not b > 0 for b in b0_values):
        raise ValueError("b0 values must be positive")
    tasks = [(op, p.with_b0(b0), noise, cfg) for b0 in b0_values for op in ops]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_point, tasks))
    return [_run_point(t) for t in tasks]


CSV_COLUMNS = ("op", "b0", "b1", "fidelity", "trace_error", "min_eigenvalue",
               "cutoff_population", "wall_time_s")


def results_to_csv(results: Iterable[SimResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([r.op.name] + [format(v, ".12g") for v in (
            r.b0, r.b1, r.fidelity, r.trace_error, r.min_eigenvalue,
            r.cutoff_population, r.wall_time_s)])
    return buf.getvalue()
