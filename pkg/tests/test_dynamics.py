import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from djcqed.circuit import JointOp
from djcqed.linalg import ket_to_dm
from djcqed.params import CouplingParams, NoiseParams
from djcqed.pulses import PulseSegment, Transition, compile_cp
from djcqed.dynamics import (
    CSV_COLUMNS,
    NumericalError,
    RunLog,
    SimConfig,
    Space,
    build_segment_hamiltonian,
    evolve_segment,
    lindblad_rhs,
    results_to_csv,
    run_joint_op,
    run_schedule,
    segment_hamiltonian,
    sweep_b0,
)

P = CouplingParams.transmon()
CLOSED = P.without_spurious()
QUIET = NoiseParams()
SPACE = Space()
G01_STEP1 = PulseSegment(1, Transition.G01, math.pi / (2 * P.g01), "i")
E12_STEP2 = PulseSegment(2, Transition.E12, math.pi / P.g12, "ii")
G01_STEP3 = PulseSegment(1, Transition.G01, 3 * math.pi / (2 * P.g01), "iii")


def local_ops(n_qutrits, cutoff):
    """Collapse operators built straight from np.kron, independent of Space."""
    dims = [3] * n_qutrits + [cutoff + 1]

    def place(op, site):
        out = np.eye(1)
        for s, d in enumerate(dims):
            out = np.kron(out, op if s == site else np.eye(d))
        return out

    def unit(a, b):
        m = np.zeros((3, 3))
        m[a, b] = 1
        return m

    a = place(np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1), n_qutrits)
    return dims, a, place, unit


def superoperator_rhs(rho, h, noise, n_qutrits, cutoff):
    dims, a, place, unit = local_ops(n_qutrits, cutoff)
    d = int(np.prod(dims))
    eye = np.eye(d)
    terms = [(noise.kappa, a)]
    for q in range(n_qutrits):
        terms += [(noise.gamma21, place(unit(1, 2), q)), (noise.gamma20, place(unit(0, 2), q)),
                  (noise.gamma10, place(unit(0, 1), q)), (noise.gamma_phi2, place(unit(2, 2), q)),
                  (noise.gamma_phi1, place(unit(1, 1), q))]
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for rate, c in terms:
        cdc = c.conj().T @ c
        sup = sup + rate * (np.kron(c, c.conj()) - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T))
    return (sup @ rho.reshape(-1)).reshape(d, d)


def random_density(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return m + m.conj().T


rates = st.floats(0, 3)
noise_st = st.builds(NoiseParams, rates, rates, rates, rates, rates, rates)


class TestSpace:
    def test_dims(self):
        assert SPACE.dims == (3, 3, 3, 4) and SPACE.dim == 108
        assert Space.for_dim(12, n_qutrits=1) == Space(1, 3)

    def test_ket_ordering(self):
        # qutrit 1 most significant, cavity last
        assert np.flatnonzero(SPACE.ket([1, 0, 0], 0))[0] == 36
        assert np.flatnonzero(SPACE.ket([0, 0, 0], 2))[0] == 2

    def test_qubit_embedding(self):
        idx = SPACE.qubit_subspace_indices()
        assert idx == [0, 4, 12, 16, 36, 40, 48, 52]


class TestHamiltonian:
    def test_resonant_block(self):
        h = build_segment_hamiltonian(G01_STEP1, 0.0, P)
        a = np.flatnonzero(SPACE.ket([0, 0, 0], 1))[0]
        b = np.flatnonzero(SPACE.ket([1, 0, 0], 0))[0]
        assert h[a, b] == pytest.approx(P.g01) and h[b, a] == pytest.approx(P.g01)

    def test_spurious_term_phase(self):
        t = 3.1e-9
        h = build_segment_hamiltonian(G01_STEP1, t, P)
        lo = np.flatnonzero(SPACE.ket([1, 0, 0], 1))[0]   # |1>_1 |1>_c
        hi = np.flatnonzero(SPACE.ket([2, 0, 0], 0))[0]   # |2>_1 |0>_c
        assert h[lo, hi] == pytest.approx(P.g12_spurious * np.exp(-1j * P.delta12 * t))

    def test_e12_segment_uses_delta01(self):
        t = 2.0e-9
        h = build_segment_hamiltonian(E12_STEP2, t, P)
        lo = np.flatnonzero(SPACE.ket([0, 0, 0], 1))[0]
        hi = np.flatnonzero(SPACE.ket([0, 1, 0], 0))[0]
        assert h[lo, hi] == pytest.approx(P.g01_spurious * np.exp(-1j * P.delta01 * t))

    def test_no_spurious_is_static(self):
        h0 = build_segment_hamiltonian(G01_STEP1, 0.0, CLOSED)
        h1 = build_segment_hamiltonian(G01_STEP1, G01_STEP1.duration, CLOSED)
        assert np.array_equal(h0, h1)

    @pytest.mark.parametrize("seg", [G01_STEP1, E12_STEP2])
    @pytest.mark.parametrize("t", [0.0, 1.7e-9, 9.9e-9])
    def test_hermitian_and_conserves_excitations(self, seg, t):
        h = build_segment_hamiltonian(seg, t, P)
        assert np.max(np.abs(h - h.conj().T)) == 0
        n = np.diag(SPACE.excitation_number)
        assert np.linalg.norm(h @ n - n @ h) <= 1e-12

    def test_decoupled_qutrits_untouched(self):
        h = build_segment_hamiltonian(E12_STEP2, 0.0, P)
        lv = SPACE.levels
        rows, cols = np.nonzero(h)
        assert np.all(lv[rows, 0] == lv[cols, 0]) and np.all(lv[rows, 2] == lv[cols, 2])

    def test_time_out_of_range(self):
        with pytest.raises(ValueError):
            build_segment_hamiltonian(G01_STEP1, 2 * G01_STEP1.duration, P)


class TestLindbladRhs:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), noise_st)
    def test_matches_superoperator_12dim(self, seed, noise):
        rng = np.random.default_rng(seed)
        space = Space(1, 3)
        rho, h = random_density(rng, 12), random_hermitian(rng, 12)
        fast = lindblad_rhs(rho, h, noise, space)
        slow = superoperator_rhs(rho, h, noise, 1, 3)
        assert np.max(np.abs(fast - slow)) <= 1e-12

    def test_matches_superoperator_two_qutrits(self):
        rng = np.random.default_rng(11)
        noise = NoiseParams(0.3, 0.7, 0.2, 1.1, 0.5, 0.9)
        rho, h = random_density(rng, 36), random_hermitian(rng, 36)
        fast = lindblad_rhs(rho, h, noise, Space(2, 3))
        assert np.max(np.abs(fast - superoperator_rhs(rho, h, noise, 2, 3))) <= 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), noise_st)
    def test_trace_free(self, seed, noise):
        rng = np.random.default_rng(seed)
        rho, h = random_density(rng, 108), random_hermitian(rng, 108)
        assert abs(np.trace(lindblad_rhs(rho, h, noise))) <= 1e-12

    def test_trace_free_physical_scale(self):
        rng = np.random.default_rng(5)
        rho = random_density(rng, 108)
        out = lindblad_rhs(rho, build_segment_hamiltonian(E12_STEP2, 1e-9, P), NoiseParams.transmon())
        assert abs(np.trace(out)) <= 1e-15 * np.max(np.abs(out)) * 108

    def test_closed_limit(self):
        rng = np.random.default_rng(6)
        rho, h = random_density(rng, 108), random_hermitian(rng, 108)
        assert np.array_equal(lindblad_rhs(rho, h, QUIET), -1j * (h @ rho - rho @ h))

    def test_photon_decay_rate(self):
        kappa = 2.0e5
        rho = ket_to_dm(SPACE.ket([0, 0, 0], 1))
        out = lindblad_rhs(rho, np.zeros((108, 108)), NoiseParams(kappa=kappa))
        n = SPACE.a.conj().T @ SPACE.a
        assert np.real(np.trace(n @ out)) == pytest.approx(-kappa, rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            lindblad_rhs(np.eye(108) / 108, np.eye(12), QUIET)


def _coherence(rho, a_levels, a_photons, b_levels, b_photons):
    i = np.flatnonzero(SPACE.ket(a_levels, a_photons))[0]
    j = np.flatnonzero(SPACE.ket(b_levels, b_photons))[0]
    return rho[i, j]


def _superposed(*kets):
    psi = sum(SPACE.ket(lv, n) for lv, n in kets)
    return ket_to_dm(psi / np.linalg.norm(psi))


class TestStepMaps:
    def test_step_i(self):
        rho = _superposed(([0, 0, 0], 0), ([1, 0, 0], 0))
        out = evolve_segment(rho, G01_STEP1, CLOSED, QUIET)
        assert _coherence(out, [0, 0, 0], 1, [0, 0, 0], 0) == pytest.approx(-0.5j, abs=1e-7)
        assert abs(_coherence(out, [1, 0, 0], 0, [1, 0, 0], 0)) < 1e-7

    def test_step_ii(self):
        rho = _superposed(([0, 0, 0], 0), ([0, 1, 0], 1))
        out = evolve_segment(rho, E12_STEP2, CLOSED, QUIET)
        assert _coherence(out, [0, 1, 0], 1, [0, 0, 0], 0) == pytest.approx(-0.5, abs=1e-7)

    @pytest.mark.parametrize("kept", [([0, 1, 0], 0), ([0, 0, 0], 1)])
    def test_step_ii_leaves_others(self, kept):
        rho = _superposed(([0, 0, 0], 0), kept)
        out = evolve_segment(rho, E12_STEP2, CLOSED, QUIET)
        assert _coherence(out, *kept, [0, 0, 0], 0) == pytest.approx(0.5, abs=1e-7)

    def test_step_iii(self):
        rho = _superposed(([0, 0, 0], 0), ([0, 0, 0], 1))
        out = evolve_segment(rho, G01_STEP3, CLOSED, QUIET)
        assert _coherence(out, [1, 0, 0], 0, [0, 0, 0], 0) == pytest.approx(0.5j, abs=1e-7)

    @pytest.mark.parametrize("seg", [G01_STEP1, G01_STEP3])
    def test_ground_untouched(self, seg):
        rho = ket_to_dm(SPACE.ket([0, 1, 1], 0))
        out = evolve_segment(rho, seg, CLOSED, QUIET)
        assert np.max(np.abs(out - rho)) < 1e-12

    def test_cp_phase_bookkeeping(self):
        sched = compile_cp(1, 2, CLOSED.g01, CLOSED.g12)
        inputs = [[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]]
        signs = [1, 1, 1, -1]
        psi = sum(SPACE.ket(lv) for lv in inputs) / 2
        out = run_schedule(sched, ket_to_dm(psi), CLOSED, QUIET)
        for lv, s in zip(inputs, signs):
            assert _coherence(out, lv, 0, [0, 0, 0], 0) == pytest.approx(s / 4, abs=1e-8)


class TestIntegrator:
    def test_closed_system_conserves_excitations(self):
        n = SPACE.excitation_number
        psi = sum(SPACE.ket(lv, c) for lv, c in [([1, 1, 1], 0), ([1, 1, 0], 1), ([0, 1, 1], 0)])
        rho = ket_to_dm(psi / np.linalg.norm(psi))
        before = np.real(np.diagonal(rho)) @ n
        for seg in (G01_STEP1, E12_STEP2):
            out = evolve_segment(rho, seg, P, QUIET)
            assert abs(np.real(np.diagonal(out)) @ n - before) <= 1e-8

    def test_deterministic(self):
        rho = _superposed(([1, 1, 0], 0), ([0, 1, 1], 0))
        a = evolve_segment(rho, E12_STEP2, P, NoiseParams.transmon())
        b = evolve_segment(rho, E12_STEP2, P, NoiseParams.transmon())
        assert np.array_equal(a, b)

    def test_noisy_segment_stays_physical(self):
        rho = _superposed(([1, 1, 0], 0), ([0, 1, 1], 1), ([2, 0, 1], 0))
        out = evolve_segment(rho, E12_STEP2, P, NoiseParams.transmon())
        assert abs(np.trace(out) - 1) <= 1e-10
        assert np.linalg.eigvalsh(out)[0] >= -1e-8

    def test_dt_invariant(self):
        with pytest.raises(ValueError, match="rad per step"):
            SimConfig(dt=1e-10).step_for(P)
        assert SimConfig().step_for(P) * P.max_angular_frequency == pytest.approx(0.05)

    def test_rejects_small_cutoff(self):
        with pytest.raises(ValueError):
            SimConfig(photon_cutoff=2)

    def test_non_finite_is_error(self):
        rho = np.full((108, 108), np.nan, dtype=complex)
        with pytest.raises(NumericalError):
            evolve_segment(rho, G01_STEP1, P, QUIET)

    def test_cutoff_population_warning(self):
        rho = ket_to_dm(SPACE.ket([0, 0, 0], 3))
        log = RunLog()
        evolve_segment(rho, G01_STEP1, CLOSED, QUIET, runlog=log)
        assert log.max_cutoff_population == pytest.approx(1.0)
        assert log.warnings

    def test_static_hamiltonian_parts(self):
        sh = segment_hamiltonian(E12_STEP2, CLOSED)
        assert not sh.offres.any()


class TestRunJointOp:
    @pytest.mark.parametrize("op", list(JointOp))
    def test_closed_system_is_ideal(self, op):
        r = run_joint_op(op, CLOSED, QUIET)
        assert r.fidelity >= 1 - 1e-6
        assert r.trace_error <= 1e-10

    def test_keep_state(self):
        r = run_joint_op(JointOp.U1, CLOSED, QUIET, keep_state=True)
        assert r.rho.shape == (108, 108)


class TestSweep:
    FAST = CouplingParams.transmon(15.0, b0=1.0, b1=1.0)

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            sweep_b0([JointOp.U1], [], P, QUIET)

    def test_nonpositive(self):
        with pytest.raises(ValueError):
            sweep_b0([JointOp.U1], [1.0, 0.0], P, QUIET)

    def test_deterministic_csv(self):
        runs = [sweep_b0([JointOp.U1, JointOp.U2], [1.0, 1.5], self.FAST, NoiseParams.transmon())
                for _ in range(2)]
        assert runs[0] == runs[1]
        assert [(r.op, r.b0) for r in runs[0]] == [(JointOp.U1, 1.0), (JointOp.U2, 1.0),
                                                    (JointOp.U1, 1.5), (JointOp.U2, 1.5)]
        text = results_to_csv(runs[0])
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 5
        fid = lines[1].split(",")[3]
        assert len(fid.replace("0.", "", 1).lstrip("0")) >= 10


def test_excitation_drift_recorded():
    closed = run_joint_op(JointOp.U2, P, QUIET)
    noisy = run_joint_op(JointOp.U1, TestSweep.FAST, NoiseParams.transmon())
    assert closed.excitation_drift <= 1e-8
    assert noisy.excitation_drift > 1e-4
