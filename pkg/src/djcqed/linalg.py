"""Dense complex linear algebra and state helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The joint
Hilbert space orders subsystems as qutrit 1, qutrit 2, qutrit 3, cavity,
with qutrit 1 the most significant index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-8
TRACE_TOL = 1e-6
POSITIVITY_TOL = -1e-8


class DimensionError(ValueError):
    pass


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``.

    ``result[i*b.rows + k, j*b.cols + l] == a[i, j] * b[k, l]``.
    """
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*ops) -> np.ndarray:
    return reduce(tensor_product, ops)


def embed(op, site: int, dims) -> np.ndarray:
    """Place a single-site operator on ``site`` (0-based) of a product space."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[site] = as_matrix(op)
    return kron_all(*factors)


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def product_state(levels, dims) -> np.ndarray:
    """Ket ``|levels[0]⟩ ⊗ |levels[1]⟩ ⊗ ...`` in a space with local ``dims``."""
    return kron_all(*[basis_vector(d, n)[:, None] for n, d in zip(levels, dims)])[:, 0]


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def dagger(m) -> np.ndarray:
    return np.conj(np.transpose(m))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) <= tol


def apply_unitary(u, rho) -> np.ndarray:
    """Return ``U ρ U†``.

    Raises :class:`DimensionError` on shape mismatch and ``ValueError`` when
    ``U†U`` deviates from the identity by more than 1e-10.
    """
    u = as_matrix(u)
    rho = as_matrix(rho)
    if u.shape[0] != u.shape[1] or u.shape[1] != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"cannot apply {u.shape} unitary to {rho.shape} state")
    if not is_unitary(u):
        raise ValueError("operator is not unitary within 1e-10")
    return u @ rho @ dagger(u)


def state_fidelity(psi, rho) -> float:
    """Fidelity ``sqrt(⟨ψ|ρ|ψ⟩)`` of a mixed state against a pure target."""
    psi = np.asarray(psi, dtype=complex)
    rho = as_matrix(rho)
    if rho.shape != (psi.size, psi.size):
        raise DimensionError(f"state of dim {psi.size} vs density matrix {rho.shape}")
    overlap = float(np.real(np.vdot(psi, rho @ psi)))
    if overlap < -1e-10:
        raise ValueError(f"negative overlap {overlap:.3e}: density matrix is corrupted")
    return float(np.sqrt(min(max(overlap, 0.0), 1.0)))


@dataclass(frozen=True)
class DensityDiagnostics:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return (
            self.trace_error <= TRACE_TOL
            and self.hermiticity_error <= HERMITIAN_TOL
            and self.min_eigenvalue >= POSITIVITY_TOL
        )


def density_diagnostics(rho) -> DensityDiagnostics:
    rho = as_matrix(rho)
    herm = 0.5 * (rho + dagger(rho))
    return DensityDiagnostics(
        trace_error=float(abs(np.trace(rho) - 1.0)),
        hermiticity_error=float(np.max(np.abs(rho - dagger(rho)))),
        min_eigenvalue=float(np.linalg.eigvalsh(herm)[0]),
    )
