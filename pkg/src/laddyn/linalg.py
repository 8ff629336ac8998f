"""Dense complex linear algebra shared by every other module.

Basis convention, fixed here once for the whole package: four qubits,
qubit 1 is the most significant bit, so a computational basis state
|s1 s2 s3 s4> sits at index 8*s1 + 4*s2 + 2*s3 + s4, with s = 1 meaning
spin up |1>.  The one-excitation sector is therefore spanned by the
indices 8, 4, 2, 1 (sites 1..4 in order).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ValidationError

N_SITES = 4
DIM = 2 ** N_SITES

#: basis index of the state with a single up-spin at site 1, 2, 3, 4
ONE_PARTICLE_INDICES = (8, 4, 2, 1)

HERMITICITY_TOL = 1e-12


class EigenSystem(NamedTuple):
    """Hermitian eigendecomposition: ascending eigenvalues, orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def basis_index(bits) -> int:
    """Index of |s1 s2 s3 s4> for a bit sequence like (1, 0, 0, 0)."""
    if len(bits) != N_SITES or any(b not in (0, 1) for b in bits):
        raise ValidationError(f"need {N_SITES} bits of 0/1, got {bits!r}")
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"expected a matrix, got array of shape {a.shape}")
    return a


def check_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate that m is square Hermitian within tol, naming the worst entry."""
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix is not square: shape {a.shape}")
    dev = np.abs(a - a.conj().T)
    worst = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[worst] > tol:
        i, j = worst
        raise ValidationError(
            f"matrix is not Hermitian: entry ({i},{j})={a[i, j]} vs "
            f"conj(({j},{i}))={np.conj(a[j, i])}, deviation {dev[worst]:.3e} > {tol:.0e}"
        )
    return a


def require_normalized(state, tol: float = 1e-12) -> np.ndarray:
    """Validate that a state vector has unit norm within tol."""
    psi = np.asarray(state, dtype=complex)
    if psi.ndim != 1:
        raise ValidationError(f"expected a state vector, got shape {psi.shape}")
    dev = abs(np.vdot(psi, psi).real - 1.0)
    if dev > tol:
        raise ValidationError(f"state is not normalized: |norm^2 - 1| = {dev:.3e}")
    return psi


def hermitian_eig(m, tol: float = HERMITICITY_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Reconstruction V diag(w) V^dagger reproduces the input to ~1e-10 at the
    matrix sizes used here (up to 16x16).
    """
    a = check_hermitian(m, tol=tol)
    w, v = np.linalg.eigh(a)
    return EigenSystem(eigenvalues=w, eigenvectors=v)


def kron(a, b) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def _check_pair(p: int, q: int) -> None:
    for s in (p, q):
        if not isinstance(s, (int, np.integer)) or not 1 <= s <= N_SITES:
            raise ValidationError(f"site index must be an integer in 1..{N_SITES}, got {s!r}")
    if p == q:
        raise ValidationError(f"pair sites must differ, got ({p},{q})")


def pair_marginal_factors(states, p: int, q: int) -> np.ndarray:
    """Factor A with rho_pq = A A^dagger, for a stack of states of shape (..., 16).

    Row index of A runs over the (p,q) subsystem basis with site p as the
    more significant bit; column index runs over the traced-out sites.
    """
    _check_pair(p, q)
    psi = np.asarray(states, dtype=complex)
    if psi.shape[-1] != DIM:
        raise ValidationError(f"state must have {DIM} amplitudes, got {psi.shape[-1]}")
    lead = psi.shape[:-1]
    t = psi.reshape(lead + (2,) * N_SITES)
    rest = [s for s in range(1, N_SITES + 1) if s not in (p, q)]
    nl = len(lead)
    order = tuple(range(nl)) + tuple(nl + s - 1 for s in (p, q, *rest))
    return np.transpose(t, order).reshape(lead + (4, 4))


def partial_trace_to_pair(state, p: int, q: int) -> np.ndarray:
    """Reduced 4x4 density matrix of the (p,q) qubit pair of a pure state.

    Traces out the complement of {p,q}; qubit p indexes the more significant
    factor of the returned matrix.
    """
    psi = require_normalized(state)
    a = pair_marginal_factors(psi, p, q)
    return a @ a.conj().T
