"""Numeric observables of evolved states.

Wootters concurrence (full density-matrix route and the one-excitation
shortcut 2|b_p b_q|), two-point spin correlations, and total-spin
expectation values.  Everything is a pure function; the *_series variants
evaluate a whole stack of states at once and share the scalar code path.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import model
from .errors import NumericalFailureError, ValidationError
from .linalg import N_SITES, pair_marginal_factors, require_normalized

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
#: sigma_y (x) sigma_y, a real symmetric matrix
_YY = np.kron(_SY, _SY).real

#: relative rank cutoff for density-matrix eigenvalues (trace is 1)
_RANK_TOL = 64.0 * np.finfo(float).eps

DENSITY_TOL = 1e-10
CLAMP_LIMIT = 1e-9


@dataclass(frozen=True)
class PairObservables:
    """Concurrence and the 3x3 correlation matrix of one site pair."""

    pair: tuple
    concurrence: float
    chi: np.ndarray


def _wootters_from_factors(z) -> np.ndarray:
    """Concurrence for a stack of factors z with rho = z z^dagger.

    The Wootters lambdas are the singular values of the complex symmetric
    matrix z^T (sy (x) sy) z, whose squared spectrum equals that of
    rho (sy (x) sy) rho* (sy (x) sy); the factored form avoids squaring and
    keeps full precision at rank-deficient rho.
    """
    w = z.swapaxes(-1, -2) @ _YY @ z
    lam = np.linalg.svd(w, compute_uv=False)  # descending
    raw = lam[..., 0] - lam[..., 1:].sum(axis=-1)
    # negative raw values are ordinary (separable mixed states); the max
    # with 0 is part of the definition.  Only an excess above 1 is numerical.
    if np.any(raw > 1.0 + CLAMP_LIMIT):
        raise NumericalFailureError(
            f"concurrence {np.max(raw)} exceeds 1 beyond {CLAMP_LIMIT:.0e}"
        )
    return np.clip(raw, 0.0, 1.0)


def _validate_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValidationError(f"expected 4x4 density matrices, got shape {rho.shape}")
    herm_dev = np.max(np.abs(rho - rho.conj().swapaxes(-1, -2)))
    if herm_dev > DENSITY_TOL:
        raise ValidationError(f"density matrix is not Hermitian: deviation {herm_dev:.3e}")
    tr_dev = np.max(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0))
    if tr_dev > DENSITY_TOL:
        raise ValidationError(f"density matrix trace deviates from 1 by {tr_dev:.3e}")
    return rho


def _concurrence_from_rhos(rhos) -> np.ndarray:
    rhos = _validate_density(rhos)
    w, v = np.linalg.eigh(rhos)
    if np.min(w) < -DENSITY_TOL:
        raise ValidationError(
            f"density matrix is not positive semidefinite: eigenvalue {np.min(w):.3e}"
        )
    w = np.where(w < _RANK_TOL, 0.0, w)  # noise-level eigenvalues are exact zeros
    z = v * np.sqrt(w)[..., None, :]
    return _wootters_from_factors(z)


def wootters_concurrence(rho) -> float:
    """Wootters concurrence of a 4x4 two-qubit density matrix, in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2:
        raise ValidationError(f"expected a single 4x4 matrix, got shape {rho.shape}")
    return float(_concurrence_from_rhos(rho[None])[0])


def _check_pair(p: int, q: int):
    for s in (p, q):
        if not isinstance(s, (int, np.integer)) or not 1 <= s <= N_SITES:
            raise ValidationError(f"site index must be in 1..{N_SITES}, got {s!r}")
    if p == q:
        raise ValidationError(f"pair sites must differ, got ({p},{q})")


def concurrence_one_particle(amps, p: int, q: int):
    """Shortcut 2|b_p b_q| valid for one-excitation states; accepts stacks."""
    _check_pair(p, q)
    b = np.asarray(amps, dtype=complex)
    if b.shape[-1] != N_SITES:
        raise ValidationError(f"need {N_SITES} site amplitudes, got {b.shape[-1]}")
    out = 2.0 * np.abs(b[..., p - 1] * b[..., q - 1])
    return float(out) if out.ndim == 0 else out


def concurrence_series(states, p: int, q: int) -> np.ndarray:
    """Full Wootters concurrence of pair (p,q) for a stack of pure states."""
    a = pair_marginal_factors(states, p, q)
    return _concurrence_from_rhos(a @ a.conj().swapaxes(-1, -2))


@functools.lru_cache(maxsize=None)
def _pair_product_operator(p: int, q: int, alpha: str, beta: str) -> np.ndarray:
    # different sites commute, so the symmetrized product equals the plain one
    return model.spin_operator(p, alpha) @ model.spin_operator(q, beta)


def correlation_series(states, p: int, q: int, alpha: str, beta: str) -> np.ndarray:
    """<S^alpha_p S^beta_q> for a stack of states; must be real to roundoff."""
    _check_pair(p, q)
    op = _pair_product_operator(p, q, alpha, beta)
    psi = np.asarray(states, dtype=complex)
    vals = np.einsum("...i,ij,...j->...", psi.conj(), op, psi)
    worst_imag = float(np.max(np.abs(vals.imag)))
    if worst_imag > 1e-10:
        raise NumericalFailureError(
            f"correlation <S^{alpha}_{p} S^{beta}_{q}> has imaginary part {worst_imag:.3e}"
        )
    return vals.real


def two_point_correlation(psi, p: int, q: int, alpha: str, beta: str) -> float:
    """Two-point correlation <S^alpha_p S^beta_q> of a normalized state."""
    psi = require_normalized(psi)
    return float(correlation_series(psi[None], p, q, alpha, beta)[0])


def total_spin_series(states, alpha: str) -> np.ndarray:
    """<sum_p S^alpha_p> for a stack of states."""
    op = model.total_spin_operator(alpha)
    psi = np.asarray(states, dtype=complex)
    return np.einsum("...i,ij,...j->...", psi.conj(), op, psi).real


def total_spin_expectation(psi, alpha: str) -> float:
    """Expectation of the total spin component along one axis."""
    psi = require_normalized(psi)
    return float(total_spin_series(psi[None], alpha)[0])


def pair_observables(psi, p: int, q: int) -> PairObservables:
    """Concurrence plus the full 3x3 correlation matrix of one pair."""
    psi = require_normalized(psi)
    conc = float(concurrence_series(psi[None], p, q)[0])
    chi = np.empty((3, 3))
    for i, a in enumerate(model.AXES):
        for j, b in enumerate(model.AXES):
            chi[i, j] = correlation_series(psi[None], p, q, a, b)[0]
    return PairObservables(pair=(int(p), int(q)), concurrence=conc, chi=chi)
