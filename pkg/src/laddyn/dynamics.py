"""Exact spectral time evolution and one-excitation amplitude extraction.

The Hilbert space is 16-dimensional, so the propagator is built from a
full eigendecomposition and every time point is evaluated exactly; there
is no integrator and no step-to-step error accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SectorLeakageError, ValidationError
from .linalg import (
    DIM,
    ONE_PARTICLE_INDICES,
    EigenSystem,
    hermitian_eig,
    require_normalized,
)

DEFAULT_LEAKAGE_TOL = 1e-10

_SECTOR_MASK = np.ones(DIM, dtype=bool)
_SECTOR_MASK[list(ONE_PARTICLE_INDICES)] = False


@dataclass(frozen=True)
class Propagator:
    """Eigendecomposition of H plus the initial state's expansion coefficients."""

    eig: EigenSystem
    coefficients: np.ndarray


def make_propagator(h, psi0) -> Propagator:
    """Diagonalize h and expand psi0 in its eigenbasis."""
    eig = hermitian_eig(h)
    psi0 = require_normalized(psi0)
    if psi0.shape[0] != eig.eigenvectors.shape[0]:
        raise ValidationError(
            f"state length {psi0.shape[0]} does not match matrix size "
            f"{eig.eigenvectors.shape[0]}"
        )
    c = eig.eigenvectors.conj().T @ psi0
    return Propagator(eig=eig, coefficients=c)


def evolve(prop: Propagator, t: float) -> np.ndarray:
    """State at time t: sum_i c_i exp(-i E_i t) |E_i>.  Negative t reverses time."""
    if not np.isfinite(t):
        raise ValidationError(f"time must be finite, got {t}")
    phases = np.exp(-1j * prop.eig.eigenvalues * float(t))
    return prop.eig.eigenvectors @ (phases * prop.coefficients)


def evolve_states(prop: Propagator, times) -> np.ndarray:
    """States at many times at once, shape (len(times), dim)."""
    ts = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(ts)):
        raise ValidationError("all times must be finite")
    phases = np.exp(-1j * np.outer(ts, prop.eig.eigenvalues))
    return (phases * prop.coefficients) @ prop.eig.eigenvectors.T


def time_grid(t_start: float, t_end: float, dt: float) -> np.ndarray:
    """Inclusive grid t_start, t_start+dt, ... up to t_end (within roundoff)."""
    if not dt > 0.0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if not t_end > t_start:
        raise ValidationError(f"need t_end > t_start, got [{t_start}, {t_end}]")
    n = int(np.floor((t_end - t_start) / dt + 1e-9)) + 1
    return t_start + dt * np.arange(n)


def evolve_series(prop: Propagator, t_start: float, t_end: float, dt: float):
    """Ordered list of (t, state) on the inclusive grid; each point is exact."""
    ts = time_grid(t_start, t_end, dt)
    states = evolve_states(prop, ts)
    return [(float(t), states[i]) for i, t in enumerate(ts)]


def sector_leakage(psi) -> float:
    """Probability weight outside the one-excitation sector."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.sum(np.abs(psi[..., _SECTOR_MASK]) ** 2, axis=-1).max())


def one_particle_amplitudes(psi, leakage_tol: float = DEFAULT_LEAKAGE_TOL) -> np.ndarray:
    """The four site amplitudes b_1..b_4 of a sector-confined state.

    Raises SectorLeakageError if the weight outside the sector exceeds
    leakage_tol, which signals a wrong Hamiltonian or a corrupted state.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != DIM:
        raise ValidationError(f"state must have {DIM} amplitudes, got {psi.shape[-1]}")
    leaked = sector_leakage(psi)
    if leaked > leakage_tol:
        raise SectorLeakageError(leaked, leakage_tol)
    return psi[..., list(ONE_PARTICLE_INDICES)]
