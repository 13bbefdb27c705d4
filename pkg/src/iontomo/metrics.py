"""State-comparison metrics."""

from __future__ import annotations

import numpy as np

from .errors import InvalidDimensionError
from .fock import IonState

_PURITY_TOL = 1e-10


def _as_pure_vector(state: IonState):
    """Return the state vector if ``state`` is pure (kind or rank one), else None."""
    if state.is_pure:
        return state.data
    rho = state.data
    tr = np.real(np.trace(rho))
    if tr <= 0:
        return None
    purity = np.real(np.vdot(rho, rho)) / tr**2
    if abs(purity - 1.0) > _PURITY_TOL:
        return None
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return v[:, -1] * np.sqrt(max(w[-1], 0.0))


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(a: IonState, b: IonState) -> float:
    """State fidelity.

    ``<psi|rho|psi>`` when either argument is pure, otherwise the Uhlmann
    fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))^2``. The result is clipped to
    ``[0, 1]``, so raw (non-positive) estimates still score sensibly.
    """
    if a.dim != b.dim:
        raise InvalidDimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    psi = _as_pure_vector(a)
    other = b
    if psi is None:
        psi = _as_pure_vector(b)
        other = a
    if psi is not None:
        if other.is_pure:
            f = abs(np.vdot(psi, other.data)) ** 2
        else:
            f = np.real(np.vdot(psi, other.data @ psi))
    else:
        sa = _sqrtm_psd(a.data)
        w = np.linalg.eigvalsh(sa @ b.data @ sa)
        f = np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2
    return float(np.clip(f, 0.0, 1.0))


def trace_distance(a: IonState, b: IonState) -> float:
    """``(1/2) ||a - b||_1`` on density matrices (Hermitian part of the difference)."""
    if a.dim != b.dim:
        raise InvalidDimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    d = a.dm() - b.dm()
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())
