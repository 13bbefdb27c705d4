"""Conditional generation of vibrational cat states.

Starting from ``|g> ⊗ |alpha0>`` the ion is driven for ``tau = (2q+1) pi``
and the atom is then measured. With ``alpha = -2 eta Omega/nu`` the
vibrational state collapses onto

    |-(alpha0 + alpha)> + |alpha - alpha0>   (outcome g)
    |-(alpha0 + alpha)> - |alpha - alpha0>   (outcome e)

which for ``alpha0 = 0`` are the even and odd coherent states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import dynamics, fock
from .dynamics import AtomPrep, DriveParams
from .errors import (
    ClosedFormNotApplicable,
    ContractViolation,
    DegenerateCatError,
    SpaceMismatchError,
    ZeroProbabilityBranch,
)
from .fock import IonState
from .metrics import fidelity

BRANCHES = {"G": "EvenOnG", "E": "OddOnE"}


def _outcome_label(want: str) -> str:
    w = str(want).upper()
    if w not in BRANCHES:
        raise ValueError(f"outcome must be 'G' or 'E', got {want!r}")
    return w


@dataclass(frozen=True)
class CatTarget:
    alpha0: complex
    alpha_cat: float
    branch: str

    @classmethod
    def from_params(cls, params: DriveParams, alpha0: complex, want: str) -> "CatTarget":
        return cls(complex(alpha0), -2.0 * params.coupling, BRANCHES[_outcome_label(want)])

    @property
    def components(self) -> tuple[complex, complex]:
        """``(-(alpha0 + alpha), alpha - alpha0)``."""
        return (-(self.alpha0 + self.alpha_cat), self.alpha_cat - self.alpha0)

    @property
    def sign(self) -> int:
        return 1 if self.branch == "EvenOnG" else -1

    def state(self, n: int) -> IonState:
        """Normalized target superposition on ``n`` levels.

        The relative phase ``exp(-2i Im(alpha alpha0*))`` picked up by the
        two displaced branches is included; it is 1 for real ``alpha0``.
        """
        first, second = self.components
        rel = np.exp(-2j * np.imag(self.alpha_cat * np.conj(self.alpha0)))
        v = fock.coherent_amplitudes(n, first) + self.sign * rel * fock.coherent_amplitudes(
            n, second
        )
        nrm = np.linalg.norm(v)
        if nrm < 1e-14:
            raise DegenerateCatError("target superposition vanishes")
        return IonState.pure(v / nrm, fock.vib_space(n))


@dataclass(frozen=True)
class MeasurementOutcome:
    result: str
    probability: float
    post_state: IonState


@dataclass(frozen=True)
class CatRun:
    outcome: MeasurementOutcome
    fidelity: float
    target: CatTarget
    p_g: float
    p_e: float
    tau: float


def cat_time(q: int = 0) -> float:
    if int(q) != q or q < 0:
        raise ValueError(f"q must be a nonnegative integer, got {q}")
    return (2 * int(q) + 1) * np.pi


def branch_probabilities(state: IonState) -> tuple[float, float]:
    if state.space.kind != "composite":
        raise SpaceMismatchError(f"composite state expected, got {state.space}")
    n = state.space.n
    if state.is_pure:
        pg = float(np.linalg.norm(state.data[:n]) ** 2)
        pe = float(np.linalg.norm(state.data[n:]) ** 2)
    else:
        d = np.real(np.diag(state.data))
        pg, pe = float(d[:n].sum()), float(d[n:].sum())
    return pg, pe


def conditional_measure(state: IonState, want: str) -> MeasurementOutcome:
    """Project the atom onto ``|g>`` or ``|e>`` and renormalize the vibration."""
    want = _outcome_label(want)
    if state.space.kind != "composite":
        raise SpaceMismatchError(f"composite state expected, got {state.space}")
    if abs(state.norm() - 1.0) > 1e-10:
        raise ContractViolation("composite state is not normalized")
    n = state.space.n
    sl = slice(0, n) if want == "G" else slice(n, 2 * n)
    space = fock.vib_space(n)
    if state.is_pure:
        v = state.data[sl]
        p = float(np.linalg.norm(v) ** 2)
        if p < 1e-12:
            raise ZeroProbabilityBranch(f"outcome {want} has probability {p:.3g}")
        post = IonState.pure(v / np.sqrt(p), space)
    else:
        block = state.data[sl, sl]
        p = float(np.real(np.trace(block)))
        if p < 1e-12:
            raise ZeroProbabilityBranch(f"outcome {want} has probability {p:.3g}")
        post = IonState.density(block / p, space)
    return MeasurementOutcome(want, p, post)


def even_odd_cat(n: int, alpha: complex, parity: str = "even") -> IonState:
    """Normalized ``|alpha> + |-alpha>`` (even) or ``|alpha> - |-alpha>`` (odd)."""
    par = parity.lower()
    if par not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    fock._check_dim(n)
    if par == "odd" and alpha == 0:
        raise DegenerateCatError("odd cat is undefined at alpha = 0")
    c = fock.coherent_amplitudes(n, alpha)
    k = np.arange(n)
    # c(-alpha)_k = (-1)^k c(alpha)_k, so the sum keeps only one parity
    keep = (k % 2 == 0) if par == "even" else (k % 2 == 1)
    v = np.where(keep, c, 0.0)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise DegenerateCatError(f"{par} cat has no support on {n} levels")
    return IonState.pure(v / nrm, fock.vib_space(n))


def cat_protocol(
    params: DriveParams,
    alpha0: complex = 0.0,
    q: int = 0,
    want: str = "G",
    n: int = 64,
    *,
    initial: Optional[IonState] = None,
    method: str = "exact",
) -> CatRun:
    """Drive ``|g> ⊗ |alpha0>`` to ``tau = (2q+1) pi``, measure, and score.

    ``initial`` replaces the coherent input with an arbitrary vibrational
    state (pure or mixed) so that several interactions can be chained by
    feeding one run's ``outcome.post_state`` into the next. The fidelity is
    always scored against the two-component target built from ``alpha0``.
    """
    if not params.resonant:
        raise ClosedFormNotApplicable("cat generation requires Delta = 0")
    want = _outcome_label(want)
    tau = cat_time(q)
    vib = fock.coherent_state(n, alpha0) if initial is None else initial
    state = dynamics.evolve(params, tau, AtomPrep.ground(), vib, n, method=method)
    p_g, p_e = branch_probabilities(state)
    outcome = conditional_measure(state, want)
    target = CatTarget.from_params(params, alpha0, want)
    f = fidelity(target.state(n), outcome.post_state)
    return CatRun(outcome, f, target, p_g, p_e, tau)
