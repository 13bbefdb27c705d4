"""Ion–standing-wave dynamics without the rotating wave approximation.

Units: hbar = 1, energies in units of the trap frequency nu, time is the
dimensionless tau = nu t. On atom ⊗ vibration the working Hamiltonian is

    H / nu = 1 ⊗ n + (Delta/nu) sigma_z ⊗ 1 + eta (Omega/nu) sigma_x ⊗ X,

with X = a + a^dag. At zero detuning the propagator factorizes as

    U(tau) = e^{i phi(tau)} e^{-i n tau} exp{sigma_x [alpha(tau) a^dag - alpha*(tau) a]},
    phi(tau) = (eta Omega/nu)^2 (tau - sin tau),
    alpha(tau) = (eta Omega/nu) (1 - e^{i tau}).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import fock
from .errors import ClosedFormNotApplicable, ContractViolation, SpaceMismatchError
from .fock import IonState, Operator

LAMB_DICKE_ETA = 0.1


class TruncationWarning(UserWarning):
    """Population reached the top of the truncated Fock basis."""


@dataclass(frozen=True)
class DriveParams:
    """Control knobs in trap units: ``eta``, ``omega_ratio = Omega/nu``, ``delta_ratio = Delta/nu``."""

    eta: float
    omega_ratio: float
    delta_ratio: float = 0.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ContractViolation(f"eta must be positive, got {self.eta}")

    @property
    def coupling(self) -> float:
        """eta * Omega / nu."""
        return self.eta * self.omega_ratio

    @property
    def lamb_dicke_regime(self) -> bool:
        """True when eta is small enough for the linear coupling to be trusted."""
        return self.eta <= LAMB_DICKE_ETA

    @property
    def resonant(self) -> bool:
        return self.delta_ratio == 0.0

    def with_omega(self, omega_ratio: float) -> "DriveParams":
        return replace(self, omega_ratio=omega_ratio)


@dataclass(frozen=True)
class AtomPrep:
    """Initial atom ``A|g> + B e^{i phase}|e>`` with real ``A, B >= 0``."""

    a_coef: float
    b_coef: float
    phase: float = 0.0

    def __post_init__(self):
        if self.a_coef < 0 or self.b_coef < 0:
            raise ContractViolation("atomic coefficients must be nonnegative")
        if abs(self.a_coef**2 + self.b_coef**2 - 1.0) > 1e-12:
            raise ContractViolation("atomic coefficients must satisfy A^2 + B^2 = 1")
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))

    @classmethod
    def ground(cls) -> "AtomPrep":
        return cls(1.0, 0.0, 0.0)

    def ket(self) -> np.ndarray:
        return np.array([self.a_coef, self.b_coef * np.exp(1j * self.phase)])


@dataclass(frozen=True)
class PropagatorPair:
    exact: Operator
    oracle: Operator
    discrepancy: float
    margin: int


@dataclass(frozen=True)
class EvolutionComponents:
    """Pieces of the closed-form expansion of the evolved state.

    ``cosh_part = cosh(G)|psi_v>`` and ``sinh_part = sinh(G)|psi_v>`` with
    ``G = alpha a^dag - alpha* a``; ``global_phase`` is phi(tau).
    """

    cosh_part: np.ndarray
    sinh_part: np.ndarray
    alpha: complex
    global_phase: float
    tau: float


def _require_resonant(params: DriveParams) -> None:
    if not params.resonant:
        raise ClosedFormNotApplicable(
            "closed-form propagator requires zero detuning (Delta = 0), "
            f"got Delta/nu = {params.delta_ratio}"
        )


def hamiltonian(params: DriveParams, n: int) -> Operator:
    """``H/(hbar nu)`` on the composite space (atom slow index)."""
    num = fock.number(n)
    x = fock.position(n)
    h = (
        fock.tensor(fock.identity(fock.ATOM), num).matrix
        + params.delta_ratio * fock.tensor(fock.sigma_z(), fock.identity(num.space)).matrix
        + params.coupling * fock.tensor(fock.sigma_x(), x).matrix
    )
    return Operator(h, fock.composite_space(n), hermitian=True)


def phase_phi(params: DriveParams, tau: float) -> float:
    _require_resonant(params)
    return params.coupling**2 * (tau - np.sin(tau))


def alpha_tau(params: DriveParams, tau: float) -> complex:
    _require_resonant(params)
    return params.coupling * (1.0 - np.exp(1j * tau))


def free_rotation(n: int, tau: float) -> np.ndarray:
    """Diagonal of ``e^{-i n tau}``."""
    return np.exp(-1j * tau * np.arange(n))


def exact_propagator(params: DriveParams, tau: float, n: int) -> Operator:
    """Closed-form propagator, global phase included."""
    _require_resonant(params)
    fock._check_dim(n)
    alpha = alpha_tau(params, tau)
    g = fock.displacement_generator(n, alpha)
    # i (sigma_x ⊗ G) is Hermitian; exp(-i * that) = exp(sigma_x ⊗ G)
    gen = 1j * np.kron(fock.sigma_x().matrix, g)
    disp = fock.expm_hermitian(gen, -1j)
    rot = np.tile(free_rotation(n, tau), 2)
    u = np.exp(1j * phase_phi(params, tau)) * (rot[:, None] * disp)
    return Operator(u, fock.composite_space(n), unitary=True)


def brute_force_propagator(params: DriveParams, tau: float, n: int) -> Operator:
    """``exp(-i H tau)`` by Hermitian eigendecomposition of the full Hamiltonian."""
    return fock.herm_exp(hamiltonian(params, n), -1j * tau)


def bulk_indices(n: int, margin: int) -> np.ndarray:
    """Composite indices whose Fock level is below ``n - margin``."""
    keep = np.arange(n - margin)
    return np.concatenate([keep, n + keep])


def block_discrepancy(u: Operator, v: Operator, margin: int) -> float:
    """Max-norm of ``u - v`` after dropping the top ``margin`` Fock levels."""
    idx = bulk_indices(u.space.n, margin)
    return float(np.abs((u.matrix - v.matrix)[np.ix_(idx, idx)]).max())


def truncation_margin(params: DriveParams, n: int, base: int = 8) -> int:
    """Fock levels to exclude so the bulk comparison is free of edge effects.

    A displacement of size ``|alpha|`` couples level ``m`` to levels roughly
    ``2 |alpha| sqrt(m)`` away, so with ``|alpha| <= 2 eta Omega/nu`` we drop
    ``base + ceil(6 (eta Omega/nu) sqrt(n))`` levels.
    """
    return int(base + np.ceil(6.0 * abs(params.coupling) * np.sqrt(n)))


def propagator_pair(params: DriveParams, tau: float, n: int, margin: int = 8) -> PropagatorPair:
    exact = exact_propagator(params, tau, n)
    oracle = brute_force_propagator(params, tau, n)
    return PropagatorPair(exact, oracle, block_discrepancy(exact, oracle, margin), margin)


def free_evolution(vib: IonState, tau0: float) -> IonState:
    """Apply ``e^{-i n tau0}`` to a vibrational state."""
    if vib.space.kind != "vib":
        raise SpaceMismatchError(f"vibrational state expected, got {vib.space}")
    r = free_rotation(vib.space.n, tau0)
    if vib.is_pure:
        return IonState.pure(r * vib.data, vib.space)
    return IonState.density(r[:, None] * vib.data * r.conj()[None, :], vib.space)


def hyperbolic_parts(n: int, alpha: complex):
    """``cosh(G)`` and ``sinh(G)`` as ``(D(alpha) ± D(-alpha)) / 2``."""
    dp = fock.displacement(n, alpha).matrix
    dm = fock.displacement(n, -alpha).matrix
    return 0.5 * (dp + dm), 0.5 * (dp - dm)


def evolution_components(params: DriveParams, tau: float, vib: IonState) -> EvolutionComponents:
    if not vib.is_pure:
        raise ContractViolation("hyperbolic expansion is defined for pure vibrational states")
    alpha = alpha_tau(params, tau)
    ch, sh = hyperbolic_parts(vib.space.n, alpha)
    return EvolutionComponents(ch @ vib.data, sh @ vib.data, alpha, phase_phi(params, tau), tau)


def assemble(prep: AtomPrep, comps: EvolutionComponents) -> IonState:
    """Rebuild the evolved composite vector from its cosh/sinh pieces."""
    n = len(comps.cosh_part)
    be = prep.b_coef * np.exp(1j * prep.phase)
    g_part = prep.a_coef * comps.cosh_part + be * comps.sinh_part
    e_part = prep.a_coef * comps.sinh_part + be * comps.cosh_part
    rot = free_rotation(n, comps.tau) * np.exp(1j * comps.global_phase)
    vec = np.concatenate([rot * g_part, rot * e_part])
    return IonState.pure(vec, fock.composite_space(n))


def apply(u: Operator, state: IonState) -> IonState:
    if u.space != state.space:
        raise SpaceMismatchError(f"{u.space} acting on {state.space}")
    if state.is_pure:
        return IonState.pure(u.matrix @ state.data, state.space)
    m = u.matrix
    return IonState.density(m @ state.data @ m.conj().T, state.space)


def evolve(
    params: DriveParams,
    tau: float,
    prep: AtomPrep,
    vib: IonState,
    n: Optional[int] = None,
    *,
    method: str = "auto",
    components: bool = False,
):
    """Evolve ``(A|g> + B e^{i phase}|e>) ⊗ vib`` for a time ``tau``.

    ``method`` is ``"exact"`` (closed form, Delta = 0 only), ``"oracle"``
    (brute-force exponential) or ``"auto"`` (closed form when resonant).
    With ``components=True`` a pure input also returns the
    :class:`EvolutionComponents` of the hyperbolic expansion.

    Leakage into the top Fock levels emits a :class:`TruncationWarning` and
    is recorded on the returned state's ``report``.
    """
    n = vib.space.n if n is None else n
    if vib.space != fock.vib_space(n):
        raise SpaceMismatchError(f"vibrational state on {vib.space}, expected {n} levels")
    if method == "auto":
        method = "exact" if params.resonant else "oracle"
    if method == "exact":
        u = exact_propagator(params, tau, n)
    elif method == "oracle":
        u = brute_force_propagator(params, tau, n)
    else:
        raise ValueError(f"unknown method {method!r}")

    out = apply(u, fock.product_state(prep.ket(), vib))
    report = fock.truncation_report(out)
    if report.leakage_flag:
        warnings.warn(
            f"top-level population {report.top_level_population:.3g} exceeds "
            f"{report.tolerance:g}; increase the Fock dimension",
            TruncationWarning,
            stacklevel=2,
        )
    out = replace(out, report=report)
    if components:
        return out, evolution_components(params, tau, vib)
    return out
