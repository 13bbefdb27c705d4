"""Characteristic-function tomography of the vibrational state.

Driving the ion for a time tau after a free evolution tau0 makes the ground
state probability a linear function of the symmetric characteristic
function ``chi(k, theta) = Tr[exp(i k X_theta) rho]``:

    P_g = 1/2 + (A^2 - B^2)/2 Re chi - A B sin(phase) Im chi.

Two atomic preparations isolate the real and imaginary parts, and the
state is recovered from

    rho = int dk int_0^pi dtheta/pi |k| chi(k, theta) exp(-i k X_theta).

Conventions (all confirmed against the brute-force pipeline in the tests):

* ``exp(i k X_theta) = D(i k e^{i theta})``.
* The probed point is ``i k e^{i theta} = 2 alpha(tau) e^{i tau0}``, so
  ``k = 4 eta (Omega/nu) sin(tau/2)`` and ``theta = tau/2 + pi + tau0``
  (mod 2 pi). A prior free evolution advances theta by ``+tau0``.
* With ``X_theta = a e^{-i theta} + a^dag e^{i theta}`` the Jacobian of
  ``lambda = i k e^{i theta}`` is ``|k|``, which fixes the kernel weight.
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import dynamics, fock, kernels
from .dynamics import AtomPrep, DriveParams
from .errors import (
    EmptyGridError,
    InfeasibleControlError,
    InvalidProbabilityError,
    UndefinedAngleError,
)
from .fock import IonState
from .metrics import fidelity, trace_distance  # noqa: F401  (re-exported)

COS_PREP = AtomPrep(1.0, 0.0, 0.0)
SIN_PREP = AtomPrep(1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0), np.pi / 2)
CANONICAL_PREPS = (COS_PREP, SIN_PREP)
PREP_IDS = ("cos", "sin")

QUAD_TOL = 1e-3
_ANGLE_KEY = 1e-12


def wrap_angle(theta):
    """Reduce to ``(-pi, pi]``."""
    t = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    t = np.where(t <= -np.pi, t + 2 * np.pi, t)
    return float(t) if np.ndim(t) == 0 else t


# ---------------------------------------------------------------------------
# control map


@dataclass(frozen=True)
class ControlPoint:
    """Physical settings of one measurement and the (k, theta) they probe."""

    k: float
    theta: float
    omega_ratio_used: float
    tau_used: float
    free_evolution: float = 0.0


def theta_base(tau):
    """``arctan[sin tau / (1 - cos tau)] - pi/2``; equals ``-tau/2`` on (0, 2 pi)."""
    return np.arctan(np.sin(tau) / (1.0 - np.cos(tau))) - np.pi / 2


def probed_amplitude(params: DriveParams, tau: float, tau0: float = 0.0) -> complex:
    """Displacement ``lambda = 2 alpha(tau) e^{i tau0}`` whose expectation sets P_g."""
    return 2.0 * dynamics.alpha_tau(params, tau) * np.exp(1j * tau0)


def controls_to_kt(params: DriveParams, tau: float, tau0: float = 0.0) -> tuple[float, float]:
    """Map drive settings to the probed ``(k, theta)``.

    ``tau`` must lie in the principal interval (0, 2 pi).
    """
    if not params.resonant:
        dynamics._require_resonant(params)
    if not 0.0 < tau < 2 * np.pi:
        raise UndefinedAngleError(f"tau must lie in (0, 2 pi), got {tau}")
    k = 4.0 * params.coupling * np.sin(tau / 2)
    theta = wrap_angle(-theta_base(tau) + np.pi + tau0)
    return float(k), theta


def control_point(params: DriveParams, tau: float, tau0: float = 0.0) -> ControlPoint:
    k, theta = controls_to_kt(params, tau, tau0)
    return ControlPoint(k, theta, params.omega_ratio, tau, tau0)


def plan_control(
    k: float,
    theta: float,
    eta: float,
    tau: float = np.pi,
    omega_bounds: tuple[float, float] = (0.0, np.inf),
) -> ControlPoint:
    """Settings that probe ``(k, theta)`` with fixed interaction time ``tau``.

    ``k`` is set through the Rabi frequency and ``theta`` through the free
    evolution ``tau0`` in ``[0, 2 pi)``.
    """
    if not 0.0 < tau < 2 * np.pi:
        raise UndefinedAngleError(f"tau must lie in (0, 2 pi), got {tau}")
    if k <= 0:
        raise InfeasibleControlError(f"k must be positive to be measured, got {k}")
    omega = k / (4.0 * eta * np.sin(tau / 2))
    lo, hi = omega_bounds
    if not lo <= omega <= hi:
        raise InfeasibleControlError(
            f"k = {k} needs Omega/nu = {omega:.6g}, outside [{lo}, {hi}]"
        )
    tau0 = float(np.mod(theta - (tau / 2 + np.pi), 2 * np.pi))
    return ControlPoint(float(k), wrap_angle(theta), float(omega), float(tau), tau0)


# ---------------------------------------------------------------------------
# characteristic function


def _pad(rho: np.ndarray, n: int) -> np.ndarray:
    m = rho.shape[0]
    if n < m:
        raise ValueError(f"working dimension {n} smaller than state dimension {m}")
    if n == m:
        return rho
    out = np.zeros((n, n), complex)
    out[:m, :m] = rho
    return out


def char_fn_exact(rho: IonState, k: float, theta: float, n: Optional[int] = None) -> complex:
    """``Tr[exp(i k X_theta) rho]`` via the Hermitian exponential of ``X_theta``."""
    n = rho.dim if n is None else n
    r = _pad(rho.dm(), n)
    u = fock.herm_exp(fock.quadrature(n, theta), 1j * k).matrix
    return complex(np.trace(u @ r))


@functools.lru_cache(maxsize=8)
def _position_eig(n: int):
    w, v = np.linalg.eigh(fock.position(n).matrix)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def char_fn_points(rho: IonState, ks, thetas, n: Optional[int] = None) -> np.ndarray:
    """Vectorized ``chi`` at paired ``(ks[i], thetas[i])``.

    Uses ``X_theta = R X R^dag`` with ``R = e^{i theta n}``, so one
    eigendecomposition of ``X`` serves every point.
    """
    n = rho.dim if n is None else n
    r = _pad(rho.dm(), n)
    ks = np.asarray(ks, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    w, v = _position_eig(n)
    out = np.empty(len(ks), complex)
    levels = np.arange(n)
    for th in np.unique(thetas):
        sel = thetas == th
        rot = np.exp(1j * th * levels)
        # diag of V^dag R^dag rho R V
        m = (v.conj().T * rot.conj()) @ r @ (rot[:, None] * v)
        out[sel] = np.exp(1j * np.outer(ks[sel], w)) @ np.diag(m)
    return out


def ground_probability(
    params: DriveParams,
    tau: float,
    prep: AtomPrep,
    rho_v: IonState,
    n: Optional[int] = None,
    tau0: float = 0.0,
) -> float:
    """Ground-state probability after free evolution ``tau0`` and interaction ``tau``."""
    lam = probed_amplitude(params, tau, tau0)
    k = abs(lam)
    if k == 0.0:
        chi = 1.0 + 0.0j
    else:
        chi = char_fn_exact(rho_v, k, float(np.angle(-1j * lam)), n)
    a, b = prep.a_coef, prep.b_coef
    return float(
        0.5 + 0.5 * (a * a - b * b) * chi.real - a * b * np.sin(prep.phase) * chi.imag
    )


def _prep_matrix(preps: Sequence[AtomPrep]) -> np.ndarray:
    return np.array(
        [[0.5 * (p.a_coef**2 - p.b_coef**2), -p.a_coef * p.b_coef * np.sin(p.phase)] for p in preps]
    )


def char_fn_from_pg(pg_cos, pg_sin, prep_specs: Sequence[AtomPrep] = CANONICAL_PREPS):
    """Invert two ground-state probabilities into ``chi``.

    For the canonical preparations this is ``Re chi = 2 pg_cos - 1`` and
    ``Im chi = 1 - 2 pg_sin``. Works elementwise on arrays.
    """
    pc = np.asarray(pg_cos, dtype=float)
    ps = np.asarray(pg_sin, dtype=float)
    if np.any((pc < 0) | (pc > 1) | (ps < 0) | (ps > 1)):
        raise InvalidProbabilityError("ground-state probabilities must lie in [0, 1]")
    m = _prep_matrix(prep_specs)
    if abs(np.linalg.det(m)) < 1e-12:
        raise InvalidProbabilityError("preparations do not separate Re chi and Im chi")
    re, im = np.linalg.solve(m, np.stack([pc.ravel() - 0.5, ps.ravel() - 0.5]))
    chi = (re + 1j * im).reshape(pc.shape)
    return complex(chi) if chi.ndim == 0 else chi


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class QuadSpec:
    """Product mesh: trapezoid in k on [-k_max, k_max], midpoints in theta on [0, pi)."""

    k_max: float = 6.0
    dk: float = 0.1
    n_theta: int = 40

    def __post_init__(self):
        if self.dk <= 0 or self.k_max < self.dk or self.n_theta < 1:
            raise ValueError(f"invalid quadrature spec {self}")
        self.n_k  # k_max must be a multiple of dk

    @property
    def n_k(self) -> int:
        nk = int(round(self.k_max / self.dk))
        if abs(nk * self.dk - self.k_max) > 1e-9 * max(1.0, self.k_max):
            raise ValueError("k_max must be a multiple of dk")
        return nk

    def k_values(self) -> np.ndarray:
        """Positive nodes ``dk, 2 dk, ..., k_max``; k = 0 has zero weight."""
        return self.dk * np.arange(1, self.n_k + 1)

    def thetas(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * np.pi / self.n_theta

    def k_weights(self) -> np.ndarray:
        w = np.full(self.n_k, self.dk)
        w[-1] *= 0.5
        return w

    def mesh(self):
        """Flattened ``(k, theta)`` arrays, theta-major."""
        kk, tt = np.meshgrid(self.k_values(), self.thetas())
        return kk.ravel(), tt.ravel()

    def as_dict(self) -> dict:
        return {"k_max": self.k_max, "dk": self.dk, "n_theta": self.n_theta}


@dataclass(frozen=True)
class CharFnGrid:
    """Sampled values of ``chi`` at points ``(k[i], theta[i])``.

    ``mode="exact"`` stores ``chi``; ``mode="sampled"`` stores per-point
    ground-state frequencies for the two canonical preparations.
    """

    mode: str
    k: np.ndarray
    theta: np.ndarray
    chi_values: Optional[np.ndarray] = None
    counts: Optional[np.ndarray] = None  # (P, 2) ints, columns cos/sin
    shots: int = 0
    controls: Optional[tuple] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown grid mode {self.mode!r}")
        object.__setattr__(self, "k", np.asarray(self.k, dtype=float))
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))

    def __len__(self) -> int:
        return len(self.k)

    @property
    def p_hat(self) -> np.ndarray:
        return self.counts / self.shots

    def chi(self) -> np.ndarray:
        if self.mode == "exact":
            return np.asarray(self.chi_values)
        return char_fn_from_pg(self.p_hat[:, 0], self.p_hat[:, 1])

    def chi_stderr(self) -> np.ndarray:
        """Binomial standard error of ``|chi|`` estimates (zeros in exact mode)."""
        if self.mode == "exact":
            return np.zeros(len(self))
        p = self.p_hat
        var = 4.0 * p * (1.0 - p) / self.shots
        return np.sqrt(var.sum(axis=1))

    def validate(self) -> "CharFnGrid":
        if self.mode == "exact":
            chi = self.chi()
            at0 = self.k == 0
            if np.any(np.abs(chi[at0] - 1.0) > 1e-12):
                raise InvalidProbabilityError("chi(0, theta) must equal 1")
            lookup = {(round(k, 12), round(t, 12)): c for k, t, c in zip(self.k, self.theta, chi)}
            for (k, t), c in lookup.items():
                mirror = lookup.get((round(-k, 12), t))
                if mirror is not None and abs(mirror - np.conj(c)) > 1e-10:
                    raise InvalidProbabilityError(f"chi(-k, theta) != conj chi(k, theta) at k={k}")
        else:
            if self.shots < 1:
                raise InvalidProbabilityError("shots must be >= 1")
            p = self.p_hat
            if np.any((p < 0) | (p > 1)):
                raise InvalidProbabilityError("estimates outside [0, 1]")
        return self

    def on_mesh(self, quad: QuadSpec) -> np.ndarray:
        """``chi`` arranged as ``(n_theta, n_k)`` on the quadrature mesh.

        Points with theta outside ``[0, pi)`` are folded back using
        ``chi(k, theta + pi) = conj chi(k, theta)``; k = 0 points are skipped.
        """
        if len(self) == 0:
            raise EmptyGridError("grid has no points")
        chi = self.chi()
        nk, nt = quad.n_k, quad.n_theta
        out = np.full((nt, nk), np.nan + 0j)
        for k, th, c in zip(self.k, self.theta, chi):
            if k == 0:
                continue
            if k < 0:
                k, c = -k, np.conj(c)
                th = th + np.pi
            th = float(np.mod(th, 2 * np.pi))
            if th >= np.pi - 1e-12:
                th -= np.pi
                c = np.conj(c)
            ik = int(round(k / quad.dk))
            jt = int(round(th * nt / np.pi - 0.5))
            if (
                not 1 <= ik <= nk
                or abs(ik * quad.dk - k) > 1e-9
                or not 0 <= jt < nt
                or abs((jt + 0.5) * np.pi / nt - th) > 1e-9
            ):
                raise ValueError(f"point (k={k}, theta={th}) is not on the quadrature mesh")
            out[jt, ik - 1] = c
        missing = int(np.isnan(out.real).sum())
        if missing:
            raise ValueError(f"grid does not cover the quadrature mesh ({missing} nodes missing)")
        return out


def exact_grid(rho: IonState, quad: QuadSpec = QuadSpec(), n: Optional[int] = None) -> CharFnGrid:
    """Noiseless grid on the quadrature mesh (no physical controls attached)."""
    ks, ts = quad.mesh()
    return CharFnGrid("exact", ks, ts, chi_values=char_fn_points(rho, ks, ts, n))


def scan_plan(
    params: DriveParams,
    quad: QuadSpec = QuadSpec(),
    tau: float = np.pi,
    omega_bounds: tuple[float, float] = (0.0, np.inf),
) -> list[ControlPoint]:
    """Fixed-tau scan: Omega sweeps k, a prior free evolution sweeps theta."""
    ks, ts = quad.mesh()
    return [plan_control(k, t, params.eta, tau, omega_bounds) for k, t in zip(ks, ts)]


def _ground_probabilities(rho: IonState, controls: Sequence[ControlPoint], params, n):
    lams = np.array(
        [
            probed_amplitude(params.with_omega(c.omega_ratio_used), c.tau_used, c.free_evolution)
            for c in controls
        ]
    )
    ks = np.abs(lams)
    ths = np.angle(-1j * lams)
    chi = char_fn_points(rho, ks, ths, n)
    m = _prep_matrix(CANONICAL_PREPS)
    pg = 0.5 + np.stack([chi.real, chi.imag], axis=1) @ m.T
    return np.clip(pg, 0.0, 1.0)


def simulate_scan(
    rho_true: IonState,
    grid: Sequence[ControlPoint],
    shots: int,
    seed: int,
    params: DriveParams,
    n: Optional[int] = None,
    *,
    workers: int = 1,
    omega_bounds: tuple[float, float] = (0.0, np.inf),
) -> CharFnGrid:
    """Binomial measurement record for both canonical preparations at every point.

    Each point draws from its own generator spawned from ``seed``, so the
    record does not depend on ``workers``.
    """
    if shots < 1:
        raise InvalidProbabilityError(f"shots must be >= 1, got {shots}")
    if len(grid) == 0:
        raise EmptyGridError("no control points")
    lo, hi = omega_bounds
    for c in grid:
        if not lo <= c.omega_ratio_used <= hi:
            raise InfeasibleControlError(
                f"Omega/nu = {c.omega_ratio_used} outside [{lo}, {hi}]"
            )
    pg = _ground_probabilities(rho_true, grid, params, n)
    seqs = np.random.SeedSequence(seed).spawn(len(grid))
    counts = np.empty((len(grid), 2), dtype=np.int64)

    def draw(idx: range) -> None:
        for i in idx:
            counts[i] = np.random.default_rng(seqs[i]).binomial(shots, pg[i])

    chunks = [range(i, min(i + 256, len(grid))) for i in range(0, len(grid), 256)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(draw, chunks))
    else:
        for c in chunks:
            draw(c)
    return CharFnGrid(
        "sampled",
        [c.k for c in grid],
        [c.theta for c in grid],
        counts=counts,
        shots=int(shots),
        controls=tuple(grid),
        meta={"seed": int(seed), "params": params},
    )


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class ReconstructionResult:
    """Estimate plus diagnostics.

    ``fidelity_vs_truth`` is scored on the positive unit-trace projection of
    ``rho`` so that an unphysical estimate cannot report more than one.
    """

    rho: IonState
    raw: np.ndarray
    trace_error: float
    hermiticity_error: float
    grid_spec: QuadSpec
    fidelity_vs_truth: Optional[float] = None
    min_eigenvalue: float = 0.0
    quadrature_estimate: float = 0.0
    warnings: tuple = ()


@functools.lru_cache(maxsize=16384)
def _expm_kernel(k_key: int, t_key: int, n_out: int, n_work: int) -> np.ndarray:
    k, th = k_key * _ANGLE_KEY, t_key * _ANGLE_KEY
    x = fock.quadrature(n_work, th)
    m = fock.herm_exp(x, -1j * k).matrix[:n_out, :n_out].copy()
    m.setflags(write=False)
    return m


def kernel_matrix(k: float, theta: float, n_out: int, method: str = "displacement", n_work=None):
    """``<m|exp(-i k X_theta)|n>`` for ``m, n < n_out``.

    ``"displacement"`` uses exact matrix elements of ``D(-i k e^{i theta})``;
    ``"herm_exp"`` exponentiates ``X_theta`` on ``n_work`` levels (cached).
    """
    if method == "displacement":
        return kernels.displacement_matrix(complex(-1j * k * np.exp(1j * theta)), n_out)
    if method == "herm_exp":
        n_work = n_out + 40 if n_work is None else n_work
        return _expm_kernel(
            int(round(k / _ANGLE_KEY)), int(round(theta / _ANGLE_KEY)), n_out, n_work
        )
    raise ValueError(f"unknown kernel method {method!r}")


def _project_psd_unit_trace(rho: np.ndarray) -> np.ndarray:
    """Frobenius-nearest unit-trace PSD matrix (eigenvalues projected onto the simplex)."""
    w, v = np.linalg.eigh(rho)
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(u) + 1)
    r = np.nonzero(u - css / idx > 0)[0][-1]
    shift = css[r] / (r + 1)
    lam = np.clip(w - shift, 0.0, None)
    return (v * lam) @ v.conj().T


def reconstruct(
    grid: CharFnGrid,
    n_out: int = 24,
    quad: QuadSpec = QuadSpec(),
    *,
    psd_repair: bool = False,
    truth: Optional[IonState] = None,
    kernel: str = "displacement",
    n_work: Optional[int] = None,
    quad_tol: float = QUAD_TOL,
    kink_correction: bool = True,
) -> ReconstructionResult:
    """Invert the kernel integral on the product mesh.

    Negative k nodes come from Hermitian symmetry, which makes the raw
    estimate ``A + A^dag`` with ``A`` the k > 0 half-sum, plus the end
    correction for the ``|k|`` kink at the origin. The raw matrix is
    then Hermitized and trace-normalized; ``psd_repair`` additionally
    projects onto unit-trace positive matrices.
    """
    fock._check_dim(n_out)
    chi = grid.on_mesh(quad)
    kw = quad.k_weights() * quad.k_values() / quad.n_theta
    coeff = (chi * kw[None, :]).ravel()
    kk, tt = quad.mesh()

    if kernel == "displacement":
        lams = -1j * kk * np.exp(1j * tt)
        half = kernels.displacement_sum(lams, coeff, n_out)
    else:
        half = np.zeros((n_out, n_out), complex)
        for c, k, t in zip(coeff, kk, tt):
            half += c * kernel_matrix(k, t, n_out, kernel, n_work)
    raw = half + half.conj().T
    if kink_correction:
        # |k| has a kink at k = 0 where chi = 1 exactly: the trapezoid rule
        # undershoots by dk^2/6 times the identity (Euler-Maclaurin end term)
        raw = raw + (quad.dk**2 / 6.0) * np.eye(n_out)

    herm_err = float(np.abs(raw - raw.conj().T).max())
    tr = np.trace(raw)
    trace_err = float(abs(tr - 1.0))
    rho = 0.5 * (raw + raw.conj().T)
    rho = rho / np.real(tr)
    if psd_repair:
        rho = _project_psd_unit_trace(rho)
    rho = 0.5 * (rho + rho.conj().T)

    edge = np.abs(chi[:, -1]) - 3.0 * _edge_stderr(grid, quad)
    quad_est = float(quad.k_max * max(edge.max(), 0.0))
    notes = []
    if quad_est > quad_tol:
        notes.append(
            f"chi has not decayed at k_max={quad.k_max} (tail estimate {quad_est:.2e}); "
            "increase k_max"
        )
    state = IonState.density(rho, fock.vib_space(n_out))
    f = None
    if truth is not None:
        # score a physical state: a non-PSD estimate can push <psi|rho|psi> above one
        scored = state if psd_repair else IonState.density(_project_psd_unit_trace(rho), state.space)
        f = fidelity(_match_dim(truth, n_out), scored)
    return ReconstructionResult(
        rho=state,
        raw=raw,
        trace_error=trace_err,
        hermiticity_error=herm_err,
        grid_spec=quad,
        fidelity_vs_truth=f,
        min_eigenvalue=float(np.linalg.eigvalsh(rho).min()),
        quadrature_estimate=quad_est,
        warnings=tuple(notes),
    )


def _edge_stderr(grid: CharFnGrid, quad: QuadSpec) -> np.ndarray:
    if grid.mode == "exact":
        return np.zeros(quad.n_theta)
    sel = np.isclose(np.abs(grid.k), quad.k_max)
    err = grid.chi_stderr()[sel]
    return np.full(quad.n_theta, err.max() if err.size else 0.0)


def _match_dim(state: IonState, n: int) -> IonState:
    """Zero-pad or crop a vibrational state to ``n`` levels (no renormalization)."""
    m = state.dim
    if m == n:
        return state
    if state.is_pure:
        v = np.zeros(n, complex)
        k = min(m, n)
        v[:k] = state.data[:k]
        return IonState.pure(v, fock.vib_space(n))
    return IonState.density(_pad(state.data, n) if n > m else state.data[:n, :n], fock.vib_space(n))


# ---------------------------------------------------------------------------
# Wigner diagnostic


def wigner_from_chi(grid: CharFnGrid, xs, ps, quad: QuadSpec = QuadSpec()) -> np.ndarray:
    """Wigner function ``W[i, j] = W(xs[i], ps[j])`` from an exact grid.

    Phase-space variables satisfy ``a = (x + i p)/sqrt(2)``, so the vacuum
    is ``exp(-x^2 - p^2)/pi``. The polar Fourier integral is evaluated on
    the same mesh as :func:`reconstruct`.
    """
    if grid.mode != "exact":
        raise ValueError("Wigner diagnostic requires an exact (noiseless) grid")
    chi = grid.on_mesh(quad).ravel()
    kk, tt = quad.mesh()
    w = (np.tile(quad.k_weights() * quad.k_values(), quad.n_theta)) * chi
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    cx = np.sqrt(2.0) * np.cos(tt)
    cp = np.sqrt(2.0) * np.sin(tt)
    out = np.empty((len(xs), len(ps)))
    for i, x in enumerate(xs):
        phase = np.exp(-1j * kk[None, :] * (x * cx[None, :] + ps[:, None] * cp[None, :]))
        out[i] = np.real(phase @ w)
    return out / (np.pi * quad.n_theta)
