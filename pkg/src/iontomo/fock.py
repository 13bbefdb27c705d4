"""Truncated Fock-space linear algebra for one vibrational mode and a two-level atom.

Conventions
-----------
* Composite space is ``atom ⊗ vibration`` with the atom as the slow index,
  so composite index ``i = 2-level index * N + Fock index``.
* Atomic basis order is ``{|g>, |e>}`` (index 0 is the ground state).
* ``sigma_z = |e><e| - |g><g|`` and ``sigma_+ = |e><g|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ContractViolation, InvalidDimensionError, SpaceMismatchError

HERMITIAN_ATOL = 1e-12
LEAKAGE_TOL = 1e-8


@dataclass(frozen=True)
class Space:
    """Tag for the Hilbert space an operator or state lives on.

    ``kind`` is one of ``"vib"``, ``"atom"`` or ``"composite"``; ``n`` is the
    number of vibrational levels (2 for the bare atom).
    """

    kind: str
    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n if self.kind == "composite" else self.n

    def __str__(self) -> str:
        if self.kind == "vib":
            return f"Vibrational({self.n})"
        if self.kind == "atom":
            return "Atom(2)"
        return f"Composite({self.dim})"


ATOM = Space("atom", 2)


def vib_space(n: int) -> Space:
    return Space("vib", n)


def composite_space(n: int) -> Space:
    return Space("composite", n)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with its space and structural flags."""

    matrix: np.ndarray
    space: Space
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise InvalidDimensionError(
                f"matrix shape {m.shape} does not match {self.space}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.space, self.hermitian, self.unitary)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if other.space != self.space:
                raise SpaceMismatchError(f"{self.space} @ {other.space}")
            return Operator(self.matrix @ other.matrix, self.space)
        return self.matrix @ np.asarray(other)

    def __add__(self, other: "Operator") -> "Operator":
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} + {other.space}")
        return Operator(
            self.matrix + other.matrix,
            self.space,
            hermitian=self.hermitian and other.hermitian,
        )

    def __sub__(self, other: "Operator") -> "Operator":
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} - {other.space}")
        return Operator(
            self.matrix - other.matrix,
            self.space,
            hermitian=self.hermitian and other.hermitian,
        )

    def scale(self, c: complex) -> "Operator":
        herm = self.hermitian and np.imag(c) == 0
        return Operator(c * self.matrix, self.space, hermitian=herm)

    def expect(self, state: "IonState") -> complex:
        return state.expect(self.matrix)


@dataclass(frozen=True)
class TruncationReport:
    dim_used: int
    top_level_population: float
    tolerance: float = LEAKAGE_TOL

    @property
    def leakage_flag(self) -> bool:
        return self.top_level_population > self.tolerance


@dataclass(frozen=True)
class IonState:
    """Pure vector or density matrix on a tagged space.

    Construction does not validate; call :meth:`validate` where the
    normalization/positivity invariants are required. Raw tomographic
    estimates are legitimately non-positive and are stored unvalidated.
    """

    kind: str  # "pure" | "dm"
    data: np.ndarray
    space: Space
    report: Optional[TruncationReport] = field(default=None, compare=False)

    def __post_init__(self):
        d = _frozen(self.data)
        dim = self.space.dim
        if self.kind == "pure":
            if d.shape != (dim,):
                raise InvalidDimensionError(f"vector shape {d.shape} vs {self.space}")
        elif self.kind == "dm":
            if d.shape != (dim, dim):
                raise InvalidDimensionError(f"matrix shape {d.shape} vs {self.space}")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        object.__setattr__(self, "data", d)

    @classmethod
    def pure(cls, vec, space: Space, report=None) -> "IonState":
        return cls("pure", vec, space, report)

    @classmethod
    def density(cls, rho, space: Space, report=None) -> "IonState":
        return cls("dm", rho, space, report)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def dim(self) -> int:
        return self.space.dim

    def to_dm(self) -> "IonState":
        if self.kind == "dm":
            return self
        v = self.data
        return IonState("dm", np.outer(v, v.conj()), self.space, self.report)

    def dm(self) -> np.ndarray:
        """Density matrix as a plain array."""
        if self.kind == "dm":
            return self.data
        return np.outer(self.data, self.data.conj())

    def expect(self, op) -> complex:
        m = op.matrix if isinstance(op, Operator) else np.asarray(op)
        if self.kind == "pure":
            return complex(np.vdot(self.data, m @ self.data))
        return complex(np.trace(m @ self.data))

    def norm(self) -> float:
        if self.kind == "pure":
            return float(np.linalg.norm(self.data))
        return float(np.real(np.trace(self.data)))

    def validate(self) -> "IonState":
        """Check normalization, Hermiticity and positivity; return self."""
        if self.kind == "pure":
            if abs(np.linalg.norm(self.data) - 1.0) > 1e-10:
                raise ContractViolation("state vector is not normalized")
            return self
        rho = self.data
        if np.abs(rho - rho.conj().T).max() > HERMITIAN_ATOL:
            raise ContractViolation("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise ContractViolation("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise ContractViolation("density matrix has negative eigenvalues")
        return self


Array = Union[np.ndarray, Operator]


def _check_dim(n: int) -> None:
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n}")


def _as_array(m: Array) -> np.ndarray:
    return m.matrix if isinstance(m, Operator) else np.asarray(m, dtype=complex)


# ---------------------------------------------------------------------------
# vibrational operators


def annihilation(n: int) -> Operator:
    _check_dim(n)
    return Operator(np.diag(np.sqrt(np.arange(1, n)), 1), vib_space(n))


def creation(n: int) -> Operator:
    return annihilation(n).dag()


def number(n: int) -> Operator:
    _check_dim(n)
    return Operator(np.diag(np.arange(n, dtype=float)), vib_space(n), hermitian=True)


def identity(space: Space) -> Operator:
    return Operator(np.eye(space.dim), space, hermitian=True, unitary=True)


def quadrature(n: int, theta: float = 0.0) -> Operator:
    """``a e^{-i theta} + a^dag e^{i theta}``; ``theta=0`` is the position operator a + a^dag."""
    a = annihilation(n).matrix
    m = a * np.exp(-1j * theta)
    # symmetrize explicitly so the Hermitian flag holds bit-exactly
    return Operator(m + m.conj().T, vib_space(n), hermitian=True)


def position(n: int) -> Operator:
    return quadrature(n, 0.0)


def parity(n: int) -> Operator:
    _check_dim(n)
    return Operator(
        np.diag((-1.0) ** np.arange(n)), vib_space(n), hermitian=True, unitary=True
    )


# ---------------------------------------------------------------------------
# atomic operators, basis {|g>, |e>}


def sigma_z() -> Operator:
    return Operator(np.diag([-1.0, 1.0]), ATOM, hermitian=True, unitary=True)


def sigma_plus() -> Operator:
    return Operator(np.array([[0, 0], [1, 0]]), ATOM)


def sigma_minus() -> Operator:
    return Operator(np.array([[0, 1], [0, 0]]), ATOM)


def sigma_x() -> Operator:
    return Operator(np.array([[0, 1], [1, 0]]), ATOM, hermitian=True, unitary=True)


def atom_ket(label: str) -> np.ndarray:
    if label not in ("g", "e"):
        raise ValueError(f"atomic label must be 'g' or 'e', got {label!r}")
    return np.array([1.0, 0.0]) if label == "g" else np.array([0.0, 1.0])


# ---------------------------------------------------------------------------
# exponentials


def expm_hermitian(m: np.ndarray, s: complex) -> np.ndarray:
    """``exp(s*m)`` for a Hermitian array via ``eigh``; no checks."""
    w, v = np.linalg.eigh(m)
    return (v * np.exp(s * w)) @ v.conj().T


def herm_exp(m: Array, s: complex) -> Operator:
    """Exponential ``exp(s M)`` of a Hermitian operator by eigendecomposition.

    Purely imaginary ``s`` gives a unitary; real ``s`` a Hermitian result.
    """
    arr = _as_array(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolation("herm_exp needs a square matrix")
    if np.abs(arr - arr.conj().T).max() > HERMITIAN_ATOL:
        raise ContractViolation("herm_exp needs a Hermitian operator")
    space = m.space if isinstance(m, Operator) else vib_space(arr.shape[0])
    s = complex(s)
    return Operator(
        expm_hermitian(arr, s),
        space,
        hermitian=s.imag == 0,
        unitary=s.real == 0,
    )


def displacement_generator(n: int, alpha: complex) -> np.ndarray:
    """Anti-Hermitian ``alpha a^dag - conj(alpha) a`` as an array."""
    a = annihilation(n).matrix
    g = np.conj(alpha) * a
    return g.conj().T - g


def displacement(n: int, alpha: complex) -> Operator:
    """Truncated ``D(alpha) = exp(alpha a^dag - alpha* a)``.

    Computed as ``exp(-i * (i G))`` with ``i G`` Hermitian. Entries near the
    top of the basis carry truncation error when ``|alpha|^2`` is not small
    compared with ``n``.
    """
    _check_dim(n)
    g = displacement_generator(n, alpha)
    return Operator(expm_hermitian(1j * g, -1j), vib_space(n), unitary=True)


# ---------------------------------------------------------------------------
# states


def _report(pops: np.ndarray, tol: float = LEAKAGE_TOL) -> TruncationReport:
    return TruncationReport(len(pops), float(pops[-2:].sum()), tol)


def fock_state(n: int, k: int) -> IonState:
    _check_dim(n)
    if not 0 <= k < n:
        raise InvalidDimensionError(f"Fock level {k} outside 0..{n - 1}")
    v = np.zeros(n, complex)
    v[k] = 1.0
    return IonState.pure(v, vib_space(n))


def vacuum(n: int) -> IonState:
    return fock_state(n, 0)


def coherent_amplitudes(n: int, alpha: complex) -> np.ndarray:
    """Unnormalized-by-truncation amplitudes ``e^{-|a|^2/2} a^k / sqrt(k!)``."""
    c = np.empty(n, complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for k in range(1, n):
        c[k] = c[k - 1] * alpha / np.sqrt(k)
    return c


def coherent_state(n: int, alpha: complex, tol: float = LEAKAGE_TOL) -> IonState:
    """Coherent state renormalized on the truncated basis, with a truncation report."""
    _check_dim(n)
    c = coherent_amplitudes(n, alpha)
    c /= np.linalg.norm(c)
    return IonState.pure(c, vib_space(n), _report(np.abs(c) ** 2, tol))


def truncation_report(state: IonState, tol: float = LEAKAGE_TOL) -> TruncationReport:
    """Population in the two highest Fock levels (summed over the atom if composite)."""
    if state.is_pure:
        pops = np.abs(state.data) ** 2
    else:
        pops = np.real(np.diag(state.data))
    if state.space.kind == "composite":
        pops = pops.reshape(2, state.space.n).sum(axis=0)
    return _report(pops, tol)


# ---------------------------------------------------------------------------
# composite space


def tensor(a: Operator, v: Operator) -> Operator:
    """``a ⊗ v`` with the atom as the slow index."""
    if a.space != ATOM:
        raise SpaceMismatchError(f"first factor must be Atom(2), got {a.space}")
    if v.space.kind != "vib":
        raise SpaceMismatchError(f"second factor must be vibrational, got {v.space}")
    return Operator(
        np.kron(a.matrix, v.matrix),
        composite_space(v.space.n),
        hermitian=a.hermitian and v.hermitian,
        unitary=a.unitary and v.unitary,
    )


def product_state(atom: np.ndarray, vib: IonState) -> IonState:
    """``|atom> ⊗ vib`` for a 2-component atomic vector (or 2x2 density matrix)."""
    if vib.space.kind != "vib":
        raise SpaceMismatchError(f"vibrational factor expected, got {vib.space}")
    atom = np.asarray(atom, dtype=complex)
    space = composite_space(vib.space.n)
    if atom.ndim == 1 and vib.is_pure:
        return IonState.pure(np.kron(atom, vib.data), space)
    rho_a = np.outer(atom, atom.conj()) if atom.ndim == 1 else atom
    return IonState.density(np.kron(rho_a, vib.dm()), space)


def partial_trace_atom(state: IonState) -> IonState:
    """Trace out the atom from a composite state (pure inputs are promoted)."""
    if state.space.kind != "composite":
        raise SpaceMismatchError(f"composite state expected, got {state.space}")
    n = state.space.n
    r = state.dm().reshape(2, n, 2, n)
    return IonState.density(r[0, :, 0, :] + r[1, :, 1, :], vib_space(n))
