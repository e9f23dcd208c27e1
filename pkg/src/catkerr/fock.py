"""Truncated Fock-space operators and states.

All objects are dense numpy arrays wrapped with mode-dimension metadata.
Values are immutable after construction (arrays carry ``writeable=False``)
and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatchError, TruncationError

__all__ = [
    "QuantumOperator",
    "PureState",
    "DensityMatrix",
    "annihilation",
    "creation",
    "number_operator",
    "identity",
    "parity_operator",
    "coherent_state",
    "cat_state",
    "fock_state",
    "displacement",
    "tensor",
    "tensor_states",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.setflags(write=False)
    return a


def _check_mode_dims(data_side: int, mode_dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in mode_dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"mode_dims must be positive, got {dims}")
    if math.prod(dims) != data_side:
        raise DimensionMismatchError(
            f"mode_dims {dims} imply dimension {math.prod(dims)}, data has {data_side}"
        )
    return dims


@dataclass(frozen=True)
class QuantumOperator:
    """Complex square matrix on a truncated (possibly multi-mode) Fock space."""

    data: np.ndarray
    mode_dims: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator data must be square, got shape {data.shape}")
        dims = _check_mode_dims(data.shape[0], self.mode_dims)
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "mode_dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "QuantumOperator":
        return QuantumOperator(self.data.conj().T, self.mode_dims)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return np.max(np.abs(self.data - self.data.conj().T)) <= tol

    def _coerce(self, other):
        if isinstance(other, QuantumOperator):
            if other.mode_dims != self.mode_dims:
                raise DimensionMismatchError(
                    f"mode_dims mismatch: {self.mode_dims} vs {other.mode_dims}"
                )
            return other.data
        return other

    def __add__(self, other):
        return QuantumOperator(self.data + self._coerce(other), self.mode_dims)

    def __sub__(self, other):
        return QuantumOperator(self.data - self._coerce(other), self.mode_dims)

    def __mul__(self, scalar):
        return QuantumOperator(self.data * scalar, self.mode_dims)

    __rmul__ = __mul__

    def __neg__(self):
        return QuantumOperator(-self.data, self.mode_dims)

    def __matmul__(self, other):
        if isinstance(other, PureState):
            if other.mode_dims != self.mode_dims:
                raise DimensionMismatchError("operator/state mode_dims mismatch")
            return self.data @ other.amplitudes
        return QuantumOperator(self.data @ self._coerce(other), self.mode_dims)

    def commutator(self, other: "QuantumOperator") -> "QuantumOperator":
        return self @ other - other @ self


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a truncated Fock space."""

    amplitudes: np.ndarray
    mode_dims: tuple[int, ...]

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = _check_mode_dims(amp.shape[0], self.mode_dims)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        if abs(norm - 1.0) > 1e-12:
            amp = amp / norm
        object.__setattr__(self, "amplitudes", _freeze(amp))
        object.__setattr__(self, "mode_dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap(self, other: "PureState") -> complex:
        if other.mode_dims != self.mode_dims:
            raise DimensionMismatchError("state mode_dims mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, op: QuantumOperator) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self))

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.mode_dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, (numerically) positive state matrix."""

    data: np.ndarray
    mode_dims: tuple[int, ...]
    validate: bool = field(default=True, compare=False)

    HERMITICITY_TOL = 1e-10
    TRACE_TOL = 1e-8
    POSITIVITY_TOL = 1e-8

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"density matrix must be square, got {data.shape}")
        dims = _check_mode_dims(data.shape[0], self.mode_dims)
        if self.validate:
            herm = np.max(np.abs(data - data.conj().T))
            if herm > self.HERMITICITY_TOL:
                raise ValueError(f"density matrix not Hermitian: deviation {herm:.3e}")
            tr = np.trace(data).real
            if abs(tr - 1.0) > self.TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} != 1")
            wmin = np.linalg.eigvalsh((data + data.conj().T) / 2).min()
            if wmin < -self.POSITIVITY_TOL:
                raise ValueError(f"density matrix has negative eigenvalue {wmin:.3e}")
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "mode_dims", dims)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def expectation(self, op: QuantumOperator) -> complex:
        if op.mode_dims != self.mode_dims:
            raise DimensionMismatchError("operator/state mode_dims mismatch")
        return complex(np.trace(op.data @ self.data))


def as_density_matrix(state) -> DensityMatrix:
    """Accept a PureState or DensityMatrix and return a DensityMatrix."""
    if isinstance(state, PureState):
        return state.to_density_matrix()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state)}")


# ---------------------------------------------------------------------------
# single-mode operators
# ---------------------------------------------------------------------------

def annihilation(n_trunc: int) -> QuantumOperator:
    """Annihilation operator: <n-1|a|n> = sqrt(n) on the first n_trunc levels."""
    if n_trunc < 2:
        raise TruncationError(f"annihilation needs n_trunc >= 2, got {n_trunc}")
    data = np.diag(np.sqrt(np.arange(1, n_trunc, dtype=float)), k=1)
    return QuantumOperator(data, (n_trunc,))


def creation(n_trunc: int) -> QuantumOperator:
    return annihilation(n_trunc).dag()


def number_operator(n_trunc: int) -> QuantumOperator:
    return QuantumOperator(np.diag(np.arange(n_trunc, dtype=float)), (n_trunc,))


def identity(mode_dims) -> QuantumOperator:
    if isinstance(mode_dims, int):
        mode_dims = (mode_dims,)
    dim = math.prod(mode_dims)
    return QuantumOperator(np.eye(dim), tuple(mode_dims))


def parity_operator(n_trunc: int) -> QuantumOperator:
    """Photon-number parity (-1)^n; the conserved label of two-photon driving."""
    if n_trunc < 1:
        raise TruncationError(f"parity needs n_trunc >= 1, got {n_trunc}")
    return QuantumOperator(np.diag((-1.0) ** np.arange(n_trunc)), (n_trunc,))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _require_adequate(alpha: complex, n_trunc: int, budget: float, what: str):
    """Reject amplitudes whose Poisson tail mass leaks past the truncation.

    |alpha|^2 <= n_trunc * budget keeps the neglected tail below ~1e-10.
    """
    need = abs(alpha) ** 2 / budget
    if need > n_trunc:
        raise TruncationError(
            f"{what}: |alpha|^2 = {abs(alpha)**2:.3f} exceeds n_trunc*{budget} "
            f"with n_trunc={n_trunc}",
            suggested_n=int(np.ceil(need)) + 1,
        )


def fock_state(n: int, n_trunc: int) -> PureState:
    if not 0 <= n < n_trunc:
        raise TruncationError(f"Fock level {n} outside truncation {n_trunc}")
    amp = np.zeros(n_trunc, dtype=complex)
    amp[n] = 1.0
    return PureState(amp, (n_trunc,))


def _coherent_amplitudes(alpha: complex, n_trunc: int) -> np.ndarray:
    # c_n = exp(-|a|^2/2) a^n / sqrt(n!), built by stable recurrence
    amp = np.empty(n_trunc, dtype=complex)
    amp[0] = np.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, n_trunc):
        amp[n] = amp[n - 1] * alpha / np.sqrt(n)
    return amp


def coherent_state(alpha: complex, n_trunc: int) -> PureState:
    """Coherent state |alpha>, renormalized after truncation."""
    if n_trunc < 2:
        raise TruncationError(f"coherent_state needs n_trunc >= 2, got {n_trunc}")
    _require_adequate(alpha, n_trunc, 0.5, "coherent_state")
    return PureState(_coherent_amplitudes(alpha, n_trunc), (n_trunc,))


def cat_state(alpha: complex, parity: str, n_trunc: int) -> PureState:
    """Even/odd cat state, the normalized superposition of |alpha> and |-alpha>.

    The alpha -> 0 limit is the Fock state |0> (even) or |1> (odd); the odd
    branch is defined by the normalized limit so the protocol initial
    condition |1> is representable.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if n_trunc < 2:
        raise TruncationError(f"cat_state needs n_trunc >= 2, got {n_trunc}")
    _require_adequate(alpha, n_trunc, 0.5, "cat_state")
    sign = 1.0 if parity == "even" else -1.0
    amp = _coherent_amplitudes(alpha, n_trunc)
    minus = amp * (-1.0) ** np.arange(n_trunc)
    combo = amp + sign * minus
    if np.linalg.norm(combo) < 1e-12:
        # degenerate odd limit: direction of d/dalpha at alpha=0 is |1>
        return fock_state(0 if parity == "even" else 1, n_trunc)
    return PureState(combo, (n_trunc,))


def displacement(beta: complex, n_trunc: int) -> QuantumOperator:
    """Displacement unitary D(beta) = exp(beta a^dag - beta* a)."""
    if n_trunc < 2:
        raise TruncationError(f"displacement needs n_trunc >= 2, got {n_trunc}")
    _require_adequate(beta, n_trunc, 0.25, "displacement")
    a = annihilation(n_trunc).data
    return QuantumOperator(expm(beta * a.conj().T - np.conj(beta) * a), (n_trunc,))


# ---------------------------------------------------------------------------
# multi-mode composition
# ---------------------------------------------------------------------------

def tensor(a: QuantumOperator, b: QuantumOperator) -> QuantumOperator:
    """Kronecker product; mode_dims concatenate."""
    return QuantumOperator(np.kron(a.data, b.data), a.mode_dims + b.mode_dims)


def tensor_states(a: PureState, b: PureState) -> PureState:
    return PureState(np.kron(a.amplitudes, b.amplitudes), a.mode_dims + b.mode_dims)
