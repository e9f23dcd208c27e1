"""Kerr-resonator model builders and closed-form eigen-amplitudes.

Hamiltonians for the two-photon (and n-photon) driven Kerr-nonlinear
resonator, the gate Hamiltonians obtained by adding a single-photon drive,
a drive detuning, or a linear two-mode coupling, and the lossy fixed-point
amplitude of the non-Hermitian effective Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedBasisError, TruncationError
from .fock import (
    QuantumOperator,
    annihilation,
    coherent_state,
    identity,
    number_operator,
    tensor,
)

__all__ = [
    "ModelSpec",
    "EigenAmplitude",
    "build_H0",
    "build_Hn",
    "build_Hz",
    "build_Hx",
    "build_Hzz",
    "build_Heff",
    "lossy_eigen_amplitude",
    "displaced_linear_residual",
    "project_to_logical",
    "lowdin_logical_basis",
]


@dataclass(frozen=True)
class ModelSpec:
    """Physical parameters of one simulation, in units where time ~ 1/K.

    K: Kerr amplitude (sign allowed).  Ep: two-photon drive amplitude.
    kappa: single-photon loss rate.  Ez: single-photon drive.  delta_x:
    drive-resonator detuning.  Ezz: linear exchange coupling between two
    resonators.  n_drive: photon order of the drive.  n_trunc: Fock
    truncation per mode.
    """

    K: float = 1.0
    Ep: complex = 0.0
    kappa: float = 0.0
    Ez: float = 0.0
    delta_x: float = 0.0
    Ezz: float = 0.0
    n_drive: int = 2
    n_trunc: int = 20

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.n_trunc < 2:
            raise ValueError(f"n_trunc must be >= 2, got {self.n_trunc}")
        if self.n_drive < 2:
            raise ValueError(f"n_drive must be >= 2, got {self.n_drive}")


@dataclass(frozen=True)
class EigenAmplitude:
    """Lossy fixed-point amplitude alpha0 = r0 exp(i theta0).

    ``below_threshold`` flags drives too weak to beat loss
    (4|Ep|^2 <= kappa^2/4), where the only fixed point is the origin.
    ``branch`` records the sign chosen for theta0.
    """

    r0: float
    theta0: float
    below_threshold: bool = False
    branch: int = field(default=1, compare=False)

    @property
    def alpha0(self) -> complex:
        return self.r0 * np.exp(1j * self.theta0)


def _two_photon_terms(spec: ModelSpec) -> np.ndarray:
    a = annihilation(spec.n_trunc).data
    ad = a.conj().T
    return spec.Ep * (ad @ ad) + np.conj(spec.Ep) * (a @ a)


def build_H0(spec: ModelSpec) -> QuantumOperator:
    """Two-photon driven Kerr Hamiltonian -K a^dag^2 a^2 + Ep a^dag^2 + Ep* a^2."""
    a = annihilation(spec.n_trunc).data
    ad = a.conj().T
    data = -spec.K * (ad @ ad @ a @ a) + _two_photon_terms(spec)
    return QuantumOperator(data, (spec.n_trunc,))


def build_Hn(spec: ModelSpec) -> QuantumOperator:
    """n-photon generalization -K a^dag^n a^n + Ep a^dag^n + Ep* a^n."""
    n = spec.n_drive
    if n > spec.n_trunc / 3:
        raise TruncationError(
            f"n_drive={n} needs n_trunc >= {3 * n}, got {spec.n_trunc}",
            suggested_n=3 * n,
        )
    a = annihilation(spec.n_trunc).data
    an = np.linalg.matrix_power(a, n)
    adn = an.conj().T
    data = -spec.K * (adn @ an) + spec.Ep * adn + np.conj(spec.Ep) * an
    return QuantumOperator(data, (spec.n_trunc,))


def build_Hz(spec: ModelSpec) -> QuantumOperator:
    """H0 plus a single-photon drive Ez (a^dag + a): logical Z rotation."""
    a = annihilation(spec.n_trunc).data
    return build_H0(spec) + QuantumOperator(spec.Ez * (a.conj().T + a), (spec.n_trunc,))


def build_Hx(spec: ModelSpec) -> QuantumOperator:
    """H0 plus a drive detuning delta_x a^dag a: logical X rotation."""
    return build_H0(spec) + spec.delta_x * number_operator(spec.n_trunc)


def build_Hzz(spec: ModelSpec) -> QuantumOperator:
    """Two identical driven KNRs with exchange coupling Ezz (a1^dag a2 + h.c.)."""
    h0 = build_H0(spec)
    one = identity(spec.n_trunc)
    a = annihilation(spec.n_trunc)
    h = tensor(h0, one) + tensor(one, h0)
    exchange = tensor(a.dag(), a) + tensor(a, a.dag())
    return h + spec.Ezz * exchange


def build_Heff(spec: ModelSpec) -> QuantumOperator:
    """Non-Hermitian no-jump Hamiltonian H0 - i kappa a^dag a / 2."""
    return build_H0(spec) + (-0.5j * spec.kappa) * number_operator(spec.n_trunc)


def lossy_eigen_amplitude(spec: ModelSpec) -> EigenAmplitude:
    """Fixed-point amplitude of the displaced-frame linear term.

    r0^4 = (4|Ep|^2 - kappa^2/4) / (4 K^2); the angle is fixed by
    exp(-2 i theta0) = (2 K r0^2 + i kappa/2) / (2 Ep), which makes the
    displaced linear residual vanish identically (this is the operational
    branch choice; the residual is the unambiguous oracle).
    """
    ep2 = 4.0 * abs(spec.Ep) ** 2
    if ep2 <= spec.kappa**2 / 4.0:
        return EigenAmplitude(r0=0.0, theta0=0.0, below_threshold=True)
    r0 = ((ep2 - spec.kappa**2 / 4.0) / (4.0 * spec.K**2)) ** 0.25
    phase = (2.0 * spec.K * r0**2 + 0.5j * spec.kappa) / (2.0 * spec.Ep)
    theta0 = -0.5 * np.angle(phase)
    branch = 1 if theta0 >= 0 else -1
    return EigenAmplitude(r0=r0, theta0=float(theta0), branch=branch)


def displaced_linear_residual(spec: ModelSpec, alpha0: complex) -> complex:
    """Linear term left after displacing Heff by alpha0.

    Vanishes exactly at alpha0 = 0 and at the two lossy eigen-amplitudes.
    """
    return (
        -2.0 * spec.K * alpha0**2 * np.conj(alpha0)
        + 2.0 * spec.Ep * np.conj(alpha0)
        - 0.5j * spec.kappa * alpha0
    )


def displaced_energy_constant(spec: ModelSpec, alpha0: complex) -> complex:
    """Energy shift dropped when displacing Heff: the eigenvalue of |+-alpha0>."""
    return (
        -spec.K * abs(alpha0) ** 4
        + np.conj(spec.Ep) * alpha0**2
        + spec.Ep * np.conj(alpha0) ** 2
        - 0.5j * spec.kappa * abs(alpha0) ** 2
    )


def lowdin_logical_basis(alpha0: complex, n_trunc: int) -> np.ndarray:
    """Columns |0bar>, |1bar>: symmetric orthonormalization of |+-alpha0>.

    Loewdin keeps the +-alpha exchange symmetry, so the even/odd cats are
    exactly (|0bar> +- |1bar>)/sqrt(2).
    """
    overlap = np.exp(-2.0 * abs(alpha0) ** 2)
    if overlap > 0.99:
        raise IllConditionedBasisError(
            f"|<alpha|-alpha>| = {overlap:.4f} > 0.99: coherent basis is degenerate"
        )
    plus = coherent_state(alpha0, n_trunc).amplitudes
    minus = coherent_state(-alpha0, n_trunc).amplitudes
    v = np.column_stack([plus, minus])
    gram = v.conj().T @ v
    w, u = np.linalg.eigh(gram)
    gram_inv_sqrt = u @ np.diag(w**-0.5) @ u.conj().T
    return v @ gram_inv_sqrt


def project_to_logical(op: QuantumOperator, alpha0: complex) -> np.ndarray:
    """2x2 matrix elements of ``op`` in the orthonormalized logical basis."""
    if len(op.mode_dims) != 1:
        raise ValueError("logical projection is defined per mode")
    basis = lowdin_logical_basis(alpha0, op.mode_dims[0])
    return basis.conj().T @ op.data @ basis
