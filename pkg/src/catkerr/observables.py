"""Scalar and phase-space diagnostics.

Fidelity follows the square-root (Uhlmann trace-norm) convention
F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)), i.e. F = sqrt(<psi|rho|psi>)
for a pure target.  This is the convention that reproduces the quoted
benchmark percentages; see README.

The Wigner function uses the displaced-parity convention
W(beta) = (2/pi) Tr[D^dag(beta) rho D(beta) P] with beta = x + i p, so the
vacuum peaks at 2/pi and integrates to one over the (x, p) plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, TruncationError
from .fock import (
    DensityMatrix,
    PureState,
    as_density_matrix,
    displacement,
    number_operator,
    parity_operator,
)

__all__ = [
    "WignerGrid",
    "fidelity",
    "wigner",
    "wigner_displaced_parity",
    "parity_expectation",
    "mean_photon",
    "purity",
]


@dataclass(frozen=True)
class WignerGrid:
    """Sampled quasi-probability W(x, p); values[i, j] = W(x_axis[j], p_axis[i])."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_axis, dtype=float)
        p = np.asarray(self.p_axis, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (p.size, x.size):
            raise ValueError(f"values shape {v.shape} != (len(p), len(x))")
        object.__setattr__(self, "x_axis", x)
        object.__setattr__(self, "p_axis", p)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        dx = float(np.mean(np.diff(self.x_axis)))
        dp = float(np.mean(np.diff(self.p_axis)))
        return float(self.values.sum() * dx * dp)

    def peak_location(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.x_axis[j]), float(self.p_axis[i])


def _sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityMatrix | PureState, target: DensityMatrix | PureState) -> float:
    """Uhlmann fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)), on [0, 1]."""
    rho_is_pure = isinstance(rho, PureState)
    tgt_is_pure = isinstance(target, PureState)
    if rho.mode_dims != target.mode_dims:
        raise DimensionMismatchError("fidelity: mode_dims mismatch")
    if rho_is_pure and tgt_is_pure:
        return float(min(1.0, abs(rho.overlap(target))))
    if tgt_is_pure or rho_is_pure:
        psi = target if tgt_is_pure else rho
        dm = as_density_matrix(rho if tgt_is_pure else target)
        val = np.vdot(psi.amplitudes, dm.data @ psi.amplitudes).real
        return float(min(1.0, np.sqrt(max(val, 0.0))))
    sr = _sqrtm_psd(as_density_matrix(rho).data)
    inner = _sqrtm_psd(sr @ as_density_matrix(target).data @ sr)
    return float(min(1.0, np.trace(inner).real))


def parity_expectation(state) -> float:
    dm = as_density_matrix(state)
    if len(dm.mode_dims) != 1:
        raise ValueError("parity_expectation is defined per mode")
    return dm.expectation(parity_operator(dm.mode_dims[0])).real


def mean_photon(state) -> float:
    dm = as_density_matrix(state)
    if len(dm.mode_dims) == 1:
        return dm.expectation(number_operator(dm.mode_dims[0])).real
    # total photon number across modes
    total = 0.0
    data = dm.data
    dims = dm.mode_dims
    for k, _ in enumerate(dims):
        n_diag = np.ones(1)
        for j, dj in enumerate(dims):
            n_diag = np.kron(n_diag, np.arange(dj) if j == k else np.ones(dj))
        total += float(np.real(np.sum(n_diag * np.diag(data))))
    return total


def purity(state) -> float:
    dm = as_density_matrix(state)
    return float(np.trace(dm.data @ dm.data).real)


def _wigner_iterative(rho: np.ndarray, a_grid: np.ndarray) -> np.ndarray:
    """Laguerre-recurrence evaluation of (2/pi) <D(a) P D^dag(a)> over a grid.

    Accumulates rho_mn times the Wigner function of |m><n| using the
    standard two-index recurrence; O(N^2) per grid point, vectorized over
    the grid.
    """
    m_dim = rho.shape[0]
    w_list = np.zeros((m_dim,) + a_grid.shape, dtype=complex)
    w_list[0] = np.exp(-2.0 * np.abs(a_grid) ** 2) / np.pi

    w = np.real(rho[0, 0]) * np.real(w_list[0])
    for n in range(1, m_dim):
        w_list[n] = (2.0 * a_grid * w_list[n - 1]) / np.sqrt(n)
        w += 2.0 * np.real(rho[0, n] * w_list[n])
    for m in range(1, m_dim):
        temp = w_list[m].copy()
        w_list[m] = (2.0 * np.conj(a_grid) * temp - np.sqrt(m) * w_list[m - 1]) / np.sqrt(m)
        w += np.real(rho[m, m] * w_list[m])
        for n in range(m + 1, m_dim):
            temp2 = (2.0 * a_grid * w_list[n - 1] - np.sqrt(m) * temp) / np.sqrt(n)
            temp = w_list[n].copy()
            w_list[n] = temp2
            w += 2.0 * np.real(rho[m, n] * w_list[n])
    return 2.0 * w


def wigner(state, x_axis=None, p_axis=None, span: float | None = None, points: int = 201) -> WignerGrid:
    """Wigner function over a rectangular (x, p) grid.

    Default grid: ``points`` x ``points`` over +-(sqrt(<n>) + 4) in both
    quadratures.  Raises TruncationError when the grid reaches amplitudes
    the truncation cannot represent.
    """
    dm = as_density_matrix(state)
    if len(dm.mode_dims) != 1:
        raise ValueError("wigner is defined for a single mode")
    n_trunc = dm.mode_dims[0]
    if x_axis is None or p_axis is None:
        if span is None:
            span = float(np.sqrt(max(mean_photon(dm), 0.0)) + 4.0)
        axis = np.linspace(-span, span, points)
        x_axis = axis if x_axis is None else np.asarray(x_axis, float)
        p_axis = axis if p_axis is None else np.asarray(p_axis, float)
    else:
        x_axis = np.asarray(x_axis, float)
        p_axis = np.asarray(p_axis, float)
    beta_max = np.sqrt(np.max(np.abs(x_axis)) ** 2 + np.max(np.abs(p_axis)) ** 2)
    if beta_max**2 > n_trunc:
        raise TruncationError(
            f"grid reaches |beta|={beta_max:.2f}, beyond truncation {n_trunc}",
            suggested_n=int(np.ceil(beta_max**2)) + 1,
        )
    xg, pg = np.meshgrid(x_axis, p_axis)
    values = _wigner_iterative(np.asarray(dm.data), xg + 1j * pg)
    return WignerGrid(x_axis=x_axis, p_axis=p_axis, values=values)


def wigner_displaced_parity(state, x_axis, p_axis) -> WignerGrid:
    """Direct pointwise W(beta) = (2/pi) Tr[D^dag(beta) rho D(beta) P].

    Independent (and slow) oracle for the recurrence-based ``wigner``.
    """
    dm = as_density_matrix(state)
    n_trunc = dm.mode_dims[0]
    par = parity_operator(n_trunc).data
    values = np.empty((len(p_axis), len(x_axis)))
    for i, p in enumerate(p_axis):
        for j, x in enumerate(x_axis):
            d = displacement(x + 1j * p, n_trunc).data
            values[i, j] = (2.0 / np.pi) * np.trace(
                d.conj().T @ dm.data @ d @ par
            ).real
    return WignerGrid(x_axis=np.asarray(x_axis, float),
                      p_axis=np.asarray(p_axis, float), values=values)
