"""Master-equation time evolution and steady states.

Integrates d(rho)/dt = -i[H(t), rho] + sum_k D[L_k](rho) with an adaptive
embedded Dormand-Prince 5(4) pair (PI step control, Hermiticity
re-symmetrized every accepted step).  For time-independent Hamiltonians a
Krylov fast path propagates the vectorized state with the sparse
Liouvillian exponential; both routes are cross-checked in the tests.

Vectorization is column-stacking throughout: vec(A rho B) =
(B^T kron A) vec(rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    AccuracyError,
    ConvergenceError,
    DimensionMismatchError,
    StiffnessError,
)
from .fock import DensityMatrix, PureState, QuantumOperator, as_density_matrix

__all__ = [
    "EvolutionProblem",
    "Trajectory",
    "evolve",
    "liouvillian",
    "steady_state",
]

DENSE_SUPEROPERATOR_MAX_DIM = 80


def _normalize_collapse(collapse_ops):
    """Accept (rate, op) pairs or operators with the rate already embedded."""
    out = []
    for item in collapse_ops:
        if isinstance(item, QuantumOperator):
            out.append(item)
        else:
            rate, op = item
            if rate < 0:
                raise ValueError(f"collapse rate must be >= 0, got {rate}")
            out.append(math.sqrt(rate) * op)
    return out


@dataclass(frozen=True)
class EvolutionProblem:
    """One master-equation integration.

    ``hamiltonian`` is the static part; ``drive_terms`` is a list of
    (envelope, operator) pairs adding e(t) A + e*(t) A^dag, which keeps
    H(t) Hermitian for any complex envelope.  ``collapse_ops`` entries are
    either (rate, operator) pairs or operators with sqrt(rate) embedded.
    """

    hamiltonian: QuantumOperator
    initial: PureState | DensityMatrix
    t_span: tuple[float, float]
    output_times: tuple[float, ...] = ()
    drive_terms: tuple = ()
    collapse_ops: tuple = ()
    #: optional callable t -> Hermitian ndarray added to H(t); for terms whose
    #: operator structure (not just amplitude) changes in time
    extra_hamiltonian: object = None

    def __post_init__(self):
        dims = self.hamiltonian.mode_dims
        if self.initial.mode_dims != dims:
            raise DimensionMismatchError("initial state dims differ from Hamiltonian")
        ops = _normalize_collapse(self.collapse_ops)
        for op in ops:
            if op.mode_dims != dims:
                raise DimensionMismatchError("collapse operator dims differ")
        for _, op in self.drive_terms:
            if op.mode_dims != dims:
                raise DimensionMismatchError("drive operator dims differ")
        t0, t1 = self.t_span
        if t1 <= t0:
            raise ValueError(f"t_span must be increasing, got {self.t_span}")
        times = tuple(float(t) for t in self.output_times) or (t1,)
        if any(t < t0 - 1e-12 or t > t1 + 1e-12 for t in times):
            raise ValueError("output_times must lie within t_span")
        if list(times) != sorted(times):
            raise ValueError("output_times must be sorted")
        object.__setattr__(self, "collapse_ops", tuple(ops))
        object.__setattr__(self, "drive_terms", tuple(self.drive_terms))
        object.__setattr__(self, "output_times", times)

    @property
    def is_time_dependent(self) -> bool:
        return len(self.drive_terms) > 0 or self.extra_hamiltonian is not None

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim


@dataclass
class Trajectory:
    times: list[float]
    states: list[DensityMatrix]
    stepper_stats: dict = field(default_factory=dict)

    def final(self) -> DensityMatrix:
        return self.states[-1]


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with PI step-size control
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


class _Rhs:
    """rho' = G rho + rho G^dag + sum_k L_k rho L_k^dag with
    G = -iH(t) - (1/2) sum_k L_k^dag L_k."""

    def __init__(self, problem: EvolutionProblem):
        h0 = problem.hamiltonian.data
        self.ls = [op.data for op in problem.collapse_ops]
        self.lds = [ld.conj().T for ld in self.ls]
        damp = sum((ld @ l for l, ld in zip(self.ls, self.lds)), np.zeros_like(h0))
        self.g0 = -1j * h0 - 0.5 * damp
        self.g0d = self.g0.conj().T
        self.drives = [(env, op.data, op.data.conj().T) for env, op in problem.drive_terms]
        self.extra = problem.extra_hamiltonian

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        if self.drives or self.extra is not None:
            g = self.g0.copy()
            for env, op, opd in self.drives:
                e = complex(env(t))
                g -= 1j * (e * op + e.conjugate() * opd)
            if self.extra is not None:
                g -= 1j * np.asarray(self.extra(t))
            gd = g.conj().T
        else:
            g, gd = self.g0, self.g0d
        out = g @ rho + rho @ gd
        for l, ld in zip(self.ls, self.lds):
            out += l @ rho @ ld
        return out


def _error_norm(err, y0, y1, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(rhs, t0, y0, rel_tol, abs_tol):
    f0 = rhs(t0, y0)
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, 1e-2), f0


def evolve(
    problem: EvolutionProblem,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    max_steps: int = 10_000_000,
    trace_tol: float = 1e-4,
) -> Trajectory:
    """Adaptive RK45 integration of the master equation.

    Density matrices are re-symmetrized after every accepted step; trace
    drift beyond ``trace_tol`` raises AccuracyError, step underflow raises
    StiffnessError.
    """
    rhs = _Rhs(problem)
    t0, t1 = problem.t_span
    rho = as_density_matrix(problem.initial).data.copy()
    trace0 = np.trace(rho).real

    t = t0
    h, f0 = _initial_step(rhs, t0, rho, rel_tol, abs_tol)
    k = [f0] + [None] * 6

    out_times = list(problem.output_times)
    out_states: list[DensityMatrix] = []
    out_t: list[float] = []
    next_out = 0
    while next_out < len(out_times) and out_times[next_out] <= t0 + 1e-15:
        out_t.append(out_times[next_out])
        out_states.append(_as_dm(rho, problem))
        next_out += 1

    accepted = rejected = 0
    err_prev = 1.0
    h_min_floor = 1e-14 * max(abs(t1 - t0), 1.0)

    while t < t1 - 1e-14:
        h = min(h, t1 - t)
        if next_out < len(out_times):
            h = min(h, out_times[next_out] - t)
        if h < h_min_floor:
            raise StiffnessError(f"step size underflow at t={t:.6g} (h={h:.3e})")

        for i in range(1, 7):
            yi = rho + h * sum(aij * k[j] for j, aij in enumerate(_DP_A[i]))
            k[i] = rhs(t + _DP_C[i] * h, yi)
        y1 = rho + h * sum(b * k[i] for i, b in enumerate(_DP_B5) if b)
        err = h * sum(e * k[i] for i, e in enumerate(_DP_E) if e)
        errnorm = _error_norm(err, rho, y1, rel_tol, abs_tol)

        if errnorm <= 1.0:
            t += h
            rho = 0.5 * (y1 + y1.conj().T)
            k[0] = k[6]  # FSAL
            accepted += 1
            if next_out < len(out_times) and t >= out_times[next_out] - 1e-12:
                tr = np.trace(rho).real
                if abs(tr - trace0) > trace_tol:
                    raise AccuracyError(
                        f"trace drift {tr - trace0:.3e} exceeds {trace_tol} at t={t:.6g}"
                    )
                out_t.append(out_times[next_out])
                out_states.append(_as_dm(rho, problem))
                next_out += 1
            # PI controller (H211-flavoured exponents for a 5th-order pair);
            # a zero local error (stationary state) gets the floor, not 1/0
            fac = 0.9 * max(errnorm, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            err_prev = max(errnorm, 1e-10)
        else:
            rejected += 1
            fac = max(0.2, 0.9 * errnorm ** (-0.2))
        h *= min(5.0, max(0.2, fac))

        if accepted + rejected > max_steps:
            raise ConvergenceError(f"exceeded {max_steps} steps at t={t:.6g}")

    stats = {"accepted": accepted, "rejected": rejected, "final_step": h}
    return Trajectory(times=out_t, states=out_states, stepper_stats=stats)


def _as_dm(rho: np.ndarray, problem: EvolutionProblem) -> DensityMatrix:
    return DensityMatrix(rho, problem.hamiltonian.mode_dims, validate=False)


# ---------------------------------------------------------------------------
# Liouvillian superoperator and fast constant-H propagation
# ---------------------------------------------------------------------------

def _liouvillian_sparse(h: np.ndarray, collapse: list[np.ndarray]) -> sp.csr_matrix:
    d = h.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    hs = sp.csr_matrix(h)
    lmat = -1j * (sp.kron(eye, hs) - sp.kron(hs.T, eye))
    for ldata in collapse:
        ls = sp.csr_matrix(ldata)
        nl = sp.csr_matrix(ldata.conj().T @ ldata)
        lmat = lmat + sp.kron(ls.conj(), ls) - 0.5 * (
            sp.kron(eye, nl) + sp.kron(nl.T, eye)
        )
    return lmat.tocsr()


def liouvillian(h: QuantumOperator, collapse_ops=()) -> np.ndarray:
    """Dense superoperator matrix: vec(rho_dot) = L vec(rho), column-stacked."""
    if h.dim > DENSE_SUPEROPERATOR_MAX_DIM:
        raise DimensionMismatchError(
            f"dense Liouvillian limited to dim <= {DENSE_SUPEROPERATOR_MAX_DIM}, "
            f"got {h.dim}"
        )
    ops = _normalize_collapse(collapse_ops)
    return _liouvillian_sparse(h.data, [op.data for op in ops]).toarray()


def propagate_constant(
    problem: EvolutionProblem,
    hermitize: bool = True,
) -> Trajectory:
    """Exact-in-time propagation for a time-independent Hamiltonian.

    Pure states without collapse operators follow the Schroedinger equation
    directly; otherwise the vectorized density matrix is advanced with the
    sparse Liouvillian exponential (Krylov-free scaling/Taylor scheme).
    """
    if problem.is_time_dependent:
        raise ValueError("propagate_constant requires a time-independent Hamiltonian")
    t0 = problem.t_span[0]
    times = list(problem.output_times)

    if not problem.collapse_ops and isinstance(problem.initial, PureState):
        gen = sp.csr_matrix(-1j * problem.hamiltonian.data)
        psi = problem.initial.amplitudes.copy()
        out, t = [], t0
        for tk in times:
            if tk > t + 1e-15:
                psi = spla.expm_multiply(gen * (tk - t), psi)
                t = tk
            psi_n = psi / np.linalg.norm(psi)
            out.append(DensityMatrix(np.outer(psi_n, psi_n.conj()),
                                     problem.hamiltonian.mode_dims, validate=False))
        return Trajectory(times=times, states=out,
                          stepper_stats={"method": "expm-schrodinger"})

    lmat = _liouvillian_sparse(
        problem.hamiltonian.data, [op.data for op in problem.collapse_ops]
    )
    d = problem.dim
    vec = as_density_matrix(problem.initial).data.flatten(order="F")
    out, t = [], t0
    for tk in times:
        if tk > t + 1e-15:
            vec = spla.expm_multiply(lmat * (tk - t), vec)
            t = tk
        rho = vec.reshape((d, d), order="F")
        if hermitize:
            rho = 0.5 * (rho + rho.conj().T)
        out.append(DensityMatrix(rho, problem.hamiltonian.mode_dims, validate=False))
    return Trajectory(times=times, states=out, stepper_stats={"method": "expm-liouvillian"})


def simulate(problem: EvolutionProblem, rel_tol=1e-8, abs_tol=1e-10) -> Trajectory:
    """Dispatch to the RK stepper (time-dependent H) or the exact
    constant-H propagator."""
    if problem.is_time_dependent:
        return evolve(problem, rel_tol=rel_tol, abs_tol=abs_tol)
    return propagate_constant(problem)


# ---------------------------------------------------------------------------
# steady states
# ---------------------------------------------------------------------------

def steady_state(
    problem: EvolutionProblem,
    method: str = "long-time",
    convergence_eps: float = 1e-8,
    rate_scale: float | None = None,
    max_time: float | None = None,
) -> DensityMatrix:
    """Steady state of a time-independent master equation.

    long-time: propagate until ||rho_dot||_F < convergence_eps * rate_scale.
    null-space: solve L vec(rho) = 0 with a trace-1 constraint (the null
    vector is the eigenvector of L with eigenvalue nearest zero).
    """
    if problem.is_time_dependent:
        raise ValueError("steady_state requires a time-independent Hamiltonian")
    if not problem.collapse_ops:
        raise ValueError("steady_state needs at least one collapse operator")
    dims = problem.hamiltonian.mode_dims
    d = problem.dim

    if rate_scale is None:
        rate_scale = max(
            float(np.linalg.norm(op.data, 2) ** 2) / max(d, 1)
            for op in problem.collapse_ops
        )
        rate_scale = max(rate_scale, 1e-12)

    if method == "null-space":
        if d > DENSE_SUPEROPERATOR_MAX_DIM:
            raise DimensionMismatchError(
                f"null-space method limited to dim <= {DENSE_SUPEROPERATOR_MAX_DIM}"
            )
        lmat = _liouvillian_sparse(
            problem.hamiltonian.data, [op.data for op in problem.collapse_ops]
        ).tolil()
        # overwrite one redundant row (L is rank-deficient by one) with Tr=1
        trace_row = np.zeros(d * d, dtype=complex)
        trace_row[:: d + 1] = 1.0
        lmat[0, :] = trace_row
        rhs_vec = np.zeros(d * d, dtype=complex)
        rhs_vec[0] = 1.0
        vec = spla.spsolve(lmat.tocsc(), rhs_vec)
        rho = vec.reshape((d, d), order="F")
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.trace(rho).real
        return DensityMatrix(rho, dims, validate=False)

    if method != "long-time":
        raise ValueError(f"unknown steady-state method {method!r}")

    lmat = _liouvillian_sparse(
        problem.hamiltonian.data, [op.data for op in problem.collapse_ops]
    )
    if max_time is None:
        max_time = 400.0 / rate_scale
    vec = as_density_matrix(problem.initial).data.flatten(order="F")
    t, chunk = 0.0, 1.0 / rate_scale
    tol = convergence_eps * rate_scale
    while t < max_time:
        vec = spla.expm_multiply(lmat * chunk, vec)
        t += chunk
        residual = float(np.linalg.norm(lmat @ vec))
        if residual < tol:
            rho = vec.reshape((d, d), order="F")
            rho = 0.5 * (rho + rho.conj().T)
            rho /= np.trace(rho).real
            return DensityMatrix(rho, dims, validate=False)
    raise ConvergenceError(
        f"steady state not reached by t={max_time:.3g} (residual {residual:.3e}, "
        f"tolerance {tol:.3e})"
    )
