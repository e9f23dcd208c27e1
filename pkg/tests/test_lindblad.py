"""Master-equation integration, Liouvillian structure and steady states."""

import numpy as np
import pytest

from catkerr.errors import DimensionMismatchError
from catkerr.fock import (
    annihilation,
    cat_state,
    coherent_state,
    fock_state,
    number_operator,
)
from catkerr.lindblad import (
    EvolutionProblem,
    evolve,
    liouvillian,
    propagate_constant,
    simulate,
    steady_state,
)
from catkerr.model import ModelSpec, build_H0
from catkerr.observables import fidelity, mean_photon, parity_expectation, purity
from catkerr.protocols import DriveEnvelope


def two_photon_coupling(n_trunc):
    a = annihilation(n_trunc)
    return a.dag() @ a.dag()


class TestEvolve:
    def test_single_photon_decays_exponentially(self):
        kappa = 1.0
        times = (0.5, 1.0, 2.0)
        problem = EvolutionProblem(
            hamiltonian=0.0 * number_operator(4),
            initial=fock_state(1, 4),
            t_span=(0.0, 2.0),
            output_times=times,
            collapse_ops=((kappa, annihilation(4)),),
        )
        traj = evolve(problem)
        for t, state in zip(traj.times, traj.states):
            assert mean_photon(state) == pytest.approx(np.exp(-kappa * t), abs=1e-6)

    def test_eigenstate_is_stationary(self):
        spec = ModelSpec(K=1.0, Ep=4.0, n_trunc=25)
        cat = cat_state(2.0, "even", 25)
        problem = EvolutionProblem(
            hamiltonian=build_H0(spec),
            initial=cat,
            t_span=(0.0, 10.0),
            output_times=(2.0, 5.0, 10.0),
        )
        traj = evolve(problem)
        for state in traj.states:
            assert fidelity(state, cat) > 1 - 1e-6

    def test_two_photon_drive_conserves_parity(self):
        env = DriveEnvelope.smooth_turn_on(4.0, 1.0)
        problem = EvolutionProblem(
            hamiltonian=build_H0(ModelSpec(K=1.0, Ep=0.0, n_trunc=25)),
            initial=fock_state(0, 25),
            t_span=(0.0, 1.5),
            output_times=(0.3, 0.8, 1.5),
            drive_terms=((env, two_photon_coupling(25)),),
        )
        traj = evolve(problem)
        for state in traj.states:
            assert parity_expectation(state) == pytest.approx(1.0, abs=1e-8)

    def test_trajectory_stays_physical(self):
        spec = ModelSpec(K=1.0, Ep=4.0, kappa=0.2, n_trunc=20)
        env = DriveEnvelope.smooth_turn_on(4.0, 1.0)
        problem = EvolutionProblem(
            hamiltonian=build_H0(ModelSpec(K=1.0, Ep=0.0, n_trunc=20)),
            initial=fock_state(0, 20),
            t_span=(0.0, 2.0),
            output_times=(0.5, 1.0, 2.0),
            drive_terms=((env, two_photon_coupling(20)),),
            collapse_ops=((spec.kappa, annihilation(20)),),
        )
        traj = evolve(problem)
        for state in traj.states:
            data = state.data
            assert abs(np.trace(data).real - 1.0) < 1e-6
            assert np.max(np.abs(data - data.conj().T)) < 1e-10
            assert np.linalg.eigvalsh(data).min() > -1e-8

    def test_refinement_convergence(self):
        env = DriveEnvelope.smooth_turn_on(4.0, 1.0)

        def final_state(rel_tol):
            problem = EvolutionProblem(
                hamiltonian=build_H0(ModelSpec(K=1.0, Ep=0.0, n_trunc=20)),
                initial=fock_state(0, 20),
                t_span=(0.0, 1.5),
                drive_terms=((env, two_photon_coupling(20)),),
            )
            return evolve(problem, rel_tol=rel_tol, abs_tol=1e-12).final()

        coarse = final_state(1e-8)
        fine = final_state(5e-9)
        assert abs(fidelity(coarse, fine) - 1.0) < 1e-8

    def test_matches_exact_propagator_for_constant_hamiltonian(self):
        spec = ModelSpec(K=1.0, Ep=4.0, kappa=0.3, n_trunc=20)
        problem = EvolutionProblem(
            hamiltonian=build_H0(spec),
            initial=coherent_state(1.0, 20),
            t_span=(0.0, 1.0),
            collapse_ops=((spec.kappa, annihilation(20)),),
        )
        rk = evolve(problem).final()
        exact = propagate_constant(problem).final()
        assert np.max(np.abs(rk.data - exact.data)) < 1e-6

    def test_extra_hamiltonian_matches_static_term(self):
        # a constant extra term must reproduce the same physics as folding
        # it into the base Hamiltonian
        spec = ModelSpec(K=1.0, Ep=4.0, n_trunc=20)
        h_full = build_H0(spec)
        h_kerr = build_H0(ModelSpec(K=1.0, Ep=0.0, n_trunc=20))
        static_part = (h_full - h_kerr).data

        base = EvolutionProblem(
            hamiltonian=h_full,
            initial=fock_state(0, 20),
            t_span=(0.0, 1.0),
            output_times=(1.0,),
        )
        split = EvolutionProblem(
            hamiltonian=h_kerr,
            initial=fock_state(0, 20),
            t_span=(0.0, 1.0),
            output_times=(1.0,),
            extra_hamiltonian=lambda t: static_part,
        )
        rho_a = evolve(base).final()
        rho_b = evolve(split).final()
        assert np.max(np.abs(rho_a.data - rho_b.data)) < 1e-7


class TestProblemValidation:
    def test_mismatched_initial_state(self):
        with pytest.raises(DimensionMismatchError):
            EvolutionProblem(
                hamiltonian=number_operator(4),
                initial=fock_state(0, 5),
                t_span=(0.0, 1.0),
            )

    def test_negative_collapse_rate(self):
        with pytest.raises(ValueError):
            EvolutionProblem(
                hamiltonian=number_operator(4),
                initial=fock_state(0, 4),
                t_span=(0.0, 1.0),
                collapse_ops=((-1.0, annihilation(4)),),
            )

    def test_decreasing_time_span(self):
        with pytest.raises(ValueError):
            EvolutionProblem(
                hamiltonian=number_operator(4),
                initial=fock_state(0, 4),
                t_span=(1.0, 0.0),
            )

    def test_output_times_outside_span(self):
        with pytest.raises(ValueError):
            EvolutionProblem(
                hamiltonian=number_operator(4),
                initial=fock_state(0, 4),
                t_span=(0.0, 1.0),
                output_times=(2.0,),
            )


class TestLiouvillian:
    def test_free_evolution_is_zero(self):
        lmat = liouvillian(0.0 * number_operator(4))
        assert np.max(np.abs(lmat)) == 0.0

    def test_trace_preservation_row(self):
        spec = ModelSpec(K=1.0, Ep=4.0, kappa=0.5, n_trunc=10)
        lmat = liouvillian(build_H0(spec), ((spec.kappa, annihilation(10)),))
        vec_id = np.eye(10, dtype=complex).flatten(order="F")
        assert np.max(np.abs(vec_id.conj() @ lmat)) < 1e-10

    def test_annihilates_steady_state(self):
        spec = ModelSpec(K=1.0, Ep=4.0, kappa=0.5, n_trunc=25)
        problem = EvolutionProblem(
            hamiltonian=build_H0(spec),
            initial=fock_state(0, 25),
            t_span=(0.0, 1.0),
            collapse_ops=((spec.kappa, annihilation(25)),),
        )
        rho = steady_state(problem, method="null-space")
        lmat = liouvillian(build_H0(spec), ((spec.kappa, annihilation(25)),))
        residual = np.linalg.norm(lmat @ rho.data.flatten(order="F"))
        assert residual < 1e-6 * spec.kappa

    def test_dimension_guard(self):
        with pytest.raises(DimensionMismatchError):
            liouvillian(number_operator(81))


class TestSteadyState:
    @staticmethod
    def problem(spec):
        return EvolutionProblem(
            hamiltonian=build_H0(spec),
            initial=fock_state(0, spec.n_trunc),
            t_span=(0.0, 1.0),
            collapse_ops=((spec.kappa, annihilation(spec.n_trunc)),),
        )

    def test_undriven_cavity_decays_to_vacuum(self):
        spec = ModelSpec(K=1.0, Ep=0.0, kappa=1.0, n_trunc=10)
        rho = steady_state(self.problem(spec), method="null-space")
        assert fidelity(rho, fock_state(0, 10)) > 1 - 1e-8

    def test_methods_agree(self):
        spec = ModelSpec(K=1.0, Ep=4.0, kappa=1.0, n_trunc=25)
        rho_lt = steady_state(self.problem(spec), method="long-time",
                              rate_scale=spec.kappa)
        rho_ns = steady_state(self.problem(spec), method="null-space")
        assert abs(fidelity(rho_lt, rho_ns) - 1.0) < 1e-6

    def test_large_cat_mixture_purity(self):
        # two quasi-orthogonal pointer states -> maximally mixed logical qubit
        spec = ModelSpec(K=1.0, Ep=16.0, kappa=0.5, n_trunc=40)
        rho = steady_state(self.problem(spec), method="null-space")
        assert purity(rho) == pytest.approx(0.5, abs=1e-3)

    def test_requires_collapse_operator(self):
        problem = EvolutionProblem(
            hamiltonian=number_operator(4),
            initial=fock_state(0, 4),
            t_span=(0.0, 1.0),
        )
        with pytest.raises(ValueError):
            steady_state(problem)

    def test_unknown_method_rejected(self):
        spec = ModelSpec(K=1.0, Ep=0.0, kappa=1.0, n_trunc=10)
        with pytest.raises(ValueError):
            steady_state(self.problem(spec), method="magic")


class TestSimulateDispatch:
    def test_constant_problem_uses_exact_route(self):
        spec = ModelSpec(K=1.0, Ep=4.0, n_trunc=20)
        problem = EvolutionProblem(
            hamiltonian=build_H0(spec),
            initial=coherent_state(1.0, 20),
            t_span=(0.0, 1.0),
        )
        traj = simulate(problem)
        assert traj.stepper_stats["method"] == "expm-schrodinger"

    def test_driven_problem_uses_stepper(self):
        env = DriveEnvelope.smooth_turn_on(4.0, 1.0)
        problem = EvolutionProblem(
            hamiltonian=build_H0(ModelSpec(K=1.0, Ep=0.0, n_trunc=15)),
            initial=fock_state(0, 15),
            t_span=(0.0, 0.5),
            drive_terms=((env, two_photon_coupling(15)),),
        )
        traj = simulate(problem)
        assert "accepted" in traj.stepper_stats
