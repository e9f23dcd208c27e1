"""Operator and state algebra on the truncated Fock space."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catkerr.errors import DimensionMismatchError, TruncationError
from catkerr.fock import (
    DensityMatrix,
    PureState,
    annihilation,
    cat_state,
    coherent_state,
    displacement,
    fock_state,
    identity,
    number_operator,
    parity_operator,
    tensor,
)


def coherent_series(alpha: complex, n_trunc: int) -> np.ndarray:
    """Independent oracle: direct factorial-series coherent amplitudes."""
    amps = np.array(
        [alpha**n / math.sqrt(math.factorial(n)) for n in range(n_trunc)],
        dtype=complex,
    )
    amps *= math.exp(-abs(alpha) ** 2 / 2.0)
    return amps / np.linalg.norm(amps)


class TestAnnihilation:
    def test_two_level_matrix(self):
        np.testing.assert_allclose(annihilation(2).data, [[0, 1], [0, 0]])

    def test_rejects_tiny_truncation(self):
        with pytest.raises(TruncationError):
            annihilation(1)

    def test_commutator_is_identity_below_truncation_edge(self):
        a = annihilation(4)
        comm = a.commutator(a.dag()).data
        np.testing.assert_allclose(comm[:3, :3], np.eye(3), atol=1e-14)
        assert comm[3, 3] != pytest.approx(1.0)

    def test_coherent_state_is_eigenvector(self):
        a = annihilation(30)
        psi = coherent_series(2.0, 30)
        assert np.linalg.norm(a.data @ psi - 2.0 * psi) < 1e-6


class TestCoherentState:
    def test_zero_amplitude_is_vacuum(self):
        np.testing.assert_allclose(
            coherent_state(0.0, 10).amplitudes, fock_state(0, 10).amplitudes
        )

    def test_mean_photon_number(self):
        psi = coherent_state(2.0, 30)
        n = psi.expectation(number_operator(30)).real
        assert n == pytest.approx(4.0, abs=1e-6)

    def test_opposite_phase_overlap(self):
        plus = coherent_state(2.0, 30)
        minus = coherent_state(-2.0, 30)
        expected = math.exp(-4.0 * 4.0)
        assert abs(plus.overlap(minus)) ** 2 == pytest.approx(expected, abs=1e-9)

    def test_truncation_guard_suggests_larger_space(self):
        with pytest.raises(TruncationError) as err:
            coherent_state(4.0, 10)
        assert err.value.suggested_n is not None
        assert err.value.suggested_n >= 32

    def test_matches_series_oracle(self):
        np.testing.assert_allclose(
            coherent_state(1.5 + 0.5j, 30).amplitudes,
            coherent_series(1.5 + 0.5j, 30),
            atol=1e-12,
        )


class TestCatState:
    def test_even_cat_zero_amplitude_limit(self):
        np.testing.assert_allclose(
            cat_state(0.0, "even", 10).amplitudes, fock_state(0, 10).amplitudes
        )

    def test_odd_cat_zero_amplitude_limit(self):
        np.testing.assert_allclose(
            cat_state(0.0, "odd", 10).amplitudes,
            fock_state(1, 10).amplitudes,
            atol=1e-12,
        )

    def test_even_support_only(self):
        amps = cat_state(2.0, "even", 30).amplitudes
        assert np.all(np.abs(amps[1::2]) < 1e-14)

    def test_parity_expectation_from_amplitudes(self):
        amps = cat_state(2.0, "even", 30).amplitudes
        signs = (-1.0) ** np.arange(30)
        assert float(np.sum(signs * np.abs(amps) ** 2)) == pytest.approx(1.0, abs=1e-10)

    def test_opposite_parities_orthogonal(self):
        even = cat_state(2.0, "even", 30)
        odd = cat_state(2.0, "odd", 30)
        assert abs(even.overlap(odd)) < 1e-10

    def test_rejects_unknown_parity(self):
        with pytest.raises(ValueError):
            cat_state(2.0, "mixed", 30)


class TestDisplacement:
    def test_zero_displacement_is_identity(self):
        np.testing.assert_allclose(displacement(0.0, 10).data, np.eye(10), atol=1e-12)

    def test_displaced_vacuum_is_coherent_state(self):
        psi = displacement(2.0, 40).data @ fock_state(0, 40).amplitudes
        overlap = np.vdot(coherent_state(2.0, 40).amplitudes, psi)
        assert abs(overlap) ** 2 > 1 - 1e-8

    def test_inverse_composition(self):
        beta = 1.0 + 0.5j
        prod = displacement(beta, 40).data @ displacement(-beta, 40).data
        assert np.max(np.abs(prod - np.eye(40))) < 1e-8

    def test_composition_phase(self):
        b1, b2 = 0.7 + 0.3j, -0.4 + 0.6j
        lhs = displacement(b1, 40).data @ displacement(b2, 40).data
        phase = np.exp(1j * (b1 * np.conj(b2)).imag)
        rhs = phase * displacement(b1 + b2, 40).data
        # compare on the well-represented corner of the truncated space
        assert np.max(np.abs(lhs[:20, :20] - rhs[:20, :20])) < 1e-6

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            displacement(4.0, 10)


class TestTensor:
    def test_identity_product(self):
        np.testing.assert_allclose(
            tensor(identity(2), identity(3)).data, np.eye(6)
        )

    def test_disjoint_modes_commute(self):
        a1 = tensor(annihilation(4), identity(4))
        a2 = tensor(identity(4), annihilation(4))
        assert np.max(np.abs(a1.commutator(a2).data)) < 1e-12

    def test_mode_dims_concatenate(self):
        op = tensor(identity(4), identity(5))
        assert op.mode_dims == (4, 5)
        assert op.dim == 20


class TestParityOperator:
    def test_alternating_diagonal(self):
        np.testing.assert_allclose(parity_operator(3).data, np.diag([1, -1, 1]))

    def test_squares_to_identity(self):
        p = parity_operator(12)
        np.testing.assert_allclose((p @ p).data, np.eye(12), atol=1e-14)

    def test_even_cat_has_positive_parity(self):
        cat = cat_state(2.0, "even", 30)
        assert cat.expectation(parity_operator(30)).real == pytest.approx(1.0, abs=1e-10)


class TestStateInvariants:
    def test_pure_state_normalizes(self):
        psi = PureState(np.array([3.0, 4.0], dtype=complex), (2,))
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_pure_state_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            PureState(np.zeros(3, dtype=complex), (3,))

    def test_density_matrix_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]], dtype=complex), (2,))

    def test_density_matrix_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2, dtype=complex), (2,))

    def test_density_matrix_rejects_negative_eigenvalue(self):
        data = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError):
            DensityMatrix(data, (2,))

    def test_operator_state_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fock_state(0, 4).expectation(number_operator(5))

    def test_double_adjoint_roundtrip(self):
        op = displacement(0.5 + 0.2j, 20)
        np.testing.assert_allclose(op.dag().dag().data, op.data)


class TestProperties:
    @settings(deadline=None, max_examples=25)
    @given(alpha=st.floats(min_value=0.5, max_value=3.0))
    def test_cat_normalization_and_orthogonality(self, alpha):
        even = cat_state(alpha, "even", 40)
        odd = cat_state(alpha, "odd", 40)
        assert np.linalg.norm(even.amplitudes) == pytest.approx(1.0, abs=1e-12)
        assert abs(even.overlap(odd)) < 1e-10

    @settings(deadline=None, max_examples=25)
    @given(
        re=st.floats(min_value=-1.5, max_value=1.5),
        im=st.floats(min_value=-1.5, max_value=1.5),
    )
    def test_displacement_unitarity(self, re, im):
        beta = complex(re, im)
        d = displacement(beta, 40)
        prod = d.dag().data @ d.data
        assert np.max(np.abs(prod[:20, :20] - np.eye(20))) < 1e-8

    @settings(deadline=None, max_examples=25)
    @given(alpha=st.floats(min_value=0.2, max_value=3.5))
    def test_coherent_eigen_residual(self, alpha):
        # the truncation must hold the full Poisson tail, well beyond the
        # construction guard's minimum, for a 1e-6 eigen-residual
        n_trunc = int(2 * alpha**2 + 10 * alpha + 10)
        psi = coherent_state(alpha, n_trunc)
        residual = annihilation(n_trunc).data @ psi.amplitudes - alpha * psi.amplitudes
        assert np.linalg.norm(residual) < 1e-6
