import math

import numpy as np
import pytest

from blockade.algebra import build_space
from blockade.model import (ModelParams, build_hamiltonian, cpb_detunings,
                            first_manifold, hermitian_eigenvalues,
                            second_manifold, subspace_h1, subspace_h2,
                            tpb_detunings)


def resonant_params(delta_a, g, J, **kw):
    return ModelParams(delta_a=delta_a, delta_sigma=delta_a,
                       delta_b=2.0 / 3.0 * delta_a,
                       delta_c=1.0 / 3.0 * delta_a, g=g, J=J, **kw)


def matrix_element(H, space, bra, ket):
    return H[space.index(*bra), space.index(*ket)]


class TestHamiltonian:
    def test_coupling_elements(self):
        p = resonant_params(1.0, g=3.0, J=2.0, n_a=3, n_b=3, n_c=3)
        space = p.space()
        H = build_hamiltonian(space, p)
        assert matrix_element(H, space, (1, 0, 0, 0),
                              (0, 1, 0, 0)) == pytest.approx(p.J)
        assert matrix_element(H, space, (0, 0, 1, 1),
                              (0, 1, 0, 0)) == pytest.approx(p.g)

    def test_diagonal_detuning_sum(self):
        p = ModelParams(delta_a=1.5, delta_b=-0.3, delta_c=2.2,
                        delta_sigma=0.7, n_a=3, n_b=3, n_c=3)
        space = p.space()
        H = build_hamiltonian(space, p)
        i = space.index(0, 1, 1, 1)
        assert H[i, i] == pytest.approx(p.delta_a + p.delta_b + p.delta_c)

    def test_hermitian(self):
        p = resonant_params(2.0, g=1.3, J=0.8, F_a=0.1, F_b=0.05,
                            F_c=0.02, n_a=4, n_b=4, n_c=4)
        H = build_hamiltonian(p.space(), p)
        assert (H - H.conjugate().transpose()).nnz == 0

    def test_space_mismatch(self):
        p = ModelParams(n_a=4, n_b=4, n_c=4)
        with pytest.raises(ValueError, match="match"):
            build_hamiltonian(build_space(5, 5, 5), p)

    def test_excitation_conservation_at_zero_drive(self):
        # N_exc = a†a + σ†σ + (b†b + c†c)/2; H must never connect
        # basis states of different N_exc when all drives vanish
        p = resonant_params(1.7, g=2.5, J=1.1, n_a=4, n_b=4, n_c=4)
        space = p.space()
        H = build_hamiltonian(space, p).tocoo()

        def n_exc(state):
            atom, ma, mb, mc = state
            return ma + atom + 0.5 * (mb + mc)

        for r, c in zip(H.row, H.col):
            assert n_exc(space.unindex(r)) == pytest.approx(
                n_exc(space.unindex(c)))


class TestSubspaces:
    def test_h1_direct_substitution(self):
        p = ModelParams(delta_a=1.0, delta_sigma=1.0, delta_b=0.4,
                        delta_c=0.6, J=2.0, g=3.0)
        assert np.allclose(subspace_h1(p),
                           [[1, 2, 3], [2, 1, 0], [3, 0, 1]])

    def test_h1_uncoupled_is_diagonal(self):
        p = ModelParams(delta_a=1.2, delta_sigma=0.5, delta_b=0.3,
                        delta_c=0.4)
        assert np.allclose(subspace_h1(p), np.diag([1.2, 0.5, 0.7]))

    def test_h1_matches_full_hamiltonian_projection(self):
        p = resonant_params(2.3, g=1.1, J=0.7, n_a=3, n_b=3, n_c=3)
        space = p.space()
        H = build_hamiltonian(space, p).toarray()
        basis = [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 1, 1)]
        idx = [space.index(*b) for b in basis]
        assert np.allclose(H[np.ix_(idx, idx)], subspace_h1(p), atol=1e-12)

    def test_h2_structure(self):
        p = ModelParams(g=3.0, J=2.0)
        h2 = subspace_h2(p)
        assert h2[0, 1] == pytest.approx(math.sqrt(2) * p.J)
        assert h2[3, 4] == pytest.approx(2 * p.g)
        assert h2[0, 4] == pytest.approx(math.sqrt(2) * p.g)
        assert np.allclose(h2, h2.T)

    def test_h2_uncoupled_diagonal(self):
        p = ModelParams(delta_a=1.0, delta_sigma=0.5, delta_b=0.25,
                        delta_c=0.5)
        dbc = p.delta_b + p.delta_c
        expected = np.diag([2 * p.delta_a, p.delta_a + p.delta_sigma,
                            p.delta_sigma + dbc, 2 * dbc, p.delta_a + dbc])
        assert np.allclose(subspace_h2(p), expected)

    def test_h2_matches_full_hamiltonian_projection(self):
        p = resonant_params(1.9, g=2.2, J=1.4, n_a=3, n_b=3, n_c=3)
        space = p.space()
        H = build_hamiltonian(space, p).toarray()
        basis = [(0, 2, 0, 0), (1, 1, 0, 0), (1, 0, 1, 1), (0, 0, 2, 2),
                 (0, 1, 1, 1)]
        idx = [space.index(*b) for b in basis]
        assert np.allclose(H[np.ix_(idx, idx)], subspace_h2(p), atol=1e-12)


class TestManifolds:
    def test_first_345(self):
        m = first_manifold(resonant_params(0.0, g=3.0, J=4.0))
        assert m.closed_form
        assert m.values == pytest.approx((-5.0, 0.0, 5.0))

    def test_first_zero_at_fig3a_condition(self):
        m = first_manifold(resonant_params(math.sqrt(125.0), g=11.0, J=2.0))
        assert min(m.values) == pytest.approx(0.0, abs=1e-12)

    def test_first_degenerate_without_coupling(self):
        m = first_manifold(resonant_params(1.3, g=0.0, J=0.0))
        assert m.values == pytest.approx((1.3, 1.3, 1.3))

    def test_first_off_resonance_falls_back_to_numeric(self):
        p = ModelParams(delta_a=1.0, delta_sigma=2.0, delta_b=0.5,
                        delta_c=0.1, g=1.0, J=1.0)
        m = first_manifold(p)
        assert not m.closed_form
        assert np.allclose(m.values,
                           hermitian_eigenvalues(subspace_h1(p)))

    def test_second_decoupled_block_oracle(self):
        # oracle: with J=0 the two-excitation matrix decouples into a 2x2
        # block with eigenvalues ±g and a 3x3 block with 0, ±sqrt(6) g
        p = resonant_params(0.0, g=1.0, J=0.0)
        atom_block = np.array([[0.0, 1.0], [1.0, 0.0]])
        photon_block = np.array([[0.0, 0.0, np.sqrt(2)],
                                 [0.0, 0.0, 2.0],
                                 [np.sqrt(2), 2.0, 0.0]])
        oracle = sorted(np.concatenate([np.linalg.eigvalsh(atom_block),
                                        np.linalg.eigvalsh(photon_block)]))
        m = second_manifold(p)
        assert np.allclose(sorted(m.values), oracle, atol=1e-12)
        assert sorted(np.abs(m.values)) == pytest.approx(
            [0.0, 1.0, 1.0, np.sqrt(6), np.sqrt(6)])

    def test_second_fig4a_zero_location(self):
        # the upper branch crosses zero at delta_a ≈ 9.94 for g=8, J=2
        m = second_manifold(resonant_params(9.9389, g=8.0, J=2.0))
        assert m.a_coeff == pytest.approx(460.0)
        assert math.sqrt(m.b_coeff) == pytest.approx(330.260, abs=1e-2)
        assert min(m.values) == pytest.approx(0.0, abs=1e-2)

    def test_second_degenerate_without_coupling(self):
        m = second_manifold(resonant_params(0.7, g=0.0, J=0.0))
        assert m.values == pytest.approx((1.4,) * 5)

    def test_second_off_resonance_numeric(self):
        p = ModelParams(delta_a=2.0, delta_sigma=1.0, delta_b=0.5,
                        delta_c=0.25, g=1.5, J=0.5)
        m = second_manifold(p)
        assert not m.closed_form
        assert np.allclose(m.values,
                           hermitian_eigenvalues(subspace_h2(p)))

    def test_closed_forms_match_eigensolver(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            g, J = rng.uniform(-20, 20, size=2)
            da = rng.uniform(-30, 30)
            p = resonant_params(da, g=g, J=J)
            m1 = first_manifold(p)
            m2 = second_manifold(p)
            assert np.allclose(sorted(m1.values),
                               hermitian_eigenvalues(subspace_h1(p)),
                               atol=1e-9)
            assert np.allclose(sorted(m2.values),
                               hermitian_eigenvalues(subspace_h2(p)),
                               atol=1e-9)


class TestBlockadeConditions:
    def test_cpb_values(self):
        assert cpb_detunings(3.0, 4.0) == pytest.approx((5.0, -5.0))
        assert cpb_detunings(11.0, 2.0)[0] == pytest.approx(11.1803, abs=1e-4)

    def test_cpb_shifts_with_atom_coupling(self):
        assert cpb_detunings(3.0, 4.0)[0] > cpb_detunings(3.0, 2.0)[0]

    def test_tpb_values(self):
        assert tpb_detunings(8.0, 2.0)["plus_branch"][0] == pytest.approx(
            9.94, abs=0.05)
        assert tpb_detunings(8.0, 4.0)["plus_branch"][0] == pytest.approx(
            10.3, abs=0.05)
        assert tpb_detunings(8.0, 6.0)["plus_branch"][0] == pytest.approx(
            10.94, abs=0.05)

    def test_tpb_minus_branch_decoupled_oracle(self):
        # with J=0, g=1 the second manifold has a ±1 eigenvalue pair at
        # 2Δ_a = ±1, i.e. the minus branch zero sits at Δ_a = 0.5
        assert tpb_detunings(1.0, 0.0)["minus_branch"][0] == pytest.approx(
            0.5)

    def test_conditions_even_in_couplings(self):
        for g, J in [(3.0, 4.0), (8.0, 2.0), (1.5, 0.5)]:
            assert cpb_detunings(g, J) == cpb_detunings(-g, J)
            assert cpb_detunings(g, J) == cpb_detunings(g, -J)
            assert tpb_detunings(g, J) == tpb_detunings(-g, -J)
            assert tpb_detunings(g, J) == tpb_detunings(-g, J)


class TestEigensolver:
    def test_pauli_x(self):
        assert hermitian_eigenvalues([[0, 1], [1, 0]]) == pytest.approx(
            [-1.0, 1.0])

    def test_345_subspace(self):
        p = resonant_params(0.0, g=3.0, J=4.0)
        assert hermitian_eigenvalues(subspace_h1(p)) == pytest.approx(
            [-5.0, 0.0, 5.0])

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eigenvalues([[0, 1], [2, 0]])
