import math

import numpy as np
import pytest

from blockade.algebra import build_space
from blockade.dynamics import steady_state
from blockade.model import ModelParams
from blockade.observables import (classify_blockade, compute_observables,
                                  correlation_g_n, mean_photon_number,
                                  photon_distribution)


def space_555():
    return build_space(5, 5, 5)


def fock_projector(space, m_a):
    """Projector onto |g, m_a, 0, 0⟩."""
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    i = space.index(0, m_a, 0, 0)
    rho[i, i] = 1.0
    return rho


def coherent_rho(space, alpha):
    """|α⟩⟨α| on mode a (truncated), vacuum elsewhere."""
    m = np.arange(space.n_a)
    amps = np.exp(-abs(alpha) ** 2 / 2) * alpha ** m / np.sqrt(
        [math.factorial(int(k)) for k in m])
    psi = np.zeros(space.dim, dtype=complex)
    for k in range(space.n_a):
        psi[space.index(0, k, 0, 0)] = amps[k]
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def thermal_rho(space, nbar):
    s = nbar / (nbar + 1.0)
    probs = (1 - s) * s ** np.arange(space.n_a)
    probs /= probs.sum()
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    for k in range(space.n_a):
        i = space.index(0, k, 0, 0)
        rho[i, i] = probs[k]
    return rho


class TestMeanPhotonNumber:
    def test_vacuum(self):
        space = space_555()
        assert mean_photon_number(fock_projector(space, 0), space,
                                  "a") == 0.0

    def test_fock_two(self):
        space = space_555()
        assert mean_photon_number(fock_projector(space, 2), space,
                                  "a") == pytest.approx(2.0)

    def test_driven_cavity(self):
        p = ModelParams(F_a=0.1, n_a=8, n_b=2, n_c=2)
        rho, _ = steady_state(p)
        assert mean_photon_number(rho, p.space(), "a") == pytest.approx(
            0.04, abs=1e-4)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mean_photon_number(np.eye(4), space_555(), "a")


class TestCorrelations:
    def test_fock_one(self):
        space = space_555()
        assert correlation_g_n(fock_projector(space, 1), space, "a",
                               2) == pytest.approx(0.0)

    def test_fock_two(self):
        space = space_555()
        rho = fock_projector(space, 2)
        assert correlation_g_n(rho, space, "a", 2) == pytest.approx(0.5)
        assert correlation_g_n(rho, space, "a", 3) == pytest.approx(0.0)

    def test_coherent_statistics(self):
        p = ModelParams(F_a=0.1, n_a=12, n_b=2, n_c=2)
        rho, _ = steady_state(p)
        space = p.space()
        assert correlation_g_n(rho, space, "a", 2) == pytest.approx(
            1.0, abs=1e-4)
        assert correlation_g_n(rho, space, "a", 3) == pytest.approx(
            1.0, abs=1e-3)

    def test_underflow_returns_none(self):
        space = space_555()
        assert correlation_g_n(fock_projector(space, 0), space, "a",
                               2) is None

    def test_g3_needs_four_levels(self):
        space = build_space(3, 3, 3)
        with pytest.raises(ValueError, match="4 Fock levels"):
            correlation_g_n(fock_projector(space, 1), space, "a", 3)

    def test_dual_path_equality(self):
        # independent oracle: g2 from the photon distribution,
        # Σ m(m-1)P(m) / (Σ m P(m))²
        rng = np.random.default_rng(5)
        space = build_space(4, 4, 4)
        m = rng.normal(size=(space.dim, space.dim)) \
            + 1j * rng.normal(size=(space.dim, space.dim))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        for mode in ("a", "b", "c"):
            probs = photon_distribution(rho, space, mode)
            m_vals = np.arange(len(probs))
            oracle = (np.sum(m_vals * (m_vals - 1) * probs)
                      / np.sum(m_vals * probs) ** 2)
            assert correlation_g_n(rho, space, mode, 2) == pytest.approx(
                oracle, abs=1e-10)


class TestPhotonDistribution:
    def test_vacuum(self):
        space = space_555()
        probs = photon_distribution(fock_projector(space, 0), space, "a")
        assert probs == pytest.approx([1, 0, 0, 0, 0])

    def test_thermal_geometric(self):
        space = build_space(12, 2, 2)
        probs = photon_distribution(thermal_rho(space, 0.5), space, "a")
        s = 1.0 / 3.0
        expected = (1 - s) * s ** np.arange(12)
        expected /= expected.sum()
        assert probs == pytest.approx(expected, abs=1e-12)

    def test_sums_to_one(self):
        p = ModelParams(F_a=0.1, F_b=0.05, g=2.0, J=1.0, n_a=4, n_b=4,
                        n_c=4)
        rho, _ = steady_state(p)
        for mode in ("a", "b", "c"):
            probs = photon_distribution(rho, p.space(), mode)
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(probs >= -1e-10)

    def test_thermal_versus_coherent_statistics(self):
        space = build_space(14, 2, 2)
        rho_t = thermal_rho(space, 0.5)
        assert correlation_g_n(rho_t, space, "a", 2) == pytest.approx(
            2.0, abs=1e-3)
        assert correlation_g_n(rho_t, space, "a", 3) == pytest.approx(
            6.0, abs=1e-2)
        rho_c = coherent_rho(space, 0.4)
        assert correlation_g_n(rho_c, space, "a", 2) == pytest.approx(
            1.0, abs=1e-6)


class TestClassification:
    @pytest.mark.parametrize("g2,g3,tag", [
        (0.5, 0.2, "CPB"),
        (1.5, 0.8, "2PB"),
        (1.2, 1.1, "none"),
        (1.0, 0.5, "2PB"),   # boundary convention: g2 = 1 counts as 2PB
        (1.0, 1.0, "none"),
        (0.99, 5.0, "CPB"),
    ])
    def test_rule(self, g2, g3, tag):
        assert classify_blockade(g2, g3) == tag

    def test_undefined_propagates(self):
        assert classify_blockade(None, 0.5) == "undefined"
        assert classify_blockade(0.5, None) == "undefined"

    def test_compute_observables_tags(self):
        space = space_555()
        obs = compute_observables(fock_projector(space, 1), space)
        assert obs.tag == "CPB"
        assert obs.N_a == pytest.approx(1.0)
        assert obs.g2_b is None  # modes b, c in vacuum
