"""Photon blockade in a driven three-wave-mixing system with a two-level
atom coupled to the high-frequency cavity.

Closed-form blockade conditions from the one- and two-excitation manifolds,
plus steady-state photon statistics from the Lindblad master equation in a
truncated Fock space.
"""

from .algebra import (CompositeSpace, annihilator, atom_sigma, build_space,
                      number_operator)
from .dynamics import (build_liouvillian, steady_state, steady_state_direct,
                       steady_state_evolve, thermal_occupation)
from .model import (ManifoldFrequencies, ModelParams, build_hamiltonian,
                    cpb_detunings, first_manifold, hermitian_eigenvalues,
                    second_manifold, subspace_h1, subspace_h2, tpb_detunings)
from .observables import (ObservableSet, classify_blockade,
                          compute_observables, correlation_g_n,
                          mean_photon_number, photon_distribution)
from .sweep import SweepConfig, load_config, preset, run_sweep, write_csv

__all__ = [
    "CompositeSpace", "ModelParams", "ManifoldFrequencies", "ObservableSet",
    "SweepConfig",
    "build_space", "annihilator", "atom_sigma", "number_operator",
    "build_hamiltonian", "subspace_h1", "subspace_h2",
    "first_manifold", "second_manifold", "hermitian_eigenvalues",
    "cpb_detunings", "tpb_detunings",
    "build_liouvillian", "steady_state", "steady_state_direct",
    "steady_state_evolve", "thermal_occupation",
    "mean_photon_number", "correlation_g_n", "photon_distribution",
    "classify_blockade", "compute_observables",
    "load_config", "preset", "run_sweep", "write_csv",
]

__version__ = "0.1.0"
