"""Model parameters, driven rotating-frame Hamiltonian, and the closed-form
eigenfrequencies / blockade conditions of the one- and two-excitation
manifolds.

All rates, detunings and drives are in units of the cavity decay rate κ.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import algebra
from .algebra import CompositeSpace, canonical

RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """All physical rates, detunings, drives, and truncations for one run."""

    delta_a: float = 0.0
    delta_b: float = 0.0
    delta_c: float = 0.0
    delta_sigma: float = 0.0
    J: float = 0.0
    g: float = 0.0
    F_a: float = 0.0
    F_b: float = 0.0
    F_c: float = 0.0
    kappa_a: float = 1.0
    kappa_b: float = 1.0
    kappa_c: float = 1.0
    gamma: float = 1.0
    nbar_a: float = 0.0
    nbar_b: float = 0.0
    nbar_c: float = 0.0
    nbar_sigma: float = 0.0
    n_a: int = 5
    n_b: int = 5
    n_c: int = 5

    def __post_init__(self):
        for name in ("kappa_a", "kappa_b", "kappa_c", "gamma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("nbar_a", "nbar_b", "nbar_c", "nbar_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("n_a", "n_b", "n_c"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")

    def with_(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)

    def space(self) -> CompositeSpace:
        return CompositeSpace(self.n_a, self.n_b, self.n_c)

    @property
    def on_resonance(self) -> bool:
        """Whether Δ_σ = Δ_a and Δ_b + Δ_c = Δ_a, the regime where the
        closed-form manifold frequencies apply."""
        return (abs(self.delta_sigma - self.delta_a) <= RESONANCE_TOL
                and abs(self.delta_b + self.delta_c - self.delta_a)
                <= RESONANCE_TOL)


def build_hamiltonian(space: CompositeSpace, params: ModelParams):
    """Driven rotating-frame Hamiltonian as a sparse Hermitian matrix.

    H = Δ_a a†a + Δ_σ σ†σ + Δ_b b†b + Δ_c c†c
        + J (a†σ + σ†a) + g (a†bc + b†c†a)
        + F_a (a† + a) + F_b (b† + b) + F_c (c† + c)
    """
    if (space.n_a, space.n_b, space.n_c) != (params.n_a, params.n_b,
                                             params.n_c):
        raise ValueError(
            f"space truncation {(space.n_a, space.n_b, space.n_c)} does not "
            f"match params {(params.n_a, params.n_b, params.n_c)}"
        )
    a = algebra.annihilator(space, "a")
    b = algebra.annihilator(space, "b")
    c = algebra.annihilator(space, "c")
    sigma = algebra.atom_sigma(space)
    ad = algebra.dagger(a)

    # each coupling built once and closed with its exact dagger, so the
    # result is Hermitian to exact sparse symmetry, not just to roundoff
    exchange = ad @ sigma
    mixing = ad @ b @ c
    h = (params.delta_a * algebra.number_operator(space, "a")
         + params.delta_sigma * algebra.atom_excited_projector(space)
         + params.delta_b * algebra.number_operator(space, "b")
         + params.delta_c * algebra.number_operator(space, "c")
         + params.J * (exchange + algebra.dagger(exchange))
         + params.g * (mixing + algebra.dagger(mixing))
         + params.F_a * (ad + a)
         + params.F_b * (algebra.dagger(b) + b)
         + params.F_c * (algebra.dagger(c) + c))
    return canonical(h.astype(complex))


def subspace_h1(params: ModelParams) -> np.ndarray:
    """One-excitation block in the basis (|g,1,0,0⟩, |e,0,0,0⟩, |g,0,1,1⟩)."""
    return np.array([
        [params.delta_a, params.J, params.g],
        [params.J, params.delta_sigma, 0.0],
        [params.g, 0.0, params.delta_b + params.delta_c],
    ])


def subspace_h2(params: ModelParams) -> np.ndarray:
    """Two-excitation block in the basis
    (|g,2,0,0⟩, |e,1,0,0⟩, |e,0,1,1⟩, |g,0,2,2⟩, |g,1,1,1⟩)."""
    da, ds = params.delta_a, params.delta_sigma
    dbc = params.delta_b + params.delta_c
    J, g = params.J, params.g
    r2 = math.sqrt(2.0)
    return np.array([
        [2 * da,  r2 * J,  0.0,      0.0,      r2 * g],
        [r2 * J,  da + ds, g,        0.0,      0.0],
        [0.0,     g,       ds + dbc, 0.0,      J],
        [0.0,     0.0,     0.0,      2 * dbc,  2 * g],
        [r2 * g,  0.0,     J,        2 * g,    da + dbc],
    ])


def hermitian_eigenvalues(m, tol: float = 1e-12) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (dense solver)."""
    m = np.asarray(sp.csr_matrix(m).toarray() if sp.issparse(m) else m)
    scale = max(np.max(np.abs(m)), 1.0)
    if np.max(np.abs(m - m.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(m)


def _ab_coefficients(g: float, J: float) -> tuple[float, float]:
    """A = 7g² + 3J² and the radicand B = 25g⁴ + 26g²J² + J⁴."""
    g2, j2 = g * g, J * J
    return 7.0 * g2 + 3.0 * j2, 25.0 * g2 * g2 + 26.0 * g2 * j2 + j2 * j2


@dataclass(frozen=True)
class ManifoldFrequencies:
    """Eigenfrequencies of an excitation manifold, sorted ascending.

    ``closed_form`` is True when the analytic expressions (valid at
    Δ_σ = Δ_a, Δ_b + Δ_c = Δ_a) were used, False when the values came from
    numeric diagonalization of the subspace matrix.
    """

    order: int
    values: tuple
    a_coeff: float
    b_coeff: float
    closed_form: bool


def first_manifold(params: ModelParams) -> ManifoldFrequencies:
    """One-excitation eigenfrequencies {Δ_a ± √(g²+J²), Δ_a}."""
    a_coeff, b_coeff = _ab_coefficients(params.g, params.J)
    if params.on_resonance:
        split = math.hypot(params.g, params.J)
        vals = (params.delta_a - split, params.delta_a,
                params.delta_a + split)
        return ManifoldFrequencies(1, vals, a_coeff, b_coeff, True)
    vals = tuple(hermitian_eigenvalues(subspace_h1(params)))
    return ManifoldFrequencies(1, vals, a_coeff, b_coeff, False)


def second_manifold(params: ModelParams) -> ManifoldFrequencies:
    """Two-excitation eigenfrequencies {2Δ_a ± (√2/2)√(A±√B), 2Δ_a}."""
    a_coeff, b_coeff = _ab_coefficients(params.g, params.J)
    if params.on_resonance:
        rb = math.sqrt(b_coeff)
        outer = (math.sqrt(2.0) / 2.0) * math.sqrt(a_coeff + rb)
        inner = (math.sqrt(2.0) / 2.0) * math.sqrt(max(a_coeff - rb, 0.0))
        center = 2.0 * params.delta_a
        vals = (center - outer, center - inner, center,
                center + inner, center + outer)
        return ManifoldFrequencies(2, vals, a_coeff, b_coeff, True)
    vals = tuple(hermitian_eigenvalues(subspace_h2(params)))
    return ManifoldFrequencies(2, vals, a_coeff, b_coeff, False)


def cpb_detunings(g: float, J: float) -> tuple[float, float]:
    """Detunings ±√(g²+J²) at which single-photon blockade is optimal.

    Apply as Δ_a = Δ_b + Δ_c = Δ_σ = returned value.
    """
    d = math.hypot(g, J)
    return (d, -d)


def tpb_detunings(g: float, J: float) -> dict:
    """Detunings at which two-photon blockade is optimal.

    Returns both sign branches of Δ_a1 = (√2/4)√(A+√B) and
    Δ_a2 = (√2/4)√(A−√B).  Branch labels follow the radicand sign, not any
    particular figure annotation.
    """
    a_coeff, b_coeff = _ab_coefficients(g, J)
    rb = math.sqrt(b_coeff)
    d1 = (math.sqrt(2.0) / 4.0) * math.sqrt(a_coeff + rb)
    d2 = (math.sqrt(2.0) / 4.0) * math.sqrt(max(a_coeff - rb, 0.0))
    return {"plus_branch": (d1, -d1), "minus_branch": (d2, -d2)}
