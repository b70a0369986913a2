"""Photon statistics of a steady-state density matrix.

Brightness N_i = Tr(ρ î†î), zero-delay correlations
g⁽ⁿ⁾(0) = ⟨î†ⁿîⁿ⟩ / ⟨î†î⟩ⁿ, photon-number distributions, and the blockade
classification rule: g² < 1 → single-photon blockade (CPB);
g² ≥ 1 and g³ < 1 → two-photon blockade (2PB).
"""

from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import CompositeSpace

# below this mean occupation a correlation denominator is treated as
# underflowed and the correlation reported as undefined
UNDERFLOW_FLOOR = 1e-12

IMAG_TOL = 1e-10


def _trace_product(rho: np.ndarray, op) -> float:
    val = (op @ rho).diagonal().sum()
    if abs(val.imag) > IMAG_TOL * max(abs(val.real), 1.0):
        raise ValueError(f"expectation value has imaginary part {val.imag}")
    return float(val.real)


def mean_photon_number(rho: np.ndarray, space: CompositeSpace,
                       mode: str) -> float:
    """Brightness Tr(ρ n̂) of one photon mode."""
    if rho.shape != (space.dim, space.dim):
        raise ValueError("density matrix does not match space dimension")
    return _trace_product(rho, algebra.number_operator(space, mode))


def correlation_g_n(rho: np.ndarray, space: CompositeSpace, mode: str,
                    n: int) -> float | None:
    """Zero-delay correlation g⁽ⁿ⁾(0), or None on denominator underflow.

    n = 3 needs occupation up to 3, so truncations below 4 levels are
    rejected rather than silently biased.
    """
    if n not in (2, 3):
        raise ValueError("only n = 2 and n = 3 are supported")
    levels = getattr(space, f"n_{mode}")
    if n == 3 and levels < 4:
        raise ValueError(
            f"g3 needs at least 4 Fock levels on mode {mode}, have {levels}"
        )
    mean = mean_photon_number(rho, space, mode)
    if mean < UNDERFLOW_FLOOR:
        return None
    a = algebra.annihilator(space, mode)
    an = a
    for _ in range(n - 1):
        an = an @ a
    numerator = _trace_product(rho, algebra.dagger(an) @ an)
    return numerator / mean**n


def photon_distribution(rho: np.ndarray, space: CompositeSpace,
                        mode: str) -> np.ndarray:
    """Occupation probabilities P(m) for one mode (marginal distribution)."""
    levels = getattr(space, f"n_{mode}")
    pos = algebra.MODES.index(mode) + 1
    probs = np.zeros(levels)
    diag = rho.diagonal().real
    for i in range(space.dim):
        probs[space.unindex(i)[pos]] += diag[i]
    return probs


def classify_blockade(g2: float | None, g3: float | None) -> str:
    """Blockade tag for mode a: 'CPB', '2PB', 'none', or 'undefined'.

    Boundary convention: g² = 1 counts as 2PB when g³ < 1.
    """
    if g2 is None or g3 is None:
        return "undefined"
    if g2 < 1.0:
        return "CPB"
    if g3 < 1.0:
        return "2PB"
    return "none"


@dataclass(frozen=True)
class ObservableSet:
    """Brightness and correlation summary of one steady state."""

    N_a: float
    N_b: float
    N_c: float
    g2_a: float | None
    g2_b: float | None
    g2_c: float | None
    g3_a: float | None
    tag: str


def compute_observables(rho: np.ndarray,
                        space: CompositeSpace) -> ObservableSet:
    """All sweep-level observables from one density matrix."""
    n = {m: mean_photon_number(rho, space, m) for m in algebra.MODES}
    g2 = {m: correlation_g_n(rho, space, m, 2) for m in algebra.MODES}
    g3_a = correlation_g_n(rho, space, "a", 3)
    return ObservableSet(
        N_a=n["a"], N_b=n["b"], N_c=n["c"],
        g2_a=g2["a"], g2_b=g2["b"], g2_c=g2["c"],
        g3_a=g3_a,
        tag=classify_blockade(g2["a"], g3_a),
    )
