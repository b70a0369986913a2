"""Composite Hilbert space and elementary operators.

The system is atom ⊗ a ⊗ b ⊗ c with a two-level atom and three bosonic
modes truncated to a finite number of Fock levels each.  Basis ordering is
lexicographic with the atom slowest and mode c fastest:

    index = ((atom * n_a + m_a) * n_b + m_b) * n_c + m_c

which is exactly the ordering produced by chained Kronecker products
kron(atom, kron(a, kron(b, c))).  All index arithmetic lives here so tests
can enumerate basis states.

Operators are scipy CSR matrices kept in canonical form (sorted indices,
no stored zeros) so that equality is testable entrywise.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

MODES = ("a", "b", "c")


class TruncationError(ValueError):
    """Raised when a Fock truncation is too small to hold the physics."""


@dataclass(frozen=True)
class CompositeSpace:
    """Dimensions and basis indexing of the atom ⊗ a ⊗ b ⊗ c space."""

    n_a: int
    n_b: int
    n_c: int
    n_atom: int = field(default=2, init=False)

    def __post_init__(self):
        for name in ("n_a", "n_b", "n_c"):
            n = getattr(self, name)
            if not isinstance(n, int) or n < 2:
                raise TruncationError(
                    f"{name} must be an integer >= 2 (vacuum plus at least "
                    f"one photon), got {n!r}"
                )

    @property
    def dim(self) -> int:
        return self.n_atom * self.n_a * self.n_b * self.n_c

    def index(self, atom: int, m_a: int, m_b: int, m_c: int) -> int:
        """Basis index of |atom, m_a, m_b, m_c⟩ (atom: 0=g, 1=e)."""
        if not (0 <= atom < self.n_atom and 0 <= m_a < self.n_a
                and 0 <= m_b < self.n_b and 0 <= m_c < self.n_c):
            raise IndexError(
                f"state ({atom},{m_a},{m_b},{m_c}) outside truncation "
                f"(2,{self.n_a},{self.n_b},{self.n_c})"
            )
        return ((atom * self.n_a + m_a) * self.n_b + m_b) * self.n_c + m_c

    def unindex(self, i: int) -> tuple[int, int, int, int]:
        """Inverse of :meth:`index`."""
        if not 0 <= i < self.dim:
            raise IndexError(f"basis index {i} outside [0, {self.dim})")
        i, m_c = divmod(i, self.n_c)
        i, m_b = divmod(i, self.n_b)
        atom, m_a = divmod(i, self.n_a)
        return atom, m_a, m_b, m_c

    def basis_states(self):
        """All (atom, m_a, m_b, m_c) tuples in index order."""
        return [self.unindex(i) for i in range(self.dim)]


def build_space(n_a: int, n_b: int, n_c: int) -> CompositeSpace:
    """Create the composite space with the given Fock level counts."""
    return CompositeSpace(n_a, n_b, n_c)


def canonical(m) -> sp.csr_matrix:
    """CSR form with sorted indices and no stored zeros."""
    m = sp.csr_matrix(m)
    m.eliminate_zeros()
    m.sort_indices()
    return m


def dagger(m) -> sp.csr_matrix:
    """Hermitian conjugate, in canonical form."""
    return canonical(sp.csr_matrix(m).conjugate().transpose())


def sparse_equal(x, y, tol: float = 0.0) -> bool:
    """Entrywise equality of two sparse matrices (within tol)."""
    d = (canonical(x) - canonical(y)).tocoo()
    if d.nnz == 0:
        return True
    return bool(np.max(np.abs(d.data)) <= tol)


def ladder(n: int) -> sp.csr_matrix:
    """Single-mode annihilation operator √m |m-1⟩⟨m| on n Fock levels."""
    return canonical(sp.diags(np.sqrt(np.arange(1, n)), 1, format="csr"))


def _embed(space: CompositeSpace, which: str, local) -> sp.csr_matrix:
    """Tensor a single-subsystem operator into the composite space."""
    factors = {
        "atom": sp.identity(space.n_atom, format="csr"),
        "a": sp.identity(space.n_a, format="csr"),
        "b": sp.identity(space.n_b, format="csr"),
        "c": sp.identity(space.n_c, format="csr"),
    }
    factors[which] = local
    out = factors["atom"]
    for key in MODES:
        out = sp.kron(out, factors[key], format="csr")
    return canonical(out)


def annihilator(space: CompositeSpace, mode: str) -> sp.csr_matrix:
    """Annihilation operator of the given photon mode in the full space."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    n = getattr(space, f"n_{mode}")
    return _embed(space, mode, ladder(n))


def atom_sigma(space: CompositeSpace) -> sp.csr_matrix:
    """Atomic lowering operator σ = |g⟩⟨e| in the full space."""
    sigma = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    return _embed(space, "atom", sigma)


def number_operator(space: CompositeSpace, mode: str) -> sp.csr_matrix:
    """Photon-number operator of the given mode (diagonal)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    pos = MODES.index(mode) + 1
    occ = np.array([space.unindex(i)[pos] for i in range(space.dim)],
                   dtype=float)
    return canonical(sp.diags(occ, format="csr"))


def atom_excited_projector(space: CompositeSpace) -> sp.csr_matrix:
    """σ†σ = |e⟩⟨e| in the full space."""
    s = atom_sigma(space)
    return canonical(dagger(s) @ s)
