"""Lindblad generator, steady-state solvers, and time evolution.

The dissipators follow the standard trace-preserving form

    dρ/dt = -i[H, ρ] + Σ_i κ_i (n̄_i + 1) D[L_i]ρ + κ_i n̄_i D[L_i†]ρ

with L ∈ {a, b, c, σ} and D[L]ρ = LρL† − ½(L†Lρ + ρL†L).

Density matrices are vectorized by column stacking: vec(ρ) stacks the
columns of ρ, so vec(AρB) = (Bᵀ ⊗ A) vec(ρ).  The equivalence of the
superoperator route and the direct matrix form is exercised in tests, which
pins the convention.
"""

import numpy as np
import scipy.constants as const
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import algebra
from .algebra import CompositeSpace, canonical, dagger
from .model import ModelParams, build_hamiltonian


class SteadyStateError(RuntimeError):
    """Direct solve failed (degenerate steady space or solver breakdown)."""


class ConvergenceError(RuntimeError):
    """Time evolution hit the horizon before reaching the tolerance."""


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation n̄ = 1/(exp(ħω/k_B T) − 1).

    omega in rad/s, temperature in kelvin.  Returns 0 at T = 0.
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = const.hbar * omega / (const.k * temperature)
    return 1.0 / np.expm1(x)


def vec(rho) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def collapse_operators(space: CompositeSpace, params: ModelParams):
    """(rate, operator) pairs for all dissipation channels."""
    ops = []
    for mode, kappa, nbar in (
        ("a", params.kappa_a, params.nbar_a),
        ("b", params.kappa_b, params.nbar_b),
        ("c", params.kappa_c, params.nbar_c),
    ):
        L = algebra.annihilator(space, mode)
        ops.append((kappa * (nbar + 1.0), L))
        if nbar > 0:
            ops.append((kappa * nbar, dagger(L)))
    sigma = algebra.atom_sigma(space)
    ops.append((params.gamma * (params.nbar_sigma + 1.0), sigma))
    if params.nbar_sigma > 0:
        ops.append((params.gamma * params.nbar_sigma, dagger(sigma)))
    return ops


def build_liouvillian(space: CompositeSpace, H, params: ModelParams):
    """Sparse superoperator of order D² generating dρ/dt on vec(ρ)."""
    H = canonical(H)
    if H.shape[0] != space.dim:
        raise ValueError(
            f"Hamiltonian dimension {H.shape[0]} does not match space "
            f"dimension {space.dim}"
        )
    ident = sp.identity(space.dim, format="csr", dtype=complex)
    lv = -1j * (sp.kron(ident, H) - sp.kron(H.T, ident))
    for rate, L in collapse_operators(space, params):
        LdL = (dagger(L) @ L).astype(complex)
        L = L.astype(complex)
        lv = lv + rate * (
            sp.kron(L.conjugate(), L)
            - 0.5 * sp.kron(ident, LdL)
            - 0.5 * sp.kron(LdL.T, ident)
        )
    return canonical(lv)


def apply_generator(space: CompositeSpace, H, params: ModelParams, rho):
    """Right-hand side dρ/dt in matrix form (no vectorization)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (space.dim, space.dim):
        raise ValueError("density matrix does not match space dimension")
    Hd = np.asarray(canonical(H).toarray())
    drho = -1j * (Hd @ rho - rho @ Hd)
    for rate, L in collapse_operators(space, params):
        Ld = dagger(L).toarray()
        Lm = L.toarray()
        LdL = Ld @ Lm
        drho += rate * (Lm @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return drho


def _hermitize(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def effective_hamiltonian_preconditioner(space: CompositeSpace, H,
                                         params: ModelParams):
    """Approximate inverse of the Liouvillian for Krylov steady-state solves.

    The generator splits as L = L0 + J where L0 ρ = -i(H_e ρ - ρ H_e†) with
    H_e = H - (i/2) Σ rate·L†L, and J is the jump refill Σ rate·LρL†.  L0 is
    a Sylvester operator and inverts exactly through the eigendecomposition
    H_e = V Λ V⁻¹, which costs only dense D×D work.  The leftover J term is
    what GMRES iterates away.
    """
    he = canonical(H).astype(complex).toarray()
    for rate, L in collapse_operators(space, params):
        he = he - 0.5j * rate * (dagger(L) @ L).toarray()
    lam, v = np.linalg.eig(he)
    v_inv = np.linalg.inv(v)
    denom = -1j * (lam[:, None] - lam[None, :].conj())
    # states decoupled from all decay channels (e.g. the vacuum at zero
    # temperature and zero drive) give a zero denominator; any nonzero
    # stand-in keeps the preconditioner bounded there
    denom[np.abs(denom) < 1e-14] = -1.0
    v_dag = v.conj().T
    v_inv_dag = v_inv.conj().T

    def apply(r: np.ndarray) -> np.ndarray:
        rm = unvec(r)
        x = v @ ((v_inv @ rm @ v_inv_dag) / denom) @ v_dag
        return vec(x)

    return apply


def steady_state_direct(lv, precond=None, maxiter: int = 2000,
                        residual_tol: float = 1e-10
                        ) -> tuple[np.ndarray, float]:
    """Solve L·vec(ρ) = 0 with unit trace imposed through a bordered system.

    The singular generator is replaced by the nonsingular operator
    A x = L x + vec(|0⟩⟨0|)·tr(x), whose unique solution is the normalized
    steady state.  With a preconditioner (see
    effective_hamiltonian_preconditioner) the system is solved by GMRES;
    without one it falls back to a sparse LU factorization, which is only
    practical for small spaces.

    Returns (ρ, residual) with residual = ‖L·vec(ρ)‖₂ / ‖L‖_F.
    """
    lv = canonical(lv)
    n2 = lv.shape[0]
    d = int(round(np.sqrt(n2)))
    u = np.zeros(n2, dtype=complex)
    u[0] = 1.0
    if precond is None:
        a = lv.tolil(copy=True)
        a[0, :] = 0.0
        for k in range(d):
            a[0, k * d + k] = 1.0
        try:
            x = spla.spsolve(a.tocsc(), u)
        except Exception as exc:
            raise SteadyStateError(f"sparse solve failed: {exc}") from exc
    else:
        diag_idx = np.arange(0, n2, d + 1)

        def bordered(xv):
            return lv @ xv + u * np.sum(xv[diag_idx])

        aop = spla.LinearOperator((n2, n2), matvec=bordered, dtype=complex)
        mop = spla.LinearOperator((n2, n2), matvec=precond, dtype=complex)
        x, info = spla.gmres(aop, u, M=mop, rtol=1e-13, atol=1e-14,
                             restart=80, maxiter=maxiter)
        if info != 0:
            raise SteadyStateError(
                f"GMRES did not converge (info={info}); the steady space "
                "may be degenerate or the preconditioner ineffective"
            )
    if not np.all(np.isfinite(x)) or abs(np.sum(x[:: d + 1])) < 1e-12:
        raise SteadyStateError(
            "singular system beyond the expected one-dimensional null "
            "space (degenerate steady space?)"
        )
    rho = _hermitize(unvec(x))
    residual = float(np.linalg.norm(lv @ vec(rho)) / spla.norm(lv))
    if residual > residual_tol:
        raise SteadyStateError(
            f"steady-state residual {residual:.3e} above tolerance "
            f"{residual_tol:.1e}"
        )
    return rho, residual


def rk4_evolve(lv, v0: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Fixed-step classical RK4 on dvec/dt = L·vec from v0 for time t."""
    v = v0.astype(complex, copy=True)
    steps = max(int(np.ceil(t / dt)), 1)
    h = t / steps
    for _ in range(steps):
        k1 = lv @ v
        k2 = lv @ (v + 0.5 * h * k1)
        k3 = lv @ (v + 0.5 * h * k2)
        k4 = lv @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v


def stable_step(lv, params: ModelParams, dt: float | None = None) -> float:
    """Integrator step: min of the 0.05/max-rate heuristic and an RK4
    stability bound from the Liouvillian row-sum norm."""
    if dt is not None:
        return dt
    scale = max(abs(params.delta_a), abs(params.delta_b),
                abs(params.delta_c), abs(params.delta_sigma),
                abs(params.g), abs(params.J),
                params.kappa_a + params.kappa_b + params.kappa_c
                + params.gamma)
    heuristic = 0.05 / max(scale, 1.0)
    row_norm = np.abs(lv).sum(axis=1).max()
    return min(heuristic, 1.5 / max(float(row_norm), 1.0))


def steady_state_evolve(space: CompositeSpace, H, params: ModelParams,
                        dt: float | None = None, tol: float = 1e-9,
                        t_max: float = 500.0,
                        rho0: np.ndarray | None = None,
                        lv=None) -> tuple[np.ndarray, float]:
    """Integrate the master equation from the vacuum (or rho0) until
    ‖dρ/dt‖_max < tol.  Independent cross-check for steady_state_direct.

    Returns (ρ, final generator norm).  Raises ConvergenceError if the
    horizon t_max is exceeded first.
    """
    if lv is None:
        lv = build_liouvillian(space, H, params)
    d = space.dim
    if rho0 is None:
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1.0
    v = vec(np.asarray(rho0, dtype=complex))
    h = stable_step(lv, params, dt)
    block = 25  # steps between convergence checks
    t = 0.0
    while t < t_max:
        for _ in range(block):
            k1 = lv @ v
            k2 = lv @ (v + 0.5 * h * k1)
            k3 = lv @ (v + 0.5 * h * k2)
            k4 = lv @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            # renormalize trace drift accumulated by the integrator
            tr = np.sum(v[:: d + 1]).real
            v = v / tr
        t += block * h
        rate = np.max(np.abs(lv @ v))
        if rate < tol:
            return _hermitize(unvec(v)), float(rate)
    raise ConvergenceError(
        f"generator norm {rate:.3e} still above tol {tol:.3e} at "
        f"t = {t:.1f} (horizon {t_max})"
    )


def steady_state(params: ModelParams, method: str = "direct",
                 **kwargs) -> tuple[np.ndarray, float]:
    """Build H and L for params and solve for the steady state.

    Returns (ρ, diagnostic): relative residual for the direct solver,
    final generator norm for the evolution solver.
    """
    space = params.space()
    H = build_hamiltonian(space, params)
    lv = build_liouvillian(space, H, params)
    if method == "direct":
        precond = effective_hamiltonian_preconditioner(space, H, params)
        return steady_state_direct(lv, precond=precond, **kwargs)
    if method == "evolve":
        return steady_state_evolve(space, H, params, lv=lv, **kwargs)
    raise ValueError(f"unknown steady-state method {method!r}")
