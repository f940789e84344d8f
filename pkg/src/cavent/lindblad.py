"""Lindblad master-equation engine.

Integrates d(rho)/dt = i[rho, H] + sum_x ( L rho L+ - 1/2 {L+L, rho} ) with a
fixed-step fourth-order Runge-Kutta scheme, and solves for steady states either
directly (null space of the vectorized Liouvillian) or by long-time evolution.

Rates are absorbed into the jump operators: each LindbladTerm carries
sqrt(rate) * operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import svd

from .errors import (
    ConvergenceError,
    DegenerateSteadyStateError,
    NumericsError,
    ValidationError,
)
from .operators import DensityMatrix, Operator

# fraction of the fastest timescale used as the RK4 step bound
STEP_SAFETY = 0.05
TRACE_ABORT_TOL = 1e-6
NEGATIVITY_ABORT_TOL = 1e-6
POPULATION_TOL = 1e-8
DIRECT_SOLVER_MAX_SUPERDIM = 4096
STEADY_RHS_TOL = 1e-10
STEADY_CONSECUTIVE_POINTS = 3


@dataclass(frozen=True)
class LindbladTerm:
    """One jump operator with its rate already absorbed as a sqrt scaling."""

    jump: Operator


@dataclass
class Trajectory:
    """Time series of labeled populations plus the final state."""

    times: np.ndarray
    populations: dict[str, np.ndarray]
    final_state: DensityMatrix
    converged: bool = False
    rhs_norms: np.ndarray = field(default=None, repr=False)


def _check_dims(h: Operator, terms: list[LindbladTerm]) -> None:
    for term in terms:
        if term.jump.dims != h.dims:
            raise ValidationError(
                f"jump dims {term.jump.dims} do not match Hamiltonian dims {h.dims}"
            )


def lindblad_rhs(h: Operator, terms: list[LindbladTerm], rho: DensityMatrix) -> Operator:
    """Right-hand side of the master equation as a dense operator."""
    _check_dims(h, terms)
    if rho.dims != h.dims:
        raise ValidationError(f"state dims {rho.dims} do not match {h.dims}")
    r = rho.data
    out = -1j * (h.data @ r - r @ h.data)
    for term in terms:
        ld = term.jump.data
        ldag = ld.conj().T
        k = ldag @ ld
        out = out + ld @ r @ ldag - 0.5 * (k @ r + r @ k)
    return Operator(out, h.dims)


def liouvillian(h: Operator, terms: list[LindbladTerm]) -> sp.csr_matrix:
    """Superoperator matrix acting on row-major vectorized density matrices."""
    _check_dims(h, terms)
    d = h.dim
    eye = sp.identity(d, dtype=complex, format="csr")
    hs = sp.csr_matrix(h.data)
    sup = -1j * (sp.kron(hs, eye) - sp.kron(eye, hs.T))
    for term in terms:
        ls = sp.csr_matrix(term.jump.data)
        k = (ls.conj().T @ ls).tocsr()
        sup = sup + sp.kron(ls, ls.conj()) - 0.5 * (sp.kron(k, eye) + sp.kron(eye, k.T))
    return sup.tocsr()


def _default_freq_scale(h: Operator, terms: list[LindbladTerm]) -> float:
    scale = float(np.abs(h.data).max())
    for term in terms:
        scale = max(scale, float(np.abs(term.jump.data).max()) ** 2)
    return max(scale, 1e-12)


def _population(proj: np.ndarray, rho: np.ndarray) -> float:
    val = np.einsum("ij,ji->", proj, rho)
    if abs(val.imag) > 1e-8:
        raise NumericsError(f"population has imaginary part {val.imag:.3e}")
    p = val.real
    if p < -POPULATION_TOL or p > 1.0 + POPULATION_TOL:
        raise NumericsError(f"population {p!r} outside [0, 1] tolerance band")
    return p


def integrate(
    h: Operator,
    terms: list[LindbladTerm],
    rho0: DensityMatrix,
    t_end: float,
    dt_max: float | None = None,
    observables: dict[str, Operator] | None = None,
    n_out: int = 201,
    freq_scale: float | None = None,
    steady_rhs_tol: float | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration with observables sampled on a uniform grid.

    The step is bounded by dt_max (if given) and by STEP_SAFETY over the
    fastest frequency in the model. When steady_rhs_tol is set, integration
    halts early once the max-norm of d(rho)/dt stays below the tolerance for
    three consecutive output points; the trajectory is truncated there.
    """
    if t_end <= 0:
        raise ValidationError(f"t_end must be positive, got {t_end}")
    if n_out < 2:
        raise ValidationError("n_out must be at least 2")
    _check_dims(h, terms)
    observables = observables or {}

    scale = freq_scale if freq_scale is not None else _default_freq_scale(h, terms)
    dt_cap = STEP_SAFETY / scale
    if dt_max is not None:
        dt_cap = min(dt_cap, dt_max)

    h_out = t_end / (n_out - 1)
    steps_per_out = max(1, math.ceil(h_out / dt_cap))
    dt = h_out / steps_per_out

    sup = liouvillian(h, terms)
    d = h.dim
    vec = rho0.data.reshape(-1).astype(complex)

    times = np.linspace(0.0, t_end, n_out)
    pops = {label: np.empty(n_out) for label in observables}
    rhs_norms = np.empty(n_out)
    converged_streak = 0
    last = n_out - 1

    for i_out in range(n_out):
        rho = vec.reshape(d, d)
        t = times[i_out]
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_ABORT_TOL:
            raise NumericsError(f"trace drift {abs(tr - 1.0):.3e} at t={t:.6g}")
        min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
        if min_eig < -NEGATIVITY_ABORT_TOL:
            raise NumericsError(f"negativity {min_eig:.3e} at t={t:.6g}")
        for label, obs in observables.items():
            pops[label][i_out] = _population(obs.data, rho)
        rhs_norms[i_out] = np.abs(sup @ vec).max()

        if steady_rhs_tol is not None:
            if rhs_norms[i_out] < steady_rhs_tol:
                converged_streak += 1
            else:
                converged_streak = 0
            if converged_streak >= STEADY_CONSECUTIVE_POINTS:
                last = i_out
                break

        if i_out == n_out - 1:
            break
        for _ in range(steps_per_out):
            k1 = sup @ vec
            k2 = sup @ (vec + 0.5 * dt * k1)
            k3 = sup @ (vec + 0.5 * dt * k2)
            k4 = sup @ (vec + dt * k3)
            vec = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    rho = vec.reshape(d, d)
    final = DensityMatrix(Operator(0.5 * (rho + rho.conj().T), h.dims))
    n_kept = last + 1
    return Trajectory(
        times=times[:n_kept],
        populations={k: v[:n_kept] for k, v in pops.items()},
        final_state=final,
        converged=converged_streak >= STEADY_CONSECUTIVE_POINTS,
        rhs_norms=rhs_norms[:n_kept],
    )


def steady_state(
    h: Operator,
    terms: list[LindbladTerm],
    method: str = "auto",
    rho0: DensityMatrix | None = None,
    t_max: float = 1e5,
    freq_scale: float | None = None,
) -> DensityMatrix:
    """Steady state via Liouvillian null space, or long-time evolution.

    The direct path is limited to superoperator dimension d^2 <= 4096; larger
    systems must evolve. A degenerate null space raises instead of silently
    picking one vector.
    """
    _check_dims(h, terms)
    d = h.dim
    if method == "auto":
        method = "direct" if d * d <= DIRECT_SOLVER_MAX_SUPERDIM else "evolve"

    if method == "direct":
        if d * d > DIRECT_SOLVER_MAX_SUPERDIM:
            raise ValidationError(
                f"superoperator dimension {d * d} exceeds direct-solver limit"
            )
        sup = liouvillian(h, terms).toarray()
        _, s, vh = svd(sup)
        scale = max(s[0], 1.0)
        if len(s) > 1 and s[-2] < 1e-10 * scale:
            raise DegenerateSteadyStateError(
                f"Liouvillian null space is degenerate (sigma[-2]={s[-2]:.3e})"
            )
        rho = vh[-1].conj().reshape(d, d)
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
        state = DensityMatrix(Operator(rho, h.dims))
    elif method == "evolve":
        if rho0 is None:
            rho0 = DensityMatrix(Operator(np.eye(d, dtype=complex) / d, h.dims))
        traj = integrate(
            h,
            terms,
            rho0,
            t_end=t_max,
            n_out=501,
            freq_scale=freq_scale,
            steady_rhs_tol=STEADY_RHS_TOL,
        )
        if not traj.converged:
            raise ConvergenceError(
                f"no steady state within t_max={t_max:.3g} "
                f"(final |rhs|={traj.rhs_norms[-1]:.3e})"
            )
        state = traj.final_state
    else:
        raise ValidationError(f"unknown steady-state method {method!r}")

    residual = np.abs(lindblad_rhs(h, terms, state).data).max()
    if residual > 1e-8:
        raise NumericsError(f"steady-state residual {residual:.3e} exceeds 1e-8")
    return state
