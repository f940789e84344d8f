import math

import numpy as np
import pytest

from cavent.errors import (
    ConvergenceError,
    DegenerateSteadyStateError,
    ValidationError,
)
from cavent.lindblad import (
    LindbladTerm,
    integrate,
    lindblad_rhs,
    liouvillian,
    steady_state,
)
from cavent.operators import DensityMatrix, Operator, annihilation


def _number_proj(n, dim):
    m = np.zeros((dim, dim), dtype=complex)
    m[n, n] = 1.0
    return Operator(m, (dim,))


def test_cavity_decay_matches_exponential():
    """Empty cavity decay: P_1(t) = exp(-kappa t) to 1e-6."""
    kappa = 0.37
    a = annihilation(3)
    h = Operator(np.zeros((4, 4)), (4,))
    terms = [LindbladTerm(math.sqrt(kappa) * a)]
    ket = np.zeros(4)
    ket[1] = 1.0
    rho0 = DensityMatrix.from_ket(ket, (4,))
    traj = integrate(h, terms, rho0, t_end=8.0, observables={"P1": _number_proj(1, 4)},
                     n_out=81)
    expected = np.exp(-kappa * traj.times)
    assert np.abs(traj.populations["P1"] - expected).max() < 1e-6


def test_vacuum_rabi_oscillation():
    """Resonant atom-cavity exchange: P_e(t) = cos^2(gt) to 1e-6."""
    g = 1.3
    # two-level atom x one-photon cavity, atomic basis ordered (|e>, |g>)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
    a = annihilation(1).data
    h = g * (np.kron(sp, a) + np.kron(sp.conj().T, a.conj().T))
    h_op = Operator(h, (2, 2))
    ket = np.zeros(4)
    ket[0] = 1.0  # |e, 0>
    proj_e = Operator(np.kron(np.diag([1.0, 0.0]), np.eye(2)), (2, 2))
    rho0 = DensityMatrix.from_ket(ket, (2, 2))
    traj = integrate(h_op, [], rho0, t_end=6.0, observables={"Pe": proj_e},
                     n_out=121, dt_max=0.01)
    expected = np.cos(g * traj.times) ** 2
    assert np.abs(traj.populations["Pe"] - expected).max() < 1e-6


def _driven_atom(delta, omega, gamma):
    sm = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e| with basis (g, e)
    h = delta * np.diag([0.0, 1.0]) + (omega / 2) * (sm + sm.conj().T)
    return Operator(h, (2,)), [LindbladTerm(Operator(math.sqrt(gamma) * sm, (2,)))]


def test_optical_bloch_steady_state():
    """Driven two-level atom against the analytic Bloch steady state, 1e-6."""
    delta, omega, gamma = 0.7, 0.9, 1.1
    h, terms = _driven_atom(delta, omega, gamma)
    rho = steady_state(h, terms, method="direct")
    s = omega**2 / 2 / (delta**2 + gamma**2 / 4)
    p_e = 0.5 * s / (1 + s)
    assert abs(rho.data[1, 1].real - p_e) < 1e-6


def test_direct_and_evolve_steady_states_agree():
    h, terms = _driven_atom(0.3, 0.8, 0.9)
    rho_d = steady_state(h, terms, method="direct")
    rho_e = steady_state(h, terms, method="evolve", t_max=400.0)
    assert np.abs(rho_d.data - rho_e.data).max() < 1e-6


def test_rhs_matches_superoperator():
    h, terms = _driven_atom(0.2, 0.5, 0.4)
    rho = DensityMatrix(Operator(np.array([[0.6, 0.2], [0.2, 0.4]], dtype=complex), (2,)))
    dense = lindblad_rhs(h, terms, rho).data
    sup = liouvillian(h, terms)
    vec = sup @ rho.data.reshape(-1)
    assert np.abs(dense.reshape(-1) - vec).max() < 1e-12


def test_trace_preserved_along_trajectory():
    h, terms = _driven_atom(0.0, 1.0, 0.5)
    ket = np.array([1.0, 0.0])
    traj = integrate(h, terms, DensityMatrix.from_ket(ket, (2,)), t_end=30.0,
                     observables={"Pe": _number_proj(1, 2)}, n_out=61)
    # engine aborts on trace/positivity violations; reaching here means they held
    assert traj.times[-1] == 30.0
    assert np.all(traj.populations["Pe"] >= -1e-8)
    assert np.all(traj.populations["Pe"] <= 1 + 1e-8)


def test_integrate_validates_inputs():
    h, terms = _driven_atom(0.0, 1.0, 0.5)
    rho0 = DensityMatrix(Operator(np.eye(2) / 2, (2,)))
    with pytest.raises(ValidationError):
        integrate(h, terms, rho0, t_end=-1.0)
    with pytest.raises(ValidationError):
        integrate(h, terms, rho0, t_end=1.0, n_out=1)
    bad = [LindbladTerm(Operator(np.eye(4), (4,)))]
    with pytest.raises(ValidationError):
        integrate(h, bad, rho0, t_end=1.0)


def test_early_stop_on_steady_state():
    h, terms = _driven_atom(0.0, 0.0, 1.0)  # pure decay to |g>
    ket = np.array([0.0, 1.0])
    traj = integrate(h, terms, DensityMatrix.from_ket(ket, (2,)), t_end=500.0,
                     n_out=101, steady_rhs_tol=1e-12)
    assert traj.converged
    assert traj.times[-1] < 500.0
    assert np.isclose(traj.final_state.data[0, 0].real, 1.0, atol=1e-9)


def test_degenerate_steady_state_detected():
    # two uncoupled sectors: |0> is dark, |2> is dark, |1> decays to |0>
    l = np.zeros((3, 3), dtype=complex)
    l[0, 1] = 1.0
    h = Operator(np.zeros((3, 3)), (3,))
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(h, [LindbladTerm(Operator(l, (3,)))], method="direct")


def test_evolve_raises_when_not_converged():
    h, terms = _driven_atom(0.0, 1.0, 0.01)
    rho0 = DensityMatrix.from_ket(np.array([1.0, 0.0]), (2,))
    with pytest.raises(ConvergenceError):
        steady_state(h, terms, method="evolve", rho0=rho0, t_max=1.0)


def test_direct_solver_dimension_guard():
    dim = 70  # 70^2 = 4900 > 4096 superoperator limit
    h = Operator(np.zeros((dim, dim)), (dim,))
    l = np.zeros((dim, dim), dtype=complex)
    l[0, 1] = 1.0
    with pytest.raises(ValidationError):
        steady_state(h, [LindbladTerm(Operator(l, (dim,)))], method="direct")
