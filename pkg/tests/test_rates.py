import math
import warnings

import numpy as np
import pytest

from cavent.effective import closed_form_model
from cavent.errors import ValidationError
from cavent.model import SystemParams
from cavent.rates import (
    RESIDUAL1_TOL,
    RESIDUAL2_TOL,
    convergence_time,
    cooperativity,
    effective_steady_state,
    optimal_params,
    optimized_system_params,
    rate_fidelity,
    rates_for_cooperativity,
    robustness_grid,
    scaling_study,
    steady_state_fidelity,
)

warnings.simplefilter("ignore")


def test_cooperativity_definition():
    assert cooperativity(SystemParams(g=1, kappa=1, gamma=1)) == 1.0
    p = SystemParams(g=1, kappa=0.05, gamma=0.1)
    assert np.isclose(cooperativity(p), 200.0)
    assert np.isclose(cooperativity(p.replace(g=2)), 800.0)
    with pytest.raises(ValidationError):
        cooperativity(SystemParams(kappa=0.0, gamma=0.1))


def test_rates_for_cooperativity_roundtrip():
    kappa, gamma = rates_for_cooperativity(200, 0.5)
    assert np.isclose(gamma, 0.1) and np.isclose(kappa, 0.05)
    p = SystemParams(kappa=kappa, gamma=gamma)
    assert np.isclose(cooperativity(p), 200.0)
    with pytest.raises(ValidationError):
        rates_for_cooperativity(-5, 1.0)


def test_rate_fidelity_omega_invariant():
    p = optimized_system_params(C=200, kappa_over_gamma=0.5, target="S")
    vals = [rate_fidelity(p.replace(Omega=om)) for om in (0.01, 0.02, 0.05)]
    assert abs(vals[0] - vals[1]) < 1e-10
    assert abs(vals[0] - vals[2]) < 1e-10


def test_optimal_params_residuals():
    for r in (0.5, 1.0, 2.0):
        kappa, gamma = rates_for_cooperativity(300, r)
        sol = optimal_params(1.0, kappa, gamma, target="S")
        assert abs(sol.residuals[0]) <= RESIDUAL1_TOL
        assert abs(sol.residuals[1]) <= RESIDUAL2_TOL


def test_optimal_params_scale_covariance():
    kappa, gamma = rates_for_cooperativity(200, 0.5)
    sol1 = optimal_params(1.0, kappa, gamma, target="S", J=1.2)
    s = 3.7
    sol2 = optimal_params(s, s * kappa, s * gamma, target="S", J=s * 1.2)
    assert np.isclose(sol2.Delta, s * sol1.Delta, rtol=1e-9)
    assert np.isclose(sol2.delta, s * sol1.delta, rtol=1e-9)
    assert np.isclose(sol2.predicted_infidelity, sol1.predicted_infidelity,
                      rtol=1e-9)


def test_rate_fidelity_monotone_in_C():
    vals = []
    for c in (50, 100, 200, 400):
        p = optimized_system_params(C=c, kappa_over_gamma=1.0, target="S")
        vals.append(rate_fidelity(p))
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_rate_fidelity_tracks_steady_state():
    for c in (100, 200):
        p = optimized_system_params(C=c, kappa_over_gamma=0.5, target="S",
                                    Omega=0.01, Omega_M=0.004)
        est = rate_fidelity(p)
        actual = 1.0 - steady_state_fidelity(p, "S")
        assert abs(est - actual) < 0.05


def test_scanned_optimum_near_printed_constant():
    kappa, gamma = rates_for_cooperativity(200, 0.5)
    sol = optimal_params(1.0, kappa, gamma, target="S")
    assert 12.8 / 200 / 2 < sol.predicted_infidelity < 12.8 / 200 * 2


def test_kappa_ratio_invariant():
    pS = optimized_system_params(C=200, kappa_over_gamma=0.5, target="S")
    pT = optimized_system_params(C=200, kappa_over_gamma=0.5, target="T")
    rS = closed_form_model(pS).rates
    rT = closed_form_model(pT).rates
    ratio = (rS["kappa_c1_1"] / rS["kappa_c1_2"]) / (rT["kappa_c2_1"] / rT["kappa_c2_2"])
    assert 1.5 <= ratio <= 3.0


def test_optimized_system_params_argument_checks():
    with pytest.raises(ValidationError):
        optimized_system_params(C=200)  # missing ratio
    with pytest.raises(ValidationError):
        optimized_system_params(kappa=0.05)  # gamma missing
    with pytest.raises(ValidationError):
        optimized_system_params(C=200, kappa_over_gamma=0.5, kappa=0.05, gamma=0.1)
    p = optimized_system_params(kappa=0.05, gamma=0.1, target="T")
    assert p.theta_M == 0.0


def test_effective_steady_state_is_steady():
    p = optimized_system_params(C=200, kappa_over_gamma=0.5, target="S")
    em = closed_form_model(p)
    rho = effective_steady_state(em)
    assert np.isclose(np.trace(rho).real, 1.0)
    assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_scaling_study_validation():
    with pytest.raises(ValidationError):
        scaling_study([5, 100, 200], 0.5)
    with pytest.raises(ValidationError):
        scaling_study([100, 200], 0.5)


def test_scaling_study_fit():
    res = scaling_study([50, 100, 200, 400], 1.0, target="S")
    assert 0.8 <= res.fit_slope <= 1.2
    assert 6.4 <= res.fit_prefactor <= 25.6
    assert all(0 < x < 1 for x in res.infidelities)


def test_convergence_time_methods():
    p = optimized_system_params(C=100, kappa_over_gamma=1.0, target="S")
    t_thr = convergence_time(p, "S", threshold=0.95)
    t_rel = convergence_time(p, "S", method="relaxation")
    assert t_thr > 0 and t_rel > 0
    with pytest.raises(ValidationError):
        convergence_time(p, "S", method="psychic")


def test_robustness_grid_shape():
    p = optimized_system_params(C=50, kappa_over_gamma=1.0, target="S")
    fracs, grid = robustness_grid(p, axes=("J", "delta"),
                                  fracs=np.array([-0.02, 0.0, 0.02]))
    assert grid.shape == (3, 3)
    assert np.all(grid >= 0) and np.all(grid <= 1)
    # the unperturbed center reproduces the plain steady-state fidelity
    assert np.isclose(grid[1, 1], steady_state_fidelity(p, "S"))
    with pytest.raises(ValidationError):
        robustness_grid(p, axes=("J", "phase_of_the_moon"))


def test_optimal_params_boundary_flag():
    kappa, gamma = rates_for_cooperativity(200, 0.5)
    sol = optimal_params(1.0, kappa, gamma, target="S")
    # the singlet optimum rides the upper end of the J scan and says so
    assert sol.on_scan_boundary
    pinned = optimal_params(1.0, kappa, gamma, target="S", J=1.0)
    assert not pinned.on_scan_boundary
