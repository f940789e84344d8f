import math
import warnings

import numpy as np
import pytest

from cavent.errors import ValidationError
from cavent.lindblad import integrate
from cavent.model import (
    SystemParams,
    atomic_projectors,
    bare_hamiltonian,
    beam_splitter_unitary,
    bell_states,
    delocalized_hamiltonian,
    frequency_scale,
    full_hamiltonian,
    ground_kets,
    lindblad_terms,
    microwave_hamiltonian,
    random_ground_state,
    truncation_faithful_indices,
    vacuum_ground_state,
)

P = SystemParams(kappa=0.05, gamma=0.1, Delta=1.2, delta=2.0, J=0.8, n_max=1)


def test_params_validation():
    with pytest.raises(ValidationError):
        SystemParams(g=0.0)
    with pytest.raises(ValidationError):
        SystemParams(kappa=-0.1)
    with pytest.raises(ValidationError):
        SystemParams(n_max=0)


def test_strong_drive_warns():
    with pytest.warns(UserWarning):
        SystemParams(Omega=0.5)


def test_dims_and_frequency_scale():
    assert P.dims == (3, 3, 2, 2)
    assert frequency_scale(P) == 2.0
    assert P.replace(J=7.0).J == 7.0


def test_hamiltonians_hermitian():
    for h in (full_hamiltonian(P), delocalized_hamiltonian(P),
              bare_hamiltonian(P, "site"), microwave_hamiltonian(P)):
        assert h.is_hermitian(1e-12)


def test_bare_hamiltonian_rejects_unknown_basis():
    with pytest.raises(ValidationError):
        bare_hamiltonian(P, "momentum")
    with pytest.raises(ValidationError):
        lindblad_terms(P, "momentum")


def test_site_and_delocalized_spectra_match():
    keep = truncation_faithful_indices(P.n_max)
    e_site = np.linalg.eigvalsh(full_hamiltonian(P).data[np.ix_(keep, keep)])
    e_del = np.linalg.eigvalsh(delocalized_hamiltonian(P).data[np.ix_(keep, keep)])
    assert np.abs(e_site - e_del).max() < 1e-9


def test_beam_splitter_maps_between_bases():
    u = beam_splitter_unitary(P).data
    assert np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() < 1e-12
    keep = truncation_faithful_indices(P.n_max)
    sector = np.ix_(keep, keep)
    # the rotation leaves the faithful sector invariant and maps one
    # representation onto the other there
    others = [i for i in range(u.shape[0]) if i not in keep]
    assert np.abs(u[np.ix_(keep, others)]).max() == 0.0
    up = u[sector]
    h_site = full_hamiltonian(P).data[sector]
    h_del = delocalized_hamiltonian(P).data[sector]
    assert np.abs(up.conj().T @ h_site @ up - h_del).max() < 1e-9


def test_trajectories_identical_across_bases():
    # at n_max = 2 the edge-state leakage sits far below the 1e-8 budget
    p = P.replace(n_max=2)
    rho0 = vacuum_ground_state(2, "00")
    obs = {"S": atomic_projectors(2)["S"]}
    kw = dict(t_end=30.0, observables=obs, n_out=31,
              freq_scale=frequency_scale(p))
    t_site = integrate(full_hamiltonian(p), lindblad_terms(p, "site"), rho0, **kw)
    t_del = integrate(delocalized_hamiltonian(p), lindblad_terms(p, "delocalized"),
                      rho0, **kw)
    dev = np.abs(t_site.populations["S"] - t_del.populations["S"]).max()
    assert dev < 1e-8


def test_microwave_matrix_elements():
    """theta_M = pi drives |00> <-> |T| and leaves |S> dark, and vice versa."""
    kets = ground_kets(1)
    for theta, dark, driven in ((math.pi, "S", "T"), (0.0, "T", "S")):
        hg = microwave_hamiltonian(P.replace(theta_M=theta)).data
        amp_dark = kets[dark].conj() @ hg @ kets["00"]
        amp_driven = kets[driven].conj() @ hg @ kets["00"]
        assert abs(amp_dark) < 1e-12
        assert np.isclose(abs(amp_driven), P.Omega_M / math.sqrt(2))
    # fixed sign convention: at theta_M = 0 the singlet amplitude is positive
    hg = microwave_hamiltonian(P.replace(theta_M=0.0)).data
    assert np.isclose(kets["S"].conj() @ hg @ kets["00"], P.Omega_M / math.sqrt(2))


def test_jump_operators():
    terms = lindblad_terms(P, "site")
    assert len(terms) == 6
    # cavity jumps scale as sqrt(kappa), atomic as sqrt(gamma/2)
    strong = lindblad_terms(P.replace(kappa=4 * P.kappa), "site")
    assert np.allclose(strong[0].jump.data, 2 * terms[0].jump.data)
    strong_g = lindblad_terms(P.replace(gamma=4 * P.gamma), "site")
    assert np.allclose(strong_g[2].jump.data, 2 * terms[2].jump.data)


def test_bell_states_orthonormal():
    states = bell_states()
    labels = list(states)
    for i, a in enumerate(labels):
        for b in labels[i:]:
            expected = 1.0 if a == b else 0.0
            assert np.isclose(abs(states[a].conj() @ states[b]), expected)


def test_projectors_resolve_ground_subspace():
    projs = atomic_projectors(1)
    kets = ground_kets(1)
    for label, ket in kets.items():
        for other, proj in projs.items():
            expected = 1.0 if other == label else 0.0
            assert np.isclose((ket.conj() @ proj.data @ ket).real, expected)


def test_random_ground_state_seeded():
    r1 = random_ground_state(1, seed=3)
    r2 = random_ground_state(1, seed=3)
    r3 = random_ground_state(1, seed=4)
    assert np.allclose(r1.data, r2.data)
    assert not np.allclose(r1.data, r3.data)
    # lives in the atomic ground subspace with empty cavities
    projs = atomic_projectors(1)
    total = sum((r1.expect(projs[l]).real for l in ("00", "S", "T", "11")))
    assert np.isclose(total, 1.0)


def test_fock_truncation_converges():
    """Weak-drive dynamics is insensitive to raising the photon cutoff."""
    warnings.simplefilter("ignore")
    pops = {}
    for nm in (1, 2):
        p = P.replace(n_max=nm)
        rho0 = vacuum_ground_state(nm, "00")
        traj = integrate(full_hamiltonian(p), lindblad_terms(p, "site"), rho0,
                         t_end=60.0, observables={"S": atomic_projectors(nm)["S"]},
                         n_out=13)
        pops[nm] = traj.populations["S"]
    assert np.abs(pops[1] - pops[2]).max() < 5e-3
