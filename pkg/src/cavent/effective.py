"""Reduced four-state model on {|00>, |S>, |T>, |11>}.

Two independent construction routes:

* closed form -- the printed analytic coefficients and jump operators of the
  adiabatic elimination, evaluated directly from the parameters;
* numerical -- second-order effective-operator reduction: invert the
  non-Hermitian Hamiltonian on the excited manifold and project onto the
  ground manifold.

The excited manifold is every basis state with an atom in |2> or at least one
photon; the ground manifold is the four-dimensional atomic ground subspace
tensored with the cavity vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterRegimeError, ValidationError
from .lindblad import LindbladTerm
from .model import (
    SystemParams,
    bare_hamiltonian,
    ground_kets,
    lindblad_terms,
    optical_drive,
)
from .operators import Operator

BASIS_LABELS = ("00", "S", "T", "11")
_I00, _IS, _IT, _I11 = 0, 1, 2, 3

RATE_NAMES = ("kappa_c1_1", "kappa_c1_2", "kappa_c2_1", "kappa_c2_2", "gamma_eff")


@dataclass(frozen=True)
class EffectiveCoefficients:
    """Analytic building blocks of the reduced model."""

    g_eff: float
    delta_c: complex
    Delta_c: complex
    R1: complex
    R2: complex
    R3: complex
    A1: float
    B1: float
    C1: float
    D1: float
    A2: float
    B2: float
    C2: float
    D2: float


@dataclass(frozen=True)
class EffectiveModel:
    """4x4 Hamiltonian, jump operators and named decay rates."""

    h: np.ndarray
    jumps: tuple[np.ndarray, ...]
    rates: dict[str, float]
    labels: tuple[str, ...] = BASIS_LABELS

    def as_system(self) -> tuple[Operator, list[LindbladTerm]]:
        h_op = Operator(self.h, (4,))
        terms = [LindbladTerm(Operator(j, (4,))) for j in self.jumps]
        return h_op, terms

    def projectors(self) -> dict[str, Operator]:
        out = {}
        for idx, label in enumerate(self.labels):
            m = np.zeros((4, 4), dtype=complex)
            m[idx, idx] = 1.0
            out[label] = Operator(m, (4,))
        return out

    def frequency_scale(self) -> float:
        scale = float(np.abs(self.h).max())
        for j in self.jumps:
            scale = max(scale, float(np.abs(j).max()) ** 2)
        return max(scale, 1e-12)


def coefficients(p: SystemParams) -> EffectiveCoefficients:
    """Complex detunings, resolvent coefficients and decay denominators.

    The analytic coefficients carry g^2*J where required by dimensional
    consistency (the compact printed form absorbs one power of g in g = 1
    units).
    """
    if p.Delta == 0:
        raise ParameterRegimeError("Delta = 0 leaves g_eff undefined")
    g, k, gam = p.g, p.kappa, p.gamma
    d, D, J = p.delta, p.Delta, p.J
    dc = d - 0.5j * k
    Dc = D - 0.5j * gam

    denom1 = dc * g**2 - Dc * (dc - J) * (dc + J)
    r1 = -(dc - J) * (dc + J) / denom1
    denom23 = (g**2 - Dc * (dc - J)) * (g**2 - Dc * (dc + J))
    r2 = (-(g**2) * J - dc * g**2 + Dc * (dc**2 - J**2)) / denom23
    r3 = ((g**2) * J - dc * g**2 + Dc * (dc**2 - J**2)) / denom23

    a = d * g**2 / D - (d**2 - J**2)
    b = k * (d - g**2 / (2 * D)) + gam * (d**2 - J**2) / (2 * D)
    c1 = g**2 / D - (d - J)
    d1 = k / 2 + gam * (d - J) / (2 * D)
    c2 = g**2 / D - (d + J)
    d2 = k / 2 + gam * (d + J) / (2 * D)

    return EffectiveCoefficients(
        g_eff=g * p.Omega / D,
        delta_c=dc,
        Delta_c=Dc,
        R1=r1,
        R2=r2,
        R3=r3,
        A1=a,
        B1=b,
        C1=c1,
        D1=d1,
        A2=a,
        B2=b,
        C2=c2,
        D2=d2,
    )


def gamma_eff(p: SystemParams) -> float:
    """Effective spontaneous-emission rate feeding the four gamma channels."""
    g, k, gam, d, D, J = p.g, p.kappa, p.gamma, p.delta, p.Delta, p.J
    lead = g**2 - D * d
    if lead == 0:
        raise ParameterRegimeError("g^2 = Delta*delta makes gamma_eff singular")
    tail = g**4 + k**2 * D**2
    if tail == 0:
        raise ParameterRegimeError("g^4 + kappa^2 Delta^2 vanished")
    b_term = k * (D * d - g**2 / 2) + gam * (d**2 - J**2) / 2
    num = (gam * p.Omega**2 / 2) * ((g**2 * J) ** 2 + b_term**2)
    return num / (lead**2 * tail)


def hg_bell(Omega_M: float, theta_M: float) -> np.ndarray:
    """Microwave drive Hamiltonian in the {|00>, |S>, |T>, |11>} basis."""
    raise_q = np.array([[0, 0], [1, 0]], dtype=complex)
    eye2 = np.eye(2, dtype=complex)
    m = (Omega_M / 2) * (
        -np.exp(1j * theta_M) * np.kron(raise_q, eye2) + np.kron(eye2, raise_q)
    )
    m = m + m.conj().T
    # rows of the change of basis from {00, 01, 10, 11} to {00, S, T, 11}
    inv_sqrt2 = 1.0 / math.sqrt(2)
    basis = np.array(
        [
            [1, 0, 0, 0],
            [0, inv_sqrt2, -inv_sqrt2, 0],
            [0, inv_sqrt2, inv_sqrt2, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    )
    return basis @ m @ basis.conj().T


def closed_form_model(p: SystemParams) -> EffectiveModel:
    """Reduced model assembled from the printed analytic expressions."""
    c = coefficients(p)
    om2 = p.Omega**2
    h = hg_bell(p.Omega_M, p.theta_M)
    h = h + np.diag(
        [
            -np.real(om2 * c.R1 / 2),
            -np.real(om2 * c.R3 / 4),
            -np.real(om2 * c.R2 / 4),
            0.0,
        ]
    ).astype(complex)

    ge2k = c.g_eff**2 * p.kappa / 4
    k11 = (p.delta + p.J) ** 2 * ge2k / (c.A1**2 + c.B1**2)
    k12 = ge2k / (c.C1**2 + c.D1**2)
    k21 = (p.delta - p.J) ** 2 * ge2k / (c.A2**2 + c.B2**2)
    k22 = ge2k / (c.C2**2 + c.D2**2)

    l_k1 = np.zeros((4, 4), dtype=complex)
    l_k1[_IS, _I00] = math.sqrt(k11)
    l_k1[_I11, _IS] = math.sqrt(k12)
    l_k2 = np.zeros((4, 4), dtype=complex)
    l_k2[_IT, _I00] = math.sqrt(k21)
    l_k2[_I11, _IT] = math.sqrt(k22)

    sq_g2 = math.sqrt(p.gamma / 2)
    r1m, r2m, r3m = abs(c.R1), abs(c.R2), abs(c.R3)
    om = p.Omega
    l_g1 = np.zeros((4, 4), dtype=complex)
    l_g1[_I00, _I00] = om / 2 * r1m
    l_g1[_IT, _IT] = om / 4 * r2m
    l_g1[_IS, _IT] = om / 4 * r2m
    l_g1[_IT, _IS] = om / 4 * r3m
    l_g1[_IS, _IS] = om / 4 * r3m
    l_g1 *= sq_g2

    l_g3 = np.zeros((4, 4), dtype=complex)
    l_g3[_IT, _I00] = om / (2 * math.sqrt(2)) * r1m
    l_g3[_IS, _I00] = om / (2 * math.sqrt(2)) * r1m
    l_g3[_I11, _IT] = om / (2 * math.sqrt(2)) * r2m
    l_g3[_I11, _IS] = om / (2 * math.sqrt(2)) * r3m
    l_g3 *= sq_g2

    rates = {
        "kappa_c1_1": k11,
        "kappa_c1_2": k12,
        "kappa_c2_1": k21,
        "kappa_c2_2": k22,
        "gamma_eff": gamma_eff(p),
    }
    # gamma_2 and gamma_4 channels duplicate gamma_1 and gamma_3
    return EffectiveModel(
        h=h, jumps=(l_k1, l_k2, l_g1, l_g1.copy(), l_g3, l_g3.copy()), rates=rates
    )


def _ground_and_excited_indices(p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    n = p.n_max + 1
    dim = 9 * n * n
    ground = []
    for a1 in (0, 1):
        for a2 in (0, 1):
            ground.append(((3 * a1 + a2) * n + 0) * n + 0)
    ground = np.array(sorted(ground))
    mask = np.ones(dim, dtype=bool)
    mask[ground] = False
    return ground, np.nonzero(mask)[0]


def numerical_effective_model(p: SystemParams) -> EffectiveModel:
    """Reduced model from the second-order effective-operator formalism.

    Works in the delocalized-mode representation so the two cavity jump
    channels project directly onto the singlet and triplet decay paths.
    """
    h0 = bare_hamiltonian(p, "delocalized")
    terms = lindblad_terms(p, "delocalized")
    dim = h0.dim

    k_sum = np.zeros((dim, dim), dtype=complex)
    for term in terms:
        ld = term.jump.data
        k_sum += ld.conj().T @ ld
    h_nh = h0.data - 0.5j * k_sum

    _, exc = _ground_and_excited_indices(p)
    h_exc = h_nh[np.ix_(exc, exc)]
    svals = np.linalg.svd(h_exc, compute_uv=False)
    if svals[-1] < 1e-12 * max(svals[0], 1.0):
        raise ParameterRegimeError(
            f"non-Hermitian Hamiltonian is singular (sigma_min={svals[-1]:.3e})"
        )
    m_inv = np.linalg.inv(h_exc)
    m_full = np.zeros((dim, dim), dtype=complex)
    m_full[np.ix_(exc, exc)] = m_inv

    vp = optical_drive(p).data
    vm = vp.conj().T

    kets = ground_kets(p.n_max)
    g_cols = np.column_stack([kets[label] for label in BASIS_LABELS])

    h_eff_full = -0.5 * vm @ (m_full + m_full.conj().T) @ vp
    h4 = g_cols.conj().T @ h_eff_full @ g_cols + hg_bell(p.Omega_M, p.theta_M)

    jumps = []
    for term in terms:
        l_eff = term.jump.data @ m_full @ vp
        jumps.append(g_cols.conj().T @ l_eff @ g_cols)

    l_c1, l_c2, l_g1, _, l_g3, _ = jumps
    rates = {
        "kappa_c1_1": abs(l_c1[_IS, _I00]) ** 2,
        "kappa_c1_2": abs(l_c1[_I11, _IS]) ** 2,
        "kappa_c2_1": abs(l_c2[_IT, _I00]) ** 2,
        "kappa_c2_2": abs(l_c2[_I11, _IT]) ** 2,
        "gamma_eff": 16 * abs(l_g1[_IT, _IS]) ** 2,
    }
    return EffectiveModel(h=h4, jumps=tuple(jumps), rates=rates)


def bell_state_overlap(rho4: np.ndarray, label: str) -> float:
    """Population of one of the four basis states in a 4x4 reduced state."""
    if label not in BASIS_LABELS:
        raise ValidationError(f"unknown state label {label!r}")
    idx = BASIS_LABELS.index(label)
    return float(np.real(rho4[idx, idx]))
