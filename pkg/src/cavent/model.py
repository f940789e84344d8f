"""Physical model of two driven three-level atoms in coupled lossy cavities.

Subsystem order is fixed globally as [atom1(3), atom2(3), cavity1, cavity2];
all operators built here follow it. Energies and rates are in units of the
atom-cavity coupling g, times in units of 1/g.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .errors import ValidationError
from .lindblad import LindbladTerm
from .operators import DensityMatrix, Operator, annihilation, atomic_op, embed


@dataclass(frozen=True)
class SystemParams:
    """Full physical parameter set, rates relative to the coupling g."""

    g: float = 1.0
    kappa: float = 0.05
    gamma: float = 0.1
    Omega: float = 0.05
    Omega_M: float = 0.02
    Delta: float = 1.0
    delta: float = 1.0
    J: float = 0.5
    theta_M: float = math.pi
    n_max: int = 2

    def __post_init__(self):
        if self.g <= 0:
            raise ValidationError(f"g must be positive, got {self.g}")
        for name in ("kappa", "gamma", "Omega", "Omega_M"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be nonnegative")
        if self.n_max < 1:
            raise ValidationError(f"n_max must be >= 1, got {self.n_max}")
        if self.Omega > self.g / 10:
            warnings.warn(
                f"Omega={self.Omega} exceeds g/10; the effective model "
                "assumes a weak optical drive",
                stacklevel=2,
            )

    @property
    def dims(self) -> tuple[int, int, int, int]:
        n = self.n_max + 1
        return (3, 3, n, n)

    def replace(self, **kw) -> "SystemParams":
        return replace(self, **kw)


def frequency_scale(p: SystemParams) -> float:
    """Fastest frequency in the full model; bounds the integrator step."""
    return max(abs(p.Delta), p.g, p.kappa, p.gamma, abs(p.J), abs(p.delta))


def _mode_ops(p: SystemParams) -> tuple[Operator, Operator]:
    a = annihilation(p.n_max)
    return embed(a, 2, p.dims), embed(a, 3, p.dims)


def _atom_ops(p: SystemParams, i: int, j: int) -> tuple[Operator, Operator]:
    s = atomic_op(i, j)
    return embed(s, 0, p.dims), embed(s, 1, p.dims)


def microwave_hamiltonian(p: SystemParams) -> Operator:
    """H_g: resonant microwave drive with relative phase theta_M on atom 1.

    The sign convention is fixed so that theta_M = pi drives the ladder
    |00> <-> |T> <-> |11> and leaves |S> dark (the singlet is then the
    dissipative attractor), while theta_M = 0 drives the singlet ladder
    and targets |T>.
    """
    s10_1, s10_2 = _atom_ops(p, 1, 0)
    hg = (p.Omega_M / 2) * (-cmath.exp(1j * p.theta_M) * s10_1 + s10_2)
    return hg + hg.dag()


def optical_drive(p: SystemParams) -> Operator:
    """V_plus: the weak optical drive |0> -> |2| on both atoms."""
    s20_1, s20_2 = _atom_ops(p, 2, 0)
    return (p.Omega / 2) * (s20_1 + s20_2)


def bare_hamiltonian(p: SystemParams, basis: str = "site") -> Operator:
    """H_0: detunings, atom-cavity couplings and photon hopping, no drives.

    In the site basis the two elementary modes are the local cavity fields
    a1, a2. In the delocalized basis they are c1 = (a1 - a2)/sqrt(2) at
    detuning delta - J and c2 = (a1 + a2)/sqrt(2) at delta + J, and the
    photon-hopping term is diagonal.
    """
    p22_1, p22_2 = _atom_ops(p, 2, 2)
    s21_1, s21_2 = _atom_ops(p, 2, 1)
    m1, m2 = _mode_ops(p)
    if basis == "site":
        h0 = p.delta * (m1.dag() @ m1 + m2.dag() @ m2)
        coupling = p.g * (s21_1 @ m1 + s21_2 @ m2)
        hop = p.J * (m1.dag() @ m2)
        h0 = h0 + hop + hop.dag()
    elif basis == "delocalized":
        h0 = (p.delta - p.J) * (m1.dag() @ m1) + (p.delta + p.J) * (m2.dag() @ m2)
        coupling = (p.g / math.sqrt(2)) * (s21_1 @ (m1 + m2) + s21_2 @ (m2 - m1))
    else:
        raise ValidationError(f"basis must be 'site' or 'delocalized', got {basis!r}")
    return h0 + p.Delta * (p22_1 + p22_2) + coupling + coupling.dag()


def full_hamiltonian(p: SystemParams) -> Operator:
    """Interaction-picture Hamiltonian in the site (local cavity mode) basis."""
    vp = optical_drive(p)
    return bare_hamiltonian(p, "site") + microwave_hamiltonian(p) + vp + vp.dag()


def delocalized_hamiltonian(p: SystemParams) -> Operator:
    """Full Hamiltonian with the delocalized modes as the elementary modes."""
    vp = optical_drive(p)
    return bare_hamiltonian(p, "delocalized") + microwave_hamiltonian(p) + vp + vp.dag()


def beam_splitter_unitary(p: SystemParams) -> Operator:
    """Two-mode rotation relating the site and delocalized representations.

    U+ H_site U equals delocalized_hamiltonian exactly on truncation-complete
    photon sectors; with per-mode truncation that means exact equality for
    n_max = 1 and equality away from the top Fock edge otherwise.
    """
    a1, a2 = _mode_ops(p)
    gen = (a1.dag() @ a2 - a2.dag() @ a1).data
    return Operator(expm((math.pi / 4) * gen), p.dims)


def truncation_faithful_indices(n_max: int) -> np.ndarray:
    """Indices of basis states with total photon number <= n_max.

    With a per-mode Fock cutoff the two-mode space carries edge states
    (total photons > n_max) on which the site/delocalized beam-splitter
    rotation is not faithfully represented; restricting comparisons to this
    sector removes the truncation artifact.
    """
    n = n_max + 1
    keep = []
    for atoms in range(9):
        for n1 in range(n):
            for n2 in range(n):
                if n1 + n2 <= n_max:
                    keep.append((atoms * n + n1) * n + n2)
    return np.array(keep)


def lindblad_terms(p: SystemParams, basis: str = "site") -> list[LindbladTerm]:
    """The six jump operators: two cavity channels, four atomic channels."""
    if basis not in ("site", "delocalized"):
        raise ValidationError(f"basis must be 'site' or 'delocalized', got {basis!r}")
    m1, m2 = _mode_ops(p)  # a1, a2 in site basis; c1, c2 in delocalized basis
    s02_1, s02_2 = _atom_ops(p, 0, 2)
    s12_1, s12_2 = _atom_ops(p, 1, 2)
    sqk = math.sqrt(p.kappa)
    sqg = math.sqrt(p.gamma / 2)
    return [
        LindbladTerm(sqk * m1),
        LindbladTerm(sqk * m2),
        LindbladTerm(sqg * s02_1),
        LindbladTerm(sqg * s02_2),
        LindbladTerm(sqg * s12_1),
        LindbladTerm(sqg * s12_2),
    ]


def bell_states() -> dict[str, np.ndarray]:
    """Two-atom ground-subspace basis vectors in the 3x3 atomic space."""
    def two_atom(i, j):
        v = np.zeros(9, dtype=complex)
        v[3 * i + j] = 1.0
        return v

    s = (two_atom(0, 1) - two_atom(1, 0)) / math.sqrt(2)
    t = (two_atom(0, 1) + two_atom(1, 0)) / math.sqrt(2)
    return {"00": two_atom(0, 0), "S": s, "T": t, "11": two_atom(1, 1)}


def atomic_projectors(n_max: int = 2) -> dict[str, Operator]:
    """Projectors on |00>, |S>, |T>, |11>, identity on both cavities."""
    n = n_max + 1
    dims = (3, 3, n, n)
    eye_cav = np.eye(n * n, dtype=complex)
    out = {}
    for label, vec in bell_states().items():
        proj_atoms = np.outer(vec, vec.conj())
        out[label] = Operator(np.kron(proj_atoms, eye_cav), dims)
    return out


def ground_kets(n_max: int = 2) -> dict[str, np.ndarray]:
    """|00>, |S>, |T>, |11> tensored with the two-cavity vacuum."""
    n = n_max + 1
    vac = np.zeros(n * n, dtype=complex)
    vac[0] = 1.0
    return {label: np.kron(vec, vac) for label, vec in bell_states().items()}


def random_ground_state(n_max: int = 2, seed: int = 0) -> DensityMatrix:
    """Seeded random pure state on the two-atom ground subspace, cavities empty."""
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
    coeffs /= np.linalg.norm(coeffs)
    kets = ground_kets(n_max)
    vec = sum(c * kets[label] for c, label in zip(coeffs, ("00", "S", "T", "11")))
    n = n_max + 1
    return DensityMatrix.from_ket(vec, (3, 3, n, n))


def vacuum_ground_state(n_max: int = 2, label: str = "00") -> DensityMatrix:
    n = n_max + 1
    return DensityMatrix.from_ket(ground_kets(n_max)[label], (3, 3, n, n))
