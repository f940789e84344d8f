"""Dense operator algebra on tensor-product Hilbert spaces.

Every operator carries the ordered list of subsystem dimensions it acts on,
so tensor embeddings and partial traces never have to guess the factorization.
All values are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

HERM_CONSTRUCTION_TOL = 1e-12
STATE_TRACE_TOL = 1e-9
STATE_TRACE_IMAG_TOL = 1e-12
STATE_HERM_TOL = 1e-10
STATE_EIG_TOL = 1e-8


@dataclass(frozen=True)
class Operator:
    """A dense complex matrix together with its subsystem dimensions."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValidationError(f"operator data must be square, got {data.shape}")
        if math.prod(self.dims) != data.shape[0]:
            raise ValidationError(
                f"dims {self.dims} do not factor dimension {data.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T, self.dims)

    def is_hermitian(self, tol: float = HERM_CONSTRUCTION_TOL) -> bool:
        return bool(np.abs(self.data - self.data.conj().T).max() <= tol)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise ValidationError(f"dims mismatch: {self.dims} vs {other.dims}")
        return Operator(self.data @ other.data, self.dims)

    def __add__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise ValidationError(f"dims mismatch: {self.dims} vs {other.dims}")
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise ValidationError(f"dims mismatch: {self.dims} vs {other.dims}")
        return Operator(self.data - other.data, self.dims)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.data * complex(scalar), self.dims)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.data, self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """State-role operator: unit trace, Hermitian, positive (within tolerance)."""

    op: Operator

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_ket(cls, ket: np.ndarray, dims) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex).reshape(-1)
        ket = ket / np.linalg.norm(ket)
        return cls(Operator(np.outer(ket, ket.conj()), tuple(dims)))

    @property
    def data(self) -> np.ndarray:
        return self.op.data

    @property
    def dims(self) -> tuple[int, ...]:
        return self.op.dims

    def validate(
        self,
        trace_tol: float = STATE_TRACE_TOL,
        herm_tol: float = STATE_HERM_TOL,
        eig_tol: float = STATE_EIG_TOL,
    ) -> None:
        tr = np.trace(self.data)
        if abs(tr.real - 1.0) > trace_tol or abs(tr.imag) > STATE_TRACE_IMAG_TOL:
            raise ValidationError(f"density matrix trace {tr} is not 1")
        herm_dev = np.abs(self.data - self.data.conj().T).max()
        if herm_dev > herm_tol:
            raise ValidationError(f"density matrix not Hermitian (dev {herm_dev:.3e})")
        min_eig = np.linalg.eigvalsh(self.data).min()
        if min_eig < -eig_tol:
            raise ValidationError(f"density matrix has negative eigenvalue {min_eig:.3e}")

    def expect(self, observable: Operator) -> complex:
        return complex(np.trace(observable.data @ self.data))


def identity(dims) -> Operator:
    dims = tuple(dims)
    return Operator(np.eye(math.prod(dims), dtype=complex), dims)


def annihilation(n_max: int) -> Operator:
    """Bosonic annihilation operator on a Fock space truncated at n_max photons."""
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}")
    d = n_max + 1
    a = np.zeros((d, d), dtype=complex)
    for n in range(1, d):
        a[n - 1, n] = math.sqrt(n)
    return Operator(a, (d,))


def atomic_op(i: int, j: int) -> Operator:
    """|i><j| on a three-level atom."""
    if i not in (0, 1, 2) or j not in (0, 1, 2):
        raise ValidationError(f"atomic levels must be in 0..2, got ({i}, {j})")
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return Operator(m, (3,))


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; subsystem lists concatenate."""
    return Operator(np.kron(a.data, b.data), a.dims + b.dims)


def embed(op: Operator, slot: int, dims) -> Operator:
    """Lift a single-subsystem operator into the full space, identity elsewhere."""
    dims = tuple(int(d) for d in dims)
    if not 0 <= slot < len(dims):
        raise ValidationError(f"slot {slot} out of range for dims {dims}")
    if op.dim != dims[slot]:
        raise ValidationError(
            f"operator dimension {op.dim} does not match dims[{slot}]={dims[slot]}"
        )
    left = np.eye(math.prod(dims[:slot]), dtype=complex)
    right = np.eye(math.prod(dims[slot + 1:]), dtype=complex)
    return Operator(np.kron(np.kron(left, op.data), right), dims)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every subsystem not listed in `keep` (indices into rho.dims)."""
    dims = rho.dims
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValidationError("keep must be nonempty")
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValidationError(f"keep indices {keep} invalid for dims {dims}")
    n = len(dims)
    tensor = rho.data.reshape(dims + dims)
    # contract traced-out row/column index pairs one at a time
    traced = [k for k in range(n) if k not in keep]
    for count, k in enumerate(traced):
        # after each trace the tensor loses one row and one column axis
        k_eff = k - count
        n_eff = n - count
        tensor = np.trace(tensor, axis1=k_eff, axis2=k_eff + n_eff)
    d_keep = math.prod(dims[k] for k in keep)
    out = tensor.reshape(d_keep, d_keep)
    return DensityMatrix(Operator(out, tuple(dims[k] for k in keep)))


def trace_all(rho: DensityMatrix) -> float:
    """Full trace, exposed for the 'trace over everything' degenerate case."""
    return float(np.trace(rho.data).real)
