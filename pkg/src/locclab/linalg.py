"""Dense complex linear algebra over multi-qubit Hilbert spaces.

States and operators are plain ``numpy`` arrays wrapped together with a
:class:`SubsystemLayout` that records the tensor factorization.  The layout
convention is fixed once, here: **factor 0 is the most significant index**,
i.e. the basis state ``|k_0 k_1 ... k_{n-1}>`` has linear index
``k_0 * d_1 * ... * d_{n-1} + ... + k_{n-1}``, matching ``numpy.kron`` order.

All values are validated on construction and immutable afterwards; every
operation is a pure function of its inputs, so values can be shared freely
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, LayoutError

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "DIMENSION_CAP",
    "SubsystemLayout",
    "DensityMatrix",
    "PureState",
    "HermitianOperator",
    "tensor_product",
    "partial_trace",
    "evolve",
    "trace_distance",
    "purity",
    "expectation",
    "embed_operator",
    "hermitian_exponential",
    "ID2",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "basis_ket",
    "plus_ket",
    "qubits",
]

#: Default total-dimension cap; dense storage beyond this is refused.
DIMENSION_CAP = 2**14


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used by the state/operator validity checks.

    ``herm``/``trace``/``norm`` bound the Hermiticity, unit-trace, and
    unit-norm defects; ``psd`` bounds how far below zero an eigenvalue may
    sit before a matrix is rejected as non-positive.  Double-precision dense
    algebra on the system sizes this package targets stays far below the
    defaults.
    """

    herm: float = 1e-10
    trace: float = 1e-10
    norm: float = 1e-10
    psd: float = 1e-9


DEFAULT_TOLERANCES = Tolerances()

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def _require_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{what} contains non-finite entries")


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered tensor factorization of a Hilbert space.

    ``factors`` is a tuple of ``(label, dimension)`` pairs; labels are unique
    and dimensions are at least 2.  Factor 0 is the most significant index.
    """

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(l), int(d)) for l, d in self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise LayoutError("layout needs at least one factor")
        labels = [l for l, _ in factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate factor labels in {labels}")
        for l, d in factors:
            if d < 2:
                raise LayoutError(f"factor {l!r} has dimension {d} < 2")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def position(self, label: str) -> int:
        for i, (l, _) in enumerate(self.factors):
            if l == label:
                return i
        raise LayoutError(f"unknown factor label {label!r}; have {self.labels}")

    def dimension_of(self, labels: Iterable[str]) -> int:
        return math.prod(self.dims[self.position(l)] for l in labels)

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.factors + other.factors)


def qubits(*labels: str) -> SubsystemLayout:
    """Layout of one qubit per label."""
    return SubsystemLayout(tuple((l, 2) for l in labels))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density operator together with its subsystem layout.

    Construction validates squareness, Hermiticity, unit trace, and positive
    semidefiniteness against :class:`Tolerances`.
    """

    matrix: np.ndarray
    layout: SubsystemLayout
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False, compare=False)

    def __post_init__(self):
        m = _freeze(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] != self.layout.total_dim:
            raise LayoutError(
                f"matrix dimension {m.shape[0]} != layout dimension {self.layout.total_dim}"
            )
        _require_finite(m, "density matrix")
        herm_defect = np.max(np.abs(m - m.conj().T))
        if herm_defect > self.tol.herm:
            raise ValueError(f"density matrix not Hermitian (defect {herm_defect:.3e})")
        tr_defect = abs(np.trace(m) - 1.0)
        if tr_defect > self.tol.trace:
            raise ValueError(f"density matrix trace != 1 (defect {tr_defect:.3e})")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -self.tol.psd:
            raise ValueError(f"density matrix not PSD (min eigenvalue {min_eig:.3e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def relabeled(self, labels: Sequence[str]) -> "DensityMatrix":
        """Same matrix with factors renamed (dimensions unchanged)."""
        dims = self.layout.dims
        if len(labels) != len(dims):
            raise LayoutError(f"expected {len(dims)} labels, got {len(labels)}")
        return DensityMatrix(self.matrix, SubsystemLayout(tuple(zip(labels, dims))), self.tol)


@dataclass(frozen=True, eq=False)
class PureState:
    """A state vector with unit 2-norm and a subsystem layout."""

    amplitudes: np.ndarray
    layout: SubsystemLayout
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False, compare=False)

    def __post_init__(self):
        v = _freeze(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", v)
        if v.shape[0] != self.layout.total_dim:
            raise LayoutError(
                f"vector dimension {v.shape[0]} != layout dimension {self.layout.total_dim}"
            )
        _require_finite(v, "state vector")
        norm_defect = abs(np.linalg.norm(v) - 1.0)
        if norm_defect > self.tol.norm:
            raise ValueError(f"state vector not normalized (defect {norm_defect:.3e})")

    def to_density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.layout, self.tol)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A Hermitian operator (observable or Hamiltonian) with a layout."""

    matrix: np.ndarray
    layout: SubsystemLayout
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False, compare=False)

    def __post_init__(self):
        m = _freeze(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] != self.layout.total_dim:
            raise LayoutError(
                f"matrix dimension {m.shape[0]} != layout dimension {self.layout.total_dim}"
            )
        _require_finite(m, "operator")
        herm_defect = np.max(np.abs(m - m.conj().T))
        if herm_defect > self.tol.herm:
            raise ValueError(f"operator not Hermitian (defect {herm_defect:.3e})")


def _same_layout(a: SubsystemLayout, b: SubsystemLayout) -> bool:
    return a.factors == b.factors


def tensor_product(a, b, *, dimension_cap: int = DIMENSION_CAP):
    """Tensor product of two values of the same kind.

    Accepts two :class:`DensityMatrix`, two :class:`HermitianOperator`, two
    :class:`PureState`, or two bare ``numpy`` arrays.  For layout-carrying
    kinds the result layout is the concatenation of the factor lists; label
    collisions are rejected.  The product dimension must stay within
    ``dimension_cap``.
    """
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        if a.shape[-1] * b.shape[-1] > dimension_cap:
            raise CapacityError(
                f"product dimension {a.shape[-1] * b.shape[-1]} exceeds cap {dimension_cap}"
            )
        return np.kron(a, b)
    pairs = (
        (DensityMatrix, lambda m, lay: DensityMatrix(m, lay)),
        (HermitianOperator, lambda m, lay: HermitianOperator(m, lay)),
    )
    for kind, make in pairs:
        if isinstance(a, kind) and isinstance(b, kind):
            total = a.layout.total_dim * b.layout.total_dim
            if total > dimension_cap:
                raise CapacityError(f"product dimension {total} exceeds cap {dimension_cap}")
            return make(np.kron(a.matrix, b.matrix), a.layout.concat(b.layout))
    if isinstance(a, PureState) and isinstance(b, PureState):
        total = a.layout.total_dim * b.layout.total_dim
        if total > dimension_cap:
            raise CapacityError(f"product dimension {total} exceeds cap {dimension_cap}")
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.layout.concat(b.layout))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out all factors not named in ``keep``.

    The result's layout is the kept factors in their original order; the
    total trace is preserved exactly up to floating point.
    """
    keep = list(keep)
    if not keep:
        raise LayoutError("must keep at least one factor")
    positions = {rho.layout.position(l) for l in keep}
    dims = rho.layout.dims
    n = len(dims)
    kept = sorted(positions)
    tensor = rho.matrix.reshape(dims + dims)
    # einsum integer subscripts: traced factors share the row/column axis id
    row = list(range(n))
    col = [n + i if i in positions else i for i in range(n)]
    out = [i for i in kept] + [n + i for i in kept]
    reduced = np.einsum(tensor, row + col, out)
    kept_dim = math.prod(dims[i] for i in kept)
    reduced = reduced.reshape(kept_dim, kept_dim)
    return DensityMatrix(reduced, SubsystemLayout(tuple(rho.layout.factors[i] for i in kept)), rho.tol)


def hermitian_exponential(h: np.ndarray, scale: complex) -> np.ndarray:
    """``exp(scale * h)`` for Hermitian ``h`` via eigendecomposition.

    Eigendecomposition is exact for Hermitian input up to roundoff and keeps
    the result unitary when ``scale`` is imaginary.
    """
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def evolve(rho: DensityMatrix, h: HermitianOperator, t: float) -> DensityMatrix:
    """Conjugate ``rho`` by ``exp(-i h t)``; trace and spectrum are preserved."""
    if not _same_layout(rho.layout, h.layout):
        raise LayoutError(
            f"state layout {rho.layout.factors} != Hamiltonian layout {h.layout.factors}"
        )
    u = hermitian_exponential(h.matrix, -1j * float(t))
    return DensityMatrix(u @ rho.matrix @ u.conj().T, rho.layout, rho.tol)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of ``a - b``; in [0, 1] for density matrices."""
    if a.dim != b.dim:
        raise LayoutError(f"dimension mismatch: {a.dim} vs {b.dim}")
    w = np.linalg.eigvalsh(a.matrix - b.matrix)
    return 0.5 * float(np.sum(np.abs(w)))


def purity(rho: DensityMatrix) -> float:
    """``Tr(rho^2)``; equals 1 exactly for pure states."""
    m = rho.matrix
    return float(np.real(np.trace(m @ m)))


def expectation(rho: DensityMatrix, obs: HermitianOperator) -> float:
    """``Tr(rho O)`` as a real number."""
    if not _same_layout(rho.layout, obs.layout):
        raise LayoutError(
            f"state layout {rho.layout.factors} != observable layout {obs.layout.factors}"
        )
    val = np.trace(rho.matrix @ obs.matrix)
    return float(np.real(val))


def _digit_map(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Map original linear indices to indices of the basis permuted by ``perm``."""
    n = len(dims)
    total = math.prod(dims)
    strides = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    idx = np.arange(total, dtype=np.int64)
    digits = [(idx // strides[i]) % dims[i] for i in range(n)]
    pdims = [dims[p] for p in perm]
    pstrides = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        pstrides[i] = pstrides[i + 1] * pdims[i + 1]
    out = np.zeros(total, dtype=np.int64)
    for j, p in enumerate(perm):
        out += digits[p] * pstrides[j]
    return out


def embed_operator(op: np.ndarray, layout: SubsystemLayout, targets: Sequence[str]) -> np.ndarray:
    """Extend ``op`` (acting on ``targets``, in that order) by identity elsewhere.

    ``op`` must be square with dimension equal to the product of the target
    factor dimensions.
    """
    positions = [layout.position(l) for l in targets]
    if len(set(positions)) != len(positions):
        raise LayoutError(f"repeated target labels in {targets}")
    dims = layout.dims
    target_dim = math.prod(dims[p] for p in positions)
    if op.shape != (target_dim, target_dim):
        raise LayoutError(
            f"operator shape {op.shape} does not match target dimension {target_dim}"
        )
    rest = [i for i in range(len(dims)) if i not in positions]
    rest_dim = math.prod([dims[i] for i in rest]) if rest else 1
    if not rest:
        # targets may still be permuted relative to the layout
        perm = positions
        q = _digit_map(dims, perm)
        return np.ascontiguousarray(op[np.ix_(q, q)])
    full_permuted = np.kron(op, np.eye(rest_dim, dtype=complex))
    perm = positions + rest
    q = _digit_map(dims, perm)
    return np.ascontiguousarray(full_permuted[np.ix_(q, q)])


def basis_ket(bits: str) -> np.ndarray:
    """Computational-basis vector for a bit string, qubit 0 most significant."""
    n = len(bits)
    v = np.zeros(2**n, dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def plus_ket(n: int = 1) -> np.ndarray:
    """``|+>^{\\otimes n}`` vector."""
    v = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    return v
