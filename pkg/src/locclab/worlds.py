"""The two experimental worlds presented to Alice and Bob.

An **ER world** hands the agents a boundary qubit pair that is directly
identified across their locations: the exact singlet, with zero environment
channel degrees of freedom.  An **EPR world** routes the same pair through
``q_dim`` explicit channel qubits inside the environment, whose complement
(``qbar_dim`` qubits) couples to them with strength ``lam``.  The internal
environment Hamiltonian decomposes as channel + rest + coupling; with the
coupling at zero the two worlds present identical pairs, and any nonzero
coupling dephases the delivered pair.

Coupling form: each channel qubit couples to every rest qubit through a
``Z (x) Z`` term with staggered weights ``+1/4, -1/4, +1/4, ...`` down the
channel.  A *uniform* collective coupling would be blind to the singlet
(both of its branches carry total-Z charge zero, so the environment cannot
distinguish them and no dephasing occurs); staggering the signs makes the
two branches imprint opposite fields on the rest qubits.  The 1/4 scale
keeps the branch field difference at 1, so the pair coherence responds
monotonically to ``lam`` for ``lam * t <= pi/2``, the regime all bundled
sweeps use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError
from .linalg import (
    DIMENSION_CAP,
    DensityMatrix,
    HermitianOperator,
    PAULI_Z,
    SubsystemLayout,
    embed_operator,
    hermitian_exponential,
    purity,
    qubits,
)

__all__ = [
    "PAIR_LABELS",
    "HamiltonianDecomposition",
    "World",
    "BoundaryPair",
    "singlet_density",
    "build_er_world",
    "build_epr_world",
    "deliver_pair",
    "channel_purity_profile",
]

#: Labels of the boundary pair as seen by Alice and Bob.
PAIR_LABELS = ("q_A", "q_B")


def singlet_density(labels: Sequence[str] = PAIR_LABELS) -> DensityMatrix:
    """The canonical maximally entangled pair ``(|01> - |10>)/sqrt(2)``."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1 / math.sqrt(2)
    v[2] = -1 / math.sqrt(2)
    return DensityMatrix(np.outer(v, v.conj()), qubits(*labels))


def _random_single_qubit_hermitian(rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian 2x2 with all entries bounded in [-1, 1]."""
    a, d = rng.uniform(-1.0, 1.0, size=2)
    x, y = rng.uniform(-0.7, 0.7, size=2)
    return np.array([[a, x + 1j * y], [x - 1j * y, d]], dtype=complex)


@dataclass(frozen=True, eq=False)
class HamiltonianDecomposition:
    """Environment Hamiltonian split into channel, rest, and coupling parts.

    ``total = h_channel (x) I + I (x) h_rest + lam * h_coupling`` on the
    channel+rest layout.  With ``lam == 0`` the coupling term is the exact
    zero matrix, so channel and rest evolve independently.
    """

    h_channel: HermitianOperator
    h_rest: HermitianOperator
    h_coupling: HermitianOperator
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"coupling scale must be nonnegative, got {self.lam}")
        if self.lam == 0 and np.any(self.h_coupling.matrix != 0):
            raise ValueError("zero coupling scale requires an exactly zero coupling term")

    @property
    def layout(self) -> SubsystemLayout:
        return self.h_coupling.layout

    def total_operator(self) -> HermitianOperator:
        layout = self.layout
        h = embed_operator(self.h_channel.matrix, layout, self.h_channel.layout.labels)
        h = h + embed_operator(self.h_rest.matrix, layout, self.h_rest.layout.labels)
        h = h + self.lam * self.h_coupling.matrix
        return HermitianOperator(h, layout)


@dataclass(frozen=True, eq=False)
class World:
    """A complete experimental configuration delivering one boundary pair.

    ``location_labels`` are opaque coordinates carried for bookkeeping only;
    they never influence any numerical output.
    """

    mode: str  # "ER" | "EPR"
    q_dim: int
    qbar_dim: int
    decomposition: HamiltonianDecomposition | None
    evolution_time: float
    location_labels: tuple[str, str] = ("x_A", "x_B")
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in ("ER", "EPR"):
            raise ValueError(f"mode must be 'ER' or 'EPR', got {self.mode!r}")
        if self.mode == "ER" and self.q_dim != 0:
            raise ValueError("ER worlds have zero channel qubits")
        if self.mode == "EPR" and self.q_dim < 2:
            raise ValueError("EPR worlds need at least two channel qubits to carry the pair")
        if self.mode == "EPR" and self.decomposition is None:
            raise ValueError("EPR worlds need a Hamiltonian decomposition")
        if self.evolution_time <= 0:
            raise ValueError(f"evolution time must be positive, got {self.evolution_time}")

    @property
    def lam(self) -> float:
        return 0.0 if self.decomposition is None else self.decomposition.lam

    @property
    def total_dim(self) -> int:
        """Full simulated dimension including the boundary pair."""
        return 2 ** (2 + self.q_dim + self.qbar_dim)


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """The two-qubit state a world presents to Alice and Bob."""

    state: DensityMatrix
    provenance: str

    def __post_init__(self):
        if self.state.layout.labels != PAIR_LABELS:
            raise ValueError(f"boundary pair must live on {PAIR_LABELS}")


def build_er_world(location_labels: tuple[str, str] = ("x_A", "x_B")) -> World:
    """A world where the measured locations are directly identified: no channel."""
    return World(
        mode="ER",
        q_dim=0,
        qbar_dim=0,
        decomposition=None,
        evolution_time=1.0,
        location_labels=location_labels,
    )


def _channel_labels(q_dim: int) -> tuple[str, ...]:
    return tuple(f"ch{i}" for i in range(q_dim))


def _rest_labels(qbar_dim: int) -> tuple[str, ...]:
    return tuple(f"env{j}" for j in range(qbar_dim))


def _coupling_weight(i: int) -> float:
    # staggered half-difference weights; see module docstring
    return 0.25 if i % 2 == 0 else -0.25


def build_epr_world(
    q_dim: int,
    qbar_dim: int,
    lam: float,
    seed: int,
    *,
    evolution_time: float = 1.0,
    dimension_cap: int = DIMENSION_CAP,
    location_labels: tuple[str, str] = ("x_A", "x_B"),
) -> World:
    """A world whose pair is delivered through ``q_dim`` environment channel qubits.

    The channel part of the Hamiltonian is zero (channel qubits idle), the
    rest part is a sum of seeded random single-qubit terms, and the coupling
    is the staggered dephasing form scaled by ``lam``.
    """
    if q_dim < 2:
        raise ValueError(f"q_dim must be >= 2, got {q_dim}")
    if qbar_dim < 1:
        raise ValueError(f"qbar_dim must be >= 1, got {qbar_dim}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    total = 2 ** (2 + q_dim + qbar_dim)
    if total > dimension_cap:
        raise CapacityError(
            f"world dimension {total} (2 boundary + {q_dim} channel + {qbar_dim} rest qubits) "
            f"exceeds cap {dimension_cap}"
        )

    ch = _channel_labels(q_dim)
    env = _rest_labels(qbar_dim)
    ch_layout = qubits(*ch)
    env_layout = qubits(*env)
    full_layout = ch_layout.concat(env_layout)

    h_channel = HermitianOperator(np.zeros((2**q_dim, 2**q_dim), dtype=complex), ch_layout)

    rng = np.random.default_rng(seed)
    h_rest_m = np.zeros((2**qbar_dim, 2**qbar_dim), dtype=complex)
    for j, label in enumerate(env):
        h_rest_m += embed_operator(_random_single_qubit_hermitian(rng), env_layout, (label,))
    h_rest = HermitianOperator(h_rest_m, env_layout)

    dim = full_layout.total_dim
    coupling_m = np.zeros((dim, dim), dtype=complex)
    if lam > 0:
        zz = np.kron(PAULI_Z, PAULI_Z)
        for i, ci in enumerate(ch):
            for ej in env:
                coupling_m += _coupling_weight(i) * embed_operator(zz, full_layout, (ci, ej))
    h_coupling = HermitianOperator(coupling_m, full_layout)

    return World(
        mode="EPR",
        q_dim=q_dim,
        qbar_dim=qbar_dim,
        decomposition=HamiltonianDecomposition(h_channel, h_rest, h_coupling, float(lam)),
        evolution_time=float(evolution_time),
        location_labels=location_labels,
        seed=seed,
    )


def _initial_environment_vector(q_dim: int, qbar_dim: int) -> np.ndarray:
    """Singlet on the first two channel qubits, |0..0> on the rest, |+..+> on env."""
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1 / math.sqrt(2)
    singlet[2] = -1 / math.sqrt(2)
    v = singlet
    if q_dim > 2:
        spare = np.zeros(2 ** (q_dim - 2), dtype=complex)
        spare[0] = 1.0
        v = np.kron(v, spare)
    plus = np.full(2**qbar_dim, 2 ** (-qbar_dim / 2), dtype=complex)
    return np.kron(v, plus)


def deliver_pair(world: World) -> BoundaryPair:
    """Run the world once and return the pair state on ``(q_A, q_B)``.

    In an EPR world the pair is prepared on the two designated channel
    qubits, the whole environment evolves under its internal Hamiltonian for
    ``evolution_time``, and everything but those two carriers is traced out;
    the carriers are then handed over to the boundary.  With ``lam == 0``
    the coupling term is identically zero, so the channel factors commute
    with the evolution and the handover returns the exact singlet without
    numerical error.
    """
    if world.mode == "ER":
        return BoundaryPair(singlet_density(), provenance="ER")

    if world.lam == 0.0:
        return BoundaryPair(singlet_density(), provenance=f"EPR(lam=0, seed={world.seed})")

    decomp = world.decomposition
    h = decomp.total_operator().matrix
    psi0 = _initial_environment_vector(world.q_dim, world.qbar_dim)
    u = hermitian_exponential(h, -1j * world.evolution_time)
    psi_t = u @ psi0
    # the two carriers are the leading factors, so one reshape exposes them
    m = psi_t.reshape(4, -1)
    pair = m @ m.conj().T
    pair = pair / np.real(np.trace(pair))
    state = DensityMatrix(pair, qubits(*PAIR_LABELS))
    return BoundaryPair(
        state, provenance=f"EPR(lam={world.lam}, seed={world.seed}, t={world.evolution_time})"
    )


def channel_purity_profile(
    lambdas: Sequence[float],
    *,
    q_dim: int = 2,
    qbar_dim: int = 1,
    seed: int = 0,
    evolution_time: float = 1.0,
) -> list[tuple[float, float]]:
    """Pair purity as a function of coupling strength over an ascending grid."""
    grid = [float(x) for x in lambdas]
    if not grid:
        raise ValueError("lambda grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly ascending")
    out = []
    for lam in grid:
        world = build_epr_world(q_dim, qbar_dim, lam, seed, evolution_time=evolution_time)
        out.append((lam, purity(deliver_pair(world).state)))
    return out
