"""Shared random-object builders for the test suite."""

from __future__ import annotations

import numpy as np

from locclab import DensityMatrix, HermitianOperator, qubits
from locclab.instruments import InstrumentBranch, QuantumInstrument


def random_density(rng: np.random.Generator, n_qubits: int, labels=None) -> DensityMatrix:
    dim = 2**n_qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    m /= np.trace(m).real
    layout = qubits(*(labels or [f"q{i}" for i in range(n_qubits)]))
    return DensityMatrix(m, layout)


def random_hermitian(rng: np.random.Generator, n_qubits: int, labels=None) -> HermitianOperator:
    dim = 2**n_qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    layout = qubits(*(labels or [f"q{i}" for i in range(n_qubits)]))
    return HermitianOperator((g + g.conj().T) / 2, layout)


def random_instrument(
    rng: np.random.Generator, dim: int, n_outcomes: int, kraus_per_branch: int = 1
) -> QuantumInstrument:
    """Random valid instrument from a Haar-ish isometry split into blocks."""
    k_total = n_outcomes * kraus_per_branch
    g = rng.normal(size=(k_total * dim, dim)) + 1j * rng.normal(size=(k_total * dim, dim))
    isometry, _ = np.linalg.qr(g)
    blocks = [isometry[i * dim : (i + 1) * dim, :] for i in range(k_total)]
    branches = []
    for j in range(n_outcomes):
        ops = tuple(blocks[j * kraus_per_branch + k] for k in range(kraus_per_branch))
        branches.append(InstrumentBranch(str(j), ops))
    return QuantumInstrument(tuple(branches))


def sign_flip_one_term(inst: QuantumInstrument) -> QuantumInstrument:
    """Invalid variant: the first branch's first Kraus contribution negated."""
    first = inst.branches[0]
    weights = list(first.effective_weights())
    weights[0] = -weights[0]
    bad = InstrumentBranch(first.outcome, first.kraus, tuple(weights))
    return QuantumInstrument((bad,) + inst.branches[1:])
