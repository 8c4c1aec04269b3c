"""Quantum instruments: finite families of CP branch maps with TP sum.

An instrument maps a density operator to a list of classical outcomes, each
with its probability and normalized post-measurement state.  Branches are
stored in Kraus form because Kraus collections compose and coarse-grain
cheaply; the Choi matrix of a branch is computed on demand for validation.

Branches optionally carry signed real weights on their Kraus terms.  With
all weights +1 (the default) a branch is automatically completely positive;
negative weights let callers construct *invalid* instruments on purpose,
which is what makes the validator's CP check falsifiable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractError, LayoutError
from .linalg import (
    DensityMatrix,
    ID2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SubsystemLayout,
    embed_operator,
)

__all__ = [
    "TP_ATOL",
    "PROB_FLOOR",
    "InstrumentBranch",
    "QuantumInstrument",
    "InstrumentOutcomeRecord",
    "CoarseGrainingPartition",
    "Violation",
    "ValidationReport",
    "branch_choi",
    "validate_instrument",
    "apply_instrument",
    "one_way_local_instrument",
    "coarse_grain",
    "measure_z",
    "measure_x",
    "measure_angle",
    "identity_instrument",
    "depolarizing_kraus",
    "unsharp_z",
    "settings_choice_instrument",
    "parse_instrument",
    "serialize_instrument",
    "load_instrument",
    "save_instrument",
]

#: Tolerance on the Kraus completeness sum (trace preservation defect).
TP_ATOL = 1e-9
#: Outcomes below this probability have no defined post-state.
PROB_FLOOR = 1e-12
#: Tolerance for the PSD check on branch Choi matrices.
CP_ATOL = 1e-9


def _as_operator_tuple(ops: Iterable[np.ndarray]) -> tuple[np.ndarray, ...]:
    out = []
    for op in ops:
        m = np.array(op, dtype=complex, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Kraus operator must be square, got shape {m.shape}")
        m.setflags(write=False)
        out.append(m)
    if not out:
        raise ValueError("branch needs at least one Kraus operator")
    d = out[0].shape[0]
    for m in out[1:]:
        if m.shape[0] != d:
            raise ValueError("Kraus operators in a branch must share one dimension")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class InstrumentBranch:
    """One outcome of an instrument: a CP map in (optionally weighted) Kraus form."""

    outcome: str
    kraus: tuple[np.ndarray, ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kraus", _as_operator_tuple(self.kraus))
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != len(self.kraus):
                raise ValueError("weights length must match Kraus operator count")
            object.__setattr__(self, "weights", w)

    @property
    def dimension(self) -> int:
        return self.kraus[0].shape[0]

    def effective_weights(self) -> tuple[float, ...]:
        return self.weights if self.weights is not None else (1.0,) * len(self.kraus)

    def apply_raw(self, m: np.ndarray) -> np.ndarray:
        """Unnormalized branch action ``sum_k w_k K_k m K_k^dag``."""
        out = np.zeros_like(m)
        for w, k in zip(self.effective_weights(), self.kraus):
            out += w * (k @ m @ k.conj().T)
        return out

    def completeness_term(self) -> np.ndarray:
        """``sum_k w_k K_k^dag K_k`` for this branch."""
        d = self.dimension
        out = np.zeros((d, d), dtype=complex)
        for w, k in zip(self.effective_weights(), self.kraus):
            out += w * (k.conj().T @ k)
        return out


@dataclass(frozen=True, eq=False)
class QuantumInstrument:
    """A finite family of CP branch maps whose sum is trace preserving."""

    branches: tuple[InstrumentBranch, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        object.__setattr__(self, "branches", branches)
        if not branches:
            raise ValueError("instrument needs at least one branch")
        d = branches[0].dimension
        for b in branches[1:]:
            if b.dimension != d:
                raise LayoutError("all branches must act on the same dimension")
        outcomes = [b.outcome for b in branches]
        if len(set(outcomes)) != len(outcomes):
            raise ValueError(f"duplicate outcome labels: {outcomes}")

    @property
    def dimension(self) -> int:
        return self.branches[0].dimension

    @property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(b.outcome for b in self.branches)

    def branch(self, outcome: str) -> InstrumentBranch:
        for b in self.branches:
            if b.outcome == outcome:
                return b
        raise KeyError(outcome)


@dataclass(frozen=True, eq=False)
class InstrumentOutcomeRecord:
    """One classical outcome with its probability and post-measurement state.

    ``post_state`` is ``None`` when the probability sits below
    :data:`PROB_FLOOR`, where normalization would be 0/0.
    """

    outcome: str
    probability: float
    post_state: DensityMatrix | None


@dataclass(frozen=True)
class CoarseGrainingPartition:
    """Disjoint grouping of outcome labels covering an instrument's outcomes."""

    groups: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        groups = tuple((str(g), tuple(str(m) for m in members)) for g, members in self.groups)
        object.__setattr__(self, "groups", groups)
        labels = [g for g, _ in groups]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate group labels: {labels}")
        seen: set[str] = set()
        for g, members in groups:
            if not members:
                raise ValueError(f"group {g!r} is empty")
            overlap = seen.intersection(members)
            if overlap:
                raise ValueError(f"outcomes {sorted(overlap)} appear in more than one group")
            seen.update(members)

    def covered(self) -> set[str]:
        return {m for _, members in self.groups for m in members}


@dataclass(frozen=True)
class Violation:
    """One named defect found by the validator, with its measured magnitude."""

    branch: str | None
    kind: str  # "cp" | "completeness" | "dimension"
    magnitude: float

    def __str__(self) -> str:
        where = f"branch {self.branch!r}" if self.branch is not None else "instrument"
        return f"{where}: {self.kind} defect {self.magnitude:.3e}"


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[Violation, ...]


def branch_choi(branch: InstrumentBranch) -> np.ndarray:
    """Choi matrix ``sum_k w_k vec(K_k) vec(K_k)^dag`` (column-stacking)."""
    d = branch.dimension
    choi = np.zeros((d * d, d * d), dtype=complex)
    for w, k in zip(branch.effective_weights(), branch.kraus):
        v = k.reshape(-1, order="F")
        choi += w * np.outer(v, v.conj())
    return choi


def validate_instrument(
    inst: QuantumInstrument,
    *,
    cp_atol: float = CP_ATOL,
    tp_atol: float = TP_ATOL,
) -> ValidationReport:
    """Check complete positivity per branch and total trace preservation.

    Passes iff every branch's Choi matrix is PSD within ``cp_atol`` and the
    summed completeness term equals the identity within ``tp_atol`` (spectral
    norm).  Violations name the failing branch and the defect magnitude.
    """
    violations: list[Violation] = []
    d = inst.dimension
    total = np.zeros((d, d), dtype=complex)
    for b in inst.branches:
        min_eig = float(np.linalg.eigvalsh(branch_choi(b))[0])
        if min_eig < -cp_atol:
            violations.append(Violation(b.outcome, "cp", -min_eig))
        total += b.completeness_term()
    defect = float(np.linalg.norm(total - np.eye(d), ord=2))
    if defect > tp_atol:
        violations.append(Violation(None, "completeness", defect))
    return ValidationReport(passed=not violations, violations=tuple(violations))


def apply_instrument(
    inst: QuantumInstrument,
    rho: DensityMatrix,
    targets: Sequence[str],
    *,
    prob_floor: float = PROB_FLOOR,
    validate: bool = True,
) -> list[InstrumentOutcomeRecord]:
    """Apply ``inst`` to the ``targets`` factors of ``rho``.

    Returns one record per branch: probability ``Tr(E_j(rho))`` and the
    normalized post-state embedded on the full layout (identity elsewhere).
    Probabilities sum to 1 for a valid instrument.
    """
    if isinstance(targets, str):
        targets = (targets,)
    target_dim = rho.layout.dimension_of(targets)
    if inst.dimension != target_dim:
        raise LayoutError(
            f"instrument dimension {inst.dimension} != target dimension {target_dim}"
        )
    if validate:
        report = validate_instrument(inst)
        if not report.passed:
            raise ContractError(
                "invalid instrument: " + "; ".join(str(v) for v in report.violations)
            )
    records = []
    for b in inst.branches:
        out = np.zeros_like(rho.matrix)
        for w, k in zip(b.effective_weights(), b.kraus):
            big = embed_operator(k, rho.layout, targets)
            out += w * (big @ rho.matrix @ big.conj().T)
        p = float(np.real(np.trace(out)))
        if p > prob_floor:
            post = DensityMatrix(out / p, rho.layout, rho.tol)
        else:
            post = None
            p = max(p, 0.0)
        records.append(InstrumentOutcomeRecord(b.outcome, p, post))
    return records


def one_way_local_instrument(
    layout: SubsystemLayout,
    party: str,
    local: QuantumInstrument,
    others_tp: Mapping[str, Sequence[np.ndarray]],
) -> QuantumInstrument:
    """Joint instrument for one party acting locally while the rest apply TP maps.

    ``local`` acts on the ``party`` factor; ``others_tp`` maps every other
    factor label to the Kraus operators of a single-branch trace-preserving
    map.  Each joint branch operator is the tensor product of the others'
    Kraus operators with the local branch's, ordered by ``layout``.
    """
    labels = layout.labels
    if party not in labels:
        raise LayoutError(f"party {party!r} not in layout {labels}")
    missing = [l for l in labels if l != party and l not in others_tp]
    if missing:
        raise LayoutError(f"missing TP maps for factors {missing}")
    extra = [l for l in others_tp if l not in labels or l == party]
    if extra:
        raise LayoutError(f"unexpected TP map labels {extra}")
    if local.dimension != layout.dims[layout.position(party)]:
        raise LayoutError(
            f"local instrument dimension {local.dimension} does not match factor {party!r}"
        )
    report = validate_instrument(local)
    if not report.passed:
        raise ContractError("invalid local instrument: " + "; ".join(map(str, report.violations)))
    checked_others: dict[str, tuple[np.ndarray, ...]] = {}
    for l, ops in others_tp.items():
        ops = _as_operator_tuple(ops)
        d = layout.dims[layout.position(l)]
        if ops[0].shape[0] != d:
            raise LayoutError(f"TP map for {l!r} has dimension {ops[0].shape[0]}, expected {d}")
        tp = validate_instrument(QuantumInstrument((InstrumentBranch("tp", ops),)))
        if not tp.passed:
            raise ContractError(
                f"map for factor {l!r} is not trace preserving: "
                + "; ".join(map(str, tp.violations))
            )
        checked_others[l] = ops

    branches = []
    for b in local.branches:
        if b.weights is not None:
            raise ContractError("weighted branches are not supported in joint products")
        pools = [checked_others[l] if l != party else b.kraus for l in labels]
        joint = []
        for combo in product(*pools):
            op = combo[0]
            for piece in combo[1:]:
                op = np.kron(op, piece)
            joint.append(op)
        branches.append(InstrumentBranch(b.outcome, tuple(joint)))
    return QuantumInstrument(tuple(branches))


def coarse_grain(inst: QuantumInstrument, partition: CoarseGrainingPartition) -> QuantumInstrument:
    """Merge outcome groups; a group's branch map is the sum of its members'.

    Summing CP maps is a Kraus-list union, so the group branch simply
    concatenates the member operator lists.
    """
    covered = partition.covered()
    have = set(inst.outcomes)
    if covered != have:
        raise ValueError(
            f"partition does not cover outcomes exactly: missing {sorted(have - covered)}, "
            f"unknown {sorted(covered - have)}"
        )
    branches = []
    for group_label, members in partition.groups:
        kraus: list[np.ndarray] = []
        weights: list[float] = []
        weighted = False
        for m in members:
            b = inst.branch(m)
            kraus.extend(b.kraus)
            weights.extend(b.effective_weights())
            weighted = weighted or b.weights is not None
        branches.append(
            InstrumentBranch(group_label, tuple(kraus), tuple(weights) if weighted else None)
        )
    return QuantumInstrument(tuple(branches))


# ---------------------------------------------------------------------------
# Standard single-qubit instruments


def projector(angle: float, sign: int) -> np.ndarray:
    """Projector on the ±1 eigenvector of cos(a)Z + sin(a)X."""
    obs = math.cos(angle) * PAULI_Z + math.sin(angle) * PAULI_X
    return (ID2 + sign * obs) / 2.0


def measure_angle(angle: float) -> QuantumInstrument:
    """Projective measurement of cos(a)Z + sin(a)X; outcome "0" is the +1 branch."""
    return QuantumInstrument(
        (
            InstrumentBranch("0", (projector(angle, +1),)),
            InstrumentBranch("1", (projector(angle, -1),)),
        )
    )


def measure_z() -> QuantumInstrument:
    return measure_angle(0.0)


def measure_x() -> QuantumInstrument:
    return measure_angle(math.pi / 2)


def identity_instrument(dim: int = 2) -> QuantumInstrument:
    return QuantumInstrument((InstrumentBranch("id", (np.eye(dim, dtype=complex),)),))


def depolarizing_kraus(p: float) -> tuple[np.ndarray, ...]:
    """Single-qubit depolarizing channel Kraus operators for strength ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength must be in [0, 1], got {p}")
    return (
        math.sqrt(1 - 3 * p / 4) * ID2,
        math.sqrt(p / 4) * PAULI_X,
        math.sqrt(p / 4) * PAULI_Y,
        math.sqrt(p / 4) * PAULI_Z,
    )


def unsharp_z(sharpness: float = 0.8) -> QuantumInstrument:
    """Two-outcome unsharp Z measurement with confusion ``1 - sharpness``."""
    if not 0.5 <= sharpness <= 1.0:
        raise ValueError(f"sharpness must be in [0.5, 1], got {sharpness}")
    s, u = math.sqrt(sharpness), math.sqrt(1 - sharpness)
    k0 = np.array([[s, 0], [0, u]], dtype=complex)
    k1 = np.array([[u, 0], [0, s]], dtype=complex)
    return QuantumInstrument(
        (InstrumentBranch("0", (k0,)), InstrumentBranch("1", (k1,)))
    )


def settings_choice_instrument(angle0: float, angle1: float) -> QuantumInstrument:
    """Uniform random setting choice folded into one instrument.

    Four outcomes, labeled setting bit then outcome bit ("00", "01", "10",
    "11").  Each branch's single Kraus operator is the projector scaled by
    1/sqrt(2), so the four branch maps sum to a trace-preserving whole.
    """
    r = 1 / math.sqrt(2)
    branches = []
    for s_bit, angle in ((0, angle0), (1, angle1)):
        for o_bit, sign in ((0, +1), (1, -1)):
            branches.append(
                InstrumentBranch(f"{s_bit}{o_bit}", (r * projector(angle, sign),))
            )
    return QuantumInstrument(tuple(branches))


# ---------------------------------------------------------------------------
# Instrument definition file format
#
# Grammar (one token or row per line, '#' starts a comment, blank lines
# ignored):
#
#     instrument <name>
#     dimension <d>
#     branch <outcome-label>
#     op
#     <d rows of d whitespace-separated complex entries>
#     op
#     ...
#     branch <outcome-label>
#     ...
#     end
#
# Complex entries are written ``<re><+/-><im>i``, e.g. ``0.5-0.25i``, with
# 17 significant digits so parse/serialize round-trips are lossless.

_COMPLEX_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$"
)


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def _parse_complex(token: str) -> complex:
    m = _COMPLEX_RE.match(token)
    if not m:
        raise ValueError(f"malformed complex entry {token!r} (expected like '1.5-0.25i')")
    return complex(float(m.group(1)), float(m.group(2)))


def serialize_instrument(inst: QuantumInstrument, name: str = "instrument") -> str:
    """Render an instrument in the textual definition format."""
    if any(b.weights is not None for b in inst.branches):
        raise ValueError("weighted branches have no file representation")
    lines = [f"instrument {name}", f"dimension {inst.dimension}"]
    for b in inst.branches:
        lines.append(f"branch {b.outcome}")
        for k in b.kraus:
            lines.append("op")
            for row in k:
                lines.append(" ".join(_format_complex(z) for z in row))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_instrument(text: str) -> tuple[str, QuantumInstrument]:
    """Parse the textual definition format; returns ``(name, instrument)``."""
    lines = [l.strip() for l in text.splitlines()]
    lines = [l for l in lines if l and not l.startswith("#")]
    if not lines or not lines[0].startswith("instrument"):
        raise ValueError("file must start with 'instrument <name>'")
    name = lines[0].split(maxsplit=1)[1] if " " in lines[0] else "instrument"
    if len(lines) < 2 or not lines[1].startswith("dimension"):
        raise ValueError("second line must be 'dimension <d>'")
    dim = int(lines[1].split()[1])
    if lines[-1] != "end":
        raise ValueError("file must end with 'end'")

    branches: list[InstrumentBranch] = []
    outcome: str | None = None
    ops: list[np.ndarray] = []
    rows: list[list[complex]] = []
    in_op = False

    def close_op():
        nonlocal in_op, rows
        if in_op:
            if len(rows) != dim:
                raise ValueError(f"operator has {len(rows)} rows, expected {dim}")
            ops.append(np.array(rows, dtype=complex))
            rows = []
            in_op = False

    def close_branch():
        nonlocal outcome, ops
        close_op()
        if outcome is not None:
            if not ops:
                raise ValueError(f"branch {outcome!r} has no operators")
            branches.append(InstrumentBranch(outcome, tuple(ops)))
            outcome, ops = None, []

    for line in lines[2:-1]:
        if line.startswith("branch"):
            close_branch()
            parts = line.split(maxsplit=1)
            if len(parts) != 2:
                raise ValueError("branch line needs an outcome label")
            outcome = parts[1]
        elif line == "op":
            if outcome is None:
                raise ValueError("'op' before any 'branch'")
            close_op()
            in_op = True
        else:
            if not in_op:
                raise ValueError(f"unexpected line {line!r}")
            entries = [_parse_complex(tok) for tok in line.split()]
            if len(entries) != dim:
                raise ValueError(f"row has {len(entries)} entries, expected {dim}")
            rows.append(entries)
    close_branch()
    if not branches:
        raise ValueError("no branches defined")
    return name, QuantumInstrument(tuple(branches))


def save_instrument(path, inst: QuantumInstrument, name: str = "instrument") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instrument(inst, name))


def load_instrument(path) -> tuple[str, QuantumInstrument]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instrument(fh.read())
