"""Operational distinguishability of worlds under two-party protocols.

Everything an agent pair can access is the classical transcript
distribution of a protocol script run against a world.  This module
computes those distributions exactly (branch enumeration, no sampling),
compares them in total variation distance, and packages the standard
experiments: coupling-strength sweeps, channel-size comparisons at zero
coupling, no-signaling checks with the classical channel withheld, and
measurement-frame misalignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bell import CHSHConfig, CHSHResult, exact_chsh
from .errors import LocalityViolationError
from .instruments import PROB_FLOOR, QuantumInstrument, apply_instrument
from .linalg import DensityMatrix, purity
from .protocols import ProtocolRound, ProtocolScript
from .worlds import World, build_epr_world, build_er_world, deliver_pair

__all__ = [
    "OutcomeDistribution",
    "SweepRow",
    "EprParams",
    "NoSignalingReport",
    "accessible_distribution",
    "total_variation",
    "indistinguishability_sweep",
    "channel_size_check",
    "no_signaling_check",
    "frame_misalignment_demo",
    "sweep_columnar",
    "sweep_structured",
    "SWEEP_HEADER",
]

_NORMALIZATION_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Exact probabilities over classical transcripts.

    Transcripts are tuples of per-round outcome strings; the exported
    ``support`` concatenates each tuple into a single string.  Entries with
    probability zero are kept so that supports stay comparable across
    worlds.
    """

    entries: tuple[tuple[tuple[str, ...], float], ...]

    def __post_init__(self):
        entries = tuple((tuple(t), float(p)) for t, p in self.entries)
        object.__setattr__(self, "entries", entries)
        keys = [t for t, _ in entries]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate transcripts in distribution")
        if any(p < -PROB_FLOOR for _, p in entries):
            raise ValueError("negative probability in distribution")
        total = sum(p for _, p in entries)
        if abs(total - 1.0) > _NORMALIZATION_ATOL:
            raise ValueError(f"distribution not normalized (sum {total!r})")

    @property
    def support(self) -> tuple[str, ...]:
        return tuple("".join(t) for t, _ in self.entries)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.entries)

    def as_dict(self) -> dict[tuple[str, ...], float]:
        return dict(self.entries)

    def marginal(self, round_indices: Sequence[int]) -> "OutcomeDistribution":
        """Distribution of the outcomes at the given round positions."""
        keep = tuple(round_indices)
        acc: dict[tuple[str, ...], float] = {}
        for t, p in self.entries:
            key = tuple(t[i] for i in keep)
            acc[key] = acc.get(key, 0.0) + p
        return OutcomeDistribution(tuple(sorted(acc.items())))


def total_variation(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """``0.5 * sum |p_i - q_i|`` over the union of supports."""
    pd, qd = p.as_dict(), q.as_dict()
    keys = set(pd) | set(qd)
    return 0.5 * sum(abs(pd.get(k, 0.0) - qd.get(k, 0.0)) for k in keys)


def _visible(transcript: tuple[str, ...], script: ProtocolScript, r: int, mode: str) -> tuple[str, ...]:
    if mode == "full":
        return transcript
    if mode == "own-party":
        party = script.rounds[r].party
        return tuple(transcript[j] for j in range(r) if script.rounds[j].party == party)
    raise ValueError(f"unknown condition visibility {mode!r}")


def accessible_distribution(
    world: World,
    script: ProtocolScript,
    *,
    condition_visibility: str = "full",
) -> OutcomeDistribution:
    """Exact transcript distribution of ``script`` run against ``world``.

    Each round's instrument acts on the acting party's own boundary qubit;
    enumeration follows every branch, so zero-probability transcripts stay
    in the support.  ``condition_visibility`` controls which prior outcomes
    a conditioned round may see: ``"full"`` models an open classical
    channel, ``"own-party"`` withholds it.
    """
    if not script.rounds:
        raise ValueError("script has no rounds")
    pair = deliver_pair(world)
    branches: list[tuple[tuple[str, ...], float, DensityMatrix | None]] = [
        ((), 1.0, pair.state)
    ]
    for r, rnd in enumerate(script.rounds):
        target = "q_A" if rnd.party == "A" else "q_B"
        grown: list[tuple[tuple[str, ...], float, DensityMatrix | None]] = []
        for transcript, prob, state in branches:
            inst = rnd.resolve(_visible(transcript, script, r, condition_visibility))
            if inst.dimension != 2:
                raise LocalityViolationError(
                    f"round {r} instrument has dimension {inst.dimension}; "
                    f"it may only touch {target}"
                )
            if state is None or prob <= PROB_FLOOR:
                for outcome in inst.outcomes:
                    grown.append((transcript + (outcome,), 0.0, None))
                continue
            for rec in apply_instrument(inst, state, (target,)):
                grown.append((transcript + (rec.outcome,), prob * rec.probability, rec.post_state))
        branches = grown
    return OutcomeDistribution(tuple((t, p) for t, p, _ in branches))


@dataclass(frozen=True)
class EprParams:
    """Channel-world parameters held fixed while the coupling strength varies."""

    q_dim: int = 2
    qbar_dim: int = 2
    seed: int = 0
    evolution_time: float = 1.0

    def world(self, lam: float) -> World:
        return build_epr_world(
            self.q_dim, self.qbar_dim, lam, self.seed, evolution_time=self.evolution_time
        )


@dataclass(frozen=True)
class SweepRow:
    lam: float
    tvd_vs_er: float
    s_abs: float
    pair_purity: float


def indistinguishability_sweep(
    lambda_grid: Sequence[float],
    script: ProtocolScript,
    params: EprParams = EprParams(),
) -> list[SweepRow]:
    """Distinguishability of the channel world from the identified world.

    The grid must be ascending and start at 0; the first row's distance is
    the zero-coupling limit and the remaining rows trace how decoherence
    exposes the channel.
    """
    grid = [float(x) for x in lambda_grid]
    if not grid or grid[0] != 0.0:
        raise ValueError("lambda grid must start at 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly ascending")
    er_dist = accessible_distribution(build_er_world(), script)
    rows = []
    for lam in grid:
        world = params.world(lam)
        dist = accessible_distribution(world, script)
        pair = deliver_pair(world)
        rows.append(
            SweepRow(
                lam=lam,
                tvd_vs_er=total_variation(dist, er_dist),
                s_abs=exact_chsh(pair).s_abs,
                pair_purity=purity(pair.state),
            )
        )
    return rows


def channel_size_check(
    q_dims: Sequence[int],
    script: ProtocolScript,
    *,
    qbar_dim: int = 2,
    lam: float = 0.0,
    seed: int = 0,
    evolution_time: float = 1.0,
) -> float:
    """Max pairwise transcript distance across channel sizes.

    At zero coupling the channel size (the number of environment qubits
    implementing it) is invisible to the agents, so the result is zero to
    numerical precision; nonzero coupling exposes it only through
    decoherence.
    """
    dims = [int(d) for d in q_dims]
    if any(d < 2 for d in dims):
        raise ValueError("every channel size must be >= 2")
    dists = [
        accessible_distribution(
            build_epr_world(d, qbar_dim, lam, seed, evolution_time=evolution_time), script
        )
        for d in dims
    ]
    worst = 0.0
    for i in range(len(dists)):
        for j in range(i + 1, len(dists)):
            worst = max(worst, total_variation(dists[i], dists[j]))
    return worst


@dataclass(frozen=True)
class NoSignalingReport:
    """Max distance between Bob's marginals across Alice's choices.

    When ``classical_channel_used`` is set, Bob conditioned on Alice's
    broadcast outcomes; a nonzero distance then reflects ordinary classical
    correlation, not signaling.
    """

    max_tvd: float
    classical_channel_used: bool


def no_signaling_check(
    world: World,
    alice_variants: Sequence[QuantumInstrument],
    bob_rounds: Sequence[ProtocolRound],
    *,
    classical_channel: bool = False,
) -> NoSignalingReport:
    """Whether Alice's local choice shifts Bob's marginal statistics.

    Runs one joint script per Alice variant and marginalizes the transcript
    onto Bob's rounds.  With the classical channel withheld (the default)
    Bob's conditioned rounds see only his own prior outcomes.
    """
    if not alice_variants:
        raise ValueError("need at least one Alice instrument variant")
    bob_rounds = tuple(bob_rounds)
    if not bob_rounds:
        raise ValueError("Bob needs at least one round")
    for r in bob_rounds:
        if r.party != "B":
            raise ValueError("bob_rounds must all act as party B")
    visibility = "full" if classical_channel else "own-party"
    marginals = []
    for variant in alice_variants:
        script = ProtocolScript(
            "no-signaling probe", (ProtocolRound("A", variant),) + bob_rounds
        )
        dist = accessible_distribution(world, script, condition_visibility=visibility)
        marginals.append(dist.marginal(range(1, 1 + len(bob_rounds))))
    worst = 0.0
    for i in range(len(marginals)):
        for j in range(i + 1, len(marginals)):
            worst = max(worst, total_variation(marginals[i], marginals[j]))
    return NoSignalingReport(max_tvd=worst, classical_channel_used=classical_channel)


def frame_misalignment_demo(
    relative_angle: float,
    *,
    corrected: bool = False,
    config: CHSHConfig = CHSHConfig(),
) -> CHSHResult:
    """Exact CHSH when Bob's z-axis is rotated by ``relative_angle``.

    Bob's dialed angles are shifted by the frame offset before they act.
    Uncorrected, the statistic degrades (to ``2*sqrt(2)*|cos(offset)|`` at
    the optimal angles); with a classical description of the offset Bob
    pre-compensates his dials and the maximum is restored.
    """
    dial_shift = -relative_angle if corrected else 0.0
    effective = CHSHConfig(
        a=config.a,
        a_prime=config.a_prime,
        b=config.b + dial_shift + relative_angle,
        b_prime=config.b_prime + dial_shift + relative_angle,
        trials=config.trials,
        seed=config.seed,
    )
    return exact_chsh(deliver_pair(build_er_world()), effective)


#: Header of the columnar sweep export.
SWEEP_HEADER = "lambda tvd_vs_er s_abs pair_purity"


def sweep_columnar(rows: Sequence[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(f"{r.lam!r} {r.tvd_vs_er!r} {r.s_abs!r} {r.pair_purity!r}")
    return "\n".join(lines) + "\n"


def sweep_structured(rows: Sequence[SweepRow]) -> dict:
    return {
        "kind": "indistinguishability_sweep",
        "rows": [
            {
                "lambda": r.lam,
                "tvd_vs_er": r.tvd_vs_er,
                "s_abs": r.s_abs,
                "pair_purity": r.pair_purity,
            }
            for r in rows
        ],
    }
