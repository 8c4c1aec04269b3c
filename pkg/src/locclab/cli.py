"""Command-line front end: seeded, reproducible experiment runs.

Every experiment takes a mandatory seed (wall-clock seeding is refused by
omission), echoes its configuration into the output payload, and evaluates
built-in assertions whose pass/fail lines go to the diagnostic stream.
Payload bytes depend only on the configuration and seed, never on the
parallelism width or timing.

Exit codes: 0 success, 2 configuration error, 3 capacity error, 4 built-in
assertion failure, 5 empty-cell estimation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bell import (
    CHSHConfig,
    CHSHResult,
    TSIRELSON_BOUND,
    chsh_transcript,
    estimate_from_transcript,
    exact_chsh,
    format_transcript,
)
from .distinguish import (
    EprParams,
    accessible_distribution,
    channel_size_check,
    frame_misalignment_demo,
    indistinguishability_sweep,
    no_signaling_check,
    sweep_columnar,
    sweep_structured,
    total_variation,
)
from .errors import CapacityError, ConfigError, EmptyCellError
from .instruments import identity_instrument, load_instrument, measure_x, measure_z
from .protocols import (
    ProtocolRound,
    bundled_corpus,
    bundled_script_names,
    canonical_chsh_script,
    load_bundled_script,
    load_script,
)
from .worlds import World, build_epr_world, build_er_world, deliver_pair

EXPERIMENTS = ("chsh", "sweep", "distinguish", "nosignal", "qecc", "frames")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_ASSERTION = 4
EXIT_EMPTY_CELL = 5

_ZERO_ATOL = 1e-10


@dataclass
class RunConfig:
    """Validated parameters of one experiment run."""

    experiment: str
    seed: int
    mode: str = "er"
    q_dim: int = 2
    qbar_dim: int = 2
    lam: float = 0.0
    lambda_grid: tuple[float, ...] | None = None
    evolution_time: float = 1.0
    trials: int = 1000
    exact: bool = False
    offset: float = math.pi / 4
    q_dims: tuple[int, ...] = (2, 3)
    script: str | None = None
    alice_instruments: tuple[str, ...] = ()
    out: str = "-"
    fmt: str = "structured"
    parallel: int = 1
    transcript: str | None = None

    def echo(self) -> dict:
        """Config as it enters the payload; execution details are excluded."""
        doc = {
            "experiment": self.experiment,
            "seed": self.seed,
            "format": self.fmt,
        }
        if self.experiment in ("chsh", "nosignal"):
            doc["mode"] = self.mode
            if self.mode == "epr":
                doc.update(
                    q_dim=self.q_dim,
                    qbar_dim=self.qbar_dim,
                    **{"lambda": self.lam},
                    evolution_time=self.evolution_time,
                )
        if self.experiment == "chsh":
            doc["exact"] = self.exact
            if not self.exact:
                doc["trials"] = self.trials
        if self.experiment == "sweep":
            doc.update(
                lambda_grid=list(self.lambda_grid or ()),
                q_dim=self.q_dim,
                qbar_dim=self.qbar_dim,
                evolution_time=self.evolution_time,
                script=self.script or "chsh_canonical",
            )
        if self.experiment == "distinguish":
            doc.update(
                **{"lambda": self.lam},
                q_dim=self.q_dim,
                qbar_dim=self.qbar_dim,
                evolution_time=self.evolution_time,
            )
            if self.script:
                doc["script"] = self.script
        if self.experiment == "qecc":
            doc.update(
                q_dims=list(self.q_dims),
                qbar_dim=self.qbar_dim,
                **{"lambda": self.lam},
                evolution_time=self.evolution_time,
                script=self.script or "chsh_canonical",
            )
        if self.experiment == "frames":
            doc["offset"] = self.offset
        return doc


@dataclass
class RunReport:
    """Everything one run produced, including diagnostics."""

    config: RunConfig
    payload_text: str
    criteria: list[tuple[str, bool]] = field(default_factory=list)
    versions: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    @property
    def all_passed(self) -> bool:
        return all(ok for _, ok in self.criteria)


# ---------------------------------------------------------------------------
# Configuration parsing

_KEY_TYPES: dict[str, Callable[[str], object]] = {
    "seed": int,
    "trials": int,
    "q_dim": int,
    "qbar_dim": int,
    "parallel": int,
    "lambda": float,
    "offset": float,
    "evolution_time": float,
    "mode": str,
    "format": str,
    "out": str,
    "script": str,
    "transcript": str,
    "exact": lambda s: s.lower() in ("1", "true", "yes"),
    "lambda_grid": lambda s: tuple(float(x) for x in s.split(",")),
    "q_dims": lambda s: tuple(int(x) for x in s.split(",")),
    "alice_instruments": lambda s: tuple(x for x in s.split(",") if x),
}

_KEY_TO_FIELD = {"lambda": "lam", "format": "fmt"}


def _read_config_file(path: str) -> dict:
    values: dict[str, object] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEY_TYPES:
            raise ConfigError("unknown configuration key", key=key)
        try:
            values[key] = _KEY_TYPES[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value {value!r}: {exc}", key=key) from exc
    return values


def parse_config(experiment: str, config_path: str | None, overrides: dict) -> RunConfig:
    """Merge file values and flag overrides into a validated RunConfig.

    Flags override file values; unknown file keys are rejected; the seed is
    mandatory from one of the two sources.
    """
    values = _read_config_file(config_path) if config_path else {}
    for key, val in overrides.items():
        if val is not None:
            values[key] = val

    if "seed" not in values:
        raise ConfigError("a seed is required (no wall-clock seeding)", key="seed")

    kwargs: dict = {"experiment": experiment}
    for key, val in values.items():
        kwargs[_KEY_TO_FIELD.get(key, key)] = val
    try:
        cfg = RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc

    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}", key="experiment")
    if cfg.seed < 0:
        raise ConfigError("seed must be nonnegative", key="seed")
    if cfg.mode not in ("er", "epr"):
        raise ConfigError(f"mode must be 'er' or 'epr', got {cfg.mode!r}", key="mode")
    if cfg.lam < 0:
        raise ConfigError(f"must be nonnegative, got {cfg.lam}", key="lambda")
    if cfg.trials < 1:
        raise ConfigError(f"must be >= 1, got {cfg.trials}", key="trials")
    if cfg.parallel < 1:
        raise ConfigError(f"must be >= 1, got {cfg.parallel}", key="parallel")
    if cfg.fmt not in ("columnar", "structured"):
        raise ConfigError(f"must be 'columnar' or 'structured', got {cfg.fmt!r}", key="format")
    if cfg.evolution_time <= 0:
        raise ConfigError("must be positive", key="evolution_time")
    if cfg.experiment == "sweep":
        grid = cfg.lambda_grid
        if not grid:
            raise ConfigError("sweep needs a lambda grid", key="lambda_grid")
        if grid[0] != 0.0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("grid must start at 0 and ascend", key="lambda_grid")
        if any(x < 0 for x in grid):
            raise ConfigError("grid values must be nonnegative", key="lambda_grid")
    if cfg.experiment == "qecc" and any(d < 2 for d in cfg.q_dims):
        raise ConfigError("every channel size must be >= 2", key="q_dims")
    return cfg


def _world_from_config(cfg: RunConfig) -> World:
    if cfg.mode == "er":
        return build_er_world()
    return build_epr_world(
        cfg.q_dim, cfg.qbar_dim, cfg.lam, cfg.seed, evolution_time=cfg.evolution_time
    )


def _resolve_script(name_or_path: str | None):
    if name_or_path is None:
        return canonical_chsh_script()
    if name_or_path in bundled_script_names():
        return load_bundled_script(name_or_path)
    return load_script(name_or_path)


def _chsh_result_dict(res: CHSHResult) -> dict:
    return {
        "e_ab": res.e_ab,
        "e_ab_prime": res.e_ab_prime,
        "e_a_prime_b": res.e_a_prime_b,
        "e_a_prime_b_prime": res.e_a_prime_b_prime,
        "s_value": res.s_value,
        "s_abs": res.s_abs,
        "tsirelson_gap": res.tsirelson_gap,
        "standard_error": res.standard_error,
    }


_CHSH_HEADER = (
    "e_ab e_ab_prime e_a_prime_b e_a_prime_b_prime s_value s_abs tsirelson_gap standard_error"
)


def _chsh_columnar(res: CHSHResult) -> str:
    row = (
        f"{res.e_ab!r} {res.e_ab_prime!r} {res.e_a_prime_b!r} {res.e_a_prime_b_prime!r} "
        f"{res.s_value!r} {res.s_abs!r} {res.tsirelson_gap!r} {res.standard_error!r}"
    )
    return _CHSH_HEADER + "\n" + row + "\n"


def _run_chsh(cfg: RunConfig) -> tuple[dict, str, list[tuple[str, bool]]]:
    world = _world_from_config(cfg)
    if cfg.exact:
        res = exact_chsh(deliver_pair(world))
    else:
        transcript = chsh_transcript(
            world, CHSHConfig(trials=cfg.trials, seed=cfg.seed), cfg.parallel
        )
        if cfg.transcript:
            with open(cfg.transcript, "w", encoding="utf-8") as fh:
                fh.write(format_transcript(transcript))
        res = estimate_from_transcript(transcript)
    criteria = [
        (
            "s_abs within quantum bound",
            res.s_abs <= TSIRELSON_BOUND + 5 * res.standard_error + 1e-9,
        )
    ]
    if cfg.exact and cfg.mode == "er":
        criteria.append(
            ("exact identified-world run attains the quantum maximum",
             abs(res.s_abs - TSIRELSON_BOUND) <= _ZERO_ATOL)
        )
    return {"result": _chsh_result_dict(res)}, _chsh_columnar(res), criteria


def _run_sweep(cfg: RunConfig) -> tuple[dict, str, list[tuple[str, bool]]]:
    script = _resolve_script(cfg.script)
    params = EprParams(cfg.q_dim, cfg.qbar_dim, cfg.seed, cfg.evolution_time)
    rows = indistinguishability_sweep(cfg.lambda_grid, script, params)
    criteria = [("zero-coupling row indistinguishable", rows[0].tvd_vs_er <= _ZERO_ATOL)]
    return sweep_structured(rows), sweep_columnar(rows), criteria


def _run_distinguish(cfg: RunConfig) -> tuple[dict, str, list[tuple[str, bool]]]:
    scripts = [_resolve_script(cfg.script)] if cfg.script else bundled_corpus()
    er = build_er_world()
    epr = build_epr_world(
        cfg.q_dim, cfg.qbar_dim, cfg.lam, cfg.seed, evolution_time=cfg.evolution_time
    )
    results = []
    criteria = []
    for script in scripts:
        tvd = total_variation(
            accessible_distribution(epr, script), accessible_distribution(er, script)
        )
        results.append({"script": script.name, "tvd_vs_er": tvd})
        if cfg.lam == 0.0:
            criteria.append((f"script {script.name} indistinguishable", tvd <= _ZERO_ATOL))
    payload = {"kind": "distinguish", "lambda": cfg.lam, "scripts": results}
    lines = ["script tvd_vs_er"] + [f"{r['script']} {r['tvd_vs_er']!r}" for r in results]
    return payload, "\n".join(lines) + "\n", criteria


def _default_alice_variants() -> list:
    return [measure_z(), measure_x(), identity_instrument()]


def _run_nosignal(cfg: RunConfig) -> tuple[dict, str, list[tuple[str, bool]]]:
    world = _world_from_config(cfg)
    if cfg.alice_instruments:
        loaded = [load_instrument(p) for p in cfg.alice_instruments]
        names = [name for name, _ in loaded]
        variants = [inst for _, inst in loaded]
    else:
        variants = _default_alice_variants()
        names = ["measure_z", "measure_x", "identity"]
    bob = (ProtocolRound("B", measure_z()), )
    report = no_signaling_check(world, variants, bob)
    payload = {
        "kind": "nosignal",
        "max_tvd": report.max_tvd,
        "variants": names,
        "classical_channel_used": report.classical_channel_used,
    }
    text = "max_tvd\n" + f"{report.max_tvd!r}\n"
    criteria = [("Bob's marginals independent of Alice's choice", report.max_tvd <= _ZERO_ATOL)]
    return payload, text, criteria


def _run_qecc(cfg: RunConfig) -> tuple[dict, str, list[tuple[str, bool]]]:
    script = _resolve_script(cfg.script)
    worst = channel_size_check(
        cfg.q_dims,
        script,
        qbar_dim=cfg.qbar_dim,
        lam=cfg.lam,
        seed=cfg.seed,
        evolution_time=cfg.evolution_time,
    )
    payload = {
        "kind": "qecc",
        "q_dims": list(cfg.q_dims),
        "lambda": cfg.lam,
        "max_pairwise_tvd": worst,
    }
    text = "max_pairwise_tvd\n" + f"{worst!r}\n"
    criteria = []
    if cfg.lam == 0.0:
        criteria.append(("channel size invisible at zero coupling", worst <= _ZERO_ATOL))
    return payload, text, criteria


def _run_frames(cfg: RunConfig) -> tuple[dict, str, list[tuple[str, bool]]]:
    raw = frame_misalignment_demo(cfg.offset)
    fixed = frame_misalignment_demo(cfg.offset, corrected=True)
    expected_raw = TSIRELSON_BOUND * abs(math.cos(cfg.offset))
    payload = {
        "kind": "frames",
        "offset": cfg.offset,
        "uncorrected": _chsh_result_dict(raw),
        "corrected": _chsh_result_dict(fixed),
    }
    lines = [
        "variant s_abs",
        f"uncorrected {raw.s_abs!r}",
        f"corrected {fixed.s_abs!r}",
    ]
    criteria = [
        ("uncorrected offset degrades as 2*sqrt(2)*|cos|",
         abs(raw.s_abs - expected_raw) <= _ZERO_ATOL),
        ("corrected dials restore the quantum maximum",
         abs(fixed.s_abs - TSIRELSON_BOUND) <= _ZERO_ATOL),
    ]
    return payload, "\n".join(lines) + "\n", criteria


_RUNNERS = {
    "chsh": _run_chsh,
    "sweep": _run_sweep,
    "distinguish": _run_distinguish,
    "nosignal": _run_nosignal,
    "qecc": _run_qecc,
    "frames": _run_frames,
}


def run(cfg: RunConfig) -> RunReport:
    """Execute one experiment and collect its report."""
    t0 = time.perf_counter()
    payload, columnar, criteria = _RUNNERS[cfg.experiment](cfg)
    if cfg.fmt == "columnar":
        text = columnar
    else:
        doc = {"schema_version": 1, "experiment": cfg.experiment, "config": cfg.echo()}
        doc["results"] = payload
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return RunReport(
        config=cfg,
        payload_text=text,
        criteria=criteria,
        versions={
            "locclab": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        wall_time_s=time.perf_counter() - t0,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locclab",
        description="Seeded two-agent LOCC experiments over identified or channel-delivered pairs.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)

    examples = {
        "chsh": "locclab chsh --mode er --exact --seed 1",
        "sweep": "locclab sweep --lambda-grid 0,0.3,0.6,0.9 --seed 3 --format columnar",
        "distinguish": "locclab distinguish --lambda 0 --seed 5",
        "nosignal": "locclab nosignal --mode epr --lambda 0.8 --seed 2",
        "qecc": "locclab qecc --q-dims 2,3 --seed 11",
        "frames": "locclab frames --offset 0.7853981633974483 --seed 1",
    }
    help_lines = {
        "chsh": "CHSH experiment, exact or sampled",
        "sweep": "distinguishability sweep over coupling strengths",
        "distinguish": "per-script transcript distance, channel world vs identified world",
        "nosignal": "Bob's marginals across Alice's instrument choices, channel withheld",
        "qecc": "transcript distance across channel sizes",
        "frames": "CHSH under a misaligned measurement frame, with and without correction",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(
            name,
            help=help_lines[name],
            description=help_lines[name],
            epilog=f"example: {examples[name]}",
        )
        p.add_argument("--config", help="flat key-value config file ('key = value', # comments)")
        p.add_argument("--seed", type=int, help="master seed (required here or in the file)")
        p.add_argument("--trials", type=int, help="number of sampled trials")
        p.add_argument("--mode", choices=("er", "epr"), help="world kind")
        p.add_argument("--lambda", dest="lam", type=float, help="channel-environment coupling")
        p.add_argument(
            "--lambda-grid", dest="lambda_grid",
            type=lambda s: tuple(float(x) for x in s.split(",")),
            help="comma-separated ascending grid starting at 0",
        )
        p.add_argument("--q-dim", dest="q_dim", type=int, help="channel qubits")
        p.add_argument("--qbar-dim", dest="qbar_dim", type=int, help="non-channel environment qubits")
        p.add_argument("--evolution-time", dest="evolution_time", type=float)
        p.add_argument("--q-dims", dest="q_dims",
                       type=lambda s: tuple(int(x) for x in s.split(",")),
                       help="channel sizes to compare (qecc)")
        p.add_argument("--offset", type=float, help="frame offset in radians (frames)")
        p.add_argument("--script", help="bundled script name or path to a script JSON file")
        p.add_argument("--alice-instrument", dest="alice_instruments", action="append",
                       help="instrument definition file for a no-signaling variant (repeatable)")
        p.add_argument("--exact", action="store_const", const=True, default=None,
                       help="exact expectations instead of sampling (chsh)")
        p.add_argument("--transcript", help="also write the per-trial transcript here (chsh)")
        p.add_argument("--out", help="payload path, '-' for stdout (default)")
        p.add_argument("--format", dest="fmt", choices=("columnar", "structured"),
                       help="payload format (default structured)")
        p.add_argument("--parallel", type=int,
                       help="execution width; payload bytes do not depend on it")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {
        key: getattr(args, _KEY_TO_FIELD.get(key, key))
        for key in _KEY_TYPES
        if hasattr(args, _KEY_TO_FIELD.get(key, key))
    }
    if overrides.get("alice_instruments") is not None:
        overrides["alice_instruments"] = tuple(overrides["alice_instruments"])
    try:
        cfg = parse_config(args.experiment, args.config, overrides)
        report = run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except EmptyCellError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_CELL

    if cfg.out == "-":
        sys.stdout.write(report.payload_text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(report.payload_text)

    for name, ok in report.criteria:
        print(f"criterion {name}: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    versions = " ".join(f"{k}={v}" for k, v in report.versions.items())
    print(f"done in {report.wall_time_s:.3f}s ({versions})", file=sys.stderr)
    return EXIT_OK if report.all_passed else EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
