"""Command line front end: config parsing, experiment orchestration, CSV output.

Subcommands pick the mode; a flat key=value config file describes the
experiment.  All output is CSV (UTF-8, LF line endings, '.' decimal
separator), written atomically so an aborted run never leaves a partial
file behind.

Config grammar, one or more assignments per line, '#' starts a comment:

    mode=compare                # optional, the subcommand overrides it
    scenario=n3a,n3c            # comma list of scenario ids
    snr_db=0:30:5               # sweep start:stop:step (dB), or a comma list
    sigma2.sd=2.0               # per-link fading variance, default 1.0
    seed=42
    min_errors=200
    max_frames=100000000
    block_frames=65536
    workers=1
    out=results.csv             # --out overrides
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .analytic import all_abep_rows, asymptotic_abep
from .channel import LINK_NAMES, AvgSnr, FadingProfile
from .core import ScenarioId, slot_plan, throughput
from .montecarlo import (
    DEFAULT_BLOCK_FRAMES,
    DEFAULT_MAX_FRAMES,
    DEFAULT_MIN_ERRORS,
    BerEstimate,
    run_point,
)

MODES = ("simulate", "analytic", "compare", "table1", "throughput")

POINT_HEADER = (
    "scenario,node,em_n0_db,trials,errors,ber,ci_low,ci_high,analytic_abep,ratio_sim_analytic"
)
TABLE_HEADER = "scenario,node,coefficient,exp_sd,exp_sr,exp_st,exp_rd,exp_td"
THROUGHPUT_HEADER = "scenario,slots,info_bits,bits_per_slot"


class ConfigError(ValueError):
    """Config file rejected; the message carries the offending line number."""


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: what to run, over which grid, and where to put it."""

    mode: str = "simulate"
    scenarios: tuple[ScenarioId, ...] = ()
    snr_db: tuple[float, ...] = ()
    sigma2: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0
    min_errors: int = DEFAULT_MIN_ERRORS
    max_frames: int = DEFAULT_MAX_FRAMES
    block_frames: int = DEFAULT_BLOCK_FRAMES
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r} (expected one of {MODES})")
        object.__setattr__(self, "sigma2", dict(self.sigma2))


def _parse_snr(value: str) -> tuple[float, ...]:
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep must be start:stop:step, got {value!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0.0:
            raise ValueError(f"sweep step must be positive, got {step:g}")
        if start > stop:
            raise ValueError(f"sweep start {start:g} exceeds stop {stop:g}")
        n = int((stop - start) / step + 1e-9) + 1
        return tuple(round(start + i * step, 9) for i in range(n))
    return tuple(float(p) for p in value.split(","))


def _parse_scenarios(value: str) -> tuple[ScenarioId, ...]:
    if value.strip().lower() == "all":
        return tuple(ScenarioId)
    return tuple(ScenarioId.from_string(p) for p in value.split(","))


def parse_config(text: str) -> ExperimentSpec:
    """Parse the key=value experiment grammar; errors carry line numbers."""
    values: dict = {}
    sigma2: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep or not key:
                raise ConfigError(f"line {lineno}: expected key=value, got {token!r}")
            try:
                _assign(values, sigma2, key, value)
            except (ValueError, KeyError) as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
    try:
        return ExperimentSpec(sigma2=sigma2, **values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _assign(values: dict, sigma2: dict, key: str, value: str) -> None:
    if key.startswith("sigma2."):
        link = key[len("sigma2."):]
        if link not in LINK_NAMES:
            raise ValueError(f"unknown link {link!r} (expected one of {LINK_NAMES})")
        var = float(value)
        if not var > 0.0:
            raise ValueError(f"sigma2.{link} must be positive, got {value}")
        sigma2[link] = var
    elif key == "mode":
        if value not in MODES:
            raise ValueError(f"unknown mode {value!r} (expected one of {MODES})")
        values["mode"] = value
    elif key == "scenario":
        values["scenarios"] = _parse_scenarios(value)
    elif key == "snr_db":
        values["snr_db"] = _parse_snr(value)
    elif key in ("seed", "min_errors", "max_frames", "block_frames", "workers"):
        number = int(value)
        if key != "seed" and number <= 0:
            raise ValueError(f"{key} must be positive, got {value}")
        values[key] = number
    elif key == "out":
        values["out"] = value
    else:
        raise ValueError(f"unknown key {key!r}")


def serialize_config(spec: ExperimentSpec) -> str:
    """Canonical config text; parse_config inverts it exactly."""
    lines = [f"mode={spec.mode}"]
    if spec.scenarios:
        lines.append("scenario=" + ",".join(s.value for s in spec.scenarios))
    if spec.snr_db:
        lines.append("snr_db=" + ",".join(f"{v:g}" for v in spec.snr_db))
    for link in LINK_NAMES:
        if link in spec.sigma2:
            lines.append(f"sigma2.{link}={spec.sigma2[link]:g}")
    lines.append(f"seed={spec.seed}")
    lines.append(f"min_errors={spec.min_errors}")
    lines.append(f"max_frames={spec.max_frames}")
    lines.append(f"block_frames={spec.block_frames}")
    lines.append(f"workers={spec.workers}")
    if spec.out is not None:
        lines.append(f"out={spec.out}")
    return "\n".join(lines) + "\n"


def _prob(x: float | None) -> str:
    return "" if x is None else f"{x:.6e}"


def _point_row(
    scenario: ScenarioId,
    node: str,
    db: float,
    sim: BerEstimate | None,
    analytic: float | None,
) -> str:
    ratio = None
    if sim is not None and analytic is not None and analytic > 0.0:
        ratio = sim.ber / analytic
    ci = sim.ci if sim is not None else (None, None)
    cells = (
        scenario.value,
        node,
        f"{db:g}",
        "" if sim is None else str(sim.trials),
        "" if sim is None else str(sim.errors),
        _prob(sim.ber if sim is not None else None),
        _prob(ci[0]),
        _prob(ci[1]),
        _prob(analytic),
        _prob(ratio),
    )
    return ",".join(cells)


def run_experiment(spec: ExperimentSpec) -> tuple[str, list[str]]:
    """Produce (header, rows) for the spec's mode; deterministic ordering."""
    if spec.mode == "throughput":
        scenarios = spec.scenarios or tuple(ScenarioId)
        rows = []
        for s in scenarios:
            tp = throughput(s)
            rows.append(f"{s.value},{len(slot_plan(s))},{len(s.nodes)},{tp}")
        return THROUGHPUT_HEADER, rows

    if spec.mode == "table1":
        scenarios = spec.scenarios or tuple(ScenarioId)
        wanted = {s.value for s in scenarios}
        rows = []
        for row in all_abep_rows():
            if row["scenario"] not in wanted:
                continue
            cells = [row["scenario"], row["node"], f"{row['coefficient']:.10g}"]
            cells += [str(row[f"exp_{link}"]) for link in LINK_NAMES]
            rows.append(",".join(cells))
        return TABLE_HEADER, rows

    if not spec.scenarios:
        raise ValueError(f"mode {spec.mode!r} requires at least one scenario")
    if not spec.snr_db:
        raise ValueError(f"mode {spec.mode!r} requires an snr_db grid")

    rows = []
    for scenario in spec.scenarios:
        for db in spec.snr_db:
            sims: dict[str, BerEstimate] = {}
            if spec.mode in ("simulate", "compare"):
                estimates = run_point(
                    scenario,
                    db,
                    spec.sigma2,
                    seed=spec.seed,
                    min_errors=spec.min_errors,
                    max_frames=spec.max_frames,
                    block_frames=spec.block_frames,
                    workers=spec.workers,
                )
                sims = {e.node: e for e in estimates}
            analytic_values: dict[str, float] = {}
            if spec.mode in ("analytic", "compare"):
                profile = FadingProfile(em_n0=10.0 ** (db / 10.0), sigma2=spec.sigma2)
                snrs = AvgSnr.from_profile(profile)
                analytic_values = {n: asymptotic_abep(scenario, n, snrs) for n in scenario.nodes}
            for node in scenario.nodes:
                rows.append(
                    _point_row(scenario, node, db, sims.get(node), analytic_values.get(node))
                )
    return POINT_HEADER, rows


def write_csv(path: str, header: str, rows: Sequence[str]) -> None:
    """Write the CSV atomically: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(row + "\n")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncrelay",
        description="Link-level simulator and asymptotic analysis for binary "
        "network-coded cooperative relaying",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="experiment config file (key=value lines)")
        p.add_argument("--out", help="output CSV path (overrides config)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            with open(args.config, encoding="utf-8") as fh:
                spec = parse_config(fh.read())
        else:
            spec = ExperimentSpec()
        spec = replace(spec, mode=args.mode)
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
        if args.out is not None:
            spec = replace(spec, out=args.out)
        if spec.out is None:
            raise ValueError("no output path: pass --out or set out= in the config")
        header, rows = run_experiment(spec)
        write_csv(spec.out, header, rows)
    except ConfigError as exc:
        print(f"ncrelay: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"ncrelay: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
