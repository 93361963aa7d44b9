"""Command line front end: synthesize schedules, run them, sweep ratios.

Exit codes: 0 on success, 1 on usage errors (bad flags, conflicting target
specs, malformed numbers), 2 on runtime errors (degenerate targets, file
problems, contract violations).  All defaults reproduce the headline
sweep setting: dimension 6, both Lamb-Dicke factors 0.4, full mode.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, IonSynthError
from .harness import (
    load_schedule_json,
    render_sweep_csv,
    run,
    sweep_chi,
    write_run_result_json,
    write_schedule_json,
    write_sweep_csv,
)
from .iontools import TrapParams
from .propagator import Mode
from .synthesis import Schedule, synthesize
from .targets import TargetOperator, cyclic_rotation, identity, load_matrix, qft, random_unitary

BUILTIN_TARGETS = ("qft", "rotation", "identity", "random")
DEFAULT_DIM = 6
DEFAULT_ETA = 0.4
DEFAULT_CHI_RATIO = 100.0
DEFAULT_SWEEP_RATIOS = (20.0, 50.0, 100.0, 200.0, 500.0, 1000.0)

_INPUT_SPEC_RE = re.compile(r"^(uniform|basis:\d+|file:.+)$")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract here is 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class CliConfig:
    command: str
    target: str | None
    matrix: str | None
    dim: int
    eta_x: float
    eta_y: float
    chi_ratio: float
    chi_ratios: tuple[float, ...]
    mode: Mode
    input_spec: str
    seed: int
    out: str | None
    schedule: str | None
    plot: str | None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ionsynth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--target", action="append", choices=BUILTIN_TARGETS, default=None)
        p.add_argument("--matrix", default=None, help="path to a matrix JSON file")
        p.add_argument("--dim", type=int, default=None, help="operator dimension N+1")
        p.add_argument("--eta-x", type=float, default=None, dest="eta_x")
        p.add_argument("--eta-y", type=float, default=None, dest="eta_y")
        p.add_argument("--seed", type=int, default=None, help="seed for the random target")
        p.add_argument("--config", default=None, help="JSON file with defaults for these flags")
        p.add_argument("--out", default=None, help="output file path")

    p_synth = sub.add_parser("synth", help="compile a schedule and write it as JSON")
    add_common(p_synth)
    p_synth.add_argument("--chi-ratio", type=float, default=None, dest="chi_ratio")

    p_run = sub.add_parser("run", help="run a schedule on an input state")
    add_common(p_run)
    p_run.add_argument("--chi-ratio", type=float, default=None, dest="chi_ratio")
    p_run.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p_run.add_argument("--input", default=None, help="uniform | basis:k | file:path")
    p_run.add_argument("--schedule", default=None, help="run a previously written schedule file")

    p_sweep = sub.add_parser("sweep", help="fidelity sweep over light-shift ratios")
    add_common(p_sweep)
    p_sweep.add_argument("--chi-ratios", default=None, dest="chi_ratios", help="comma separated")
    p_sweep.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p_sweep.add_argument("--input", default=None, help="uniform | basis:k | file:path")
    p_sweep.add_argument("--plot", default=None, help="also render the sweep to this image file")
    return parser


def _load_config_file(path: str, parser: argparse.ArgumentParser) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"--config: cannot load {path}: {exc}")
    if not isinstance(data, dict):
        parser.error(f"--config: {path} must hold a JSON object")
    return data


def _pick(args: argparse.Namespace, cfg: dict, key: str, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in cfg:
        return cfg[key]
    return default


def _parse_ratio_list(raw, parser: argparse.ArgumentParser) -> tuple[float, ...]:
    if isinstance(raw, (list, tuple)):
        items = list(raw)
    else:
        items = [s for s in str(raw).split(",") if s.strip()]
    try:
        ratios = tuple(float(x) for x in items)
    except (TypeError, ValueError):
        parser.error(f"--chi-ratios: cannot parse {raw!r} as numbers")
    if not ratios:
        parser.error("--chi-ratios: empty list")
    if any(r <= 0 for r in ratios):
        parser.error("--chi-ratios: ratios must be positive")
    if list(ratios) != sorted(ratios):
        parser.error("--chi-ratios: ratios must be sorted ascending")
    return ratios


def parse_args(argv: list[str] | None = None) -> CliConfig:
    """Parse and validate flags into a config; exits with status 1 on misuse."""
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _load_config_file(args.config, parser) if args.config else {}

    targets = list(args.target or [])
    if not targets and "target" in cfg:
        targets = [cfg["target"]]
    if len(targets) > 1:
        parser.error("--target: given more than once, pick one target")
    target = targets[0] if targets else None
    if target is not None and target not in BUILTIN_TARGETS:
        parser.error(f"--target: unknown builtin {target!r}")
    matrix = _pick(args, cfg, "matrix", None)
    if target is not None and matrix is not None:
        parser.error("--target and --matrix conflict, give exactly one")

    schedule = _pick(args, cfg, "schedule", None)
    if target is None and matrix is None and schedule is None:
        parser.error("no target: give --target, --matrix, or --schedule")

    dim = _pick(args, cfg, "dim", None)
    if dim is not None:
        try:
            dim = int(dim)
        except (TypeError, ValueError):
            parser.error(f"--dim: cannot parse {dim!r}")
        if dim < 1:
            parser.error("--dim: must be at least 1")

    def pick_float(key: str, flag: str, default: float) -> float:
        val = _pick(args, cfg, key, default)
        try:
            return float(val)
        except (TypeError, ValueError):
            parser.error(f"{flag}: cannot parse {val!r}")

    eta_x = pick_float("eta_x", "--eta-x", DEFAULT_ETA)
    eta_y = pick_float("eta_y", "--eta-y", DEFAULT_ETA)
    chi_ratio = pick_float("chi_ratio", "--chi-ratio", DEFAULT_CHI_RATIO)
    if chi_ratio <= 0:
        parser.error("--chi-ratio: must be positive")

    raw_ratios = _pick(args, cfg, "chi_ratios", None)
    if raw_ratios is None:
        ratios = DEFAULT_SWEEP_RATIOS
    else:
        ratios = _parse_ratio_list(raw_ratios, parser)

    mode_raw = _pick(args, cfg, "mode", Mode.FULL.value)
    try:
        mode = Mode(mode_raw)
    except ValueError:
        parser.error(f"--mode: unknown mode {mode_raw!r}")

    input_spec = str(_pick(args, cfg, "input", "uniform"))
    if not _INPUT_SPEC_RE.match(input_spec):
        parser.error(f"--input: {input_spec!r} is not uniform, basis:k, or file:path")

    seed = _pick(args, cfg, "seed", 0)
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        parser.error(f"--seed: cannot parse {seed!r}")

    return CliConfig(
        command=args.command,
        target=target,
        matrix=matrix,
        dim=dim if dim is not None else (DEFAULT_DIM if matrix is None else -1),
        eta_x=eta_x,
        eta_y=eta_y,
        chi_ratio=chi_ratio,
        chi_ratios=ratios,
        mode=mode,
        input_spec=input_spec,
        seed=seed,
        out=_pick(args, cfg, "out", None),
        schedule=schedule,
        plot=_pick(args, cfg, "plot", None),
    )


def _resolve_target(config: CliConfig) -> TargetOperator | None:
    if config.matrix is not None:
        top = load_matrix(config.matrix)
        if config.dim not in (-1, top.dim):
            raise ContractError(f"--dim {config.dim} conflicts with matrix dimension {top.dim}")
        return top
    if config.target is None:
        return None
    dim = config.dim
    if config.target == "qft":
        return qft(dim)
    if config.target == "rotation":
        return cyclic_rotation(dim)
    if config.target == "identity":
        return identity(dim)
    return random_unitary(dim, config.seed)


def _resolve_input(spec: str, dim: int) -> np.ndarray:
    if spec == "uniform":
        return np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)
    if spec.startswith("basis:"):
        k = int(spec.split(":", 1)[1])
        if not 0 <= k < dim:
            raise ContractError(f"basis index {k} outside 0..{dim - 1}")
        vec = np.zeros(dim, dtype=np.complex128)
        vec[k] = 1.0
        return vec
    path = spec.split(":", 1)[1]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractError(f"cannot load input state from {path}: {exc}") from exc
    if not isinstance(data, list) or len(data) != dim:
        raise ContractError(f"input file {path} must hold a length-{dim} array")
    out = np.zeros(dim, dtype=np.complex128)
    for i, item in enumerate(data):
        if isinstance(item, (int, float)):
            out[i] = float(item)
        elif isinstance(item, list) and len(item) == 2:
            out[i] = complex(float(item[0]), float(item[1]))
        else:
            raise ContractError(f"input file {path}: element {i} is not a number or [re, im]")
    return out


def _params_for(config: CliConfig, dim: int) -> TrapParams:
    return TrapParams(
        n_max=dim - 1, eta_x=config.eta_x, eta_y=config.eta_y, chi=config.chi_ratio
    )


def _fmt_opt(x: float | None) -> str:
    return "n/a" if x is None else format(x, ".12g")


def _cmd_synth(config: CliConfig) -> int:
    target = _resolve_target(config)
    if target is None:
        raise ContractError("synth needs --target or --matrix")
    schedule = synthesize(target, _params_for(config, target.dim))
    print(f"target: {target.name}  dim: {target.dim}")
    print(f"pulses: {len(schedule.pulses)}")
    print(f"nominal success probability: {schedule.nominal_success_prob:.12g}")
    print(f"phase convention: {schedule.phase_convention}")
    if config.out is not None:
        write_schedule_json(schedule, config.out)
        print(f"wrote {config.out}")
    return 0


def _cmd_run(config: CliConfig) -> int:
    target = _resolve_target(config)
    if config.schedule is not None:
        schedule = load_schedule_json(config.schedule)
    else:
        if target is None:
            raise ContractError("run needs --target, --matrix, or --schedule")
        schedule = synthesize(target, _params_for(config, target.dim))
    coeffs = _resolve_input(config.input_spec, schedule.params.n_max + 1)
    result = run(schedule, coeffs, mode=config.mode, target=target)
    print(f"pulses: {len(schedule.pulses)}  mode: {config.mode.value}")
    print(f"success probability: {result.success_prob:.12g}")
    print(f"fidelity: {_fmt_opt(result.fidelity_vs_ideal)}")
    print(f"guard occupancy: {result.guard_occupancy:.6g}")
    if config.out is not None:
        write_run_result_json(result, config.out)
        print(f"wrote {config.out}")
    return 0


def _cmd_sweep(config: CliConfig) -> int:
    target = _resolve_target(config)
    if target is None:
        raise ContractError("sweep needs --target or --matrix")
    coeffs = _resolve_input(config.input_spec, target.dim)
    base = _params_for(config, target.dim)
    rows = sweep_chi(target, list(config.chi_ratios), coeffs, base, mode=config.mode)
    if config.out is not None:
        write_sweep_csv(rows, config.out)
        print(f"wrote {config.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(render_sweep_csv(rows))
    if config.plot is not None:
        from .plots import render_sweep_plot

        render_sweep_plot(rows, config.plot)
        print(f"wrote {config.plot}")
    return 0


def dispatch(config: CliConfig) -> int:
    handlers = {"synth": _cmd_synth, "run": _cmd_run, "sweep": _cmd_sweep}
    try:
        return handlers[config.command](config)
    except IonSynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    return dispatch(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
