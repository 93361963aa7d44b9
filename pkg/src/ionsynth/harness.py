"""Run schedules on input states, collect statistics, sweep light-shift ratios.

The run contract: prepare the register superposition sum_m c_m |m, 0, A⟩,
apply every pulse in order, project the internal state onto B, and compare
the survivor against the directly computed reference |0⟩ ⊗ |V c⟩ ⊗ |B⟩.
Fidelity is the squared overlap of the full composite states, so the global
phase drops out but any misplaced relative phase or stray population counts
against it.  File output is deterministic: floats are printed with 17
significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError, IonSynthError
from .fockspace import (
    Level,
    StateVector,
    fidelity,
    guard_occupancy,
    mode_swap,
    project_internal,
    zero_state,
)
from .iontools import TrapParams
from .propagator import Mode, PulseOp, apply_schedule_pulses
from .synthesis import LedgerRow, Schedule, synthesize
from .targets import TargetOperator

log = logging.getLogger(__name__)

INPUT_NORM_TOL = 1e-9


@dataclass(frozen=True)
class RunResult:
    """Outcome of one schedule execution."""

    pre_projection_digest: str
    success_prob: float
    post_state: StateVector | None
    fidelity_vs_ideal: float | None
    guard_occupancy: float
    mode: Mode

    def __post_init__(self) -> None:
        if not 0.0 <= self.success_prob <= 1.0 + 1e-12:
            raise ContractError(f"success probability {self.success_prob} outside [0, 1]")
        if self.guard_occupancy < 0.0:
            raise ContractError("guard occupancy cannot be negative")
        if self.fidelity_vs_ideal is not None and not 0.0 <= self.fidelity_vs_ideal <= 1.0:
            raise ContractError(f"fidelity {self.fidelity_vs_ideal} outside [0, 1]")


def _state_digest(state: StateVector) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(state.amps).tobytes())
    return h.hexdigest()


def reference_state(
    target: TargetOperator, input_coefficients: np.ndarray, params: TrapParams
) -> StateVector | None:
    """Directly computed |0⟩ ⊗ |V c⟩ ⊗ |B⟩, or None when V c vanishes."""
    out = target.apply(input_coefficients)
    nrm = float(np.linalg.norm(out))
    if nrm <= 0.0:
        return None
    ref = zero_state(params.dims)
    amps = np.array(ref.amps)
    for n in range(params.n_max + 1):
        amps[ref.index(0, n, Level.B)] = out[n] / nrm
    return StateVector(ref.dims, amps)


def run(
    schedule: Schedule,
    input_coefficients: np.ndarray,
    mode: Mode = Mode.FULL,
    target: TargetOperator | None = None,
    swap_modes: bool = False,
) -> RunResult:
    """Execute a schedule on register coefficients and project onto B.

    The fidelity reference needs the target matrix; schedules loaded from
    disk carry only its digest, so pass the target explicitly in that case
    (a digest mismatch is rejected).  With no target available the fidelity
    field is None.  swap_modes exchanges the two modes of the post state,
    for reading the result off the register mode instead of the work mode.
    """
    params = schedule.params
    coeffs = np.asarray(input_coefficients, dtype=np.complex128)
    if coeffs.shape != (params.n_max + 1,):
        raise DimensionError(
            f"input has shape {coeffs.shape}, schedule wants ({params.n_max + 1},)"
        )
    if abs(np.linalg.norm(coeffs) - 1.0) > INPUT_NORM_TOL:
        raise ContractError(f"input norm {np.linalg.norm(coeffs):.12g} is not 1")
    top = target if target is not None else schedule.target
    if top is not None and top.digest != schedule.target_digest:
        raise ContractError("target does not match the schedule's target digest")

    init = zero_state(params.dims)
    amps = np.array(init.amps)
    for m in range(params.n_max + 1):
        amps[init.index(m, 0, Level.A)] = coeffs[m]
    state = StateVector(init.dims, amps)

    state = apply_schedule_pulses(state, schedule.pulses, params, mode)
    digest = _state_digest(state)
    guard = guard_occupancy(state, params.n_max)
    post, prob = project_internal(state, schedule.projection_level)

    fid: float | None = None
    if post is not None and top is not None:
        ref = reference_state(top, coeffs, params)
        if ref is not None:
            fid = fidelity(post, ref)
    if post is not None and swap_modes:
        post = mode_swap(post)
    return RunResult(
        pre_projection_digest=digest,
        success_prob=prob,
        post_state=post,
        fidelity_vs_ideal=fid,
        guard_occupancy=guard,
        mode=mode,
    )


@dataclass(frozen=True)
class SweepRow:
    """One sweep point; the fields mirror the CSV columns in order."""

    chi_ratio: float
    target: str
    n_dim: int
    eta_x: float
    eta_y: float
    mode: Mode
    fidelity: float | None
    success_prob: float
    guard_occupancy: float


def sweep_chi(
    target: TargetOperator,
    ratios: list[float],
    input_coefficients: np.ndarray,
    params_base: TrapParams,
    mode: Mode = Mode.FULL,
) -> list[SweepRow]:
    """Re-synthesize and run the target at each light-shift ratio.

    The schedule must be rebuilt per ratio because the compensation phases
    depend on it.  A row that fails is logged and skipped so one bad point
    does not lose the rest of the sweep.
    """
    rats = [float(r) for r in ratios]
    if any(r <= 0.0 for r in rats):
        raise ContractError("ratios must be positive")
    if rats != sorted(rats):
        raise ContractError("ratios must be sorted ascending")
    rows: list[SweepRow] = []
    for ratio in rats:
        try:
            params = dataclasses.replace(params_base, chi=ratio * params_base.g1_mag)
            schedule = synthesize(target, params)
            result = run(schedule, input_coefficients, mode=mode, target=target)
            rows.append(
                SweepRow(
                    chi_ratio=ratio,
                    target=target.name,
                    n_dim=target.dim,
                    eta_x=params.eta_x,
                    eta_y=params.eta_y,
                    mode=mode,
                    fidelity=result.fidelity_vs_ideal,
                    success_prob=result.success_prob,
                    guard_occupancy=result.guard_occupancy,
                )
            )
        except IonSynthError as exc:
            log.warning("sweep point chi_ratio=%g failed: %s", ratio, exc)
    return rows


SWEEP_CSV_HEADER = "chi_ratio,target,n_dim,eta_x,eta_y,mode,fidelity,success_prob,guard_occupancy"


def _fmt(x: float | None) -> str:
    if x is None:
        return "nan"
    return format(float(x), ".17g")


def render_sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    buf.write(SWEEP_CSV_HEADER + "\n")
    for r in rows:
        buf.write(
            ",".join(
                [
                    _fmt(r.chi_ratio),
                    r.target,
                    str(r.n_dim),
                    _fmt(r.eta_x),
                    _fmt(r.eta_y),
                    r.mode.value,
                    _fmt(r.fidelity),
                    _fmt(r.success_prob),
                    _fmt(r.guard_occupancy),
                ]
            )
            + "\n"
        )
    return buf.getvalue()


def schedule_to_json_dict(schedule: Schedule) -> dict:
    return {
        "params": schedule.params.to_json_dict(),
        "target_digest": schedule.target_digest,
        "nominal_success_prob": schedule.nominal_success_prob,
        "phase_convention": schedule.phase_convention,
        "column_norms": list(schedule.column_norms),
        "pulses": [p.to_json_dict() for p in schedule.pulses],
        "phase_ledger": [row.to_json_dict() for row in schedule.phase_ledger],
    }


def schedule_from_json_dict(data: dict) -> Schedule:
    """Rebuild a schedule from its JSON form.

    The in-memory target and synthesis record are not serialized; runs from
    a loaded schedule need the target passed alongside for fidelity.  The
    superpose stage always holds 3*n_max + 1 pulses, which pins down the
    stage boundary.
    """
    params = TrapParams.from_json_dict(data["params"])
    pulses = tuple(PulseOp.from_json_dict(p) for p in data["pulses"])
    n_sup = 3 * params.n_max + 1
    if len(pulses) < n_sup:
        raise ContractError("pulse list is too short for the superpose stage")
    return Schedule(
        pulses=pulses,
        step_b_start=len(pulses) - n_sup,
        projection_level=Level.B,
        nominal_success_prob=float(data["nominal_success_prob"]),
        phase_ledger=tuple(LedgerRow.from_json_dict(r) for r in data["phase_ledger"]),
        params=params,
        target_digest=str(data["target_digest"]),
        phase_convention=str(data.get("phase_convention", "none")),
        column_norms=tuple(float(x) for x in data.get("column_norms", [])),
    )


def run_result_to_json_dict(result: RunResult) -> dict:
    post = None
    if result.post_state is not None:
        post = [[float(a.real), float(a.imag)] for a in result.post_state.amps]
    return {
        "pre_projection_digest": result.pre_projection_digest,
        "success_prob": result.success_prob,
        "fidelity_vs_ideal": result.fidelity_vs_ideal,
        "guard_occupancy": result.guard_occupancy,
        "mode": result.mode.value,
        "post_state": post,
    }


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IonSynthError(f"cannot write {path}: {exc}") from exc


def write_sweep_csv(rows: list[SweepRow], path: str) -> None:
    _write_text(path, render_sweep_csv(rows))


def write_schedule_json(schedule: Schedule, path: str) -> None:
    _write_text(path, json.dumps(schedule_to_json_dict(schedule), indent=2) + "\n")


def load_schedule_json(path: str) -> Schedule:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IonSynthError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ContractError(f"{path} is not valid JSON: {exc}") from exc
    return schedule_from_json_dict(data)


def write_run_result_json(result: RunResult, path: str) -> None:
    _write_text(path, json.dumps(run_result_to_json_dict(result), indent=2) + "\n")


def write_outputs(
    results: list[SweepRow],
    schedule: Schedule | None,
    csv_path: str | None = None,
    schedule_path: str | None = None,
) -> None:
    """Write the sweep CSV and/or the schedule JSON; both are byte-stable."""
    if csv_path is not None:
        write_sweep_csv(results, csv_path)
    if schedule_path is not None:
        if schedule is None:
            raise ContractError("schedule path given without a schedule")
        write_schedule_json(schedule, schedule_path)
