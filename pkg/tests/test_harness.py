import json
import math

import numpy as np
import pytest

from ionsynth import (
    ContractError,
    DimensionError,
    Level,
    Mode,
    TrapParams,
    cyclic_rotation,
    from_matrix,
    identity,
    load_schedule_json,
    qft,
    random_unitary,
    render_sweep_csv,
    run,
    sweep_chi,
    synthesize,
    write_outputs,
    write_run_result_json,
    write_schedule_json,
    write_sweep_csv,
)
from ionsynth.harness import SweepRow, schedule_from_json_dict, schedule_to_json_dict

P3 = TrapParams(n_max=2, eta_x=0.4, eta_y=0.4, chi=100.0)


def uniform(dim: int) -> np.ndarray:
    return np.full(dim, 1 / math.sqrt(dim), dtype=np.complex128)


class TestRun:
    def test_identity_basis_input(self):
        sch = synthesize(identity(3), P3)
        e0 = np.zeros(3, dtype=complex)
        e0[0] = 1.0
        res = run(sch, e0, mode=Mode.IDEAL)
        assert res.fidelity_vs_ideal == pytest.approx(1.0, abs=1e-10)
        assert res.success_prob == pytest.approx(1 / 3, abs=1e-10)
        assert res.mode is Mode.IDEAL

    def test_rotation_moves_register(self):
        sch = synthesize(cyclic_rotation(3), P3)
        e0 = np.zeros(3, dtype=complex)
        e0[0] = 1.0
        res = run(sch, e0, mode=Mode.IDEAL)
        assert res.fidelity_vs_ideal == pytest.approx(1.0, abs=1e-10)
        assert abs(res.post_state.amplitude(0, 1, Level.B)) == pytest.approx(1.0, abs=1e-9)

    def test_swap_modes_moves_output_register(self):
        sch = synthesize(cyclic_rotation(3), P3)
        e0 = np.zeros(3, dtype=complex)
        e0[0] = 1.0
        res = run(sch, e0, mode=Mode.IDEAL, swap_modes=True)
        assert abs(res.post_state.amplitude(1, 0, Level.B)) == pytest.approx(1.0, abs=1e-9)

    def test_unnormalized_input_rejected(self):
        sch = synthesize(identity(3), P3)
        with pytest.raises(ContractError):
            run(sch, np.array([1.0, 1.0, 0.0], dtype=complex))

    def test_wrong_length_rejected(self):
        sch = synthesize(identity(3), P3)
        with pytest.raises(DimensionError):
            run(sch, uniform(4))

    def test_kernel_input_reports_undefined_fidelity(self):
        # both columns point at e_0, so (1,-1)/sqrt(2) is annihilated
        target = from_matrix("kernel", np.array([[1.0, 1.0], [0.0, 0.0]]))
        params = TrapParams(n_max=1, chi=100.0)
        sch = synthesize(target, params)
        c = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2)
        res = run(sch, c, mode=Mode.IDEAL)
        assert res.fidelity_vs_ideal is None
        assert res.success_prob == pytest.approx(0.0, abs=1e-12)

    def test_guard_occupancy_zero_in_ideal_mode(self):
        sch = synthesize(qft(3), P3)
        res = run(sch, uniform(3), mode=Mode.IDEAL)
        assert res.guard_occupancy < 1e-12

    def test_digest_mismatch_rejected(self):
        sch = synthesize(qft(3), P3)
        with pytest.raises(ContractError):
            run(sch, uniform(3), target=identity(3))

    def test_full_mode_converges(self):
        lo = synthesize(qft(3), TrapParams(n_max=2, chi=20.0))
        hi = synthesize(qft(3), TrapParams(n_max=2, chi=1e6))
        res_lo = run(lo, uniform(3), mode=Mode.FULL)
        res_hi = run(hi, uniform(3), mode=Mode.FULL)
        assert res_hi.fidelity_vs_ideal > res_lo.fidelity_vs_ideal
        assert res_hi.fidelity_vs_ideal > 1 - 1e-4

    def test_non_unitary_success_varies_with_input(self):
        target = from_matrix("halving", np.diag([1.0, 0.5]))
        params = TrapParams(n_max=1, chi=100.0)
        sch = synthesize(target, params)
        probs = []
        rng = np.random.default_rng(4)
        for _ in range(10):
            c = rng.normal(size=2) + 1j * rng.normal(size=2)
            c /= np.linalg.norm(c)
            res = run(sch, c, mode=Mode.IDEAL)
            assert res.fidelity_vs_ideal == pytest.approx(1.0, abs=1e-9)
            probs.append(res.success_prob)
        assert max(probs) - min(probs) > 0.0


class TestSweep:
    def test_single_ratio_matches_direct_run(self):
        target = qft(3)
        rows = sweep_chi(target, [100.0], uniform(3), P3, mode=Mode.FULL)
        sch = synthesize(target, TrapParams(n_max=2, eta_x=0.4, eta_y=0.4, chi=100.0))
        direct = run(sch, uniform(3), mode=Mode.FULL)
        assert len(rows) == 1
        assert rows[0].fidelity == direct.fidelity_vs_ideal
        assert rows[0].success_prob == direct.success_prob
        assert rows[0].chi_ratio == 100.0
        assert rows[0].target == "qft"

    def test_ideal_override_is_exact_everywhere(self):
        rows = sweep_chi(qft(3), [20.0, 200.0], uniform(3), P3, mode=Mode.IDEAL)
        for row in rows:
            assert row.fidelity >= 1 - 1e-9

    def test_trend_upward(self):
        rows = sweep_chi(qft(3), [20.0, 1000.0], uniform(3), P3, mode=Mode.FULL)
        assert rows[-1].fidelity > rows[0].fidelity

    def test_ratio_validation(self):
        with pytest.raises(ContractError):
            sweep_chi(qft(3), [100.0, 20.0], uniform(3), P3)
        with pytest.raises(ContractError):
            sweep_chi(qft(3), [-5.0], uniform(3), P3)

    def test_failed_point_is_skipped(self, caplog):
        # wrong input length fails inside run for every ratio
        rows = sweep_chi(qft(3), [50.0], uniform(4), P3)
        assert rows == []
        assert any("failed" in r.message for r in caplog.records)


class TestCsv:
    def test_header_only_when_empty(self):
        assert render_sweep_csv([]) == (
            "chi_ratio,target,n_dim,eta_x,eta_y,mode,fidelity,success_prob,guard_occupancy\n"
        )

    def test_one_row(self):
        row = SweepRow(
            chi_ratio=100.0,
            target="qft",
            n_dim=6,
            eta_x=0.4,
            eta_y=0.4,
            mode=Mode.FULL,
            fidelity=0.5,
            success_prob=1 / 6,
            guard_occupancy=1e-13,
        )
        text = render_sweep_csv([row])
        lines = text.strip().split("\n")
        assert len(lines) == 2
        assert lines[1].startswith("100,qft,6,")
        assert lines[1].split(",")[5] == "full"

    def test_seventeen_digit_floats_roundtrip(self):
        val = 1 / 3
        row = SweepRow(
            chi_ratio=val,
            target="t",
            n_dim=2,
            eta_x=val,
            eta_y=val,
            mode=Mode.IDEAL,
            fidelity=val,
            success_prob=val,
            guard_occupancy=val,
        )
        fid_field = render_sweep_csv([row]).strip().split("\n")[1].split(",")[6]
        assert float(fid_field) == val

    def test_none_fidelity_written_as_nan(self):
        row = SweepRow(
            chi_ratio=1.0,
            target="t",
            n_dim=2,
            eta_x=0.4,
            eta_y=0.4,
            mode=Mode.FULL,
            fidelity=None,
            success_prob=0.0,
            guard_occupancy=0.0,
        )
        assert ",nan," in render_sweep_csv([row])

    def test_byte_stable_on_disk(self, tmp_path):
        rows = sweep_chi(qft(3), [50.0, 100.0], uniform(3), P3, mode=Mode.IDEAL)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_sweep_csv(rows, str(p1))
        write_sweep_csv(rows, str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestScheduleSerialization:
    def test_roundtrip_preserves_run_results_bit_for_bit(self, tmp_path):
        target = qft(4)
        params = TrapParams(n_max=3, eta_x=0.4, eta_y=0.4, chi=150.0)
        sch = synthesize(target, params)
        path = tmp_path / "sch.json"
        write_schedule_json(sch, str(path))
        loaded = load_schedule_json(str(path))
        assert loaded.params == params
        assert loaded.target_digest == sch.target_digest
        assert loaded.step_b_start == sch.step_b_start
        assert loaded.pulses == sch.pulses
        direct = run(sch, uniform(4), mode=Mode.FULL)
        from_file = run(loaded, uniform(4), mode=Mode.FULL, target=target)
        assert direct.pre_projection_digest == from_file.pre_projection_digest
        assert direct.success_prob == from_file.success_prob
        assert direct.fidelity_vs_ideal == from_file.fidelity_vs_ideal

    def test_loaded_schedule_without_target_has_no_fidelity(self, tmp_path):
        sch = synthesize(qft(3), P3)
        path = tmp_path / "s.json"
        write_schedule_json(sch, str(path))
        res = run(load_schedule_json(str(path)), uniform(3), mode=Mode.IDEAL)
        assert res.fidelity_vs_ideal is None
        assert res.success_prob == pytest.approx(1 / 3, abs=1e-10)

    def test_json_shape(self):
        sch = synthesize(qft(3), P3)
        data = schedule_to_json_dict(sch)
        assert set(data) == {
            "params",
            "target_digest",
            "nominal_success_prob",
            "phase_convention",
            "column_norms",
            "pulses",
            "phase_ledger",
        }
        assert data["phase_convention"] in ("full", "half")
        pulse = data["pulses"][0]
        assert set(pulse) == {"channel", "row_m", "delta_y", "area"}
        ledger_row = data["phase_ledger"][0]
        assert set(ledger_row) == {
            "m",
            "phi_applied",
            "phi_closed_form_full",
            "phi_closed_form_half",
        }
        rebuilt = schedule_from_json_dict(data)
        assert rebuilt.pulses == sch.pulses

    def test_truncated_pulse_list_rejected(self):
        sch = synthesize(qft(3), P3)
        data = schedule_to_json_dict(sch)
        data["pulses"] = data["pulses"][:3]
        with pytest.raises(ContractError):
            schedule_from_json_dict(data)


class TestRunResultJson:
    def test_round_trip_fields(self, tmp_path):
        sch = synthesize(identity(3), P3)
        res = run(sch, uniform(3), mode=Mode.IDEAL)
        path = tmp_path / "r.json"
        write_run_result_json(res, str(path))
        data = json.loads(path.read_text())
        assert data["mode"] == "ideal"
        assert data["success_prob"] == res.success_prob
        assert data["fidelity_vs_ideal"] == res.fidelity_vs_ideal
        assert data["pre_projection_digest"] == res.pre_projection_digest
        assert len(data["post_state"]) == len(res.post_state.amps)
        assert all(len(pair) == 2 for pair in data["post_state"])


class TestWriteOutputs:
    def test_writes_both(self, tmp_path):
        sch = synthesize(qft(3), P3)
        rows = sweep_chi(qft(3), [100.0], uniform(3), P3, mode=Mode.IDEAL)
        csv_path = tmp_path / "x.csv"
        sch_path = tmp_path / "x.json"
        write_outputs(rows, sch, csv_path=str(csv_path), schedule_path=str(sch_path))
        assert csv_path.exists() and sch_path.exists()

    def test_schedule_path_needs_schedule(self, tmp_path):
        with pytest.raises(ContractError):
            write_outputs([], None, schedule_path=str(tmp_path / "x.json"))
