import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionsynth import (
    Channel,
    ChannelKind,
    ContractError,
    DimensionError,
    Level,
    Mode,
    PulseOp,
    StateVector,
    TrapParams,
    apply_pulse,
    apply_schedule_pulses,
    basis_state,
    channel1_offres_phase,
    channel1_offres_phase_formula,
    expm_reference,
    sideband_coupling,
    stark_shift,
)

P = TrapParams(n_max=2, eta_x=0.4, eta_y=0.4, chi=100.0)


def random_state(seed: int, params: TrapParams = P) -> StateVector:
    rng = np.random.default_rng(seed)
    size = params.dim_x * params.dim_y * 3
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return StateVector(params.dims, amps / np.linalg.norm(amps))


def random_pulse(rng: np.random.Generator, params: TrapParams) -> PulseOp:
    # rng.choice would coerce the enum members into numpy strings
    kinds = list(ChannelKind)
    kind = kinds[int(rng.integers(len(kinds)))]
    area = complex(rng.normal(), rng.normal())
    if kind == ChannelKind.STARK1:
        row = int(rng.integers(0, params.n_max + 1))
        return PulseOp(Channel(kind, row), area, delta_y=float(rng.normal() * 50.0))
    return PulseOp(Channel(kind), area)


class TestPulseOp:
    def test_stark_needs_delta(self):
        with pytest.raises(ContractError):
            PulseOp(Channel(ChannelKind.STARK1, 0), 1.0)
        with pytest.raises(ContractError):
            PulseOp(Channel(ChannelKind.CARRIER), 1.0, delta_y=0.5)

    def test_json_roundtrip(self):
        pulses = [
            PulseOp(Channel(ChannelKind.STARK1, 3), 0.5 - 0.25j, delta_y=-1.75),
            PulseOp(Channel(ChannelKind.SIDEBAND_Y), -1j * math.pi / 2),
            PulseOp(Channel(ChannelKind.CARRIER), 0.1),
            PulseOp(Channel(ChannelKind.SIDEBAND_X), 2.0 + 1.0j),
        ]
        for p in pulses:
            assert PulseOp.from_json_dict(p.to_json_dict()) == p


class TestCarrierAndSidebands:
    def test_zero_area_is_identity(self):
        s = random_state(1)
        for ch in (
            Channel(ChannelKind.CARRIER),
            Channel(ChannelKind.SIDEBAND_Y),
            Channel(ChannelKind.SIDEBAND_X),
        ):
            out = apply_pulse(s, PulseOp(ch, 0.0), P, Mode.FULL)
            assert np.allclose(out.amps, s.amps, atol=1e-15)

    def test_carrier_half_period_full_transfer(self):
        s = basis_state(P.dims, 1, 2, Level.C)
        out = apply_pulse(s, PulseOp(Channel(ChannelKind.CARRIER), -1j * math.pi / 2), P, Mode.FULL)
        assert abs(out.amplitude(1, 2, Level.B)) == pytest.approx(1.0, abs=1e-12)
        assert abs(out.amplitude(1, 2, Level.C)) == pytest.approx(0.0, abs=1e-12)

    def test_sideband_y_couples_up_one_rung(self):
        area = (math.pi / 2) / sideband_coupling(1, P.eta_y)
        s = basis_state(P.dims, 0, 1, Level.C)
        out = apply_pulse(s, PulseOp(Channel(ChannelKind.SIDEBAND_Y), area), P, Mode.FULL)
        assert abs(out.amplitude(0, 2, Level.B)) == pytest.approx(1.0, abs=1e-12)

    def test_modes_agree_outside_stark(self):
        s = random_state(5)
        for ch in (ChannelKind.CARRIER, ChannelKind.SIDEBAND_Y, ChannelKind.SIDEBAND_X):
            pulse = PulseOp(Channel(ch), 0.3 - 0.8j)
            full = apply_pulse(s, pulse, P, Mode.FULL)
            ideal = apply_pulse(s, pulse, P, Mode.IDEAL)
            assert np.array_equal(full.amps, ideal.amps)


class TestAgainstExpmReference:
    @pytest.mark.parametrize("seed", range(12))
    def test_random_pulse_matches(self, seed):
        rng = np.random.default_rng(1000 + seed)
        params = TrapParams(
            n_max=int(rng.integers(1, 4)),
            eta_x=float(rng.uniform(0.1, 0.8)),
            eta_y=float(rng.uniform(0.1, 0.8)),
            chi=float(rng.uniform(5.0, 300.0)),
            g2_mag=float(rng.uniform(0.5, 2.0)),
            g4_mag=float(rng.uniform(0.5, 2.0)),
        )
        pulse = random_pulse(rng, params)
        s = random_state(seed, params)
        fast = apply_pulse(s, pulse, params, Mode.FULL)
        slow = expm_reference(pulse.channel, params, pulse.delta_y, pulse.area, s)
        assert np.max(np.abs(fast.amps - slow.amps)) < 1e-10

    def test_expm_zero_area_identity(self):
        s = random_state(3)
        out = expm_reference(Channel(ChannelKind.SIDEBAND_X), P, None, 0.0, s)
        assert np.allclose(out.amps, s.amps, atol=1e-14)

    def test_expm_propagator_unitary(self):
        params = TrapParams(n_max=1, guard=1)
        dim = params.dim_x * params.dim_y * 3
        cols = []
        for i in range(dim):
            amps = np.zeros(dim, dtype=complex)
            amps[i] = 1.0
            out = expm_reference(
                Channel(ChannelKind.STARK1, 0),
                params,
                -stark_shift(0, params),
                0.7 - 0.2j,
                StateVector(params.dims, amps),
            )
            cols.append(out.amps)
        u = np.column_stack(cols)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-12


class TestStarkChannel:
    def test_ideal_resonant_rotation_on_addressed_row(self):
        pulse = PulseOp(
            Channel(ChannelKind.STARK1, 1), math.pi / 2, delta_y=-stark_shift(1, P)
        )
        s = basis_state(P.dims, 1, 0, Level.A)
        out = apply_pulse(s, pulse, P, Mode.IDEAL)
        assert out.amplitude(1, 0, Level.B) == pytest.approx(-1j, abs=1e-12)

    def test_ideal_spectator_keeps_population(self):
        pulse = PulseOp(
            Channel(ChannelKind.STARK1, 1), math.pi / 2, delta_y=-stark_shift(1, P)
        )
        s = basis_state(P.dims, 0, 0, Level.A)
        out = apply_pulse(s, pulse, P, Mode.IDEAL)
        amp = out.amplitude(0, 0, Level.A)
        assert abs(amp) == pytest.approx(1.0, abs=1e-12)
        # and the imprinted phase is the exact block diagonal's argument
        want = channel1_offres_phase(1, 0, math.pi / 2, P)
        assert cmath.phase(amp) == pytest.approx(want, abs=1e-12)

    def test_large_ratio_full_approaches_ideal(self):
        params = TrapParams(n_max=2, eta_x=0.4, eta_y=0.4, chi=1e6)
        pulse = PulseOp(
            Channel(ChannelKind.STARK1, 2), math.pi / 2, delta_y=-stark_shift(2, params)
        )
        s = random_state(8, params)
        full = apply_pulse(s, pulse, params, Mode.FULL)
        ideal = apply_pulse(s, pulse, params, Mode.IDEAL)
        assert np.max(np.abs(full.amps - ideal.amps)) < 1e-4

    def test_row_out_of_range(self):
        pulse = PulseOp(Channel(ChannelKind.STARK1, 99), 1.0, delta_y=0.0)
        with pytest.raises(DimensionError):
            apply_pulse(random_state(0), pulse, P, Mode.FULL)

    def test_state_params_mismatch(self):
        other = TrapParams(n_max=4)
        with pytest.raises(DimensionError):
            apply_pulse(random_state(0), PulseOp(Channel(ChannelKind.CARRIER), 1.0), other, Mode.FULL)


class TestNormAndComposition:
    @given(
        st.integers(0, 10_000),
        st.sampled_from(list(ChannelKind)),
        st.complex_numbers(max_magnitude=6.0, allow_nan=False, allow_infinity=False),
        st.sampled_from([Mode.FULL, Mode.IDEAL]),
    )
    @settings(max_examples=60, deadline=None)
    def test_norm_preserved(self, seed, kind, area, mode):
        if kind == ChannelKind.STARK1:
            pulse = PulseOp(Channel(kind, 1), area, delta_y=-stark_shift(1, P))
        else:
            pulse = PulseOp(Channel(kind), area)
        s = random_state(seed)
        out = apply_pulse(s, pulse, P, mode)
        assert abs(out.norm() - 1.0) < 1e-12

    def test_same_generator_areas_add(self):
        s = random_state(21)
        phase = cmath.exp(0.7j)
        for kind in (ChannelKind.CARRIER, ChannelKind.SIDEBAND_Y, ChannelKind.SIDEBAND_X):
            ch = Channel(kind)
            two = apply_schedule_pulses(
                s, [PulseOp(ch, 0.4 * phase), PulseOp(ch, 0.9 * phase)], P, Mode.FULL
            )
            one = apply_pulse(s, PulseOp(ch, 1.3 * phase), P, Mode.FULL)
            assert np.max(np.abs(two.amps - one.amps)) < 1e-12

    def test_stark_areas_add_in_full_mode(self):
        s = random_state(22)
        pulse = lambda a: PulseOp(Channel(ChannelKind.STARK1, 0), a, delta_y=-stark_shift(0, P))
        two = apply_schedule_pulses(s, [pulse(0.5), pulse(0.8)], P, Mode.FULL)
        one = apply_pulse(s, pulse(1.3), P, Mode.FULL)
        assert np.max(np.abs(two.amps - one.amps)) < 1e-12

    def test_inverse_pulse_restores_state(self):
        s = random_state(23)
        for kind in (ChannelKind.CARRIER, ChannelKind.SIDEBAND_Y, ChannelKind.SIDEBAND_X):
            ch = Channel(kind)
            area = 0.9 - 0.4j
            back = apply_schedule_pulses(s, [PulseOp(ch, area), PulseOp(ch, -area)], P, Mode.FULL)
            assert np.max(np.abs(back.amps - s.amps)) < 1e-12


class TestOffresPhase:
    def test_degenerate_shifts_give_resonant_phase(self):
        params = TrapParams(n_max=3, eta_x=0.0, chi=40.0)
        # all rows share one shift, the spectator block is exactly resonant
        got = channel1_offres_phase(0, 2, math.pi / 2, params)
        res = cmath.phase(complex(math.cos(math.pi / 2), 0.0))
        assert got == pytest.approx(res, abs=1e-12)

    def test_zero_area_zero_phase(self):
        assert channel1_offres_phase(0, 2, 0.0, P) == 0.0

    def test_against_expm_oracle(self):
        params = TrapParams(n_max=3, eta_x=0.4, eta_y=0.4, chi=100.0)
        s = basis_state(params.dims, 3, 0, Level.A)
        out = expm_reference(
            Channel(ChannelKind.STARK1, 0),
            params,
            -stark_shift(0, params),
            math.pi / 2,
            s,
        )
        want = cmath.phase(out.amplitude(3, 0, Level.A))
        got = channel1_offres_phase(0, 3, math.pi / 2, params)
        assert got == pytest.approx(want, abs=1e-12)

    def test_b_level_gets_opposite_phase(self):
        params = TrapParams(n_max=3, eta_x=0.4, chi=100.0)
        s = basis_state(params.dims, 3, 0, Level.B)
        out = expm_reference(
            Channel(ChannelKind.STARK1, 0), params, -stark_shift(0, params), math.pi / 2, s
        )
        want = cmath.phase(out.amplitude(3, 0, Level.B))
        got = channel1_offres_phase(0, 3, math.pi / 2, params)
        assert -got == pytest.approx(want, abs=1e-12)

    def test_formula_conventions(self):
        params = TrapParams(n_max=5, eta_x=0.4, chi=100.0)
        exact = channel1_offres_phase(0, 3, math.pi / 2, params)
        full = channel1_offres_phase_formula(0, 3, math.pi / 2, params, 1.0)
        half = channel1_offres_phase_formula(0, 3, math.pi / 2, params, 0.5)
        assert full == pytest.approx(exact, abs=1e-12)
        assert abs(half - exact) > 1e-6
        with pytest.raises(ContractError):
            channel1_offres_phase_formula(0, 3, 1.0, params, 0.25)
