import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from terrainlink import (
    DomainError,
    EnvelopeTrace,
    FadingProcess,
    MultipathProfile,
    Normalization,
    RicianParameters,
    envelope_process,
    impulse_response,
    normalized_power_envelope,
    rician_amplitude,
)
from terrainlink.fading import dump_envelope, load_envelope

LAMBDA_905 = 299792458 / 905e6


def half_decay_lag(power):
    x = power - power.mean()
    spectrum = np.fft.rfft(x, 2 * x.size)
    acf = np.fft.irfft(spectrum * np.conj(spectrum))[: x.size]
    acf /= acf[0]
    return int(np.argmax(acf < 0.5))


class TestRicianParameters:
    def test_table_defaults(self):
        p = RicianParameters()
        assert (p.K, p.max_velocity_m_per_s, p.envelope_table_offset) == (0.5, 1.0, 0)

    def test_rayleigh_has_no_dominant_path(self):
        assert RicianParameters(K=0).A == 0.0

    @given(st.floats(0, 1e3), st.floats(1e-3, 1e3))
    def test_mean_square_identity(self, K, sigma):
        p = RicianParameters(K=K, sigma=sigma)
        assert p.A**2 == pytest.approx(2 * sigma**2 * K, rel=1e-12)
        assert p.A**2 + 2 * sigma**2 == pytest.approx(2 * sigma**2 * (K + 1), rel=1e-12)

    @pytest.mark.parametrize("kwargs", [dict(K=-0.1), dict(sigma=0), dict(max_velocity_m_per_s=-1)])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            RicianParameters(**kwargs)


class TestAmplitude:
    @given(st.floats(-10, 10), st.floats(-10, 10))
    def test_rayleigh_case(self, x1, x2):
        r = rician_amplitude(x1, x2, RicianParameters(K=0, sigma=1))
        assert r == pytest.approx(math.hypot(x1, x2), rel=1e-12)

    def test_zero_draws_give_dominant_amplitude(self):
        assert rician_amplitude(0.0, 0.0, RicianParameters(K=0.5, sigma=1)) == pytest.approx(1.0)

    def test_mean_square(self):
        rng = np.random.default_rng(2024)
        x1, x2 = rng.standard_normal((2, 10**6))
        r = rician_amplitude(x1, x2, RicianParameters(K=0.5, sigma=1))
        assert np.mean(r**2) == pytest.approx(3.0, rel=0.01)


class TestPowerEnvelope:
    def test_total_power_at_origin(self):
        assert normalized_power_envelope(0, 0, 0.5) == pytest.approx(1 / 3)

    @pytest.mark.parametrize("K", [0.1, 0.5, 7.0])
    def test_dominant_power_at_origin(self, K):
        assert normalized_power_envelope(0, 0, K, Normalization.DOMINANT_PATH_POWER) == pytest.approx(1.0)

    def test_dominant_power_needs_k(self):
        with pytest.raises(DomainError):
            normalized_power_envelope(0.3, 0.2, 0.0, Normalization.DOMINANT_PATH_POWER)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 50), st.floats(0.01, 10))
    def test_consistent_with_amplitude(self, x1, x2, K, sigma):
        r = rician_amplitude(x1, x2, RicianParameters(K=K, sigma=sigma))
        mean_square = 2 * sigma**2 * (K + 1)
        assert normalized_power_envelope(x1, x2, K) == pytest.approx(r**2 / mean_square, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("K", [0, 0.5, 1, 5])
    def test_unit_mean(self, K):
        rng = np.random.default_rng(7)
        x1, x2 = rng.standard_normal((2, 10**6))
        p = normalized_power_envelope(x1, x2, K)
        se = p.std() / math.sqrt(p.size)
        assert abs(p.mean() - 1) < 3 * se

    def test_rayleigh_tail(self):
        rng = np.random.default_rng(11)
        x1, x2 = rng.standard_normal((2, 10**6))
        sigma = 1.7
        r = rician_amplitude(x1, x2, RicianParameters(K=0, sigma=sigma))
        result = stats.kstest(r**2 / (2 * sigma**2), "expon")
        assert result.pvalue > 0.01


class TestEnvelopeProcess:
    def test_zero_velocity_is_constant(self):
        trace = envelope_process(RicianParameters(max_velocity_m_per_s=0), LAMBDA_905, 0.01, 500, seed=3)
        assert np.all(trace.power_norm == trace.power_norm[0])

    def test_deterministic(self):
        a = envelope_process(RicianParameters(), LAMBDA_905, 1e-3, 5000, seed=42)
        b = envelope_process(RicianParameters(), LAMBDA_905, 1e-3, 5000, seed=42)
        assert np.array_equal(a.power_norm, b.power_norm)
        c = envelope_process(RicianParameters(), LAMBDA_905, 1e-3, 5000, seed=43)
        assert not np.array_equal(a.power_norm, c.power_norm)

    def test_unit_mean_power(self):
        trace = envelope_process(RicianParameters(K=0.5), LAMBDA_905, 0.01, 10**6, seed=1)
        assert trace.power_norm.mean() == pytest.approx(1.0, rel=0.005)

    def test_offset_shifts_start(self):
        base = envelope_process(RicianParameters(), LAMBDA_905, 1e-3, 1000, seed=5)
        shifted = envelope_process(RicianParameters(envelope_table_offset=100), LAMBDA_905, 1e-3, 900, seed=5)
        np.testing.assert_allclose(shifted.power_norm, base.power_norm[100:], rtol=1e-9)
        np.testing.assert_array_equal(shifted.t_s, base.t_s[:900])

    def test_faster_velocity_decorrelates_sooner(self):
        lags = [
            half_decay_lag(envelope_process(RicianParameters(max_velocity_m_per_s=v), LAMBDA_905,
                                            1e-3, 2**16, seed=9).power_norm)
            for v in (0.5, 1.0, 2.0)
        ]
        assert lags[0] > lags[1] > lags[2]

    @pytest.mark.parametrize("dt, n", [(0.0, 10), (-1.0, 10), (1e-3, 0)])
    def test_domain(self, dt, n):
        with pytest.raises(DomainError):
            envelope_process(RicianParameters(), LAMBDA_905, dt, n, seed=0)

    def test_fading_process_matches_trace(self):
        params = RicianParameters(K=2.0, envelope_table_offset=3)
        trace = envelope_process(params, LAMBDA_905, 2e-3, 50, seed=8)
        proc = FadingProcess(params, LAMBDA_905, 2e-3, seed=8)
        assert proc.power(float(trace.t_s[17])) == pytest.approx(trace.power_norm[17], rel=1e-12)

    def test_csv_round_trip(self):
        trace = envelope_process(RicianParameters(), LAMBDA_905, 1e-3, 200, seed=1)
        text = dump_envelope(trace)
        assert text.startswith("t_s,power_norm\n")
        again = load_envelope(text)
        np.testing.assert_array_equal(again.power_norm, trace.power_norm)
        np.testing.assert_array_equal(again.t_s, trace.t_s)

    def test_trace_invariants(self):
        with pytest.raises(DomainError):
            EnvelopeTrace([0.0, 0.0], [1.0, 1.0])
        with pytest.raises(DomainError):
            EnvelopeTrace([0.0, 1.0], [1.0, -1.0])


def direct_sum(taps, grid):
    """Brute force: for every tap scan the whole grid for the closest sample."""
    out = [0j] * len(grid)
    for tau, rho, phi in taps:
        best = 0
        for i, t in enumerate(grid):
            if abs(t - tau) < abs(grid[best] - tau):
                best = i
        out[best] += rho * complex(math.cos(phi), math.sin(phi))
    return out


class TestImpulseResponse:
    def test_single_tap(self):
        y = impulse_response(MultipathProfile(((0.0, 1.0, 0.0),)), [0.0, 1e-6, 2e-6])
        np.testing.assert_array_equal(y, [1, 0, 0])

    def test_opposite_phases_cancel(self):
        y = impulse_response(MultipathProfile(((1e-6, 0.5, 0.0), (1e-6, 0.5, math.pi))), [0, 1e-6, 2e-6])
        assert np.max(np.abs(y)) < 1e-15

    def test_three_taps_on_microsecond_grid(self):
        taps = ((0.2e-6, 1.0, 0.3), (1.4e-6, 0.6, -1.1), (1.6e-6, 0.25, 2.0))
        grid = [i * 1e-6 for i in range(5)]
        y = impulse_response(MultipathProfile(taps), grid)
        np.testing.assert_allclose(y, direct_sum(taps, grid), atol=1e-15)

    def test_tie_goes_to_earlier_sample(self):
        y = impulse_response(MultipathProfile(((0.5, 1.0, 0.0),)), [0.0, 1.0])
        np.testing.assert_array_equal(y, [1, 0])

    def test_empty_profile(self):
        with pytest.raises(DomainError):
            MultipathProfile(())

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.tuples(st.floats(0, 1e-5), st.floats(0, 2), st.floats(-4, 4)), min_size=1, max_size=8),
        st.lists(st.tuples(st.floats(0, 1e-5), st.floats(0, 2), st.floats(-4, 4)), min_size=1, max_size=8),
    )
    def test_linear_in_taps(self, a, b):
        a = MultipathProfile(tuple(sorted(a)))
        b = MultipathProfile(tuple(sorted(b)))
        grid = np.linspace(0, 1e-5, 23)
        combined = impulse_response(a + b, grid)
        np.testing.assert_allclose(combined, impulse_response(a, grid) + impulse_response(b, grid), atol=1e-12)
