"""Tests for the spectrum estimate and the quality metrics."""

import math

import numpy as np
import pytest

from app.analysis import (INFINITE_DB, SNR_CAP_DB, MetricReport, SpectrumEstimate, cap_db,
                          mean_power_db, measure_mse, measure_sfdr, measure_snr, metric_report,
                          periodogram, snr_mse_consistency, spectrum_rows, tone_bins)
from app.core_model import (DegenerateMeasurementError, DomainError, InputLengthError, RateTag,
                            SignalTrace)

K = 1024


def _bin_tone(k, K=K, amplitude=1.0, length=None):
    # integer phase reduction keeps the tone exactly periodic in K
    m = np.arange(length or K)
    return amplitude * np.exp(2j * np.pi * np.mod(k * m, K) / K)


# ============================================================================
# PERIODOGRAM
# ============================================================================


class TestPeriodogram:
    """Peak-normalized magnitude spectrum."""

    def test_single_bin_tone(self):
        spec = periodogram(SignalTrace(_bin_tone(3), 0, RateTag.FS2), K)
        assert spec.mag_db[3] == 0.0
        others = np.delete(spec.mag_db, 3)
        assert np.max(others) <= -250.0

    def test_two_equal_tones(self):
        spec = periodogram(SignalTrace(_bin_tone(5) + _bin_tone(-40 % K)), K)
        assert spec.mag_db[5] == pytest.approx(0.0, abs=1e-9)
        assert spec.mag_db[K - 40] == pytest.approx(0.0, abs=1e-9)

    def test_peak_is_zero_db(self, rng):
        spec = periodogram(SignalTrace(rng.standard_normal(K)), K)
        assert np.max(spec.mag_db) == 0.0

    def test_hann_window(self):
        spec = periodogram(SignalTrace(_bin_tone(100)), K, window="hann")
        assert spec.window == "hann"
        assert np.argmax(spec.mag_db) == 100
        assert spec.mag_db[99] == pytest.approx(20 * math.log10(0.5), abs=1e-6)

    def test_zero_signal(self):
        with pytest.raises(DegenerateMeasurementError):
            periodogram(SignalTrace(np.zeros(K)), K)

    def test_short_trace(self):
        with pytest.raises(InputLengthError):
            periodogram(SignalTrace(np.ones(K - 1)), K)

    def test_fft_length_must_be_power_of_two(self):
        with pytest.raises(DomainError):
            periodogram(SignalTrace(np.ones(1000)), 1000)

    def test_spectrum_rows_sorted(self):
        rows = spectrum_rows(periodogram(SignalTrace(_bin_tone(1, K=8)), 8))
        assert [r[0] for r in rows] == [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75]
        assert rows[5] == (0.25, 0.0)


# ============================================================================
# SFDR
# ============================================================================


class TestSFDR:
    """Tone-to-strongest-spur ratio."""

    def test_injected_spur(self):
        mag = np.full(64, -200.0)
        mag[10] = 0.0
        mag[40] = -70.0
        spec = SpectrumEstimate(np.fft.fftfreq(64) * 2, mag, "rectangular", 64)
        assert measure_sfdr(spec, [10]) == pytest.approx(70.0)

    def test_neighbours_are_excluded(self):
        mag = np.full(16, -120.0)
        mag[4] = 0.0
        mag[5] = -3.0
        spec = SpectrumEstimate(np.fft.fftfreq(16) * 2, mag, "rectangular", 16)
        assert measure_sfdr(spec, [4]) == pytest.approx(120.0)

    def test_no_spur_bin_left(self):
        spec = SpectrumEstimate(np.zeros(4), np.zeros(4), "rectangular", 4)
        with pytest.raises(DegenerateMeasurementError):
            measure_sfdr(spec, [0, 2])

    def test_empty_tone_list(self):
        spec = SpectrumEstimate(np.zeros(8), np.zeros(8), "rectangular", 8)
        with pytest.raises(DegenerateMeasurementError):
            measure_sfdr(spec, [])

    def test_tone_bins(self):
        assert tone_bins([-math.pi * 307 / K, math.pi * 3 / K], K) == [3, K - 307]


# ============================================================================
# SNR AND MSE
# ============================================================================


class TestSNR:
    """SNR, MSE and their identity."""

    def test_identical_traces(self):
        x = SignalTrace(_bin_tone(3), 0, RateTag.FS2)
        assert measure_snr(x, x) == math.inf
        assert measure_snr(x, x) > 300
        assert measure_mse(x, x) == -math.inf
        assert snr_mse_consistency(x, x) == 0.0

    def test_known_noise(self, rng):
        n = 2**16
        x = SignalTrace(_bin_tone(11, K=n))
        noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * math.sqrt(1e-4 / 2)
        y = x.with_samples(x.samples + noise)
        assert measure_snr(y, x) == pytest.approx(40.0, abs=0.2)

    def test_identity(self, rng):
        x = SignalTrace(rng.standard_normal(500) + 1j * rng.standard_normal(500), 10)
        y = SignalTrace(x.samples[5:] + 0.01 * rng.standard_normal(495), 15)
        assert abs(snr_mse_consistency(y, x)) < 1e-9
        assert measure_snr(y, x) + measure_mse(y, x) == pytest.approx(mean_power_db(x, y), abs=1e-9)

    def test_power_three_offset(self, rng):
        """Mean signal power 3 puts SNR at -MSE + 4.77 dB."""
        m = np.arange(4096)
        x = SignalTrace(math.sqrt(3) * np.exp(1j * 2 * np.pi * np.mod(17 * m, 4096) / 4096))
        y = x.with_samples(x.samples + 1e-3 * (rng.standard_normal(4096) + 1j * rng.standard_normal(4096)))
        assert measure_snr(y, x) == pytest.approx(-measure_mse(y, x) + 4.77, abs=0.005)

    def test_joint_scale_invariance(self, rng):
        x = SignalTrace(rng.standard_normal(256) + 1j * rng.standard_normal(256))
        y = x.with_samples(x.samples + 0.05 * rng.standard_normal(256))
        scale = 3.5 * np.exp(0.4j)
        x2, y2 = x.with_samples(scale * x.samples), y.with_samples(scale * y.samples)
        assert measure_snr(y2, x2) == pytest.approx(measure_snr(y, x), abs=1e-9)

    def test_zero_reference(self):
        zero = SignalTrace(np.zeros(10))
        with pytest.raises(DomainError):
            measure_snr(SignalTrace(np.ones(10)), zero)

    def test_uses_common_range_only(self):
        x = SignalTrace(np.ones(20), 0)
        y = SignalTrace(np.concatenate([np.ones(10), np.full(10, 2.0)]), 10)
        # only indices 10..19 overlap, where y == x
        assert measure_snr(y, x) == math.inf


class TestMetricReport:
    """Combined report and its serialized form."""

    def test_report(self):
        x = SignalTrace(_bin_tone(7, length=2048) + 0.5 * _bin_tone(K - 30, length=2048), 4, RateTag.FS2)
        omegas = [math.pi * 7 / K, -math.pi * 30 / K]
        report = metric_report(x, x, x, K, omegas)
        assert report.snr_db == math.inf
        assert report.sfdr_db > 200
        assert report.tone_bins == [7, K - 30]
        assert report.valid_range == (4, 4 + 2048)
        data = report.to_dict()
        assert data["snr_db"] > SNR_CAP_DB
        assert data["mse_db"] < -SNR_CAP_DB
        assert data["tone_bins"] == [7, K - 30]

    def test_cap(self):
        assert cap_db(math.inf) == INFINITE_DB > SNR_CAP_DB
        assert cap_db(-math.inf) == -INFINITE_DB
        assert cap_db(12.5) == 12.5

    def test_dataclass_defaults(self):
        report = MetricReport(1.0, 2.0, 3.0)
        assert report.to_dict()["valid_range"] == [0, 0]
