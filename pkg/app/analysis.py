"""
Reconstruction quality metrics: periodogram, SFDR, SNR and MSE.

Metric functions return +inf/-inf for error-free inputs; writers cap them
when serializing.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .core_model import (DegenerateMeasurementError, DomainError, InputLengthError, SignalTrace,
                         overlap)

logger = logging.getLogger(__name__)

SNR_CAP_DB = 300.0
INFINITE_DB = SNR_CAP_DB + 1.0
_FLOOR_DB = -400.0


@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    """
    Bin k of a K-point FFT at the output rate; freqs_over_pi is omega*T2/pi in
    [-1, 1) and mag_db is relative to the strongest bin. Arrays are in FFT order.
    """
    freqs_over_pi: np.ndarray
    mag_db: np.ndarray
    window: str
    K: int


@dataclass
class MetricReport:
    snr_db: float
    sfdr_db: float
    mse_db: float
    tone_bins: list = field(default_factory=list)
    valid_range: tuple = (0, 0)

    def to_dict(self):
        return {
            "snr_db": cap_db(self.snr_db),
            "sfdr_db": cap_db(self.sfdr_db),
            "mse_db": cap_db(self.mse_db),
            "tone_bins": [int(b) for b in self.tone_bins],
            "valid_range": [int(self.valid_range[0]), int(self.valid_range[1])],
        }


def cap_db(value):
    """
    Finite stand-in for infinite dB values in JSON and CSV. An error-free pair
    is reported one dB beyond the cap so it reads as exceeding it.
    """
    if math.isinf(value):
        return INFINITE_DB if value > 0 else -INFINITE_DB
    return float(value)


def _is_power_of_two(K):
    return K > 0 and K & (K - 1) == 0


def periodogram(trace: SignalTrace, K: int, window="rectangular") -> SpectrumEstimate:
    """Magnitude spectrum of the first K samples, normalized so the peak bin is 0 dB."""
    if not _is_power_of_two(K):
        raise DomainError(f"FFT length must be a power of two, got {K}")
    if len(trace) < K:
        raise InputLengthError(f"Trace of {len(trace)} samples is shorter than FFT length {K}")
    if window == "rectangular":
        w = np.ones(K)
    elif window == "hann":
        w = signal.get_window("hann", K, fftbins=True)
    else:
        raise DomainError(f"Unknown window '{window}'")

    mag = np.abs(np.fft.fft(trace.samples[:K] * w))
    peak = mag.max()
    if peak == 0:
        raise DegenerateMeasurementError("Cannot normalize the spectrum of an all-zero segment")
    with np.errstate(divide="ignore"):
        mag_db = 20 * np.log10(mag / peak)
    mag_db = np.maximum(mag_db, _FLOOR_DB)
    return SpectrumEstimate(np.fft.fftfreq(K) * 2, mag_db, window, K)


def tone_bins(omegas, K):
    """FFT bins of baseband tones Omega (rad per T1) at the output rate fs1/2."""
    return sorted({int(round(w * K / math.pi)) % K for w in omegas})


def measure_sfdr(spec: SpectrumEstimate, tone_bins) -> float:
    """Strongest tone bin over strongest bin farther than one bin from every tone."""
    if not len(tone_bins):
        raise DegenerateMeasurementError("SFDR needs at least one tone bin")
    K = spec.K
    bins = np.mod(np.asarray(tone_bins, dtype=np.int64), K)
    excluded = np.zeros(K, dtype=bool)
    for offset in (-1, 0, 1):
        excluded[np.mod(bins + offset, K)] = True
    if excluded.all():
        raise DegenerateMeasurementError("Every bin lies next to a tone; no spur bin is left")
    tone_level = spec.mag_db[bins].max()
    spur_level = spec.mag_db[~excluded].max()
    return float(tone_level - spur_level)


def _aligned_error(y2, x2_ref):
    y, x = overlap(y2, x2_ref)
    ref = np.asarray(x.samples, dtype=np.complex128)
    err = np.asarray(y.samples, dtype=np.complex128) - ref
    ref_energy = float(np.sum(np.abs(ref) ** 2))
    if ref_energy == 0:
        raise DomainError("Reference trace has zero power")
    return ref, err, ref_energy


def measure_snr(y2: SignalTrace, x2_ref: SignalTrace) -> float:
    """10 log10(sum |x2|^2 / sum |y2 - x2|^2) over the common index range."""
    _, err, ref_energy = _aligned_error(y2, x2_ref)
    err_energy = float(np.sum(np.abs(err) ** 2))
    if err_energy == 0:
        return math.inf
    return 10 * math.log10(ref_energy / err_energy)


def measure_mse(y2: SignalTrace, x2_ref: SignalTrace) -> float:
    """10 log10(mean |y2 - x2|^2)."""
    _, err, _ = _aligned_error(y2, x2_ref)
    mse = float(np.mean(np.abs(err) ** 2))
    if mse == 0:
        return -math.inf
    return 10 * math.log10(mse)


def mean_power_db(x2_ref: SignalTrace, y2: SignalTrace = None) -> float:
    """Mean reference power in dB, over the range shared with y2 when given."""
    if y2 is not None:
        _, x2_ref = overlap(y2, x2_ref)
    power = float(np.mean(np.abs(np.asarray(x2_ref.samples)) ** 2))
    if power == 0:
        raise DomainError("Reference trace has zero power")
    return 10 * math.log10(power)


def snr_mse_consistency(y2: SignalTrace, x2_ref: SignalTrace) -> float:
    """SNR + MSE - 10 log10(mean signal power); zero up to round-off."""
    snr = measure_snr(y2, x2_ref)
    mse = measure_mse(y2, x2_ref)
    if math.isinf(snr):
        return 0.0
    return snr + mse - mean_power_db(x2_ref, y2)


def metric_report(noiseless_y2, noisy_y2, x2_ref, K, omegas, window="rectangular") -> MetricReport:
    """SFDR from the noiseless run, SNR and MSE from the noisy run."""
    bins = tone_bins(omegas, K)
    sfdr = measure_sfdr(periodogram(noiseless_y2, K, window), bins)
    snr = measure_snr(noisy_y2, x2_ref)
    mse = measure_mse(noisy_y2, x2_ref)
    y, _ = overlap(noisy_y2, x2_ref)
    logger.info(f"Metrics: SFDR {sfdr:.2f} dB, SNR {snr:.2f} dB, MSE {mse:.2f} dB")
    return MetricReport(snr, sfdr, mse, bins, (y.start_index, y.end_index))


def spectrum_rows(spec: SpectrumEstimate):
    """(omega_over_pi, mag_db) rows sorted by frequency."""
    order = np.argsort(spec.freqs_over_pi, kind="stable")
    return [(float(spec.freqs_over_pi[i]), float(spec.mag_db[i])) for i in order]
