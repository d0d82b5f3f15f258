"""
Synthetic multitone test signals and the sampling front end.

Continuous-time signals are kept as tone lists and evaluated analytically,
so nonuniform sampling carries no interpolation error.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core_model import (BandSpec, ConfigurationError, DomainError, RateTag, SamplingPattern,
                         SignalTrace)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tone:
    amplitude: float
    phase: float
    omega: float  # normalized baseband frequency, rad per T1


@dataclass(frozen=True)
class MultitoneSignal:
    """x_c(tau) = sum_i A_i exp(j(Omega_i tau + phi_i)), tau = t/T1."""
    tones: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))

    def to_dict(self):
        return {"tones": [{"amplitude": t.amplitude, "phase": t.phase, "omega_over_pi": t.omega / math.pi}
                          for t in self.tones]}


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float
    seed: int = 0

    @property
    def enabled(self):
        return math.isfinite(self.snr_db)


def default_multitone() -> MultitoneSignal:
    """Four in-band tones used by the design-example run."""
    freqs = (-0.3, -0.1, 0.1, 0.3)
    amps = (1.0, 0.5, 0.5, 0.5)
    return MultitoneSignal(tuple(Tone(a, 0.0, f * math.pi) for a, f in zip(amps, freqs)))


def signal_power(sig: MultitoneSignal) -> float:
    """Mean power of x_c; exact when tone frequencies are distinct."""
    return float(sum(t.amplitude ** 2 for t in sig.tones))


def check_in_band(sig: MultitoneSignal, band: BandSpec):
    """Rejects tones that fall outside |Omega| < B_T1/2."""
    for i, tone in enumerate(sig.tones):
        if abs(tone.omega) >= band.B_T1 / 2:
            raise ConfigurationError(
                f"Tone {i} at {tone.omega / math.pi:.4g}*pi lies outside the band half-width "
                f"{band.B_T1 / (2 * math.pi):.4g}*pi")


def snap_to_bins(sig: MultitoneSignal, K: int) -> MultitoneSignal:
    """
    Moves every tone onto an exact bin of a K-point FFT at the output rate
    fs2 = fs1/2, i.e. Omega = pi*k/K.
    """
    snapped = []
    for tone in sig.tones:
        k = round(tone.omega * K / math.pi)
        snapped.append(Tone(tone.amplitude, tone.phase, math.pi * k / K))
    return MultitoneSignal(tuple(snapped))


def eval_baseband(sig: MultitoneSignal, tau):
    """Complex baseband value at normalized time(s) tau."""
    tau = np.asarray(tau, dtype=np.float64)
    out = np.zeros(tau.shape, dtype=np.complex128)
    for tone in sig.tones:
        out += tone.amplitude * np.exp(1j * (tone.omega * tau + tone.phase))
    return out if out.ndim else complex(out)


def eval_bandpass(sig: MultitoneSignal, omega_c_T1: float, tau):
    """Real bandpass value Re{x_c(tau) exp(j wc tau)}, evaluated tone by tone."""
    tau = np.asarray(tau, dtype=np.float64)
    out = np.zeros(tau.shape, dtype=np.float64)
    for tone in sig.tones:
        out += tone.amplitude * np.cos((tone.omega + omega_c_T1) * tau + tone.phase)
    return out if out.ndim else float(out)


def sample_uniform(sig: MultitoneSignal, rate_tag, index_range) -> SignalTrace:
    """x1(n) = x_c(n) at fs1, or x2(m) = x_c(2m) at fs2."""
    rate_tag = RateTag(rate_tag)
    start, stop = index_range
    idx = np.arange(start, stop)
    tau = idx if rate_tag is RateTag.FS1 else 2 * idx
    return SignalTrace(eval_baseband(sig, tau.astype(np.float64)), start, rate_tag)


def sample_nonuniform(sig: MultitoneSignal, omega_c_T1: float, pattern: SamplingPattern, n_range) -> SignalTrace:
    """v(n) = x_r(n + d_n): the interleaved output of an M-channel TI-ADC."""
    start, stop = n_range
    n = np.arange(start, stop)
    tau = n + pattern.skew_array(n)
    v = eval_bandpass(sig, omega_c_T1, tau)
    logger.debug(f"Sampled {v.size} nonuniform samples, M={pattern.M}, n0={start}")
    return SignalTrace(np.atleast_1d(v), start, RateTag.FS1)


def add_noise(trace: SignalTrace, spec: NoiseSpec, reference_power: float) -> SignalTrace:
    """
    Adds white Gaussian noise with variance reference_power * 10^(-snr/10).
    Real traces get real noise, complex traces circular complex noise. An
    infinite snr_db disables the noise.
    """
    if not reference_power > 0:
        raise DomainError(f"Reference power must be positive, got {reference_power}")
    if not spec.enabled:
        return trace

    variance = reference_power * 10 ** (-spec.snr_db / 10)
    rng = np.random.default_rng(spec.seed)
    if trace.is_complex:
        noise = (rng.standard_normal(len(trace)) + 1j * rng.standard_normal(len(trace))) * math.sqrt(variance / 2)
    else:
        noise = rng.standard_normal(len(trace)) * math.sqrt(variance)
    logger.debug(f"Added noise at {spec.snr_db} dB SNR (variance {variance:.3e}, seed {spec.seed})")
    return trace.with_samples(trace.samples + noise)


def in_band_reference_power(sig: MultitoneSignal, band: BandSpec) -> float:
    """
    Noise reference power that refers the SNR to the signal band: white noise of
    this variance on v(n) leaves the same SNR after an ideal reconstructor.
    """
    return signal_power(sig) * math.pi / (2 * band.B_T1)
