"""
Reconstruction of the complex baseband sequence y2(m) from v(n).

Two realizations share one contract:
  - reconstruct_direct: the time-varying convolution at the high rate fs1,
    followed by demodulation and downsampling by two.
  - reconstruct_polyphase: blocks of L input samples feed an (L/2) x L grid of
    low-rate FIR components; L = M for even M and 2M for odd M.
Outputs are indexed absolutely: y2(m) approximates x2(m) = x_c(2m).
"""
import logging
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core_model import (ConfigurationError, FilterBank, InputLengthError, RateTag, SignalTrace,
                         complex_list)

logger = logging.getLogger(__name__)

_PHASE_BITS = 26


def demodulator(omega_c_T1, n):
    """
    2*exp(-j wc n) for integer n. The carrier increment is reduced modulo one
    cycle and its coarse part is applied in integer arithmetic, so long runs and
    carriers far above pi keep full phase accuracy.
    """
    n = np.asarray(n, dtype=np.int64)
    cycles = omega_c_T1 / (2 * np.pi)
    frac = cycles - np.floor(cycles)
    scale = 1 << _PHASE_BITS
    coarse = int(round(frac * scale))
    fine = frac - coarse / scale
    phase = np.mod(n * coarse, scale) / scale + fine * n
    phase -= np.floor(phase)
    return 2.0 * np.exp(-2j * np.pi * phase)


@dataclass(frozen=True)
class BranchSchedule:
    """Branch filters consumed per output block, in output order."""
    branches: tuple

    @classmethod
    def for_period(cls, M):
        if M % 2 == 0:
            return cls(tuple(range(0, M, 2)))
        # downsampling by two visits 0, 2, ..., M-1, 1, 3, ..., M-2
        return cls(tuple((2 * q) % M for q in range(M)))

    def __len__(self):
        return len(self.branches)


@dataclass(frozen=True, eq=False)
class PolyphaseComponent:
    """Low-rate FIR P_{q,l}: taps[j] applies to block offset `offset + j`."""
    offset: int
    taps: np.ndarray

    @property
    def size(self):
        return self.taps.size


@dataclass(frozen=True, eq=False)
class PolyphaseBank:
    L: int
    M: int
    N: int
    schedule: BranchSchedule
    components: tuple  # components[q][l]
    latency: int
    omega_c_T1: float

    @property
    def tap_count(self):
        return sum(comp.size for row in self.components for comp in row)


def valid_output_range(v: SignalTrace, N: int):
    """(m0, count) of the fully windowed outputs y2(m) for a high-rate trace."""
    first = v.start_index + N // 2
    valid = len(v) - N
    if valid < 2:
        raise InputLengthError(f"Trace of {len(v)} samples is too short for filter order {N}")
    return -(-first // 2), valid // 2


def _required_rows(bank: FilterBank):
    schedule = BranchSchedule.for_period(bank.M)
    missing = [b for b in schedule.branches if b not in bank.rows]
    if missing:
        raise ConfigurationError(f"Bank for M={bank.M} is missing rows {missing} needed by schedule {schedule.branches}")
    return schedule


def reconstruct_direct(v: SignalTrace, bank: FilterBank, omega_c_T1: float, counter=None) -> SignalTrace:
    """
    y(n) = sum_k v(n-k) h_{n mod M}(k) at every fully windowed n, then
    y1(n) = 2 y(n) exp(-j wc n) and y2(m) = y1(2m).
    """
    _required_rows(bank)
    N = bank.N
    m0, count = valid_output_range(v, N)
    first = v.start_index + N // 2
    n_valid = np.arange(first, first + len(v) - N)

    windows = sliding_window_view(v.samples, N + 1)
    y = np.full(n_valid.size, np.nan + 0j, dtype=np.complex128)
    branch = np.mod(n_valid, bank.M)
    for r, h in bank.rows.items():
        sel = branch == r
        y[sel] = windows[sel] @ h[::-1]
        if counter is not None:
            counter.record(r, N + 1, int(sel.sum()))

    computed = ~np.isnan(y.real)
    y1 = np.full_like(y, np.nan)
    y1[computed] = demodulator(omega_c_T1, n_valid[computed]) * y[computed]

    n_out = 2 * (m0 + np.arange(count))
    y2 = y1[n_out - first]
    if counter is not None:
        counter.record_extra(int(computed.sum()))
        counter.log_branches(np.mod(n_out, bank.M))
    logger.debug(f"Direct path: {count} outputs from {len(v)} samples, N={N}, M={bank.M}")
    return SignalTrace(y2, m0, RateTag.FS2)


def build_polyphase(bank: FilterBank) -> PolyphaseBank:
    """
    Splits each advanced branch filter z^{2q} G_{2q}(z) into L polyphase components.
    G_{2q} is h_{2q mod M}: the even rows for even M, and for odd M the rows in
    the order 0, 2, ..., M-1, 1, 3, ..., M-2.
    """
    schedule = _required_rows(bank)
    M, N = bank.M, bank.N
    L = M if M % 2 == 0 else 2 * M
    half = N // 2
    k = bank.taps

    components = []
    for q, b in enumerate(schedule.branches):
        g = bank.rows[b]
        row = []
        for l in range(L):
            sel = np.mod(k - 2 * q + l, L) == 0
            ks = k[sel]
            if ks.size:
                offset = int((ks[0] - 2 * q + l) // L)
            else:
                offset = 0
            row.append(PolyphaseComponent(offset, g[ks + half].copy()))
        components.append(tuple(row))

    offsets = [comp.offset for row in components for comp in row if comp.size]
    latency = max(0, -min(offsets)) * L
    poly = PolyphaseBank(L=L, M=M, N=N, schedule=schedule, components=tuple(components),
                         latency=latency, omega_c_T1=bank.band.omega_c_T1)

    expected = len(schedule) * (N + 1)
    if poly.tap_count != expected:
        raise ConfigurationError(f"Polyphase split kept {poly.tap_count} taps, expected {expected}")
    logger.debug(f"Polyphase bank: L={L}, schedule={schedule.branches}, latency={latency}")
    return poly


def reconstruct_polyphase(v: SignalTrace, poly: PolyphaseBank, counter=None, strict=False) -> SignalTrace:
    """
    Low-rate realization. The input is cut to whole blocks of L samples aligned
    to absolute multiples of L; with strict set a misaligned input is an error.
    """
    L = poly.L
    if strict and (v.start_index % L or len(v) % L):
        raise InputLengthError(f"Trace [{v.start_index}, {v.end_index}) is not aligned to blocks of {L}")
    b_first = -(-v.start_index // L)
    b_end = v.end_index // L
    nb = b_end - b_first
    if nb <= 0:
        raise InputLengthError(f"Trace of {len(v)} samples holds no complete block of {L}")
    trimmed = v.window(b_first * L, b_end * L)
    if len(trimmed) != len(v):
        logger.debug(f"Trimmed input from {len(v)} to {len(trimmed)} samples for block size {L}")
    m0, count = valid_output_range(trimmed, poly.N)

    streams = trimmed.samples.reshape(nb, L).T  # streams[l][i] = v((b_first + i) L + l)
    n_out = 2 * (m0 + np.arange(count))
    phase = np.mod(n_out, L) // 2
    block = n_out // L

    y = np.zeros(count, dtype=np.complex128)
    for q, row in enumerate(poly.components):
        sel = phase == q
        if not sel.any():
            continue
        for l, comp in enumerate(row):
            if not comp.size:
                continue
            conv = np.convolve(streams[l], comp.taps)
            y[sel] += conv[block[sel] - comp.offset - b_first]
            if counter is not None:
                counter.record(poly.schedule.branches[q], comp.size, int(sel.sum()))

    y2 = demodulator(poly.omega_c_T1, n_out) * y
    if counter is not None:
        counter.record_extra(count)
        counter.log_branches(np.asarray(poly.schedule.branches)[phase])
    logger.debug(f"Polyphase path: {count} outputs from {nb} blocks of {L}")
    return SignalTrace(y2, m0, RateTag.FS2)


def pad_for_full_output(v: SignalTrace, N: int, L: int):
    """
    Zero-pads v by N/2 samples on each side (rounded out to whole blocks) so the
    output covers the whole input span. Returns the padded trace and the
    transient-free output range (m0, count) of the unpadded input.
    """
    m0, count = valid_output_range(v, N)
    half = N // 2
    start = ((v.start_index - half) // L) * L
    stop = -(-(v.end_index + half) // L) * L
    samples = np.zeros(stop - start, dtype=v.samples.dtype)
    samples[v.start_index - start:v.end_index - start] = v.samples
    return SignalTrace(samples, start, v.rate_tag), (m0, count)


def polyphase_to_dict(poly: PolyphaseBank) -> dict:
    return {
        "L": poly.L,
        "M": poly.M,
        "N": poly.N,
        "schedule": list(poly.schedule.branches),
        "latency": poly.latency,
        "omega_c_T1": poly.omega_c_T1,
        "components": [[{"offset": comp.offset, "taps": complex_list(comp.taps)} for comp in row]
                       for row in poly.components],
    }
