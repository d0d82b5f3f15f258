"""
Batch operations behind the command line: design a bank, simulate one run,
sweep the filter order. Each writes its results through a ResultWriter into
config.output_dir and returns the in-memory results.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .analysis import MetricReport, cap_db, metric_report, periodogram, spectrum_rows
from .config import RunConfig, config_hash
from .core_model import FilterBank, RateTag, ReconstructionError, SignalTrace
from .designer import DesignProblem, design_bank, noise_gain, response_table
from .reconstructor import (build_polyphase, pad_for_full_output, polyphase_to_dict,
                            reconstruct_direct, reconstruct_polyphase, valid_output_range)
from .signal_lab import (NoiseSpec, add_noise, in_band_reference_power, sample_nonuniform,
                         sample_uniform)
from .tools.counters import TapUsageCounter
from .tools.export import ResultWriter

logger = logging.getLogger(__name__)

RESPONSE_POINTS = 2001


@dataclass
class DesignResult:
    bank: FilterBank
    diagnostics: list
    report: dict


@dataclass
class SimulationResult:
    bank: FilterBank
    v: SignalTrace
    y2_noiseless: SignalTrace
    y2_noisy: SignalTrace
    x2_ref: SignalTrace
    report: MetricReport
    counter: TapUsageCounter
    P_max: float


def _problem(config: RunConfig) -> DesignProblem:
    return DesignProblem(config.pattern, config.band, config.filter_order, config.ridge)


def _design(config: RunConfig):
    diagnostics = []
    bank = design_bank(_problem(config), diagnostics=diagnostics)
    return bank, diagnostics


def _design_report(config, bank, diagnostics):
    gains = noise_gain(bank)
    branches = [{
        "n": d.n,
        "error_P": d.error_P,
        "condition": d.condition,
        "residual": d.residual,
        "noise_gain": gains[d.n],
    } for d in diagnostics]
    return {
        "M": bank.M,
        "N": bank.N,
        "ridge": config.ridge,
        "band": bank.band.to_dict(),
        "designed_rows": sorted(bank.rows),
        "designed_subset": bank.designed_subset,
        "P_max": max(d.error_P for d in diagnostics),
        "branches": branches,
    }


def _response_grid(config: RunConfig):
    """Grid in units of pi covering the passband, its mirror and a margin of one bandwidth."""
    edge = config.band.omega2_T1 / math.pi + config.bandwidth_over_pi
    return np.linspace(-edge, edge, RESPONSE_POINTS)


def cmd_design(config: RunConfig) -> DesignResult:
    """Writes bank.json, polyphase.json, response_n<n>.csv per row and design_report.json."""
    writer = ResultWriter(config.output_dir, config_hash(config))
    bank, diagnostics = _design(config)
    report = _design_report(config, bank, diagnostics)

    writer.write_json("bank.json", bank.to_dict())
    writer.write_json("polyphase.json", polyphase_to_dict(build_polyphase(bank)))
    grid = _response_grid(config)
    for n, h in bank.rows.items():
        writer.write_csv(f"response_n{n}.csv", ["omega_over_pi", "mag_db", "phase_rad"],
                         response_table(h, bank.pattern, n, grid))
    writer.write_json("design_report.json", report)
    logger.info(f"Design written to {config.output_dir}: P_max={report['P_max']:.3e}")
    return DesignResult(bank, diagnostics, report)


def _reference_power(config: RunConfig, v_clean: SignalTrace) -> float:
    if config.noise_reference == "full_band":
        return float(np.mean(v_clean.samples ** 2))
    return in_band_reference_power(config.coherent_tones, config.band)


def _reconstruct(config, bank, poly, v, counter=None):
    """Runs the configured path and returns (y2 over the transient-free range, full y2)."""
    if config.full_output:
        padded, (m0, count) = pad_for_full_output(v, bank.N, poly.L)
    else:
        padded = v
        m0, count = valid_output_range(v, bank.N)
    if config.path == "direct":
        y2 = reconstruct_direct(padded, bank, config.band.omega_c_T1, counter)
    else:
        y2 = reconstruct_polyphase(padded, poly, counter)
    return y2.window(m0, m0 + count), y2


def run_simulation(config: RunConfig, bank=None, diagnostics=None) -> SimulationResult:
    """
    Noiseless pass for SFDR, noisy pass for SNR and MSE, both through the same
    bank and path. Tones are snapped to output-rate FFT bins.
    """
    if bank is None:
        bank, diagnostics = _design(config)
    P_max = max(d.error_P for d in diagnostics) if diagnostics else math.nan
    poly = build_polyphase(bank)
    tones = config.coherent_tones
    omega_c = config.band.omega_c_T1

    v_clean = sample_nonuniform(tones, omega_c, config.pattern, (0, config.simulation_length))
    if config.noise_enabled and math.isfinite(config.snr_db):
        spec = NoiseSpec(config.snr_db, config.seed)
        v_noisy = add_noise(v_clean, spec, _reference_power(config, v_clean))
    else:
        v_noisy = v_clean

    counter = TapUsageCounter(config.path)
    y2_clean, _ = _reconstruct(config, bank, poly, v_clean, counter)
    logger.debug(counter.summary())
    if v_noisy is v_clean:
        y2_noisy = y2_clean
    else:
        y2_noisy, _ = _reconstruct(config, bank, poly, v_noisy)

    x2 = sample_uniform(tones, RateTag.FS2, (y2_clean.start_index, y2_clean.end_index))
    report = metric_report(y2_clean, y2_noisy, x2, config.fft_length,
                           [t.omega for t in tones.tones], config.window)
    return SimulationResult(bank, v_noisy, y2_clean, y2_noisy, x2, report, counter, P_max)


def _metrics_payload(config, result: SimulationResult):
    payload = result.report.to_dict()
    outputs = max(len(result.y2_noiseless), 1)
    payload.update({
        "path": config.path,
        "M": config.pattern.M,
        "N": config.filter_order,
        "input_snr_db": cap_db(config.snr_db) if config.noise_enabled else None,
        "noise_reference": config.noise_reference,
        "P_max": result.P_max,
        "noise_gain": {str(n): g for n, g in noise_gain(result.bank).items()},
        "multiplies_per_output": result.counter.get_multiplies() / outputs,
        "full_output": config.full_output,
    })
    return payload


def cmd_simulate(config: RunConfig, traces=False) -> SimulationResult:
    """Writes metrics.json and spectrum.csv; with traces set also v.csv, y2.csv and x2.csv."""
    writer = ResultWriter(config.output_dir, config_hash(config))
    result = run_simulation(config)

    writer.write_json("metrics.json", _metrics_payload(config, result))
    spec = periodogram(result.y2_noisy, config.fft_length, config.window)
    writer.write_csv("spectrum.csv", ["omega_over_pi", "mag_db"], spectrum_rows(spec))
    if traces:
        writer.write_trace("v.csv", result.v)
        writer.write_trace("y2.csv", result.y2_noisy)
        writer.write_trace("x2.csv", result.x2_ref)
        if config.full_output:
            _, y2_full = _reconstruct(config, result.bank, build_polyphase(result.bank), result.v)
            m0 = result.y2_noisy.start_index
            writer.write_trace("y2_full.csv", y2_full, (m0, len(result.y2_noisy)))
    logger.info(f"Simulation written to {config.output_dir} ({config.path} path)")
    return result


def cmd_sweep(config: RunConfig, orders=None) -> list:
    """
    Designs and simulates every filter order in turn and writes sweep.csv.
    A failing order is recorded in the status column and the sweep goes on.
    """
    orders = list(orders if orders is not None else config.sweep_orders) or [config.filter_order]
    writer = ResultWriter(config.output_dir, config_hash(config))
    rows = []
    for N in orders:
        try:
            result = run_simulation(config.with_order(N))
            r = result.report
            rows.append((N, result.P_max, cap_db(r.sfdr_db), cap_db(r.snr_db), "ok"))
            logger.info(f"Sweep N={N}: P_max={result.P_max:.3e}, SFDR={r.sfdr_db:.2f} dB, SNR={r.snr_db:.2f} dB")
        except ReconstructionError as e:
            logger.warning(f"Sweep order N={N} failed: {e}")
            rows.append((N, "", "", "", f"error: {type(e).__name__}: {e}"))
    writer.write_csv("sweep.csv", ["N", "P_max", "sfdr_db", "snr_db", "status"], rows)
    return rows
