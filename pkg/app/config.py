"""
Run configuration: JSON file with frequencies normalized by pi, merged over
the design-example defaults in app/data/example_config.json.
"""
import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace

from .core_model import BandSpec, ConfigurationError, SamplingPattern, validate_band
from .signal_lab import MultitoneSignal, Tone, check_in_band, snap_to_bins

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(__file__), "data", "example_config.json")

PATHS = ("direct", "polyphase")
WINDOWS = ("rectangular", "hann")
NOISE_REFERENCES = ("in_band", "full_band")


@dataclass(frozen=True)
class RunConfig:
    pattern: SamplingPattern
    omega_c_over_pi: float
    bandwidth_over_pi: float
    filter_order: int
    ridge: float
    tones: MultitoneSignal
    snr_db: float
    seed: int
    noise_enabled: bool
    noise_reference: str
    simulation_length: int
    fft_length: int
    window: str = "rectangular"
    path: str = "polyphase"
    sweep_orders: tuple = field(default_factory=tuple)
    output_dir: str = "out"
    full_output: bool = False

    @property
    def band(self) -> BandSpec:
        return BandSpec.from_normalized(self.omega_c_over_pi, self.bandwidth_over_pi)

    @property
    def block_size(self):
        M = self.pattern.M
        return M if M % 2 == 0 else 2 * M

    @property
    def coherent_tones(self) -> MultitoneSignal:
        """Tones moved onto exact FFT bins of the output rate."""
        return snap_to_bins(self.tones, self.fft_length)

    def with_order(self, N):
        return replace(self, filter_order=int(N))

    def to_dict(self):
        return {
            "pattern": self.pattern.to_dict(),
            "band": {"omega_c_over_pi": self.omega_c_over_pi, "bandwidth_over_pi": self.bandwidth_over_pi},
            "filter_order": self.filter_order,
            "ridge": self.ridge,
            "tones": self.tones.to_dict()["tones"],
            "noise": {
                "snr_db": self.snr_db if math.isfinite(self.snr_db) else None,
                "seed": self.seed,
                "enabled": self.noise_enabled,
                "reference": self.noise_reference,
            },
            "simulation_length": self.simulation_length,
            "fft_length": self.fft_length,
            "window": self.window,
            "path": self.path,
            "sweep_orders": list(self.sweep_orders),
            "full_output": self.full_output,
            "output_dir": self.output_dir,
        }


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the canonical resolved configuration (output_dir excluded)."""
    data = config.to_dict()
    data.pop("output_dir")
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _read_json(path):
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"Config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config file {path} is not valid JSON: {e}") from e


def _merge(defaults, overrides):
    merged = dict(defaults)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def config_from_dict(data: dict) -> RunConfig:
    """Builds a RunConfig from raw JSON data merged over the defaults, then validates it."""
    raw = _merge(_read_json(DEFAULT_CONFIG_PATH), data)
    try:
        pattern = SamplingPattern.from_dict(raw["pattern"])
        tones = MultitoneSignal(tuple(
            Tone(float(t["amplitude"]), float(t.get("phase", 0.0)), float(t["omega_over_pi"]) * math.pi)
            for t in raw["tones"]))
        noise = raw["noise"]
        snr = noise.get("snr_db")
        config = RunConfig(
            pattern=pattern,
            omega_c_over_pi=float(raw["band"]["omega_c_over_pi"]),
            bandwidth_over_pi=float(raw["band"]["bandwidth_over_pi"]),
            filter_order=int(raw["filter_order"]),
            ridge=float(raw.get("ridge", 0.0)),
            tones=tones,
            snr_db=math.inf if snr is None else float(snr),
            seed=int(noise.get("seed", 0)),
            noise_enabled=bool(noise.get("enabled", True)),
            noise_reference=str(noise.get("reference", "full_band")),
            simulation_length=int(raw["simulation_length"]),
            fft_length=int(raw["fft_length"]),
            window=str(raw.get("window", "rectangular")),
            path=str(raw.get("path", "polyphase")),
            sweep_orders=tuple(int(n) for n in raw.get("sweep_orders", ())),
            output_dir=str(raw.get("output_dir", "out")),
            full_output=bool(raw.get("full_output", False)),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ConfigurationError):
            raise
        raise ConfigurationError(f"Invalid run configuration: {e!r}") from e
    return resolve(config)


def load_config(config_path=None, **overrides) -> RunConfig:
    """Loads a config file (or the defaults) and applies command-line overrides."""
    data = _read_json(config_path) if config_path else {}
    config = config_from_dict(data)
    changes = {key: value for key, value in overrides.items() if value is not None}
    if changes:
        config = resolve(replace(config, **changes))
    logger.info(f"Loaded run configuration{' from ' + str(config_path) if config_path else ' (defaults)'}")
    return config


def resolve(config: RunConfig) -> RunConfig:
    """Cross-validates the configuration and rounds the simulation length to whole blocks."""
    violations = validate_band(config.band)
    if violations:
        raise ConfigurationError("Invalid band: " + "; ".join(violations))
    N = config.filter_order
    if N < 2 or N % 2:
        raise ConfigurationError(f"filter_order must be an even positive integer, got {N}")
    for order in config.sweep_orders:
        if order < 2 or order % 2:
            raise ConfigurationError(f"sweep order {order} must be an even positive integer")
    if config.ridge < 0 or not math.isfinite(config.ridge):
        raise ConfigurationError(f"ridge must be finite and nonnegative, got {config.ridge}")
    if config.path not in PATHS:
        raise ConfigurationError(f"path must be one of {PATHS}, got '{config.path}'")
    if config.window not in WINDOWS:
        raise ConfigurationError(f"window must be one of {WINDOWS}, got '{config.window}'")
    if config.noise_reference not in NOISE_REFERENCES:
        raise ConfigurationError(f"noise reference must be one of {NOISE_REFERENCES}, got '{config.noise_reference}'")
    K = config.fft_length
    if K <= 0 or K & (K - 1):
        raise ConfigurationError(f"fft_length must be a power of two, got {K}")
    if not config.tones.tones:
        raise ConfigurationError("At least one tone is required")
    check_in_band(config.tones, config.band)
    check_in_band(config.coherent_tones, config.band)

    L = config.block_size
    length = -(-config.simulation_length // L) * L
    longest = max((N,) + tuple(config.sweep_orders))
    if (length - longest) // 2 < K:
        raise ConfigurationError(
            f"simulation_length {config.simulation_length} leaves fewer than fft_length={K} "
            f"transient-free outputs at filter order {longest}")
    if length != config.simulation_length:
        logger.debug(f"Rounded simulation length {config.simulation_length} up to {length} (block size {L})")
        config = replace(config, simulation_length=length)
    return config
