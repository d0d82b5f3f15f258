"""
Shared domain types for nonuniform bandpass sampling and reconstruction.

All frequencies are normalized products omega*T1 (radians); skews are
fractions of T1. T1 itself is never stored.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np


# --- Exceptions ---

class ReconstructionError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ReconstructionError, ValueError):
    """A value lies outside the domain an operation accepts."""


class ConfigurationError(ReconstructionError, ValueError):
    """Inconsistent configuration, bank or pattern."""


class InputLengthError(ReconstructionError, ValueError):
    """A trace is too short or does not fit the block structure."""


class DegenerateMeasurementError(ReconstructionError, ValueError):
    """A metric cannot be measured on the given data."""


class SingularSystemError(ReconstructionError, ArithmeticError):
    """The Gram system of a branch could not be factorized."""

    def __init__(self, branch, message):
        super().__init__(f"branch {branch}: {message}")
        self.branch = branch


# Offsets below this are treated as exactly zero in the closed-form entries.
ZERO_OFFSET_TOL = 1e-12


def _frozen_array(values, dtype):
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


# --- Sampling pattern ---

@dataclass(frozen=True)
class SamplingPattern:
    """M-periodic time skews d_0..d_{M-1} of the nonuniform sampling grid."""
    M: int
    skews: tuple

    def __post_init__(self):
        if not isinstance(self.M, (int, np.integer)) or self.M < 1:
            raise ConfigurationError(f"Sampling period M must be a positive integer, got {self.M!r}")
        skews = tuple(float(d) for d in self.skews)
        if len(skews) != self.M:
            raise ConfigurationError(f"Expected {self.M} skews, got {len(skews)}")
        for i, d in enumerate(skews):
            if not math.isfinite(d) or abs(d) >= 1.0:
                raise ConfigurationError(f"Skew d_{i}={d} violates |d_n| < 1")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "skews", skews)

    @classmethod
    def uniform(cls, M=1):
        return cls(M, (0.0,) * M)

    def skew_array(self, n):
        """Vectorized skew_at for an integer array."""
        return np.asarray(self.skews)[np.mod(np.asarray(n, dtype=np.int64), self.M)]

    def to_dict(self):
        return {"M": self.M, "skews": list(self.skews)}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(int(data["M"]), tuple(data["skews"]))
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Invalid sampling pattern: {e}") from e


def skew_at(pattern: SamplingPattern, n: int) -> float:
    """Skew of sampling instant n, extended periodically (n may be negative)."""
    # Python's % already gives a result in [0, M)
    return pattern.skews[n % pattern.M]


# --- Band ---

@dataclass(frozen=True)
class BandSpec:
    """Normalized carrier and two-sided bandwidth of the real bandpass signal."""
    omega_c_T1: float
    B_T1: float

    @property
    def omega1_T1(self):
        return self.omega_c_T1 - self.B_T1 / 2

    @property
    def omega2_T1(self):
        return self.omega_c_T1 + self.B_T1 / 2

    @property
    def width(self):
        return self.omega2_T1 - self.omega1_T1

    @classmethod
    def from_normalized(cls, omega_c_over_pi, bandwidth_over_pi):
        return cls(float(omega_c_over_pi) * math.pi, float(bandwidth_over_pi) * math.pi)

    def to_dict(self):
        return {"omega_c_T1": self.omega_c_T1, "B_T1": self.B_T1}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(float(data["omega_c_T1"]), float(data["B_T1"]))
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Invalid band: {e}") from e


def validate_band(band: BandSpec) -> list:
    """Returns the list of violated band invariants (empty when the band is usable)."""
    violations = []
    if not (math.isfinite(band.omega_c_T1) and math.isfinite(band.B_T1)):
        violations.append("band values must be finite")
        return violations
    if not 0.0 < band.B_T1 < math.pi:
        violations.append(f"B_T1 must satisfy 0 < B_T1 < pi (fs1 > 2B), got {band.B_T1 / math.pi:.4g}*pi")
    if not band.omega1_T1 > 0.0:
        violations.append(f"omega1_T1 must be > 0 (band must not touch DC), got {band.omega1_T1 / math.pi:.4g}*pi")
    return violations


def require_valid_band(band: BandSpec):
    violations = validate_band(band)
    if violations:
        raise DomainError("Invalid band: " + "; ".join(violations))


# --- Filter bank ---

@dataclass(frozen=True, eq=False)
class FilterBank:
    """
    Rows h_n(k), k = -N/2..N/2, of the M-periodic time-varying FIR filter.
    `rows` maps branch index n to its N+1 complex coefficients; with
    designed_subset only the even rows of an even-M pattern are present.
    """
    M: int
    N: int
    rows: dict
    band: BandSpec
    pattern: SamplingPattern
    designed_subset: bool = False

    def __post_init__(self):
        if self.N < 2 or self.N % 2:
            raise ConfigurationError(f"Filter order N must be even and positive, got {self.N}")
        if self.M != self.pattern.M:
            raise ConfigurationError(f"Bank period {self.M} does not match pattern period {self.pattern.M}")
        frozen = {}
        for n, h in self.rows.items():
            n = int(n)
            if not 0 <= n < self.M:
                raise ConfigurationError(f"Row index {n} outside 0..{self.M - 1}")
            h = _frozen_array(h, np.complex128)
            if h.shape != (self.N + 1,):
                raise ConfigurationError(f"Row {n} has {h.size} taps, expected {self.N + 1}")
            frozen[n] = h
        if self.designed_subset:
            if self.M % 2:
                raise ConfigurationError("designed_subset requires an even period M")
            odd = [n for n in frozen if n % 2]
            if odd:
                raise ConfigurationError(f"designed_subset bank carries odd rows {odd}")
        object.__setattr__(self, "rows", dict(sorted(frozen.items())))

    @property
    def taps(self):
        """Tap indices k = -N/2..N/2."""
        return np.arange(-(self.N // 2), self.N // 2 + 1)

    def row(self, n):
        try:
            return self.rows[n % self.M]
        except KeyError:
            raise ConfigurationError(f"Bank has no row for branch {n % self.M}") from None

    def to_dict(self):
        return {
            "M": self.M,
            "N": self.N,
            "designed_subset": self.designed_subset,
            "band": self.band.to_dict(),
            "pattern": self.pattern.to_dict(),
            "rows": {str(n): complex_list(h) for n, h in self.rows.items()},
        }

    @classmethod
    def from_dict(cls, data):
        try:
            rows = {int(n): complex_array(vals) for n, vals in data["rows"].items()}
            return cls(
                M=int(data["M"]),
                N=int(data["N"]),
                rows=rows,
                band=BandSpec.from_dict(data["band"]),
                pattern=SamplingPattern.from_dict(data["pattern"]),
                designed_subset=bool(data.get("designed_subset", False)),
            )
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Invalid filter bank: {e}") from e


def complex_list(values):
    return [{"re": float(z.real), "im": float(z.imag)} for z in np.asarray(values, dtype=np.complex128)]


def complex_array(items):
    return np.array([complex(item["re"], item["im"]) for item in items], dtype=np.complex128)


# --- Signal traces ---

class RateTag(str, enum.Enum):
    FS1 = "fs1"
    FS2 = "fs2"


@dataclass(frozen=True, eq=False)
class SignalTrace:
    """Sample i holds the value at absolute index start_index + i."""
    samples: np.ndarray
    start_index: int = 0
    rate_tag: RateTag = RateTag.FS1

    def __post_init__(self):
        arr = np.array(self.samples)
        if arr.ndim != 1:
            raise ConfigurationError("Trace samples must be one-dimensional")
        if not (np.issubdtype(arr.dtype, np.floating) or np.issubdtype(arr.dtype, np.complexfloating)):
            arr = arr.astype(np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "start_index", int(self.start_index))
        object.__setattr__(self, "rate_tag", RateTag(self.rate_tag))

    def __len__(self):
        return self.samples.size

    @property
    def end_index(self):
        """One past the last absolute index."""
        return self.start_index + self.samples.size

    @property
    def is_complex(self):
        return np.iscomplexobj(self.samples)

    def indices(self):
        return np.arange(self.start_index, self.end_index)

    def window(self, start, stop):
        """Sub-trace over absolute indices [start, stop), clipped to the stored range."""
        lo = max(start, self.start_index)
        hi = min(stop, self.end_index)
        if hi < lo:
            hi = lo
        return SignalTrace(self.samples[lo - self.start_index:hi - self.start_index], lo, self.rate_tag)

    def with_samples(self, samples):
        return SignalTrace(samples, self.start_index, self.rate_tag)


def overlap(a: SignalTrace, b: SignalTrace):
    """Returns the two traces cut to their common absolute index range."""
    lo = max(a.start_index, b.start_index)
    hi = min(a.end_index, b.end_index)
    if hi <= lo:
        raise InputLengthError("Traces do not overlap")
    return a.window(lo, hi), b.window(lo, hi)
