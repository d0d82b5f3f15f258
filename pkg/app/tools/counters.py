import logging
from collections import Counter

import numpy as np

logger = logging.getLogger(__name__)


class TapUsageCounter:
    """Tracks multiplications, per-branch tap usage and branch order for one reconstruction run."""
    def __init__(self, label=""):
        self.label = label
        self._multiplies = 0
        self._tap_usage = Counter()
        self._branch_sequence = []

    def record(self, branch, taps, outputs):
        """One branch filter with `taps` coefficients produced `outputs` samples."""
        if outputs <= 0 or taps <= 0:
            return
        self._multiplies += taps * outputs
        self._tap_usage[branch] += taps * outputs

    def record_extra(self, multiplies):
        """Multiplications outside the branch filters (modulation, scaling)."""
        self._multiplies += multiplies

    def log_branches(self, branches):
        """Appends the branch index used for each retained output, in output order."""
        self._branch_sequence.extend(int(b) for b in branches)

    def get_multiplies(self) -> int:
        return self._multiplies

    def get_tap_usage(self, branch) -> int:
        return self._tap_usage.get(branch, 0)

    def get_used_branches(self) -> list:
        return sorted(b for b, used in self._tap_usage.items() if used)

    def get_branch_sequence(self) -> np.ndarray:
        return np.array(self._branch_sequence, dtype=np.int64)

    def summary(self) -> str:
        return f"{self.label or 'run'}: {self._multiplies} multiplies, branches {self.get_used_branches()}"

    def reset(self):
        self._multiplies = 0
        self._tap_usage.clear()
        self._branch_sequence = []
        logger.debug(f"Counter '{self.label}' reset")
