import csv
import json
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)


class ResultWriter:
    """Writes JSON and CSV results into one output directory, stamping each file with the config hash."""
    def __init__(self, output_dir, config_hash):
        self._output_dir = output_dir
        self._config_hash = config_hash
        self._written = []

    def get_output_dir(self):
        return self._output_dir

    def get_written(self):
        return list(self._written)

    def _path(self, name):
        os.makedirs(self._output_dir, exist_ok=True)
        return os.path.join(self._output_dir, name)

    def write_json(self, name, data):
        payload = dict(data)
        payload["config_hash"] = self._config_hash
        path = self._path(name)
        with open(path, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        self._written.append(path)
        logger.debug(f"Wrote {path}")
        return path

    def write_csv(self, name, header, rows):
        path = self._path(name)
        with open(path, "w", newline="") as f:
            f.write(f"# config_hash={self._config_hash}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(value) for value in row])
        self._written.append(path)
        logger.debug(f"Wrote {path}")
        return path

    def write_trace(self, name, trace, valid_range=None):
        """CSV of (index, re, im); with valid_range set, a transient column flags samples outside it."""
        idx = trace.indices()
        samples = np.asarray(trace.samples, dtype=np.complex128)
        if valid_range is None:
            rows = zip(idx, samples.real, samples.imag)
            return self.write_csv(name, ["index", "re", "im"], rows)
        m0, count = valid_range
        transient = (idx < m0) | (idx >= m0 + count)
        rows = zip(idx, samples.real, samples.imag, transient.astype(int))
        return self.write_csv(name, ["index", "re", "im", "transient"], rows)


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def read_csv(path):
    """Reads a result CSV back as (config_hash, header, rows of strings)."""
    with open(path, "r", newline="") as f:
        first = f.readline().strip()
        if not first.startswith("# config_hash="):
            raise ValueError(f"{path} has no config hash line")
        reader = csv.reader(f)
        header = next(reader)
        rows = list(reader)
    return first.split("=", 1)[1], header, rows
