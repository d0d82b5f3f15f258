"""Tests for run configuration loading, validation and hashing."""

import json
import math

import pytest

from app.config import DEFAULT_CONFIG_PATH, config_from_dict, config_hash, load_config
from app.core_model import ConfigurationError, SamplingPattern


class TestDefaults:
    """The design-example configuration."""

    def test_example_values(self, example_config):
        assert example_config.pattern == SamplingPattern(2, (0.0, -0.15))
        assert example_config.band.omega1_T1 == pytest.approx(4.75 * math.pi)
        assert example_config.filter_order == 60
        assert example_config.snr_db == 61.8
        assert example_config.noise_reference == "full_band"
        assert example_config.simulation_length % example_config.block_size == 0

    def test_default_file_is_valid_json(self):
        with open(DEFAULT_CONFIG_PATH) as f:
            data = json.load(f)
        assert data["fft_length"] == 16384

    def test_load_without_path(self):
        config = load_config()
        assert config.path == "polyphase"
        assert config.output_dir == "out"

    def test_coherent_tones_are_on_bins(self, example_config):
        K = example_config.fft_length
        for tone in example_config.coherent_tones.tones:
            k = tone.omega * K / math.pi
            assert k == pytest.approx(round(k), abs=1e-9)


class TestResolution:
    """Cross-validation and length rounding."""

    def test_odd_period_rounds_length(self):
        config = config_from_dict({
            "pattern": {"M": 3, "skews": [0.0, 0.1, -0.1]},
            "band": {"omega_c_over_pi": 2.5, "bandwidth_over_pi": 0.8},
            "simulation_length": 40001,
        })
        assert config.block_size == 6
        assert config.simulation_length == 40002

    def test_invalid_band(self):
        with pytest.raises(ConfigurationError, match="omega1_T1"):
            config_from_dict({"band": {"omega_c_over_pi": 0.2, "bandwidth_over_pi": 0.8}})

    def test_odd_order(self):
        with pytest.raises(ConfigurationError, match="even"):
            config_from_dict({"filter_order": 61})

    def test_odd_sweep_order(self):
        with pytest.raises(ConfigurationError, match="sweep order 25"):
            config_from_dict({"sweep_orders": [20, 25]})

    def test_tone_out_of_band(self):
        with pytest.raises(ConfigurationError, match="outside the band"):
            config_from_dict({"tones": [{"amplitude": 1.0, "phase": 0.0, "omega_over_pi": 0.41}]})

    def test_too_short_for_fft(self):
        with pytest.raises(ConfigurationError, match="transient-free"):
            config_from_dict({"simulation_length": 20000})

    def test_fft_length_power_of_two(self):
        with pytest.raises(ConfigurationError, match="power of two"):
            config_from_dict({"fft_length": 10000})

    def test_unknown_path(self):
        with pytest.raises(ConfigurationError, match="path"):
            config_from_dict({"path": "fast"})

    def test_missing_field_type(self):
        with pytest.raises(ConfigurationError, match="Invalid run configuration"):
            config_from_dict({"filter_order": "sixty"})

    def test_bad_skews(self):
        with pytest.raises(ConfigurationError, match="Expected 2 skews"):
            config_from_dict({"pattern": {"M": 2, "skews": [0.0]}})


class TestFiles:
    """Loading from disk and command-line overrides."""

    def test_partial_file_merges_over_defaults(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"filter_order": 46, "noise": {"seed": 5}}))
        config = load_config(str(path))
        assert config.filter_order == 46
        assert config.seed == 5
        assert config.snr_db == 61.8

    def test_overrides(self, tmp_path):
        config = load_config(None, output_dir=str(tmp_path), path="direct", noise_enabled=False)
        assert config.output_dir == str(tmp_path)
        assert config.path == "direct"
        assert not config.noise_enabled

    def test_none_overrides_are_ignored(self):
        assert load_config(None, path=None).path == "polyphase"

    def test_file_and_path_override_together(self, tmp_path):
        """The reconstruction-path override does not clash with the config file argument."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"filter_order": 46}))
        config = load_config(str(path), path="direct", output_dir=str(tmp_path))
        assert config.filter_order == 46
        assert config.path == "direct"
        config = load_config(config_path=str(path), path="polyphase")
        assert config.path == "polyphase"

    def test_in_band_reference_selectable(self):
        config = config_from_dict({"noise": {"reference": "in_band"}})
        assert config.noise_reference == "in_band"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            load_config(str(tmp_path / "absent.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_config(str(path))

    def test_null_snr_disables_noise_level(self):
        config = config_from_dict({"noise": {"snr_db": None}})
        assert math.isinf(config.snr_db)


class TestHash:
    """Canonical configuration hash."""

    def test_stable(self, example_config):
        assert config_hash(example_config) == config_hash(config_from_dict({"output_dir": "elsewhere"}))
        assert len(config_hash(example_config)) == 64

    def test_changes_with_content(self, example_config):
        assert config_hash(example_config) != config_hash(example_config.with_order(46))
