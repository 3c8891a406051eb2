"""Tests for configuration management."""
import os
from unittest.mock import patch

import numpy as np
import pytest

from sphkit.config import ToolkitSettings, load_settings, settings
from sphkit.errors import ConfigError


class TestToolkitSettings:
    """Tests for ToolkitSettings."""

    def test_default_values(self):
        """Test default tolerances and caps."""
        config = ToolkitSettings()

        assert config.tol == 1e-8
        assert config.cluster_tol == 1e-6
        assert config.degree_cap == 4
        assert config.search_cap == 32
        assert config.model_order_max == 12
        assert config.seed == 0
        assert config.tail_tolerance == 1e-10

    @patch.dict(os.environ, {"SPHKIT_TOL": "1e-6", "SPHKIT_DEGREE_CAP": "3", "SPHKIT_SEED": "11"}, clear=False)
    def test_environment_variable_loading(self):
        """Test loading configuration from SPHKIT_* variables."""
        config = ToolkitSettings()

        assert config.tol == 1e-6
        assert config.degree_cap == 3
        assert config.seed == 11

    def test_rng_is_seeded(self):
        """Two generators from the same seed draw the same numbers."""
        config = ToolkitSettings(seed=5)
        assert np.array_equal(config.rng().random(4), config.rng().random(4))

    def test_settings_instance(self):
        """Test that global settings instance exists."""
        assert isinstance(settings, ToolkitSettings)


class TestLoadSettings:
    """Tests for load_settings."""

    def test_file_and_overrides(self, tmp_path):
        """Overrides win over the file, None overrides are ignored."""
        path = tmp_path / "run.conf"
        path.write_text("tol=1e-7\nseed=3\n", encoding="utf-8")

        config = load_settings(path, seed=9, degree_cap=None)

        assert config.tol == 1e-7
        assert config.seed == 9
        assert config.degree_cap == 4

    def test_unknown_key(self, tmp_path):
        """Test that unknown keys are rejected."""
        path = tmp_path / "run.conf"
        path.write_text("tolerance=1e-7\n", encoding="utf-8")

        with pytest.raises(ConfigError, match="Unknown config key"):
            load_settings(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_settings(tmp_path / "missing.conf")

    def test_invalid_value(self):
        """Test that validation errors become ConfigError."""
        with pytest.raises(ConfigError, match="Invalid configuration"):
            load_settings(None, degree_cap=0)
