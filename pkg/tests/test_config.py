import math
from unittest.mock import patch

import pytest

from star_uvaa.config import (
    config_from_dict,
    config_hash,
    default_config_path,
    load_config,
    log_level,
    with_overrides,
)
from star_uvaa.data_model import AeroParams, ScenarioConfig
from star_uvaa.errors import ConfigError

# ============================================================================
# Test load_config
# ============================================================================


class TestLoadConfig:
    """Tests for load_config function."""

    def test_empty_file_gives_defaults(self, tmp_path):
        """Test that an empty file yields the documented defaults."""
        path = tmp_path / "empty.toml"
        path.write_text("")

        cfg = load_config(path)

        assert cfg == ScenarioConfig()
        assert cfg.region.n_uavs == 8
        assert cfg.n_elements == 60
        assert cfg.sa.cooling == 0.95
        assert cfg.train.gamma == 0.9
        assert cfg.train.learning_rate == 7e-4

    def test_element_grid_accepted(self, tmp_path):
        """Test that 60 elements on a 6x10 grid is accepted."""
        path = tmp_path / "ris.toml"
        path.write_text("[ris]\nn_elements = 60\nrows = 6\ncols = 10\n")

        cfg = load_config(path)

        assert cfg.n_elements == 60

    def test_element_grid_mismatch_names_key(self, tmp_path):
        """Test that a count that is not rows*cols is rejected with the key name."""
        path = tmp_path / "ris.toml"
        path.write_text("[ris]\nn_elements = 61\nrows = 6\ncols = 10\n")

        with pytest.raises(ConfigError, match="ris"):
            load_config(path)

    def test_negative_power_rejected(self, tmp_path):
        """Test the transmit power sign check."""
        path = tmp_path / "power.toml"
        path.write_text("[radio]\ntx_power_w = -1\n")

        with pytest.raises(ConfigError, match="P_t must be positive"):
            load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        """Test that a misspelled key is reported by its dotted name."""
        path = tmp_path / "typo.toml"
        path.write_text("[region]\nn_uav = 4\n")

        with pytest.raises(ConfigError, match="region.n_uav"):
            load_config(path)

    def test_unordered_box_rejected(self, tmp_path):
        """Test the region ordering invariant."""
        path = tmp_path / "box.toml"
        path.write_text("[region]\nl_min = 10\nl_max = 5\n")

        with pytest.raises(ConfigError, match="l_min"):
            load_config(path)

    def test_parse_failure(self, tmp_path):
        """Test that malformed TOML raises ConfigError."""
        path = tmp_path / "bad.toml"
        path.write_text("[region\nn_uavs = ")

        with pytest.raises(ConfigError, match="cannot parse"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises ConfigError."""
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.toml")

    def test_env_default_path(self, tmp_path, monkeypatch):
        """Test that STAR_UVAA_CONFIG is used when no path is given."""
        path = tmp_path / "env.toml"
        path.write_text("seed = 42\n")
        monkeypatch.setenv("STAR_UVAA_CONFIG", str(path))

        assert load_config().seed == 42

    def test_no_path_no_env_gives_defaults(self, monkeypatch):
        """Test the all-defaults path without any file."""
        monkeypatch.delenv("STAR_UVAA_CONFIG", raising=False)
        with patch("star_uvaa.config.load_dotenv"):
            assert load_config() == ScenarioConfig()

    def test_efficiency_out_of_range(self):
        """Test that array efficiency above one is rejected."""
        with pytest.raises(ConfigError, match="radio.array_efficiency"):
            config_from_dict({"radio": {"array_efficiency": 1.5}})

    def test_coarse_quadrature_rejected(self):
        """Test that fewer than 8 quadrature points per axis is rejected."""
        with pytest.raises(ConfigError, match="radio.quad_theta"):
            config_from_dict({"radio": {"quad_theta": 4}})


# ============================================================================
# Test derived quantities
# ============================================================================


class TestDerivedQuantities:
    """Tests for properties derived from the configuration."""

    def test_wavelength(self, default_cfg):
        """Test the 2.4 GHz wavelength."""
        assert default_cfg.wavelength == pytest.approx(0.12491, rel=1e-4)
        assert default_cfg.spacing_r == pytest.approx(default_cfg.wavelength / 2)

    def test_noise_power_from_psd(self, default_cfg):
        """Test that σ² = PSD·B for -155 dBm/Hz over 2 MHz."""
        expected = 10 ** ((-155 - 30) / 10) * 2e6
        assert default_cfg.noise_power_w == pytest.approx(expected)

    def test_explicit_noise_power(self):
        """Test that an explicit noise power overrides the PSD."""
        cfg = config_from_dict({"radio": {"noise_power_w": 1e-12}})
        assert cfg.noise_power_w == 1e-12

    def test_rician_beta(self, default_cfg):
        """Test the 3 dB Rician factor in linear scale."""
        assert default_cfg.rician_beta == pytest.approx(10**0.3)

    def test_reference_point_is_box_center(self, default_cfg):
        """Test the default guidance reference point."""
        point = default_cfg.reference_point
        assert (point.x, point.y, point.z) == (1500.0, 1500.0, 75.0)

    def test_observation_dim(self, default_cfg):
        """Test 3·8 + 2·2 = 28."""
        assert default_cfg.observation_dim == 28

    def test_t_max_defaults_to_slots(self, default_cfg):
        """Test that the mission duration defaults to the episode length."""
        assert default_cfg.t_max == 100

    def test_hover_powers(self, default_cfg):
        """Test the derived blade-profile and induced hover powers."""
        aero = AeroParams.from_config(default_cfg.energy)
        blade = 0.012 / 8 * 1.225 * 0.05 * 0.503 * 120**3
        induced = 1.1 * (2 * 9.8) ** 1.5 / math.sqrt(2 * 1.225 * 0.503)

        assert aero.p_blade == pytest.approx(blade)
        assert aero.p_induced == pytest.approx(induced)
        assert aero.p_blade == pytest.approx(79.9, abs=0.1)
        assert aero.p_induced == pytest.approx(86.0, abs=0.1)

    def test_hover_power_override(self):
        """Test that configured hover powers replace the derived ones."""
        cfg = config_from_dict({"energy": {"p_blade": 50.0, "p_induced": 60.0}})
        aero = AeroParams.from_config(cfg.energy)
        assert (aero.p_blade, aero.p_induced) == (50.0, 60.0)


# ============================================================================
# Test overrides, hashing and environment settings
# ============================================================================


class TestOverridesAndHash:
    """Tests for with_overrides, config_hash and environment settings."""

    def test_override_revalidates(self, default_cfg):
        """Test that overrides go through validation."""
        cfg = with_overrides(default_cfg, {"region.n_uavs": 3})
        assert cfg.region.n_uavs == 3

        with pytest.raises(ConfigError):
            with_overrides(default_cfg, {"region.n_uavs": 0})

    def test_override_unknown_section(self, default_cfg):
        """Test that an unknown section is reported."""
        with pytest.raises(ConfigError, match="nowhere.x"):
            with_overrides(default_cfg, {"nowhere.x": 1})

    def test_hash_ignores_seed(self, default_cfg):
        """Test that the config hash does not depend on the seed."""
        reseeded = with_overrides(default_cfg, {"seed": 99})
        assert config_hash(reseeded) == config_hash(default_cfg)

    def test_hash_tracks_physics(self, default_cfg):
        """Test that changing a physical parameter changes the hash."""
        changed = with_overrides(default_cfg, {"radio.tx_power_w": 0.2})
        assert config_hash(changed) != config_hash(default_cfg)

    def test_log_level_from_env(self, monkeypatch):
        """Test that the log level is read from the environment."""
        monkeypatch.setenv("STAR_UVAA_LOG_LEVEL", "debug")
        assert log_level() == "DEBUG"

    def test_default_config_path_unset(self, monkeypatch):
        """Test that an unset variable gives no default path."""
        monkeypatch.delenv("STAR_UVAA_CONFIG", raising=False)
        with patch("star_uvaa.config.load_dotenv"):
            assert default_config_path() is None
