import pytest

from syndetic.config import RunConfig, load_config


def test_defaults_without_a_file(tmp_path):
    assert load_config(str(tmp_path / "missing.env"), {}) == RunConfig()


def test_file_values_and_environment_overrides(tmp_path):
    path = tmp_path / "syndetic.env"
    path.write_text("SYNDETIC_RADIUS=6\nSYNDETIC_CERT_DIR=out\nSYNDETIC_SEED=3\n")
    config = load_config(str(path), {"SYNDETIC_RADIUS": "9"})
    assert config.radius == 9
    assert config.cert_dir == "out"
    assert config.seed == 3


def test_config_path_from_environment(tmp_path):
    path = tmp_path / "other.env"
    path.write_text("SYNDETIC_Z_WINDOW=50\n")
    assert load_config(environ={"SYNDETIC_CONFIG": str(path)}).z_window == 50


def test_bad_integer_is_rejected(tmp_path):
    with pytest.raises(ValueError):
        load_config(str(tmp_path / "missing.env"), {"SYNDETIC_BALL_CAP": "lots"})


def test_replace_skips_unset_values():
    config = RunConfig().replace(radius=None, seed=7)
    assert config.radius == 4
    assert config.seed == 7
