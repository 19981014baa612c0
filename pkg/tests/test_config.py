"""Tolerances, run configuration and the TOML config file."""

from pathlib import Path

import pytest

from src.core.config import (
    DEFAULT_TOLERANCES,
    RunConfig,
    Tolerances,
    build_run_config,
    load_config_file,
    parse_outputs,
    parse_tolerance_pairs,
)
from src.core.errors import ConfigurationError


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return path


# =============================================================================
# Tolerances
# =============================================================================


class TestTolerances:
    def test_defaults(self):
        assert DEFAULT_TOLERANCES.eps_reg == 1e-9
        assert DEFAULT_TOLERANCES.cusp_guard == 1e-4
        assert DEFAULT_TOLERANCES.projection == 1e-10

    def test_fd_step_by_order(self):
        tol = Tolerances()
        assert tol.fd_step(1) == tol.fd_step_low
        assert tol.fd_step(2) == tol.fd_step_mid
        assert tol.fd_step(3) == tol.fd_step_high

    def test_overrides_coerce_strings(self):
        tol = DEFAULT_TOLERANCES.with_overrides({"eps_tau": "1e-7", "fd_low": 2e-6})
        assert tol.eps_tau == 1e-7
        assert tol.fd_low == 2e-6
        assert DEFAULT_TOLERANCES.eps_tau == 1e-9

    @pytest.mark.parametrize(
        "overrides",
        [{"eps_nope": 1.0}, {"eps_reg": "small"}, {"eps_reg": -1.0}, {"eps_reg": float("inf")}, {"eps_reg": None}],
    )
    def test_override_errors(self, overrides):
        with pytest.raises(ConfigurationError):
            DEFAULT_TOLERANCES.with_overrides(overrides)

    def test_zero_is_allowed(self):
        assert DEFAULT_TOLERANCES.with_overrides({"fd_low": 0}).fd_low == 0.0


class TestParsing:
    def test_tolerance_pairs(self):
        assert parse_tolerance_pairs(["eps_reg=1e-8", " fd_low = 0 "]) == {"eps_reg": "1e-8", "fd_low": "0"}

    @pytest.mark.parametrize("pair", ["eps_reg", "=1e-8", ""])
    def test_malformed_pairs(self, pair):
        with pytest.raises(ConfigurationError):
            parse_tolerance_pairs([pair])

    def test_outputs(self):
        assert parse_outputs("csv, json,,svg") == frozenset({"csv", "json", "svg"})
        assert parse_outputs(["obj", " csv "]) == frozenset({"obj", "csv"})


# =============================================================================
# RunConfig
# =============================================================================


class TestRunConfig:
    def test_preset_defaults(self):
        config = RunConfig(preset="helix")
        assert config.samples == 512
        assert config.outputs == frozenset({"csv"})
        assert config.branch == "upper"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"preset": "helix", "samples": 1},
            {},
            {"expr_x": "cos(t)"},
            {"preset": "helix", "expr_x": "t", "expr_y": "t"},
            {"expr_x": "t", "expr_y": "t", "a": 2.0},
            {"expr_x": "t", "expr_y": "t", "a": 1.0, "b": 2.0},
            {"preset": "helix", "branch": "middle"},
            {"preset": "helix", "t_range": (2.0, 1.0)},
            {"preset": "helix", "outputs": frozenset({"png"})},
            {"preset": "helix", "workers": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            RunConfig(**kwargs)

    def test_expressions_without_torus(self):
        config = RunConfig(expr_x="cos(t)", expr_y="sin(t)", expr_f="t")
        assert config.a is None and config.preset is None


# =============================================================================
# Config file
# =============================================================================


class TestConfigFile:
    def test_table_form(self, tmp_path):
        path = _write(
            tmp_path,
            'preset = "deltoid-touch"\nsamples = 64\nout = "csv,svg"\n\n[tol]\neps_tau = 1e-8\n',
        )
        values = load_config_file(path)
        assert values == {"preset": "deltoid-touch", "samples": 64, "outputs": "csv,svg", "tol": {"eps_tau": 1e-8}}

    def test_dotted_key_form(self, tmp_path):
        path = _write(tmp_path, 'preset = "helix"\n"tol.eps_tau" = 1e-7\n')
        assert load_config_file(path)["tol"] == {"eps_tau": 1e-7}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config_file(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config_file(_write(tmp_path, "preset = \n"))

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigurationError) as info:
            load_config_file(_write(tmp_path, "colour = 3\n"))
        assert info.value.to_dict()["key"] == "colour"


class TestBuildRunConfig:
    def test_flags_override_file(self, tmp_path):
        file_values = load_config_file(
            _write(tmp_path, 'preset = "helix"\nsamples = 64\n[tol]\neps_tau = 1e-8\nfd_low = 1e-5\n')
        )
        config = build_run_config(file_values, {"samples": 128, "tol": {"eps_tau": "1e-6"}, "branch": None})
        assert config.samples == 128
        assert config.tolerances.eps_tau == 1e-6
        assert config.tolerances.fd_low == 1e-5
        assert config.preset == "helix"

    def test_coercions(self):
        config = build_run_config(
            {},
            {
                "preset": "helix",
                "a": 5,
                "b": "2",
                "n": "3",
                "t_range": ["0", "1.5"],
                "outputs": "json,obj",
                "out_dir": "results",
            },
        )
        assert (config.a, config.b, config.n) == (5.0, 2.0, 3)
        assert config.t_range == (0.0, 1.5)
        assert config.outputs == frozenset({"json", "obj"})
        assert config.out_dir == Path("results")

    def test_defaults_only(self):
        config = build_run_config({}, {"preset": "astroid-strict"})
        assert config.tolerances == DEFAULT_TOLERANCES

    def test_validation_runs_after_merge(self):
        with pytest.raises(ConfigurationError):
            build_run_config({"preset": "helix"}, {"samples": 1})
