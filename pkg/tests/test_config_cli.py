"""INI configuration round-trips and the command line surface."""

import configparser

import numpy as np
import pytest
from click.testing import CliRunner

from txpsim import config as config_mod
from txpsim.channel import DEFAULT_ENVIRONMENTS
from txpsim.cli import _parse_seeds, main
from txpsim.control import DEFAULT_GAINS
from txpsim.power import DEFAULT_POWER_MODEL
from txpsim.radio import DEFAULT_TXP_LEVELS


def test_defaults_without_file():
    cfg = config_mod.load_config(None)
    assert cfg.environments == DEFAULT_ENVIRONMENTS
    assert cfg.power_model == DEFAULT_POWER_MODEL
    assert cfg.table.levels == tuple(sorted(DEFAULT_TXP_LEVELS))


def test_dump_defaults_round_trip(tmp_path):
    path = tmp_path / "defaults.ini"
    path.write_text(config_mod.dump_defaults())
    cfg = config_mod.load_config(str(path))
    assert cfg.environments == DEFAULT_ENVIRONMENTS
    assert cfg.power_model == DEFAULT_POWER_MODEL
    assert cfg.table.levels == tuple(sorted(DEFAULT_TXP_LEVELS))
    for strategy, factory in DEFAULT_GAINS.items():
        assert cfg.gains[strategy] == factory()


def test_partial_override_keeps_other_defaults(tmp_path):
    path = tmp_path / "override.ini"
    path.write_text("[environment.lab]\npl0_db = 51.0\n\n[gains.rssi]\ninner_kp = 0.5\n")
    cfg = config_mod.load_config(str(path))
    assert cfg.environments["lab"].pl0_db == 51.0
    assert cfg.environments["lab"].path_exponent == DEFAULT_ENVIRONMENTS["lab"].path_exponent
    assert cfg.environments["rooftop"] == DEFAULT_ENVIRONMENTS["rooftop"]
    assert cfg.gains["rssi"].inner.kp == 0.5
    assert cfg.gains["rssi"].inner.ki == 0.01
    assert cfg.gains["throughput"] == DEFAULT_GAINS["throughput"]()


def test_new_environment_section(tmp_path):
    path = tmp_path / "extra.ini"
    path.write_text("[environment.basement]\npl0_db = 55.0\npath_exponent = 3.5\n")
    cfg = config_mod.load_config(str(path))
    assert "basement" in cfg.environments
    assert cfg.environments["basement"].pl0_db == 55.0
    assert cfg.environments["basement"].path_exponent == 3.5


def test_table_override(tmp_path):
    path = tmp_path / "table.ini"
    path.write_text("[table]\nlevels_dbm = -20, -10, 0, 10\n")
    cfg = config_mod.load_config(str(path))
    assert cfg.table.levels == (-20.0, -10.0, 0.0, 10.0)


def test_config_env_var(tmp_path, monkeypatch):
    path = tmp_path / "env.ini"
    path.write_text("[environment.lab]\npl0_db = 60.0\n")
    monkeypatch.setenv(config_mod.ENV_VAR, str(path))
    assert config_mod.load_config().environments["lab"].pl0_db == 60.0


def test_parse_seeds():
    assert _parse_seeds("1,2,5-8") == [1, 2, 5, 6, 7, 8]
    assert _parse_seeds("3") == [3]
    assert _parse_seeds("-2") == [-2]


def test_cli_run_preset_writes_csv(tmp_path):
    runner = CliRunner()
    out = tmp_path / "trace.csv"
    result = runner.invoke(
        main, ["run", "--preset", "lab-femstep-rssi", "--duration", "5", "--seed", "2", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "rssi" in result.output
    header = out.read_text().splitlines()[0]
    assert header.startswith("t_s,distance_m,rssi_dbm")
    assert np.loadtxt(out, delimiter=",", skiprows=1).shape[0] == 500


def test_cli_run_adhoc_ramp():
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["run", "--env", "rooftop", "--strategy", "rssi", "--ramp", "0:50", "--duration", "5", "--quiet"],
    )
    assert result.exit_code == 0, result.output
    assert result.output == ""


def test_cli_run_rejects_unknown_preset():
    result = CliRunner().invoke(main, ["run", "--preset", "nope"])
    assert result.exit_code != 0
    assert "unknown preset" in result.output


def test_cli_run_with_config(tmp_path):
    path = tmp_path / "cfg.ini"
    path.write_text("[environment.lab]\npl0_db = 80.0\n")
    result = CliRunner().invoke(
        main, ["run", "--env", "lab", "--duration", "5", "--txp", "0", "--config", str(path)]
    )
    assert result.exit_code == 0, result.output


def test_cli_presets_lists_all():
    result = CliRunner().invoke(main, ["presets"])
    assert result.exit_code == 0
    names = result.output.split()
    assert len(names) == 8
    assert "rooftop-ramp-rssi" in names


def test_cli_batch():
    result = CliRunner().invoke(
        main, ["batch", "--preset", "lab-ramp-rssi", "--seeds", "1-2", "--duration", "5"]
    )
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 3  # header plus one row per seed
    assert lines[0].split()[0] == "seed"


def test_cli_sweep_txp():
    result = CliRunner().invoke(main, ["sweep", "txp", "--env", "lab"])
    assert result.exit_code == 0, result.output
    assert "rssi-vs-requested slope" in result.output


def test_cli_dump_defaults_parses():
    result = CliRunner().invoke(main, ["dump-defaults"])
    assert result.exit_code == 0
    parser = configparser.ConfigParser()
    parser.read_string(result.output)
    assert parser.has_section("environment.lab")
    assert parser.has_section("power")


def test_cli_power_table():
    result = CliRunner().invoke(main, ["power-table"])
    assert result.exit_code == 0
    assert len(result.output.strip().splitlines()) == 1 + len(DEFAULT_TXP_LEVELS)


def test_cli_info():
    result = CliRunner().invoke(main, ["info"])
    assert result.exit_code == 0
    assert "kernel backend" in result.output
