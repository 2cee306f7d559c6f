"""Command-line tests: option parsing, config merging and exit codes."""
import pandas as pd
import pytest
from click.testing import CliRunner

from click_app import config as lab_config
from click_app.app import create_app
from click_app.app.commands import validate as validate_commands
from domain.errors import ConfigError
from domain.models import PropertyVerdict, ValidationReport
from src.usecases import experiment_usecase


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def app():
    return create_app()


class _StubValidation:
    def __init__(self, passed):
        self.passed = passed

    def validate_suite(self, seed=0):
        return ValidationReport(
            seed=seed,
            verdicts=[
                PropertyVerdict(name="sin-theta-axioms", passed=True, detail="ok", wall_time_ms=1.0),
                PropertyVerdict(name="gd-spectral-equivalence", passed=self.passed, detail="x", wall_time_ms=2.0),
            ],
        )


def test_run_writes_results(runner, app, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, [
        "run", "--experiment", "recover-sweep-d", "--d", "8,10", "--r", "2", "--n", "300",
        "--replicates", "2", "--solvers", "cl-masking,autoencoder", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "Wrote 8 rows (0 failed)" in result.output
    frame = pd.read_csv(out / "results.csv")
    assert sorted(frame["sweep_value"].unique()) == [8, 10]
    assert (out / "summary.md").exists()


def test_run_from_yaml_with_overrides(runner, app, tmp_path):
    path = tmp_path / "sweep.yaml"
    path.write_text(
        "experiment: recover-sweep-n\nd: 8\nr: 2\nn: [100, 200]\nreplicates: 1\nsolvers: [cl-masking]\n",
        encoding="utf-8",
    )
    out = tmp_path / "out"
    result = runner.invoke(app, ["run", "--config", str(path), "--seed", "4", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out / "results.csv")
    assert list(frame["sweep_value"]) == [100, 200]
    assert set(frame["solver"]) == {"cl-masking"}


def test_sigma_vector_option(runner, app, tmp_path):
    result = runner.invoke(app, [
        "run", "--experiment", "recover-sweep-n", "--d", "6", "--r", "2", "--n", "120",
        "--sigma", "1,1,1,0.5,0.5,0.5", "--replicates", "1", "--solvers", "cl-masking", "--out", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output


def test_unknown_config_key_exits_2(runner, app, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("experiment: recover-sweep-n\nnot_a_key: 3\n", encoding="utf-8")
    result = runner.invoke(app, ["run", "--config", str(path), "--out", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "invalid configuration" in result.output
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize(
    "args",
    [
        ["run"],
        ["run", "--experiment", "no-such-sweep"],
        ["run", "--experiment", "recover-sweep-n", "--d", "a,b"],
        ["run", "--experiment", "recover-sweep-n", "--d", "8", "--r", "8"],
        ["run", "--experiment", "transfer-sweep-alpha", "--n", "100,200"],
    ],
)
def test_bad_arguments_exit_2(runner, app, args):
    assert runner.invoke(app, args).exit_code == 2


def _no_sweep(*args, **kwargs):
    raise AssertionError("the sweep started before the output directory was checked")


def test_unwritable_output_exits_3(runner, app, tmp_path, monkeypatch):
    monkeypatch.setattr(experiment_usecase, "run_work_item", _no_sweep)
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    result = runner.invoke(app, [
        "run", "--experiment", "recover-sweep-n", "--d", "6", "--r", "2", "--n", "60",
        "--replicates", "1", "--solvers", "cl-masking", "--out", str(blocker / "sub"),
    ])
    assert result.exit_code == 3, result.output
    assert "I/O error" in result.output


@pytest.mark.parametrize("passed, code", [(True, 0), (False, 1)])
def test_validate_exit_codes(runner, app, monkeypatch, passed, code):
    monkeypatch.setattr(validate_commands, "get_services", lambda: _StubValidation(passed))
    result = runner.invoke(app, ["validate", "--seed", "5"])
    assert result.exit_code == code
    assert "sin-theta-axioms" in result.output
    if passed:
        assert "All 2 properties passed (seed 5)" in result.output
    else:
        assert "Failed: gd-spectral-equivalence" in result.output


def test_validate_through_run(runner, app, monkeypatch):
    monkeypatch.setattr(validate_commands, "get_services", lambda: _StubValidation(False))
    assert runner.invoke(app, ["run", "--experiment", "validate"]).exit_code == 1


def test_build_config_merges_file_and_overrides(tmp_path):
    path = tmp_path / "sweep.yaml"
    path.write_text("experiment: supcon-sweep-m\nd: 12\nm: [10, 20]\n", encoding="utf-8")
    cfg = lab_config.build_experiment_config(str(path), None, {"r": 3, "seed": None, "output_path": "x"})
    assert (cfg.d, cfg.r, cfg.m_grid, cfg.seed, cfg.output_path) == (12, 3, [10, 20], 0, "x")


def test_build_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        lab_config.build_experiment_config(str(tmp_path / "missing.yaml"), "recover-sweep-n")
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        lab_config.build_experiment_config(str(listing))


def test_environment_selects_settings(monkeypatch):
    monkeypatch.setenv("LAB_ENV", "development")
    assert lab_config.get_config() is lab_config.DevelopmentConfig
    monkeypatch.setenv("LAB_ENV", "unknown")
    assert lab_config.get_config() is lab_config.ProductionConfig
