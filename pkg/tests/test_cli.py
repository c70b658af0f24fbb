from __future__ import annotations

import json

import pytest
import yaml
from builders import example_text
from click.testing import CliRunner

from flexigen.cli import main
from flexigen.config import example_config_path


@pytest.fixture()
def runner():
    return CliRunner()


def generate(runner, out, mode="office", *extra, env=None):
    args = ["generate", "--config", str(example_config_path()), "--mode", mode, "--out", str(out), *extra]
    return runner.invoke(main, args, env=env)


def test_office_generation_layout(runner, tmp_path):
    result = generate(runner, tmp_path)
    assert result.exit_code == 0, result.output
    target = tmp_path / "portugal_example"
    csvs = sorted(p.name for p in target.glob("*.csv"))
    assert csvs == ["car_4.csv", "car_5.csv", "car_6.csv"]
    for name in csvs:
        assert len((target / name).read_text().splitlines()) == 8761
    manifest = json.loads((target / "manifest.json").read_text())
    assert manifest["mode"] == "office" and manifest["seed"] == 0
    assert [f["file"] for f in manifest["files"]] == csvs


def test_home_generation_one_file_per_household(runner, tmp_path):
    assert generate(runner, tmp_path, "home").exit_code == 0
    assert sorted(p.name for p in (tmp_path / "portugal_example").glob("*.csv")) == ["car_1.csv", "car_2.csv", "car_3.csv"]


def test_seed_precedence(runner, tmp_path):
    generate(runner, tmp_path / "env", "home", env={"FLEXIGEN_SEED": "5"})
    generate(runner, tmp_path / "flag", "home", "--seed", "9", env={"FLEXIGEN_SEED": "5"})
    env_manifest = json.loads((tmp_path / "env/portugal_example/manifest.json").read_text())
    flag_manifest = json.loads((tmp_path / "flag/portugal_example/manifest.json").read_text())
    assert env_manifest["seed"] == 5 and flag_manifest["seed"] == 9


def test_fatal_config_exits_nonzero(runner, tmp_path):
    doc = yaml.safe_load(example_text())
    doc["CHARGE_BAT"] = {"min_pct": 80, "max_pct": 60}
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump(doc))
    result = runner.invoke(main, ["generate", "--config", str(bad), "--mode", "home", "--out", str(tmp_path / "o")])
    assert result.exit_code != 0
    assert "charge-band" in result.output


def test_unparseable_config_exits_nonzero(runner, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("YEARS: [\n")
    result = runner.invoke(main, ["generate", "--config", str(bad), "--mode", "home", "--out", str(tmp_path / "o")])
    assert result.exit_code == 2
    assert "syntax error" in result.output


def test_validate_fresh_output(runner, tmp_path):
    generate(runner, tmp_path)
    result = runner.invoke(main, ["validate", "--input", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "0 finding(s)" in result.output


def test_validate_truncated_and_foreign(runner, tmp_path):
    generate(runner, tmp_path)
    path = tmp_path / "portugal_example" / "car_4.csv"
    path.write_text("\n".join(path.read_text().splitlines()[:-5]) + "\n")
    result = runner.invoke(main, ["validate", "--input", str(tmp_path)])
    assert result.exit_code != 0 and "row-count" in result.output
    foreign = tmp_path / "foreign.csv"
    foreign.write_text("x,y\n1,2\n")
    result = runner.invoke(main, ["validate", "--input", str(foreign)])
    assert result.exit_code != 0 and "header" in result.output


def test_analyze_command(runner, tmp_path):
    generate(runner, tmp_path / "gen", "home")
    result = runner.invoke(main, ["analyze", "--input", str(tmp_path / "gen"), "--out", str(tmp_path / "stats")])
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in (tmp_path / "stats").iterdir()) == [
        "hourly_profile.csv", "run_lengths.csv", "trip_durations.csv",
    ]
