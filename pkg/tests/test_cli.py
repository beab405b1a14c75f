"""The fuzz CLI surface: run, report, replay, minimize."""

import json

import pytest

from verifuzz.cli import main

from conftest import ALL_BUGS, toy_command


def toy_cmd_text(bugs: str = ALL_BUGS) -> str:
    import shlex

    return " ".join(shlex.quote(part) for part in toy_command(bugs))


@pytest.fixture(scope="module")
def campaign_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "camp"
    code = main([
        "run",
        "--strategy", "grammar",
        "--grammar", "minipvl",
        "--target-cmd", toy_cmd_text(),
        "--time", "600",
        "--max-executions", "40",
        "--seed", "2",
        "--out", str(out),
    ])
    assert code == 0
    return out


def test_run_produces_campaign(campaign_dir, capsys):
    stats = json.loads((campaign_dir / "stats.json").read_text())
    assert stats["executions"] == 40
    assert stats["buckets_found"] >= 1


def test_run_flag_validation(capsys):
    assert main(["run", "--strategy", "grammar"]) == 2
    err = capsys.readouterr().err
    assert "required" in err


def test_run_from_config_file(tmp_path):
    config = {
        "strategy": "typed",
        "target": {"command": list(toy_command()), "timeout": 10.0},
        "output_dir": str(tmp_path / "typed-camp"),
        "time_budget": 600.0,
        "master_seed": 9,
        "workers": 1,
        "typedgen": {"seed": 0},
        "max_executions": 5,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    assert main(["run", "--config", str(config_path)]) == 0
    stats = json.loads((tmp_path / "typed-camp" / "stats.json").read_text())
    assert stats["executions"] == 5


def test_report(campaign_dir, tmp_path, capsys):
    assert main(["report", str(campaign_dir), "--out", str(tmp_path / "rep")]) == 0
    out = capsys.readouterr().out
    assert "grammar" in out
    assert (tmp_path / "rep" / "summary.txt").is_file()
    data_files = list((tmp_path / "rep").glob("*_covered.dat"))
    assert len(data_files) == 1


def test_replay_stable(campaign_dir, capsys):
    buckets = sorted(p.name for p in (campaign_dir / "crashes").iterdir())
    assert main(["replay", str(campaign_dir), buckets[0]]) == 0
    out = capsys.readouterr().out
    assert "5/5" in out and "stable" in out
    report = json.loads(
        (campaign_dir / "crashes" / buckets[0] / "report.json").read_text()
    )
    assert report["replay_status"] == "stable"


def test_replay_unknown_bucket(campaign_dir, capsys):
    assert main(["replay", str(campaign_dir), "beef000000000000"]) == 2


def test_minimize(campaign_dir, capsys):
    buckets = sorted(p.name for p in (campaign_dir / "crashes").iterdir())
    assert main([
        "minimize", str(campaign_dir), buckets[0],
        "--granularity", "token", "--budget", "500",
    ]) == 0
    out = capsys.readouterr().out
    assert "minimized" in out
    bdir = campaign_dir / "crashes" / buckets[0]
    assert (bdir / "minimized.bin").is_file()
    info = json.loads((bdir / "minimize.json").read_text())
    assert info["size_after"] <= info["size_before"]
    assert info["evaluations"] <= 500
