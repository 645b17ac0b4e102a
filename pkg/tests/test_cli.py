import json

import pytest

from entwit.cli import main


def run(argv):
    return main(argv)


def test_witness_single_run(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run(["witness", "--protocol", "p1", "--family", "amp",
                "--n", "20", "--F", "0.99", "--F0", "0.9", "--delta", "0.5",
                "--seed", "7", "--trials", "3", "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr().out
    assert "decision:" in captured
    report = json.loads(out.read_text())
    assert report["protocol"] == "p1"
    assert report["ledger"]["ebits_consumed"] == pytest.approx(4.39231742)
    trials = out.with_name("report_trials.csv")
    assert trials.exists()
    assert trials.read_text().splitlines()[0] == "trial,statistic,decision"


def test_witness_grid_sweep_deterministic(tmp_path):
    out1 = tmp_path / "sweep1.csv"
    out2 = tmp_path / "sweep2.csv"
    argv = ["witness", "--protocol", "p0", "--family", "amp", "--n", "10",
            "--F0", "0.9", "--F-grid", "0.5:1.0:11"]
    assert run(argv + ["--out", str(out1)]) == 0
    assert run(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().splitlines()[0] == "F,Ps"


def test_witness_empty_grid_usage_error(capsys):
    code = run(["witness", "--protocol", "p0", "--family", "amp", "--n", "5",
                "--F0", "0.9", "--F-grid", "0.5:1.0:0"])
    assert code == 2


def test_witness_requires_seed_for_trials():
    code = run(["witness", "--protocol", "p0", "--family", "amp", "--n", "5",
                "--F", "0.9", "--F0", "0.8", "--trials", "10"])
    assert code == 2


def test_unsupported_combination_exit_code():
    code = run(["witness", "--protocol", "p1", "--family", "dephasing",
                "--n", "10", "--F", "0.9", "--F0", "0.8"])
    assert code == 3


def test_discriminate_auto_r(capsys):
    code = run(["discriminate", "--protocol", "p3", "--family", "werner",
                "--F1", "0.99", "--F2", "0.95", "--auto-r"])
    assert code == 0
    out = capsys.readouterr().out
    assert "r*=29" in out


def test_discriminate_analytic(capsys, tmp_path):
    out = tmp_path / "disc.json"
    code = run(["discriminate", "--protocol", "p0", "--family", "amp",
                "--F1", "0.9", "--F2", "0.8", "--n", "10", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["success_probability"] > 0.5


def test_figure_command(tmp_path, capsys):
    code = run(["figure", "fig4", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "fig4_d24.csv").exists()


def test_figure_unknown_id():
    with pytest.raises(SystemExit) as err:
        run(["figure", "fig99", "--out", "x"])
    assert err.value.code == 2


def test_oracle_check_passes(capsys):
    assert run(["oracle-check", "--scale", "small"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_oracle_check_corrupted_grouping_fails():
    assert run(["oracle-check", "--corrupt-grouping"]) == 4


def test_config_file_merge(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "protocol": "p0", "family": "amp", "n": 10,
        "F": 0.95, "F0": 0.9}))
    code = run(["witness", "--config", str(cfg)])
    assert code == 0
    # explicit flags override the file
    code = run(["witness", "--config", str(cfg), "--F", "0.5"])
    assert code == 0
    out = capsys.readouterr().out
    assert "below" in out


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    with pytest.raises(SystemExit) as err:
        run(["witness", "--config", str(cfg)])
    assert err.value.code == 2


def test_witness_p2_requires_m():
    code = run(["witness", "--protocol", "p2", "--family", "amp", "--n", "7",
                "--d", "8", "--F", "0.95", "--F0", "0.9"])
    assert code == 2


def test_witness_p3(tmp_path):
    out = tmp_path / "p3.json"
    code = run(["witness", "--protocol", "p3", "--family", "werner",
                "--n", "60", "--r", "3", "--F", "0.95", "--F0", "0.9",
                "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["ledger"]["copies_measured"] == 20
