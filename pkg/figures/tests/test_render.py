"""The renderer consumes the primary package only through its command-line
CSV interface, so the fixtures shell out to ``entwit figure``."""

import shutil
import subprocess
import sys

import pytest

from figure_plots import FigureDataError, build_spec, render, render_figure
from figure_plots.cli import main


@pytest.fixture(scope="session")
def figdata(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("figdata")
    exe = shutil.which("entwit")
    assert exe, "the entwit CLI must be installed for the rendering tests"
    for which in ("fig3a", "fig4", "fig8"):
        subprocess.run([exe, "figure", which, "--out", str(outdir)],
                       check=True, capture_output=True)
    return outdir


def test_fig3a_three_series(figdata, tmp_path):
    summary = render_figure("fig3a", figdata, tmp_path / "fig3a.png")
    assert summary.series_count == 3
    assert summary.panel_count == 1
    assert (tmp_path / "fig3a.png").stat().st_size > 0


def test_fig4_two_panels(figdata, tmp_path):
    summary = render_figure("fig4", figdata, tmp_path / "fig4.png")
    assert summary.panel_count == 2
    assert summary.series_count == 2


def test_fig8_four_series_log_axis(figdata, tmp_path):
    spec = build_spec("fig8", figdata, tmp_path / "fig8.png")
    assert spec.logy
    summary = render(spec)
    assert summary.series_count == 4
    assert summary.panel_count == 1


def test_rerender_gives_identical_specification(figdata, tmp_path):
    a = render_figure("fig4", figdata, tmp_path / "a.png")
    b = render_figure("fig4", figdata, tmp_path / "b.png")
    assert (a.panel_count, a.series_count, a.x_range, a.y_range) == \
        (b.panel_count, b.series_count, b.x_range, b.y_range)


def test_missing_inputs_fail_cleanly(tmp_path):
    with pytest.raises(FigureDataError):
        render_figure("fig3a", tmp_path, tmp_path / "out.png")


def test_malformed_csv_fails_cleanly(tmp_path):
    bad = tmp_path / "fig3a_delta05.csv"
    bad.write_text("F,Ps\n0.5,not-a-number\n")
    with pytest.raises(FigureDataError):
        render_figure("fig3a", tmp_path, tmp_path / "out.png")
    wrong_header = tmp_path / "fig3a_delta07.csv"
    bad.write_text("x,y\n0.5,0.5\n")
    with pytest.raises(FigureDataError):
        render_figure("fig3a", tmp_path, tmp_path / "out.png")


def test_empty_csv_fails_cleanly(tmp_path):
    (tmp_path / "fig3a_delta05.csv").write_text("")
    with pytest.raises(FigureDataError):
        render_figure("fig3a", tmp_path, tmp_path / "out.png")


def test_cli_success_and_failure(figdata, tmp_path, capsys):
    assert main(["fig4", "--in", str(figdata),
                 "--out", str(tmp_path / "fig4.png")]) == 0
    assert "2 panel(s), 2 series" in capsys.readouterr().out
    assert main(["fig4", "--in", str(tmp_path / "nowhere"),
                 "--out", str(tmp_path / "x.png")]) == 2


def test_cli_rejects_unknown_figure():
    with pytest.raises(SystemExit) as err:
        main(["fig99", "--in", "x", "--out", "y"])
    assert err.value.code == 2
