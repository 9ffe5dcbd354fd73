import os

import pytest

from ltgf.plotting import emit_plot_script, render_figure
from ltgf.simulator import ExperimentConfig, analytic_rows, epsilon_grid, run_experiment


@pytest.fixture(scope="module")
def rows():
    return run_experiment(ExperimentConfig(trials=20))


def test_script_has_one_panel_per_q(tmp_path, rows):
    script = tmp_path / "fig.gp"
    emit_plot_script(rows, script, tmp_path / "out.csv")
    text = script.read_text()
    assert text.count("set title") == 4
    assert "set multiplot layout 2,2" in text
    assert "set logscale y" in text
    assert "'out.csv'" in text
    for pt in ("pt 8 ", "pt 10 ", "pt 6 ", "pt 3 "):
        assert pt in text


def test_single_panel(tmp_path):
    script = tmp_path / "a.gp"
    emit_plot_script(analytic_rows(20, (4,), epsilon_grid(0.05, 0.01)), script, tmp_path / "a.csv")
    text = script.read_text()
    assert text.count("set title") == 1 and "layout 1,1" in text


def test_csv_path_relative_to_script(tmp_path, rows):
    (tmp_path / "plots").mkdir()
    script = tmp_path / "plots" / "fig.gp"
    emit_plot_script(rows, script, tmp_path / "data" / "r.csv")
    assert f"'{os.path.join('..', 'data', 'r.csv')}'" in script.read_text()


def test_empty_rows_rejected(tmp_path):
    with pytest.raises(ValueError):
        emit_plot_script([], tmp_path / "x.gp", tmp_path / "x.csv")


def test_figure_rendered(tmp_path, rows):
    out = tmp_path / "fig.png"
    render_figure(rows, out)
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
