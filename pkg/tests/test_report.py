import csv
import json
import re
from pathlib import Path

import pytest

from trafficarma.errors import EmptyResults, LengthMismatch
from trafficarma.report import render_plot_data, render_report

DATA = Path(__file__).parent / "data"

# published MSE values for datasets A and E
DATASET_A = [("A", (2, 1), 0.083902), ("A", (3, 0), 0.081404)]
DATASET_E = [("E", (2, 1), 0.08256), ("E", (3, 0), 0.099679)]


def test_dataset_a_rows_match_golden():
    assert render_report(DATASET_A, "text") == (DATA / "dataset_a_report.txt").read_text()


def test_dataset_e_winner_is_arma21():
    doc = json.loads(render_report(DATASET_E, "json"))
    assert doc["winners"] == {"E": [2, 1]}
    assert [r["mse"] for r in doc["rows"]] == [0.08256, 0.099679]


def test_single_entry_wins():
    text = render_report([("X", (1, 0), 0.5)], "text")
    assert text.splitlines()[-1] == "X       | ARMA(1,0)"


def test_csv_report_and_six_digits():
    rows = list(csv.reader(render_report(DATASET_A + [("B", (3, 0), 0.2419491234)], "csv").splitlines()))
    assert rows[0] == ["dataset", "order", "mse", "winner"]
    assert rows[1] == ["A", "ARMA(2,1)", "0.083902", "ARMA(3,0)"]
    assert rows[3] == ["B", "ARMA(3,0)", "0.241949", "ARMA(3,0)"]


def test_empty_report():
    with pytest.raises(EmptyResults):
        render_report([], "text")


def test_plot_identity_overlay(tmp_path):
    csv_path, svg_path = render_plot_data([0, 1], [0, 1], tmp_path / "plot.svg")
    lines = csv_path.read_text().splitlines()
    assert lines == ["t,actual,predicted", "0,0.0,0.0", "1,1.0,1.0"]
    svg = svg_path.read_text()
    assert 'width="960" height="480"' in svg
    polylines = re.findall(r'points="([^"]+)"', svg)
    assert len(polylines) == 2 and polylines[0] == polylines[1]
    assert "actual" in svg and "predicted" in svg


@pytest.mark.parametrize("n, max_labels", [(15, 15), (100, 20), (1, 1)])
def test_plot_tick_thinning(tmp_path, n, max_labels):
    _, svg_path = render_plot_data(range(n), [0.5] * n, tmp_path / "p")
    ticks = re.findall(r'class="xtick"', svg_path.read_text())
    assert 1 <= len(ticks) <= max_labels


def test_plot_length_mismatch(tmp_path):
    with pytest.raises(LengthMismatch):
        render_plot_data([1, 2], [1], tmp_path / "p")
