import csv
import hashlib
from pathlib import Path

import pytest

from halfwave_figures import FigureKind, FigureSpec, SchemaError, plot
from halfwave_figures.cli import main
from halfwave_figures.schemas import read_probe_csv, read_series_csv

ROOT = Path(__file__).resolve().parents[1]
SAMPLES = ROOT / "sample_data"
GOLDEN = ROOT / "golden"

CASES = [
    (FigureKind.SEPARATION_CURVES, SAMPLES / "series_sample.csv", "separation_curves.svg"),
    (FigureKind.SCALING_LOGLOG, SAMPLES / "scaling_sample.csv", "scaling_loglog.svg"),
    (FigureKind.RATIO_PANEL, SAMPLES / "scaling_sample.csv", "ratio_panel.svg"),
]


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.mark.parametrize("kind,sample,golden_name", CASES,
                         ids=[k.value for k, _, _ in CASES])
def test_golden_regeneration_byte_stable(kind, sample, golden_name, tmp_path):
    out = tmp_path / golden_name
    plot(FigureSpec(input_csv=sample, kind=kind, output=out))
    assert out.read_bytes() == (GOLDEN / golden_name).read_bytes()


@pytest.mark.parametrize("kind,sample,golden_name", CASES,
                         ids=[k.value for k, _, _ in CASES])
def test_inputs_left_unchanged(kind, sample, golden_name, tmp_path):
    before = sha256(sample)
    plot(FigureSpec(input_csv=sample, kind=kind, output=tmp_path / "out.svg"))
    assert sha256(sample) == before


def test_two_renders_identical(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        plot(FigureSpec(input_csv=SAMPLES / "scaling_sample.csv",
                        kind=FigureKind.SCALING_LOGLOG, output=out))
    assert a.read_bytes() == b.read_bytes()


def test_annotation_matches_csv_slope_to_3_decimals():
    table = read_probe_csv(SAMPLES / "scaling_sample.csv")
    slope = table.rows[0]["fitted_slope"]
    text = (GOLDEN / "scaling_loglog.svg").read_text()
    assert f"fitted slope = {slope:.3f}" in text
    assert f"predicted {table.rows[0]['predicted_exponent']:.3f}" in text


def test_empty_but_valid_csv_renders_no_data(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("eps,s,sigma,quantity,value,predicted_exponent,fitted_slope,r2\n")
    out = tmp_path / "empty.svg"
    rc = main(["scaling-loglog", "--in", str(empty), "--out", str(out)])
    assert rc == 0
    assert "no data" in out.read_text()


def test_empty_series_renders_no_data(tmp_path):
    empty = tmp_path / "series.csv"
    empty.write_text("t,mass\n")
    out = tmp_path / "empty_series.svg"
    plot(FigureSpec(input_csv=empty, kind=FigureKind.SEPARATION_CURVES, output=out))
    assert "no data" in out.read_text()


class TestSchemaErrors:
    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("eps,s,sigma,quantity,value,predicted_exponent,r2\n")
        with pytest.raises(SchemaError, match="fitted_slope"):
            read_probe_csv(bad)

    def test_unexpected_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "eps,s,sigma,quantity,value,predicted_exponent,fitted_slope,r2,bonus\n")
        with pytest.raises(SchemaError, match="bonus"):
            read_probe_csv(bad)

    def test_non_numeric_cell_names_column(self, tmp_path):
        bad = tmp_path / "bad.csv"
        with open(bad, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eps", "s", "sigma", "quantity", "value",
                             "predicted_exponent", "fitted_slope", "r2"])
            writer.writerow(["0.1", "0.4", "0.6", "q", "oops", "0.58", "0.5", "1.0"])
        with pytest.raises(SchemaError, match="'value'"):
            read_probe_csv(bad)

    def test_series_requires_t_first(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,mass\n0.0,1.0\n")
        with pytest.raises(SchemaError, match="'t'"):
            read_series_csv(bad)

    def test_cli_exit_code_on_schema_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("eps,value\n")
        rc = main(["scaling-loglog", "--in", str(bad), "--out", str(tmp_path / "x.svg")])
        assert rc == 2
        assert "schema error" in capsys.readouterr().err

    def test_missing_input_file(self, tmp_path):
        with pytest.raises(SchemaError, match="does not exist"):
            FigureSpec(input_csv=tmp_path / "ghost.csv",
                       kind=FigureKind.RATIO_PANEL, output=tmp_path / "o.svg")


def test_style_file_changes_output_deterministically(tmp_path):
    style = tmp_path / "style.cfg"
    style.write_text("figure.figsize = 5.0, 3.0\n")
    outs = []
    for name in ("a.svg", "b.svg"):
        out = tmp_path / name
        rc = main(["ratio-panel", "--in", str(SAMPLES / "scaling_sample.csv"),
                   "--out", str(out), "--style", str(style)])
        assert rc == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != (GOLDEN / "ratio_panel.svg").read_bytes()
