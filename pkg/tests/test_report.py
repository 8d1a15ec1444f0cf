import xml.etree.ElementTree as ET

import pytest

from vflcost.errors import ConfigError
from vflcost.plotting import render_figure
from vflcost.report import (
    SweepResult,
    SweepRow,
    emit_csv,
    emit_svg_chart,
    parse_sweep_csv,
)


def small_sweep(kind="r", n=3):
    rows = []
    for i in range(n):
        losses = {"CL/CI": 0.91 + 0.01 * i, "CL/DI": 0.93 + 0.012 * i,
                  "DL/CI": 0.92 + 0.011 * i, "DL/DI": 0.97}
        rows.append(SweepRow(sweep_value=i / max(n - 1, 1), losses=losses,
                             mechanism_s=0.1 * i if kind == "eps" else None))
    label = "privacy budget (bits)" if kind == "eps" else \
        "feature mutual information (bits)"
    return SweepResult(kind=kind, axis_label=label, rows=tuple(rows))


class TestCsv:
    def test_three_rows_make_four_lines(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_csv(small_sweep(), str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "sweep_value,clci_bits,cldi_bits,dlci_bits,dldi_bits"

    def test_eps_kind_adds_mechanism_column(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_csv(small_sweep(kind="eps"), str(path))
        header = path.read_text().splitlines()[0]
        assert header.endswith(",mechanism_s")

    def test_roundtrip_within_formatting_precision(self, tmp_path):
        path = tmp_path / "out.csv"
        result = small_sweep(kind="eps")
        emit_csv(result, str(path))
        back = parse_sweep_csv(str(path))
        assert back.kind == "eps"
        for row, orig in zip(back.rows, result.rows):
            assert row.sweep_value == pytest.approx(orig.sweep_value, abs=1e-12)
            for code, v in orig.losses.items():
                assert row.losses[code] == pytest.approx(v, abs=1e-12)
            assert row.mechanism_s == pytest.approx(orig.mechanism_s, abs=1e-12)

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(small_sweep(), str(a))
        emit_csv(small_sweep(), str(b))
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()

    def test_write_failure_reports_path(self, tmp_path):
        from vflcost.errors import OutputError
        bad = tmp_path / "missing" / "out.csv"
        with pytest.raises(OutputError, match="missing"):
            emit_csv(small_sweep(), str(bad))


class TestSvgChart:
    def test_well_formed_with_four_polylines(self, tmp_path):
        path = tmp_path / "chart.svg"
        emit_svg_chart(small_sweep(n=5), str(path))
        root = ET.parse(path).getroot()
        ns = "{http://www.w3.org/2000/svg}"
        polylines = root.findall(f"{ns}polyline")
        assert len(polylines) == 4
        texts = [t.text for t in root.findall(f"{ns}text")]
        for code in ("CL/CI", "CL/DI", "DL/CI", "DL/DI"):
            assert code in texts
        assert "predictive loss (bits)" in texts
        assert "feature mutual information (bits)" in texts

    def test_constant_series_renders_horizontal(self, tmp_path):
        path = tmp_path / "chart.svg"
        emit_svg_chart(small_sweep(n=6), str(path))
        root = ET.parse(path).getroot()
        ns = "{http://www.w3.org/2000/svg}"
        flat = root.findall(f"{ns}polyline")[3]  # DL/DI held constant above
        ys = {pt.split(",")[1] for pt in flat.attrib["points"].split()}
        assert len(ys) == 1

    def test_bounds_have_five_percent_padding(self, tmp_path):
        result = small_sweep(n=4)
        path = tmp_path / "chart.svg"
        emit_svg_chart(result, str(path))
        root = ET.parse(path).getroot()
        ns = "{http://www.w3.org/2000/svg}"
        pts = []
        for pl in root.findall(f"{ns}polyline")[:4]:
            pts += [tuple(map(float, p.split(","))) for p in
                    pl.attrib["points"].split()]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        # data min/max must sit strictly inside the axes box (the padding),
        # at 5% of the span from the edges
        x_span = max(xs) - min(xs)
        y_span = max(ys) - min(ys)
        assert min(xs) > 72 and max(xs) < 640 - 20
        assert min(ys) > 20 and max(ys) < 420 - 52
        assert min(xs) - 72 == pytest.approx(0.05 / 1.1 * (640 - 92), rel=0.02)

    def test_needs_two_rows(self, tmp_path):
        with pytest.raises(ConfigError):
            emit_svg_chart(small_sweep(n=1), str(tmp_path / "x.svg"))


class TestFigure:
    def test_renders_nonempty_png(self, tmp_path):
        path = tmp_path / "fig.png"
        render_figure(small_sweep(n=5), str(path))
        data = path.read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"
        assert len(data) > 1000
