"""SVG emitter tests: structure, baseline, ordering, determinism."""

import xml.etree.ElementTree as ET

import pytest

from raes import render_svg


def polylines(path):
    root = ET.parse(path).getroot()
    ns = "{http://www.w3.org/2000/svg}"
    out = []
    for el in root.iter(f"{ns}polyline"):
        pts = [p.split(",") for p in el.attrib["points"].split()]
        out.append([(float(x), float(y)) for x, y in pts])
    return out


def test_requires_nonempty_series(tmp_path):
    with pytest.raises(ValueError):
        render_svg({}, str(tmp_path / "x.svg"))
    with pytest.raises(ValueError):
        render_svg({"a": []}, str(tmp_path / "x.svg"))


def test_valid_svg_prefix_and_xml(tmp_path):
    p = tmp_path / "chart.svg"
    render_svg({"one": [1.0, 2.0, 3.0]}, str(p), title="demo <&>")
    text = p.read_text()
    assert text.startswith("<svg")
    root = ET.parse(str(p)).getroot()
    assert root.tag.endswith("svg")
    assert "demo <&>" in " ".join(el.text or "" for el in root.iter())


def test_flat_zero_series_sits_on_the_baseline(tmp_path):
    p = tmp_path / "flat.svg"
    render_svg({"zero": [0.0] * 10}, str(p))
    (line,) = polylines(str(p))
    ys = {y for _, y in line}
    assert len(ys) == 1
    # Baseline is the x axis: top margin plus plot height.
    assert ys.pop() == pytest.approx(520 - 48, abs=0.01)


def test_dominating_series_never_plots_below(tmp_path):
    p = tmp_path / "pair.svg"
    a = [float(2 * t) for t in range(1, 30)]
    b = [float(t) for t in range(1, 30)]
    render_svg({"a": a, "b": b}, str(p))
    line_a, line_b = polylines(str(p))
    # Larger regret means smaller pixel y; dominance must survive rounding.
    for (_, ya), (_, yb) in zip(line_a, line_b):
        assert ya <= yb + 0.011


def test_byte_identical_rerenders(tmp_path):
    series = {"s1": [0.5, 1.5, 4.0], "s2": [1.0, 1.0, 1.0]}
    p1 = tmp_path / "one.svg"
    p2 = tmp_path / "two.svg"
    render_svg(series, str(p1))
    render_svg(series, str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_legend_lists_every_label(tmp_path):
    p = tmp_path / "legend.svg"
    render_svg({"alpha": [1.0], "beta": [2.0]}, str(p))
    root = ET.parse(str(p)).getroot()
    texts = {el.text for el in root.iter() if el.text}
    assert {"alpha", "beta"} <= texts
