import os
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from osnbehavior.binning import Histogram, Pattern
from osnbehavior.errors import DomainError
from osnbehavior.gmm import GmmFit
from osnbehavior.loggrowth import LogGrowthFit
from osnbehavior.records import RetweetObservation
from osnbehavior.render import (
    FigureSpec,
    render_growth_figure,
    render_histogram,
    render_user_figure,
)

GOLDEN = Path(__file__).parent / "golden"
SVG_NS = "{http://www.w3.org/2000/svg}"

COUNTS = (0, 0, 1, 0, 2, 5, 14, 40, 88, 121, 130, 97, 55, 30, 22, 41, 90, 160, 201, 170, 96, 38, 9, 2)
DAILY = Histogram(Pattern.daily(), tuple(float(i) for i in range(25)), COUNTS, sum(COUNTS))
USER_FIT = GmmFit(0.46, 9.8, 1.6, 0.54, 18.7, 1.3, n_events=sum(COUNTS))
SERIES = [RetweetObservation("m1", t, n) for t, n in
          [(0, 2), (0.5, 6), (1, 9), (2, 12), (4, 15), (8, 18), (12, 20), (24, 23), (36, 24), (48, 25)]]
GROWTH_FIT = LogGrowthFit(3.1, 0.6, 3.4)


def _check_golden(name, text):
    path = GOLDEN / name
    if os.environ.get("UPDATE_GOLDEN"):
        path.write_text(text, encoding="utf-8")
    assert text.encode("utf-8") == path.read_bytes()


def _parse(text):
    root = ET.fromstring(text.encode("utf-8"))
    assert root.tag == f"{SVG_NS}svg"
    return root


def _self_contained(text):
    assert "href" not in text and "url(" not in text and "<image" not in text


def _points(poly):
    return [tuple(map(float, p.split(","))) for p in poly.get("points").split()]


def test_user_figure_golden():
    _check_golden("user_figure.svg", render_user_figure(DAILY, USER_FIT))


def test_growth_figure_golden():
    _check_golden("growth_figure.svg", render_growth_figure(SERIES, GROWTH_FIT))


def test_user_figure_structure():
    text = render_user_figure(DAILY, USER_FIT)
    root = _parse(text)
    _self_contained(text)
    rects = root.findall(f".//{SVG_NS}rect")
    assert len(rects) == 24
    assert all(r.get("class") == "bar" for r in rects)
    (curve,) = root.findall(f".//{SVG_NS}polyline[@class='model']")
    assert curve.get("stroke-dasharray") == "6,4"
    pts = _points(curve)
    assert len(pts) >= 241
    assert pts[0][0] == 64.0 and pts[-1][0] == 620.0
    labels = [t.text for t in root.iter(f"{SVG_NS}text")]
    assert "hour of day" in labels and "message count" in labels
    assert "0" in labels and "24" in labels


def test_user_figure_zero_histogram():
    empty = Histogram(Pattern.daily(), DAILY.edges, (0,) * 24, 0)
    root = _parse(render_user_figure(empty, USER_FIT))
    rects = root.findall(f".//{SVG_NS}rect")
    assert len(rects) == 24 and {r.get("height") for r in rects} == {"0.00"}
    assert root.find(f".//{SVG_NS}polyline[@class='model']") is not None


def test_user_figure_deterministic():
    assert render_user_figure(DAILY, USER_FIT) == render_user_figure(DAILY, USER_FIT)


def test_user_figure_requires_daily():
    weekly = Histogram(Pattern.weekly(), tuple(float(i) for i in range(8)), (1,) * 7, 7)
    with pytest.raises(DomainError):
        render_user_figure(weekly, USER_FIT)


def test_weekly_bars_without_curve():
    weekly = Histogram(Pattern.weekly(), tuple(float(i) for i in range(8)), (3, 1, 4, 1, 5, 9, 2), 25)
    root = _parse(render_histogram(weekly))
    assert len(root.findall(f".//{SVG_NS}rect")) == 7
    assert root.find(f".//{SVG_NS}polyline") is None


def test_growth_figure_structure():
    text = render_growth_figure(SERIES, GROWTH_FIT)
    root = _parse(text)
    _self_contained(text)
    (observed,) = root.findall(f".//{SVG_NS}polyline[@class='observed']")
    assert observed.get("stroke-dasharray") is None
    (model,) = root.findall(f".//{SVG_NS}polyline[@class='model']")
    assert model.get("stroke-dasharray") == "6,4"
    assert len(_points(model)) == 200
    assert len(root.findall(f".//{SVG_NS}circle")) == len(SERIES)


def test_growth_single_observation():
    root = _parse(render_growth_figure([RetweetObservation("m", 5.0, 4)], GROWTH_FIT))
    assert root.find(f".//{SVG_NS}polyline[@class='observed']") is None
    assert len(root.findall(f".//{SVG_NS}circle")) == 1
    pts = _points(root.find(f".//{SVG_NS}polyline[@class='model']"))
    assert pts[0][0] == 64.0 and pts[-1][0] == 620.0


@pytest.mark.parametrize("fit", [GROWTH_FIT, LogGrowthFit(1.0, 1.0, 0.0), LogGrowthFit(9.0, 1.0, 5.0)])
def test_growth_y_range_covers_data_and_model(fit):
    root = _parse(render_growth_figure(SERIES, fit))
    ys = [float(c.get("cy")) for c in root.iter(f"{SVG_NS}circle")]
    ys += [y for _, y in _points(root.find(f".//{SVG_NS}polyline[@class='model']"))]
    top, bottom = 36.0, 428.0
    # max(observed, predicted) sits at 1/1.05 of the plot height
    assert min(ys) == pytest.approx(bottom - (bottom - top) / 1.05, abs=0.01)
    assert max(ys) <= bottom + 1e-9


def test_growth_requires_data():
    with pytest.raises(DomainError):
        render_growth_figure([], GROWTH_FIT)


def test_custom_figure_size_and_escaping():
    spec = FigureSpec(width=300, height=200, title="<u1> & co", x_label="h", y_label="n")
    text = render_user_figure(DAILY, USER_FIT, spec)
    root = _parse(text)
    assert root.get("width") == "300" and root.get("height") == "200"
    assert "&lt;u1&gt; &amp; co" in text
    with pytest.raises(DomainError):
        FigureSpec(width=99)


def test_no_nondeterministic_content():
    text = render_growth_figure(SERIES, GROWTH_FIT)
    assert not re.search(r"\d{4}-\d{2}-\d{2}", text)
