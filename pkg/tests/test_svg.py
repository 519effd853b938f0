import re

import numpy as np
import pytest

from pcblend.svg import export_svg, project


def circles(path):
    return re.findall(r'<circle cx="([^"]+)" cy="([^"]+)"', path.read_text())


def test_center_point(tmp_path):
    export_svg(np.array([[0.5, 0.5, 0.5]]), "z", tmp_path / "a.svg", size=200)
    (c,) = circles(tmp_path / "a.svg")
    assert float(c[0]) == pytest.approx(100) and float(c[1]) == pytest.approx(100)


def test_line_along_axis_collapses(tmp_path):
    pts = np.column_stack([np.full(10, 0.2), np.full(10, 0.7), np.linspace(0, 1, 10)])
    export_svg(pts, "z", tmp_path / "a.svg")
    assert len(set(circles(tmp_path / "a.svg"))) == 1
    assert project(pts, "z").shape == (10, 2)


def test_marker_count_and_options(tmp_path, rng):
    export_svg(rng.random((100, 3)), "x", tmp_path / "a.svg", size=300, radius=2.5)
    text = (tmp_path / "a.svg").read_text()
    assert text.count("<circle") == 100
    assert 'width="300"' in text and 'r="2.5"' in text
    with pytest.raises(ValueError):
        export_svg(rng.random((3, 3)), "w", tmp_path / "b.svg")
