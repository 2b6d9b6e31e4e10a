import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from caustix.caustics import caustic_curve, compress_sample
from caustix.circle_map import reflection
from caustix.svg import SIZE, emit_scatter_svg, emit_svg

NS = "{http://www.w3.org/2000/svg}"


def curve_points(r, n=1, samples=512, compress=False):
    pts = caustic_curve(reflection(r), n, samples, compress=compress)
    return np.array([(s.x, s.y) for s in pts])


def path_coords(doc):
    for d in re.findall(r'<path d="([^"]+)"', doc):
        for x, y in re.findall(r"[ML](-?[\d.]+),(-?[\d.]+)", d):
            yield float(x), float(y)


def test_empty_plot_has_axes_and_circle():
    doc = emit_svg()
    root = ET.fromstring(doc.split("\n", 1)[1])
    assert root.get("version") == "1.1"
    assert root.get("viewBox") == f"0 0 {SIZE} {SIZE}"
    assert len(root.findall(f"{NS}line")) == 2
    assert len(root.findall(f"{NS}circle")) == 1
    assert not root.findall(f"{NS}path")


def test_output_is_deterministic():
    pts = curve_points(0.375)
    assert emit_svg([pts], source=(0.375, 0.0)) == emit_svg([pts.copy()], source=(0.375, 0.0))


def _max_radius(doc):
    c = SIZE / 2
    return max(math.hypot(x - c, y - c) for x, y in path_coords(doc)) / (SIZE / 4.4)


def test_caustic_below_one_third_stays_inside_the_unit_circle():
    assert _max_radius(emit_svg([curve_points(0.3)])) < 1.0 + 1e-3


def test_caustic_at_0375_is_bounded_and_leaves_the_disk_only_where_the_map_folds():
    doc = emit_svg([curve_points(0.375)], source=(0.375, 0.0))
    assert 'fill="#1f4e9c"' in doc  # source marker
    # x(0) = (f'(0) - 1)/(1 + f'(0)) with f'(0) = -0.2
    assert _max_radius(doc) == pytest.approx(1.5, abs=2e-3)


def test_compressed_caustic_reaches_the_infinity_circle_and_splits_there():
    pts = curve_points(1 / math.sqrt(2), samples=4096, compress=True)
    doc = emit_svg([pts], compressed=True)
    assert 'stroke-dasharray="6 4"' in doc
    c = SIZE / 2
    radii = [math.hypot(x - c, y - c) / (SIZE / 4.4) for x, y in path_coords(doc)]
    assert max(radii) == pytest.approx(2.0, abs=0.01)
    assert doc.count("<path") >= 2


def test_non_finite_points_break_the_polyline():
    pts = np.array([(0, 0), (0.1, 0.1), (math.nan, math.nan), (0.2, 0.2), (0.3, 0.3)])
    assert emit_svg([pts]).count("<path") == 2


def test_scatter_panel():
    doc = emit_scatter_svg([0.4, 0.5, math.nan], [0.1, -0.2, 0.0], (0.34, 0.99))
    ET.fromstring(doc.split("\n", 1)[1])
    assert doc.count("<circle") == 2
