import re
import xml.etree.ElementTree as ET

import numpy as np

from chirpranging.plots import cdf_svg, heatmap_svg


def test_heatmap_is_valid_svg_with_data(tmp_path):
    m = np.arange(12, dtype=float).reshape(3, 4) / 10
    p = tmp_path / "h.svg"
    heatmap_svg(m, p, "t & <x>", 0.1, 0.1, 0.2)
    root = ET.parse(p).getroot()
    assert root.tag.endswith("svg")
    text = p.read_text()
    assert "<!-- row 2: " in text
    row = re.search(r"<!-- row 1: ([^>]*) -->", text).group(1).split()
    np.testing.assert_allclose([float(v) for v in row], m[1])


def test_cdf_is_deterministic(tmp_path):
    curves = {"a": [0.3, 0.1, 0.2], "b": [1.0]}
    cdf_svg(curves, tmp_path / "1.svg")
    cdf_svg(curves, tmp_path / "2.svg")
    assert (tmp_path / "1.svg").read_bytes() == (tmp_path / "2.svg").read_bytes()
    ET.parse(tmp_path / "1.svg")
    assert "curve a: n=3" in (tmp_path / "1.svg").read_text()
