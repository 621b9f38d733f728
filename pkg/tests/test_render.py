"""
tests/test_render.py

SVG output for one partition and for a rectangle family.
"""

import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from engine.partitions import Partition
from services.render import family_caption, render_family_svg, render_partition_svg, write_svg

SVG_NS = "{http://www.w3.org/2000/svg}"


def test_partition_svg_is_deterministic_and_well_formed():
    first = render_partition_svg(Partition((4, 3, 1)), 1, 0, 0)
    assert first == render_partition_svg(Partition((4, 3, 1)), 1, 0, 0)
    root = ET.fromstring(first.split("\n", 1)[1])
    assert root.tag == f"{SVG_NS}svg"
    assert root.attrib["version"] == "1.1"
    cells = root.findall(f"{SVG_NS}g/{SVG_NS}rect")
    assert len(cells) == 8


def test_partition_svg_labels():
    svg = render_partition_svg(Partition((4, 3, 1)), 1, 0, 0)
    assert "Durfee rectangle 1×2" in svg
    assert "enveloping 2×3" in svg
    assert "(4,3,1): Rect k=1 i=1 (l=1, n=0, m=0)" in svg
    assert 'stroke-dasharray="6,3"' in svg


def test_empty_partition_has_no_rectangles():
    svg = render_partition_svg(Partition(), 1, 0, 0)
    assert "Durfee rectangle" not in svg
    assert "enveloping" not in svg
    assert "(): Rect k=0 i=0" in svg


def test_family_caption():
    assert family_caption(2, 0, 2) == "Durfee rectangles k×(3k+2)"
    assert family_caption(0, 1, 0) == "Durfee rectangles (k+1)×k"


def test_family_svg():
    svg = render_family_svg(1, 0, 0, 2)
    for k in range(3):
        assert f">k={k}<" in svg
    assert "Durfee rectangles k×2k" in svg
    with pytest.raises(ValueError):
        render_family_svg(1, 0, 0, -1)
    with pytest.raises(ValueError):
        render_family_svg(-1, 0, 0, 1)


def test_write_svg(tmp_path, capsys):
    out = write_svg(render_family_svg(2, 1, 0, 1), tmp_path / "figs" / "family.svg")
    assert out.read_text(encoding="utf-8").startswith('<?xml version="1.0"')
    assert "[render] wrote" in capsys.readouterr().err


def test_partition_svg_matches_golden():
    golden = Path(__file__).parent / "golden" / "durfee_4_3_1_l1.svg"
    assert render_partition_svg(Partition((4, 3, 1)), 1, 0, 0) == golden.read_text(encoding="utf-8")
