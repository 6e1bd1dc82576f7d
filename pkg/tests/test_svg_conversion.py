import pytest

from cellgeom import build_cell
from moduli import TorusParams
from svg_conversion import PADDING, cell_to_svg, fmt, to_screen


def test_fmt():
    assert fmt(1) == "1.000000"
    assert fmt(-0.1234567) == "-0.123457"


def test_to_screen_flips_the_y_axis():
    assert to_screen(0.0, 0.0, 10.0, 100) == (50.0, 50.0)
    assert to_screen(1.0, 2.0, 10.0, 100) == (60.0, 30.0)


def test_cell_fits_the_canvas():
    cell = build_cell(TorusParams(0.2, 1.6))
    svg = cell_to_svg(cell, size=300)
    circles = [line for line in svg.splitlines() if line.startswith("<circle")]
    radii = sorted(float(line.split(' r="')[1].split('"')[0]) for line in circles)
    assert radii[1] == pytest.approx(300 * (1 - 2 * PADDING) / 2, abs=1e-6)
    assert radii[0] == pytest.approx(radii[1] * cell.r1 / cell.r2, abs=1e-5)
    assert svg.endswith("</svg>\n")


def test_square_cell_has_four_corners():
    svg = cell_to_svg(build_cell(TorusParams.square()), size=100)
    polygon = next(line for line in svg.splitlines() if line.startswith("<polygon"))
    assert len(polygon.split('points="')[1].split('"')[0].split()) == 4


def test_canvas_size_must_be_positive():
    with pytest.raises(ValueError):
        cell_to_svg(build_cell(TorusParams.square()), size=0)
