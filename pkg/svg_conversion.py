from typing import Iterable, Tuple

from cellgeom import VoronoiCell

SVG_HEADER = '<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">'
PADDING = 0.08


def fmt(value: float) -> str:
    """Format a coordinate with 6 decimals."""
    return f"{value:.6f}"


def to_screen(x: float, y: float, scale: float, size: int) -> Tuple[float, float]:
    """
    Map plane coordinates to SVG coordinates: origin at the middle of the canvas, y pointing up.

    :param x: The plane x coordinate
    :param y: The plane y coordinate
    :param scale: Pixels per plane unit
    :param size: The width and height of the canvas
    :return: The SVG (x, y) pair
    """
    half = size / 2
    return half + scale * x, half - scale * y


def polygon_element(points: Iterable[Tuple[float, float]], scale: float, size: int) -> str:
    coords = " ".join(",".join(fmt(c) for c in to_screen(x, y, scale, size)) for x, y in points)
    return f'<polygon points="{coords}" fill="#dde6f2" stroke="#1f3b63" stroke-width="2"/>'


def circle_element(radius: float, scale: float, size: int, color: str) -> str:
    cx, cy = to_screen(0.0, 0.0, scale, size)
    return (f'<circle cx="{fmt(cx)}" cy="{fmt(cy)}" r="{fmt(scale * radius)}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>')


def axes_elements(size: int) -> str:
    half = fmt(size / 2)
    return "\n".join([
        f'<line x1="0.000000" y1="{half}" x2="{fmt(size)}" y2="{half}" stroke="#999999" stroke-width="1"/>',
        f'<line x1="{half}" y1="0.000000" x2="{half}" y2="{fmt(size)}" stroke="#999999" stroke-width="1"/>',
    ])


def cell_to_svg(cell: VoronoiCell, size: int = 480) -> str:
    """
    Draw a Voronoi cell with its incircle and circumcircle, centered on the canvas.

    :param cell: The cell to draw
    :param size: (optional) The width and height of the square canvas in pixels
    :return: An SVG document as a string
    """
    if size <= 0:
        raise ValueError(f"Canvas size must be positive, got {size}")
    scale = size * (1 - 2 * PADDING) / (2 * cell.r2)
    parts = [
        SVG_HEADER.format(size=size),
        axes_elements(size),
        polygon_element(cell.to_list(), scale, size),
        circle_element(cell.r1, scale, size, "#2a9d5c"),
        circle_element(cell.r2, scale, size, "#c0392b"),
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
