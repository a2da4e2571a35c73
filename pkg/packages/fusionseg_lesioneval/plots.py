"""SVG line plots for ROC and PR curves."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, select_autoescape

WIDTH = 640
HEIGHT = 480
MARGIN = {"left": 64, "right": 24, "top": 40, "bottom": 56}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_env = Environment(
    loader=FileSystemLoader(Path(__file__).parent / "templates"),
    autoescape=select_autoescape(["svg", "j2"]),
    keep_trailing_newline=True,
)


def render_svg_curves(
    curves: Mapping[str, Sequence[tuple[float, float]]],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """
    Draw named point lists on unit axes as one standalone SVG document.

    Points outside [0, 1] are clamped to the frame.

    Example:
        >>> svg = render_svg_curves({"multimodal": [(0, 0), (1, 1)]}, "ROC", "FPR", "TPR")
        >>> svg.startswith("<svg")
        True
    """
    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def to_px(x: float, y: float) -> str:
        px = MARGIN["left"] + min(max(x, 0.0), 1.0) * plot_w
        py = MARGIN["top"] + (1.0 - min(max(y, 0.0), 1.0)) * plot_h
        return f"{px:.1f},{py:.1f}"

    series_list = [
        {
            "name": name,
            "color": PALETTE[i % len(PALETTE)],
            "points": " ".join(to_px(x, y) for x, y in points),
        }
        for i, (name, points) in enumerate(curves.items())
    ]
    ticks = [
        {
            "label": f"{v:.1f}",
            "x": MARGIN["left"] + v * plot_w,
            "y": MARGIN["top"] + (1.0 - v) * plot_h,
        }
        for v in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    ]
    return _env.get_template("curves.svg.j2").render(
        width=WIDTH,
        height=HEIGHT,
        left=MARGIN["left"],
        top=MARGIN["top"],
        plot_w=plot_w,
        plot_h=plot_h,
        title=title,
        xlabel=xlabel,
        ylabel=ylabel,
        ticks=ticks,
        series_list=series_list,
    )
