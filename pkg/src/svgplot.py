"""
SVG rendering of a bargaining region in the (g_M, r) plane.

Solid curves are the expected-wealth bounds, dashed curves the variance
bounds, and the shaded polygons the combined region. Output is plain text
with fixed number formatting so identical reports give identical files.
"""
import math
from typing import List, Optional, Sequence, Tuple

from src.constants import PlotDefaults
from src.region_sweep import RegionReport

Point = Tuple[float, float]


class SVG:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: List[str] = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n',
            f'<svg version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
            f'xmlns="http://www.w3.org/2000/svg">\n',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n',
        ]

    @staticmethod
    def _points(points: Sequence[Point]) -> str:
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in points)

    def line(self, x1: float, y1: float, x2: float, y2: float, extra: str = "", stroke: str = "black") -> None:
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{stroke}" {extra}/>\n')

    def polyline(self, points: Sequence[Point], dashed: bool = False, css_class: str = "") -> None:
        dash = ' stroke-dasharray="6,4"' if dashed else ''
        cls = f' class="{css_class}"' if css_class else ''
        self.parts.append(
            f'<polyline{cls} points="{self._points(points)}" fill="none" stroke="black" stroke-width="1.5"{dash}/>\n')

    def polygon(self, points: Sequence[Point], fill: str) -> None:
        self.parts.append(f'<polygon class="region" points="{self._points(points)}" fill="{fill}" stroke="none"/>\n')

    def text(self, x: float, y: float, string: str, extra: str = "") -> None:
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-family="monospace" font-size="12" {extra}>{string}</text>\n')

    def get_svg(self) -> str:
        return "".join(self.parts) + "</svg>\n"


class RegionPlot:
    """Maps region coordinates to pixels and draws one report"""

    def __init__(self, g_min: float, g_max: float, r_max: float,
                 width: int = PlotDefaults.WIDTH, height: int = PlotDefaults.HEIGHT,
                 margin: int = PlotDefaults.MARGIN):
        self.g_min = g_min
        self.g_max = g_max
        self.r_max = r_max
        self.margin = margin
        self.plot_w = width - 2 * margin
        self.plot_h = height - 2 * margin
        self.svg = SVG(width, height)

    def px(self, g: float, r: float) -> Point:
        x = self.margin + (g - self.g_min) / (self.g_max - self.g_min) * self.plot_w
        y = self.margin + self.plot_h - r / self.r_max * self.plot_h
        return x, y

    def draw_axes(self, title: str) -> None:
        svg = self.svg
        n_g = int(math.floor((self.g_max - self.g_min) / PlotDefaults.G_TICK + 1e-9))
        first_tick = math.ceil(self.g_min / PlotDefaults.G_TICK - 1e-9)
        for i in range(first_tick, first_tick + n_g + 1):
            g = i * PlotDefaults.G_TICK
            if g > self.g_max + 1e-12:
                break
            x, y0 = self.px(g, 0.0)
            _, y1 = self.px(g, self.r_max)
            svg.line(x, y0, x, y1, 'stroke-dasharray="1,3" stroke-width="0.5"')
            svg.text(x - 12, y0 + 16, f"{g:.2f}")
        n_r = int(math.floor(self.r_max / PlotDefaults.R_TICK + 1e-9))
        for j in range(1, n_r + 1):
            r = j * PlotDefaults.R_TICK
            x0, y = self.px(self.g_min, r)
            x1, _ = self.px(self.g_max, r)
            svg.line(x0, y, x1, y, 'stroke-dasharray="1,3" stroke-width="0.5"')
            svg.text(x0 - 34, y + 4, f"{r:.1f}")
        ox, oy = self.px(self.g_min, 0.0)
        ex, _ = self.px(self.g_max, 0.0)
        _, ty = self.px(self.g_min, self.r_max)
        svg.line(ox, oy, ex, oy)
        svg.line(ox, oy, ox, ty)
        svg.text(ox + self.plot_w / 2 - 90, oy + 40, "expected growth rate g_M")
        svg.text(12, ty + self.plot_h / 2, "exchange ratio r",
                 f'transform="rotate(-90 12 {ty + self.plot_h / 2:.2f})"')
        svg.text(ox, self.margin - 20, title)

    def _segments(self, report: RegionReport, curve: str) -> List[List[Point]]:
        """Visible runs of one raw bound curve, broken where it leaves the frame"""
        segments, current = [], []
        for s in report.slices:
            value: Optional[float] = getattr(s.raw, curve) if s.valid else None
            if value is None or not math.isfinite(value) or value < 0.0 or value > self.r_max:
                if len(current) > 1:
                    segments.append(current)
                current = []
                continue
            current.append(self.px(s.g, value))
        if len(current) > 1:
            segments.append(current)
        return segments

    def draw_region(self, report: RegionReport) -> None:
        run: List[Tuple[float, float, float]] = []
        for s in report.slices + [None]:
            if s is not None and s.valid and not s.combined.empty:
                run.append((s.g, s.combined.lower, min(s.combined.upper, self.r_max)))
                continue
            if len(run) > 1:
                upper = [self.px(g, hi) for g, _, hi in run]
                lower = [self.px(g, min(lo, self.r_max)) for g, lo, _ in reversed(run)]
                self.svg.polygon(upper + lower, PlotDefaults.SHADE)
            elif run:
                # feasible at a single grid point
                g, lo, hi = run[0]
                x, y_lo = self.px(g, min(lo, self.r_max))
                _, y_hi = self.px(g, hi)
                self.svg.line(x, y_lo, x, y_hi, 'class="region" stroke-width="3"', stroke=PlotDefaults.SHADE)
            run = []

    def draw_curves(self, report: RegionReport) -> None:
        for curve in ("mean_lo", "mean_hi"):
            for segment in self._segments(report, curve):
                self.svg.polyline(segment, css_class=curve)
        if report.sigma > 0.0:
            for curve in ("var_lo", "var_hi"):
                for segment in self._segments(report, curve):
                    self.svg.polyline(segment, dashed=True, css_class=curve)


def render_region(report: RegionReport) -> str:
    """SVG text for one sigma; sigma = 0 gives the deterministic-growth baseline"""
    g_values = [s.g for s in report.slices]
    plot = RegionPlot(min(g_values), max(g_values), report.clamp_r_max)
    title = f"standard deviation of g_M: {report.sigma * 100:g}%"
    if not report.feasible:
        title += " (bargaining region empty)"
    plot.draw_region(report)
    plot.draw_axes(title)
    plot.draw_curves(report)
    return plot.svg.get_svg()
