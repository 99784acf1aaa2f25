"""SVG drawing of an instance, its grid and optionally a colored cover."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .model import ColoredCover, Instance

SCALE = 40.0
MARGIN = 1.5
_DASHES = ["", "6,3", "2,3", "8,3,2,3", "12,4", "1,2", "4,4", "10,2,2,2,2,2", "3,6"]


def hue_of(color: int, palette: list[int]) -> float:
    """Evenly spaced hue for ``color`` within the sorted distinct colors in use."""
    return 360.0 * palette.index(color) / max(1, len(palette))


def render_svg(inst: Instance, cover: ColoredCover | None = None, tau: float = 2.0) -> str:
    xs = [p.x for p in inst.points] + [d.center.x for d in inst.disks]
    ys = [p.y for p in inst.points] + [d.center.y for d in inst.disks]
    for s in inst.segments:
        xs += [s.a.x, s.b.x]
        ys += [s.a.y, s.b.y]
    if inst.region is not None:
        xs += [inst.region.xmin, inst.region.xmax]
        ys += [inst.region.ymin, inst.region.ymax]
    x1 = max(xs, default=0.0) + MARGIN
    y1 = max(ys, default=0.0) + MARGIN
    x0 = min(0.0, min(xs, default=0.0) - MARGIN)
    y0 = min(0.0, min(ys, default=0.0) - MARGIN)
    w, h = (x1 - x0) * SCALE, (y1 - y0) * SCALE

    def X(x):
        return f"{(x - x0) * SCALE:.2f}"

    def Y(y):
        return f"{(y1 - y) * SCALE:.2f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
           f'viewBox="0 0 {w:.2f} {h:.2f}">',
           f'<rect x="0" y="0" width="{w:.2f}" height="{h:.2f}" fill="white"/>']

    # grid lines at multiples of tau, with cell ids
    out.append('<g class="grid" stroke="#bbb" stroke-width="0.5">')
    for i in range(0, int(math.floor(x1 / tau)) + 1):
        out.append(f'<line x1="{X(i * tau)}" y1="{Y(max(y0, 0.0))}" x2="{X(i * tau)}" y2="{Y(y1)}"/>')
    for j in range(0, int(math.floor(y1 / tau)) + 1):
        out.append(f'<line x1="{X(max(x0, 0.0))}" y1="{Y(j * tau)}" x2="{X(x1)}" y2="{Y(j * tau)}"/>')
    out.append("</g>")
    out.append('<g class="cells" font-size="9" fill="#888" font-family="sans-serif">')
    for i in range(0, int(math.ceil(x1 / tau))):
        for j in range(0, int(math.ceil(y1 / tau))):
            out.append(f'<text x="{X(i * tau + 0.08)}" y="{Y((j + 1) * tau - 0.3)}">'
                       f'{escape(f"({i},{j})")}</text>')
    out.append("</g>")

    if inst.region is not None:
        r = inst.region
        out.append(f'<rect class="region" x="{X(r.xmin)}" y="{Y(r.ymax)}" width="{(r.xmax - r.xmin) * SCALE:.2f}" '
                   f'height="{(r.ymax - r.ymin) * SCALE:.2f}" fill="#eee" stroke="#555" stroke-dasharray="4,2"/>')
    for s in inst.segments:
        out.append(f'<line class="segment" x1="{X(s.a.x)}" y1="{Y(s.a.y)}" x2="{X(s.b.x)}" y2="{Y(s.b.y)}" '
                   f'stroke="black" stroke-width="2"/>')

    k = max(1, inst.k)
    chi = cover.chi if cover is not None else {}
    palette = sorted(set(chi.values()))
    out.append('<g class="disks">')
    for idx, d in enumerate(inst.disks):
        cx, cy = X(d.center.x), Y(d.center.y)
        if idx in chi:
            c = chi[idx]
            dash = _DASHES[(c // k) % len(_DASHES)]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            hue = hue_of(c, palette)
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{SCALE:.2f}" data-disk="{idx}" data-color="{c}" '
                       f'fill="hsl({hue:.1f},70%,55%)" fill-opacity="0.35" '
                       f'stroke="hsl({hue:.1f},70%,35%)" stroke-width="1.5"{dash_attr}/>')
        else:
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{SCALE:.2f}" data-disk="{idx}" fill="none" '
                       f'stroke="#999" stroke-width="0.7"/>')
    out.append("</g>")
    out.append('<g class="points" fill="black">')
    for p in inst.points:
        out.append(f'<circle cx="{X(p.x)}" cy="{Y(p.y)}" r="2"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
