"""Static SVG and CSV output for index regions and bootstrap paths."""

from __future__ import annotations

import csv
import io
from typing import Optional
from xml.sax.saxutils import escape

from .bootstrap import BootstrapPath
from .operators import OperatorClass, RegionPolygon, region_polygon
from .spaces import fmt_rat

WIDTH, HEIGHT, PAD = 480, 360, 48


class _Frame:
    """Affine map from the (sigma, 1/a) plane to SVG pixels."""

    def __init__(self, xs, ys):
        x0, x1 = float(min(xs)), float(max(xs))
        y0, y1 = float(min(ys)), float(max(ys))
        if x1 - x0 < 1e-9:
            x0, x1 = x0 - 1, x1 + 1
        if y1 - y0 < 1e-9:
            y0, y1 = y0 - 0.25, y1 + 0.25
        mx, my = 0.08 * (x1 - x0), 0.08 * (y1 - y0)
        self.x0, self.x1, self.y0, self.y1 = x0 - mx, x1 + mx, y0 - my, y1 + my

    def px(self, x, y) -> tuple[float, float]:
        u = PAD + (float(x) - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * PAD)
        v = HEIGHT - PAD - (float(y) - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * PAD)
        return round(u, 2), round(v, 2)


def _axes(fr: _Frame, title: str) -> list[str]:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<text x="{WIDTH - PAD}" y="{HEIGHT - PAD + 28}" text-anchor="end" font-size="12">sigma</text>',
        f'<text x="{PAD - 30}" y="{PAD - 8}" font-size="12">1/a</text>',
    ]
    for val in (fr.x0, fr.x1):
        u, _ = fr.px(val, fr.y0)
        out.append(f'<text x="{u}" y="{HEIGHT - PAD + 14}" text-anchor="middle" font-size="10">{val:.3g}</text>')
    for val in (fr.y0, fr.y1):
        _, v = fr.px(fr.x0, val)
        out.append(f'<text x="{PAD - 4}" y="{v}" text-anchor="end" font-size="10">{val:.3g}</text>')
    return out


def _region(fr: _Frame, poly: RegionPolygon) -> list[str]:
    out = []
    if poly.shape == "polygon":
        pts = " ".join(f"{u},{v}" for u, v in (fr.px(*p) for p in poly.vertices))
        out.append(f'<polygon points="{pts}" fill="#cfe3f7" stroke="none"/>')
    for e in poly.edges:
        (u1, v1), (u2, v2) = fr.px(*e.start), fr.px(*e.end)
        dash = ' stroke-dasharray="5,3"' if e.fine_caveat else ""
        out.append(
            f'<line x1="{u1}" y1="{v1}" x2="{u2}" y2="{v2}" stroke="#1f4e79" stroke-width="2"{dash}>'
            f"<title>{escape(e.constraint)}</title></line>"
        )
    for x, y in poly.vertices:
        u, v = fr.px(x, y)
        out.append(f'<circle cx="{u}" cy="{v}" r="3" fill="#1f4e79"/>')
        out.append(f'<text x="{u + 5}" y="{v - 5}" font-size="9">({fmt_rat(x)},{fmt_rat(y)})</text>')
    return out


def region_svg(op: OperatorClass, poly: Optional[RegionPolygon] = None) -> str:
    poly = poly or region_polygon(op)
    xs = [v[0] for v in poly.vertices]
    ys = [v[1] for v in poly.vertices]
    fr = _Frame(xs, ys)
    title = f"S^{op.d}_{op.d0}({op.coeff})"
    return "\n".join(_axes(fr, title) + _region(fr, poly) + ["</svg>"]) + "\n"


def region_csv(poly: RegionPolygon) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "sigma", "inv_a", "next_edge", "fine_caveat"])
    for i, (x, y) in enumerate(poly.vertices):
        edge = poly.edges[i] if i < len(poly.edges) else None
        w.writerow([i, fmt_rat(x), fmt_rat(y), edge.constraint if edge else "", int(edge.fine_caveat) if edge else ""])
    return buf.getvalue()


def bootstrap_svg(path: BootstrapPath) -> str:
    poly = region_polygon(path.op)
    tri = path.triples
    xs = [v[0] for v in poly.vertices] + [t.sigma for t in tri]
    ys = [v[1] for v in poly.vertices] + [t.inv_a for t in tri]
    fr = _Frame(xs, ys)
    out = _axes(fr, f"bootstrap to {path.target} in S^{path.op.d}_{path.op.d0}({path.op.coeff})")
    out += _region(fr, poly)
    out.append(
        '<defs><marker id="arr" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto">'
        '<path d="M0,0 L8,4 L0,8 z" fill="#b03a2e"/></marker></defs>'
    )
    for st in path.steps:
        (u1, v1), (u2, v2) = fr.px(st.source.sigma, st.source.inv_a), fr.px(st.dest.sigma, st.dest.inv_a)
        out.append(
            f'<line x1="{u1}" y1="{v1}" x2="{u2}" y2="{v2}" stroke="#b03a2e" stroke-width="1.6" marker-end="url(#arr)">'
            f"<title>{st.stage}</title></line>"
        )
    for t in tri:
        u, v = fr.px(t.sigma, t.inv_a)
        out.append(f'<circle cx="{u}" cy="{v}" r="3.5" fill="#b03a2e"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bootstrap_csv(path: BootstrapPath) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "sigma", "inv_a", "inv_b", "stage"])
    labels = [""] + path.stage_labels
    for i, (t, lab) in enumerate(zip(path.triples, labels)):
        w.writerow([i, fmt_rat(t.sigma), fmt_rat(t.inv_a), "" if t.inv_b is None else fmt_rat(t.inv_b), lab])
    return buf.getvalue()

