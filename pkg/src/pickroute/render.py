"""SVG drawing of a layout with an optional tour subgraph."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .exceptions import ContractViolation
from .layout import Intersection, PickInstance
from .tour import TourSubgraph, is_feasible

SCALE = 40
MARGIN = 30
OFFSET = 3  # half distance between the two strokes of a doubled edge


def _coords(instance: PickInstance):
    lay = instance.layout
    xs = [0.0]
    for g in lay.aisle_gaps:
        xs.append(xs[-1] + float(g))
    step = float(lay.cell_step)

    def point(v):
        a = v.aisle
        if isinstance(v, Intersection):
            pos = v.cross * (lay.cells_per_subaisle + 1)
        else:
            pos = v.subaisle * (lay.cells_per_subaisle + 1) + v.cell
        return MARGIN + xs[a] * SCALE, MARGIN + pos * step * SCALE

    width = 2 * MARGIN + xs[-1] * SCALE
    height = 2 * MARGIN + lay.num_blocks * (lay.cells_per_subaisle + 1) * step * SCALE
    return point, width, height


def _line(x1, y1, x2, y2, css):
    return (f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'class="{css}"/>')


def render_svg(instance: PickInstance, tour: TourSubgraph | None = None) -> str:
    """SVG text; multiplicity-2 edges are drawn as two parallel strokes."""
    if tour is not None:
        if tour.instance != instance:
            raise ContractViolation("tour belongs to a different instance")
        if not any(tour.mult) or not is_feasible(tour):
            raise ContractViolation("tour dump is empty or not a feasible tour subgraph")
    lay = instance.layout
    point, width, height = _coords(instance)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        "<style>.grid{stroke:#ccc;stroke-width:1}.tour{stroke:#c00;stroke-width:2}"
        ".pick{fill:#06c}.depot{fill:#090}</style>",
        f"<title>{escape(instance.digest)}</title>",
    ]
    endpoints = lay.endpoints
    for k in range(lay.num_edges):
        u, v = (point(lay.vertex_at(x)) for x in endpoints[k])
        out.append(_line(*u, *v, "grid"))
    if tour is not None:
        for k, m in enumerate(tour.mult):
            if not m:
                continue
            (x1, y1), (x2, y2) = (point(lay.vertex_at(x)) for x in endpoints[k])
            if m == 1:
                out.append(_line(x1, y1, x2, y2, "tour"))
                continue
            vertical = x1 == x2
            dx, dy = (OFFSET, 0) if vertical else (0, OFFSET)
            out.append(_line(x1 - dx, y1 - dy, x2 - dx, y2 - dy, "tour"))
            out.append(_line(x1 + dx, y1 + dy, x2 + dx, y2 + dy, "tour"))
    for p in instance.sorted_picks:
        x, y = point(p)
        out.append(f'<rect x="{x - 5:.2f}" y="{y - 5:.2f}" width="10" height="10" class="pick"/>')
    x, y = point(instance.depot)
    out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="7" class="depot"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

