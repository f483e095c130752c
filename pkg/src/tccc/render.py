"""SVG rendering of two-dimensional twisted polytope sheaves.

Draws the shard boundary lines, the twisted polytope edges with short
co-orientation hairs (pointing to the side where the shard lives), and
colors every region of the induced arrangement by its stalk: green for a
line in degree 0, yellow for degree -1, blue for degree -2, grey for
anything else, white where the stalk vanishes.  Rendering is the only
place floats appear; all geometry is computed exactly first.
"""

from fractions import Fraction

from .arrangement import build_arrangement
from .errors import InputError
from .linalg import dot
from .twisted_sheaf import build_P

_COLORS = {
    (0,): "#8fd18f",     # constant sheaf stalk
    (-1,): "#ecd97a",    # one shift
    (-2,): "#92aee3",    # two shifts
}
_FALLBACK = "#c9c9c9"


def _stalk_color(dims):
    if dims.is_zero():
        return "#ffffff"
    key = tuple(d for d, v in dims.items() for _ in range(v))
    if len(key) == 1 and dims[key[0]] == 1:
        return _COLORS.get(key, _FALLBACK)
    return _FALLBACK


def _cell_polygon(arr, cell):
    """Vertices of a 2-cell: intersections of its active constraint lines
    and box sides, filtered by the cell's closure and angularly sorted."""
    constraints = []
    for h, s in zip(arr.hyperplanes, cell.signs):
        if s > 0:
            constraints.append((h.normal, h.offset))
        elif s < 0:
            constraints.append((tuple(-c for c in h.normal), -h.offset))
    (x_lo, x_hi), (y_lo, y_hi) = arr.box
    constraints.append(((1, 0), x_lo))
    constraints.append(((-1, 0), -x_hi))
    constraints.append(((0, 1), y_lo))
    constraints.append(((0, -1), -y_hi))
    lines = [(n, c) for n, c in constraints]
    pts = set()
    from .linalg import solve_unique
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            sol = solve_unique([lines[i][0], lines[j][0]],
                               [lines[i][1], lines[j][1]])
            if sol is None:
                continue
            if all(dot(sol, n) >= c for n, c in lines):
                pts.add(sol)
    pts = list(pts)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    import math
    pts.sort(key=lambda p: math.atan2(float(p[1] - cy), float(p[0] - cx)))
    return pts


def render_svg(divisor, path=None, size=480):
    """Render the shard picture of a divisor on a 2-d fan; returns the SVG
    text and optionally writes it to a file."""
    fan = divisor.fan
    if fan.dim != 2:
        raise InputError("SVG rendering supports 2-dimensional fans only")
    shards = build_P(divisor)
    box = shards.support_box()
    arr = build_arrangement(shards.required_hyperplanes(), box)
    (x_lo, x_hi), (y_lo, y_hi) = box
    width = float(x_hi - x_lo)
    height = float(y_hi - y_lo)
    scale = size / max(width, height)

    def pt(p):
        return (float(p[0] - x_lo) * scale,
                (height - float(p[1] - y_lo)) * scale)

    parts = []
    parts.append(f'<svg xmlns="http://www.w3.org/2000/svg" '
                 f'width="{width * scale:.0f}" height="{height * scale:.0f}" '
                 f'viewBox="0 0 {width * scale:.0f} {height * scale:.0f}">')
    parts.append('<rect width="100%" height="100%" fill="#ffffff"/>')

    # stalk-colored regions
    for cell in arr.cells:
        if cell.dim != 2:
            continue
        color = _stalk_color(shards.stalk(cell.sample))
        poly = _cell_polygon(arr, cell)
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(pt, poly))
        parts.append(f'<polygon points="{coords}" fill="{color}" '
                     'stroke="none" opacity="0.85"/>')

    # shard boundary lines (thin)
    for h in arr.hyperplanes:
        seg = _clip_line(h, box)
        if seg:
            (a, b) = seg
            ax, ay = pt(a)
            bx, by = pt(b)
            parts.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" '
                         f'y2="{by:.2f}" stroke="#888888" stroke-width="1"/>')

    # twisted polytope edges with co-orientation hairs
    for ridx, v in enumerate(fan.rays):
        incident = [mc for mc in fan.max_cones if ridx in mc]
        if len(incident) != 2:
            continue
        p = divisor.vertices[incident[0]]
        q = divisor.vertices[incident[1]]
        px, py = pt(p)
        qx, qy = pt(q)
        parts.append(f'<line x1="{px:.2f}" y1="{py:.2f}" x2="{qx:.2f}" '
                     f'y2="{qy:.2f}" stroke="#222222" stroke-width="2.5"/>')
        # hairs point toward the closed shard side: direction +v
        import math
        nx, ny = float(v[0]), float(v[1])
        norm = math.hypot(nx, ny) or 1.0
        nx, ny = nx / norm * 9, -ny / norm * 9
        for t in (0.3, 0.5, 0.7):
            hx = px + (qx - px) * t
            hy = py + (qy - py) * t
            parts.append(f'<line x1="{hx:.2f}" y1="{hy:.2f}" '
                         f'x2="{hx + nx:.2f}" y2="{hy + ny:.2f}" '
                         f'stroke="#222222" stroke-width="1.2"/>')

    # vertices
    for mc in fan.max_cones:
        vx, vy = pt(divisor.vertices[mc])
        parts.append(f'<circle cx="{vx:.2f}" cy="{vy:.2f}" r="3.5" fill="#111111"/>')

    parts.append("</svg>")
    text = "\n".join(parts)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _clip_line(h, box):
    """Endpoints of a hyperplane's visible segment inside a 2-d box."""
    (x_lo, x_hi), (y_lo, y_hi) = box
    n = h.normal
    c = h.offset
    pts = []
    for x in (x_lo, x_hi):
        if n[1] != 0:
            y = Fraction(c - n[0] * x, n[1])
            if y_lo <= y <= y_hi:
                pts.append((x, y))
    for y in (y_lo, y_hi):
        if n[0] != 0:
            x = Fraction(c - n[1] * y, n[0])
            if x_lo <= x <= x_hi:
                pts.append((x, y))
    pts = sorted(set(pts))
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]
