"""SVG snapshots of a world, with crawler tick marks on the belt finger."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from graspforge.dynamics import kernel as K
from graspforge.dynamics.collision import PLANE
from graspforge.dynamics.world import DP2, STATIC, World

SCALE = 2000.0  # px per metre
TICK_SPACING = 0.01
COLORS = {STATIC: "#bbbbbb", 0: "#555555", 1: "#4a78b5", 2: "#4a78b5", 3: "#c0504d", 4: "#c0504d"}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(world: World, width: float = 0.32, height: float = 0.30) -> str:
    frames = world.frames()
    bottom = max(-0.02, world.palm_y - height + 0.08)
    left = -width / 2

    def px(x, y):
        return (x - left) * SCALE, (bottom + height - y) * SCALE

    W, H = width * SCALE, height * SCALE
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0f}" height="{H:.0f}" viewBox="0 0 {W:.0f} {H:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for g in range(len(world.gtype)):
        info = world.geom_info(g)
        link = info["link"]
        color = COLORS.get(link, "#e3a33b")
        if info["type"] == PLANE:
            x0, y0 = px(left, info["verts"][0, 1])
            out.append(f'<rect x="0" y="{_fmt(y0)}" width="{W:.0f}" height="{_fmt(H - y0)}" fill="{color}"/>')
            continue
        v = world.geom_vertices(g, frames)
        r = info["radius"] * SCALE
        if len(v) == 1:
            cx, cy = px(*v[0])
            out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{color}" stroke="#333" stroke-width="0.5"/>')
            continue
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (px(*p) for p in v))
        stroke = f'stroke="{color}" stroke-width="{_fmt(2 * r)}" stroke-linejoin="round"' if r > 0 else 'stroke="#333" stroke-width="0.5"'
        out.append(f'<polygon points="{pts}" fill="{color}" {stroke}/>')
    if world.has_hand:
        out.extend(_crawler_ticks(world, frames, px))
        x_t, x_s, T_s, mode = world.slider
        out.append(
            f'<text x="8" y="18" font-family="monospace" font-size="13">t={world.time:.3f}s  {mode.label}  '
            f"T_s={T_s:.1f}N  x_s={x_s * 1e3:.1f}mm</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _crawler_ticks(world: World, frames: np.ndarray, px) -> list[str]:
    """Short lines on the inner face of the belt finger, moving with the crawler."""
    ox, oy, ux, uy = frames[DP2]
    half = world.cfg.link_thickness / 2
    nx, ny = -uy, ux  # inward normal of the left finger
    length = world.hp[K.HP_LD]
    phase = (-world.q[4]) % TICK_SPACING
    lines = []
    s = phase
    while s < length:
        bx, by = ox + s * ux + half * nx, oy + s * uy + half * ny
        ex, ey = bx + 0.004 * nx, by + 0.004 * ny
        (x0, y0), (x1, y1) = px(bx, by), px(ex, ey)
        lines.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" stroke="#222" stroke-width="1"/>')
        s += TICK_SPACING
    return lines


def write_frame(world: World, directory: str | Path, index: int) -> Path:
    path = Path(directory) / f"{index:05d}.svg"
    path.write_text(render_svg(world))
    return path
