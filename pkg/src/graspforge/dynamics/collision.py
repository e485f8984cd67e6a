"""Narrow-phase collision for rounded convex polygons and half-planes.

A shape is a convex core (CCW vertices, 1 vertex = circle) inflated by a
radius.  Every routine writes contacts as rows ``(px, py, nx, ny, depth)``
with the normal pointing from shape A to shape B and ``depth > 0`` meaning
overlap.  Contacts closer than ``margin`` are reported with negative depth
so the solver can treat them speculatively.
"""
from __future__ import annotations

import math

import numba
import numpy as np

PLANE = 1
POLYGON = 0


@numba.njit(cache=True)
def _edge_normal(v, i, n):
    j = i + 1 if i + 1 < n else 0
    ex = v[j, 0] - v[i, 0]
    ey = v[j, 1] - v[i, 1]
    inv = 1.0 / math.sqrt(ex * ex + ey * ey)
    return ey * inv, -ex * inv


@numba.njit(cache=True)
def _max_separation(va, na, vb, nb):
    best = -1e30
    best_i = 0
    for i in range(na):
        nx, ny = _edge_normal(va, i, na)
        s = 1e30
        for k in range(nb):
            d = nx * (vb[k, 0] - va[i, 0]) + ny * (vb[k, 1] - va[i, 1])
            if d < s:
                s = d
        if s > best:
            best = s
            best_i = i
    return best, best_i


@numba.njit(cache=True)
def _closest_on_segment(px, py, ax, ay, bx, by):
    ex = bx - ax
    ey = by - ay
    ll = ex * ex + ey * ey
    if ll <= 0.0:
        return 0.0, ax, ay
    t = ((px - ax) * ex + (py - ay) * ey) / ll
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return t, ax + t * ex, ay + t * ey


@numba.njit(cache=True)
def segment_segment(p1x, p1y, q1x, q1y, p2x, p2y, q2x, q2y):
    """Closest points between two segments: (s, t, c1x, c1y, c2x, c2y)."""
    d1x = q1x - p1x
    d1y = q1y - p1y
    d2x = q2x - p2x
    d2y = q2y - p2y
    rx = p1x - p2x
    ry = p1y - p2y
    a = d1x * d1x + d1y * d1y
    e = d2x * d2x + d2y * d2y
    f = d2x * rx + d2y * ry
    eps = 1e-18
    if a <= eps and e <= eps:
        return 0.0, 0.0, p1x, p1y, p2x, p2y
    if a <= eps:
        s = 0.0
        t = min(max(f / e, 0.0), 1.0)
    else:
        c = d1x * rx + d1y * ry
        if e <= eps:
            t = 0.0
            s = min(max(-c / a, 0.0), 1.0)
        else:
            b = d1x * d2x + d1y * d2y
            denom = a * e - b * b
            if denom > eps:
                s = min(max((b * f - c * e) / denom, 0.0), 1.0)
            else:
                s = 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(max(-c / a, 0.0), 1.0)
            elif t > 1.0:
                t = 1.0
                s = min(max((b - c) / a, 0.0), 1.0)
    return s, t, p1x + d1x * s, p1y + d1y * s, p2x + d2x * t, p2y + d2y * t


@numba.njit(cache=True)
def plane_vs_shape(px, py, nx, ny, vb, nb, rb, margin, out):
    count = 0
    for k in range(nb):
        d = nx * (vb[k, 0] - px) + ny * (vb[k, 1] - py) - rb
        if d < margin and count < out.shape[0]:
            sx = vb[k, 0] - nx * rb
            sy = vb[k, 1] - ny * rb
            out[count, 0] = sx - 0.5 * nx * d
            out[count, 1] = sy - 0.5 * ny * d
            out[count, 2] = nx
            out[count, 3] = ny
            out[count, 4] = -d
            count += 1
    return count


@numba.njit(cache=True)
def _write(out, k, ax, ay, bx, by, nx, ny, sep):
    # ax, ay on surface A; bx, by on surface B
    out[k, 0] = 0.5 * (ax + bx)
    out[k, 1] = 0.5 * (ay + by)
    out[k, 2] = nx
    out[k, 3] = ny
    out[k, 4] = -sep


@numba.njit(cache=True)
def circle_vs_polygon(cx, cy, rc, vp, npts, rp, margin, flip, out):
    """Circle against polygon core.  Normal points polygon -> circle unless ``flip``."""
    best, bi = -1e30, 0
    for i in range(npts):
        ex, ey = _edge_normal(vp, i, npts)
        s = ex * (cx - vp[i, 0]) + ey * (cy - vp[i, 1])
        if s > best:
            best = s
            bi = i
    if best <= 0.0:
        nx, ny = _edge_normal(vp, bi, npts)
        qx = cx - nx * best
        qy = cy - ny * best
        dist = best
    else:
        dmin = 1e30
        qx = 0.0
        qy = 0.0
        for i in range(npts):
            j = i + 1 if i + 1 < npts else 0
            _, sx, sy = _closest_on_segment(cx, cy, vp[i, 0], vp[i, 1], vp[j, 0], vp[j, 1])
            dd = (cx - sx) ** 2 + (cy - sy) ** 2
            if dd < dmin:
                dmin = dd
                qx = sx
                qy = sy
        dist = math.sqrt(dmin)
        if dist > 1e-12:
            nx = (cx - qx) / dist
            ny = (cy - qy) / dist
        else:
            nx, ny = _edge_normal(vp, bi, npts)
    sep = dist - rp - rc
    if sep >= margin:
        return 0
    ax = qx + nx * rp
    ay = qy + ny * rp
    bx = cx - nx * rc
    by = cy - ny * rc
    if flip:
        _write(out, 0, bx, by, ax, ay, -nx, -ny, sep)
    else:
        _write(out, 0, ax, ay, bx, by, nx, ny, sep)
    return 1


@numba.njit(cache=True)
def polygon_vs_polygon(va, na, ra, vb, nb, rb, margin, out):
    sep_a, ia = _max_separation(va, na, vb, nb)
    sep_b, ib = _max_separation(vb, nb, va, na)
    rsum = ra + rb
    if max(sep_a, sep_b) > rsum + margin:
        return 0
    if sep_b > sep_a + 1e-6:
        ref, nref, rref, inc, ninc, rinc, iref, flip = vb, nb, rb, va, na, ra, ib, True
    else:
        ref, nref, rref, inc, ninc, rinc, iref, flip = va, na, ra, vb, nb, rb, ia, False
    sep = max(sep_a, sep_b)
    j1 = iref + 1 if iref + 1 < nref else 0
    v1x, v1y = ref[iref, 0], ref[iref, 1]
    v2x, v2y = ref[j1, 0], ref[j1, 1]
    nx, ny = _edge_normal(ref, iref, nref)
    # incident edge: most anti-parallel
    best = 1e30
    ii = 0
    for k in range(ninc):
        ex, ey = _edge_normal(inc, k, ninc)
        d = ex * nx + ey * ny
        if d < best:
            best = d
            ii = k
    i2 = ii + 1 if ii + 1 < ninc else 0
    w1x, w1y = inc[ii, 0], inc[ii, 1]
    w2x, w2y = inc[i2, 0], inc[i2, 1]
    sgn = -1.0 if flip else 1.0

    if sep > 1e-7:
        s, t, c1x, c1y, c2x, c2y = segment_segment(v1x, v1y, v2x, v2y, w1x, w1y, w2x, w2y)
        if (s == 0.0 or s == 1.0) and (t == 0.0 or t == 1.0):
            dx = c2x - c1x
            dy = c2y - c1y
            dist = math.sqrt(dx * dx + dy * dy)
            if dist > 1e-12:
                ux = dx / dist
                uy = dy / dist
                d = dist - rsum
                if d >= margin:
                    return 0
                ax = c1x + ux * rref
                ay = c1y + uy * rref
                bx = c2x - ux * rinc
                by = c2y - uy * rinc
                if flip:
                    _write(out, 0, bx, by, ax, ay, -ux, -uy, d)
                else:
                    _write(out, 0, ax, ay, bx, by, ux, uy, d)
                return 1

    tx = v2x - v1x
    ty = v2y - v1y
    length = math.sqrt(tx * tx + ty * ty)
    tx /= length
    ty /= length
    a1 = tx * (w1x - v1x) + ty * (w1y - v1y)
    a2 = tx * (w2x - v1x) + ty * (w2y - v1y)
    # clip incident segment to the slab 0 <= a <= length
    lo = 0.0
    hi = 1.0
    da = a2 - a1
    if abs(da) > 1e-15:
        u0 = (0.0 - a1) / da
        u1 = (length - a1) / da
        if u0 > u1:
            u0, u1 = u1, u0
        lo = max(lo, u0)
        hi = min(hi, u1)
    elif a1 < 0.0 or a1 > length:
        hi = -1.0
    if lo > hi:
        # incident edge outside the reference face: fall back to the closest pair
        s, t, c1x, c1y, c2x, c2y = segment_segment(v1x, v1y, v2x, v2y, w1x, w1y, w2x, w2y)
        dx = c2x - c1x
        dy = c2y - c1y
        d = nx * dx + ny * dy - rsum
        if d >= margin:
            return 0
        _write(out, 0, c1x + nx * rref, c1y + ny * rref, c2x - nx * rinc, c2y - ny * rinc,
               sgn * nx, sgn * ny, d)
        return 1
    count = 0
    for k in range(2):
        u = lo if k == 0 else hi
        wx = w1x + u * (w2x - w1x)
        wy = w1y + u * (w2y - w1y)
        s = nx * (wx - v1x) + ny * (wy - v1y)
        d = s - rsum
        if d < margin:
            rx = wx - nx * (s - rref)
            ry = wy - ny * (s - rref)
            ix = wx - nx * rinc
            iy = wy - ny * rinc
            if flip:
                _write(out, count, ix, iy, rx, ry, -nx, -ny, d)
            else:
                _write(out, count, rx, ry, ix, iy, nx, ny, d)
            count += 1
    if count == 2 and hi - lo < 1e-12:
        count = 1
    return count


@numba.njit(cache=True)
def collide(ta, va, na, ra, tb, vb, nb, rb, margin, out):
    """Dispatch on shape types.  Planes store (point, normal) in their first two rows."""
    if ta == PLANE:
        return plane_vs_shape(va[0, 0], va[0, 1], va[1, 0], va[1, 1], vb, nb, rb, margin, out)
    if tb == PLANE:
        k = plane_vs_shape(vb[0, 0], vb[0, 1], vb[1, 0], vb[1, 1], va, na, ra, margin, out)
        for i in range(k):
            out[i, 2] = -out[i, 2]
            out[i, 3] = -out[i, 3]
        return k
    if na == 1 and nb == 1:
        dx = vb[0, 0] - va[0, 0]
        dy = vb[0, 1] - va[0, 1]
        dist = math.sqrt(dx * dx + dy * dy)
        if dist > 1e-12:
            ux, uy = dx / dist, dy / dist
        else:
            ux, uy = 0.0, 1.0
        d = dist - ra - rb
        if d >= margin:
            return 0
        _write(out, 0, va[0, 0] + ux * ra, va[0, 1] + uy * ra, vb[0, 0] - ux * rb, vb[0, 1] - uy * rb, ux, uy, d)
        return 1
    if nb == 1:
        return circle_vs_polygon(vb[0, 0], vb[0, 1], rb, va, na, ra, margin, False, out)
    if na == 1:
        return circle_vs_polygon(va[0, 0], va[0, 1], ra, vb, nb, rb, margin, True, out)
    return polygon_vs_polygon(va, na, ra, vb, nb, rb, margin, out)


def collide_py(ta, va, ra, tb, vb, rb, margin=0.0):
    """Convenience wrapper returning an (n, 5) array; used by tests and geometry checks."""
    va = np.ascontiguousarray(va, dtype=np.float64).reshape(-1, 2)
    vb = np.ascontiguousarray(vb, dtype=np.float64).reshape(-1, 2)
    out = np.zeros((8, 5))
    k = collide(ta, va, va.shape[0], ra, tb, vb, vb.shape[0], rb, margin, out)
    return out[:k].copy()
