"""Pure-numpy fallback kernels.

Per-triangle work is vectorized over the triangle's bounding box; the
per-pixel arithmetic matches numba_impl expression for expression.
"""
import numpy as np


def rasterize_triangles(pts, zs, height, width):
    zbuf = np.full((height, width), np.inf)
    tri_index = np.full((height, width), -1, np.int32)
    bary = np.zeros((height, width, 3))
    for t in range(pts.shape[0]):
        (x0, y0), (x1, y1), (x2, y2) = pts[t]
        z0, z1, z2 = zs[t]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 == 0.0:
            continue
        if area2 < 0.0:
            x1, x2 = x2, x1
            y1, y2 = y2, y1
            z1, z2 = z2, z1
            area2 = -area2
        lo_x = max(0, int(np.ceil(min(x0, x1, x2) - 0.5)))
        hi_x = min(width - 1, int(np.floor(max(x0, x1, x2) - 0.5)))
        lo_y = max(0, int(np.ceil(min(y0, y1, y2) - 0.5)))
        hi_y = min(height - 1, int(np.floor(max(y0, y1, y2) - 0.5)))
        if lo_x > hi_x or lo_y > hi_y:
            continue
        e0x = x2 - x1; e0y = y2 - y1
        e1x = x0 - x2; e1y = y0 - y2
        e2x = x1 - x0; e2y = y1 - y0
        own0 = e0y > 0.0 or (e0y == 0.0 and e0x < 0.0)
        own1 = e1y > 0.0 or (e1y == 0.0 and e1x < 0.0)
        own2 = e2y > 0.0 or (e2y == 0.0 and e2x < 0.0)
        px, py = np.meshgrid(np.arange(lo_x, hi_x + 1) + 0.5,
                             np.arange(lo_y, hi_y + 1) + 0.5)
        w0 = e0x * (py - y1) - e0y * (px - x1)
        w1 = e1x * (py - y2) - e1y * (px - x2)
        w2 = e2x * (py - y0) - e2y * (px - x0)
        inside = (((w0 > 0.0) | ((w0 == 0.0) & own0))
                  & ((w1 > 0.0) | ((w1 == 0.0) & own1))
                  & ((w2 > 0.0) | ((w2 == 0.0) & own2)))
        if not inside.any():
            continue
        l0 = w0 / area2
        l1 = w1 / area2
        l2 = w2 / area2
        denom = l0 / z0 + l1 / z1 + l2 / z2
        z = 1.0 / denom
        window = zbuf[lo_y:hi_y + 1, lo_x:hi_x + 1]
        win = inside & (z < window)
        window[win] = z[win]
        tri_index[lo_y:hi_y + 1, lo_x:hi_x + 1][win] = t
        bwin = bary[lo_y:hi_y + 1, lo_x:hi_x + 1]
        bwin[win, 0] = (l0 * z / z0)[win]
        bwin[win, 1] = (l1 * z / z1)[win]
        bwin[win, 2] = (l2 * z / z2)[win]
    return zbuf, tri_index, bary


def bilinear_scatter_add(acc, xs, ys, vals):
    height, width = acc.shape[0], acc.shape[1]
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, width - 1)
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, height - 1)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = (xs - x0)[:, None]
    fy = (ys - y0)[:, None]
    np.add.at(acc, (y0, x0), (1.0 - fx) * (1.0 - fy) * vals)
    np.add.at(acc, (y0, x1), fx * (1.0 - fy) * vals)
    np.add.at(acc, (y1, x0), (1.0 - fx) * fy * vals)
    np.add.at(acc, (y1, x1), fx * fy * vals)
    return acc
