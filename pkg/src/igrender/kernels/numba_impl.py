"""Numba-jitted kernels. Arithmetic mirrors numpy_impl exactly."""
import numpy as np
from numba import njit


@njit(cache=True)
def rasterize_triangles(pts, zs, height, width):
    zbuf = np.full((height, width), np.inf)
    tri_index = np.full((height, width), -1, np.int32)
    bary = np.zeros((height, width, 3))
    for t in range(pts.shape[0]):
        x0 = pts[t, 0, 0]; y0 = pts[t, 0, 1]; z0 = zs[t, 0]
        x1 = pts[t, 1, 0]; y1 = pts[t, 1, 1]; z1 = zs[t, 1]
        x2 = pts[t, 2, 0]; y2 = pts[t, 2, 1]; z2 = zs[t, 2]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 == 0.0:
            continue
        if area2 < 0.0:  # enforce positive orientation
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
        # boundary ownership: an on-edge pixel belongs to the triangle whose
        # edge direction has dy > 0, or dy == 0 and dx < 0
        e0x = x2 - x1; e0y = y2 - y1
        e1x = x0 - x2; e1y = y0 - y2
        e2x = x1 - x0; e2y = y1 - y0
        own0 = e0y > 0.0 or (e0y == 0.0 and e0x < 0.0)
        own1 = e1y > 0.0 or (e1y == 0.0 and e1x < 0.0)
        own2 = e2y > 0.0 or (e2y == 0.0 and e2x < 0.0)
        for j in range(lo_y, hi_y + 1):
            py = j + 0.5
            for i in range(lo_x, hi_x + 1):
                px = i + 0.5
                w0 = e0x * (py - y1) - e0y * (px - x1)
                w1 = e1x * (py - y2) - e1y * (px - x2)
                w2 = e2x * (py - y0) - e2y * (px - x0)
                if not ((w0 > 0.0 or (w0 == 0.0 and own0))
                        and (w1 > 0.0 or (w1 == 0.0 and own1))
                        and (w2 > 0.0 or (w2 == 0.0 and own2))):
                    continue
                l0 = w0 / area2
                l1 = w1 / area2
                l2 = w2 / area2
                denom = l0 / z0 + l1 / z1 + l2 / z2
                z = 1.0 / denom
                if z < zbuf[j, i]:
                    zbuf[j, i] = z
                    tri_index[j, i] = t
                    bary[j, i, 0] = l0 * z / z0
                    bary[j, i, 1] = l1 * z / z1
                    bary[j, i, 2] = l2 * z / z2
    return zbuf, tri_index, bary


@njit(cache=True)
def bilinear_scatter_add(acc, xs, ys, vals):
    height, width = acc.shape[0], acc.shape[1]
    channels = acc.shape[2]
    for n in range(xs.shape[0]):
        x = xs[n]; y = ys[n]
        x0 = int(np.floor(x)); y0 = int(np.floor(y))
        if x0 < 0: x0 = 0
        if x0 > width - 1: x0 = width - 1
        if y0 < 0: y0 = 0
        if y0 > height - 1: y0 = height - 1
        x1 = min(x0 + 1, width - 1)
        y1 = min(y0 + 1, height - 1)
        fx = x - x0
        fy = y - y0
        w00 = (1.0 - fx) * (1.0 - fy)
        w01 = fx * (1.0 - fy)
        w10 = (1.0 - fx) * fy
        w11 = fx * fy
        for c in range(channels):
            v = vals[n, c]
            acc[y0, x0, c] += w00 * v
            acc[y0, x1, c] += w01 * v
            acc[y1, x0, c] += w10 * v
            acc[y1, x1, c] += w11 * v
    return acc
