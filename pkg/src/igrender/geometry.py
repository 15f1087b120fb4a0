"""Proxy-mesh rasterization, G-buffers, cross-projection, and warping.

All geometric math runs in float64; the continuous-coordinate convention
(pixel center at (u+0.5, v+0.5)) is documented in :mod:`igrender.camera`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .camera import Camera
from .errors import DegenerateMesh, ShapeMismatch

NEAR_PLANE = 1e-6


@dataclass
class ProxyMesh:
    vertices: np.ndarray            # (V,3) float64 world positions
    triangles: np.ndarray           # (T,3) int32 vertex indices
    colors: Optional[np.ndarray] = None  # (V,3) float32 in [0,1]

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        if self.colors is not None:
            self.colors = np.asarray(self.colors, dtype=np.float32).reshape(-1, 3)

    def validate(self):
        if self.triangles.size == 0:
            raise DegenerateMesh("mesh has no triangles")
        if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
            raise DegenerateMesh("triangle index out of range")
        v = self.vertices[self.triangles]
        areas = np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)
        if not (areas > 0).any():
            raise DegenerateMesh("all triangles are degenerate")
        return self

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def bounding_sphere(self):
        lo, hi = self.bounds()
        center = 0.5 * (lo + hi)
        radius = float(np.linalg.norm(self.vertices - center, axis=1).max())
        return center, radius

    def vertex_normals(self) -> np.ndarray:
        """Area-weighted vertex normals."""
        v = self.vertices[self.triangles]
        fn = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        normals = np.zeros_like(self.vertices)
        for k in range(3):
            np.add.at(normals, self.triangles[:, k], fn)
        norm = np.linalg.norm(normals, axis=1, keepdims=True)
        return normals / np.maximum(norm, 1e-12)


def default_occlusion_eps(mesh: ProxyMesh) -> float:
    """1% of the bounding-sphere radius."""
    return 0.01 * mesh.bounding_sphere()[1]


@dataclass
class RasterMaps:
    depth: np.ndarray      # (H,W) float64, 0 = no surface
    tri_index: np.ndarray  # (H,W) int32, -1 = no surface
    bary: np.ndarray       # (H,W,3) perspective-correct barycentrics


@dataclass
class GBuffer:
    position: np.ndarray   # (H,W,3) world space
    normal: np.ndarray     # (H,W,3) unit, facing the camera
    reflect: np.ndarray    # (H,W,3) unit reflected view direction
    valid: np.ndarray      # (H,W) bool


@dataclass
class WarpResult:
    color: np.ndarray       # (H,W,C), 0 where mask is 0
    warp_field: np.ndarray  # (H,W,2) source (u,v), 0 where mask is 0
    mask: np.ndarray        # (H,W) bool


def _clip_triangle_near(vc: np.ndarray) -> list:
    """Clip one camera-space triangle (3,3) against z >= NEAR_PLANE."""
    inside = vc[:, 2] > NEAR_PLANE
    n_in = int(inside.sum())
    if n_in == 0:
        return []
    if n_in == 3:
        return [vc]

    def lerp(a, b):
        s = (NEAR_PLANE - a[2]) / (b[2] - a[2])
        return a + s * (b - a)

    keep = [i for i in range(3) if inside[i]]
    drop = [i for i in range(3) if not inside[i]]
    if n_in == 1:
        a = vc[keep[0]]
        p1 = lerp(a, vc[drop[0]])
        p2 = lerp(a, vc[drop[1]])
        # preserve winding relative to the original vertex order
        if (keep[0] + 1) % 3 == drop[0]:
            return [np.stack([a, p1, p2])]
        return [np.stack([a, p2, p1])]
    a, b = vc[keep[0]], vc[keep[1]]
    c = vc[drop[0]]
    pa = lerp(a, c)
    pb = lerp(b, c)
    if (keep[0] + 1) % 3 == keep[1]:
        return [np.stack([a, b, pb]), np.stack([a, pb, pa])]
    return [np.stack([b, a, pa]), np.stack([b, pa, pb])]


def _project_triangles(mesh: ProxyMesh, camera: Camera):
    """Camera-space clip + projection; returns (pts (T,3,2), zs (T,3), tri ids)."""
    verts_cam = camera.world_to_cam_points(mesh.vertices)
    tri_cam = verts_cam[mesh.triangles]            # (T,3,3)
    z = tri_cam[..., 2]
    all_in = (z > NEAR_PLANE).all(axis=1)
    any_in = (z > NEAR_PLANE).any(axis=1)
    cams = [tri_cam[all_in]]
    ids = [np.nonzero(all_in)[0]]
    for t in np.nonzero(any_in & ~all_in)[0]:
        for piece in _clip_triangle_near(tri_cam[t]):
            cams.append(piece[None])
            ids.append(np.array([t]))
    tri = np.concatenate(cams, axis=0) if cams else np.zeros((0, 3, 3))
    ids = np.concatenate(ids, axis=0) if ids else np.zeros(0, np.int64)
    zs = tri[..., 2]
    u = camera.fx * tri[..., 0] / zs + camera.cx
    v = camera.fy * tri[..., 1] / zs + camera.cy
    return np.stack([u, v], axis=-1), zs, ids


def rasterize_maps(mesh: ProxyMesh, camera: Camera) -> RasterMaps:
    mesh.validate()
    pts, zs, ids = _project_triangles(mesh, camera)
    zbuf, tri, bary = kernels.rasterize_triangles(
        np.ascontiguousarray(pts), np.ascontiguousarray(zs),
        camera.height, camera.width)
    depth = np.where(np.isfinite(zbuf), zbuf, 0.0)
    covered = tri >= 0
    tri_orig = np.full_like(tri, -1)
    tri_orig[covered] = ids[tri[covered]].astype(np.int32)
    return RasterMaps(depth=depth, tri_index=tri_orig, bary=bary)


def rasterize_depth(mesh: ProxyMesh, camera: Camera) -> np.ndarray:
    """Nearest-surface z-buffer depth; 0 where no triangle covers the pixel."""
    return rasterize_maps(mesh, camera).depth


def pixel_grid(height: int, width: int):
    """Continuous screen coordinates of all pixel centers, shape (H,W,2)."""
    u, v = np.meshgrid(np.arange(width) + 0.5, np.arange(height) + 0.5)
    return np.stack([u, v], axis=-1)


def backproject(camera: Camera, depth: np.ndarray):
    """Depth map -> world-space position map + validity mask."""
    if depth.shape != (camera.height, camera.width):
        raise ShapeMismatch(f"depth {depth.shape} vs camera "
                            f"{(camera.height, camera.width)}")
    valid = depth > 0
    uv = pixel_grid(camera.height, camera.width)
    pos = camera.unproject(uv.reshape(-1, 2), depth.reshape(-1)).reshape(*depth.shape, 3)
    pos[~valid] = 0.0
    return pos, valid


def gbuffer_from_depth(camera: Camera, depth: np.ndarray) -> GBuffer:
    """Position via back-projection, normals via central differences,
    reflected view directions r = 2(n.v)n - v."""
    pos, valid = backproject(camera, depth)
    h, w = depth.shape
    ok = np.zeros((h, w), dtype=bool)
    ok[1:-1, 1:-1] = (valid[1:-1, 1:-1] & valid[1:-1, :-2] & valid[1:-1, 2:]
                      & valid[:-2, 1:-1] & valid[2:, 1:-1])
    dpdu = np.zeros_like(pos)
    dpdv = np.zeros_like(pos)
    dpdu[1:-1, 1:-1] = 0.5 * (pos[1:-1, 2:] - pos[1:-1, :-2])
    dpdv[1:-1, 1:-1] = 0.5 * (pos[2:, 1:-1] - pos[:-2, 1:-1])
    normal = np.cross(dpdu, dpdv)
    norm = np.linalg.norm(normal, axis=-1, keepdims=True)
    degenerate = norm[..., 0] < 1e-12
    ok &= ~degenerate
    normal = normal / np.maximum(norm, 1e-12)

    to_cam = camera.center[None, None, :] - pos
    view = to_cam / np.maximum(np.linalg.norm(to_cam, axis=-1, keepdims=True), 1e-12)
    flip = (to_cam * normal).sum(axis=-1) < 0
    normal[flip] = -normal[flip]
    ndotv = (normal * view).sum(axis=-1, keepdims=True)
    reflect = 2.0 * ndotv * normal - view

    normal[~ok] = 0.0
    reflect[~ok] = 0.0
    out_pos = pos.copy()
    out_pos[~ok] = 0.0
    return GBuffer(position=out_pos, normal=normal, reflect=reflect, valid=ok)


def cross_project_points(spts: np.ndarray, cam_p: Camera, cam_q: Camera) -> np.ndarray:
    """Map (u,v,d) screen points of view p into view q; returns (u',v',d').

    d' <= 0 marks points behind the target camera (flagged, not raised).
    """
    spts = np.asarray(spts, dtype=np.float64)
    world = cam_p.unproject(spts[..., :2], spts[..., 2])
    uv, z = cam_q.project(world)
    return np.concatenate([uv, z[..., None]], axis=-1)


def bilinear_gather(img: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample img (H,W,C) at index-space coords; callers keep coords in range."""
    h, w = img.shape[:2]
    x0 = np.clip(np.floor(x).astype(np.int64), 0, w - 1)
    y0 = np.clip(np.floor(y).astype(np.int64), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    return ((1 - fx) * (1 - fy) * img[y0, x0] + fx * (1 - fy) * img[y0, x1]
            + (1 - fx) * fy * img[y1, x0] + fx * fy * img[y1, x1])


def warp_coords(target_camera: Camera, target_depth: np.ndarray,
                source_camera: Camera, source_depth: np.ndarray,
                occlusion_eps: float):
    """Cross-project every valid target pixel into the source view.

    Returns (warp_field (H,W,2), mask (H,W) bool). The mask is 0 where the
    target has no depth, the projection leaves the source frustum or lands
    behind the camera, or the source depth test fails by more than
    ``occlusion_eps``.
    """
    h, w = target_depth.shape
    valid = target_depth > 0
    uv = pixel_grid(h, w)[valid]
    spts = np.concatenate([uv, target_depth[valid][:, None]], axis=-1)
    proj = cross_project_points(spts, target_camera, source_camera)
    up, vp, dp = proj[:, 0], proj[:, 1], proj[:, 2]
    sh, sw = source_depth.shape
    in_frustum = ((dp > 0) & (up >= 0.5) & (up <= sw - 0.5)
                  & (vp >= 0.5) & (vp <= sh - 0.5))
    ok = np.zeros(len(up), dtype=bool)
    if in_frustum.any():
        sampled = bilinear_gather(source_depth[..., None],
                                  up[in_frustum] - 0.5, vp[in_frustum] - 0.5)[:, 0]
        ok[in_frustum] = np.abs(dp[in_frustum] - sampled) <= occlusion_eps

    warp_field = np.zeros((h, w, 2))
    mask = np.zeros((h, w), dtype=bool)
    idx = np.nonzero(valid)
    mask[idx[0][ok], idx[1][ok]] = True
    warp_field[idx[0][ok], idx[1][ok], 0] = up[ok]
    warp_field[idx[0][ok], idx[1][ok], 1] = vp[ok]
    return warp_field, mask


def warp_image(source, target_camera: Camera, target_depth: np.ndarray,
               occlusion_eps: float) -> WarpResult:
    """Warp a source frame (image+camera+depth) into the target view.

    Occluded or out-of-frustum pixels get mask 0 and color 0.
    """
    if source.depth is None:
        raise ShapeMismatch("source frame has no depth; rasterize it first")
    warp_field, mask = warp_coords(target_camera, target_depth,
                                   source.camera, source.depth, occlusion_eps)
    image = np.asarray(source.image, dtype=np.float64)
    if image.ndim == 2:
        image = image[..., None]
    color = np.zeros((*target_depth.shape, image.shape[-1]))
    if mask.any():
        color[mask] = bilinear_gather(image, warp_field[mask, 0] - 0.5,
                                      warp_field[mask, 1] - 0.5)
    return WarpResult(color=color, warp_field=warp_field, mask=mask)
