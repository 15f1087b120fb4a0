"""Pinhole camera model and pose helpers.

Conventions used everywhere in this package:
  * camera space is x-right, y-down, z-forward; depth = camera-space z
  * ``world_to_camera`` is a 4x4 rigid transform, x_cam = R x_world + t
  * continuous screen coordinates put the center of pixel (row v, col u)
    at (u + 0.5, v + 0.5)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedCameras

ROTATION_TOL = 1e-6


@dataclass(frozen=True)
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    world_to_camera: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "world_to_camera",
            np.asarray(self.world_to_camera, dtype=np.float64).reshape(4, 4))

    def validate(self):
        if not (self.fx > 0 and self.fy > 0):
            raise MalformedCameras(f"non-positive focal length ({self.fx}, {self.fy})")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise MalformedCameras(f"principal point ({self.cx}, {self.cy}) outside image")
        R = self.world_to_camera[:3, :3]
        if not np.allclose(R.T @ R, np.eye(3), atol=ROTATION_TOL):
            raise MalformedCameras("rotation block is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ROTATION_TOL:
            raise MalformedCameras(f"rotation determinant {np.linalg.det(R):.6f} != +1")
        bottom = self.world_to_camera[3]
        if not np.allclose(bottom, [0.0, 0.0, 0.0, 1.0], atol=ROTATION_TOL):
            raise MalformedCameras("last row of world_to_camera must be [0,0,0,1]")
        return self

    @property
    def K3(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx],
                         [0.0, self.fy, self.cy],
                         [0.0, 0.0, 1.0]])

    @property
    def R(self) -> np.ndarray:
        return self.world_to_camera[:3, :3]

    @property
    def t(self) -> np.ndarray:
        return self.world_to_camera[:3, 3]

    @property
    def center(self) -> np.ndarray:
        """Camera position in world space."""
        return -self.R.T @ self.t

    def world_to_cam_points(self, points: np.ndarray) -> np.ndarray:
        return points @ self.R.T + self.t

    def cam_to_world_points(self, points: np.ndarray) -> np.ndarray:
        return (points - self.t) @ self.R

    def project(self, world_points: np.ndarray):
        """World points (N,3) -> continuous screen coords (N,2) and depth (N,).

        No frustum test; callers check z > 0 and bounds themselves.
        """
        pc = self.world_to_cam_points(np.asarray(world_points, dtype=np.float64))
        z = pc[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.fx * pc[..., 0] / z + self.cx
            v = self.fy * pc[..., 1] / z + self.cy
        return np.stack([u, v], axis=-1), z

    def unproject(self, uv: np.ndarray, depth: np.ndarray) -> np.ndarray:
        """Continuous screen coords (N,2) + depth (N,) -> world points (N,3)."""
        uv = np.asarray(uv, dtype=np.float64)
        d = np.asarray(depth, dtype=np.float64)
        x = (uv[..., 0] - self.cx) / self.fx * d
        y = (uv[..., 1] - self.cy) / self.fy * d
        return self.cam_to_world_points(np.stack([x, y, d], axis=-1))

    def to_json_dict(self, frame_id: int) -> dict:
        return {
            "id": int(frame_id),
            "fx": float(self.fx), "fy": float(self.fy),
            "cx": float(self.cx), "cy": float(self.cy),
            "width": int(self.width), "height": int(self.height),
            "world_to_camera": [float(x) for x in self.world_to_camera.reshape(-1)],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Camera":
        m = np.asarray(d["world_to_camera"], dtype=np.float64)
        if m.size != 16:
            raise MalformedCameras(f"world_to_camera has {m.size} entries, expected 16")
        return Camera(fx=float(d["fx"]), fy=float(d["fy"]),
                      cx=float(d["cx"]), cy=float(d["cy"]),
                      width=int(d["width"]), height=int(d["height"]),
                      world_to_camera=m.reshape(4, 4)).validate()

    def with_resolution(self, height: int, width: int) -> "Camera":
        """Rescale intrinsics to a new image size, preserving field of view."""
        sx = width / self.width
        sy = height / self.height
        return Camera(fx=self.fx * sx, fy=self.fy * sy,
                      cx=self.cx * sx, cy=self.cy * sy,
                      width=width, height=height,
                      world_to_camera=self.world_to_camera.copy())


def look_at(eye, target, up=(0.0, 0.0, 1.0)) -> np.ndarray:
    """world_to_camera for a camera at ``eye`` looking at ``target``.

    ``up`` is the world up direction; the result has x-right, y-down,
    z-forward camera axes.
    """
    eye = np.asarray(eye, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - eye
    forward = forward / np.linalg.norm(forward)
    up = np.asarray(up, dtype=np.float64)
    right = np.cross(forward, up)
    n = np.linalg.norm(right)
    if n < 1e-9:
        # looking straight along up; pick any perpendicular axis
        up = np.array([1.0, 0.0, 0.0]) if abs(forward[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        right = np.cross(forward, up)
        n = np.linalg.norm(right)
    right /= n
    down = np.cross(forward, right)
    R = np.stack([right, down, forward], axis=0)
    m = np.eye(4)
    m[:3, :3] = R
    m[:3, 3] = -R @ eye
    return m


def orbit_camera(azimuth_deg: float, elevation_deg: float, radius: float,
                 center, height: int, width: int,
                 fov_y_deg: float = 45.0) -> Camera:
    """Camera on an orbit around ``center`` (z-up world), looking at it.

    This is the single authority for the orbit -> Camera convention; the
    HTTP service and the viewer both rely on it.
    """
    az = np.deg2rad(azimuth_deg)
    el = np.deg2rad(elevation_deg)
    center = np.asarray(center, dtype=np.float64)
    eye = center + radius * np.array(
        [np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)])
    fy = 0.5 * height / np.tan(0.5 * np.deg2rad(fov_y_deg))
    return Camera(fx=fy, fy=fy, cx=width / 2.0, cy=height / 2.0,
                  width=width, height=height,
                  world_to_camera=look_at(eye, center)).validate()
