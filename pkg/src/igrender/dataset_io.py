"""Dataset types, directory IO, synthetic rendering, and train/test splits.

On-disk layout (lossless round trip for cameras and images):

    root/
      cameras.json      one entry per frame, 4x4 pose row-major
      mesh.obj          triangle mesh, optional per-vertex colors
      images/%06d.png   8-bit RGB
      depth/%06d.pfm    optional, little-endian single-channel PFM
      references.json   split + reference-view ids (written by `prepare`)
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .camera import Camera, look_at
from .errors import (EmptyPath, MalformedCameras, MissingFile,
                     NonDivisibleResolution, ResolutionMismatch)
from .geometry import ProxyMesh, rasterize_maps

RESOLUTION_MULTIPLE = 64
DEFAULT_TEST_FRACTION = 177 / 920  # yields the 743/177 proportions


@dataclass
class Frame:
    id: int
    image: np.ndarray                 # (H,W,3) float32 in [0,1]
    camera: Camera
    depth: Optional[np.ndarray] = None  # (H,W) float64 world units, 0 = none


@dataclass
class Dataset:
    frames: list
    mesh: ProxyMesh
    name: str = "dataset"
    source: str = "synthetic"

    @property
    def resolution(self):
        img = self.frames[0].image
        return img.shape[0], img.shape[1]

    def frame_by_id(self, frame_id: int) -> Frame:
        for f in self.frames:
            if f.id == frame_id:
                return f
        raise KeyError(frame_id)

    def validate(self):
        if not self.frames:
            raise MissingFile("dataset has no frames")
        h, w = self.resolution
        if h % RESOLUTION_MULTIPLE or w % RESOLUTION_MULTIPLE:
            raise NonDivisibleResolution(f"{h}x{w} not divisible by {RESOLUTION_MULTIPLE}")
        for f in self.frames:
            if f.image.shape[:2] != (h, w):
                raise ResolutionMismatch(f"frame {f.id}: {f.image.shape[:2]} != {(h, w)}")
            if (f.camera.height, f.camera.width) != (h, w):
                raise ResolutionMismatch(f"frame {f.id}: camera size mismatch")
        return self

    def ensure_depth(self):
        """Rasterize proxy depth for frames that lack a stored depth map."""
        for f in self.frames:
            if f.depth is None:
                f.depth = rasterize_maps(self.mesh, f.camera).depth
        return self


# ---------------------------------------------------------------------------
# synthetic scenes

@dataclass
class PhongMaterial:
    kd: np.ndarray                    # (3,) diffuse coefficient
    ks: np.ndarray                    # (3,) specular coefficient
    shininess: float
    ambient: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.kd = np.asarray(self.kd, dtype=np.float64).reshape(3)
        self.ks = np.asarray(self.ks, dtype=np.float64).reshape(3)
        self.ambient = np.asarray(self.ambient, dtype=np.float64).reshape(3)

    def validate(self):
        if ((self.kd < 0).any() or (self.kd > 1).any()
                or (self.ks < 0).any() or (self.ks > 1).any()):
            raise ValueError("kd and ks must be component-wise in [0,1]")
        if not self.shininess > 0:
            raise ValueError("shininess must be > 0")
        return self


@dataclass
class Light:
    kind: str                         # "directional" | "point"
    vector: np.ndarray                # direction (toward scene) or position
    intensity: np.ndarray             # (3,) RGB

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=np.float64).reshape(3)
        self.intensity = np.asarray(self.intensity, dtype=np.float64).reshape(3)


@dataclass
class SpiralPath:
    center: np.ndarray
    radius_start: float
    radius_end: float
    height_start: float
    height_end: float
    turns: float
    frame_count: int

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64).reshape(3)


@dataclass
class SyntheticScene:
    mesh: ProxyMesh
    material: PhongMaterial
    lights: list
    path: SpiralPath
    fov_y_deg: float = 50.0

    def validate(self):
        self.mesh.validate()
        self.material.validate()
        if not self.lights:
            raise ValueError("scene needs at least one light")
        return self


def spiral_cameras(path: SpiralPath, height: int, width: int,
                   fov_y_deg: float) -> list:
    """Azimuth sweeps linearly over turns*360deg, radius and height sweep
    linearly between their bounds; every camera looks at the path center."""
    if path.frame_count < 1:
        raise EmptyPath("frame_count must be >= 1")
    fy = 0.5 * height / np.tan(0.5 * np.deg2rad(fov_y_deg))
    cams = []
    n = path.frame_count
    for i in range(n):
        s = i / (n - 1) if n > 1 else 0.0
        az = 2.0 * np.pi * path.turns * s
        r = path.radius_start + s * (path.radius_end - path.radius_start)
        h = path.height_start + s * (path.height_end - path.height_start)
        eye = path.center + np.array([r * np.cos(az), r * np.sin(az), h])
        cams.append(Camera(fx=fy, fy=fy, cx=width / 2.0, cy=height / 2.0,
                           width=width, height=height,
                           world_to_camera=look_at(eye, path.center)).validate())
    return cams


def shade_phong(position, normal, albedo, camera: Camera,
                material: PhongMaterial, lights) -> np.ndarray:
    """clamp(ambient*albedo + sum_lights kd*albedo*(n.l) + ks*(r.l)^a, 0, 1).

    ``r`` is the reflected view direction, so the specular lobe depends on
    the view exactly like the reflected-direction G-buffer channel does.
    """
    to_cam = camera.center - position
    view = to_cam / np.maximum(np.linalg.norm(to_cam, axis=-1, keepdims=True), 1e-12)
    ndotv = (normal * view).sum(axis=-1, keepdims=True)
    refl = 2.0 * ndotv * normal - view
    color = material.ambient * albedo
    for light in lights:
        if light.kind == "directional":
            l = -light.vector
            l = l / np.linalg.norm(l)
            l = np.broadcast_to(l, position.shape)
        elif light.kind == "point":
            l = light.vector - position
            l = l / np.maximum(np.linalg.norm(l, axis=-1, keepdims=True), 1e-12)
        else:
            raise ValueError(f"unknown light kind {light.kind!r}")
        ndotl = np.maximum((normal * l).sum(axis=-1, keepdims=True), 0.0)
        rdotl = np.maximum((refl * l).sum(axis=-1, keepdims=True), 0.0)
        color = color + (material.kd * albedo * ndotl
                         + material.ks * rdotl ** material.shininess) * light.intensity
    return np.clip(color, 0.0, 1.0)


def render_frame(scene: SyntheticScene, camera: Camera,
                 vertex_normals: Optional[np.ndarray] = None) -> Frame:
    maps = rasterize_maps(scene.mesh, camera)
    covered = maps.tri_index >= 0
    h, w = maps.depth.shape
    image = np.zeros((h, w, 3))
    if covered.any():
        tris = scene.mesh.triangles[maps.tri_index[covered]]      # (N,3)
        bary = maps.bary[covered]                                 # (N,3)
        if vertex_normals is None:
            vertex_normals = scene.mesh.vertex_normals()
        pos = np.einsum("nk,nkc->nc", bary, scene.mesh.vertices[tris])
        nrm = np.einsum("nk,nkc->nc", bary, vertex_normals[tris])
        nrm = nrm / np.maximum(np.linalg.norm(nrm, axis=-1, keepdims=True), 1e-12)
        if scene.mesh.colors is not None:
            albedo = np.einsum("nk,nkc->nc", bary,
                               scene.mesh.colors[tris].astype(np.float64))
        else:
            albedo = np.ones_like(pos)
        image[covered] = shade_phong(pos, nrm, albedo, camera,
                                     scene.material, scene.lights)
    return Frame(id=0, image=image.astype(np.float32), camera=camera,
                 depth=maps.depth)


def render_synthetic(scene: SyntheticScene, resolution) -> Dataset:
    """Render the full spiral; every frame carries exact proxy depth."""
    h, w = resolution
    if h % RESOLUTION_MULTIPLE or w % RESOLUTION_MULTIPLE:
        raise NonDivisibleResolution(f"{h}x{w} not divisible by {RESOLUTION_MULTIPLE}")
    scene.validate()
    cams = spiral_cameras(scene.path, h, w, scene.fov_y_deg)
    vnormals = scene.mesh.vertex_normals()
    frames = []
    for i, cam in enumerate(cams):
        f = render_frame(scene, cam, vnormals)
        f.id = i
        frames.append(f)
    return Dataset(frames=frames, mesh=scene.mesh, name="synthetic",
                   source="synthetic").validate()


def split_train_test(dataset: Dataset, test_fraction: float, seed: int):
    """Disjoint uniform-random split; deterministic for a given seed."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction {test_fraction} outside (0, 1)")
    n = len(dataset.frames)
    n_test = int(np.floor(n * test_fraction + 0.5))
    perm = np.random.default_rng(seed).permutation(n)
    test_idx = set(perm[:n_test].tolist())
    train = [f for i, f in enumerate(dataset.frames) if i not in test_idx]
    test = [f for i, f in enumerate(dataset.frames) if i in test_idx]
    mk = lambda frames, tag: Dataset(frames=frames, mesh=dataset.mesh,
                                     name=f"{dataset.name}-{tag}",
                                     source=dataset.source)
    return mk(train, "train"), mk(test, "test")


# ---------------------------------------------------------------------------
# file formats

def write_pfm(path, data: np.ndarray):
    """Single-channel little-endian PFM, rows bottom-to-top."""
    data = np.asarray(data, dtype=np.float32)
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{data.shape[1]} {data.shape[0]}\n".encode())
        fh.write(b"-1.0\n")
        fh.write(np.flipud(data).astype("<f4").tobytes())


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"Pf":
            raise MissingFile(f"{path} is not a single-channel PFM")
        w, h = map(int, fh.readline().split())
        scale = float(fh.readline())
        data = np.frombuffer(fh.read(), dtype="<f4" if scale < 0 else ">f4")
    return np.flipud(data.reshape(h, w)).astype(np.float64)


def write_obj(path, mesh: ProxyMesh):
    with open(path, "w") as fh:
        for i, v in enumerate(mesh.vertices):
            if mesh.colors is not None:
                c = mesh.colors[i]
                fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r} {c[0]!r} {c[1]!r} {c[2]!r}\n")
            else:
                fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def read_obj(path) -> ProxyMesh:
    verts, colors, tris = [], [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vals = [float(x) for x in parts[1:]]
                verts.append(vals[:3])
                if len(vals) >= 6:
                    colors.append(vals[3:6])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:4]]
                tris.append(idx)
    return ProxyMesh(vertices=np.array(verts, dtype=np.float64),
                     triangles=np.array(tris, dtype=np.int32),
                     colors=np.array(colors, dtype=np.float32) if colors else None)


def save_image(path, image: np.ndarray):
    arr = np.clip(np.round(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path)


def load_image(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.float32) / np.float32(255.0)


# ---------------------------------------------------------------------------
# dataset directories

def store_dataset(dataset: Dataset, root):
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    entries = [f.camera.to_json_dict(f.id) for f in dataset.frames]
    with open(root / "cameras.json", "w") as fh:
        json.dump({"frames": entries}, fh, indent=1)
    write_obj(root / "mesh.obj", dataset.mesh)
    has_depth = all(f.depth is not None for f in dataset.frames)
    if has_depth:
        (root / "depth").mkdir(exist_ok=True)
    for f in dataset.frames:
        save_image(root / "images" / f"{f.id:06d}.png", f.image)
        if has_depth:
            write_pfm(root / "depth" / f"{f.id:06d}.pfm", f.depth)
    return root


def load_dataset(root) -> Dataset:
    root = Path(root)
    cam_path = root / "cameras.json"
    if not cam_path.exists():
        raise MissingFile(f"{cam_path} not found")
    with open(cam_path) as fh:
        try:
            entries = json.load(fh)["frames"]
        except (json.JSONDecodeError, KeyError) as e:
            raise MalformedCameras(f"cannot parse {cam_path}: {e}") from e
    if not entries:
        raise MissingFile(f"{cam_path} lists no frames")
    mesh_path = root / "mesh.obj"
    if not mesh_path.exists():
        raise MissingFile(f"{mesh_path} not found")
    mesh = read_obj(mesh_path).validate()

    frames = []
    for entry in sorted(entries, key=lambda e: e["id"]):
        cam = Camera.from_json_dict(entry)
        img_path = root / "images" / f"{entry['id']:06d}.png"
        if not img_path.exists():
            raise MissingFile(f"{img_path} not found")
        image = load_image(img_path)
        if image.shape[:2] != (cam.height, cam.width):
            raise ResolutionMismatch(
                f"{img_path}: {image.shape[:2]} != camera {(cam.height, cam.width)}")
        depth_path = root / "depth" / f"{entry['id']:06d}.pfm"
        depth = read_pfm(depth_path) if depth_path.exists() else None
        frames.append(Frame(id=int(entry["id"]), image=image, camera=cam, depth=depth))
    name = root.name or "dataset"
    return Dataset(frames=frames, mesh=mesh, name=name, source="ingested").validate()


def save_references(root, train_ids, test_ids, reference_ids, seed, test_fraction):
    payload = {
        "train_ids": [int(i) for i in train_ids],
        "test_ids": [int(i) for i in test_ids],
        "reference_ids": [int(i) for i in reference_ids],
        "seed": int(seed),
        "test_fraction": float(test_fraction),
    }
    with open(Path(root) / "references.json", "w") as fh:
        json.dump(payload, fh, indent=1)


def load_references(root) -> dict:
    path = Path(root) / "references.json"
    if not path.exists():
        raise MissingFile(f"{path} not found; run `igrender prepare` first")
    with open(path) as fh:
        return json.load(fh)
