"""Built-in synthetic scenes and scene.json parsing."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dataset_io import Light, PhongMaterial, SpiralPath, SyntheticScene
from .geometry import ProxyMesh


def uv_sphere(center, radius: float, n_lat: int = 24, n_lon: int = 36,
              checker=((0.92, 0.78, 0.45), (0.30, 0.42, 0.72)),
              checker_bands: int = 6) -> ProxyMesh:
    """Latitude/longitude sphere with a two-tone checker vertex texture."""
    center = np.asarray(center, dtype=np.float64)
    verts, colors = [], []
    for i in range(n_lat + 1):
        theta = np.pi * i / n_lat
        for j in range(n_lon):
            phi = 2.0 * np.pi * j / n_lon
            p = np.array([np.sin(theta) * np.cos(phi),
                          np.sin(theta) * np.sin(phi),
                          np.cos(theta)])
            verts.append(center + radius * p)
            k = (int(theta / np.pi * checker_bands)
                 + int(phi / (2 * np.pi) * checker_bands)) % 2
            colors.append(checker[k])
    tris = []
    for i in range(n_lat):
        for j in range(n_lon):
            a = i * n_lon + j
            b = i * n_lon + (j + 1) % n_lon
            c = (i + 1) * n_lon + j
            d = (i + 1) * n_lon + (j + 1) % n_lon
            if i > 0:
                tris.append([a, b, c])
            if i < n_lat - 1:
                tris.append([b, d, c])
    return ProxyMesh(vertices=np.array(verts), triangles=np.array(tris),
                     colors=np.array(colors, dtype=np.float32))


_BOX_FACE_COLORS = ((0.85, 0.30, 0.25), (0.25, 0.65, 0.35), (0.90, 0.75, 0.25),
                    (0.30, 0.45, 0.85), (0.80, 0.45, 0.70), (0.55, 0.80, 0.85))


def box(center, half_size: float, face_colors=_BOX_FACE_COLORS) -> ProxyMesh:
    """Axis-aligned cube with one flat color per face (vertices duplicated)."""
    center = np.asarray(center, dtype=np.float64)
    s = half_size
    corners = np.array([[sx, sy, sz] for sx in (-s, s) for sy in (-s, s)
                        for sz in (-s, s)])
    # each face: 4 corner indices in CCW order seen from outside
    faces = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    verts, colors, tris = [], [], []
    for f, quad in enumerate(faces):
        base = len(verts)
        for c in quad:
            verts.append(center + corners[c])
            colors.append(face_colors[f % len(face_colors)])
        tris.append([base, base + 1, base + 2])
        tris.append([base, base + 2, base + 3])
    return ProxyMesh(vertices=np.array(verts), triangles=np.array(tris),
                     colors=np.array(colors, dtype=np.float32))


def merge_meshes(a: ProxyMesh, b: ProxyMesh) -> ProxyMesh:
    def colors_of(m):
        if m.colors is not None:
            return m.colors
        return np.ones((len(m.vertices), 3), dtype=np.float32)
    return ProxyMesh(
        vertices=np.concatenate([a.vertices, b.vertices]),
        triangles=np.concatenate([a.triangles, b.triangles + len(a.vertices)]),
        colors=np.concatenate([colors_of(a), colors_of(b)]))


def sphere_cube_scene(frames: int = 360, specular: bool = True,
                      sphere_res=(24, 36)) -> SyntheticScene:
    """The desk-scale evaluation scene: textured sphere next to a cube,
    constant illumination, spiral camera path."""
    mesh = merge_meshes(
        uv_sphere(center=(0.0, 0.0, 0.0), radius=1.0,
                  n_lat=sphere_res[0], n_lon=sphere_res[1]),
        box(center=(1.35, 0.0, -0.25), half_size=0.45))
    ks = 0.6 if specular else 0.0
    material = PhongMaterial(kd=(0.75, 0.75, 0.75), ks=(ks, ks, ks),
                             shininess=48.0, ambient=(0.06, 0.06, 0.06))
    lights = [
        Light("directional", vector=(-0.45, -0.35, -0.85), intensity=(0.95, 0.95, 0.95)),
        Light("directional", vector=(0.70, 0.55, -0.30), intensity=(0.30, 0.30, 0.30)),
    ]
    path = SpiralPath(center=(0.55, 0.0, 0.0), radius_start=3.8, radius_end=3.8,
                      height_start=-0.9, height_end=1.7, turns=2.0,
                      frame_count=frames)
    return SyntheticScene(mesh=mesh, material=material, lights=lights,
                          path=path, fov_y_deg=50.0).validate()


_BUILTINS = {"sphere_cube": sphere_cube_scene}


def scene_from_json(source) -> SyntheticScene:
    """Build a SyntheticScene from a scene.json file or an already-parsed dict.

    Either names a builtin ({"builtin": "sphere_cube", "frames": 360,
    "specular": true}) or spells the scene out (mesh arrays, material,
    lights, spiral path; see README for the schema).
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            cfg = json.load(fh)
    else:
        cfg = dict(source)
    if "builtin" in cfg:
        name = cfg.pop("builtin")
        if name not in _BUILTINS:
            raise ValueError(f"unknown builtin scene {name!r}; have {sorted(_BUILTINS)}")
        return _BUILTINS[name](**cfg)
    mesh = ProxyMesh(vertices=np.asarray(cfg["mesh"]["vertices"], dtype=np.float64),
                     triangles=np.asarray(cfg["mesh"]["triangles"], dtype=np.int32),
                     colors=(np.asarray(cfg["mesh"]["colors"], dtype=np.float32)
                             if cfg["mesh"].get("colors") else None))
    mat = cfg["material"]
    material = PhongMaterial(kd=mat["kd"], ks=mat["ks"],
                             shininess=float(mat["shininess"]),
                             ambient=mat.get("ambient", (0.0, 0.0, 0.0)))
    lights = [Light(kind=l["kind"],
                    vector=l.get("direction", l.get("position")),
                    intensity=l["intensity"]) for l in cfg["lights"]]
    p = cfg["path"]
    path = SpiralPath(center=p["center"],
                      radius_start=float(p["radius_start"]),
                      radius_end=float(p["radius_end"]),
                      height_start=float(p["height_start"]),
                      height_end=float(p["height_end"]),
                      turns=float(p["turns"]),
                      frame_count=int(p["frame_count"]))
    return SyntheticScene(mesh=mesh, material=material, lights=lights, path=path,
                          fov_y_deg=float(cfg.get("fov_y_deg", 50.0))).validate()
