"""Hot numeric kernels with two interchangeable backends.

The numba backend is used by default; set ``IGRENDER_DISABLE_NUMBA=1`` to
force the pure-numpy fallback. Both backends implement the same arithmetic;
rasterization results are bit-identical, scatter-add agrees up to
floating-point accumulation order on colliding samples (tests assert both,
and ``benchmarks/bench_kernels.py`` compares their speed).
"""
import importlib
import os

from . import numpy_impl

_DISABLE = os.environ.get("IGRENDER_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

numba_impl = None
if not _DISABLE:
    try:  # jit-compiles lazily on first call
        numba_impl = importlib.import_module(".numba_impl", __name__)
    except ImportError:
        numba_impl = None

_active = numba_impl if numba_impl is not None else numpy_impl


def backend_name() -> str:
    return "numba" if _active is numba_impl and numba_impl is not None else "numpy"


def rasterize_triangles(pts, zs, height, width):
    """Z-buffer rasterization of projected triangles.

    pts: (T,3,2) float64 continuous screen coordinates (pixel centers at
    half-integers); zs: (T,3) float64 camera-space depths, all > 0.
    Returns (depth (H,W), tri_index (H,W) int32 with -1 for background,
    bary (H,W,3) perspective-correct barycentric coordinates).
    """
    return _active.rasterize_triangles(pts, zs, height, width)


def bilinear_scatter_add(acc, xs, ys, vals):
    """Adjoint of bilinear sampling: scatter vals into acc at (xs, ys).

    Coordinates are in index space (pixel centers at integers) and must lie
    inside [0, W-1] x [0, H-1]. Mutates ``acc`` in place.
    """
    return _active.bilinear_scatter_add(acc, xs, ys, vals)
