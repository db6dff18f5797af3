"""Subspace-migration imaging functionals, normalization and filters."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "ImagingGrid",
    "ImageMap",
    "TestVectorSpec",
    "SINGLE_FILTER",
    "MULTI_FILTER",
    "test_vector_geomfree",
    "test_vector_weighted",
    "evaluate_functional",
    "normalize_map",
    "apply_filter",
    "region_split_filter",
    "closed_form_map",
    "save_map",
    "load_map_csv",
]

# Filter cuts: just above max 2*J1^2 (single frequency) and max J1^2 (band average).
SINGLE_FILTER = 0.678
MULTI_FILTER = 0.340

KINDS = ("SM", "SF", "MM", "MF")


@dataclass(frozen=True)
class ImagingGrid:
    x_range: tuple[float, float] = (-1.0, 1.0)
    y_range: tuple[float, float] = (-1.0, 1.0)
    nx: int = 128
    ny: int = 128

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 points per axis")
        if not self.x_range[0] < self.x_range[1] or not self.y_range[0] < self.y_range[1]:
            raise ValueError("grid ranges must be nondegenerate")

    @property
    def xs(self):
        return np.linspace(*self.x_range, self.nx)

    @property
    def ys(self):
        return np.linspace(*self.y_range, self.ny)

    @property
    def shape(self):
        return (self.ny, self.nx)

    def points(self):
        """Grid points as an array of shape (ny, nx, 2); row index is y."""
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.stack([X, Y], axis=-1)


@dataclass(frozen=True)
class ImageMap:
    """Functional samples on a grid; ``values[iy, ix]``."""

    grid: ImagingGrid
    values: np.ndarray
    label: str = ""
    frequencies: tuple[float, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")

    def argmax_point(self):
        iy, ix = np.unravel_index(np.argmax(self.values), self.values.shape)
        return np.array([self.grid.xs[ix], self.grid.ys[iy]])

    def support(self):
        """Coordinates of grid points with nonzero value, shape (k, 2)."""
        return self.grid.points()[self.values > 0]


@dataclass(frozen=True)
class TestVectorSpec:
    """``mode="geometry_free"`` or ``mode="weighted"`` with weights ``c``.

    ``c`` is a single 3-vector shared by all directions or an (N, 3) array.
    """

    __test__ = False  # keep pytest from collecting this class

    mode: str = "geometry_free"
    c: tuple = (1.0, 0.0, 1.0)

    def __post_init__(self):
        if self.mode not in ("geometry_free", "weighted"):
            raise ValueError(f"unknown test-vector mode {self.mode!r}")
        c = np.asarray(self.c, dtype=float)
        if c.shape[-1] != 3 or c.ndim > 2:
            raise ValueError("c must be a 3-vector or an (N, 3) array")
        if np.any(np.all(c.reshape(-1, 3) == 0, axis=1)):
            raise ValueError("weight vectors c_n must be nonzero")


def _theta(directions):
    return np.asarray(getattr(directions, "directions", directions), dtype=float)


def test_vector_geomfree(z, directions, omega):
    """Unit phase vector exp(i w theta_n . z) / sqrt(N); shape (..., N)."""
    theta = _theta(directions)
    z = np.asarray(z, dtype=float)
    return np.exp(1j * omega * (z @ theta.T)) / np.sqrt(theta.shape[0])


test_vector_geomfree.__test__ = False


def test_vector_weighted(z, directions, omega, c):
    """Entries (c_n . [1, theta_n]) exp(i w theta_n . z), scaled to unit norm."""
    theta = _theta(directions)
    c = np.asarray(c, dtype=float)
    if np.any(np.all(c.reshape(-1, 3) == 0, axis=1)):
        raise ValueError("weight vectors c_n must be nonzero")
    c = np.broadcast_to(c, (theta.shape[0], 3))
    amp = c[:, 0] + np.sum(c[:, 1:] * theta, axis=1)
    norm = np.linalg.norm(amp)
    if norm == 0:
        raise ValueError("weighted test vector vanishes for this choice of c")
    z = np.asarray(z, dtype=float)
    return amp * np.exp(1j * omega * (z @ theta.T)) / norm


test_vector_weighted.__test__ = False


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def evaluate_functional(kind, grid, decompositions, dims, directions, spec=None,
                        chunk=8192):
    """Evaluate a subspace-migration functional on ``grid``.

    At each point z the value is ``|sum_f sum_{m<dim_f} <v, U_m><v, conj(V_m)>|``
    with ``<a, b> = conj(a) . b``, divided by F for the multi-frequency kinds.

    Parameters
    ----------
    kind : {"SM", "SF", "MM", "MF"}
        SF/MF use the geometry-free vector, SM/MM the weighted one.
    decompositions : SpectralDecomposition or list of them
    dims : int or list of int
        Signal dimension per frequency.
    directions : DirectionSet
    spec : TestVectorSpec, optional
        Weights for SM/MM; defaults to ``c = [1, 0, 1]``.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    decs = _as_list(decompositions)
    dims = _as_list(dims)
    if not decs:
        raise ValueError("need at least one decomposition")
    if len(dims) == 1 and len(decs) > 1:
        dims = dims * len(decs)
    if len(dims) != len(decs):
        raise ValueError("one signal dimension per frequency is required")
    single = kind in ("SM", "SF")
    if single and len(decs) != 1:
        raise ValueError(f"{kind} takes exactly one frequency")
    if not single and len(decs) < 2:
        raise ValueError(f"{kind} needs at least two frequencies")
    weighted = kind in ("SM", "MM")
    if spec is None:
        spec = TestVectorSpec("weighted") if weighted else TestVectorSpec()
    if weighted != (spec.mode == "weighted"):
        raise ValueError(f"{kind} requires a {'weighted' if weighted else 'geometry_free'} test vector")

    pts = grid.points().reshape(-1, 2)
    total = np.zeros(pts.shape[0], dtype=complex)
    for dec, d in zip(decs, dims):
        nvec = dec.left_vectors.shape[1]
        if not 1 <= d <= nvec:
            raise ValueError(f"signal dimension {d} outside [1, {nvec}]")
        U = dec.left_vectors[:, :d]
        Vbar = dec.right_vectors[:, :d].conj()
        omega = dec.source_frequency
        for start in range(0, pts.shape[0], chunk):
            z = pts[start:start + chunk]
            if weighted:
                v = test_vector_weighted(z, directions, omega, spec.c)
            else:
                v = test_vector_geomfree(z, directions, omega)
            vh = v.conj()
            total[start:start + chunk] += np.sum((vh @ U) * (vh @ Vbar), axis=1)
    values = np.abs(total)
    if not single:
        values /= len(decs)
    freqs = tuple(float(dec.source_frequency) for dec in decs)
    return ImageMap(grid, values.reshape(grid.shape), kind, freqs,
                    {"dims": [int(d) for d in dims]})


def closed_form_map(grid, samples, omega=None, omega_band=None, form="p1", quad_points=16):
    """Closed-form structure map on a grid (single ``omega`` or ``omega_band``)."""
    from .bessel import closed_form_multi, closed_form_single

    pts = grid.points()
    if omega_band is not None:
        lo, hi = omega_band
        vals = closed_form_multi(pts, samples, lo, hi, quad_points, form=form)
        return ImageMap(grid, vals, f"closed_form_multi[{form}]", (float(lo), float(hi)))
    vals = closed_form_single(pts, samples, omega, form=form)
    return ImageMap(grid, vals, f"closed_form_single[{form}]", (float(omega),))


def normalize_map(image):
    """Divide by the map's own maximum."""
    peak = float(np.max(image.values))
    if not peak > 0:
        raise ValueError("cannot normalize an all-zero map")
    return replace(image, values=image.values / peak, meta=dict(image.meta, normalized=True))


def apply_filter(image, threshold):
    """Zero every value below ``threshold``."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    kept = np.where(image.values >= threshold, image.values, 0.0)
    return replace(image, values=kept, meta=dict(image.meta, threshold=threshold))


def _overlap(a, b):
    return min(a[1], b[1]) > max(a[0], b[0]) and min(a[3], b[3]) > max(a[2], b[2])


def region_split_filter(image, regions, threshold):
    """Normalize and filter each rectangle on its own; zero elsewhere.

    ``regions`` holds ``(x_min, x_max, y_min, y_max)`` rectangles with
    disjoint interiors. A grid point on a shared edge goes to the first
    region listed.
    """
    rects = [tuple(float(v) for v in r) for r in regions]
    for r in rects:
        if len(r) != 4 or not (r[0] < r[1] and r[2] < r[3]):
            raise ValueError(f"bad region {r}; expected (x_min, x_max, y_min, y_max)")
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            if _overlap(rects[i], rects[j]):
                raise ValueError(f"regions {i} and {j} overlap")
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")

    pts = image.grid.points()
    claimed = np.zeros(image.grid.shape, dtype=bool)
    out = np.zeros_like(image.values)
    for x0, x1, y0, y1 in rects:
        inside = ((pts[..., 0] >= x0) & (pts[..., 0] <= x1)
                  & (pts[..., 1] >= y0) & (pts[..., 1] <= y1) & ~claimed)
        claimed |= inside
        if not np.any(inside):
            continue
        peak = np.max(image.values[inside])
        if peak <= 0:
            continue
        local = image.values[inside] / peak
        out[inside] = np.where(local >= threshold, local, 0.0)
    meta = dict(image.meta, threshold=threshold, regions=[list(r) for r in rects])
    return replace(image, values=out, meta=meta)


def _pgm_bytes(values):
    peak = float(np.max(values))
    scaled = np.zeros(values.shape) if peak <= 0 else values / peak
    pixels = np.round(scaled[::-1] * 65535).astype(">u2")  # top row is y_max
    header = f"P5\n{values.shape[1]} {values.shape[0]}\n65535\n".encode("ascii")
    return header + pixels.tobytes()


def save_map(image, stem, formats=("csv", "pgm"), extra=None):
    """Write the map as CSV / 16-bit PGM / PNG plus a JSON sidecar.

    CSV rows run over y (first row is y_min); image formats put y_max on top.
    Returns the list of written paths.
    """
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = stem.with_suffix(".csv")
        np.savetxt(p, image.values, delimiter=",", fmt="%.17g")
        written.append(p)
    if "pgm" in formats:
        p = stem.with_suffix(".pgm")
        p.write_bytes(_pgm_bytes(image.values))
        written.append(p)
    if "png" in formats:
        from PIL import Image

        peak = float(np.max(image.values))
        scaled = np.zeros(image.values.shape) if peak <= 0 else image.values / peak
        pixels = np.round(scaled[::-1] * 255).astype(np.uint8)
        p = stem.with_suffix(".png")
        Image.fromarray(pixels).save(p)  # uint8 2-D gives mode L
        written.append(p)
    g = image.grid
    sidecar = {
        "label": image.label,
        "x_range": list(g.x_range),
        "y_range": list(g.y_range),
        "nx": g.nx,
        "ny": g.ny,
        "frequencies": list(image.frequencies),
        "threshold": image.meta.get("threshold"),
        "regions": image.meta.get("regions"),
        "dims": image.meta.get("dims"),
        "layout": "rows are y ascending, columns x ascending",
    }
    if extra:
        sidecar.update(extra)
    p = stem.with_suffix(".json")
    p.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written


def load_map_csv(stem):
    """Read a map written by :func:`save_map` back into an :class:`ImageMap`."""
    stem = Path(stem)
    side = json.loads(stem.with_suffix(".json").read_text())
    grid = ImagingGrid(tuple(side["x_range"]), tuple(side["y_range"]), side["nx"], side["ny"])
    values = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", ndmin=2)
    meta = {k: side[k] for k in ("threshold", "regions", "dims") if side.get(k) is not None}
    return ImageMap(grid, values, side["label"], tuple(side["frequencies"]), meta)
