"""End-to-end pipeline: synthesize MSR data, image, filter, score, write files."""
from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .config import apply_override, dump_config
from .forward import NoiseSpec, add_noise, assemble_msr, load_msr, make_directions, save_msr
from .geometry import sample_curve
from .imaging import (
    MULTI_FILTER,
    SINGLE_FILTER,
    ImagingGrid,
    TestVectorSpec,
    apply_filter,
    evaluate_functional,
    normalize_map,
    region_split_filter,
    save_map,
)
from .spectral import decompose, select_signal_dim

__all__ = ["Dataset", "synthesize", "run_synth", "run_experiment", "run_sweep", "score_support"]

log = logging.getLogger(__name__)

_CURVE_POINTS = 4001


@dataclass
class Dataset:
    msrs: list
    inclusions: list
    directions: object


def _noise_seeds(seed, count):
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def synthesize(cfg):
    """MSR matrices for every configured frequency (loaded or generated)."""
    if cfg.data:
        msrs = [load_msr(p) for p in cfg.data]
        msrs.sort(key=lambda m: m.omega)
        directions = msrs[0].directions
        return Dataset(msrs, cfg.build_inclusions(), directions)

    directions = make_directions(cfg.directions)
    inclusions = cfg.build_inclusions()
    omegas = cfg.frequency.omegas()
    seeds = _noise_seeds(cfg.noise.seed, len(omegas))
    msrs = []
    for omega, seed in zip(omegas, seeds):
        msr = assemble_msr(inclusions, directions, omega, cfg.sampling_spacing)
        snr = math.inf if cfg.noise.snr_db is None else cfg.noise.snr_db
        msr = add_noise(msr, NoiseSpec(snr, seed))
        msrs.append(msr)
    return Dataset(msrs, inclusions, directions)


def _truth_count(inclusions, omega, spacing):
    step = math.pi / omega if spacing is None else spacing
    return sum(len(sample_curve(inc.curve, step)) for inc in inclusions)


def _signal_dims(cfg, data, decs):
    sd = cfg.signal_dim
    strategy = sd.strategy
    if strategy == "auto":
        if data.inclusions:
            strategy = "truth"
        else:
            noisy = any(m.meta.get("snr_db", math.inf) != math.inf for m in data.msrs)
            strategy = "gap" if noisy else "ratio"
    dims = []
    for msr, dec in zip(data.msrs, decs):
        if strategy == "truth":
            d = sd.families * _truth_count(data.inclusions, msr.omega, cfg.sampling_spacing)
            d = min(d, len(dec.singular_values))
        else:
            d = select_signal_dim(dec.singular_values, strategy, tau=sd.tau, dim=sd.dim)
        dims.append(int(d))
    if sd.common:
        dims = [int(np.median(dims))] * len(dims)
    return dims, strategy


def _threshold(cfg, kind):
    flt = cfg.filter
    if flt.kind == "none":
        return None
    if flt.threshold is not None:
        return flt.threshold
    if flt.kind == "single":
        return SINGLE_FILTER
    if flt.kind == "multi":
        return MULTI_FILTER
    return SINGLE_FILTER if kind in ("SM", "SF") else MULTI_FILTER


def score_support(image, inclusions, radius):
    """Distances between a map's nonzero support and the true curves."""
    support = image.support()
    trees = [cKDTree(inc.curve.position(np.linspace(*inc.curve.parameter_range, _CURVE_POINTS)))
             for inc in inclusions]
    out = {"support_size": int(len(support)), "near_radius": radius}
    if not trees:
        return out
    curve_pts = np.vstack([t.data for t in trees])
    if len(support) == 0:
        out.update(hausdorff_support_to_truth=None, hausdorff_truth_to_support=None,
                   hausdorff=None, near_counts=[0] * len(trees))
        return out
    to_truth = cKDTree(curve_pts).query(support)[0]
    to_support = cKDTree(support).query(curve_pts)[0]
    out.update(
        hausdorff_support_to_truth=float(to_truth.max()),
        hausdorff_truth_to_support=float(to_support.max()),
        hausdorff=float(max(to_truth.max(), to_support.max())),
        near_counts=[int(np.sum(t.query(support)[0] <= radius)) for t in trees],
    )
    return out


def _map_record(image, inclusions, radius):
    rec = {
        "peak": float(np.max(image.values)),
        "argmax": [float(v) for v in image.argmax_point()],
    }
    if inclusions:
        trees = [cKDTree(inc.curve.position(np.linspace(*inc.curve.parameter_range, _CURVE_POINTS)))
                 for inc in inclusions]
        rec["argmax_distance_to_truth"] = float(min(t.query(image.argmax_point())[0] for t in trees))
    if "threshold" in image.meta:
        rec["threshold"] = image.meta["threshold"]
        rec.update(score_support(image, inclusions, radius) if inclusions
                   else {"support_size": int(np.count_nonzero(image.values))})
    return rec


def run_synth(cfg, out_dir=None):
    """Write the MSR CSV/JSON pairs only; returns the written paths."""
    out = Path(out_dir or cfg.output.dir)
    data = synthesize(cfg)
    paths = []
    for k, msr in enumerate(data.msrs):
        paths.append(save_msr(msr, out / f"msr_f{k:02d}"))
    return paths


def run_experiment(cfg, out_dir=None):
    """Run the full pipeline and write maps, ``summary.json`` and ``timing.json``.

    Everything except ``timing.json`` is a deterministic function of the
    configuration (including its noise seed).
    """
    start = time.perf_counter()
    out = Path(out_dir or cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(dump_config(cfg))

    data = synthesize(cfg)
    for k, msr in enumerate(data.msrs):
        save_msr(msr, out / f"msr_f{k:02d}")
    decs = [decompose(m) for m in data.msrs]
    dims, strategy = _signal_dims(cfg, data, decs)

    g = cfg.grid
    grid = ImagingGrid(tuple(g.x_range), tuple(g.y_range), g.nx, g.ny)
    omegas = [m.omega for m in data.msrs]
    radius = 0.5 * (2 * math.pi / max(omegas))
    summary = {
        "frequencies": omegas,
        "signal_dims": dims,
        "dim_strategy": strategy,
        "seed": cfg.noise.seed,
        "snr_db": cfg.noise.snr_db,
        "maps": {},
    }
    extra = {"seed": cfg.noise.seed, "snr_db": cfg.noise.snr_db}
    for kind in cfg.functionals:
        spec = TestVectorSpec("weighted", tuple(cfg.test_vector_c)) if kind in ("SM", "MM") else None
        raw = evaluate_functional(kind, grid, decs, dims, data.directions, spec)
        norm = normalize_map(raw)
        stages = {"raw": raw, "normalized": norm}
        tau = _threshold(cfg, kind)
        if tau is not None:
            if cfg.filter.kind == "region_split":
                stages["filtered"] = region_split_filter(raw, cfg.filter.regions, tau)
            else:
                stages["filtered"] = apply_filter(norm, tau)
        for stage, image in stages.items():
            name = f"{kind}_{stage}"
            save_map(image, out / name, cfg.output.formats, extra)
            summary["maps"][name] = _map_record(image, data.inclusions, radius)

    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    runtime = time.perf_counter() - start
    (out / "timing.json").write_text(json.dumps({"runtime_s": runtime}, indent=2) + "\n")
    log.info("experiment written to %s in %.2fs", out, runtime)
    summary["runtime_s"] = runtime
    return summary


def _sweep_cells(cfg):
    fields = sorted(cfg.sweep)
    for combo in itertools.product(*(cfg.sweep[f] for f in fields)):
        yield dict(zip(fields, combo))


def _run_cell(args):
    cfg, overrides, cell_dir = args
    for path, value in overrides.items():
        cfg = apply_override(cfg, path, value)
    return run_experiment(cfg, cell_dir)


def run_sweep(cfg, out_dir=None, workers=None):
    """Cartesian sweep over ``cfg.sweep``; writes ``sweep_summary.csv``.

    Rows follow the product order of the sorted field names, independent of
    the worker schedule.
    """
    out = Path(out_dir or cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    base = apply_override(cfg, "sweep", {})
    cells = list(_sweep_cells(cfg)) or [{}]
    jobs = [(base, cell, out / f"cell_{i:03d}") for i, cell in enumerate(cells)]
    workers = workers or cfg.workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(j) for j in jobs]

    fields = sorted(cfg.sweep)
    header = ["cell", *fields, "map", "peak", "argmax_x", "argmax_y",
              "argmax_distance_to_truth", "support_size", "hausdorff"]
    path = out / "sweep_summary.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, (cell, res) in enumerate(zip(cells, results)):
            for name, rec in sorted(res["maps"].items()):
                writer.writerow([
                    i, *[json.dumps(cell[f]) for f in fields], name, repr(rec["peak"]),
                    repr(rec["argmax"][0]), repr(rec["argmax"][1]),
                    rec.get("argmax_distance_to_truth", ""), rec.get("support_size", ""),
                    rec.get("hausdorff", ""),
                ])
    return path
