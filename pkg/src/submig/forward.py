"""Far-field data: direction sets, MSR matrices from the thin-inclusion
asymptotic expansion, the exact low-rank factorization and additive noise.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import sample_curve

__all__ = [
    "DirectionSet",
    "MSRMatrix",
    "NoiseSpec",
    "FactorizationParts",
    "make_directions",
    "assemble_msr",
    "build_factorization",
    "add_noise",
    "save_msr",
    "load_msr",
]


@dataclass(frozen=True)
class DirectionSet:
    """Equispaced incident directions on the unit circle.

    Observation directions are the reversed incident ones.
    """

    directions: np.ndarray

    def __len__(self):
        return self.directions.shape[0]

    @property
    def count(self):
        return self.directions.shape[0]

    @property
    def observation(self):
        return -self.directions


def make_directions(count):
    """``count`` unit vectors at angles 2 pi n / count, n = 0..count-1."""
    if int(count) != count or count < 4:
        raise ValueError(f"need at least 4 directions, got {count}")
    angles = 2.0 * np.pi * np.arange(int(count)) / int(count)
    return DirectionSet(np.stack([np.cos(angles), np.sin(angles)], axis=-1))


@dataclass(frozen=True)
class MSRMatrix:
    entries: np.ndarray
    omega: float
    directions: DirectionSet
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        k = self.entries
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError(f"MSR matrix must be square, got shape {k.shape}")
        if k.shape[0] != self.directions.count:
            raise ValueError("MSR dimension does not match the number of directions")
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def size(self):
        return self.entries.shape[0]

    @property
    def wavelength(self):
        return 2.0 * np.pi / self.omega


@dataclass(frozen=True)
class NoiseSpec:
    """Additive complex Gaussian noise at a given SNR; ``inf`` means none."""

    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"snr_db must be finite or +inf, got {self.snr_db}")


@dataclass(frozen=True)
class FactorizationParts:
    """``K = scale * H @ B @ H.T`` with H of shape (N, 3M)."""

    H: np.ndarray
    B: np.ndarray
    scale: complex
    sample_counts: tuple[int, ...] = ()

    def reconstruct(self):
        return self.scale * (self.H @ self.B @ self.H.T)

    @property
    def rank_bound(self):
        return self.H.shape[1]


def _prefactor(omega, h):
    return h * (1 + 1j) / (4.0 * math.sqrt(omega * math.pi))


def _resolve_spacing(omega, spacing):
    half_wave = math.pi / omega
    if spacing is None:
        return half_wave
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    if spacing > half_wave * (1 + 1e-12):
        raise ValueError(f"spacing {spacing} exceeds half a wavelength ({half_wave:.6g})")
    return spacing


def _sampled(inclusions, omega, spacing):
    spacing = _resolve_spacing(omega, spacing)
    out = []
    for inc in inclusions:
        inc.check_thickness(2.0 * math.pi / omega)
        samples = sample_curve(inc.curve, spacing)
        out.append((inc, samples, inc.curve.arc_length()))
    return out


def assemble_msr(inclusions, directions, omega, spacing=None):
    """MSR matrix of the leading-order thin-inclusion expansion.

    Entry (j, l) is

        h w^2 (1+i) / (4 sqrt(w pi)) * |sigma|/M * sum_m
            [(eps-1) + (1/mu-1)(th_j.t_m)(th_l.t_m) + (1-mu)(th_j.n_m)(th_l.n_m)]
            * exp(i w (th_j + th_l) . x_m)

    summed over inclusions. ``spacing`` defaults to half a wavelength.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    theta = directions.directions
    n_dir = theta.shape[0]
    K = np.zeros((n_dir, n_dir), dtype=complex)
    if not inclusions:
        warnings.warn("no inclusions given; returning a zero MSR matrix", stacklevel=2)
        return MSRMatrix(K, float(omega), directions)

    pair = theta[:, None, :] + theta[None, :, :]  # th_j + th_l
    for inc, samples, length in _sampled(inclusions, omega, spacing):
        weight = _prefactor(omega, inc.half_thickness) * omega ** 2 * length / len(samples)
        eps_term = inc.permittivity - 1.0
        t_coef = 1.0 / inc.permeability - 1.0
        n_coef = 1.0 - inc.permeability
        for s in samples:
            tj = theta @ s.tangent
            nj = theta @ s.normal
            bracket = eps_term + t_coef * np.outer(tj, tj) + n_coef * np.outer(nj, nj)
            K += weight * bracket * np.exp(1j * omega * (pair @ s.point))
    return MSRMatrix(K, float(omega), directions)


def build_factorization(inclusions, directions, omega, spacing=None):
    """Column factorization reproducing :func:`assemble_msr`.

    H stacks, per sample, the phase vector and its tangent- and
    normal-weighted copies. B is block diagonal with blocks
    ``w^2 |sigma|/M * diag(eps-1, (1/mu-1), (1-mu))`` (the tensor entries are
    half the polarization-tensor eigenvalues, matching the entry formula).
    Inclusions with a different thickness than the first are rescaled
    inside B so a single ``scale`` serves the whole sum.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    theta = directions.directions
    n_dir = theta.shape[0]
    if not inclusions:
        warnings.warn("no inclusions given; factorization is empty", stacklevel=2)
        return FactorizationParts(np.zeros((n_dir, 0), complex), np.zeros((0, 0)), 0j)

    h_ref = inclusions[0].half_thickness
    scale = _prefactor(omega, h_ref)
    columns, diag, counts = [], [], []
    for inc, samples, length in _sampled(inclusions, omega, spacing):
        counts.append(len(samples))
        block_scale = (inc.half_thickness / h_ref) * omega ** 2 * length / len(samples)
        block = block_scale * np.array([
            inc.permittivity - 1.0,
            1.0 / inc.permeability - 1.0,
            1.0 - inc.permeability,
        ])
        for s in samples:
            phase = np.exp(1j * omega * (theta @ s.point))
            columns += [phase, (theta @ s.tangent) * phase, (theta @ s.normal) * phase]
            diag.extend(block)
    H = np.stack(columns, axis=1)
    return FactorizationParts(H, np.diag(diag), complex(scale), tuple(counts))


def add_noise(msr, spec):
    """Add i.i.d. circular complex Gaussian noise at ``spec.snr_db``.

    Per-entry noise variance is mean(|K|^2) * 10^(-snr/10), split evenly
    between real and imaginary parts. The generator is seeded per call.
    """
    K = msr.entries
    if not np.any(K):
        raise ValueError("cannot add noise at a given SNR to a zero matrix")
    meta = dict(msr.meta, snr_db=spec.snr_db, seed=spec.seed)
    if spec.snr_db == math.inf:
        return MSRMatrix(K.copy(), msr.omega, msr.directions, meta)
    power = np.mean(np.abs(K) ** 2)
    variance = power * 10.0 ** (-spec.snr_db / 10.0)
    rng = np.random.default_rng(spec.seed)
    sd = math.sqrt(variance / 2.0)
    noise = sd * rng.standard_normal(K.shape) + 1j * sd * rng.standard_normal(K.shape)
    return MSRMatrix(K + noise, msr.omega, msr.directions, meta)


def save_msr(msr, path):
    """Write ``<path>.csv`` (rows j,l,re,im) and ``<path>.json`` metadata."""
    path = Path(path)
    stem = path.with_suffix("") if path.suffix in (".csv", ".json") else path
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path = stem.with_suffix(".csv")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["j", "l", "re", "im"])
        for (j, l), value in np.ndenumerate(msr.entries):
            writer.writerow([j, l, repr(float(value.real)), repr(float(value.imag))])
    snr = msr.meta.get("snr_db")
    meta = {
        "N": msr.size,
        "omega": msr.omega,
        "seed": msr.meta.get("seed"),
        "snr_db": None if snr is None or snr == math.inf else snr,
        "directions": "equispaced",
    }
    stem.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return csv_path


def load_msr(path):
    """Read an MSR matrix written by :func:`save_msr`."""
    path = Path(path)
    stem = path.with_suffix("") if path.suffix in (".csv", ".json") else path
    meta = json.loads(stem.with_suffix(".json").read_text())
    n = int(meta["N"])
    K = np.full((n, n), np.nan, dtype=complex)
    with stem.with_suffix(".csv").open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            K[int(row["j"]), int(row["l"])] = complex(float(row["re"]), float(row["im"]))
    if np.any(np.isnan(K)):
        raise ValueError(f"{stem.with_suffix('.csv')}: missing entries")
    snr = meta.get("snr_db")
    extra = {"seed": meta.get("seed"), "snr_db": math.inf if snr is None else snr}
    return MSRMatrix(K, float(meta["omega"]), make_directions(n), extra)
