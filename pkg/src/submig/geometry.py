"""Supporting curves, thin inclusions and their arc-length sampling."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate, optimize

__all__ = [
    "ParametricCurve",
    "CurveSample",
    "ThinInclusion",
    "sample_curve",
    "polarization_tensor",
    "sigma1",
    "sigma2",
]

_ARC_TOL = 1e-10


@dataclass(frozen=True)
class ParametricCurve:
    """Polynomial plane curve s -> (x(s), y(s)) on [s_min, s_max].

    Coefficients are in ascending order of powers, so ``x_coeffs=[-0.2, 1]``
    means ``x(s) = s - 0.2``.
    """

    x_coeffs: tuple[float, ...]
    y_coeffs: tuple[float, ...]
    parameter_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "x_coeffs", tuple(float(c) for c in self.x_coeffs))
        object.__setattr__(self, "y_coeffs", tuple(float(c) for c in self.y_coeffs))
        lo, hi = (float(v) for v in self.parameter_range)
        object.__setattr__(self, "parameter_range", (lo, hi))
        if not lo < hi:
            raise ValueError(f"parameter range must satisfy s_min < s_max, got {self.parameter_range}")
        if not self.x_coeffs or not self.y_coeffs:
            raise ValueError("both coordinates need at least one coefficient")
        degree = max(_degree(self.x_coeffs), _degree(self.y_coeffs))
        if degree < 1:
            raise ValueError("curve is a single point (polynomial degree 0 in both coordinates)")

    def position(self, s):
        s = np.asarray(s, dtype=float)
        return np.stack([P.polyval(s, self.x_coeffs), P.polyval(s, self.y_coeffs)], axis=-1)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        dx = P.polyder(self.x_coeffs) if len(self.x_coeffs) > 1 else [0.0]
        dy = P.polyder(self.y_coeffs) if len(self.y_coeffs) > 1 else [0.0]
        return np.stack([P.polyval(s, dx), P.polyval(s, dy)], axis=-1)

    def speed(self, s):
        return np.linalg.norm(self.derivative(s), axis=-1)

    def arc_length(self, upto=None):
        """Arc length from s_min to ``upto`` (default s_max)."""
        lo, hi = self.parameter_range
        upper = hi if upto is None else float(upto)
        if upper <= lo:
            return 0.0
        value, _ = integrate.quad(lambda s: float(self.speed(s)), lo, upper,
                                  epsabs=1e-13, epsrel=1e-12, limit=200)
        return value

    def parameter_at_length(self, length):
        """Invert the arc-length map by bracketed root finding."""
        lo, hi = self.parameter_range
        total = self.arc_length()
        if length <= 0.0:
            return lo
        if length >= total:
            return hi
        return optimize.brentq(lambda s: self.arc_length(s) - length, lo, hi,
                               xtol=_ARC_TOL, rtol=4 * np.finfo(float).eps)


def _degree(coeffs):
    nz = [i for i, c in enumerate(coeffs) if c != 0.0]
    return max(nz) if nz else 0


@dataclass(frozen=True)
class CurveSample:
    """Representative point of a curve segment with its unit frame.

    The normal is the tangent rotated by +90 degrees.
    """

    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    parameter: float = float("nan")

    @classmethod
    def from_tangent(cls, point, tangent, parameter=float("nan")):
        t = np.asarray(tangent, dtype=float)
        t = t / np.linalg.norm(t)
        n = np.array([-t[1], t[0]])
        return cls(np.asarray(point, dtype=float), t, n, parameter)


@dataclass(frozen=True)
class ThinInclusion:
    """Tube of half-thickness h around a supporting curve.

    ``permittivity`` and ``permeability`` are the contrasts relative to a
    background with unit values.
    """

    curve: ParametricCurve
    half_thickness: float
    permittivity: float
    permeability: float
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.half_thickness > 0:
            raise ValueError(f"half_thickness must be positive, got {self.half_thickness}")
        if not self.permittivity > 0 or not self.permeability > 0:
            raise ValueError("permittivity and permeability must be positive")
        if self.permittivity <= 1.0 or self.permeability <= 1.0:
            warnings.warn(
                "material contrast outside eps* > 1, mu* > 1; filter thresholds "
                "assume both exceed the background",
                stacklevel=2,
            )

    def check_thickness(self, wavelength):
        if self.half_thickness > wavelength / 10:
            warnings.warn(
                f"half_thickness {self.half_thickness} exceeds wavelength/10 = "
                f"{wavelength / 10:.4g}; the thin-inclusion expansion may be inaccurate",
                stacklevel=2,
            )


def sample_curve(curve, spacing):
    """Split the curve into equal arc-length segments no longer than ``spacing``.

    Returns one :class:`CurveSample` per segment, placed at the segment's
    arc-length midpoint. The segment count is ``ceil(length / spacing)``.

    Raises
    ------
    ValueError
        If ``spacing`` is not positive or the curve has a vanishing
        derivative at a sample.
    """
    if not spacing > 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    total = curve.arc_length()
    if total <= 0:
        raise ValueError("curve has zero arc length")
    count = max(1, math.ceil(total / spacing - 1e-9))
    seg = total / count
    samples = []
    for k in range(count):
        s = curve.parameter_at_length((k + 0.5) * seg)
        d = curve.derivative(s)
        speed = float(np.linalg.norm(d))
        if speed < 1e-12:
            raise ValueError(f"degenerate curve: zero derivative at s={s:.6g} (sample {k})")
        samples.append(CurveSample.from_tangent(curve.position(s), d, float(s)))
    return samples


def polarization_tensor(sample, mu_star):
    """Symmetric 2x2 tensor with eigenpairs t -> 2(1/mu*-1), n -> 2(1-mu*)."""
    if not mu_star > 0:
        raise ValueError("mu_star must be positive")
    t = np.asarray(sample.tangent, dtype=float)
    n = np.asarray(sample.normal, dtype=float)
    return 2.0 * (1.0 / mu_star - 1.0) * np.outer(t, t) + 2.0 * (1.0 - mu_star) * np.outer(n, n)


def sigma1():
    """Parabolic arc (s - 0.2, -0.5 s^2 + 0.5), s in [-0.5, 0.5]."""
    return ParametricCurve((-0.2, 1.0), (0.5, 0.0, -0.5), (-0.5, 0.5))


def sigma2():
    """Cubic arc (s + 0.2, s^3 + s^2 - 0.6), s in [-0.5, 0.5]."""
    return ParametricCurve((0.2, 1.0), (-0.6, 0.0, 1.0, 1.0), (-0.5, 0.5))
