"""SVD of MSR matrices and signal-subspace dimension selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SpectralDecomposition", "decompose", "select_signal_dim"]


@dataclass(frozen=True)
class SpectralDecomposition:
    """``K = sum_m rho_m U_m conj(V_m)^T`` with descending ``rho``.

    ``left_vectors[:, m]`` is U_m and ``right_vectors[:, m]`` is V_m.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    source_frequency: float = float("nan")

    def reconstruct(self, dim=None):
        d = len(self.singular_values) if dim is None else dim
        U = self.left_vectors[:, :d]
        V = self.right_vectors[:, :d]
        return (U * self.singular_values[:d]) @ V.conj().T


def decompose(msr):
    """Full SVD with a pinned phase convention.

    Each U_m is rotated so its first non-negligible component is real and
    positive; V_m gets the same rotation, which leaves every rank-one term
    unchanged.

    Parameters
    ----------
    msr : MSRMatrix or ndarray
    """
    K = np.asarray(getattr(msr, "entries", msr))
    omega = float(getattr(msr, "omega", float("nan")))
    if not np.all(np.isfinite(K)):
        raise ValueError("MSR matrix has non-finite entries")
    U, s, Vh = np.linalg.svd(K)
    V = Vh.conj().T
    mags = np.abs(U)
    lead = np.argmax(mags > 1e-8 * mags.max(axis=0, keepdims=True), axis=0)
    first = U[lead, np.arange(U.shape[1])]
    rot = np.where(np.abs(first) > 0, np.conj(first) / np.maximum(np.abs(first), 1e-300), 1.0)
    return SpectralDecomposition(s, U * rot, V * rot, omega)


def select_signal_dim(values, strategy="ratio", *, tau=0.01, dim=None):
    """Number of singular values treated as signal.

    Parameters
    ----------
    values : array_like
        Descending nonnegative singular values.
    strategy : {"ratio", "gap", "fixed"}
        ``"ratio"`` keeps every value with ``rho_m / rho_1 >= tau``.
        ``"gap"`` cuts at the largest ratio ``rho_m / rho_{m+1}``, with values
        below the rounding floor ``N * eps * rho_1`` lifted to that floor.
        ``"fixed"`` returns ``dim`` clamped to ``[1, len(values)]``.
    """
    rho = np.asarray(values, dtype=float)
    if rho.ndim != 1 or rho.size == 0:
        raise ValueError("values must be a nonempty 1-D sequence")
    if not rho[0] > 0:
        raise ValueError("at least one singular value must be positive")

    if strategy == "fixed":
        if dim is None:
            raise ValueError("fixed strategy needs dim")
        return int(min(max(int(dim), 1), rho.size))
    if strategy == "ratio":
        if not 0 < tau <= 1:
            raise ValueError(f"tau must lie in (0, 1], got {tau}")
        return int(np.count_nonzero(rho / rho[0] >= tau))
    if strategy == "gap":
        if rho.size == 1:
            return 1
        floor = rho.size * np.finfo(float).eps * rho[0]
        lifted = np.maximum(rho, floor)
        gaps = np.log(lifted[:-1]) - np.log(lifted[1:])
        return int(np.argmax(gaps)) + 1
    raise ValueError(f"unknown strategy {strategy!r}")
