"""Fourier-side representation of 2pi-periodic functions.

A field is a finite vector of complex Fourier coefficients on the integer
modes k = -K..K, stored in ascending-k order.  All fractional Sobolev norms
use the (1 + k^2)^sigma weight, which is total at k = 0 and equivalent (up
to constants) to the |k|^(2 sigma) convention on mean-zero data.

Pointwise (collocation) values live on uniform grids x_j = 2 pi j / M.  For
cubic products the transform grid is zero-padded to at least 2(2K+1) points,
which makes the truncated product of trigonometric polynomials exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0.0:
        raise ValueError(f"Sobolev index must be a finite nonnegative real, got {sigma}")
    return sigma


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients on modes -max_mode..max_mode (ascending)."""

    coeffs: np.ndarray
    max_mode: int

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        object.__setattr__(self, "coeffs", coeffs)
        if self.max_mode < 0:
            raise ValueError(f"max_mode must be nonnegative, got {self.max_mode}")
        if coeffs.ndim != 1 or coeffs.size != 2 * self.max_mode + 1:
            raise ValueError(
                f"coefficient array must have length {2 * self.max_mode + 1}, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs.view(np.float64))):
            raise ValueError("coefficient array contains NaN/Inf")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.max_mode, self.max_mode + 1)

    def mode(self, k: int) -> complex:
        """Coefficient of e^{ikx}; zero outside the stored band."""
        if abs(k) > self.max_mode:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + self.max_mode])

    def embed(self, max_mode: int) -> "SpectralField":
        """Zero-pad to a larger common band."""
        if max_mode < self.max_mode:
            raise ValueError(f"cannot embed K={self.max_mode} into smaller K={max_mode}")
        if max_mode == self.max_mode:
            return self
        pad = max_mode - self.max_mode
        return SpectralField(np.pad(self.coeffs, (pad, pad)), max_mode)

    def truncate(self, max_mode: int) -> "SpectralField":
        """Drop all modes with |k| > max_mode."""
        if max_mode >= self.max_mode:
            return self.embed(max_mode)
        lo = self.max_mode - max_mode
        return SpectralField(self.coeffs[lo : lo + 2 * max_mode + 1], max_mode)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        K = max(self.max_mode, other.max_mode)
        return SpectralField(self.embed(K).coeffs + other.embed(K).coeffs, K)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        K = max(self.max_mode, other.max_mode)
        return SpectralField(self.embed(K).coeffs - other.embed(K).coeffs, K)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return SpectralField(self.coeffs * scalar, self.max_mode)

    __rmul__ = __mul__

    def values(self, n_points: int | None = None) -> np.ndarray:
        """Collocation values at x_j = 2 pi j / M, M >= 2K+1 (default 2K+1)."""
        M = n_points if n_points is not None else 2 * self.max_mode + 1
        if M < 2 * self.max_mode + 1:
            raise ValueError(f"need at least {2 * self.max_mode + 1} points, got {M}")
        spectrum = np.zeros(M, dtype=np.complex128)
        spectrum[self.modes % M] = self.coeffs
        return sfft.ifft(spectrum, norm="forward")

    def linf_grid(self, oversample: int = 4) -> float:
        """Max modulus on an oversample*(2K+1)-point collocation grid."""
        return float(np.max(np.abs(self.values(oversample * (2 * self.max_mode + 1)))))


def zeros(max_mode: int) -> SpectralField:
    return SpectralField(np.zeros(2 * max_mode + 1, dtype=np.complex128), max_mode)


def single_mode(k: int, amplitude: complex = 1.0, max_mode: int | None = None) -> SpectralField:
    K = max_mode if max_mode is not None else max(abs(k), 1)
    f = zeros(K)
    f.coeffs[k + K] = amplitude
    return f


def from_grid_values(values: np.ndarray, max_mode: int) -> SpectralField:
    """Truncated coefficients of a function sampled on a uniform grid."""
    values = np.asarray(values, dtype=np.complex128)
    M = values.size
    if M < 2 * max_mode + 1:
        raise ValueError(f"grid of {M} points cannot resolve modes up to {max_mode}")
    spectrum = sfft.fft(values, norm="forward")
    k = np.arange(-max_mode, max_mode + 1)
    return SpectralField(spectrum[k % M], max_mode)


def hs_norm(f: SpectralField, sigma: float) -> float:
    """H^sigma norm: sqrt( sum_k (1+k^2)^sigma |f_k|^2 )."""
    sigma = _check_sigma(sigma)
    k = f.modes.astype(np.float64)
    return float(np.sqrt(np.sum((1.0 + k * k) ** sigma * np.abs(f.coeffs) ** 2)))


def hs_inner(f: SpectralField, g: SpectralField, sigma: float) -> complex:
    """Weighted inner product sum_k (1+k^2)^sigma f_k conj(g_k)."""
    sigma = _check_sigma(sigma)
    K = max(f.max_mode, g.max_mode)
    fc, gc = f.embed(K).coeffs, g.embed(K).coeffs
    k = np.arange(-K, K + 1, dtype=np.float64)
    return complex(np.sum((1.0 + k * k) ** sigma * fc * np.conj(gc)))


def l2_norm_grid(f: SpectralField, n_points: int | None = None) -> float:
    """Collocation L2 norm sqrt( (1/2pi) int |f|^2 ) = sqrt( mean_j |f(x_j)|^2 )."""
    M = n_points if n_points is not None else 2 * f.max_mode + 1
    return float(np.sqrt(np.mean(np.abs(f.values(M)) ** 2)))


def project_nonneg(f: SpectralField) -> SpectralField:
    """Zero the modes k < 0 (mode 0 is kept)."""
    out = f.coeffs.copy()
    out[: f.max_mode] = 0.0
    return SpectralField(out, f.max_mode)


def project_neg(f: SpectralField) -> SpectralField:
    """Zero the modes k >= 0; complement of project_nonneg."""
    out = f.coeffs.copy()
    out[f.max_mode :] = 0.0
    return SpectralField(out, f.max_mode)


def half_wave_propagator(f: SpectralField, t: float) -> SpectralField:
    """Free flow e^{-it|D_x|}: multiplies mode k by e^{-it|k|}.  Unitary in every H^sigma."""
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"propagation time must be finite, got {t}")
    phases = np.exp(-1j * t * np.abs(f.modes))
    return SpectralField(f.coeffs * phases, f.max_mode)


def dealias_points(max_mode: int) -> int:
    """Transform size for exact cubic products: fast length >= 2(2K+1)."""
    return sfft.next_fast_len(4 * max_mode + 2)


def cubic_term(u: SpectralField, v: SpectralField, w: SpectralField) -> SpectralField:
    """Coefficients of u * conj(v) * w, exactly, truncated to the common band.

    The product is formed on a zero-padded collocation grid of at least
    2(2K+1) points; no mode of the degree-3K product aliases back into
    |k| <= K, so the retained coefficients are exact up to rounding.
    """
    K = max(u.max_mode, v.max_mode, w.max_mode)
    M = dealias_points(K)
    vals = u.embed(K).values(M) * np.conj(v.embed(K).values(M)) * w.embed(K).values(M)
    return from_grid_values(vals, K)


def field_to_csv(f: SpectralField, path) -> None:
    """Dump as CSV `k,re,im`, one row per mode, k ascending."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "re", "im"])
        for k, c in zip(f.modes, f.coeffs):
            writer.writerow([int(k), repr(float(c.real)), repr(float(c.imag))])


def field_from_csv(path) -> SpectralField:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["k", "re", "im"]:
            raise ValueError(f"bad field CSV header: {header}")
        ks, cs = [], []
        for row in reader:
            ks.append(int(row[0]))
            cs.append(float(row[1]) + 1j * float(row[2]))
    ks = np.asarray(ks)
    K = int(ks.max())
    if not np.array_equal(ks, np.arange(-K, K + 1)):
        raise ValueError("field CSV must list modes -K..K in ascending order")
    return SpectralField(np.asarray(cs), K)
