"""Shared numeric primitives.

Normalized DFT, out-of-band DFT systems with least-squares machinery,
tapered-cosine (Tukey) windows, and linear-phase FIR lowpass design with
zero-delay filtering.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConfigurationError

log = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ComplexSpectrum:
    """DFT coefficients under the 1/sqrt(N) (Parseval-preserving) scaling."""

    bins: np.ndarray
    n: int


@dataclass(frozen=True)
class TukeyWindow:
    """Tapered-cosine window whose overlapped edge samples sum to one.

    `alpha * n` must be an even integer so that the taper pairs up exactly:
    coefficients[i] + coefficients[i + n*(1 - alpha/2)] == 1 for every i in
    the leading taper.
    """

    n: int
    alpha: float
    coefficients: np.ndarray

    @property
    def edge(self) -> int:
        """Number of samples in one taper (half the overlap region)."""
        return int(round(self.alpha * self.n / 2))

    @property
    def hop(self) -> int:
        """Segment advance that keeps exactly one taper of overlap."""
        return self.n - self.edge


@dataclass(frozen=True)
class OobSystem:
    """Normalized DFT rows restricted to out-of-band frequencies.

    Row k' of `v` evaluates the bin k = oob_bins[k'] of the normalized DFT:
    v[k', m] = exp(-2j*pi*m*k/n)/sqrt(n).  A bin is out of band when its
    frequency 2*pi*k/n lies strictly inside
    (band_fraction*pi + guard_width, 2*pi - band_fraction*pi - guard_width).
    """

    n: int
    band_fraction: float
    guard_width: float
    oob_bins: np.ndarray
    v: np.ndarray

    @property
    def num_bins(self) -> int:
        return len(self.oob_bins)


@dataclass(frozen=True)
class FirLowpass:
    """Symmetric (linear-phase) FIR lowpass with unit DC gain."""

    taps: np.ndarray
    cutoff: float
    length: int


def dft_normalized(x) -> ComplexSpectrum:
    """Length-N DFT with 1/sqrt(N) scaling: bins[k] = sum x[m] e^{-j2πkm/N} / sqrt(N)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("dft_normalized expects a nonempty 1-D real sequence")
    return ComplexSpectrum(bins=np.fft.fft(x) / math.sqrt(x.size), n=x.size)


def oob_bin_indices(n: int, band_fraction: float, guard_width: float) -> np.ndarray:
    """Sorted DFT bin indices strictly inside the out-of-band interval."""
    k = np.arange(n)
    omega = 2.0 * np.pi * k / n
    lo = band_fraction * np.pi + guard_width
    hi = 2.0 * np.pi - band_fraction * np.pi - guard_width
    return k[(omega > lo) & (omega < hi)]


def build_oob_system(n: int, band_fraction: float, guard_width: float) -> OobSystem:
    """Build the out-of-band DFT matrix for an n-point window.

    band_fraction is the occupied fraction of the sampling bandwidth
    (1/oversampling); guard_width widens the excluded band on both sides to
    absorb spectral leakage.
    """
    if n < 1:
        raise ValueError("window length must be positive")
    if not 0.0 < band_fraction < 1.0:
        raise ConfigurationError(f"band_fraction must be in (0, 1), got {band_fraction}")
    if guard_width < 0.0 or guard_width >= np.pi * (1.0 - band_fraction):
        raise ConfigurationError(
            f"guard_width {guard_width:.6g} leaves no out-of-band interval "
            f"at band_fraction {band_fraction:.6g}"
        )
    bins = oob_bin_indices(n, band_fraction, guard_width)
    if bins.size == 0:
        raise ConfigurationError(
            f"no DFT bins fall in the out-of-band interval for n={n}, "
            f"band_fraction={band_fraction:.6g}, guard_width={guard_width:.6g}"
        )
    v = np.exp(-2j * np.pi * np.outer(bins, np.arange(n)) / n) / math.sqrt(n)
    return OobSystem(n=n, band_fraction=band_fraction, guard_width=guard_width,
                     oob_bins=bins, v=v)


def select_columns(system: OobSystem, indices) -> np.ndarray:
    """Columns of the out-of-band matrix at the given sample indices."""
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0:
        return np.empty((system.num_bins, 0), dtype=complex)
    if idx.min() < 0 or idx.max() >= system.n:
        raise ValueError(f"column index out of range 0..{system.n - 1}")
    if len(np.unique(idx)) != idx.size:
        raise ValueError("duplicate column indices")
    return system.v[:, idx]


def least_squares_apply(a, rhs) -> np.ndarray:
    """Minimum-norm least-squares solution of a @ x ~ rhs.

    Rank-revealing solve with tolerance rows * eps * sigma_max.  A
    rank-deficient system is logged (with its smallest singular value) but
    still yields the minimum-norm solution.
    """
    a = np.asarray(a)
    rhs = np.asarray(rhs)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("expected a nonempty matrix")
    rows, cols = a.shape
    if cols > rows:
        raise ValueError(f"system has more unknowns ({cols}) than equations ({rows})")
    x, _, rank, sv = np.linalg.lstsq(a, rhs, rcond=rows * _EPS)
    if rank < cols:
        log.warning(
            "rank-deficient least-squares system: rank %d < %d columns "
            "(min singular value %.3e)", rank, cols, sv[-1] if sv.size else 0.0,
        )
    return x


def min_singular_value(a) -> float:
    """Smallest singular value; the full-column-rank test is sigma_min > tol."""
    a = np.asarray(a)
    if a.size == 0:
        raise ValueError("expected a nonempty matrix")
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def matrix_inf_norm(a) -> float:
    """Induced infinity norm: max over rows of the absolute row sum."""
    a = np.atleast_2d(np.asarray(a))
    if a.size == 0:
        raise ValueError("expected a nonempty matrix")
    return float(np.abs(a).sum(axis=1).max())


def tukey_window(n: int, alpha: float) -> TukeyWindow:
    """Tapered-cosine window of length n with roll-off alpha in (0, 1].

    Rejects (n, alpha) pairs where alpha*n is not an even integer, since the
    overlap-add correction relies on exact pairing of the two tapers.
    """
    if n < 2:
        raise ValueError("window length must be at least 2")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"roll-off alpha must be in (0, 1], got {alpha}")
    prod = alpha * n
    if abs(prod - round(prod)) > 1e-9 or round(prod) % 2 != 0:
        raise ValueError(f"alpha*n must be an even integer, got {prod!r}")
    edge = int(round(prod / 2))
    i = np.arange(n)
    w = np.ones(n)
    head = i < edge
    tail = i >= n - edge
    w[head] = (1.0 + np.cos(2.0 * np.pi / alpha * (i[head] / n - alpha / 2.0))) / 2.0
    w[tail] = (1.0 + np.cos(2.0 * np.pi / alpha * (i[tail] / n - 1.0 + alpha / 2.0))) / 2.0
    return TukeyWindow(n=n, alpha=alpha, coefficients=w)


def _cosine_taper(length: int) -> np.ndarray:
    # Three-term cosine-sum taper (0.42, 0.5, 0.08): ~74 dB sidelobes, enough
    # for the 60 dB stopband contract.  Built from a symmetric argument so the
    # taps come out exactly symmetric in floating point.
    m = np.arange(length) - (length - 1) / 2.0
    return (0.42
            + 0.50 * np.cos(2.0 * np.pi * m / (length - 1))
            + 0.08 * np.cos(4.0 * np.pi * m / (length - 1)))


# Empirical transition width of the cosine-sum taper, radians * taps.
_TAPER_TRANSITION = 11.0 * np.pi


def design_lowpass(cutoff: float, transition: float, length: int) -> FirLowpass:
    """Windowed-sinc lowpass: flat to `cutoff`, >= 60 dB down past `cutoff + transition`.

    The ideal edge is placed mid-transition; the response is validated on a
    dense frequency grid (passband ripple <= 0.01 dB, stopband >= 60 dB).
    """
    if not 0.0 < cutoff < np.pi:
        raise ConfigurationError(f"cutoff must be in (0, pi), got {cutoff}")
    if transition <= 0.0 or cutoff + transition > np.pi:
        raise ConfigurationError(
            f"transition band ({cutoff:.4g}, {cutoff + transition:.4g}) must stay below pi"
        )
    if length < 3 or length % 2 == 0:
        raise ConfigurationError(f"tap count must be odd and >= 3, got {length}")
    required = int(np.ceil(_TAPER_TRANSITION / transition))
    required += 1 - required % 2
    if length < required:
        raise ConfigurationError(
            f"{length} taps cannot realize a {transition:.4g} rad transition; "
            f"need at least {required}"
        )
    ideal = cutoff + transition / 2.0
    m = np.arange(length) - (length - 1) // 2
    taps = (ideal / np.pi) * np.sinc(ideal * m / np.pi) * _cosine_taper(length)
    taps = taps / taps.sum()

    grid = max(8192, 8 * length)
    response = np.abs(np.fft.rfft(taps, 2 * grid))
    omega = np.pi * np.arange(grid + 1) / grid
    ripple = np.abs(response[omega <= cutoff] - 1.0).max()
    stop = response[omega >= cutoff + transition].max()
    if ripple > 10 ** (0.01 / 20.0) - 1.0 or stop > 1e-3:
        raise ConfigurationError(
            f"design misses spec (ripple {ripple:.2e}, stopband {stop:.2e}); "
            f"try at least {required + (required - 1) // 2 + 1} taps"
        )
    return FirLowpass(taps=taps, cutoff=cutoff, length=length)


def filter_zero_delay(x, lowpass: FirLowpass) -> np.ndarray:
    """Lowpass `x` with group-delay compensation (output aligned to input).

    Edges are reflect-padded by half the filter length before convolving so
    boundary transients do not leak into the output.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D signal")
    if x.size < lowpass.length:
        raise ValueError(
            f"signal ({x.size} samples) shorter than filter ({lowpass.length} taps)"
        )
    half = lowpass.length // 2
    padded = np.pad(x, half, mode="reflect")
    return fftconvolve(padded, lowpass.taps, mode="valid")
