"""Closed-form performance predictions and sufficiency checks.

Calculators for the guard-bin count, the minimal oversampling factor that
keeps the fold-position least-squares systems full rank, the modulo
threshold that realizes it, the bit-depth margin driven by the worst-case
off-support interference norm (estimated by Monte Carlo), the predicted
mean-squared error of the folded and conventional pipelines, and an
operation-count model of the sliding recovery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dsp import oob_bin_indices
from .errors import InfeasibleError


def guard_bin_count(guard_width: float, length: int) -> int:
    """DFT bins excluded by the leakage guard: 2 * ceil(guard_width * N / pi)."""
    if guard_width < 0.0:
        raise ValueError("guard_width must be nonnegative")
    return 2 * math.ceil(guard_width * length / np.pi)


def min_oversampling_for_folds(length: int, max_folds: int, guard_bins: int) -> float:
    """Minimal oversampling keeping every fold system full rank: N/(N - max_folds - guard_bins).

    max_folds is the largest per-segment fold count the recovery must solve
    for; the bound is signal-dependent through it.
    """
    denom = length - max_folds - guard_bins
    if denom <= 0:
        raise InfeasibleError(
            f"{max_folds} folds plus {guard_bins} guard bins exhaust a "
            f"{length}-sample window")
    return length / denom


def min_oversampling(length: int, guard_bins: int) -> float:
    """Signal-independent sufficient oversampling: 3 / (1 - guard_bins/N)."""
    if guard_bins >= length:
        raise InfeasibleError(f"{guard_bins} guard bins exhaust a {length}-sample window")
    return 3.0 / (1.0 - guard_bins / length)


def required_threshold(peak: float, oversampling: float, guard_bins: int,
                       length: int) -> float:
    """Modulo threshold realizing the sufficiency condition:

    peak / (oversampling * (1 - guard_bins/N) - 2).
    """
    if peak <= 0.0:
        raise ValueError("peak amplitude must be positive")
    denom = oversampling * (1.0 - guard_bins / length) - 2.0
    if denom <= 0.0:
        raise InfeasibleError(
            f"oversampling {oversampling:g} with {guard_bins} guard bins over "
            f"{length} samples cannot support any positive threshold")
    return peak / denom


def required_bits(interference_norm: float) -> float:
    """Bit depth beyond which lattice rounding is guaranteed exact:

    bits > 3 + log2(1 + 0.75 * interference_norm).
    """
    if interference_norm < 0.0:
        raise ValueError("interference norm must be nonnegative")
    return 3.0 + math.log2(1.0 + 0.75 * interference_norm)


def _oob_kernel(length: int, oversampling: float, guard_width: float) -> tuple[np.ndarray, int]:
    # Circulant kernel of V^H V for the out-of-band system: entry (m, n)
    # depends only on (m - n) mod N and is real because the bin set is
    # conjugate-symmetric.
    bins = oob_bin_indices(length, 1.0 / oversampling, guard_width)
    if bins.size == 0:
        raise InfeasibleError(
            f"no out-of-band bins at length {length}, oversampling {oversampling:g}")
    indicator = np.zeros(length)
    indicator[bins] = 1.0
    return np.fft.ifft(indicator).real, bins.size


def estimate_interference_norm(length: int, oversampling: float, guard_width: float,
                               set_size: int, trials: int, seed,
                               batch: int = 512) -> float:
    """Monte-Carlo max of ||pinv(V_S) V_Sc||_inf over random fold sets S.

    Bounds how strongly quantization noise at unflagged samples can leak
    into the solved residue values.  Deterministic under the seed, and
    nondecreasing in `trials` because draws are consumed sequentially.
    The least-squares map is applied through the Gram system of the
    circulant kernel V^H V, which agrees with the explicit pseudoinverse
    whenever the fold columns are full rank.
    """
    if set_size < 0:
        raise ValueError("set_size must be nonnegative")
    if set_size == 0:
        return 0.0
    if trials < 1:
        raise ValueError("trials must be positive")
    kernel, num_bins = _oob_kernel(length, oversampling, guard_width)
    if set_size > num_bins:
        raise InfeasibleError(
            f"fold sets of {set_size} exceed the {num_bins} out-of-band "
            "equations; the least-squares systems cannot be full rank")
    rng = np.random.default_rng(seed)
    draws = rng.random((trials, length)).argsort(axis=1)
    worst = 0.0
    for lo in range(0, trials, batch):
        chunk = draws[lo:lo + batch]
        inside = chunk[:, :set_size]
        outside = chunk[:, set_size:]
        gram = kernel[(inside[:, :, None] - inside[:, None, :]) % length]
        cross = kernel[(inside[:, :, None] - outside[:, None, :]) % length]
        solved = np.linalg.solve(gram, cross)
        worst = max(worst, float(np.abs(solved).sum(axis=2).max()))
    return worst


def predict_mse_modulo(peak: float, oversampling: float, bits: int,
                       guard_bins: int, guard_width: float, length: int) -> float:
    """Predicted MSE of the folded pipeline at its matched threshold.

    peak^2 * (1 + guard_width/pi * OF)
    / (OF * (2^b - 2)^2 * (OF * (1 - guard_bins/N) - 2)^2),
    valid once the oversampling sufficiency condition holds.
    """
    floor_of = min_oversampling(length, guard_bins)
    if oversampling < floor_of:
        raise InfeasibleError(
            f"oversampling {oversampling:g} is below the sufficiency bound "
            f"{floor_of:.4g} for {guard_bins} guard bins over {length} samples")
    threshold_denom = oversampling * (1.0 - guard_bins / length) - 2.0
    return (peak ** 2 * (1.0 + guard_width / np.pi * oversampling)
            / (oversampling * (2 ** bits - 2) ** 2 * threshold_denom ** 2))


def predict_mse_conventional(peak: float, oversampling: float, bits: int) -> float:
    """Predicted MSE of the conventional pipeline: peak^2 / (OF * (2^b - 2)^2)."""
    if bits < 2:
        raise ValueError("need bits >= 2")
    if oversampling < 1.0:
        raise ValueError("oversampling factor must be >= 1")
    return peak ** 2 / (oversampling * (2 ** bits - 2) ** 2)


def quantization_noise_power(bits: int, full_scale: float) -> float:
    """Noise power of the triangular-dithered quantizer: full_scale^2 / 2^(2b)."""
    if bits < 1:
        raise ValueError("bits must be positive")
    return full_scale ** 2 / 2 ** (2 * bits)


@dataclass(frozen=True)
class ComplexityEstimate:
    """Operation-count model of the sliding recovery (constants dropped)."""

    segments: float
    per_segment_flops: float
    total_order: float
    speedup_vs_whole: float


def complexity_estimate(num_samples: int, window_length: int, alpha: float,
                        band_fraction: float) -> ComplexityEstimate:
    """Cost model: segments ~ N0/(N(1-a/2)), each dominated by the
    (1-rho)^3 N^3 pseudoinverse, against whole-signal recovery at
    (1-rho)^3 N0^3."""
    if num_samples < window_length:
        raise ValueError("signal shorter than one window")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    segments = num_samples / (window_length * (1.0 - alpha / 2.0))
    per_segment = (1.0 - band_fraction) ** 3 * window_length ** 3
    return ComplexityEstimate(
        segments=segments,
        per_segment_flops=per_segment,
        total_order=segments * per_segment,
        speedup_vs_whole=num_samples ** 2 * (1.0 - alpha / 2.0) / window_length ** 2,
    )


@dataclass(frozen=True)
class TheoryReport:
    """Everything the calculators can say about one operating point."""

    oversampling: float
    bits: int
    length: int
    guard_width: float
    guard_bins: int
    threshold: float
    full_scale: float
    oversampling_ok: bool
    bits_ok: bool | None
    mse_modulo: float
    mse_modulo_db: float
    mse_conventional: float
    mse_conventional_db: float


def theory_report(peak: float, oversampling: float, bits: int, length: int,
                  guard_width: float,
                  interference_norm: float | None = None) -> TheoryReport:
    """Assemble the closed-form verdicts and predictions for one point.

    The bit-depth verdict needs an interference-norm estimate and is
    advisory (the Monte-Carlo surrogate may not be tight); it is left None
    when no estimate is supplied.
    """
    bins = guard_bin_count(guard_width, length)
    of_ok = oversampling >= min_oversampling(length, bins)
    threshold = required_threshold(peak, oversampling, bins, length)
    full_scale = 2 ** bits * threshold / (2 ** bits - 2)
    mse_mod = predict_mse_modulo(peak, oversampling, bits, bins, guard_width, length)
    mse_conv = predict_mse_conventional(peak, oversampling, bits)
    bits_ok = None
    if interference_norm is not None:
        bits_ok = bits > required_bits(interference_norm)
    return TheoryReport(
        oversampling=oversampling, bits=bits, length=length,
        guard_width=guard_width, guard_bins=bins, threshold=threshold,
        full_scale=full_scale, oversampling_ok=of_ok, bits_ok=bits_ok,
        mse_modulo=mse_mod, mse_modulo_db=10.0 * math.log10(mse_mod),
        mse_conventional=mse_conv,
        mse_conventional_db=10.0 * math.log10(mse_conv),
    )
