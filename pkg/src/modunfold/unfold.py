"""Sliding-DFT unfolding of modulo-sampled signals.

Pipeline per overlapping segment: first-difference, taper with a Tukey
window, take the out-of-band DFT bins, least-squares-solve for the windowed
residue jumps at the flagged fold positions, undo the taper by summing the
previous segment's windowed tail over the overlap, round to the residue
lattice, and accumulate the jumps into a running residue estimate.  The
unfolded signal is the quantized stream minus that estimate, lowpassed back
to the signal band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dsp import (FirLowpass, OobSystem, TukeyWindow, build_oob_system,
                  design_lowpass, dft_normalized, filter_zero_delay,
                  least_squares_apply, tukey_window)
from .errors import ConfigurationError, InfeasibleError
from .modulo_adc import AdcOutput
from .signal_model import SampledSignal


@dataclass(frozen=True)
class RecoveryConfig:
    """Window, guard-band, threshold and lowpass parameters for unfolding."""

    length: int
    alpha: float
    guard_width: float
    threshold: float
    band_fraction: float
    lpf_length: int = 1025
    lpf_transition: float = np.pi / 64

    def __post_init__(self):
        prod = self.alpha * self.length
        if abs(prod - round(prod)) > 1e-9 or round(prod) % 2 != 0:
            raise ConfigurationError(
                f"alpha*length must be an even integer, got {prod!r}")
        if not 0.0 < self.band_fraction < 1.0:
            raise ConfigurationError("band_fraction must be in (0, 1)")
        lo = self.band_fraction * np.pi + self.guard_width
        if self.guard_width < 0.0 or lo >= np.pi:
            raise ConfigurationError(
                "guard band leaves no out-of-band interval")
        if self.threshold <= 0.0:
            raise ConfigurationError("modulo threshold must be positive")

    @property
    def overlap(self) -> int:
        """Samples shared by consecutive segments (one window taper)."""
        return int(round(self.alpha * self.length / 2))

    @property
    def hop(self) -> int:
        return self.length - self.overlap


@dataclass
class SegmentCarry:
    """State handed from one segment to the next.

    prev_windowed_tail holds the last overlap-many samples of the previous
    segment's windowed residue pre-estimate; adding them to the next
    segment's head restores unit scaling because paired window edges sum to
    one.  running_residue tracks the accumulated residue at the segment
    boundary and stays on the 2*threshold lattice.
    """

    prev_last_quantized: float = 0.0
    prev_windowed_tail: np.ndarray = field(default_factory=lambda: np.zeros(0))
    running_residue: float = 0.0


@dataclass(frozen=True)
class UnfoldResult:
    """Recovered signal plus the residue estimate used to unfold it."""

    recovered: np.ndarray
    residue: np.ndarray
    segments_total: int
    segments_skipped: int


def segment_starts(num_samples: int, length: int, alpha: float) -> tuple[list[int], bool]:
    """Start indices of the overlapping segments covering a buffer.

    Starts advance by hop = length * (1 - alpha/2) while they stay below
    num_samples, so every sample index lands in some [start, start + hop).
    Returns the starts and whether the final segment overruns the buffer
    (it is then zero-padded by the caller).
    """
    if length > num_samples:
        raise ValueError(f"segment length {length} exceeds buffer {num_samples}")
    window = tukey_window(length, alpha)
    starts = list(range(0, num_samples, window.hop))
    return starts, starts[-1] + length > num_samples


def windowed_first_difference(segment, prev_last: float, window: TukeyWindow) -> np.ndarray:
    """window * (segment[n] - segment[n-1]) with segment[-1] = prev_last."""
    segment = np.asarray(segment, dtype=float)
    if segment.size != window.n:
        raise ValueError(f"segment length {segment.size} != window length {window.n}")
    return window.coefficients * np.diff(segment, prepend=prev_last)


def residue_pre_estimate(diffed, fold_indices, system: OobSystem) -> np.ndarray:
    """Windowed residue-jump pre-estimate from the out-of-band DFT bins.

    Solves the least-squares system restricted to the flagged columns, takes
    the real part (residues are real; the imaginary part of the solution is
    numerical noise from the conjugate-paired bins), and scatters the values
    into a full-length vector that is zero off the fold set.
    """
    diffed = np.asarray(diffed, dtype=float)
    idx = np.asarray(fold_indices, dtype=int)
    out = np.zeros(system.n)
    if idx.size == 0:
        return out
    if idx.size > system.num_bins:
        raise InfeasibleError(
            f"{idx.size} folds in one segment exceed the {system.num_bins} "
            "out-of-band equations; the oversampling factor is too low for "
            "this fold density"
        )
    spectrum = dft_normalized(diffed).bins[system.oob_bins]
    columns = system.v[:, idx]
    sv = np.linalg.svd(columns, compute_uv=False)
    if sv[-1] <= columns.shape[0] * np.finfo(float).eps * sv[0]:
        raise ConfigurationError(
            f"fold-position columns are rank deficient "
            f"(min singular value {sv[-1]:.3e}); residues are not identifiable"
        )
    out[idx] = least_squares_apply(columns, spectrum).real
    return out


def scaling_correction(current, carry: SegmentCarry, alpha: float) -> np.ndarray:
    """Undo the window taper over the overlap and advance the carry.

    Returns the corrected pre-estimate on [0, hop): the previous segment's
    windowed tail is added over the first overlap-many samples (paired
    window edges sum to one), the flat region passes through.  The tail of
    `current` replaces carry.prev_windowed_tail for the next segment.
    """
    current = np.asarray(current, dtype=float)
    n = current.size
    overlap = int(round(alpha * n / 2))
    if carry.prev_windowed_tail.size != overlap:
        raise ValueError(
            f"carry tail has {carry.prev_windowed_tail.size} samples, expected {overlap}")
    hop = n - overlap
    corrected = current[:hop].copy()
    corrected[:overlap] += carry.prev_windowed_tail
    carry.prev_windowed_tail = current[hop:].copy()
    return corrected


def round_to_lattice(x, threshold: float):
    """Round to the nearest multiple of 2*threshold, ties away from zero."""
    if threshold <= 0.0:
        raise ValueError("modulo threshold must be positive")
    x = np.asarray(x, dtype=float)
    spacing = 2.0 * threshold
    out = spacing * np.sign(x) * np.floor(np.abs(x) / spacing + 0.5)
    return float(out) if out.ndim == 0 else out


def recovery_lowpass(config: RecoveryConfig) -> FirLowpass:
    """Reconstruction lowpass for the unfolded stream.

    The quantization-noise power that survives filtering should match a
    brickwall at band_fraction*pi + guard_width, so the ideal edge is
    centered there whenever the guard band leaves room for the transition;
    with a narrow guard the flat region is pinned to the passband edge
    instead so the signal band stays untouched.
    """
    edge = config.band_fraction * np.pi + config.guard_width
    transition = config.lpf_transition
    if config.guard_width >= transition / 2.0:
        cutoff = edge - transition / 2.0
    else:
        cutoff = edge
    return design_lowpass(cutoff, transition, config.lpf_length)


def unfold(adc: AdcOutput, signal_meta: SampledSignal, config: RecoveryConfig) -> UnfoldResult:
    """Recover the unfolded signal from quantized modulo samples + fold flags.

    The stream is left-padded by one overlap of zeros before segmentation:
    the input is assumed to start from rest, and the padding guarantees the
    first real samples enter at full window weight so early folds get the
    same overlap-add correction as any other (the untapered head of the
    first window would otherwise attenuate them below the rounding
    threshold).  Residue jumps are committed per segment on [start,
    start + hop) and integrated in sample order into the running residue.
    """
    if not math.isclose(config.threshold, adc.config.threshold, rel_tol=1e-12):
        raise ConfigurationError(
            f"recovery threshold {config.threshold:.6g} != "
            f"acquisition threshold {adc.config.threshold:.6g}")
    if not math.isclose(config.band_fraction, signal_meta.band_fraction, rel_tol=1e-9):
        raise ConfigurationError(
            f"recovery band fraction {config.band_fraction:.6g} != "
            f"signal band fraction {signal_meta.band_fraction:.6g}")

    n = config.length
    window = tukey_window(n, config.alpha)
    system = build_oob_system(n, config.band_fraction, config.guard_width)
    hop, overlap = config.hop, config.overlap
    num_real = adc.quantized.size

    samples = np.concatenate([np.zeros(overlap), adc.quantized])
    flags = np.concatenate([np.zeros(overlap, dtype=bool), adc.folding_bits])
    starts, _ = segment_starts(max(samples.size, n), n, config.alpha)
    extent = starts[-1] + n
    samples = np.concatenate([samples, np.zeros(extent - samples.size)])
    flags = np.concatenate([flags, np.zeros(extent - flags.size, dtype=bool)])

    jumps = np.zeros(extent)
    carry = SegmentCarry(prev_windowed_tail=np.zeros(overlap))
    skipped = 0
    for index, start in enumerate(starts):
        segment = samples[start:start + n]
        fold_set = np.flatnonzero(flags[start:start + n])
        if fold_set.size == 0 and not carry.prev_windowed_tail.any():
            # Quiet segment with nothing carried in: identically zero estimate.
            skipped += 1
            carry.prev_last_quantized = segment[-1]
            continue
        if fold_set.size == 0:
            windowed = np.zeros(n)
        else:
            diffed = windowed_first_difference(
                segment, samples[start - 1] if start else 0.0, window)
            try:
                windowed = residue_pre_estimate(diffed, fold_set, system)
            except (InfeasibleError, ConfigurationError) as err:
                raise type(err)(f"segment {index} (start {start}): {err}") from err
        corrected = scaling_correction(windowed, carry, config.alpha)
        jumps[start:start + hop] = round_to_lattice(corrected, config.threshold)
        carry.prev_last_quantized = segment[-1]
    residue = np.cumsum(jumps)[overlap:overlap + num_real]
    carry.running_residue = residue[-1]
    recovered = filter_zero_delay(adc.quantized - residue, recovery_lowpass(config))
    return UnfoldResult(recovered=recovered, residue=residue,
                        segments_total=len(starts), segments_skipped=skipped)
