"""Pairwise linear-dependence maps between spectrogram frequency rows, and
their stack over consecutive signal segments.

The map entry (j, k) is the empirical Pearson correlation of the
time-evolution of frequency bins j and k.  A strongly modulated band shows
up as a block of highly correlated bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SizeError
from .signal_model import Signal
from .spectral import Spectrogram, StftConfig, stft_spectrogram


@dataclass(frozen=True)
class DependenceMap:
    """Symmetric matrix of pairwise correlations, one row/column per bin."""

    values: np.ndarray  # (F, F) in [-1, 1]
    freq_bins: np.ndarray  # (F,), Hz

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        freqs = np.asarray(self.freq_bins, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ParameterError("values must be a square matrix")
        if values.shape[0] != freqs.size:
            raise ParameterError("freq_bins length must match the matrix order")
        if not np.all(np.isfinite(values)):
            raise ParameterError("values must be finite")
        if np.any(np.abs(values) > 1.0):
            raise ParameterError("correlations must lie in [-1, 1]")
        if not np.array_equal(values, values.T):
            raise ParameterError("values must be symmetric")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "freq_bins", freqs)


@dataclass(frozen=True)
class DependenceTensor:
    """Per-segment absolute dependence maps stacked along the third axis."""

    values: np.ndarray  # (F, F, M) in [0, 1]
    freq_bins: np.ndarray  # (F,), Hz
    segment_count: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        freqs = np.asarray(self.freq_bins, dtype=np.float64)
        if values.ndim != 3 or values.shape[0] != values.shape[1]:
            raise ParameterError("values must have shape (F, F, M)")
        if self.segment_count < 1 or values.shape[2] != self.segment_count:
            raise ParameterError("segment_count must match values.shape[2] and be >= 1")
        if values.shape[0] != freqs.size:
            raise ParameterError("freq_bins length must match the matrix order")
        if not np.all(np.isfinite(values)):
            raise ParameterError("values must be finite")
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise ParameterError("tensor entries must lie in [0, 1]")
        if not np.array_equal(values, values.transpose(1, 0, 2)):
            raise ParameterError("every slice must be symmetric")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "freq_bins", freqs)


def pearson(a, b) -> float:
    """Empirical Pearson correlation of two equal-length vectors.

    The result is clamped to [-1, 1] to absorb round-off.  Zero variance in
    either input leaves the coefficient undefined and raises
    ``ParameterError``.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise SizeError("pearson expects two 1-D vectors of equal length")
    if a.size < 2:
        raise SizeError("pearson needs at least two samples")
    za = a - a.mean()
    zb = b - b.mean()
    ssa = np.dot(za, za)
    ssb = np.dot(zb, zb)
    if ssa == 0.0 or ssb == 0.0:
        raise ParameterError("zero variance input: correlation undefined")
    r = float(np.dot(za, zb) / np.sqrt(ssa * ssb))
    return min(1.0, max(-1.0, r))


def dependence_map(spec: Spectrogram) -> DependenceMap:
    """Correlation map between all pairs of spectrogram frequency rows.

    Only the upper triangle is computed and mirrored.  Entries follow the
    exact arithmetic of :func:`pearson`; a zero-variance row gets
    correlation 0 against every other row and 1 with itself, so the map is
    always defined.
    """
    mags = spec.magnitudes
    if mags.shape[0] < 2:
        raise SizeError("need at least two frames to correlate rows")
    f_count = mags.shape[1]

    centered = []
    sumsq = []
    for j in range(f_count):
        col = np.ascontiguousarray(mags[:, j], dtype=np.float64)
        z = col - col.mean()
        centered.append(z)
        sumsq.append(np.dot(z, z))

    cm = np.empty((f_count, f_count), dtype=np.float64)
    for j in range(f_count):
        cm[j, j] = 1.0
        zj = centered[j]
        ssj = sumsq[j]
        for k in range(j + 1, f_count):
            if ssj == 0.0 or sumsq[k] == 0.0:
                r = 0.0
            else:
                r = float(np.dot(zj, centered[k]) / np.sqrt(ssj * sumsq[k]))
                r = min(1.0, max(-1.0, r))
            cm[j, k] = r
            cm[k, j] = r
    return DependenceMap(values=cm, freq_bins=spec.freq_bins)


def build_tensor(
    signal: Signal, segment_count: int, stft: StftConfig = StftConfig()
) -> DependenceTensor:
    """Split ``signal`` into equal contiguous blocks and stack |map| slices.

    The record is cut into ``segment_count`` blocks of ``floor(N / M)``
    samples (the remainder is dropped).  Each block yields a spectrogram and
    a dependence map; absolute values are stacked into an (F, F, M) tensor.
    """
    if segment_count < 1:
        raise ParameterError("segment_count must be >= 1")
    n = signal.samples.size
    block = n // segment_count
    if block < stft.window_length:
        raise SizeError(
            f"{segment_count} segments of {block} samples are shorter than "
            f"the {stft.window_length}-sample analysis window"
        )

    slices = []
    freq_bins = None
    for m in range(segment_count):
        seg = Signal(signal.samples[m * block : (m + 1) * block], signal.sample_rate)
        spec = stft_spectrogram(seg, stft)
        freq_bins = spec.freq_bins
        slices.append(np.abs(dependence_map(spec).values))
    return DependenceTensor(
        values=np.stack(slices, axis=2),
        freq_bins=freq_bins,
        segment_count=segment_count,
    )
