"""Spectrogram and analytic-envelope primitives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .errors import ParameterError, SizeError
from .signal_model import Signal

_WINDOWS = {
    "hamming": np.hamming,
    "hann": np.hanning,
    "rectangular": np.ones,
}


@dataclass(frozen=True)
class StftConfig:
    """Short-time Fourier transform settings.

    The defaults (symmetric Hamming window of 256 samples, 85 % overlap,
    512-point transform) are the settings used throughout the package.
    ``sample_rate`` may be left ``None`` to take the rate from the analysed
    signal; if set, it must agree with it.
    """

    window: str = "hamming"
    window_length: int = 256
    overlap: float = 0.85
    fft_length: int = 512
    sample_rate: float | None = None

    def __post_init__(self) -> None:
        if self.window not in _WINDOWS:
            raise ParameterError(
                f"unknown window {self.window!r}; choose from {sorted(_WINDOWS)}"
            )
        if self.window_length < 2:
            raise ParameterError("window_length must be >= 2")
        if not 0.0 <= self.overlap < 1.0:
            raise ParameterError("overlap must satisfy 0 <= overlap < 1")
        if self.fft_length < self.window_length:
            raise ParameterError("fft_length must be >= window_length")
        if self.sample_rate is not None and self.sample_rate <= 0:
            raise ParameterError("sample_rate must be > 0")
        if self.hop < 1:
            raise ParameterError("overlap too large: frame hop rounds to zero")

    @property
    def hop(self) -> int:
        """Frame advance in samples: ``round(window_length * (1 - overlap))``."""
        return int(round(self.window_length * (1.0 - self.overlap)))


@dataclass(frozen=True)
class Spectrogram:
    """One-sided magnitude spectrogram, frames along the first axis."""

    magnitudes: np.ndarray  # (T, F), non-negative
    time_centers: np.ndarray  # (T,), seconds
    freq_bins: np.ndarray  # (F,), Hz

    def __post_init__(self) -> None:
        mags = np.asarray(self.magnitudes, dtype=np.float64)
        times = np.asarray(self.time_centers, dtype=np.float64)
        freqs = np.asarray(self.freq_bins, dtype=np.float64)
        if mags.ndim != 2:
            raise ParameterError("magnitudes must be a 2-D array")
        if mags.shape != (times.size, freqs.size):
            raise ParameterError("magnitudes shape must be (len(time_centers), len(freq_bins))")
        if not np.all(np.isfinite(mags)) or np.any(mags < 0):
            raise ParameterError("magnitudes must be finite and non-negative")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ParameterError("freq_bins must be strictly increasing")
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "time_centers", times)
        object.__setattr__(self, "freq_bins", freqs)

    @property
    def frame_count(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def bin_count(self) -> int:
        return self.magnitudes.shape[1]


def stft_spectrogram(signal: Signal, config: StftConfig = StftConfig()) -> Spectrogram:
    """Magnitude spectrogram of ``signal``.

    Frames start at sample 0 and advance by ``config.hop``; a trailing
    partial frame is dropped.  Each frame is windowed, zero-padded to
    ``fft_length``, and transformed; only the non-negative frequency bins
    are kept, so ``F = fft_length // 2 + 1`` for real input.  No
    normalisation is applied to the magnitudes.
    """
    x = signal.samples
    p = config.window_length
    if x.size < p:
        raise SizeError(f"signal has {x.size} samples, shorter than the {p}-sample window")
    if config.sample_rate is not None and config.sample_rate != signal.sample_rate:
        raise ParameterError("StftConfig.sample_rate disagrees with the signal")
    fs = signal.sample_rate

    hop = config.hop
    n_frames = (x.size - p) // hop + 1
    frames = np.lib.stride_tricks.sliding_window_view(x, p)[::hop][:n_frames]
    window = _WINDOWS[config.window](p)
    mags = np.abs(np.fft.rfft(frames * window, n=config.fft_length, axis=1))

    starts = np.arange(n_frames) * hop
    time_centers = (starts + p / 2.0) / fs
    freq_bins = np.arange(mags.shape[1]) * (fs / config.fft_length)
    return Spectrogram(magnitudes=mags, time_centers=time_centers, freq_bins=freq_bins)


def analytic_envelope(signal: Signal) -> Signal:
    """Magnitude of the analytic signal (frequency-domain Hilbert method).

    Negative-frequency components are zeroed, positive ones doubled, DC and
    Nyquist kept; the envelope is the magnitude of the inverse transform.
    """
    env = np.abs(scipy.signal.hilbert(signal.samples))
    return Signal(samples=env, sample_rate=signal.sample_rate)
