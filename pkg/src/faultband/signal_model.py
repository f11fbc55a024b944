"""Synthetic vibration signals: a cyclic train of decaying bursts, random
high-energy interference bursts, and Gaussian background noise.

All three components are additive.  Each burst is a damped harmonic
oscillation ``A * sin(2*pi*f_c*t) * exp(-d*t)`` truncated once its envelope
falls below a small fraction of the initial amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# A decaying burst is cut off once exp(-d*t) drops below this fraction.
ENVELOPE_CUTOFF = 1e-4


@dataclass(frozen=True)
class SoiParams:
    """Parameters of the cyclic burst train (the component of interest).

    Parameters
    ----------
    amplitude : float
        Peak amplitude of each burst.
    fault_frequency : float
        Repetition rate of the bursts, Hz.
    carrier_frequency : float
        Oscillation frequency inside each burst, Hz.
    decay : float
        Exponential decay rate, 1/s.  Zero means no decay.
    origin : float
        Onset time of the first burst, s.
    """

    amplitude: float = 4.0
    fault_frequency: float = 30.0
    carrier_frequency: float = 2500.0
    decay: float = 1000.0
    origin: float = 0.0

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise ParameterError("amplitude must be >= 0")
        if self.fault_frequency <= 0:
            raise ParameterError("fault_frequency must be > 0")
        if self.carrier_frequency <= 0:
            raise ParameterError("carrier_frequency must be > 0")
        if self.decay < 0:
            raise ParameterError("decay must be >= 0")
        if self.origin < 0:
            raise ParameterError("origin must be >= 0")


@dataclass(frozen=True)
class ImpulseNoiseParams:
    """Parameters of the randomly located interference bursts.

    ``amplitude_scale`` sets the typical burst amplitude; individual bursts
    draw their amplitude uniformly from ``[0.5, 1.5] * amplitude_scale`` with
    a random sign.  Burst count over the record is Poisson with mean
    ``expected_count_per_second * duration`` and onsets are uniform in time.
    """

    amplitude_scale: float = 20.0
    carrier_frequency: float = 6000.0
    decay: float = 1000.0
    expected_count_per_second: float = 1.5

    def __post_init__(self) -> None:
        if self.amplitude_scale < 0:
            raise ParameterError("amplitude_scale must be >= 0")
        if self.carrier_frequency <= 0:
            raise ParameterError("carrier_frequency must be > 0")
        if self.decay < 0:
            raise ParameterError("decay must be >= 0")
        if self.expected_count_per_second < 0:
            raise ParameterError("expected_count_per_second must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    """Full description of one synthetic record.

    ``gaussian_sigma`` is the *variance* of the additive Gaussian noise
    component (the generated noise has standard deviation
    ``sqrt(gaussian_sigma)``).
    """

    soi: SoiParams = SoiParams()
    impulses: ImpulseNoiseParams = ImpulseNoiseParams()
    gaussian_sigma: float = 1.2
    sample_rate: float = 25000.0
    duration: float = 30.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.gaussian_sigma < 0:
            raise ParameterError("gaussian_sigma must be >= 0")
        if self.sample_rate <= 0:
            raise ParameterError("sample_rate must be > 0")
        if self.duration <= 0:
            raise ParameterError("duration must be > 0")


@dataclass(frozen=True)
class Signal:
    """A uniformly sampled real-valued record."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ParameterError("samples must be a non-empty 1-D vector")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("samples must be finite")
        if self.sample_rate <= 0:
            raise ParameterError("sample_rate must be > 0")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    @property
    def duration(self) -> float:
        """Record length in seconds."""
        return self.samples.size / self.sample_rate


def soi_waveform(params: SoiParams, t):
    """Evaluate one burst at time ``t`` (seconds past the burst onset).

    Returns ``amplitude * sin(2*pi*carrier*t) * exp(-decay*t)``.  ``t`` may
    be a scalar or an array; negative times are outside the burst support
    and the caller is expected not to pass them.
    """
    t = np.asarray(t, dtype=np.float64)
    out = (
        params.amplitude
        * np.sin(2.0 * np.pi * params.carrier_frequency * t)
        * np.exp(-params.decay * t)
    )
    if out.ndim == 0:
        return float(out)
    return out


def _burst_length(decay: float, sample_rate: float, cap: int) -> int:
    """Number of samples a burst keeps above the envelope cutoff."""
    if decay <= 0:
        return cap
    tail = np.log(1.0 / ENVELOPE_CUTOFF) / decay
    return min(cap, int(np.floor(tail * sample_rate)) + 1)


def simulate(config: SimConfig) -> Signal:
    """Generate one synthetic record.

    The record is the sum of a cyclic burst train, randomly located
    interference bursts, and white Gaussian noise.  The same
    ``config`` (including ``rng_seed``) always produces bit-identical
    samples.  Consecutive cyclic onsets are spaced by
    ``round(sample_rate / fault_frequency)`` samples.

    Raises
    ------
    ParameterError
        If either carrier frequency is at or above the Nyquist rate, or the
        burst repetition period rounds below one sample.
    """
    fs = float(config.sample_rate)
    nyquist = fs / 2.0
    soi_active = config.soi.amplitude > 0
    imp_active = (
        config.impulses.amplitude_scale > 0
        and config.impulses.expected_count_per_second > 0
    )
    if soi_active and config.soi.carrier_frequency >= nyquist:
        raise ParameterError("cyclic carrier frequency must lie below Nyquist")
    if imp_active and config.impulses.carrier_frequency >= nyquist:
        raise ParameterError("interference carrier frequency must lie below Nyquist")

    n = int(round(fs * config.duration))
    if n < 1:
        raise ParameterError("duration too short for one sample")

    rng = np.random.default_rng(config.rng_seed)
    x = np.zeros(n, dtype=np.float64)

    soi = config.soi
    if soi.amplitude > 0:
        period = fs / soi.fault_frequency
        if round(period) < 1:
            raise ParameterError("fault_frequency too high for the sample rate")
        length = _burst_length(soi.decay, fs, n)
        template = soi_waveform(soi, np.arange(length) / fs)
        # Onsets are rounded per impulse rather than once for the spacing, so
        # the realized repetition rate stays exactly fault_frequency on
        # average; a constant rounded spacing would bias the rate and smear
        # the envelope harmonics off the analysis bins.
        start = soi.origin * fs
        for k in range(int(np.ceil((n - start) / period)) + 1):
            onset = int(round(start + k * period))
            if onset >= n:
                break
            stop = min(onset + length, n)
            x[onset:stop] += template[: stop - onset]

    imp = config.impulses
    if imp.amplitude_scale > 0 and imp.expected_count_per_second > 0:
        count = int(rng.poisson(imp.expected_count_per_second * config.duration))
        onsets = np.floor(rng.uniform(0.0, config.duration, size=count) * fs)
        onsets = np.minimum(onsets.astype(np.int64), n - 1)
        amplitudes = rng.uniform(
            0.5 * imp.amplitude_scale, 1.5 * imp.amplitude_scale, size=count
        )
        signs = rng.integers(0, 2, size=count) * 2 - 1
        length = _burst_length(imp.decay, fs, n)
        tau = np.arange(length) / fs
        base = np.sin(2.0 * np.pi * imp.carrier_frequency * tau) * np.exp(
            -imp.decay * tau
        )
        for onset, amp in zip(onsets, amplitudes * signs):
            stop = min(onset + length, n)
            x[onset:stop] += amp * base[: stop - onset]

    if config.gaussian_sigma > 0:
        x += rng.normal(0.0, np.sqrt(config.gaussian_sigma), size=n)

    return Signal(samples=x, sample_rate=fs)
