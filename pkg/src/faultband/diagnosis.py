"""From selector curve to verdict: zero-phase band weighting, squared
envelope spectra, and the harmonic-energy indicator.

A selector curve is applied as a magnitude characteristic on the full-signal
spectrum.  The squared envelope spectrum (SES) of the filtered record shows
the cyclic content; the indicator is the ratio of squared harmonic peak
amplitudes to the total squared SES energy in the monitored band, so values
near 1 mean nearly all envelope energy sits on the fault harmonics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SizeError
from .ntf import NtfFactors
from .selectors import SelectorCurve
from .signal_model import Signal
from .spectral import analytic_envelope

#: Indicator level above which a record is declared faulty.
DECISION_THRESHOLD = 0.1


@dataclass(frozen=True)
class EnvelopeSpectrum:
    """One-sided magnitude spectrum of the squared envelope, DC removed."""

    amplitudes: np.ndarray
    freq_bins: np.ndarray  # Hz, starting at one bin spacing

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        freqs = np.asarray(self.freq_bins, dtype=np.float64)
        if amps.ndim != 1 or amps.size != freqs.size:
            raise ParameterError("amplitudes and freq_bins must be 1-D and equally long")
        if not np.all(np.isfinite(amps)) or np.any(amps < 0):
            raise ParameterError("amplitudes must be finite and non-negative")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ParameterError("freq_bins must be strictly increasing")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "freq_bins", freqs)


@dataclass(frozen=True)
class EnvsiConfig:
    """Settings of the harmonic-energy indicator.

    ``harmonic_tolerance`` is the half-width (Hz) of the window searched
    around each harmonic for its peak; ``None`` resolves to two SES bin
    spacings at evaluation time.  ``total_band_top`` bounds the denominator
    band; ``None`` resolves to ``harmonic_count * fault_frequency +
    tolerance``, i.e. the denominator ends with the last harmonic window.
    """

    fault_frequency: float
    harmonic_count: int = 5
    harmonic_tolerance: float | None = None
    total_band_top: float | None = None

    def __post_init__(self) -> None:
        if self.fault_frequency <= 0:
            raise ParameterError("fault_frequency must be > 0")
        if self.harmonic_count < 1:
            raise ParameterError("harmonic_count must be >= 1")
        if self.harmonic_tolerance is not None and self.harmonic_tolerance <= 0:
            raise ParameterError("harmonic_tolerance must be > 0")
        if self.total_band_top is not None and self.total_band_top <= 0:
            raise ParameterError("total_band_top must be > 0")


@dataclass(frozen=True)
class DiagnosisReport:
    """Per-class indicator values and the resulting verdict."""

    curves: tuple[SelectorCurve, ...]
    envsi_values: np.ndarray
    chosen_class: int
    beta: float
    verdict: str  # "faulty" or "healthy"
    threshold: float
    filtered_signal: Signal
    envelope_spectra: tuple[EnvelopeSpectrum, ...]
    zero_curve_classes: tuple[int, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.envsi_values, dtype=np.float64)
        if not 0 <= self.chosen_class < values.size:
            raise ParameterError("chosen_class out of range")
        if self.verdict not in ("faulty", "healthy"):
            raise ParameterError("verdict must be 'faulty' or 'healthy'")
        object.__setattr__(self, "envsi_values", values)


def filter_with_selector(signal: Signal, curve: SelectorCurve) -> Signal:
    """Zero-phase filtering of ``signal`` by ``curve`` as magnitude gain.

    The full-signal spectrum is multiplied bin-wise by the curve value
    linearly interpolated at each non-negative frequency (negative
    frequencies follow by conjugate symmetry), then transformed back.  The
    curve must span 0..Nyquist of the signal.  An all-zero curve yields an
    all-zero output.
    """
    fs = signal.sample_rate
    slack = 1e-6 * fs
    if curve.freq_bins[0] > slack or curve.freq_bins[-1] < fs / 2.0 - slack:
        raise ParameterError("selector curve must span 0..Nyquist of the signal")
    x = signal.samples
    spectrum = np.fft.rfft(x)
    gains = np.interp(np.fft.rfftfreq(x.size, d=1.0 / fs), curve.freq_bins, curve.values)
    return Signal(np.fft.irfft(spectrum * gains, n=x.size), fs)


def squared_envelope_spectrum(signal: Signal) -> EnvelopeSpectrum:
    """Magnitude spectrum of the squared analytic envelope, DC bin removed."""
    env = analytic_envelope(signal).samples
    squared = env * env
    amplitudes = np.abs(np.fft.rfft(squared))
    freqs = np.fft.rfftfreq(squared.size, d=1.0 / signal.sample_rate)
    return EnvelopeSpectrum(amplitudes=amplitudes[1:], freq_bins=freqs[1:])


def envsi(ses: EnvelopeSpectrum, config: EnvsiConfig) -> float:
    """Ratio of squared harmonic peaks to total squared SES band energy.

    The numerator takes, for each of the first ``harmonic_count`` multiples
    of the fault frequency, the largest SES amplitude within the harmonic
    tolerance window, and sums the squares.  The denominator sums squared
    amplitudes over all bins up to the resolved band top, which always
    contains every harmonic window, so the result lies in [0, 1].
    """
    freqs = ses.freq_bins
    amps = ses.amplitudes
    if freqs.size < 2:
        raise SizeError("envelope spectrum needs at least two bins")
    df = freqs[1] - freqs[0]
    ff = config.fault_frequency
    tol = 2.0 * df if config.harmonic_tolerance is None else config.harmonic_tolerance
    if tol >= ff / 2.0:
        raise ParameterError(
            "harmonic_tolerance must stay below half the fault frequency "
            "(windows must not overlap)"
        )
    slack = 1e-9 * df
    top = config.harmonic_count * ff + tol if config.total_band_top is None else config.total_band_top
    if top < config.harmonic_count * ff + tol - slack:
        raise ParameterError("total_band_top must cover every harmonic window")
    if config.harmonic_count * ff + tol > freqs[-1] + slack:
        raise ParameterError("envelope spectrum does not reach the highest harmonic")

    numerator = 0.0
    for i in range(1, config.harmonic_count + 1):
        window = np.abs(freqs - i * ff) <= tol + slack
        if not window.any():
            raise ParameterError(
                "empty harmonic window: tolerance is below the bin spacing"
            )
        peak = amps[window].max()
        numerator += peak * peak
    band = amps[freqs <= top + slack]
    denominator = float(np.sum(band * band))
    if denominator == 0.0:
        return 0.0
    return float(numerator / denominator)


def selector_diagnosis(
    signal: Signal, curve: SelectorCurve, config: EnvsiConfig
) -> tuple[Signal, EnvelopeSpectrum, float]:
    """Filter with one curve and score it: (filtered, SES, indicator)."""
    filtered = filter_with_selector(signal, curve)
    ses = squared_envelope_spectrum(filtered)
    return filtered, ses, envsi(ses, config)


def diagnose(
    signal: Signal,
    factors: NtfFactors,
    envsi_cfg: EnvsiConfig,
    threshold: float = DECISION_THRESHOLD,
) -> DiagnosisReport:
    """Score every factor class and render the verdict.

    Each column of H becomes a selector curve (max-normalised), is applied
    to the signal, and its SES indicator is computed.  The class with the
    highest indicator is chosen; the verdict is "faulty" iff that value
    exceeds ``threshold``.  Classes whose curve is identically zero are
    listed in ``zero_curve_classes`` (their indicator is 0).
    """
    if factors.freq_bins is None:
        raise ParameterError(
            "factors carry no frequency bins; decompose a DependenceTensor"
        )
    curves = []
    filtered_signals = []
    spectra = []
    values = []
    zero_classes = []
    for k in range(factors.rank):
        column = factors.H[:, k]
        top = column.max()
        curve = SelectorCurve(
            values=column / top if top > 0 else column,
            freq_bins=factors.freq_bins,
            method=f"ntf-{k}",
        )
        if top == 0:
            zero_classes.append(k)
        filtered, ses, value = selector_diagnosis(signal, curve, envsi_cfg)
        curves.append(curve)
        filtered_signals.append(filtered)
        spectra.append(ses)
        values.append(value)

    envsi_values = np.asarray(values)
    chosen = int(np.argmax(envsi_values))
    verdict = "faulty" if envsi_values[chosen] > threshold else "healthy"
    return DiagnosisReport(
        curves=tuple(curves),
        envsi_values=envsi_values,
        chosen_class=chosen,
        beta=factors.beta,
        verdict=verdict,
        threshold=threshold,
        filtered_signal=filtered_signals[chosen],
        envelope_spectra=tuple(spectra),
        zero_curve_classes=tuple(zero_classes),
    )
