"""Per-frequency-band selector curves.

Each selector maps the spectrogram of the whole record (or its dependence
map) to a non-negative curve over frequency bins, max-normalised to [0, 1].
High values mark bands whose time evolution looks impulsive (kurtosis,
stability index, conditional variance) or strongly co-modulated (pairwise
correlation).  The per-row statistics are exposed as plain functions so they
can be checked on raw samples directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .dependence import DependenceMap
from .errors import ParameterError, SizeError
from .spectral import Spectrogram

#: Quantile orders bounding the seven-group sample partition.
QUANTILE_ORDERS = (0.004, 0.062, 0.308, 0.692, 0.938, 0.996)

# Quantile lookup for the stability index alpha (McCulloch's estimator):
# rows indexed by nu_alpha = (q95-q05)/(q75-q25), columns by
# nu_beta = |q95+q05-2*q50|/(q95-q05).  Inputs are clamped to the grid.
_NU_ALPHA = np.array(
    [2.439, 2.5, 2.6, 2.7, 2.8, 3.0, 3.2, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 25.0]
)
_NU_BETA = np.array([0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0])
_ALPHA_TABLE = np.array(
    [
        [2.000, 2.000, 2.000, 2.000, 2.000, 2.000, 2.000],
        [1.916, 1.924, 1.924, 1.924, 1.924, 1.924, 1.924],
        [1.808, 1.813, 1.829, 1.829, 1.829, 1.829, 1.829],
        [1.729, 1.730, 1.737, 1.745, 1.745, 1.745, 1.745],
        [1.664, 1.663, 1.663, 1.668, 1.676, 1.676, 1.676],
        [1.563, 1.560, 1.553, 1.548, 1.547, 1.547, 1.547],
        [1.484, 1.480, 1.471, 1.460, 1.448, 1.438, 1.438],
        [1.391, 1.386, 1.378, 1.364, 1.337, 1.318, 1.318],
        [1.279, 1.273, 1.266, 1.250, 1.210, 1.184, 1.150],
        [1.128, 1.121, 1.114, 1.101, 1.067, 1.027, 0.973],
        [1.029, 1.021, 1.014, 1.004, 0.974, 0.935, 0.874],
        [0.896, 0.892, 0.887, 0.883, 0.855, 0.823, 0.769],
        [0.818, 0.812, 0.806, 0.801, 0.780, 0.756, 0.691],
        [0.698, 0.695, 0.692, 0.689, 0.676, 0.656, 0.595],
        [0.593, 0.590, 0.588, 0.586, 0.579, 0.563, 0.513],
    ]
)
_ALPHA_LOOKUP = RegularGridInterpolator((_NU_ALPHA, _NU_BETA), _ALPHA_TABLE)


@dataclass(frozen=True)
class SelectorCurve:
    """Non-negative per-bin curve, max-normalised unless identically zero."""

    values: np.ndarray
    freq_bins: np.ndarray
    method: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        freqs = np.asarray(self.freq_bins, dtype=np.float64)
        if values.ndim != 1 or values.size != freqs.size:
            raise ParameterError("values and freq_bins must be 1-D and equally long")
        if not np.all(np.isfinite(values)):
            raise ParameterError("curve values must be finite")
        if np.any(values < 0) or np.any(values > 1.0):
            raise ParameterError("curve values must lie in [0, 1]")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "freq_bins", freqs)


@dataclass(frozen=True)
class StablePartitions:
    """The seven half-open intervals cut at the :data:`QUANTILE_ORDERS`.

    Interval i (1-based) is (edges[i-2], edges[i-1]], with the first and
    last intervals extending to -inf and +inf.
    """

    edges: np.ndarray  # six quantile values, non-decreasing

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=np.float64)
        if edges.shape != (len(QUANTILE_ORDERS),):
            raise ParameterError(f"expected {len(QUANTILE_ORDERS)} partition edges")
        if np.any(np.diff(edges) < 0):
            raise ParameterError("partition edges must be non-decreasing")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_sample(cls, x) -> "StablePartitions":
        x = np.asarray(x, dtype=np.float64)
        return cls(edges=np.quantile(x, QUANTILE_ORDERS))

    def group_indices(self, x) -> np.ndarray:
        """0-based group index (0..6) of every sample."""
        return np.digitize(np.asarray(x, dtype=np.float64), self.edges, right=True)


def _normalized(values: np.ndarray) -> np.ndarray:
    top = values.max()
    if top > 0:
        return values / top
    return values


def excess_kurtosis(x) -> float:
    """Biased-moment excess kurtosis; 0 for a zero-variance sample."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 4:
        raise SizeError("kurtosis needs at least 4 samples")
    d = x - x.mean()
    m2 = np.mean(d * d)
    if m2 == 0.0:
        return 0.0
    m4 = np.mean(d**4)
    return float(m4 / (m2 * m2) - 3.0)


def stable_alpha(x) -> float:
    """Stability-index estimate from sample quantiles.

    Computes nu_alpha and nu_beta from the 5/25/50/75/95 % quantiles and
    looks alpha up by bilinear interpolation in the embedded table, clamping
    both coordinates to the tabulated range.  Values near 2 indicate
    Gaussian-like tails, values near 1 Cauchy-like tails.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 20:
        raise SizeError("stability-index estimation needs at least 20 samples")
    q05, q25, q50, q75, q95 = np.quantile(x, [0.05, 0.25, 0.50, 0.75, 0.95])
    iqr = q75 - q25
    span = q95 - q05
    if iqr == 0.0 or span == 0.0:
        return 2.0
    nu_a = min(max(span / iqr, _NU_ALPHA[0]), _NU_ALPHA[-1])
    nu_b = min(abs((q95 + q05 - 2.0 * q50) / span), _NU_BETA[-1])
    return float(_ALPHA_LOOKUP((nu_a, nu_b)))


def cv_statistic(x) -> float:
    """Conditional-variance dispersion-balance statistic of one sample row.

    The sample is split into the seven quantile groups; the statistic
    contrasts the variances of the central three groups, scaled by the
    overall standard deviation, squared, and multiplied by sqrt(sample
    size).  It concentrates near 0 for Gaussian data and grows with tail
    weight.  Returns 0 for degenerate rows (zero variance or an empty
    central group).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 250:
        raise SizeError("conditional-variance statistic needs at least 250 samples")
    sigma = np.std(x)
    if sigma == 0.0:
        return 0.0
    groups = StablePartitions.from_sample(x).group_indices(x)
    variances = []
    for g in (2, 3, 4):  # central groups A3, A4, A5
        members = x[groups == g]
        if members.size == 0:
            return 0.0
        variances.append(np.var(members))
    v3, v4, v5 = variances
    balance = (v3 - v4) / sigma + (v5 - v4) / sigma
    return float(balance * balance * np.sqrt(x.size))


def spectral_kurtosis(spec: Spectrogram) -> SelectorCurve:
    """Excess kurtosis of each frequency row, clipped at 0 and normalised."""
    if spec.frame_count < 4:
        raise SizeError("need at least 4 frames per frequency row")
    mags = spec.magnitudes
    values = np.array(
        [excess_kurtosis(np.ascontiguousarray(mags[:, j])) for j in range(spec.bin_count)]
    )
    np.maximum(values, 0.0, out=values)
    return SelectorCurve(_normalized(values), spec.freq_bins, "kurtosis")


def alpha_selector(spec: Spectrogram) -> SelectorCurve:
    """2 minus the per-row stability index, clipped at 0 and normalised."""
    if spec.frame_count < 20:
        raise SizeError("need at least 20 frames per frequency row")
    mags = spec.magnitudes
    values = np.array(
        [2.0 - stable_alpha(np.ascontiguousarray(mags[:, j])) for j in range(spec.bin_count)]
    )
    np.maximum(values, 0.0, out=values)
    return SelectorCurve(_normalized(values), spec.freq_bins, "alpha")


def cv_selector(spec: Spectrogram) -> SelectorCurve:
    """Conditional-variance statistic of each frequency row, normalised."""
    if spec.frame_count < 250:
        raise SizeError("need at least 250 frames per frequency row")
    mags = spec.magnitudes
    values = np.array(
        [cv_statistic(np.ascontiguousarray(mags[:, j])) for j in range(spec.bin_count)]
    )
    return SelectorCurve(_normalized(values), spec.freq_bins, "cv")


def _density_valley_threshold(column: np.ndarray) -> float:
    """First quartile of the histogram valleys of one map column.

    The empirical density is a Freedman-Diaconis histogram; valleys are
    interior bins strictly lower than both neighbours.  Falls back to the
    column median when no valley exists.
    """
    counts, edges = np.histogram(column, bins="fd")
    if counts.size >= 3:
        interior = counts[1:-1]
        mask = (interior < counts[:-2]) & (interior < counts[2:])
        if np.any(mask):
            centers = (edges[1:-2] + edges[2:-1]) / 2.0
            return float(np.quantile(centers[mask], 0.25))
    return float(np.median(column))


def pearson_selector(dmap: DependenceMap, th2_factor: float = 1.1) -> SelectorCurve:
    """Average of each map column's values above its density-valley threshold.

    Per column j, a threshold TH1 is placed at the first quartile of the
    column-density valleys (median fallback) and the entries above TH1 are
    averaged.  The aggregated curve is then cleaned by zeroing everything at
    or below TH2 = ``th2_factor`` times its third quartile, clipped at 0,
    and max-normalised.
    """
    if th2_factor < 0:
        raise ParameterError("th2_factor must be >= 0")
    values = dmap.values
    f_count = values.shape[0]
    raw = np.empty(f_count)
    for j in range(f_count):
        column = values[:, j]
        th1 = _density_valley_threshold(column)
        above = column[column > th1]
        raw[j] = above.mean() if above.size else 0.0
    np.maximum(raw, 0.0, out=raw)
    th2 = th2_factor * np.quantile(raw, 0.75)
    raw[raw <= th2] = 0.0
    return SelectorCurve(_normalized(raw), dmap.freq_bins, "pearson")


def energy_centroid(curve: SelectorCurve) -> float:
    """Squared-value-weighted mean frequency of a curve; NaN if all-zero."""
    weights = curve.values**2
    total = weights.sum()
    if total == 0.0:
        return float("nan")
    return float((curve.freq_bins * weights).sum() / total)
