"""Per-row statistics vs the factorisation: four selectors on one record.

Spectral kurtosis, the stable-index selector, and the conditional-variance
selector each score every frequency row of the full-signal spectrogram in
isolation, so they can only ask "which rows look least Gaussian?".  On this
record the answer differs by statistic: kurtosis locks onto the rare,
enormous interference bursts at 6 kHz, while the two quantile-based scores
respond to the cyclic rows, whose frame populations are roughly half burst
and half noise.  Nothing in a per-row score knows which choice is the
cyclic one.  The correlation-based curve hedges and marks both excited
bands at once.
"""

import numpy as np

from faultband import (
    EnvsiConfig,
    SimConfig,
    StftConfig,
    alpha_selector,
    cv_selector,
    dependence_map,
    pearson_selector,
    selector_diagnosis,
    simulate,
    spectral_kurtosis,
    stft_spectrogram,
)

signal = simulate(SimConfig(rng_seed=0))
spec = stft_spectrogram(signal, StftConfig())
cfg = EnvsiConfig(fault_frequency=30.0)

curves = {
    "kurtosis": spectral_kurtosis(spec),
    "alpha": alpha_selector(spec),
    "cv": cv_selector(spec),
    "pearson": pearson_selector(dependence_map(spec)),
}

print(f"{'method':10} {'indicator':>9}  {'peak row':>8}  support")
for name, curve in curves.items():
    _, _, value = selector_diagnosis(signal, curve, cfg)
    peak = curve.freq_bins[np.argmax(curve.values)]
    on = curve.freq_bins[curve.values > 0.5]
    span = f"{on.min():.0f}-{on.max():.0f} Hz" if on.size else "none"
    print(f"{name:10} {value:9.4f}  {peak:6.0f} Hz  strong rows {span}")

print("\nan indicator above 0.1 says the filtered envelope repeats at the")
print("fault rate.  kurtosis picked the wrong band and scored near zero;")
print("the broad correlation curve diluted its envelope the same way.")
