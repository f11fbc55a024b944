"""The full pipeline: tensor factorisation, filtering, and the verdict.

A rank-4 non-negative factorisation with the Itakura-Saito divergence
(beta = -1) splits the dependence tensor into classes.  Each class's
frequency profile becomes a selector curve; the curve whose filtered signal
has the most harmonic envelope energy wins.  On the benchmark record the
winning class sits on the cyclic carrier and the indicator lands near 0.9.
"""

import numpy as np

from faultband import (
    EnvsiConfig,
    NtfConfig,
    SimConfig,
    build_tensor,
    decompose,
    diagnose,
    energy_centroid,
    simulate,
)

signal = simulate(SimConfig(rng_seed=0))
tensor = build_tensor(signal, segment_count=30)

factors = decompose(tensor, NtfConfig(beta=-1.0, max_iterations=400))
print(f"solver: {factors.iterations_run} sweeps, "
      f"objective {factors.objective_trace[0]:.3g} -> {factors.objective_trace[-1]:.3g}")

report = diagnose(signal, factors, EnvsiConfig(fault_frequency=30.0))
for k, (value, curve) in enumerate(zip(report.envsi_values, report.curves)):
    marker = " <- chosen" if k == report.chosen_class else ""
    centroid = energy_centroid(curve)
    where = f"{centroid:7.0f} Hz" if np.isfinite(centroid) else "   (empty)"
    print(f"class {k}: indicator {value:.4f}, energy centroid {where}{marker}")

print(f"verdict: {report.verdict} "
      f"(indicator {report.envsi_values[report.chosen_class]:.4f} "
      f"vs threshold {report.threshold:g})")
