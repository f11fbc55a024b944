"""A miniature Monte-Carlo robustness grid.

The full benchmark sweeps burst amplitudes over a 3 x 3 grid with ten
30-second trials per cell; that takes tens of minutes.  This demo shrinks
everything - short records, two amplitudes, two trials - to show the
mechanics: per-trial seeds are derived from the cell and trial indices, a
trial succeeds when the indicator clears the threshold AND the selector's
energy centroid lands near the true carrier, and the result is one success
percentage per cell and method.
"""

from faultband import SimConfig, efficiency

grid = efficiency(
    aci_values=(1.0, 4.0),
    anci_values=(20.0,),
    trials=2,
    methods=("ntf", "kurtosis"),
    seed=0,
    sim_template=SimConfig(duration=4.0),
    segment_count=8,
)

print(f"{grid.trials} trials per cell, interference amplitude "
      f"{grid.anci_values[0]:g}\n")
print(f"{'cyclic amplitude':>16} | {'ntf %':>6} | {'kurtosis %':>10}")
for i, aci in enumerate(grid.aci_values):
    ntf = grid.success_percent["ntf"][i, 0]
    kurt = grid.success_percent["kurtosis"][i, 0]
    print(f"{aci:16g} | {ntf:6.0f} | {kurt:10.0f}")

print("\nsplit runs pool exactly: rerunning with trial_offset=2 and adding")
print("counts equals one four-trial run, so grids can grow incrementally.")
