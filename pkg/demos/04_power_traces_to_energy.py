#!/usr/bin/env python3
# From raw power logs to per-model energy numbers: trapezoidal
# integration of instantaneous power, then a trimmed mean over repeated
# runs to tame measurement noise.

import numpy as np

from transistor_ops import (
    ColumnAdapter,
    PowerTrace,
    integrate_power,
    trimmed_mean,
)
from transistor_ops.energy import parse_power_trace

# Hand-built traces first. Constant 10 W for 5 s is 50 J; a linear ramp
# 0 -> 10 W over 10 s is also 50 J, and the trapezoid rule gets both
# exactly because power is piecewise linear.
print("rectangle:", integrate_power(PowerTrace((0.0, 5.0), (10.0, 10.0))), "J")
print("triangle: ", integrate_power(PowerTrace((0.0, 10.0), (0.0, 10.0))), "J")

# The canonical on-disk format is a two-column CSV.
canonical = "elapsed_s,power_w\n0.0,1\n1.0,3\n2.0,1\n"
print("polyline: ", integrate_power(parse_power_trace(canonical)), "J")

# Vendor logs rarely match the canonical layout; a column adapter maps
# a timestamp column (with its format) and a power column onto it.
vendor = ("System Time,CPU Utilization(%),IA Power_0(Watt)\n"
          "09:15:00:000,35,12.5\n"
          "09:15:01:000,36,12.7\n"
          "09:15:02:000,34,12.4\n")
adapter = ColumnAdapter(time_column="System Time",
                        power_column="IA Power_0(Watt)",
                        time_format="%H:%M:%S:%f")
trace = parse_power_trace(vendor, adapter)
print("vendor log:", f"{integrate_power(trace):.2f} J over {trace.times[-1]:.0f} s")

# Sixty noisy repetitions of the same nominal run: average after
# dropping the five highest and five lowest readings. Spikes from
# background activity land in the dropped tails.
rng = np.random.default_rng(42)
nominal = 2500.0
runs = nominal + 25.0 * rng.standard_normal(60)
runs[7] += 400.0    # a background-task spike
runs[33] -= 350.0   # a throttled run
print(f"\nraw mean of 60 runs:     {np.mean(runs):10.2f} J")
print(f"trimmed mean (drop 5+5): {trimmed_mean(runs.tolist(), 5):10.2f} J")
print(f"nominal:                 {nominal:10.2f} J")
