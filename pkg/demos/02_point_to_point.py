"""Plan the reference five-point tour and show how the limits shape it.

Each move uses a quintic time law. Its duration is first set from the speed
caps, then stretched until no joint or Cartesian speed or acceleration limit
is exceeded anywhere along the move.

Run: python3 demos/02_point_to_point.py [out.csv]
"""

import sys

import numpy as np

from hybridpkm import MachineParams, limits_for, plan_tour
from hybridpkm.csvio import write_trajectory
from hybridpkm.fixtures import table1_tour
from hybridpkm.trajectory import peak_ratios

params = MachineParams()
tour = table1_tour()
traj = plan_tour(tour, params, sample_rate=1500.0)

print(f"{'move':10s} {'first t_f':>10s} {'stretch':>8s} {'final t_f':>10s}  binding limit")
for seg in traj.segments:
    key = max(seg.peak_ratios, key=seg.peak_ratios.get) if seg.peak_ratios else "-"
    print(f"{seg.name:10s} {seg.t_f_initial:10.5f} {seg.multiplier:8.4f} {seg.t_f:10.5f}  {key}")

speed = np.linalg.norm(traj.V[:, 2:], axis=1)
print(f"\nduration {traj.t[-1]:.4f} s, {len(traj.t)} samples, peak tool speed {speed.max():.4f} m/s")
print("peak ratios to the limits (1.0 = at the limit):")
for k, v in sorted(peak_ratios(traj, limits_for(params)).items()):
    print(f"  {k:14s} {v:.4f}")

if len(sys.argv) > 1:
    write_trajectory(sys.argv[1], traj)
    print("written to", sys.argv[1])
