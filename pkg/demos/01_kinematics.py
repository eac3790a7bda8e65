"""Walk through the kinematic model: home pose, both directions, assembly modes.

Run: python3 demos/01_kinematics.py
"""

import math

import numpy as np

from hybridpkm import (MachineParams, Pose, evaluate_cycle, fk_full, full_inv_jacobian, ik_full,
                       pose_assembly_mode, workspace_contains)
from hybridpkm.translation import fk_translation_roots, leg_determinant

params = MachineParams()
l = params.tool_length

# At home the wrist center sits at the origin and the tool points straight down,
# so the tip is one tool length below it and every leg is fully stretched.
home = Pose(0.0, 0.0, 0.0, 0.0, -l)
print("home joints:", ik_full(home, params))

# A tilted pose somewhere in the working cube.
pose = Pose(math.radians(20), math.radians(-15), 0.20, 0.10, 0.15)
q = ik_full(pose, params)
print("\npose:", pose)
print("joints:", q)
print("back again:", fk_full(q, params, pose_assembly_mode(pose, params)))

# The translational stage has two direct solutions for one joint triple. They
# lie on either side of the parallel singularity, where the leg directions
# become coplanar. Along the cube diagonal that surface is crossed at
# l_leg / sqrt(6), so the far corner of the cube needs the other branch.
print("\nleg determinant along the cube diagonal:")
for t in (0.0, 0.15, 0.30, 0.306, 0.35, 0.5):
    rho = ik_full(Pose(0, 0, t, t, t - l), params)[2:]
    lo, hi, _ = fk_translation_roots(rho, params)
    print(f"  t={t:5.3f}  det={leg_determinant((t, t, t), rho):+.4f}  roots {np.round(lo, 4)} {np.round(hi, 4)}")

far = Pose(0.0, 0.0, 0.45, 0.45, 0.45 - l)
mode = pose_assembly_mode(far, params)
print(f"\nfar corner is in assembly mode {mode:+d}; default -1 gives",
      np.round(fk_full(ik_full(far, params), params), 4))
print("a tracking loop can follow its own branch with near=:",
      np.round(fk_full(ik_full(far, params), params, near=far), 6))

# Rates: the inverse Jacobian maps the tool twist to joint rates.
twist = np.array([0.5, -0.2, 0.3, 0.0, -0.1])
print("\ninverse Jacobian:\n", np.round(full_inv_jacobian(pose, q, params), 5))
q_c, J, Jd = evaluate_cycle(pose, twist, params)
print("one control-cycle evaluation gives q, J^-1 and its rate; joint rates =", np.round(J @ twist, 5))

print("\nworkspace checks:")
for p in (home, Pose(math.radians(60), 0, 0, 0, -l), Pose(0, 0, 0, 1.8, 0)):
    print(" ", p, "->", workspace_contains(p, params))
