"""From a G-code program to a joint trajectory.

Straight moves are joined with tangent arcs at every corner so the tool never
has to stop; corner speed is capped by the centripetal acceleration limit.

Run: python3 demos/04_gcode.py [program.nc]
"""

import sys
from pathlib import Path

from hybridpkm import MachineParams, parse_gcode
from hybridpkm.gcode import centripetal_ratios, plan_program

PROGRAM = """\
(square pocket finishing pass)
G00 X-50 Y-50 Z-60
G01 X50 F30000
Y50
X-50
Y-50
G00 Z-20
"""

params = MachineParams()
text = Path(sys.argv[1]).read_text() if len(sys.argv) > 1 else PROGRAM

for seg in parse_gcode(text):
    print(f"line {seg.line}: {seg.kind:5s} -> {tuple(round(v, 4) for v in seg.target)} feed {seg.feed}")

traj, path = plan_program(text, params)
print(f"\n{len(path.primitives)} primitives, {len(path.corners)} blended corners")
for c in path.corners:
    print(f"  corner at line {c.line}: radius {c.radius * 1e3:.3f} mm, speed {c.speed:.4f} m/s")

gaps, turns = path.junction_gaps()
print(f"largest position gap {max(gaps):.1e} m, "
      f"largest tangent jump {max(t for t in turns if t is not None):.1e} rad")
print(f"duration {traj.t[-1]:.4f} s, worst centripetal ratio {centripetal_ratios(traj, path, params).max():.4f}")
