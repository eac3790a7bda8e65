"""Kinematics, trajectory planning and control simulation for a hybrid
five-axis machine: a three-leg translational parallel stage carrying a
two-axis parallel wrist.

Poses are ``(alpha, beta, x, y, z)`` with tool angles in rad and the tool-tip
position in m; joints are ``(theta1, theta2, rho1, rho2, rho3)``.
"""

from .errors import (ConfigError, DegenerateCorner, GCodeError, JointLimit, KinematicsError,
                     MalformedWord, NoRealSolution, Shutdown, Singular, SingularInput, TiltLimit,
                     UnsupportedCode, WorkspaceExit)
from .model import ControlGains, JointState, MachineParams, Pose, Twist, dump_params, load_params
from .translation import (WorkingMode, assembly_mode_of, fk_translation, fk_translation_roots, ik_translation,
                          inv_jacobian_translation)
from .wrist import fk_wrist, ik_wrist, inv_jacobian_wrist, tool_direction
from .workspace import center_contains, check_cube, workspace_contains
from .hybrid import (coupling_jacobian, evaluate_cycle, fk_full, full_inv_jacobian,
                     full_inv_jacobian_dot, ik_full, pose_assembly_mode)
from .trajectory import (CircleSpec, Limits, Trajectory, TrajectorySample, concatenate, limits_for,
                         plan_circular, plan_linear, plan_tour, quintic, rescale_to_limits,
                         travel_time)
from .gcode import GSegment, blend_corners, parse_gcode, plan_gcode, serialize_gcode
from .control import (Disturbance, SimConfig, SimTrace, computed_torque, estimate_velocity,
                      run_sim, torque_normalization)

__version__ = "0.1.0"
