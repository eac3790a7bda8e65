"""G00/G01 front-end: parsing, corner blending and constant-feed planning.

Words: ``G0``/``G00`` (rapid), ``G1``/``G01`` (feed), ``X Y Z`` in mm,
``A B`` in degrees (tool angles alpha, beta), ``F`` in mm/min. Motion mode,
coordinates and feed are modal. ``N`` line numbers and ``%`` tape markers are
accepted and ignored; any other G or M word is rejected.

Blending replaces every corner between two moves by a tangent arc. Lines run
at the commanded feed with quintic speed ramps; arcs run at a constant speed
bounded by the centripetal limit ``v**2 / r <= a_t_max``.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import numpy as np

from .errors import DegenerateCorner, MalformedWord, UnsupportedCode
from .model import MachineParams, Pose
from .trajectory import (DEFAULT_RATE, LinePath, Motion, QuinticMotion, Trajectory, limits_for,
                         sample_motion, travel_time)
from .translation import DEFAULT_WORKING_MODE

RAPID = "rapid"
FEED = "feed"

COLLINEAR_TOL = 1e-9
DEFAULT_CORNER_CAP = 0.01
# peak acceleration of a quintic speed ramp is 1.875 * dv / T
RAMP_PEAK = 1.875

_PI = Decimal("3.14159265358979323846264338327950288419716939937510582097494459")
_PREC = 80
# pose index -> (word letter, SI value per unit written in the program)
_AXES = (("A", "deg"), ("B", "deg"), ("X", "mm"), ("Y", "mm"), ("Z", "mm"))
_WORD = re.compile(r"([A-Za-z])\s*([+-]?(?:\d+\.?\d*|\.\d+))")


@dataclass(frozen=True)
class GSegment:
    """One motion block. ``feed`` is in m/s and only set for feed moves."""

    kind: str
    target: Pose
    feed: float | None = None
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in (RAPID, FEED):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.kind == FEED and not (self.feed is not None and self.feed > 0):
            raise ValueError("feed moves need a positive feed")


# --------------------------------------------------------------------------
# units


def _factor(unit):
    with localcontext() as ctx:
        ctx.prec = _PREC
        if unit == "mm":
            return Decimal(1) / Decimal(1000)
        if unit == "deg":
            return _PI / Decimal(180)
        if unit == "mm/min":
            return Decimal(1) / Decimal(60000)
    raise ValueError(unit)


def _decode(text, unit):
    with localcontext() as ctx:
        ctx.prec = _PREC
        return float(Decimal(text) * _factor(unit))


def _encode(value, unit):
    """Shortest decimal string that decodes back to exactly ``value``."""
    with localcontext() as ctx:
        ctx.prec = _PREC
        exact = Decimal(value) / _factor(unit)
    for digits in range(6, 18):
        text = _format(exact, digits)
        if _decode(text, unit) == value:
            return text
    return _format(exact, _PREC - 2)


def _format(d: Decimal, digits):
    with localcontext() as ctx:
        ctx.prec = digits
        text = format(+d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


# --------------------------------------------------------------------------
# parsing


def _strip_comments(raw, lineno):
    out = []
    depth = 0
    for ch in raw:
        if ch == ";" and depth == 0:
            break
        if ch == "(":
            if depth:
                raise MalformedWord("nested comment", lineno)
            depth = 1
        elif ch == ")":
            if not depth:
                raise MalformedWord("unmatched ')'", lineno)
            depth = 0
        elif not depth:
            out.append(ch)
    if depth:
        raise MalformedWord("unterminated comment", lineno)
    return "".join(out)


def _words(text, lineno):
    words = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _WORD.match(text, pos)
        if not m:
            raise MalformedWord(f"cannot read word at {text[pos:pos + 12]!r}", lineno)
        words.append((m.group(1).upper(), m.group(2)))
        pos = m.end()
    return words


def parse_gcode(text: str, start=Pose(0.0, 0.0, 0.0, 0.0, 0.0)):
    """Parse program text into :class:`GSegment` blocks.

    ``start`` gives the modal coordinates before the first block. A block is
    emitted for every line carrying at least one axis word.
    """
    current = list(start)
    mode = None
    feed = None
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comments(raw, lineno).strip()
        if body in ("", "%"):
            continue
        seen = set()
        axes = {}
        new_mode = None
        for letter, number in _words(body, lineno):
            if letter in seen and letter != "N":
                raise MalformedWord(f"duplicate {letter} word", lineno)
            seen.add(letter)
            if letter == "G":
                value = Decimal(number)
                if value not in (0, 1):
                    raise UnsupportedCode(f"G{number} is not supported (only G00 and G01)", lineno)
                new_mode = RAPID if value == 0 else FEED
            elif letter == "M":
                raise UnsupportedCode(f"M{number} is not supported", lineno)
            elif letter == "F":
                f = _decode(number, "mm/min")
                if not f > 0:
                    raise MalformedWord(f"feed must be positive, got F{number}", lineno)
                feed = f
            elif letter == "N":
                continue
            else:
                idx = next((i for i, (ax, _) in enumerate(_AXES) if ax == letter), None)
                if idx is None:
                    raise UnsupportedCode(f"word {letter}{number} is not supported", lineno)
                axes[idx] = _decode(number, _AXES[idx][1])
        if new_mode is not None:
            mode = new_mode
        if not axes:
            continue
        if mode is None:
            raise MalformedWord("axis words before any G00/G01", lineno)
        if mode == FEED and feed is None:
            raise MalformedWord("feed move without a feed rate", lineno)
        for idx, value in axes.items():
            current[idx] = value
        segments.append(GSegment(mode, Pose(*current), feed if mode == FEED else None, lineno))
    return segments


def serialize_gcode(segments) -> str:
    """Program text that :func:`parse_gcode` reads back into equal segments."""
    lines = []
    for seg in segments:
        words = ["G00" if seg.kind == RAPID else "G01"]
        for letter, value in zip("XYZAB", (seg.target.x, seg.target.y, seg.target.z,
                                           seg.target.alpha, seg.target.beta)):
            words.append(letter + _encode(value, "deg" if letter in "AB" else "mm"))
        if seg.kind == FEED:
            words.append("F" + _encode(seg.feed, "mm/min"))
        lines.append(" ".join(words))
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------------------
# blended path primitives


class _SpeedProfile:
    """Arc-length law on a straight run: quintic ramp, cruise, quintic ramp."""

    def __init__(self, length, v_in, v_peak, v_out, accel):
        self.length = length
        self.v_in, self.v_peak, self.v_out = v_in, v_peak, v_out
        self.t_up = RAMP_PEAK * abs(v_peak - v_in) / accel
        self.t_down = RAMP_PEAK * abs(v_peak - v_out) / accel
        d_up = 0.5 * (v_in + v_peak) * self.t_up
        d_down = 0.5 * (v_peak + v_out) * self.t_down
        cruise = length - d_up - d_down
        self.t_cruise = max(cruise, 0.0) / v_peak if v_peak > 0 else 0.0
        self.d_up = d_up
        self.duration = self.t_up + self.t_cruise + self.t_down

    @staticmethod
    def _ramp(tau, T, v0, v1):
        u = tau / T
        dv = v1 - v0
        s = v0 * tau + dv * T * u ** 4 * (2.5 - 3.0 * u + u * u)
        sd = v0 + dv * u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)
        sdd = dv * 30.0 * u * u * (1.0 - u) ** 2 / T
        return s, sd, sdd

    def evaluate(self, tau):
        s = np.empty_like(tau); sd = np.empty_like(tau); sdd = np.zeros_like(tau)
        t1 = self.t_up
        t2 = t1 + self.t_cruise
        up = tau < t1
        mid = (tau >= t1) & (tau < t2)
        down = tau >= t2
        if up.any():
            s[up], sd[up], sdd[up] = self._ramp(tau[up], self.t_up, self.v_in, self.v_peak)
        s[mid] = self.d_up + self.v_peak * (tau[mid] - t1)
        sd[mid] = self.v_peak
        if down.any():
            if self.t_down > 0:
                a, b, c = self._ramp(tau[down] - t2, self.t_down, self.v_peak, self.v_out)
            else:
                a = np.zeros(int(down.sum())); b = np.full_like(a, self.v_peak); c = np.zeros_like(a)
            s[down] = self.d_up + self.v_peak * self.t_cruise + a
            sd[down], sdd[down] = b, c
        np.clip(s, 0.0, self.length, out=s)
        return s, sd, sdd


@dataclass
class LinePrimitive:
    start: np.ndarray
    end: np.ndarray
    kind: str
    feed: float
    line: int | None = None
    v_in: float = 0.0
    v_out: float = 0.0
    v_peak: float = 0.0

    @property
    def length(self):
        return float(np.linalg.norm(self.end[2:] - self.start[2:]))

    @property
    def direction(self):
        return (self.end[2:] - self.start[2:]) / self.length

    def geometry(self, s):
        """Pose and its first and second arc-length derivatives."""
        L = self.length
        d1 = (self.end - self.start) / L
        P = self.start + np.outer(s / L, self.end - self.start)
        P[s >= L] = self.end
        return P, np.broadcast_to(d1, P.shape), np.zeros_like(P)


@dataclass
class ArcPrimitive:
    """Circular blend from ``start`` (tangent ``u_in``) to ``end`` (tangent ``u_out``)."""

    center: np.ndarray
    radius: float
    u_in: np.ndarray
    normal: np.ndarray
    sweep: float
    orient_start: np.ndarray
    orient_end: np.ndarray
    speed: float = 0.0
    corner: int = 0

    @property
    def length(self):
        return self.radius * self.sweep

    def point(self, s):
        g = np.asarray(s, dtype=float) / self.radius
        r = self.radius
        return self.center + r * (np.multiply.outer(np.sin(g), self.u_in)
                                  - np.multiply.outer(np.cos(g), self.normal))

    @property
    def start(self):
        return np.concatenate([self.orient_start, self.point(0.0)])

    @property
    def end(self):
        return np.concatenate([self.orient_end, self.point(self.length)])

    def geometry(self, s):
        g = s / self.radius
        sg, cg = np.sin(g), np.cos(g)
        n = len(s)
        P = np.empty((n, 5)); D1 = np.empty((n, 5)); D2 = np.zeros((n, 5))
        rate = (self.orient_end - self.orient_start) / self.length
        P[:, :2] = self.orient_start + np.outer(s, rate)
        P[:, 2:] = self.point(s)
        D1[:, :2] = rate
        D1[:, 2:] = np.outer(cg, self.u_in) + np.outer(sg, self.normal)
        D2[:, 2:] = (np.outer(-sg, self.u_in) + np.outer(cg, self.normal)) / self.radius
        return P, D1, D2


@dataclass
class RotatePrimitive:
    """Orientation change at a fixed tip position, from rest to rest."""

    start: np.ndarray
    end: np.ndarray
    kind: str
    line: int | None = None
    length: float = 0.0


@dataclass(frozen=True)
class CornerBlend:
    index: int
    point: tuple
    angle: float            # interior angle between the two moves, pi when straight
    radius: float
    tangent_distance: float
    speed: float
    line: int | None = None


@dataclass
class BlendedPath:
    primitives: list
    corners: list
    limits: object = None

    def __len__(self):
        return len(self.primitives)

    def junction_gaps(self):
        """Position jumps and tangent angle jumps between consecutive primitives."""
        gaps, turns = [], []
        for a, b in zip(self.primitives[:-1], self.primitives[1:]):
            gaps.append(float(np.max(np.abs(a.end - b.start))))
            ta, tb = _exit_tangent(a), _entry_tangent(b)
            if ta is None or tb is None:
                turns.append(None)
            else:
                turns.append(float(math.atan2(np.linalg.norm(np.cross(ta, tb)), np.dot(ta, tb))))
        return gaps, turns


def _entry_tangent(p):
    if isinstance(p, ArcPrimitive):
        return p.u_in
    if isinstance(p, LinePrimitive):
        return p.direction
    return None


def _exit_tangent(p):
    if isinstance(p, ArcPrimitive):
        return math.cos(p.sweep) * p.u_in + math.sin(p.sweep) * p.normal
    if isinstance(p, LinePrimitive):
        return p.direction
    return None


# --------------------------------------------------------------------------
# blending


def _moves(segments, start, limits):
    """Segments as (start, end, kind, feed, line) with zero moves dropped."""
    out = []
    here = np.asarray(start, dtype=float)
    for seg in segments:
        target = np.asarray(seg.target, dtype=float)
        if np.array_equal(target, here):
            continue
        feed = limits.linear_speed if seg.kind == RAPID else min(seg.feed, limits.linear_speed)
        out.append([here, target, seg.kind, feed, seg.line])
        here = target
    return out


def _translation(move):
    return move[1][2:] - move[0][2:]


def _merge_collinear(moves):
    """Fuse consecutive moves on one straight line with identical feed and orientation rate."""
    out = []
    for m in moves:
        if out:
            prev = out[-1]
            a, b = _translation(prev), _translation(m)
            la, lb = np.linalg.norm(a), np.linalg.norm(b)
            if (la > 0 and lb > 0 and prev[2] == m[2] and prev[3] == m[3]
                    and np.linalg.norm(np.cross(a / la, b / lb)) < COLLINEAR_TOL and np.dot(a, b) > 0):
                ra = (prev[1][:2] - prev[0][:2]) / la
                rb = (m[1][:2] - m[0][:2]) / lb
                if np.allclose(ra, rb, rtol=0.0, atol=1e-12):
                    out[-1] = [prev[0], m[1], m[2], m[3], prev[4]]
                    continue
        out.append(list(m))
    return out


def corner_blend(u_in, u_out, shorter, cap):
    """Interior angle, radius and tangent distance of one blend.

    Raises :class:`DegenerateCorner` for a straight continuation or a reversal.
    """
    cos_turn = float(np.clip(np.dot(u_in, u_out), -1.0, 1.0))
    sin_turn = float(np.linalg.norm(np.cross(u_in, u_out)))
    turn = math.atan2(sin_turn, cos_turn)
    angle = math.pi - turn
    if sin_turn < COLLINEAR_TOL:
        raise DegenerateCorner("straight continuation" if cos_turn > 0 else "reversal")
    half = math.tan(angle / 2.0)
    radius = min(cap, 0.25 * shorter * half)
    return angle, radius, radius / half


def blend_corners(segments, params: MachineParams, corner_radius_cap=DEFAULT_CORNER_CAP, *,
                  start=Pose(0.0, 0.0, 0.0, 0.0, 0.0), speed_ratio=1.0) -> BlendedPath:
    """Replace corners by tangent arcs and assign junction speeds.

    The arc radius is ``min(cap, 0.25 * shorter * tan(angle / 2))`` where
    ``angle`` is the interior angle at the corner and ``shorter`` the shorter
    adjacent move; the arc speed is ``min(feeds, sqrt(a_t_max * r))``.
    Rapid moves run at ``k_vt * speed_ratio``; feeds are capped at that speed.
    Junction speeds are then lowered where a line is too short to ramp
    between its neighbours.
    """
    if corner_radius_cap < 0:
        raise ValueError("corner_radius_cap must be non-negative")
    limits = limits_for(params, speed_ratio)
    accel = params.a_t_max
    moves = _merge_collinear(_moves(segments, start, limits))
    if not moves:
        return BlendedPath([], [], limits)

    n = len(moves)
    # trims[i] = (distance cut at start, distance cut at end)
    trims = [[0.0, 0.0] for _ in range(n)]
    blends = [None] * (n - 1)
    junction_speed = [0.0] * (n + 1)
    corners = []
    for i in range(n - 1):
        a, b = moves[i], moves[i + 1]
        ta, tb = _translation(a), _translation(b)
        la, lb = float(np.linalg.norm(ta)), float(np.linalg.norm(tb))
        if la == 0.0 or lb == 0.0:
            continue  # pure rotation on one side: stop there
        u_in, u_out = ta / la, tb / lb
        try:
            angle, radius, dist = corner_blend(u_in, u_out, min(la, lb), corner_radius_cap)
        except DegenerateCorner:
            if np.dot(u_in, u_out) > 0:
                junction_speed[i + 1] = min(a[3], b[3])
                corners.append(CornerBlend(i, tuple(a[1][2:]), math.pi, 0.0, 0.0,
                                           junction_speed[i + 1], b[4]))
            continue
        if radius <= 0.0:
            continue
        speed = min(a[3], b[3], math.sqrt(accel * radius))
        trims[i][1] = dist
        trims[i + 1][0] = dist
        blends[i] = (u_in, u_out, angle, radius, dist)
        junction_speed[i + 1] = speed

    # line primitives on the trimmed moves
    lines = []
    for i, m in enumerate(moves):
        s0, e0 = m[0], m[1]
        L = float(np.linalg.norm(_translation(m)))
        if L == 0.0:
            lines.append(RotatePrimitive(s0, e0, m[2], m[4]))
            continue
        f0, f1 = trims[i][0] / L, (L - trims[i][1]) / L
        start_pt = s0 + (e0 - s0) * f0 if f0 > 0 else s0.copy()
        end_pt = s0 + (e0 - s0) * f1 if trims[i][1] > 0 else e0.copy()
        lines.append(LinePrimitive(start_pt, end_pt, m[2], m[3], m[4]))

    arcs = [None] * (n - 1)
    for i, bl in enumerate(blends):
        if bl is None:
            continue
        u_in, u_out, angle, radius, dist = bl
        corner = moves[i][1][2:]
        normal = u_out - np.dot(u_out, u_in) * u_in
        normal /= np.linalg.norm(normal)
        a_start = corner - dist * u_in
        arc = ArcPrimitive(a_start + radius * normal, radius, u_in, normal, math.pi - angle,
                           lines[i].end[:2].copy(), lines[i + 1].start[:2].copy(),
                           junction_speed[i + 1], i)
        # junction points are taken from the arc so both sides agree exactly
        lines[i].end[2:] = arc.point(0.0)
        lines[i + 1].start[2:] = arc.point(arc.length)
        arcs[i] = arc
        corners.append(CornerBlend(i, tuple(corner), angle, radius, dist, junction_speed[i + 1],
                                   moves[i + 1][4]))

    _limit_junction_speeds(lines, junction_speed, accel)
    primitives = []
    for i, line in enumerate(lines):
        if isinstance(line, LinePrimitive):
            line.v_in, line.v_out = junction_speed[i], junction_speed[i + 1]
            L = line.length
            reach = math.sqrt((2.0 * accel * L / RAMP_PEAK + line.v_in ** 2 + line.v_out ** 2) / 2.0)
            line.v_peak = max(min(line.feed, reach), line.v_in, line.v_out)
        primitives.append(line)
        if i < n - 1 and arcs[i] is not None:
            arcs[i].speed = junction_speed[i + 1]
            primitives.append(arcs[i])
    corners.sort(key=lambda c: c.index)
    corners = [CornerBlend(c.index, c.point, c.angle, c.radius, c.tangent_distance,
                           junction_speed[c.index + 1], c.line) for c in corners]
    return BlendedPath(primitives, corners, limits)


def _limit_junction_speeds(lines, v, accel):
    """Forward/backward pass so every line can ramp between its end speeds."""
    k = 2.0 * accel / RAMP_PEAK
    n = len(lines)
    v[0] = 0.0
    v[n] = 0.0
    for i, line in enumerate(lines):
        if isinstance(line, RotatePrimitive):
            v[i] = v[i + 1] = 0.0
    for i in range(n):
        v[i + 1] = min(v[i + 1], math.sqrt(v[i] ** 2 + k * lines[i].length))
    for i in range(n - 1, -1, -1):
        v[i] = min(v[i], math.sqrt(v[i + 1] ** 2 + k * lines[i].length))


# --------------------------------------------------------------------------
# timing


class BlendedMotion(Motion):
    """Time law over a :class:`BlendedPath`, one piece per primitive."""

    def __init__(self, path: BlendedPath, params: MachineParams):
        self.path = path
        self.pieces = []
        t = 0.0
        self.starts = []
        accel = params.a_t_max
        for prim in path.primitives:
            if isinstance(prim, LinePrimitive):
                law = _SpeedProfile(prim.length, prim.v_in, prim.v_peak, prim.v_out, accel)
                dur = law.duration
            elif isinstance(prim, ArcPrimitive):
                law = None
                dur = prim.length / prim.speed
            else:
                law = QuinticMotion(LinePath(prim.start, prim.end),
                                    travel_time(prim.start, prim.end, params))
                dur = law.duration
            self.pieces.append((prim, law, dur))
            self.starts.append(t)
            t += dur
        self.duration = t

    def evaluate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        P = np.empty((len(t), 5)); V = np.zeros_like(P); A = np.zeros_like(P)
        if not self.pieces:
            raise ValueError("empty path")
        idx = np.array([max(bisect.bisect_right(self.starts, x) - 1, 0) for x in t])
        for j, (prim, law, dur) in enumerate(self.pieces):
            sel = idx == j
            if not sel.any():
                continue
            tau = np.clip(t[sel] - self.starts[j], 0.0, dur)
            if isinstance(prim, RotatePrimitive):
                P[sel], V[sel], A[sel] = law.evaluate(tau)
                continue
            if isinstance(prim, ArcPrimitive):
                s = prim.speed * tau
                sd = np.full_like(s, prim.speed)
                sdd = np.zeros_like(s)
            else:
                s, sd, sdd = law.evaluate(tau)
            p, d1, d2 = prim.geometry(s)
            P[sel] = p
            V[sel] = d1 * sd[:, None]
            A[sel] = d2 * (sd * sd)[:, None] + d1 * sdd[:, None]
        return P, V, A


def plan_gcode(path: BlendedPath, params: MachineParams, sample_rate=DEFAULT_RATE, *,
               mode=DEFAULT_WORKING_MODE, rescale=True) -> Trajectory:
    """Sample a blended path on the control grid and project it to joint space.

    The whole program is slowed down uniformly if any joint or Cartesian
    limit would be exceeded.
    """
    if not path.primitives:
        return Trajectory.empty()
    limits = path.limits if path.limits is not None else limits_for(params)
    motion = BlendedMotion(path, params)
    return sample_motion(motion, params, limits, sample_rate, mode, rescale, name="gcode")


def plan_program(text: str, params: MachineParams, corner_radius_cap=DEFAULT_CORNER_CAP,
                 sample_rate=DEFAULT_RATE, *, start=Pose(0.0, 0.0, 0.0, 0.0, 0.0), speed_ratio=1.0,
                 mode=DEFAULT_WORKING_MODE):
    """Parse, blend and plan in one call; returns ``(trajectory, blended_path)``."""
    segments = parse_gcode(text, start)
    path = blend_corners(segments, params, corner_radius_cap, start=start, speed_ratio=speed_ratio)
    return plan_gcode(path, params, sample_rate, mode=mode), path


def primitive_index(traj: Trajectory, path: BlendedPath, params: MachineParams):
    """Index into ``path.primitives`` for every sample of a planned program."""
    if not len(traj):
        return np.zeros(0, dtype=int)
    factor = traj.segments[0].multiplier if traj.segments else 1.0
    starts = np.asarray(BlendedMotion(path, params).starts) * factor
    return np.clip(np.searchsorted(starts, traj.t - traj.t[0], side="right") - 1, 0, len(starts) - 1)


def centripetal_ratios(traj: Trajectory, path: BlendedPath, params: MachineParams):
    """``|V|**2 / (r * a_t_max)`` for every sample lying on a blend arc."""
    idx = primitive_index(traj, path, params)
    out = []
    for k, j in enumerate(idx):
        prim = path.primitives[j]
        if isinstance(prim, ArcPrimitive):
            v2 = float(np.dot(traj.V[k, 2:], traj.V[k, 2:]))
            out.append(v2 / (prim.radius * params.a_t_max))
    return np.asarray(out)
