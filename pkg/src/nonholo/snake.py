"""Inextensible string kinematics: a curve dragged along its own track.

A string of length L whose head traces an immersed planar curve occupies,
at each instant, an arclength window of that curve: z(s, t) = u(f(t) - s)
with s measured back from the head.  The balanced sleigh pulling such a
string follows the free sleigh's trajectory (a circle or a line), and
every string point replays the contact point's path with a constant time
delay.
"""

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from nonholo.errors import DomainExceeded
from nonholo.skate import LDA_COLUMNS, integrate_skate, initial_reduced
from nonholo.trajectory import Trajectory, _fmt

_ARCLENGTH_TOL = 1e-8


class HeadPath:
    """Arclength-parametrized planar curve built from sample points.

    The samples are interpolated by a cubic spline and reparametrized by
    arclength with adaptive quadrature, so ``point(s)`` moves at unit speed
    to within the quadrature tolerance.
    """

    def __init__(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 4:
            raise ValueError("head path needs at least 4 planar sample points")
        tau = np.linspace(0.0, 1.0, len(points))
        self._spline = CubicSpline(tau, points, axis=0)
        self._dspline = self._spline.derivative()

        speed = lambda t: float(np.linalg.norm(self._dspline(t)))
        cum = [0.0]
        for a, b in zip(tau[:-1], tau[1:]):
            seg, _ = quad(speed, a, b, epsabs=_ARCLENGTH_TOL / len(points), limit=200)
            cum.append(cum[-1] + seg)
        self._arclength_at_tau = np.array(cum)
        self.length = float(cum[-1])
        # dense inverse map s -> tau, refined by Newton on demand
        dense_tau = np.linspace(0.0, 1.0, 16 * len(points))
        dense_s = np.concatenate(
            [
                [0.0],
                np.cumsum(
                    [
                        quad(speed, a, b, epsabs=_ARCLENGTH_TOL / len(dense_tau), limit=200)[0]
                        for a, b in zip(dense_tau[:-1], dense_tau[1:])
                    ]
                ),
            ]
        )
        self._inv = CubicSpline(dense_s, dense_tau)
        self._dense_s_max = float(dense_s[-1])

    @classmethod
    def from_function(cls, func, t_span, n=200):
        ts = np.linspace(t_span[0], t_span[1], n)
        return cls(np.array([func(t) for t in ts]))

    def _tau(self, s):
        s = np.clip(s, 0.0, self._dense_s_max)
        return np.clip(self._inv(s), 0.0, 1.0)

    def point(self, s):
        """Position at arclength s (scalar or array)."""
        return self._spline(self._tau(s))

    def tangent(self, s):
        d = self._dspline(self._tau(s))
        d = np.atleast_2d(d)
        out = d / np.linalg.norm(d, axis=-1, keepdims=True)
        return out[0] if np.ndim(s) == 0 else out

    def unit_speed_deviation(self, n=200):
        """Worst deviation of |d point / ds| from 1 over n probe points."""
        s = np.linspace(0.0, self.length, n)
        h = max(self.length * 1e-6, 1e-9)
        sm = np.clip(s - h, 0.0, self.length)
        sp = np.clip(s + h, 0.0, self.length)
        d = (self.point(sp) - self.point(sm)) / (sp - sm)[:, None]
        return float(np.max(np.abs(np.linalg.norm(d, axis=1) - 1.0)))


def snake_evolve(head, f, t_grid, s_grid):
    """Frames z(s, t) = u(f(t) - s), s measured back from the head.

    ``f`` maps time to the head's arclength station; it must keep the whole
    string on the path: f(t) in [max(s_grid), head.length].
    """
    t_grid = np.asarray(t_grid, dtype=float)
    s_grid = np.asarray(s_grid, dtype=float)
    L = float(s_grid.max())
    frames = []
    for t in t_grid:
        ft = float(f(t))
        if ft < L - 1e-12 or ft > head.length + 1e-12:
            raise DomainExceeded(
                f"head station f({t}) = {ft} outside [{L}, {head.length}]"
            )
        frames.append(head.point(ft - s_grid))
    return np.array(frames)


def frame_arclength(frame, s_grid=None):
    """Arclength of one string frame via spline quadrature.

    A cubic spline through the sampled points (parametrized by ``s_grid``
    when given, by chord length otherwise) recovers the smooth curve's
    length far more accurately than the raw polyline sum.
    """
    frame = np.asarray(frame, dtype=float)
    if s_grid is None:
        chord = np.linalg.norm(np.diff(frame, axis=0), axis=1)
        s_grid = np.concatenate([[0.0], np.cumsum(chord)])
    s_grid = np.asarray(s_grid, dtype=float)
    dspline = CubicSpline(s_grid, frame, axis=0).derivative()
    speed = lambda s: float(np.linalg.norm(dspline(s)))
    total = 0.0
    for a, b in zip(s_grid[:-1], s_grid[1:]):
        total += quad(speed, a, b, epsabs=_ARCLENGTH_TOL / len(s_grid), limit=200)[0]
    return total


def collinearity_residual(frames, t_grid, s_grid):
    """max |z_t x z_s| over the interior grid (centered time differences).

    The string's constraint is that material velocity is tangent to the
    curve; the planar cross product of the two finite-difference vectors
    measures its violation, which vanishes at second order in the time step.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    s_grid = np.asarray(s_grid, dtype=float)
    dt = t_grid[2:] - t_grid[:-2]
    z_t = (frames[2:] - frames[:-2]) / dt[:, None, None]
    ds = s_grid[2:] - s_grid[:-2]
    z_s = (frames[:, 2:, :] - frames[:, :-2, :]) / ds[None, :, None]
    z_s = z_s[1:-1]
    cross = z_t[:, 1:-1, 0] * z_s[:, :, 1] - z_t[:, 1:-1, 1] * z_s[:, :, 0]
    return float(np.max(np.abs(cross)))


# ---------------------------------------------------------------------------
# the sleigh with a string


def sleigh_with_string(v0, omega0, L, t_span, stepper=None, n_string=50, record_every=1):
    """Balanced sleigh dragging an inextensible string of length L.

    The contact point follows the free constrained sleigh (circle of radius
    |v0/omega0|, or a line when omega0 = 0); the string is laid along the
    already-traversed track, each material point replaying the contact
    point's path with delay s/|v0|, and the not-yet-consumed part of the
    initially straight string translating along the initial tangent.
    Returns (contact-point Trajectory, frames of string positions).
    """
    if L <= 0:
        raise ValueError("string length must be positive")
    if v0 == 0:
        raise ValueError("the head must move to drag the string")
    y0 = initial_reduced(theta=0.0, v=v0, omega=omega0)[:5]
    # keep every step internally: the delay replay interpolates the track
    full = integrate_skate("lda", y0, 0.0, t_span, stepper, record_every=1)
    speed = abs(v0)
    x = full.column("x")
    y = full.column("y")
    p0 = np.array([x[0], y[0]])
    tangent0 = np.array([np.cos(full.column("theta")[0]), np.sin(full.column("theta")[0])])
    if v0 < 0:
        tangent0 = -tangent0
    # smooth interpolants of the traversed track for the delayed replay
    track_x = CubicSpline(full.times, x)
    track_y = CubicSpline(full.times, y)
    keep = slice(None, None, record_every)
    out_times = full.times[keep]
    s_grid = np.linspace(0.0, L, n_string)
    frames = []
    for t in out_times:
        delayed = t - s_grid / speed
        on_track = delayed >= 0.0
        zx = np.where(on_track, track_x(np.maximum(delayed, 0.0)), 0.0)
        zy = np.where(on_track, track_y(np.maximum(delayed, 0.0)), 0.0)
        behind = speed * t - s_grid  # negative track coordinate on the straight part
        zx = np.where(on_track, zx, p0[0] + behind * tangent0[0])
        zy = np.where(on_track, zy, p0[1] + behind * tangent0[1])
        frames.append(np.column_stack([zx, zy]))
    traj = Trajectory(
        out_times,
        full.columns,
        full.states[keep],
        {k: v[keep] for k, v in full.ledger.items()},
        full.meta,
    )
    return traj, np.array(frames)


# ---------------------------------------------------------------------------
# export helpers


def frame_to_csv(frame, s_grid=None):
    """One string frame as CSV bytes with columns s,x,y."""
    frame = np.asarray(frame, dtype=float)
    if s_grid is None:
        s_grid = np.arange(len(frame), dtype=float)
    lines = ["s,x,y"]
    for s, (px, py) in zip(s_grid, frame):
        lines.append(f"{_fmt(s)},{_fmt(px)},{_fmt(py)}")
    return ("\n".join(lines) + "\n").encode("ascii")


def timelapse_svg(frames, title=None):
    """All frames overlaid on one 800x600 equal-aspect canvas, fading with age."""
    frames = np.asarray(frames, dtype=float)
    W, H, margin = 800, 600, 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{W // 2}" y="24" text-anchor="middle">{title}</text>')
    if frames.size:
        allx = frames[:, :, 0]
        ally = frames[:, :, 1]
        cx = 0.5 * (allx.min() + allx.max())
        cy = 0.5 * (ally.min() + ally.max())
        half = 0.5 * max(allx.max() - allx.min(), ally.max() - ally.min(), 1e-30)
        scale = min(W, H) / 2.0 - margin
        nf = len(frames)
        for i, fr in enumerate(frames):
            px = (fr[:, 0] - cx) / half * scale + W / 2.0
            py = -(fr[:, 1] - cy) / half * scale + H / 2.0
            opacity = 0.15 + 0.85 * (i + 1) / nf
            pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="steelblue" '
                f'stroke-opacity="{opacity:.3f}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts).encode("ascii")
