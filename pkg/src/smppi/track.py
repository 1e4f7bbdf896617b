"""Closed race-track centerlines with per-segment width and friction.

A track is a closed piecewise-linear centerline.  Waypoints carry arc
length, half-width, surface friction, and the index of the corner they
belong to (-1 on straights).  The built-in layout is a rounded irregular
hexagon: six straights joined by six circular-arc corners, so a
six-value corner friction schedule maps one-to-one onto the corners.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from smppi.config import TrackConfig

# Rounded-hexagon layout: vertices (m) and fillet radii (m), counterclockwise.
_HEX_VERTICES = np.array(
    [[0.0, 0.0], [56.0, 0.0], [76.0, 28.0], [64.0, 60.0], [24.0, 68.0], [-12.0, 32.0]]
)
_HEX_RADII = np.array([10.0, 11.0, 9.0, 10.0, 11.0, 12.0])


@dataclass
class Track:
    """Closed centerline; arrays are per waypoint, segments join i -> i+1 (mod P)."""

    xy: np.ndarray          # (P, 2)
    half_width: np.ndarray  # (P,)
    mu: np.ndarray          # (P,)
    corner: np.ndarray      # (P,) int, -1 on straights
    s: np.ndarray = field(init=False)        # (P,) arc length at waypoint
    length: float = field(init=False)
    _seg_a: np.ndarray = field(init=False, repr=False)
    _seg_d: np.ndarray = field(init=False, repr=False)
    _seg_len: np.ndarray = field(init=False, repr=False)
    _seg_mid: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = len(self.xy)
        if p < 3:
            raise ValueError("track needs at least 3 waypoints")
        nxt = np.roll(self.xy, -1, axis=0)
        d = nxt - self.xy
        seg_len = np.hypot(d[:, 0], d[:, 1])
        if np.any(seg_len <= 1e-9):
            raise ValueError("track has zero-length segments")
        self._seg_a = self.xy
        self._seg_d = d
        self._seg_len = seg_len
        self._seg_mid = self.xy + 0.5 * d
        self.s = np.concatenate([[0.0], np.cumsum(seg_len)[:-1]])
        self.length = float(seg_len.sum())

    @property
    def n_segments(self) -> int:
        return len(self.xy)

    def segments_near(self, center: np.ndarray, radius: float) -> np.ndarray:
        """Indices of segments possibly within ``radius`` of ``center``."""
        reach = radius + 0.5 * self._seg_len + float(self.half_width.max()) + 1.0
        dist = np.hypot(self._seg_mid[:, 0] - center[0], self._seg_mid[:, 1] - center[1])
        idx = np.flatnonzero(dist <= reach)
        return idx if len(idx) else np.arange(self.n_segments)

    def query(self, points: np.ndarray, candidates: np.ndarray | None = None) -> dict[str, np.ndarray]:
        """Project points onto the centerline.

        Returns arrays keyed ``s`` (arc position), ``lateral`` (signed,
        left of travel positive), ``half_width``, ``mu``, ``segment``.
        ``candidates`` restricts the search to a segment subset (the
        caller guarantees the true nearest segment is included, or
        accepts a conservative answer for far-off points).
        """
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        idx = np.arange(self.n_segments) if candidates is None else candidates
        a = self._seg_a[idx]          # (S, 2)
        d = self._seg_d[idx]          # (S, 2)
        seg_len = self._seg_len[idx]  # (S,)

        rel_x = points[:, None, 0] - a[None, :, 0]
        rel_y = points[:, None, 1] - a[None, :, 1]
        tpar = (rel_x * d[None, :, 0] + rel_y * d[None, :, 1]) / (seg_len**2)[None, :]
        tpar = np.clip(tpar, 0.0, 1.0)
        off_x = rel_x - tpar * d[None, :, 0]
        off_y = rel_y - tpar * d[None, :, 1]
        dist2 = off_x**2 + off_y**2

        best = np.argmin(dist2, axis=1)
        rows = np.arange(len(points))
        seg = idx[best]
        t_best = tpar[rows, best]
        # Signed lateral offset: positive to the left of the direction of travel.
        cross = d[best, 0] * off_y[rows, best] - d[best, 1] * off_x[rows, best]
        lateral = np.sign(cross) * np.sqrt(dist2[rows, best])
        return {
            "s": self.s[seg] + t_best * self._seg_len[seg],
            "lateral": lateral,
            "half_width": self.half_width[seg],
            "mu": self.mu[seg],
            "segment": seg,
        }

    def friction_at(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        pts = np.stack([np.atleast_1d(x), np.atleast_1d(y)], axis=1)
        return self.query(pts)["mu"]

    def start_pose(self) -> tuple[np.ndarray, float]:
        """Centerline start point and its heading."""
        d = self._seg_d[0]
        return self.xy[0].copy(), float(np.arctan2(d[1], d[0]))

    def to_csv(self, path: str) -> None:
        """Waypoint rows (s, x, y, half_width, mu); closing row repeats the start."""
        os.makedirs(os.path.dirname(os.path.abspath(path)) or ".", exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "x", "y", "half_width", "mu"])
            for i in range(len(self.xy)):
                writer.writerow(
                    [repr(self.s[i]), repr(self.xy[i, 0]), repr(self.xy[i, 1]),
                     repr(self.half_width[i]), repr(self.mu[i])]
                )
            writer.writerow(
                [repr(self.length), repr(self.xy[0, 0]), repr(self.xy[0, 1]),
                 repr(self.half_width[0]), repr(self.mu[0])]
            )

    @classmethod
    def from_csv(cls, path: str) -> "Track":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["s", "x", "y", "half_width", "mu"]:
                raise ValueError(f"unrecognized track header in {path}")
            rows = [[float(v) for v in row] for row in reader]
        arr = np.asarray(rows, dtype=np.float64)
        if len(arr) < 4:
            raise ValueError("track file has too few waypoints")
        s = arr[:, 0]
        if np.any(np.diff(s) <= 0):
            raise ValueError("track arc length must be strictly increasing")
        # Closing row must land back on the start.
        if np.hypot(arr[-1, 1] - arr[0, 1], arr[-1, 2] - arr[0, 2]) > 1e-6:
            raise ValueError("track is not closed (last waypoint != first)")
        body = arr[:-1]
        return cls(
            xy=body[:, 1:3].copy(),
            half_width=body[:, 3].copy(),
            mu=body[:, 4].copy(),
            corner=np.full(len(body), -1, dtype=int),
        )


def _fillet_corner(v_prev: np.ndarray, v: np.ndarray, v_next: np.ndarray, radius: float):
    """Tangent points and arc parameters for rounding the corner at ``v``."""
    e_in = v - v_prev
    e_out = v_next - v
    u_in = e_in / np.hypot(*e_in)
    u_out = e_out / np.hypot(*e_out)
    turn = np.arctan2(u_in[0] * u_out[1] - u_in[1] * u_out[0], u_in @ u_out)
    t = radius * np.tan(abs(turn) / 2.0)
    p_in = v - t * u_in
    p_out = v + t * u_out
    # Arc center sits perpendicular to the incoming edge at the tangent point.
    normal = np.array([-u_in[1], u_in[0]]) * np.sign(turn)
    center = p_in + radius * normal
    ang_start = np.arctan2(p_in[1] - center[1], p_in[0] - center[0])
    return p_in, p_out, center, ang_start, turn, t


def build_track(cfg: TrackConfig) -> Track:
    """Construct the configured track.

    For the built-in layout the corner friction list must have exactly
    one value per corner; straights get ``default_friction``.
    """
    if cfg.kind == "csv":
        track = Track.from_csv(cfg.path)
        return track

    verts = _HEX_VERTICES
    radii = _HEX_RADII
    n_corners = len(verts)
    if len(cfg.corner_friction) != n_corners:
        raise ValueError(
            f"corner_friction has {len(cfg.corner_friction)} values, track has {n_corners} corners"
        )

    fillets = []
    for i in range(n_corners):
        f = _fillet_corner(verts[i - 1], verts[i], verts[(i + 1) % n_corners], radii[i])
        fillets.append(f)
    # Adjacent fillets must leave room on the shared edge.
    for i in range(n_corners):
        j = (i + 1) % n_corners
        edge = np.hypot(*(verts[j] - verts[i]))
        if fillets[i][5] + fillets[j][5] >= edge:
            raise ValueError(f"fillet radii too large for edge {i}->{j}")

    pts: list[np.ndarray] = []
    mu: list[float] = []
    corner: list[int] = []
    for i in range(n_corners):
        p_out_prev = fillets[i - 1][1]
        p_in = fillets[i][0]
        # Straight from the previous corner's exit to this corner's entry.
        straight = p_in - p_out_prev
        length = float(np.hypot(*straight))
        n_pts = max(int(np.ceil(length / cfg.waypoint_spacing)), 1)
        for k in range(n_pts):
            pts.append(p_out_prev + (k / n_pts) * straight)
            mu.append(cfg.default_friction)
            corner.append(-1)
        # The corner arc itself.
        _, _, center, ang_start, turn, _ = fillets[i]
        radius = radii[i]
        arc_len = abs(turn) * radius
        n_arc = max(int(np.ceil(arc_len / cfg.waypoint_spacing)), 2)
        for k in range(n_arc):
            ang = ang_start + turn * (k / n_arc)
            pts.append(center + radius * np.array([np.cos(ang), np.sin(ang)]))
            mu.append(cfg.corner_friction[i])
            corner.append(i)

    xy = np.asarray(pts)
    return Track(
        xy=xy,
        half_width=np.full(len(xy), cfg.half_width),
        mu=np.asarray(mu),
        corner=np.asarray(corner, dtype=int),
    )
