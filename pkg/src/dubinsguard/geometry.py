"""Evasion-region geometry: potential function, interception point and the
separation / orientation predicates.

For a pursuer-evader pair with speed ratio alpha > 1 the set of points the
evader reaches strictly first (under simple motion on both sides) is an open
disk.  Its lowest point is where the evader can force the deepest approach to
the guarded half-plane, so the pursuer aims there; the bearing toward that
point is the interception angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GameParams, JointState, wrap_angle, wrap_to_pi

#: Default tolerance on the heading-alignment predicate.  Exact equality is
#: unreachable in floating point; the simulator snaps the heading once the
#: wrapped difference is inside this band.
IO_TOL = 1e-6


@dataclass(frozen=True)
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius < 0.0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class InterceptionData:
    """Lowest point of the closed evasion disk and derived quantities.

    ``point`` is the aim point, ``angle`` the bearing from the pursuer toward
    it (in [0, 2*pi)), ``clearance`` its signed distance to the goal line
    y = 0, and ``offset`` the vertical vector from the disk center down to the
    point (zero x-component, minus the radius in y).
    """

    point: np.ndarray
    angle: float
    clearance: float
    offset: np.ndarray


def potential(x, x_p, x_e, alpha: float) -> float:
    """Evaluate ||x - x_p|| - alpha * ||x - x_e||.

    Positive inside the evasion region, zero on its boundary circle.
    """
    x = np.asarray(x, dtype=float)
    x_p = np.asarray(x_p, dtype=float)
    x_e = np.asarray(x_e, dtype=float)
    return float(
        math.hypot(x[0] - x_p[0], x[1] - x_p[1])
        - alpha * math.hypot(x[0] - x_e[0], x[1] - x_e[1])
    )


def _check_pair(x_p: np.ndarray, x_e: np.ndarray, alpha: float) -> float:
    if alpha <= 1.0:
        raise ValueError(f"speed ratio must exceed 1, got {alpha}")
    dist = math.hypot(x_p[0] - x_e[0], x_p[1] - x_e[1])
    if dist == 0.0:
        raise ValueError("pursuer and evader positions coincide")
    return dist


def evasion_region(x_p, x_e, alpha: float) -> Circle:
    """Open disk of points the evader reaches strictly before the pursuer."""
    x_p = np.asarray(x_p, dtype=float)
    x_e = np.asarray(x_e, dtype=float)
    dist = _check_pair(x_p, x_e, alpha)
    a2 = alpha * alpha
    return Circle(
        center=(a2 * x_e - x_p) / (a2 - 1.0),
        radius=alpha * dist / (a2 - 1.0),
    )


def interception(x_p, x_e, alpha: float) -> InterceptionData:
    """Aim point: the lowest point of the closed evasion disk."""
    x_p = np.asarray(x_p, dtype=float)
    x_e = np.asarray(x_e, dtype=float)
    dist = _check_pair(x_p, x_e, alpha)
    a2 = alpha * alpha
    cx = (a2 * x_e[0] - x_p[0]) / (a2 - 1.0)
    cy = (a2 * x_e[1] - x_p[1]) / (a2 - 1.0)
    radius = alpha * dist / (a2 - 1.0)
    point = np.array([cx, cy - radius])
    angle = wrap_angle(math.atan2(point[1] - x_p[1], point[0] - x_p[0]))
    return InterceptionData(
        point=point,
        angle=angle,
        clearance=float(point[1]),
        offset=np.array([0.0, -radius]),
    )


def er_goal_distance(x_p, x_e, alpha: float) -> float:
    """Distance between the closed evasion disk and the goal half-plane.

    Returns the (non-negative) gap when the interiors are disjoint and -inf
    when the open disk dips into the open half-plane, i.e. the two interiors
    intersect.  The value is -inf rather than the geometric overlap depth:
    it marks "separation lost", not a length.
    """
    data = interception(x_p, x_e, alpha)
    return data.clearance if data.clearance >= 0.0 else -math.inf


def separation_holds(state: JointState, p: GameParams) -> bool:
    """True iff the closed evasion disk keeps a non-negative distance to the
    goal half-plane."""
    return er_goal_distance(state.pursuer.pos, state.evader.pos, p.alpha) >= 0.0


def heading_error(state: JointState, p: GameParams) -> float:
    """Wrapped difference interception-angle minus pursuer-heading, in
    (-pi, pi]."""
    data = interception(state.pursuer.pos, state.evader.pos, p.alpha)
    return wrap_to_pi(data.angle - state.pursuer.theta)


def orientation_holds(state: JointState, p: GameParams, tol: float = IO_TOL) -> bool:
    """True iff the pursuer heading matches the interception angle within
    ``tol`` (wrapped)."""
    return abs(heading_error(state, p)) <= tol
