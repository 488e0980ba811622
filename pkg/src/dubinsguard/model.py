"""Player dynamics, goal-region geometry and scenario validation.

The playing field is the upper half-plane y > 0; the guarded goal region is
the lower half-plane y <= 0 with boundary line y = 0.  Pursuers are constant
speed cars with a minimum turning radius (or, optionally, simple-motion
points), evaders are simple-motion points that are strictly slower than every
pursuer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Turn-rate magnitudes below this are integrated as straight lines to avoid
# the 0/0 in the circular arc formula.
STRAIGHT_EPS = 1e-12

DUBINS = "dubins"
SIMPLE = "simple"


def wrap_angle(theta: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= TWO_PI:  # fmod may round up to 2*pi for tiny negatives
        theta -= TWO_PI
    return theta


def wrap_to_pi(theta: float) -> float:
    """Wrap an angle difference into (-pi, pi]."""
    theta = math.fmod(theta, TWO_PI)
    if theta > math.pi:
        theta -= TWO_PI
    elif theta <= -math.pi:
        theta += TWO_PI
    return theta


def _as_point(x) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.shape != (2,):
        raise ValueError(f"expected a 2-D point, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("point has non-finite coordinates")
    return p


@dataclass(frozen=True)
class GameParams:
    """Per pursuer-evader pair constants.

    ``v_p``/``v_e`` are the constant speeds, ``kappa`` the pursuer's minimum
    turning radius and ``r`` its capture radius.  The speed ratio ``alpha``
    is derived, never stored, so it always equals ``v_p / v_e`` exactly.
    """

    v_p: float
    v_e: float
    kappa: float
    r: float

    def __post_init__(self):
        for name in ("v_p", "v_e", "kappa", "r"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value}")
        if self.v_p <= self.v_e:
            raise ValueError(
                f"pursuer must be strictly faster (v_p={self.v_p}, v_e={self.v_e})"
            )

    @property
    def alpha(self) -> float:
        return self.v_p / self.v_e

    @classmethod
    def from_alpha(cls, v_p: float, alpha: float, kappa: float, r: float) -> "GameParams":
        if alpha <= 1.0:
            raise ValueError(f"speed ratio must exceed 1, got {alpha}")
        return cls(v_p=v_p, v_e=v_p / alpha, kappa=kappa, r=r)


@dataclass(frozen=True)
class PursuerState:
    """Car position and heading; heading is kept in [0, 2*pi)."""

    pos: np.ndarray
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "pos", _as_point(self.pos))
        if not math.isfinite(self.theta):
            raise ValueError("heading must be finite")
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))


@dataclass(frozen=True)
class EvaderState:
    pos: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pos", _as_point(self.pos))


@dataclass(frozen=True)
class JointState:
    """Snapshot of one pursuer-evader pair."""

    pursuer: PursuerState
    evader: EvaderState


@dataclass(frozen=True)
class PursuerSpec:
    """A pursuer's initial state, motion model and its share of the pair
    parameters."""

    state: PursuerState
    motion: str = DUBINS
    v: float = 1.0
    kappa: float = 1.0
    r: float = 0.1

    def __post_init__(self):
        if self.motion not in (DUBINS, SIMPLE):
            raise ValueError(f"unknown motion kind {self.motion!r}")


@dataclass(frozen=True)
class EvaderSpec:
    """An evader's initial state, speed and strategy."""

    state: EvaderState
    v: float = 1.0
    strategy: str = "random_goal"
    heading: float | None = None

    def __post_init__(self):
        if self.strategy not in ("optimal", "constant", "random_goal"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "constant" and self.heading is None:
            raise ValueError("constant strategy requires a heading")


@dataclass(frozen=True)
class Scenario:
    pursuers: tuple[PursuerSpec, ...]
    evaders: tuple[EvaderSpec, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(self.pursuers))
        object.__setattr__(self, "evaders", tuple(self.evaders))

    def pair_params(self, i: int, j: int) -> GameParams:
        p = self.pursuers[i]
        return GameParams(v_p=p.v, v_e=self.evaders[j].v, kappa=p.kappa, r=p.r)


def goal_value(x) -> float:
    """Signed goal coordinate: the point is in the goal region iff the value
    is <= 0, on its boundary iff it is 0."""
    return float(_as_point(x)[1])


def step_pursuer(s: PursuerState, u_p: float, dt: float, p: GameParams) -> PursuerState:
    """Advance a car holding the turn command ``u_p`` in [-1, 1] constant.

    The integration is exact: a straight segment for (numerically) zero
    command, otherwise a circular arc of signed curvature ``u_p / kappa``.
    """
    if not (math.isfinite(u_p) and math.isfinite(dt)):
        raise ValueError("non-finite control or time step")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    x, y = float(s.pos[0]), float(s.pos[1])
    theta = s.theta
    if abs(u_p) < STRAIGHT_EPS:
        step = p.v_p * dt
        return PursuerState(
            pos=np.array([x + step * math.cos(theta), y + step * math.sin(theta)]),
            theta=theta,
        )
    rad = p.kappa / u_p  # signed turn radius
    theta_new = theta + p.v_p * u_p * dt / p.kappa
    return PursuerState(
        pos=np.array(
            [
                x + rad * (math.sin(theta_new) - math.sin(theta)),
                y - rad * (math.cos(theta_new) - math.cos(theta)),
            ]
        ),
        theta=wrap_angle(theta_new),
    )


def step_evader(s: EvaderState, u_e, dt: float, p: GameParams) -> EvaderState:
    """Advance a simple-motion evader; its control must lie in the closed
    unit disk."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = _as_point(u_e)
    norm = math.hypot(u[0], u[1])
    if norm > 1.0 + 1e-12:
        raise ValueError(f"evader control must lie in the unit disk, |u| = {norm}")
    return EvaderState(pos=s.pos + p.v_e * dt * u)


def validate_scenario(sc: Scenario) -> list[str]:
    """Check the initial-deployment rules; returns a list of violation
    messages (empty when the scenario is admissible).

    The rules: pursuers pairwise distinct, evaders pairwise distinct, every
    evader strictly outside every capture disk, every evader strictly inside
    the play region, and every pursuer strictly faster than every evader.
    """
    violations = []
    for i, a in enumerate(sc.pursuers):
        for k in range(i + 1, len(sc.pursuers)):
            if np.array_equal(a.state.pos, sc.pursuers[k].state.pos):
                violations.append(f"pursuers {i} and {k} coincide")
    for j, a in enumerate(sc.evaders):
        for k in range(j + 1, len(sc.evaders)):
            if np.array_equal(a.state.pos, sc.evaders[k].state.pos):
                violations.append(f"evaders {j} and {k} coincide")
    for i, pu in enumerate(sc.pursuers):
        for j, ev in enumerate(sc.evaders):
            dist = float(np.linalg.norm(ev.state.pos - pu.state.pos))
            if dist <= pu.r:
                violations.append(
                    f"evader {j} inside capture disk of pursuer {i} "
                    f"(distance {dist:.6g} <= r = {pu.r:.6g})"
                )
            if pu.v <= ev.v:
                violations.append(
                    f"pursuer {i} not faster than evader {j} "
                    f"(v_p = {pu.v:.6g}, v_e = {ev.v:.6g})"
                )
    for j, ev in enumerate(sc.evaders):
        if goal_value(ev.state.pos) <= 0.0:
            violations.append(f"evader {j} not in play region (y <= 0)")
    return violations
