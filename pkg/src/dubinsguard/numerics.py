"""Reusable numeric kernels: real roots of low-degree polynomials on an
interval, and global maximization of a function on the unit circle.

Both are scan-based with certified resolution rather than algebraic: the
consumers only ever need roots inside an analytically known bracket, and the
circle objectives are smooth with O(1) oscillation, so a dense scan plus
local refinement is simpler to trust than companion matrices or general
global optimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

MAX_DEGREE = 6
SCAN_SAMPLES = 4096


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients in ascending degree order (length <= 7)."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if not coeffs or all(c == 0.0 for c in coeffs):
            raise ValueError("degenerate all-zero polynomial")
        if len(coeffs) > MAX_DEGREE + 1:
            raise ValueError(f"degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        result = 0.0 * x + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            result = result * x + c
        return result

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))


@dataclass(frozen=True)
class BracketedMax:
    """Result of a scan-plus-refine maximization."""

    argmax: float
    max_value: float
    certified_resolution: float


def _bisect(poly: Polynomial, a: float, b: float, fa: float, tol: float) -> float:
    # fa carries the sign of poly(a); the bracket [a, b] holds a sign change.
    for _ in range(128):
        if b - a <= tol * 0.25:
            break
        mid = 0.5 * (a + b)
        fm = poly(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def real_roots(poly: Polynomial, lo: float, hi: float, tol: float = 1e-12) -> list[float]:
    """All real roots of ``poly`` in [lo, hi], sorted, deduplicated at
    spacing ``tol``.

    Method: a dense sign-change scan (4096 samples or more) with bisection
    refinement.  Roots of even multiplicity leave no sign change, so the
    scan is complemented by a derivative analysis: every zero of the
    derivative where the polynomial itself (nearly) vanishes is also a root.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    scale = max(abs(lo), abs(hi), 1.0)
    value_tol = tol * (1.0 + max(abs(c) for c in poly.coeffs) * scale**poly.degree)

    if poly.degree == 0:
        return []
    if poly.degree == 1:
        c0, c1 = poly.coeffs
        root = -c0 / c1
        return [root] if lo <= root <= hi else []

    xs = np.linspace(lo, hi, SCAN_SAMPLES + 1)
    vals = poly(xs)

    roots: list[float] = [float(xs[k]) for k in np.flatnonzero(vals == 0.0)]
    for k in np.flatnonzero((vals[:-1] > 0.0) != (vals[1:] > 0.0)):
        va, vb = float(vals[k]), float(vals[k + 1])
        if va == 0.0 or vb == 0.0:
            continue
        roots.append(_bisect(poly, float(xs[k]), float(xs[k + 1]), va, tol))

    # Touching (even-multiplicity) roots: stationary points where the value
    # also vanishes.  The recursion terminates because the degree drops.
    for x_star in real_roots(poly.derivative(), lo, hi, min(tol, 1e-9)):
        if abs(poly(x_star)) <= value_tol:
            roots.append(x_star)

    roots.sort()
    merged: list[float] = []
    for root in roots:
        if not merged or root - merged[-1] > tol:
            merged.append(root)
    return merged


def golden_max(f, a: float, b: float, tol: float = 1e-12) -> tuple[float, float]:
    """Golden-section maximization of a unimodal ``f`` on [a, b]; returns
    (argmax, value)."""
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def max_on_circle(f, resolution: int = SCAN_SAMPLES) -> BracketedMax:
    """Global maximum of ``f(x, y)`` on the unit circle x^2 + y^2 = 1.

    The circle is parameterized as (cos t, sin t); ``f`` is sampled on
    ``resolution`` uniform angles (it must accept numpy arrays) and the best
    bracket is refined by golden section to 1e-12 in t.  The certification is
    the scan resolution: maxima narrower than one grid cell can be missed.
    """
    if resolution < 360:
        raise ValueError(f"resolution must be >= 360, got {resolution}")
    ts = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    vals = np.asarray(f(np.cos(ts), np.sin(ts)), dtype=float)
    best = int(np.argmax(vals))
    spacing = 2.0 * math.pi / resolution

    def on_circle(t):
        return float(f(math.cos(t), math.sin(t)))

    t_lo = ts[best] - spacing
    t_hi = ts[best] + spacing
    t_star, v_star = golden_max(on_circle, t_lo, t_hi, tol=1e-12)
    if v_star < vals[best]:
        t_star, v_star = float(ts[best]), float(vals[best])
    return BracketedMax(argmax=t_star, max_value=v_star, certified_resolution=spacing)
