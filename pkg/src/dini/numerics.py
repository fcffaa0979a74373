"""Shared numerical primitives.

Root bracketing/refinement, Gauss-Legendre quadrature mapped to (0,1),
adaptive integration over the half-line, and compensated summation.
All arithmetic is binary64; no multiprecision dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_legendre

from .errors import (
    DomainError,
    MaxIterationsError,
    MaxPanelsError,
    NoSignChangeError,
    TailNotDecayingError,
)

MAX_ROOT_ITERATIONS = 200


def _sign(v: float) -> int:
    if v > 0.0:
        return 1
    if v < 0.0:
        return -1
    return 0


@dataclass(frozen=True)
class Bracket:
    """Interval [lo, hi] with certified opposite signs at the endpoints."""

    lo: float
    hi: float
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise NoSignChangeError(f"bracket endpoints not ordered: [{self.lo}, {self.hi}]")
        if self.f_lo_sign * self.f_hi_sign >= 0:
            raise NoSignChangeError(
                f"no certified sign change on [{self.lo}, {self.hi}]: "
                f"signs ({self.f_lo_sign}, {self.f_hi_sign})"
            )

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @classmethod
    def from_function(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, _sign(f(lo)), _sign(f(hi)))


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature rule on (0,1) with positive weights summing to 1.

    ``exact_degree`` is the polynomial exactness degree (2n-1 for a plain
    Gauss-Legendre rule, None for graded/substituted rules).
    """

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if np.any(self.weights <= 0.0):
            raise DomainError("quadrature weights must be strictly positive")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise DomainError("quadrature nodes must be strictly increasing")
        if abs(float(self.weights.sum()) - 1.0) > 1e-14:
            raise DomainError("quadrature weights must sum to 1 within 1e-14")

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def refine_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: float,
    df: Optional[Callable[[float], float]] = None,
) -> tuple[float, Bracket]:
    """Refine a certified bracket to width <= tol.

    Bisection guarantees convergence; Newton steps (when ``df`` is supplied)
    are accepted only while they stay inside the current bracket.
    Returns the root estimate together with its final enclosing bracket.
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    lo, hi = bracket.lo, bracket.hi
    s_lo = bracket.f_lo_sign
    x = 0.5 * (lo + hi)
    for _ in range(MAX_ROOT_ITERATIONS):
        if hi - lo <= tol:
            root = 0.5 * (lo + hi)
            if df is not None:
                # Newton polish keeps the estimate inside the enclosure.
                for _ in range(3):
                    d = df(root)
                    if d == 0.0:
                        break
                    step = f(root) / d
                    cand = root - step
                    if lo <= cand <= hi:
                        root = cand
                    else:
                        break
            final = Bracket(lo, hi, s_lo, -s_lo)
            return root, final
        took_newton = False
        if df is not None:
            d = df(x)
            if d != 0.0 and math.isfinite(d):
                cand = x - f(x) / d
                if lo < cand < hi:
                    x_new = cand
                    took_newton = True
        if not took_newton:
            x_new = 0.5 * (lo + hi)
        fx = f(x_new)
        s = _sign(fx)
        if s == 0:
            # Exact zero hit: shrink to a tiny certified interval around it.
            eps = max(tol / 4.0, 4.0 * abs(x_new) * np.finfo(float).eps)
            lo2, hi2 = max(lo, x_new - eps), min(hi, x_new + eps)
            return x_new, Bracket(lo2, hi2, s_lo, -s_lo)
        if s == s_lo:
            lo = x_new
        else:
            hi = x_new
        x = 0.5 * (lo + hi)
    raise MaxIterationsError(
        f"bracket width {hi - lo:.3e} did not reach tol={tol:.3e} "
        f"in {MAX_ROOT_ITERATIONS} iterations"
    )


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped to (0,1); exact up to degree 2n-1."""
    if not (1 <= n <= 4096):
        raise DomainError(f"gauss_legendre order must be in [1, 4096], got {n}")
    x, w = roots_legendre(n)
    return QuadratureRule(0.5 * (x + 1.0), 0.5 * w, exact_degree=2 * n - 1)


def endpoint_graded_rule(n: int, m_left: int = 1, m_right: int = 1) -> QuadratureRule:
    """Composite rule on (0,1) graded toward the endpoints.

    Applies x = u**m_left on (0, 1/2) and x = 1 - u**m_right on (1/2, 1),
    which restores fast quadrature convergence for integrands with algebraic
    endpoint behavior (basis functions behave like x**(nu+1/2) near 0).
    """
    if m_left < 1 or m_right < 1:
        raise DomainError("grading powers must be >= 1")
    base = gauss_legendre(n)
    half = 0.5 ** (1.0 / m_left)
    u = base.nodes * half
    x_l = u**m_left
    w_l = base.weights * half * m_left * u ** (m_left - 1)
    half_r = 0.5 ** (1.0 / m_right)
    v = base.nodes * half_r
    x_r = 1.0 - v**m_right
    w_r = base.weights * half_r * m_right * v ** (m_right - 1)
    nodes = np.concatenate([x_l, x_r[::-1]])
    weights = np.concatenate([w_l, w_r[::-1]])
    # Endpoint maps are exact changes of variables, so the weight sum is 1 up
    # to rounding; renormalize the last few ulps to honor the type invariant.
    weights = weights / weights.sum()
    return QuadratureRule(nodes, weights, exact_degree=None)


def kahan_sum(values: Sequence[float]) -> float:
    """Compensated summation (Neumaier's variant of the Kahan algorithm)."""
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


_GL_PANEL = roots_legendre(15)


def _panel_gl(f, a: float, b: float) -> float:
    x, w = _GL_PANEL
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * kahan_sum(w[i] * f(mid + half * x[i]) for i in range(len(x)))


def _adaptive_panel(f, a, b, tol, budget) -> float:
    whole = _panel_gl(f, a, b)
    stack = [(a, b, whole, tol, 0)]
    total = 0.0
    used = 0
    while stack:
        a, b, whole, tol_here, depth = stack.pop()
        used += 1
        if used > budget:
            raise MaxPanelsError(f"adaptive integration exceeded {budget} panels")
        mid = 0.5 * (a + b)
        left = _panel_gl(f, a, mid)
        right = _panel_gl(f, mid, b)
        if abs(left + right - whole) <= tol_here or depth >= 60:
            total += left + right
        else:
            stack.append((a, mid, left, 0.5 * tol_here, depth + 1))
            stack.append((mid, b, right, 0.5 * tol_here, depth + 1))
    return total


def integrate_interval(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Adaptive Gauss panel integration of f on [a, b], absolute tolerance."""
    if not b > a:
        raise DomainError("integration interval must satisfy a < b")
    return _adaptive_panel(f, a, b, tol, budget=4000)


def integrate_halfline(
    f: Callable[[float], float],
    tol: float,
    tail_rate: float = 1.0,
    split: float = 1.0,
) -> float:
    """Integrate f over (0, infinity) to absolute tolerance tol.

    The domain is split at ``split`` and the tail mapped by t = split + u/(1-u).
    ``tail_rate`` is the caller's hint for the eventual exponential decay rate
    of f; it is checked empirically on geometric probe points.
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    if tail_rate <= 0.0:
        raise DomainError("tail_rate hint must be positive")

    # Empirical tail check against the decay hint: far out, |f| must not grow.
    probes = [split * 2.0**k for k in range(10, 16)]
    vals = [abs(f(t)) for t in probes]
    floor = max(tol, 1e-300)
    for k in range(len(vals) - 1):
        if vals[k + 1] > max(1.01 * vals[k], 100.0 * floor):
            raise TailNotDecayingError(
                f"|f({probes[k + 1]:.3g})| = {vals[k + 1]:.3g} grew beyond "
                f"|f({probes[k]:.3g})| = {vals[k]:.3g}; decay hint "
                f"rate={tail_rate:.3g} violated"
            )

    near = _adaptive_panel(f, 0.0, split, 0.5 * tol, budget=4000)

    def mapped(u: float) -> float:
        if u >= 1.0:
            return 0.0
        t = split + u / (1.0 - u)
        return f(t) / (1.0 - u) ** 2

    far = _adaptive_panel(mapped, 0.0, 1.0 - 1e-12, 0.5 * tol, budget=4000)
    return near + far
