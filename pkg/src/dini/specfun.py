"""Bessel functions of real order, their Robin combinations, Jacobi
polynomials, the Gamma function, and the cross-product Wronskian.

Orders are restricted to (-1, inf) throughout, matching the standing
assumption of the spectral construction. J_nu and I_nu are delegated to
scipy.special (AMOS); the Robin combinations are always formed through the
recurrence identities, never by numerical differentiation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import iv as _iv
from scipy.special import jv as _jv

from .errors import DomainError, OverflowRangeError, PoleError

X_MAX_J = 1.0e4
X_MAX_I = 700.0
REGIME_TOL = 1e-14


class Regime(enum.Enum):
    """Sign regime of nu + H, which decides the presence of an n=0 mode."""

    PLUS = "plus"
    ZERO = "zero"
    MINUS = "minus"


@dataclass(frozen=True)
class SpectralParams:
    """Order/boundary parameter pair (nu, H) with nu > -1."""

    nu: float
    h: float = 0.5
    regime: Regime = field(init=False)

    def __post_init__(self):
        if not self.nu > -1.0:
            raise DomainError(f"order nu must exceed -1, got {self.nu}")
        s = self.nu + self.h
        if abs(s) <= REGIME_TOL:
            regime = Regime.ZERO
        elif s > 0.0:
            regime = Regime.PLUS
        else:
            regime = Regime.MINUS
        object.__setattr__(self, "regime", regime)

    @property
    def n_min(self) -> int:
        """First basis index: 1 in the PLUS regime, else 0."""
        return 1 if self.regime is Regime.PLUS else 0


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi type parameters with alpha, beta > -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise DomainError(
                f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})"
            )


def _check_order(nu: float) -> None:
    if not nu > -1.0:
        raise DomainError(f"order must exceed -1, got {nu}")


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu on (0, 1e4]."""
    _check_order(nu)
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0.0):
        raise DomainError("bessel_j requires x > 0")
    if np.any(xs > X_MAX_J):
        raise DomainError(f"bessel_j supports x <= {X_MAX_J:g}")
    out = _jv(nu, xs)
    return float(out) if np.isscalar(x) else out


def bessel_i(nu: float, x):
    """Modified Bessel function of the first kind I_nu on (0, 700]."""
    _check_order(nu)
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0.0):
        raise DomainError("bessel_i requires x > 0")
    if np.any(xs > X_MAX_I):
        raise OverflowRangeError(f"bessel_i overflows beyond x = {X_MAX_I:g}")
    out = _iv(nu, xs)
    return float(out) if np.isscalar(x) else out


def bessel_jh(p: SpectralParams, x):
    """Robin combination x*J_nu'(x) + H*J_nu(x) = (H+nu) J_nu(x) - x J_{nu+1}(x)."""
    xs = np.asarray(x, dtype=float)
    out = (p.h + p.nu) * bessel_j(p.nu, xs) - xs * bessel_j(p.nu + 1.0, xs)
    return float(out) if np.isscalar(x) else out


def bessel_jh_prime(p: SpectralParams, x):
    """Derivative of the J Robin combination, through order nu, nu+1, nu+2."""
    xs = np.asarray(x, dtype=float)
    out = (
        (p.nu * (p.h + p.nu) / xs) * bessel_j(p.nu, xs)
        - (p.h + 2.0 * p.nu + 2.0) * bessel_j(p.nu + 1.0, xs)
        + xs * bessel_j(p.nu + 2.0, xs)
    )
    return float(out) if np.isscalar(x) else out


def bessel_ih(p: SpectralParams, x):
    """Robin combination x*I_nu'(x) + H*I_nu(x) = (H+nu) I_nu(x) + x I_{nu+1}(x)."""
    xs = np.asarray(x, dtype=float)
    out = (p.h + p.nu) * bessel_i(p.nu, xs) + xs * bessel_i(p.nu + 1.0, xs)
    return float(out) if np.isscalar(x) else out


def bessel_ih_prime(p: SpectralParams, x):
    """Derivative of the I Robin combination, through order nu, nu+1, nu+2."""
    xs = np.asarray(x, dtype=float)
    out = (
        (p.nu * (p.h + p.nu) / xs) * bessel_i(p.nu, xs)
        + (p.h + 2.0 * p.nu + 2.0) * bessel_i(p.nu + 1.0, xs)
        + xs * bessel_i(p.nu + 2.0, xs)
    )
    return float(out) if np.isscalar(x) else out


MAX_JACOBI_DEGREE = 100_000


def jacobi_poly(jp: JacobiParams, k: int, u):
    """Jacobi polynomial P_k^{alpha,beta}(u) by the three-term recurrence."""
    if k < 0 or k > MAX_JACOBI_DEGREE:
        raise DomainError(f"degree k must be in [0, {MAX_JACOBI_DEGREE}], got {k}")
    us = np.asarray(u, dtype=float)
    if np.any(np.abs(us) > 1.0 + 1e-12):
        raise DomainError("jacobi_poly requires u in [-1, 1]")
    out = jacobi_poly_all(jp, k, np.atleast_1d(us))[k]
    return float(out[0]) if np.isscalar(u) else out.reshape(us.shape)


def jacobi_poly_all(jp: JacobiParams, k_max: int, u: np.ndarray) -> np.ndarray:
    """All P_k^{alpha,beta}(u) for k = 0..k_max; rows indexed by degree."""
    a, b = jp.alpha, jp.beta
    u = np.asarray(u, dtype=float)
    out = np.empty((k_max + 1, u.size))
    out[0] = 1.0
    if k_max == 0:
        return out
    out[1] = (a + 1.0) + (a + b + 2.0) * (u - 1.0) / 2.0
    for k in range(2, k_max + 1):
        c = 2.0 * k + a + b
        a_k = 2.0 * k * (k + a + b) * (c - 2.0)
        b_k = (c - 1.0) * (c * (c - 2.0) * u + a * a - b * b)
        c_k = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        out[k] = (b_k * out[k - 1] - c_k * out[k - 2]) / a_k
    return out


def jacobi_poly_derivative(jp: JacobiParams, k: int, u):
    """d/du P_k^{alpha,beta}(u) = (k+alpha+beta+1)/2 * P_{k-1}^{alpha+1,beta+1}(u)."""
    if k == 0:
        return 0.0 if np.isscalar(u) else np.zeros_like(np.asarray(u, dtype=float))
    shifted = JacobiParams(jp.alpha + 1.0, jp.beta + 1.0)
    return 0.5 * (k + jp.alpha + jp.beta + 1.0) * jacobi_poly(shifted, k - 1, u)


def gamma_fn(x: float) -> float:
    """Gamma function; raises PoleError at non-positive integers."""
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma function pole at {x}")
    return math.gamma(x)


def wronskian(nu: float, alpha: float, xi: float, eta: float, x):
    """Cross-product Wronskian of sqrt(x)*J_nu(xi x) and sqrt(x)*J_alpha(eta x).

    Closed form:
        (alpha - nu) J_nu(xi x) J_alpha(eta x)
        + x [ xi J_{nu+1}(xi x) J_alpha(eta x) - eta J_nu(xi x) J_{alpha+1}(eta x) ].
    """
    _check_order(nu)
    _check_order(alpha)
    if xi <= 0.0 or eta <= 0.0:
        raise DomainError("scalings xi and eta must be positive")
    if xi == eta:
        raise DomainError("wronskian requires xi != eta")
    xs = np.asarray(x, dtype=float)
    j_nu = bessel_j(nu, xi * xs)
    j_al = bessel_j(alpha, eta * xs)
    out = (alpha - nu) * j_nu * j_al + xs * (
        xi * bessel_j(nu + 1.0, xi * xs) * j_al
        - eta * j_nu * bessel_j(alpha + 1.0, eta * xs)
    )
    return float(out) if np.isscalar(x) else out
