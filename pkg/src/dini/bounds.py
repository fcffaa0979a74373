"""Closed-form envelopes, two-sided comparisons, and ratio reports.

The sharp kernel estimates are all of the form kernel(x,y) comparable to an
explicit envelope, with constants that are never stated; the numerical
witness for each claim is the min/max of kernel/envelope over a grid
(a RatioReport), plus the exact exponential sandwich between the Bessel-type
and Jacobi-type heat kernels with the bounded generator difference F.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .basis import BasisSpec, JacobiBasisSpec, build_basis, build_jacobi_basis, inner_product_rule
from .errors import (
    ConsistencyError,
    DomainError,
    NonFiniteRatioError,
    SandwichViolation,
)
from .kernels import PairEngine
from .numerics import QuadratureRule
from .specfun import JacobiParams, Regime, SpectralParams

INDICATOR_TOL = 1e-12
SANDWICH_SLACK = 1e-7


def F_nu(nu: float, x):
    """Generator difference (1/4 - nu^2) [pi^2/(4 sin^2(pi x/2)) - 1/x^2].

    Continuous and monotone on [0,1]; x = 0 is taken in the limiting sense.
    """
    if not nu > -1.0:
        raise DomainError("order must exceed -1")
    xs = np.asarray(x, dtype=float)
    if np.any((xs < 0.0) | (xs > 1.0)):
        raise DomainError("F_nu is defined on [0, 1]")
    coef = 0.25 - nu * nu
    out = np.empty_like(xs, dtype=float)
    small = xs <= 0.05
    u = 0.5 * math.pi * xs[small]
    u2 = u * u
    # 1/sin^2 u - 1/u^2 = 1/3 + u^2/15 + 2u^4/189 + u^6/675 + 2u^8/10395 + ...
    # The direct formula loses ~1/x^2 digits of cancellation near 0.
    out[small] = coef * (math.pi**2 / 4.0) * (
        1.0 / 3.0
        + u2 * (1.0 / 15.0 + u2 * (2.0 / 189.0 + u2 * (1.0 / 675.0 + u2 * 2.0 / 10395.0)))
    )
    big = ~small
    xb = xs[big]
    out[big] = coef * (
        math.pi**2 / (4.0 * np.sin(0.5 * math.pi * xb) ** 2) - 1.0 / (xb * xb)
    )
    return float(out) if np.isscalar(x) else out


class EnvelopeKind(enum.Enum):
    HEAT_SHORT = "heat-short"
    HEAT_LONG = "heat-long"
    JACOBI_SHORT = "jacobi-short"
    POISSON_SHORT = "poisson-short"
    POISSON_LONG = "poisson-long"
    POT_BESSEL = "potential-bessel"
    POT_RIESZ = "potential-riesz"


@dataclass(frozen=True)
class Envelope:
    """Closed-form comparison function for one kernel kind.

    ``rate`` is the signed large-time exponential rate (the envelope carries
    exp(-rate * t); negative rate means growth, as for the MINUS regime).
    ``beta`` is the right-endpoint exponent parameter of the Jacobi kind.
    """

    kind: EnvelopeKind
    nu: float
    beta: float = -0.5
    rate: float = 0.0

    def __post_init__(self):
        if not self.nu > -1.0:
            raise DomainError("envelope order must exceed -1")


def heat_short_envelope(nu: float) -> Envelope:
    return Envelope(EnvelopeKind.HEAT_SHORT, nu)


def jacobi_short_envelope(alpha: float, beta: float) -> Envelope:
    e = Envelope(EnvelopeKind.JACOBI_SHORT, alpha, beta=beta)
    if not beta > -1.0:
        raise DomainError("beta must exceed -1")
    return e


def heat_long_envelope(basis: BasisSpec) -> Envelope:
    """Large-time envelope (xy)^{nu+1/2} exp(-rate t) from the bottom mode."""
    p = basis.params
    if p.regime is Regime.PLUS:
        rate = basis.eigen[1]
    elif p.regime is Regime.ZERO:
        rate = 0.0
    else:
        rate = basis.eigen[0]  # negative: kernel grows like exp(z_0^2 t)
    return Envelope(EnvelopeKind.HEAT_LONG, p.nu, rate=rate)


def poisson_short_envelope(nu: float) -> Envelope:
    return Envelope(EnvelopeKind.POISSON_SHORT, nu)


def poisson_long_envelope(basis: BasisSpec, d: float) -> Envelope:
    p = basis.params
    lam0 = d * d + basis.eigen[basis.n_min]
    if lam0 < 0.0:
        raise DomainError("shift too small for a Poisson large-time rate")
    return Envelope(EnvelopeKind.POISSON_LONG, p.nu, rate=math.sqrt(lam0))


def potential_envelope(nu: float, riesz: bool = False) -> Envelope:
    if riesz and nu <= -0.5:
        raise DomainError("Riesz potential envelope requires nu > -1/2")
    kind = EnvelopeKind.POT_RIESZ if riesz else EnvelopeKind.POT_BESSEL
    return Envelope(kind, nu)


def envelope_eval(e: Envelope, t_or_sigma: float, x, y):
    """Evaluate the closed-form envelope at (x, y) for time t (or power sigma)."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if np.any((xs <= 0.0) | (xs >= 1.0) | (ys <= 0.0) | (ys >= 1.0)):
        raise DomainError("envelope arguments must lie in (0,1)")
    t = t_or_sigma
    if t <= 0.0:
        raise DomainError("time (or sigma) must be positive")
    nu = e.nu
    if e.kind is EnvelopeKind.HEAT_SHORT:
        out = (
            np.minimum(xs * ys / t, 1.0) ** (nu + 0.5)
            / math.sqrt(t)
            * np.exp(-((xs - ys) ** 2) / (4.0 * t))
        )
    elif e.kind is EnvelopeKind.JACOBI_SHORT:
        out = (
            np.minimum(xs * ys / t, 1.0) ** (nu + 0.5)
            * np.minimum((1.0 - xs) * (1.0 - ys) / t, 1.0) ** (e.beta + 0.5)
            / math.sqrt(t)
            * np.exp(-((xs - ys) ** 2) / (4.0 * t))
        )
    elif e.kind is EnvelopeKind.HEAT_LONG:
        out = (xs * ys) ** (nu + 0.5) * math.exp(-e.rate * t)
    elif e.kind is EnvelopeKind.POISSON_SHORT:
        out = (np.sqrt(xs * ys) / (t + xs + ys)) ** (2.0 * nu + 1.0) * t / (
            t * t + (xs - ys) ** 2
        )
    elif e.kind is EnvelopeKind.POISSON_LONG:
        out = (xs * ys) ** (nu + 0.5) * math.exp(-e.rate * t)
    elif e.kind in (EnvelopeKind.POT_BESSEL, EnvelopeKind.POT_RIESZ):
        out = (xs * ys) ** (nu + 0.5) * _potential_bracket(nu, t, xs, ys)
    else:  # pragma: no cover
        raise DomainError(f"unknown envelope kind {e.kind}")
    return float(out) if np.isscalar(x) and np.isscalar(y) else out


def _potential_bracket(nu: float, sigma: float, xs: np.ndarray, ys: np.ndarray):
    s = xs + ys
    r = 2.0 - s
    diff = np.abs(xs - ys)
    out = np.ones_like(s)
    if abs(sigma - (nu + 1.0)) <= INDICATOR_TOL:
        out = out + np.log(2.0 / s)
    if abs(sigma - 0.5) <= INDICATOR_TOL:
        out = out + np.log(2.0 / r)
    power = s ** (2.0 * sigma - 2.0 * (nu + 1.0))
    if sigma > 0.5 + INDICATOR_TOL:
        branch = r ** (2.0 * sigma - 1.0)
    elif sigma >= 0.5 - INDICATOR_TOL:
        with np.errstate(divide="raise"):
            branch = np.log(s * r / diff)
    else:
        branch = (s / diff) ** (1.0 - 2.0 * sigma)
    return out + power * branch


@dataclass
class RatioReport:
    """Min/max of kernel/envelope over a grid: the numerical witness of a
    two-sided comparability claim."""

    kind: str
    params: dict
    t_or_sigma: float
    n_points: int
    min_ratio: float
    max_ratio: float
    argmin: tuple
    argmax: tuple
    points: Optional[list] = field(default=None, repr=False)

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "t": self.t_or_sigma,
            "n_points": self.n_points,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "argmin": list(self.argmin),
            "argmax": list(self.argmax),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def write_csv(self, fh) -> None:
        """Per-point long-format dump: x,y,kernel,envelope,ratio."""
        if self.points is None:
            raise DomainError("report was built without per-point rows")
        fh.write("x,y,kernel,envelope,ratio\n")
        for x, y, k, e, r in self.points:
            fh.write(
                "%s,%s,%s,%s,%s\n"
                % tuple("%.17g" % v for v in (x, y, k, e, r))
            )


def ratio_report(
    kernel_values: Sequence[float],
    envelope_values: Sequence[float],
    pairs: Sequence[tuple],
    kind: str,
    params: dict,
    t_or_sigma: float,
    keep_points: bool = True,
    floor: float = 0.0,
) -> RatioReport:
    """Build the kernel/envelope ratio witness from matched value arrays.

    Points where the envelope falls below ``floor`` are excluded: there the
    kernel value (certified only to an absolute tolerance) cannot resolve the
    ratio. With the default floor of 0 every point is kept.
    """
    kv = np.asarray(kernel_values, dtype=float)
    ev = np.asarray(envelope_values, dtype=float)
    if kv.shape != ev.shape or len(pairs) != kv.size:
        raise DomainError("kernel, envelope and pair arrays must align")
    keep = ev >= max(floor, 0.0)
    if floor > 0.0 and not np.all(keep):
        kv = kv[keep]
        ev = ev[keep]
        pairs = [p for p, k in zip(pairs, keep) if k]
    if kv.size == 0:
        raise DomainError("no grid points remain above the resolvability floor")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = kv / ev
    if not np.all(np.isfinite(ratios)) or np.any(ratios <= 0.0):
        bad = int(np.argmin(np.where(np.isfinite(ratios), ratios, -np.inf)))
        raise NonFiniteRatioError(
            f"non-finite or non-positive ratio at point {pairs[bad]}: "
            f"kernel={kv[bad]:.6g}, envelope={ev[bad]:.6g}"
        )
    imin = int(np.argmin(ratios))
    imax = int(np.argmax(ratios))
    points = (
        [(p[0], p[1], float(k), float(e), float(r)) for p, k, e, r in zip(pairs, kv, ev, ratios)]
        if keep_points
        else None
    )
    return RatioReport(
        kind=kind,
        params=params,
        t_or_sigma=t_or_sigma,
        n_points=kv.size,
        min_ratio=float(ratios[imin]),
        max_ratio=float(ratios[imax]),
        argmin=tuple(pairs[imin]),
        argmax=tuple(pairs[imax]),
        points=points,
    )


@dataclass
class SandwichReport:
    nu: float
    t: float
    branch: str
    n_points: int
    lower_factor: float
    upper_factor: float
    min_lower_margin: float
    min_upper_margin: float
    argmin_lower: tuple
    argmin_upper: tuple

    def to_json_dict(self) -> dict:
        d = self.__dict__.copy()
        d["argmin_lower"] = list(self.argmin_lower)
        d["argmin_upper"] = list(self.argmin_upper)
        return d


def sandwich_check(
    nu: float,
    t_grid: Sequence[float],
    xy_grid: Sequence[tuple],
    n_max: int = 400,
    tol: float = 1e-10,
    dini_basis: Optional[BasisSpec] = None,
    jacobi_basis: Optional[JacobiBasisSpec] = None,
) -> list[SandwichReport]:
    """Pointwise exponential sandwich between the Bessel-type heat kernel
    (H = 1/2) and the Jacobi-type heat kernel (beta = -1/2) at alpha = nu.

    Raises SandwichViolation if either one-sided comparison fails by more
    than the relative slack at any grid point.
    """
    b = dini_basis or build_basis(SpectralParams(nu, 0.5), n_max)
    jb = jacobi_basis or build_jacobi_basis(JacobiParams(nu, -0.5), n_max)
    eng_g = PairEngine(b, xy_grid)
    eng_k = PairEngine(jb, xy_grid)
    f0 = float(F_nu(nu, 0.0))
    f1 = float(F_nu(nu, 1.0))
    branch = "inner" if -0.5 <= nu <= 0.5 else "outer"
    reports = []
    for t in t_grid:
        g, _, _ = eng_g.heat_values(t, tol)
        k, _, _ = eng_k.heat_values(t, tol)
        lower = math.exp(-t * max(f0, f1))
        upper = math.exp(-t * min(f0, f1))
        scale = np.maximum(g, upper * k)
        m_lo = g - lower * k
        m_up = upper * k - g
        # Absolute floor: values are only certified to the evaluation tol.
        slack = SANDWICH_SLACK * scale + 4.0 * tol
        bad_lo = m_lo < -slack
        bad_up = m_up < -slack
        if np.any(bad_lo | bad_up):
            i = int(np.argmin(np.where(bad_lo, m_lo, np.where(bad_up, m_up, np.inf))))
            raise SandwichViolation(
                f"sandwich fails at nu={nu}, t={t}, point {xy_grid[i]}: "
                f"lower margin {m_lo[i]:.3e}, upper margin {m_up[i]:.3e}",
                point=tuple(xy_grid[i]),
            )
        i_lo = int(np.argmin(m_lo))
        i_up = int(np.argmin(m_up))
        reports.append(
            SandwichReport(
                nu=nu,
                t=float(t),
                branch=branch,
                n_points=len(xy_grid),
                lower_factor=lower,
                upper_factor=upper,
                min_lower_margin=float(m_lo[i_lo]),
                min_upper_margin=float(m_up[i_up]),
                argmin_lower=tuple(xy_grid[i_lo]),
                argmin_upper=tuple(xy_grid[i_up]),
            )
        )
    return reports


def mapping_exponents(nu: float) -> tuple[float, float]:
    """Endpoint exponents p0 = 1/(nu+3/2), p1 = -1/(nu+1/2) for nu in (-1,-1/2)."""
    if not (-1.0 < nu < -0.5):
        raise DomainError(f"mapping exponents require nu in (-1, -1/2), got {nu}")
    p0 = 1.0 / (nu + 1.5)
    denom = nu + 0.5
    p1 = math.inf if denom == 0.0 else -1.0 / denom
    return p0, p1


def _trial_function_norms(
    nu: float, trial_coeffs: Sequence[float], quad: Optional[QuadratureRule]
) -> tuple[float, float, float]:
    """(||f/x^2||, ||f'/x||, ||Lf||) for f = sum_n coeffs[n-1] psi_n (n >= 1)."""
    coeffs = np.asarray(trial_coeffs, dtype=float)
    n_terms = coeffs.size
    b = build_basis(SpectralParams(nu, 0.5), n_terms)
    full = np.zeros(b.n_max + 1)
    full[1 : n_terms + 1] = coeffs
    if quad is None:
        quad = inner_product_rule(2048, 2.0 * nu - 3.0)
    x = quad.nodes
    f = full @ b.psi_matrix(x)
    fp = full @ b.psi_prime_matrix(x)
    lhs = math.sqrt(float(np.dot(quad.weights, (f / x**2) ** 2)))
    hardy = math.sqrt(float(np.dot(quad.weights, (fp / x) ** 2)))
    op_norm = math.sqrt(float(np.sum((coeffs * b.eigen[1 : n_terms + 1]) ** 2)))
    return lhs, hardy, op_norm


def rellich_check(
    nu: float, trial_coeffs: Sequence[float], quad: Optional[QuadratureRule] = None
) -> tuple[float, float]:
    """||f/x^2|| <= (nu^2-1)^{-1} ||L f|| for finite combinations, nu > 1."""
    if not nu > 1.0:
        raise DomainError("the second-order weighted inequality requires nu > 1")
    lhs, _, op_norm = _trial_function_norms(nu, trial_coeffs, quad)
    rhs = op_norm / (nu * nu - 1.0)
    if lhs > rhs * (1.0 + 1e-6):
        raise ConsistencyError(
            f"weighted-norm inequality violated: lhs={lhs:.12e} > rhs={rhs:.12e}"
        )
    return lhs, rhs


def hardy_check(
    nu: float, trial_coeffs: Sequence[float], quad: Optional[QuadratureRule] = None
) -> tuple[float, float]:
    """||f/x^2|| <= (2/3) ||f'/x|| for the same trial functions."""
    if not nu > 1.0:
        raise DomainError("trial functions require nu > 1 for finite norms")
    lhs, hardy, _ = _trial_function_norms(nu, trial_coeffs, quad)
    rhs = (2.0 / 3.0) * hardy
    if lhs > rhs * (1.0 + 1e-6):
        raise ConsistencyError(
            f"first-order weighted inequality violated: lhs={lhs:.12e} > rhs={rhs:.12e}"
        )
    return lhs, rhs


# --------------------------------------------------------------------------
# Ratio sweeps
# --------------------------------------------------------------------------

RESOLVABILITY_FACTOR = 1e4


def heat_envelope_reports(
    basis,
    pairs: Sequence[tuple],
    t_values: Sequence[float],
    envelope: Envelope,
    tol: float = 1e-10,
    keep_points: bool = False,
) -> list[RatioReport]:
    """Kernel/envelope ratio reports for the heat kernel at several times."""
    eng = basis if isinstance(basis, PairEngine) else PairEngine(basis, pairs)
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    label = "jacobi-heat" if isinstance(eng.basis, JacobiBasisSpec) else "heat"
    params = (
        {"alpha": eng.basis.jp.alpha, "beta": eng.basis.jp.beta}
        if isinstance(eng.basis, JacobiBasisSpec)
        else {"nu": eng.basis.params.nu, "H": eng.basis.params.h}
    )
    out = []
    long_time = envelope.kind is EnvelopeKind.HEAT_LONG
    for t in t_values:
        if long_time:
            # Rescale by the bottom spectral rate: both sides become O(1),
            # so the ratio survives even where the raw kernel underflows.
            vals, _, _ = eng.heat_values(t, tol, rescale=envelope.rate)
            ev = (xs * ys) ** (envelope.nu + 0.5)
            floor = 0.0
        else:
            vals, _, _ = eng.heat_values(t, tol)
            ev = envelope_eval(envelope, t, xs, ys)
            floor = RESOLVABILITY_FACTOR * tol
        out.append(
            ratio_report(
                vals, ev, pairs, label, params, t,
                keep_points=keep_points, floor=floor,
            )
        )
    return out


def poisson_envelope_reports(
    basis,
    pairs: Sequence[tuple],
    t_values: Sequence[float],
    envelope: Envelope,
    d: float = 0.0,
    tol: float = 1e-9,
    keep_points: bool = False,
) -> list[RatioReport]:
    eng = basis if isinstance(basis, PairEngine) else PairEngine(basis, pairs)
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    params = {"nu": eng.basis.params.nu, "H": eng.basis.params.h, "d": d}
    out = []
    long_time = envelope.kind is EnvelopeKind.POISSON_LONG
    for t in t_values:
        if long_time:
            vals, _, _ = eng.poisson_values(t, d, tol, rescale=envelope.rate)
            ev = (xs * ys) ** (envelope.nu + 0.5)
            floor = 0.0
        else:
            vals, _, _ = eng.poisson_values(t, d, tol)
            ev = envelope_eval(envelope, t, xs, ys)
            floor = RESOLVABILITY_FACTOR * tol
        out.append(
            ratio_report(
                vals, ev, pairs, "poisson", params, t,
                keep_points=keep_points, floor=floor,
            )
        )
    return out


def potential_envelope_reports(
    basis,
    pairs: Sequence[tuple],
    sigmas: Sequence[float],
    riesz: bool = False,
    tol: float = 1e-9,
    keep_points: bool = False,
) -> list[RatioReport]:
    eng = basis if isinstance(basis, PairEngine) else PairEngine(basis, pairs)
    nu = eng.basis.params.nu
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    env = potential_envelope(nu, riesz=riesz)
    d0 = 0.0 if riesz else 1.0
    label = "riesz-potential" if riesz else "bessel-potential"
    out = []
    for sigma in sigmas:
        vals, _, _ = eng.potential_series(sigma, d0, tol)
        ev = envelope_eval(env, sigma, xs, ys)
        out.append(
            ratio_report(
                vals, ev, pairs, label, {"nu": nu}, sigma,
                keep_points=keep_points, floor=RESOLVABILITY_FACTOR * tol,
            )
        )
    return out


# --------------------------------------------------------------------------
# Grid construction for verification sweeps
# --------------------------------------------------------------------------


def boundary_refined_coords(n: int, refine: bool = True) -> np.ndarray:
    """Coordinates in (0,1): uniform midpoints plus geometric refinement
    toward both endpoints (where the envelope regimes live)."""
    base = (np.arange(n) + 0.5) / n
    if not refine:
        return base
    lead = np.array([1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2])
    return np.unique(np.concatenate([lead, base, 1.0 - lead]))


def pair_grid(coords: np.ndarray) -> list[tuple]:
    xs, ys = np.meshgrid(coords, coords)
    return list(zip(xs.ravel().tolist(), ys.ravel().tolist()))


def offdiagonal_pair_grid(coords: np.ndarray, min_sep: float = 0.02) -> list[tuple]:
    """Tensor pairs with |x - y| >= min_sep, plus near-diagonal probes at the
    minimum separation to exercise the diagonal-singular branches."""
    pairs = [(x, y) for x in coords for y in coords if abs(x - y) >= min_sep]
    for x in coords[(coords > 0.1) & (coords < 0.9)]:
        y = x + min_sep
        if y < 1.0:
            pairs.append((float(x), float(y)))
    return pairs
