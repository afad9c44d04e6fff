"""Phase structure of the imitative monomer-dimer model.

The equilibrium densities are the global maximizers of the variational
pressure ptilde(m) = -J m^2 + p0((2m-1)J + h); they solve the consistency
equation m = g((2m-1)J + h).  Depending on (h, J) the maximizer set is

  * a single point m* (uniqueness region),
  * two points m1 < m2 of equal height (the coexistence curve h = gamma(J),
    defined for J above the critical coupling),
  * one point m_c where the second and third m-derivatives of ptilde vanish
    simultaneously (the critical point, endpoint of the curve).

At coexistence the two phases carry limiting weights rho_l proportional to
b_l = (-lambda_l (2 - m_l))^{-1/2}, where lambda_l is the curvature of ptilde
at m_l and the (2 - m_l) factor is the hard-core contribution.  Away from
coexistence the monomer-count fluctuations are Gaussian with variance
sigma^2 = -1/lambda - 1/(2J).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .thermo import ModelParams, g, g_derivative, tilde_p

__all__ = [
    "NearDegenerateError",
    "StationaryPoint",
    "PhaseReport",
    "GammaPoint",
    "CriticalPoint",
    "solve_consistency",
    "classify",
    "find_critical_point",
    "trace_gamma",
    "phase_weight",
    "mixture_weights",
    "mixture_ratio_closed_form",
    "clt_variance",
    "clt_variance_reduced",
    "gamma_points_to_csv",
    "gamma_points_to_json",
]

# classification bands: the three regimes are separated by orders of
# magnitude at double precision, anything inside a band is reported, never
# silently classified
EQUAL_HEIGHT_TOL = 1e-11
EQUAL_HEIGHT_BAND = 1e-9
CRITICAL_CURVATURE_TOL = 1e-8
CRITICAL_CURVATURE_BAND = 1e-6

_GRID_POINTS = 401
_RESIDUAL_TOL = 1e-13


class NearDegenerateError(ValueError):
    """Classification falls inside a tolerance band between two regimes."""

    def __init__(self, message: str, candidates: tuple[str, str]):
        super().__init__(message)
        self.candidates = candidates


@dataclass(frozen=True)
class StationaryPoint:
    """A solution of the consistency equation with local data of ptilde."""

    m: float
    value: float
    second_derivative: float
    third_derivative: float
    fourth_derivative: float
    order: int  # first non-vanishing derivative order: 2 generically, 4 at criticality

    @property
    def is_maximum(self) -> bool:
        if self.order == 2:
            return self.second_derivative < 0.0
        return self.fourth_derivative < 0.0


@dataclass(frozen=True)
class PhaseReport:
    kind: str  # "unique" | "coexistence" | "critical"
    maximizers: tuple[float, ...]
    stationary_points: tuple[StationaryPoint, ...]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "maximizers": list(self.maximizers),
            "stationary_points": [
                {
                    "m": sp.m,
                    "value": sp.value,
                    "second_derivative": sp.second_derivative,
                    "order": sp.order,
                    "is_maximum": sp.is_maximum,
                }
                for sp in self.stationary_points
            ],
        }


@dataclass(frozen=True)
class GammaPoint:
    """One sample of the coexistence curve with its limit-law parameters."""

    J: float
    h: float
    m1: float
    m2: float
    lambda1: float
    lambda2: float
    rho1: float
    rho2: float

    def to_json_dict(self) -> dict:
        return {
            "J": self.J, "h": self.h, "m1": self.m1, "m2": self.m2,
            "lambda1": self.lambda1, "lambda2": self.lambda2,
            "rho1": self.rho1, "rho2": self.rho2,
        }


@dataclass(frozen=True)
class CriticalPoint:
    h_c: float
    J_c: float
    m_c: float
    lambda_c: float  # fourth m-derivative of ptilde at m_c, negative

    def to_json_dict(self) -> dict:
        return {"h_c": self.h_c, "J_c": self.J_c, "m_c": self.m_c,
                "lambda_c": self.lambda_c}


def _residual(m, params: ModelParams):
    return np.asarray(m) - np.asarray(g(params.effective_field(m)))


def _stationary_point(m: float, params: ModelParams) -> StationaryPoint:
    val = tilde_p(m, params)
    d2 = tilde_p(m, params, 2)
    d3 = tilde_p(m, params, 3)
    d4 = tilde_p(m, params, 4)
    order = 2
    if abs(d2) < CRITICAL_CURVATURE_TOL and d4 < 0.0:
        order = 4
    return StationaryPoint(m=m, value=val, second_derivative=d2,
                           third_derivative=d3, fourth_derivative=d4, order=order)


def solve_consistency(params: ModelParams) -> list[StationaryPoint]:
    """All solutions of m = g((2m-1)J + h) in [0, 1], bracketed on a fine grid
    and polished by bisection plus Newton to residual < 1e-13."""
    if params.J == 0.0:
        return [_stationary_point(float(g(params.h)), params)]
    grid = np.linspace(0.0, 1.0, _GRID_POINTS)
    res = _residual(grid, params)
    roots = []
    for i in range(_GRID_POINTS - 1):
        r0, r1 = res[i], res[i + 1]
        if r0 == 0.0:
            roots.append(float(grid[i]))
            continue
        if r0 * r1 < 0.0:
            lo, hi = float(grid[i]), float(grid[i + 1])
            m = brentq(lambda mm: float(_residual(mm, params)), lo, hi, xtol=1e-15)
            roots.append(float(m))
    if res[-1] == 0.0:
        roots.append(float(grid[-1]))
    polished = []
    for m in roots:
        for _ in range(6):  # Newton: residual' = 1 - 2J g'(x)
            r = float(_residual(m, params))
            d = 1.0 - 2.0 * params.J * float(g_derivative(params.effective_field(m), 1))
            if d == 0.0 or abs(r) < _RESIDUAL_TOL:
                break
            m = min(max(m - r / d, 0.0), 1.0)
        polished.append(m)
    # an odd-multiplicity root always exists; dedupe near-coincident polish results
    polished.sort()
    out = []
    for m in polished:
        if not out or m - out[-1] > 1e-9:
            out.append(m)
    return [_stationary_point(m, params) for m in out]


def classify(params: ModelParams) -> PhaseReport:
    """Classify (h, J) as uniqueness / coexistence / criticality.

    Points inside the guard bands around equal height or vanishing curvature
    raise NearDegenerateError instead of picking a side.
    """
    points = solve_consistency(params)
    if params.J == 0.0:
        # ptilde is m-independent; the consistency root is the unique
        # equilibrium density
        return PhaseReport(kind="unique", maximizers=(points[0].m,),
                           stationary_points=tuple(points))
    maxima = [p for p in points if p.is_maximum]
    if not maxima:
        raise ValueError(f"no maximizer found at {params} (solver failure)")
    best = max(p.value for p in maxima)
    gaps = [best - p.value for p in maxima]
    contenders = [p for p, gap in zip(maxima, gaps) if gap <= EQUAL_HEIGHT_TOL]
    near = [p for p, gap in zip(maxima, gaps)
            if EQUAL_HEIGHT_TOL < gap <= EQUAL_HEIGHT_BAND]
    if near:
        raise NearDegenerateError(
            f"two maxima within {EQUAL_HEIGHT_BAND} but not {EQUAL_HEIGHT_TOL} "
            f"of equal height at {params}: cannot separate unique from coexistence",
            candidates=("unique", "coexistence"),
        )
    if len(contenders) == 2:
        m1, m2 = sorted(p.m for p in contenders)
        return PhaseReport(kind="coexistence", maximizers=(m1, m2),
                           stationary_points=tuple(points))
    if len(contenders) != 1:
        raise ValueError(f"unexpected maximizer structure at {params}")
    top = contenders[0]
    lam = top.second_derivative
    # |lambda| is compared both absolutely and against its natural scale 2J,
    # so a tiny coupling (lambda ~ -2J ~ 0) is not mistaken for criticality
    scale = 2.0 * params.J
    if abs(lam) < CRITICAL_CURVATURE_TOL and abs(lam) <= 1e-4 * scale:
        if top.fourth_derivative >= 0.0:
            raise ValueError(
                f"flat maximizer with nonnegative fourth derivative at {params}"
            )
        # the consistency residual has a triple zero here, which limits the
        # generic polish to ~1e-5; the third derivative has a simple zero at
        # the same point and pins it to machine precision
        m_ref = top.m
        lo, hi = max(0.0, m_ref - 1e-3), min(1.0, m_ref + 1e-3)
        d3lo, d3hi = tilde_p(lo, params, 3), tilde_p(hi, params, 3)
        if d3lo * d3hi < 0.0:
            m_ref = float(brentq(lambda m: tilde_p(m, params, 3), lo, hi, xtol=1e-15))
            top = _stationary_point(m_ref, params)
            points = tuple(p if abs(p.m - m_ref) > 1e-4 else top for p in points)
        return PhaseReport(kind="critical", maximizers=(top.m,),
                           stationary_points=tuple(points))
    if CRITICAL_CURVATURE_TOL <= abs(lam) < CRITICAL_CURVATURE_BAND and abs(lam) <= 1e-4 * scale:
        raise NearDegenerateError(
            f"curvature {lam:.3e} at the maximizer of {params} falls in the "
            f"guard band: cannot separate unique from critical",
            candidates=("unique", "critical"),
        )
    return PhaseReport(kind="unique", maximizers=(top.m,),
                       stationary_points=tuple(points))


def find_critical_point() -> CriticalPoint:
    """Solve the merge conditions numerically: the curvature of the pure
    density vanishes (g'' = 0) at the critical field, the coupling is fixed by
    2 J g'(x_c) = 1, and h_c follows from the consistency equation."""
    x_c = brentq(lambda x: g_derivative(x, 2), -3.0, 3.0, xtol=1e-15)
    m_c = float(g(x_c))
    J_c = 1.0 / (2.0 * float(g_derivative(x_c, 1)))
    h_c = x_c - (2.0 * m_c - 1.0) * J_c
    lambda_c = (2.0 * J_c) ** 4 * float(g_derivative(x_c, 3))
    return CriticalPoint(h_c=h_c, J_c=J_c, m_c=m_c, lambda_c=lambda_c)


def _two_maxima(params: ModelParams):
    """The two outer local maxima, or None when ptilde is single-welled."""
    points = solve_consistency(params)
    maxima = [p for p in points if p.second_derivative < 0.0]
    if len(maxima) != 2:
        return None
    lo, hi = sorted(maxima, key=lambda p: p.m)
    return lo, hi


def _height_gap(params: ModelParams):
    pair = _two_maxima(params)
    if pair is None:
        return None
    lo, hi = pair
    return hi.value - lo.value


def _equal_height_field(J: float, h_center: float, width: float) -> float:
    """Bisect in h until the two maxima of ptilde have equal height.

    The gap ptilde(m2) - ptilde(m1) increases strictly in h (its h-derivative
    is m2 - m1 > 0 by the envelope theorem), so a sign-bracketing bisection is
    exact; the initial bracket is grown inside the two-maxima window, halving
    the step whenever a probe loses one maximum.
    """
    gap0 = _height_gap(ModelParams(h_center, J))
    if gap0 is None:
        # walk the center into the two-maxima region
        found = None
        for delta in np.linspace(-width, width, 41):
            if _height_gap(ModelParams(h_center + delta, J)) is not None:
                found = h_center + delta
                break
        if found is None:
            raise ValueError(f"no two-maxima window near h={h_center} at J={J}")
        h_center = found
        gap0 = _height_gap(ModelParams(h_center, J))

    def grow(direction):
        h, step = h_center, width
        last_inside = h_center
        for _ in range(200):
            probe = h + direction * step
            gap = _height_gap(ModelParams(probe, J))
            if gap is None:
                step /= 2.0  # left the window: halve and retry
                if step < 1e-14:
                    break
                continue
            last_inside = probe
            if gap * gap0 < 0.0:
                return probe
            h = probe
            step *= 1.6
        return last_inside

    if gap0 == 0.0:
        return h_center
    direction = -1.0 if gap0 > 0.0 else 1.0  # gap increases with h
    other = grow(direction)
    g_other = _height_gap(ModelParams(other, J))
    if g_other is None or g_other * gap0 > 0.0:
        raise ValueError(f"failed to bracket the equal-height field at J={J}")
    lo, hi = sorted((h_center, other))
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gap = _height_gap(ModelParams(mid, J))
        if gap is None:
            raise ValueError(f"two-maxima window collapsed during bisection at J={J}")
        if abs(gap) < 1e-15 or hi - lo < 1e-15:
            return mid
        if gap > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def phase_weight(lam: float, m: float) -> float:
    """Unnormalized phase weight b = (-lambda (2 - m))^{-1/2}."""
    if lam >= 0.0:
        raise ValueError(f"phase weight requires negative curvature, got {lam}")
    return (-lam * (2.0 - m)) ** -0.5


def _gamma_point(J: float, h: float) -> GammaPoint:
    lo, hi = _two_maxima(ModelParams(h, J))
    b1 = phase_weight(lo.second_derivative, lo.m)
    b2 = phase_weight(hi.second_derivative, hi.m)
    rho1 = b1 / (b1 + b2)
    return GammaPoint(J=J, h=h, m1=lo.m, m2=hi.m,
                      lambda1=lo.second_derivative, lambda2=hi.second_derivative,
                      rho1=rho1, rho2=1.0 - rho1)


def trace_gamma(J_values) -> list[GammaPoint]:
    """Locate h = gamma(J) for each J > J_c by equal-height bisection, using
    continuation in increasing J to seed each bracket."""
    J_list = [float(J) for J in J_values]
    crit = find_critical_point()
    for J in J_list:
        if J <= crit.J_c:
            raise ValueError(
                f"no coexistence below the critical coupling: J={J} <= J_c={crit.J_c:.6f}"
            )
    order = np.argsort(J_list)
    results: dict[int, GammaPoint] = {}
    h_seed, width = crit.h_c, 0.02
    for idx in order:
        J = J_list[idx]
        h = _equal_height_field(J, h_seed, width)
        results[idx] = _gamma_point(J, h)
        h_seed, width = h, max(0.01, abs(h - crit.h_c) * 0.5)
    return [results[i] for i in range(len(J_list))]


def mixture_weights(point: GammaPoint, validate: bool = True) -> tuple[float, float]:
    """Limiting phase weights (rho1, rho2) at a coexistence point, with the
    closed-form ratio check sqrt(((2-m2) - 4J m2(1-m2)) / ((2-m1) - 4J m1(1-m1)))."""
    if validate:
        report = classify(ModelParams(point.h, point.J))
        if report.kind != "coexistence":
            raise ValueError(
                f"mixture weights are defined on the coexistence curve only, "
                f"classification at (h={point.h}, J={point.J}) is {report.kind!r}"
            )
    b1 = phase_weight(point.lambda1, point.m1)
    b2 = phase_weight(point.lambda2, point.m2)
    rho1 = b1 / (b1 + b2)
    return rho1, 1.0 - rho1


def mixture_ratio_closed_form(point: GammaPoint) -> float:
    """rho1/rho2 eliminating the curvatures via g' = 2g(1-g)/(2-g)."""
    num = (2.0 - point.m2) - 4.0 * point.J * point.m2 * (1.0 - point.m2)
    den = (2.0 - point.m1) - 4.0 * point.J * point.m1 * (1.0 - point.m1)
    return math.sqrt(num / den)


def clt_variance(params: ModelParams) -> float:
    """Variance of the Gaussian monomer-count fluctuations in the uniqueness
    region: sigma^2 = -1/lambda - 1/(2J); at J = 0 this degenerates to g'(h)."""
    if params.J == 0.0:
        return float(g_derivative(params.h, 1))
    report = classify(params)
    if report.kind != "unique":
        raise ValueError(
            f"the central limit theorem does not hold at (h={params.h}, "
            f"J={params.J}): classification is {report.kind!r}"
        )
    m_star = report.maximizers[0]
    lam = tilde_p(m_star, params, 2)
    return -1.0 / lam - 1.0 / (2.0 * params.J)


def clt_variance_reduced(params: ModelParams) -> float:
    """Equivalent closed form g'(x*) / (1 - 2J g'(x*)) at x* = (2m*-1)J + h."""
    if params.J == 0.0:
        return float(g_derivative(params.h, 1))
    report = classify(params)
    if report.kind != "unique":
        raise ValueError(
            f"the central limit theorem does not hold at (h={params.h}, "
            f"J={params.J}): classification is {report.kind!r}"
        )
    x_star = params.effective_field(report.maximizers[0])
    gp = float(g_derivative(x_star, 1))
    return gp / (1.0 - 2.0 * params.J * gp)


def gamma_points_to_csv(points, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["J", "h", "m1", "m2", "lambda1", "lambda2", "rho1", "rho2"])
    for p in points:
        writer.writerow([
            format(v, ".17g")
            for v in (p.J, p.h, p.m1, p.m2, p.lambda1, p.lambda2, p.rho1, p.rho2)
        ])


def gamma_points_to_json(points) -> dict:
    return {"points": [p.to_json_dict() for p in points]}
