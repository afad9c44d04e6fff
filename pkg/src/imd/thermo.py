"""Closed-form thermodynamics of the mean-field imitative monomer-dimer model.

The pure hard-core model (no imitation) has limiting pressure

    p0(h) = -(1 - g(h))/2 - log(1 - g(h))/2,

where g(h), the limiting monomer density, is the root in (0, 1) of

    g^2 + e^{2h} g - e^{2h} = 0,   i.e.   g(h) = e^h (sqrt(e^{2h} + 4) - e^h) / 2.

Switching on an imitative coupling J >= 0 replaces the pressure by the
variational problem

    p(h, J) = sup_{m in [0,1]}  ptilde(m),
    ptilde(m) = -J m^2 + p0((2m - 1) J + h),

whose maximizers solve the consistency equation m = g((2m-1)J + h).  The
same limit is reproduced by the large-deviation route

    p(h, J) = sup_m [ (h - J) m + J m^2 - rate_function(m) ],

with the entropy-like rate of the weighted configuration counts.  Everything
here is a pure function of (h, J, m); no state, safe to call from anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

__all__ = [
    "ModelParams",
    "g",
    "g_derivative",
    "p0",
    "p0_second_form",
    "log_one_minus_g",
    "tilde_p",
    "rate_function",
    "printed_rate_offset",
    "variational_pressure",
    "variational_pressure_via_rate",
]


@dataclass(frozen=True)
class ModelParams:
    """External field h and imitative coupling J >= 0."""

    h: float
    J: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.h) and math.isfinite(self.J)):
            raise ValueError(f"parameters must be finite, got h={self.h}, J={self.J}")
        if self.J < 0:
            raise ValueError(f"coupling J must be nonnegative, got J={self.J}")

    def effective_field(self, m):
        """Field seen by the pure model at monomer density m: (2m-1)J + h."""
        return (2.0 * np.asarray(m) - 1.0) * self.J + self.h


def _as_float_array(x, name):
    a = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    return a


def _scalar_like(x, val):
    return float(val) if np.isscalar(x) or np.ndim(x) == 0 else val


# below this field e^{-2h} overflows and the rationalized form degenerates
_G_BRANCH = -350.0


def g(h):
    """Limiting monomer density of the pure hard-core model, in (0, 1).

    The textbook difference sqrt(e^{2h}+4) - e^h cancels catastrophically for
    large h, so the rationalized form 2 / (1 + sqrt(1 + 4 e^{-2h})) is used
    on the whole representable range; a single formula also keeps the float
    evaluation monotone across h = 0, which a branch switch there breaks at
    the last ulp.  Only below h = -350, where e^{-2h} overflows, does the
    evaluation fall back to the printed difference (= e^h there).
    """
    a = _as_float_array(h, "h")
    with np.errstate(over="ignore"):
        eh = np.exp(a)
        rat = 2.0 / (1.0 + np.sqrt(1.0 + 4.0 * np.exp(-2.0 * np.maximum(a, _G_BRANCH))))
        deep = eh * (np.sqrt(eh * eh + 4.0) - eh) / 2.0
    return _scalar_like(h, np.where(a > _G_BRANCH, rat, deep))


def log_one_minus_g(h):
    """log(1 - g(h)), stable in the monomer-saturated tail.

    From the quadratic for g, 1 - g = 4 e^{-2h} / (1 + sqrt(1 + 4 e^{-2h}))^2,
    so the log never sees an underflowing difference.
    """
    a = _as_float_array(h, "h")
    apos = np.maximum(a, 0.0)
    root = np.sqrt(1.0 + 4.0 * np.exp(-2.0 * apos))
    pos = math.log(4.0) - 2.0 * apos - 2.0 * np.log1p(root)
    neg = np.log1p(-np.asarray(g(np.minimum(a, 0.0))))
    return _scalar_like(h, np.where(a > 0, pos, neg))


def g_derivative(h, k=1):
    """k-th derivative of g, k in {1, 2, 3}, from the closed chain-rule forms.

    g' = 2g(1-g)/(2-g) =: G(g); then g'' = G'(g) g' and
    g''' = G''(g) g'^2 + G'(g) g'' with
    G'(g) = 2 (g^2 - 4g + 2)/(2-g)^2 and G''(g) = -8/(2-g)^3.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {k}")
    val = g(h)
    gg = np.asarray(val, dtype=np.float64)
    d1 = 2.0 * gg * (1.0 - gg) / (2.0 - gg)
    if k == 1:
        return _scalar_like(h, d1)
    G1 = 2.0 * (gg * gg - 4.0 * gg + 2.0) / (2.0 - gg) ** 2
    d2 = G1 * d1
    if k == 2:
        return _scalar_like(h, d2)
    G2 = -8.0 / (2.0 - gg) ** 3
    d3 = G2 * d1 * d1 + G1 * d2
    return _scalar_like(h, d3)


def p0(h):
    """Limiting pressure of the pure hard-core model: -(1-g)/2 - log(1-g)/2."""
    a = _as_float_array(h, "h")
    lg = np.asarray(log_one_minus_g(a))
    val = -np.exp(lg) / 2.0 - 0.5 * lg
    return _scalar_like(h, val)


def p0_second_form(h):
    """Equivalent printed form -(1-g)/2 - log(g) + h (the g-quadratic forces
    log(1-g) = 2 log g - 2h, so this must agree with p0 to roundoff)."""
    a = _as_float_array(h, "h")
    gg = np.asarray(g(a), dtype=np.float64)
    val = -(1.0 - gg) / 2.0 - np.log(gg) + a
    return _scalar_like(h, val)


def tilde_p(m, params: ModelParams, order: int = 0):
    """Variational pressure curve ptilde(m) = -J m^2 + p0((2m-1)J + h), or its
    m-derivative of the given order (0..4).

    Orders 1..4 use the chain rule through the pure-model field x = (2m-1)J+h:
    ptilde'  = 2J (g(x) - m),        ptilde'' = -2J + (2J)^2 g'(x),
    ptilde''' = (2J)^3 g''(x),       ptilde'''' = (2J)^4 g'''(x).
    """
    mm = _as_float_array(m, "m")
    if np.any((mm < 0.0) | (mm > 1.0)):
        raise ValueError(f"density m must lie in [0, 1], got {m}")
    x = params.effective_field(mm)
    J = params.J
    if order == 0:
        val = -J * mm * mm + p0(x)
    elif order == 1:
        val = 2.0 * J * (np.asarray(g(x)) - mm)
    elif order == 2:
        val = -2.0 * J + (2.0 * J) ** 2 * np.asarray(g_derivative(x, 1))
    elif order == 3:
        val = (2.0 * J) ** 3 * np.asarray(g_derivative(x, 2))
    elif order == 4:
        val = (2.0 * J) ** 4 * np.asarray(g_derivative(x, 3))
    else:
        raise ValueError(f"derivative order must be in 0..4, got {order}")
    return _scalar_like(m, val)


def rate_function(z):
    """Entropy-like rate of the weighted dimer-configuration counts:

        I(z) = z log z + ((1-z)/2) log(1-z) + (1-z)/2,

    with z log z := 0 at z = 0.  Convex on [0, 1]; minimized at z = g(0)
    with minimum value -p0(0), so that sup_z (h z - I(z)) = p0(h).
    No additive constant is included; see printed_rate_offset().
    """
    zz = _as_float_array(z, "z")
    if np.any((zz < 0.0) | (zz > 1.0)):
        raise ValueError(f"density z must lie in [0, 1], got {z}")
    with np.errstate(divide="ignore", invalid="ignore"):
        zlogz = np.where(zz > 0.0, zz * np.log(np.maximum(zz, 1e-300)), 0.0)
        w = 1.0 - zz
        wlogw = np.where(w > 0.0, w * np.log(np.maximum(w, 1e-300)), 0.0)
    return _scalar_like(z, zlogz + 0.5 * wlogw + w / 2.0)


def printed_rate_offset():
    """The additive constant -p0(0) that some conventions attach to the rate
    function.  Kept separate: with the constant included, the supremum
    sup_m(f(m) - I(m)) no longer reproduces the J=0 pressure."""
    return -p0(0.0)


def _refine_local_maxima(fun, grid_vals, grid):
    """Brent-polish every local maximum of fun sampled on grid, including
    maximizers hiding between the last grid cell and the domain boundary."""
    v = grid_vals
    n = len(grid)
    brackets = [
        (grid[i - 1], grid[i + 1])
        for i in range(1, n - 1)
        if v[i] >= v[i - 1] and v[i] >= v[i + 1]
    ]
    if v[0] >= v[1]:
        brackets.append((grid[0], grid[1]))
    if v[-1] >= v[-2]:
        brackets.append((grid[-2], grid[-1]))
    candidates = [v[0], v[-1]]
    for lo, hi in brackets:
        res = minimize_scalar(
            lambda m: -fun(m), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-13},
        )
        candidates.append(-res.fun)
    return max(candidates)


def variational_pressure(params: ModelParams) -> float:
    """Limiting pressure sup_m ptilde(m).

    The maximizer is located through the stationarity condition: ptilde' is
    proportional to g((2m-1)J + h) - m, whose sign changes are bracketed on a
    fine grid and polished by brentq.  (The companion routine
    variational_pressure_via_rate maximizes a different functional with a
    derivative-free method, so the two suprema are independently computed.)
    """
    if params.J == 0.0:
        return p0(params.h)
    grid = np.linspace(0.0, 1.0, 1001)
    residual = np.asarray(g(params.effective_field(grid))) - grid
    candidates = [tilde_p(0.0, params), tilde_p(1.0, params)]
    for i in range(len(grid) - 1):
        if residual[i] == 0.0:
            candidates.append(tilde_p(float(grid[i]), params))
        elif residual[i] * residual[i + 1] < 0.0:
            m = brentq(
                lambda mm: float(np.asarray(g(params.effective_field(mm))) - mm),
                float(grid[i]), float(grid[i + 1]), xtol=1e-15,
            )
            candidates.append(tilde_p(float(m), params))
    return float(max(candidates))


def variational_pressure_via_rate(params: ModelParams) -> float:
    """Same limit by the large-deviation route sup_m (f(m) - I(m)) with
    f(m) = (h - J) m + J m^2; an independent cross-check of the sup."""
    h, J = params.h, params.J

    def objective(m):
        return (h - J) * m + J * m * m - rate_function(m)

    grid = np.linspace(0.0, 1.0, 1001)
    vals = np.asarray(objective(grid))
    return float(_refine_local_maxima(objective, vals, grid))
