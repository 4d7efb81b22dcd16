"""Closed-form boundary densities and the Laplace-type kernels built on them.

The density rho is minus 1/pi times the boundary imaginary part of
G(z) = z*H(z); g2 is the boundary limit of |G|^2; varrho_paper is the
second density exactly as displayed in the source theorem.  The two reads
of the density for 1/(z^2 H(z)) differ by a factor t^2:

    candidate A = rho / varrho_paper = t*rho/g2,
    candidate B = rho / (t*g2)       = rho/varrho_paper / t^2.

Only candidate B matches the eps -> 0 oracle for Im 1/(z^2 H) and only B
gives a convergent Stieltjes integral, so B ships as `sigma`; the
selection procedure and a machine-readable discrepancy report are kept.

Every branch formula is written in a cancellation-free form (log1p based)
and each density also exists in log-space, f(e^u) or t*f(t) at t = e^u,
valid for every float u.  The slow 1/ln decay of the densities makes that
mandatory: the Stieltjes tails carry ~1/ln(T) of mass, so quadrature has
to reach far beyond the double-precision range of t itself.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import quadrature as quadmod
from .core import BoundaryComponent, boundary_limit
from .quadrature import (
    IntegrandSpec,
    Kernel,
    NonConvergenceError,
    TailHint,
    integrate_semi_infinite,
)

__all__ = [
    "BREAKPOINTS",
    "rho",
    "rho_logspace",
    "g2",
    "g2_logspace",
    "varrho_paper",
    "sigma",
    "sigma_weighted_logspace",
    "SigmaSelection",
    "select_sigma_candidate",
    "sigma_discrepancy_report",
    "PiecewiseDensity",
    "rho_density",
    "sigma_density",
    "levy_density_z2H",
    "levy_density_invzH",
    "LevyDensity",
    "h_rep_kernel",
    "density_table",
    "write_density_csv",
]

PI2 = math.pi ** 2
BREAK2 = 1.0 + math.sqrt(2.0)
BREAKPOINTS = (1.0, BREAK2)
_SNAP = 1e-12          # within this of a breakpoint, snap to its branch
_DEEP = 690.0          # |ln t| beyond which the asymptotic log forms apply


def _validate(t: np.ndarray) -> None:
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0):
        raise ValueError("density argument must be a positive real")


def _branch_masks(t: np.ndarray):
    at1 = np.abs(t - 1.0) < _SNAP
    right = (t >= BREAK2 - _SNAP) & ~at1
    mid = (t > 1.0) & ~at1 & ~right
    left = (t < 1.0) & ~at1
    return left, at1, mid, right


def _as_positive_array(t):
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    _validate(arr)
    return arr, scalar


def _L_right(x: np.ndarray) -> np.ndarray:
    """ln((1+x^2)/(x-1)) without overflow in x^2."""
    big = x > 1e150
    out = np.empty_like(x)
    out[big] = 2.0 * np.log(x[big])
    out[~big] = np.log1p(x[~big] * x[~big])
    return out - np.log(x - 1.0)


def rho(t):
    """Boundary density of G: -(1/pi) * lim Im G(-t + i*eps).

    Branches split at 1 (value 0, continuous) and 1+sqrt(2) (finite jump).
    """
    arr, scalar = _as_positive_array(t)
    out = np.empty_like(arr)
    left, at1, mid, right = _branch_masks(arr)
    out[at1] = 0.0
    if np.any(left):
        x = arr[left]
        out[left] = x / (np.log1p(x * x) - np.log1p(-x))
    if np.any(mid):
        x = arr[mid]
        L = np.log1p(x * x) - np.log(x - 1.0)
        out[mid] = x * (np.log(x * (1.0 + x * x)) - np.log(x - 1.0)) / (L * L + PI2)
    if np.any(right):
        x = arr[right]
        L = _L_right(x)
        # (1+x)/(x(x-1)) written overflow-free as (1+1/x)/(x-1)
        out[right] = x * np.log1p((1.0 + 1.0 / x) / (x - 1.0)) / (L * L + PI2)
    return float(out[0]) if scalar else out


def rho_logspace(u):
    """rho(e^u) for any float u; asymptotic branches beyond the double range."""
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    lo = arr < -_DEEP
    hi = arr > _DEEP
    mid = ~(lo | hi)
    out[lo] = 1.0                      # rho(0+) = 1, correction O(e^u)
    out[hi] = 1.0 / (arr[hi] ** 2 + PI2)
    if np.any(mid):
        out[mid] = rho(np.exp(arr[mid]))
    return float(out[0]) if scalar else out


def g2(t):
    """Boundary limit of |G(-t + i*eps)|^2 as eps -> 0+; g2(1) = 1."""
    arr, scalar = _as_positive_array(t)
    out = np.empty_like(arr)
    left, at1, mid, right = _branch_masks(arr)
    out[at1] = 1.0
    if np.any(left):
        x = arr[left]
        B = np.log1p(x * x) - np.log1p(-x)
        A = B - np.log(x)
        out[left] = (x / B) ** 2 * (A * A + PI2)
    if np.any(mid):
        x = arr[mid]
        L = np.log1p(x * x) - np.log(x - 1.0)
        L2 = L - np.log(x)
        L3 = L + np.log(x)
        D = L * L + PI2
        out[mid] = x * x * ((L * L2 + 2.0 * PI2) ** 2 + PI2 * L3 * L3) / (D * D)
    if np.any(right):
        x = arr[right]
        L = _L_right(x)
        num = x * np.log1p((1.0 + 1.0 / x) / (x - 1.0))
        out[right] = num * num / (L * L + PI2)
    return float(out[0]) if scalar else out


def g2_logspace(u):
    """g2(e^u) for any float u, stable at both ends."""
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    lo = arr < -_DEEP
    hi = arr > _DEEP
    mid = ~(lo | hi)
    out[lo] = arr[lo] ** 2 + PI2       # (t/B)^2 -> 1, A -> -ln t
    out[hi] = 1.0 / (arr[hi] ** 2 + PI2)
    if np.any(mid):
        out[mid] = g2(np.exp(arr[mid]))
    return float(out[0]) if scalar else out


def varrho_paper(t):
    """The second displayed density, verbatim branch formulas; equals g2(t)/t."""
    arr, scalar = _as_positive_array(t)
    out = np.empty_like(arr)
    left, at1, mid, right = _branch_masks(arr)
    out[at1] = 1.0
    if np.any(left):
        x = arr[left]
        B = np.log1p(x * x) - np.log1p(-x)
        A = B - np.log(x)
        with np.errstate(over="ignore"):           # varrho(0+) = +oo
            out[left] = (x / B) * (A * A + PI2) / B
    if np.any(mid):
        x = arr[mid]
        L = np.log1p(x * x) - np.log(x - 1.0)
        L2 = L - np.log(x)
        L3 = L + np.log(x)
        D = L * L + PI2
        out[mid] = x * ((L * L2 + 2.0 * PI2) ** 2 + (math.pi * L3) ** 2) / (D * D)
    if np.any(right):
        x = arr[right]
        L = _L_right(x)
        L2 = np.log1p((1.0 + 1.0 / x) / (x - 1.0))
        out[right] = x * L2 * L2 / (L * L + PI2)
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# sigma: oracle-selected density of the Stieltjes representation of 1/(z^2 H)


def _sigma_candidate_A(t):
    return rho(t) / varrho_paper(t)


def _sigma_candidate_B(t):
    arr, scalar = _as_positive_array(t)
    out = rho(arr) / (arr * g2(arr))
    return float(out[0]) if scalar else out


_CANDIDATES = {"A": _sigma_candidate_A, "B": _sigma_candidate_B}
_SELECTED_CANDIDATE = "B"   # confirmed by select_sigma_candidate()


def sigma(t, candidate: str | None = None):
    """Density of the Stieltjes representation of 1/(z^2 H(z)).

    The shipped selection is candidate B = rho/(t*g2); pass candidate="A"
    to evaluate the rejected read rho/varrho_paper.
    """
    fn = _CANDIDATES[candidate or _SELECTED_CANDIDATE]
    return fn(t)


def sigma_weighted_logspace(u):
    """t*sigma(t) = rho/g2 at t = e^u, for any float u."""
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    lo = arr < -_DEEP
    hi = arr > _DEEP
    mid = ~(lo | hi)
    out[lo] = 1.0 / (arr[lo] ** 2 + PI2)
    out[hi] = 1.0       # t*sigma -> 1
    if np.any(mid):
        x = np.exp(arr[mid])
        out[mid] = rho(x) / g2(x)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class SigmaSelection:
    selected: str
    decisive: bool
    grid: np.ndarray
    oracle: np.ndarray
    dev_A: float
    dev_B: float
    tol: float


def _calibration_grid(n: int = 40) -> np.ndarray:
    grid = np.geomspace(1e-3, 1e3, n)
    for b in BREAKPOINTS:
        close = np.abs(grid - b) < 1e-9
        grid[close] = b + 1e-9
    return grid


def select_sigma_candidate(grid: Sequence[float] | None = None,
                           tol: float = 1e-6) -> SigmaSelection:
    """Pick the candidate matching the eps->0 oracle for Im 1/(z^2 H).

    The oracle value at t is -(1/pi) * lim Im 1/((-t+i*eps)^2 H(-t+i*eps));
    the candidate within `tol` everywhere is selected.  Exactly one must
    match for the selection to be decisive.
    """
    g = np.asarray(grid if grid is not None else _calibration_grid(), dtype=float)
    oracle = np.array([
        -boundary_limit(t, BoundaryComponent.IM_INV_Z2H).value / math.pi for t in g
    ])
    devA = float(np.max(np.abs(_sigma_candidate_A(g) - oracle)))
    devB = float(np.max(np.abs(_sigma_candidate_B(g) - oracle)))
    okA, okB = devA <= tol, devB <= tol
    selected = "A" if okA and not okB else "B"
    return SigmaSelection(selected=selected, decisive=(okA != okB), grid=g,
                          oracle=oracle, dev_A=devA, dev_B=devB, tol=tol)


def sigma_discrepancy_report(selection: SigmaSelection | None = None) -> dict:
    """Machine-readable record of the candidate selection."""
    sel = selection if selection is not None else select_sigma_candidate()
    return {
        "selected": sel.selected,
        "decisive": bool(sel.decisive),
        "tol": sel.tol,
        "max_abs_dev_candidate_A": sel.dev_A,
        "max_abs_dev_candidate_B": sel.dev_B,
        "factor_between_candidates": "t^2",
        "calibration_grid": [float(t) for t in sel.grid],
    }


# --------------------------------------------------------------------------
# piecewise-density metadata objects


@dataclass(frozen=True)
class PiecewiseDensity:
    """A closed-form density on (0, oo) with branch and tail metadata."""

    name: str
    fn: Callable
    branch_bounds: tuple = BREAKPOINTS
    limits: dict = field(default_factory=dict)     # breakpoint -> (left, right)
    tail: TailHint = TailHint.LOG_SLOW
    tail_exponents: tuple = (0.0, 0.0)             # leading order at 0+, oo
    log_plain: Callable | None = None              # f(e^u)
    log_weighted: Callable | None = None           # t*f(t) at t = e^u

    def __call__(self, t):
        return self.fn(t)

    def one_sided_limits(self, b: float, step: float = 1e-9):
        return self.fn(b - step), self.fn(b + step)


def _rho_log_plain(u):
    return rho_logspace(u)


def _rho_log_weighted(u):
    arr = np.asarray(u, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        w = np.exp(arr) * rho_logspace(arr)
    return w


def _sigma_log_plain(u):
    arr = np.asarray(u, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(-arr) * sigma_weighted_logspace(arr)


rho_density = PiecewiseDensity(
    name="rho", fn=rho,
    limits={1.0: (0.0, 0.0), BREAK2: (rho(BREAK2 - 1e-12), rho(BREAK2))},
    tail=TailHint.LOG_SLOW, tail_exponents=(0.0, 0.0),
    log_plain=_rho_log_plain, log_weighted=_rho_log_weighted,
)

sigma_density = PiecewiseDensity(
    name="sigma", fn=sigma,
    limits={1.0: (0.0, 0.0),
            BREAK2: (sigma(BREAK2 - 1e-12), sigma(BREAK2))},
    tail=TailHint.LOG_SLOW, tail_exponents=(-1.0, -1.0),
    log_plain=_sigma_log_plain, log_weighted=sigma_weighted_logspace,
)


# --------------------------------------------------------------------------
# Laplace-type kernels


class LevyDensity:
    """m(t) = int_0^inf d(u) e^{-tu} du with d(u) = u^(power-1) * dbar(u).

    For the z^2*H density d(u) = u*rho(u) (power 2, dbar = rho); for the
    1/(zH) density d(u) = u*sigma(u) (power 1, dbar = u*sigma, bounded).
    `scaled(tau)` returns t^power * m(t) at t = e^tau through the
    substitution x = t*u, accurate for every float tau; the representation
    integrals use it wherever t leaves the double range.  Derivatives come
    from differentiating under the integral sign, never from differencing.
    """

    def __init__(self, name, scaled_base_log, power, breakpoints=BREAKPOINTS):
        self.name = name
        self._dbar_log = scaled_base_log   # dbar(e^v), bounded for all v
        self.power = power
        self.breakpoints = breakpoints

    def _moment(self, t: float, k: int, tol: float) -> float:
        """int u^k d(u) e^{-tu} du = int u^(k+power-1) dbar(u) e^{-tu} du."""
        q = k + self.power - 1

        def f(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(over="ignore", under="ignore", divide="ignore"):
                return u ** q * self._dbar_log(np.log(u)) * np.exp(-t * u)

        # e^{-tu} suppresses the remainder beyond u_max by e^{-60} at least
        u_max = (60.0 + 8.0 * q) / t
        spec = IntegrandSpec(density=f, kernel=Kernel.raw(),
                             breakpoints=self.breakpoints,
                             tail=TailHint.EXPONENTIAL, t_max=u_max,
                             probe_zero=False)      # integrable at 0 by form
        res = integrate_semi_infinite(spec, tol)
        if not res.converged:
            raise NonConvergenceError(f"{self.name} moment {k} at t={t}")
        return float(np.real(res.value))

    def __call__(self, t: float, tol: float = 1e-8) -> float:
        if not (t > 0):
            raise ValueError("t must be positive")
        return self._moment(t, 0, tol)

    def derivative(self, t: float, k: int, tol: float = 1e-8) -> float:
        """m^{(k)}(t) by differentiating under the integral."""
        return (-1.0) ** k * self._moment(t, k, tol)

    def jet(self, t: float, order: int, tol: float = 1e-9) -> np.ndarray:
        """Taylor coefficients c_k = m^{(k)}(t)/k! for k = 0..order."""
        return np.array([self.derivative(t, k, tol) / math.factorial(k)
                         for k in range(order + 1)])

    def scaled(self, tau: float, tol: float = 1e-9) -> float:
        """t^power * m(t) at t = e^tau: int x^(power-1) dbar(x e^-tau) e^-x dx."""
        q = self.power - 1

        def f(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(over="ignore", under="ignore", divide="ignore"):
                return x ** q * self._dbar_log(np.log(x) - tau) * np.exp(-x)

        res = quadmod.integrate_panel(f, 0.0, 60.0 + 8.0 * q, tol,
                                      breakpoints=_scaled_breaks(tau))
        return float(np.real(res.value))


def _scaled_breaks(tau):
    # images of the density breakpoints under x = t*u
    pts = []
    if abs(tau) < 700.0:
        for b in BREAKPOINTS:
            x = b * math.exp(tau)
            if 1e-9 < x < 60.0:
                pts.append(x)
    return tuple(sorted(pts))


levy_density_z2H_obj = LevyDensity("levy_density_z2H", rho_logspace, power=2)
levy_density_invzH_obj = LevyDensity("levy_density_invzH",
                                     sigma_weighted_logspace, power=1)


def levy_density_z2H(t: float, tol: float = 1e-8) -> float:
    """int_0^inf u*rho(u) e^{-tu} du."""
    return levy_density_z2H_obj(t, tol)


def levy_density_invzH(t: float, tol: float = 1e-8) -> float:
    """int_0^inf u*sigma(u) e^{-tu} du with the oracle-selected sigma."""
    return levy_density_invzH_obj(t, tol)


def h_rep_kernel(t: float, tol: float = 1e-8) -> float:
    """k(t) = int_0^inf (rho(u)/u) (1 - e^{-tu}) du.

    Bounded near u = 0 (the kernel supplies a factor t*u) and log-slow at
    the far end, where the integrand tends to rho(u)/u ~ 1/(u ln^2 u).
    """
    if not (t > 0):
        raise ValueError("t must be positive")

    def f(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            return rho(u) / u * (-np.expm1(-t * u))

    def wlog(v):
        # u * integrand = rho(u) * (1 - e^{-tu}) at u = e^v
        v = np.asarray(v, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            kern = -np.expm1(-t * np.exp(v))
            kern[v > 700.0] = 1.0
        return rho_logspace(v) * kern

    def plog(v):
        v = np.asarray(v, dtype=float)
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            return np.exp(-v) * wlog(v)

    # the kernel factor ramps up to u ~ 1/t before the log-slow decay sets
    # in; the integrand is integrable by construction, so the tail probe
    # (which would mistake the ramp for divergence at small t) is off
    spec = IntegrandSpec(density=f, kernel=Kernel.raw(),
                         breakpoints=BREAKPOINTS, tail=TailHint.LOG_SLOW,
                         log_weighted=wlog, log_plain=plog,
                         probe_zero=False, probe_tail=False)
    res = integrate_semi_infinite(spec, tol)
    if not res.converged:
        raise NonConvergenceError(f"h_rep_kernel at t={t}")
    return float(np.real(res.value))


# --------------------------------------------------------------------------
# tabulation export


def _fmt(x: float) -> str:
    """Shortest round-trip decimal, 17 significant digits max."""
    r = repr(float(x))
    if r.endswith(".0"):
        r = r[:-2]
    return r


def density_table(grid: Sequence[float]) -> str:
    """CSV text with header t,rho,varrho_paper,g2,sigma in that order."""
    g = np.asarray(grid, dtype=float)
    _validate(g)
    buf = io.StringIO()
    buf.write("t,rho,varrho_paper,g2,sigma\n")
    r, vp, gg, s = rho(g), varrho_paper(g), g2(g), sigma(g)
    for i in range(len(g)):
        buf.write(",".join(_fmt(v) for v in (g[i], r[i], vp[i], gg[i], s[i])))
        buf.write("\n")
    return buf.getvalue()


def write_density_csv(path, grid: Sequence[float]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(density_table(grid))
