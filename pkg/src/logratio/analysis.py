"""Derivative-based property checkers: complete monotonicity and friends.

Derivatives up to order 12 come from truncated Taylor arithmetic (jets)
seeded with the closed forms, never from finite differencing.  Jets are
carried in the scaled local variable u = (x - x0)/x0, which keeps the
coefficients of the log-ratio family O(|f|) at every positive center, so
coefficient blow-up relative to c0 genuinely signals cancellation (the
division by the inner logarithm loses one digit per order as the center
approaches 1; within 1e-3 of 1 the jet is re-expanded from the series at
1 instead).

The checkers instantiate the classical definitions directly: the
alternating-sign pattern of derivatives (complete monotonicity, with a
normalized tolerance), the same pattern for (ln f)^(k) (logarithmic CM),
f >= 0 with f' completely monotone (Bernstein), the half-plane sign
criterion Im z * Im f(z) <= 0 (Stieltjes), and the first-derivative bound
-x f'(x)/f(x) that caps the completely monotonic degree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    FunctionId,
    eval_G,
    eval_inv_z2H,
    gated_upper_halfplane_grid,
    h_series_coefficients,
    scalar_function,
)

__all__ = [
    "TaylorJet",
    "PropertyReport",
    "taylor_jet",
    "jet_provider",
    "power_scaled",
    "check_cm",
    "check_lcm",
    "check_bernstein",
    "degree_ratio",
    "degree_ratio_closed_form_H",
    "estimate_cm_degree",
    "DegreeEstimate",
    "check_stieltjes_geometric",
    "check_closure_identities",
    "default_grid",
]

JET_ORDER_CAP = 12
_SERIES_SWITCH = 1e-3        # recentre from the series at 1 inside this
_LOSS_FACTOR = 1e12          # scaled-coefficient growth that flags loss


def default_grid(n: int = 50, lo: float = 1e-2, hi: float = 1e2) -> np.ndarray:
    return np.geomspace(lo, hi, n)


# --------------------------------------------------------------------------
# jet arithmetic in the scaled variable


class _Jet:
    """Truncated Taylor series sum a_k u^k, u the scaled offset."""

    __slots__ = ("a",)

    def __init__(self, a):
        self.a = np.asarray(a, dtype=float)

    @classmethod
    def const(cls, c, n):
        a = np.zeros(n + 1)
        a[0] = c
        return cls(a)

    @property
    def order(self):
        return len(self.a) - 1

    def __add__(self, other):
        if isinstance(other, _Jet):
            return _Jet(self.a + other.a)
        a = self.a.copy()
        a[0] += other
        return _Jet(a)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, _Jet) else -other)

    def __rsub__(self, other):
        return (self * -1.0) + other

    def __mul__(self, other):
        if isinstance(other, _Jet):
            n = self.order
            return _Jet(np.convolve(self.a, other.a)[: n + 1])
        return _Jet(self.a * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, _Jet):
            return _Jet(self.a / other)
        n = self.order
        if other.a[0] == 0.0:
            raise ZeroDivisionError("jet division by zero constant term")
        q = np.zeros(n + 1)
        for k in range(n + 1):
            acc = self.a[k] - np.dot(q[:k], other.a[k:0:-1]) if k else self.a[0]
            q[k] = acc / other.a[0]
        return _Jet(q)

    def __rtruediv__(self, other):
        return _Jet.const(other, self.order) / self

    def log(self):
        """Series logarithm; requires a positive constant term."""
        if self.a[0] <= 0.0:
            raise ValueError("jet log needs a positive constant term")
        n = self.order
        out = np.zeros(n + 1)
        out[0] = math.log(self.a[0])
        for k in range(1, n + 1):
            acc = k * self.a[k]
            for j in range(1, k):
                acc -= j * out[j] * self.a[k - j]
            out[k] = acc / (k * self.a[0])
        return _Jet(out)


def _h_jet_scaled(x0: float, order: int) -> _Jet:
    """Jet of h at x0 > 0 in the scaled variable u = (x-x0)/x0."""
    n = order
    if abs(x0 - 1.0) < _SERIES_SWITCH:
        # recentre the series at 1: h(x0(1+u)) = sum q_m (x0-1 + x0 u)^m
        q = h_series_coefficients(n + 16)
        shift = _Jet(np.concatenate([[x0 - 1.0, x0], np.zeros(max(n - 1, 0))]))
        total = _Jet.const(0.0, n)
        power = _Jet.const(1.0, n)
        for m in range(len(q)):
            total = total + power * q[m]
            power = power * shift
        return total
    # ln z = ln x0 + ln(1+u)
    k = np.arange(1, n + 1)
    lnz = _Jet(np.concatenate([[math.log(x0)], (-1.0) ** (k - 1) / k]))
    # (1+z^2)/(1+z) with z = x0(1+u)
    num = _Jet.const(0.0, n)
    num.a[0] = 1.0 + x0 * x0
    if n >= 1:
        num.a[1] = 2.0 * x0 * x0
    if n >= 2:
        num.a[2] = x0 * x0
    den = _Jet.const(0.0, n)
    den.a[0] = 1.0 + x0
    if n >= 1:
        den.a[1] = x0
    D = (num / den).log()
    return lnz / D


def _variable_jet(x0: float, order: int) -> _Jet:
    a = np.zeros(order + 1)
    a[0] = x0
    if order >= 1:
        a[1] = x0
    return _Jet(a)


def _fn_jet_scaled(fn: FunctionId, x0: float, order: int) -> _Jet:
    fn = FunctionId(fn)
    H = _h_jet_scaled(x0, order) - 1.0
    if fn is FunctionId.h:
        return H + 1.0
    if fn is FunctionId.H:
        return H
    x = _variable_jet(x0, order)
    if fn in (FunctionId.G, FunctionId.XH):
        return x * H
    if fn is FunctionId.X2H:
        return x * x * H
    if fn is FunctionId.INV_H:
        return 1.0 / H
    if fn is FunctionId.INV_XH:
        return 1.0 / (x * H)
    return 1.0 / (x * x * H)        # INV_Z2H / INV_X2H


@dataclass
class TaylorJet:
    """Taylor data of a function at a positive center.

    coefficients[k] = f^(k)(center)/k!; `scaled` holds f^(k) x0^k / k!,
    whose growth relative to scaled[0] is the loss-of-significance flag.
    """

    center: float
    coefficients: np.ndarray
    scaled: np.ndarray

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self, k: int) -> float:
        return self.coefficients[k] * math.factorial(k)

    def usable_order(self, loss_factor: float = _LOSS_FACTOR) -> int:
        base = abs(self.scaled[0]) + 1e-300
        ok = np.abs(self.scaled) <= loss_factor * base
        bad = np.where(~ok)[0]
        return self.order if len(bad) == 0 else max(int(bad[0]) - 1, 0)

    @property
    def loss_flag(self) -> bool:
        return self.usable_order() < self.order


def _wrap_jet(x0: float, jet: _Jet) -> TaylorJet:
    scaled = jet.a.copy()
    powers = x0 ** np.arange(len(scaled))
    return TaylorJet(center=x0, coefficients=scaled / powers, scaled=scaled)


def taylor_jet(fn, x: float, order: int) -> TaylorJet:
    """Jet of a family member (or jet-provider) at x > 0, order <= 12."""
    if not (x > 0):
        raise ValueError("jet center must be positive")
    if order > JET_ORDER_CAP:
        raise ValueError(f"jet order capped at {JET_ORDER_CAP}")
    if isinstance(fn, (FunctionId, str)):
        return _wrap_jet(x, _fn_jet_scaled(FunctionId(fn), x, order))
    return fn.jet_at(x, order)


# jet providers: anything with .jet_at(x, order) -> TaylorJet


class jet_provider:
    """Wrap a coefficient callback c(x, order) -> array into a provider."""

    def __init__(self, coefficient_fn: Callable, name: str = "custom"):
        self._fn = coefficient_fn
        self.name = name

    def jet_at(self, x: float, order: int) -> TaylorJet:
        coef = np.asarray(self._fn(x, order), dtype=float)
        scaled = coef * x ** np.arange(len(coef))
        return TaylorJet(center=x, coefficients=coef, scaled=scaled)


class power_scaled:
    """Jet provider for x^alpha * (f(x) - f_inf)."""

    def __init__(self, fn, alpha: float, f_inf: float = 0.0):
        self.fn = fn
        self.alpha = alpha
        self.f_inf = f_inf
        self.name = f"x^{alpha}*({getattr(fn, 'name', fn)}-{f_inf})"

    def jet_at(self, x: float, order: int) -> TaylorJet:
        base = taylor_jet(self.fn, x, order)
        shifted = base.scaled.copy()
        shifted[0] -= self.f_inf
        # scaled jet of x^alpha: x0^alpha * C(alpha, k)
        k = np.arange(order + 1)
        binom = np.ones(order + 1)
        for i in range(1, order + 1):
            binom[i] = binom[i - 1] * (self.alpha - (i - 1)) / i
        pw = x ** self.alpha * binom
        prod = np.convolve(shifted, pw)[: order + 1]
        return TaylorJet(center=x, coefficients=prod / x ** k, scaled=prod)


def _jet_of(fn, x: float, order: int) -> TaylorJet:
    return taylor_jet(fn, x, order)


def _fn_label(fn) -> str:
    if isinstance(fn, (FunctionId, str)):
        return FunctionId(fn).value
    return getattr(fn, "name", getattr(fn, "__name__", repr(fn)))


# --------------------------------------------------------------------------
# property reports


@dataclass
class PropertyReport:
    property: str
    fn: str
    grid: list
    max_order: int
    passed: bool
    worst_violation: float
    witness: dict | None = None
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "property": self.property,
            "fn": self.fn,
            "grid": self.grid,
            "max_order": self.max_order,
            "pass": self.passed,
            "worst_violation": self.worst_violation,
            "witness": self.witness,
        }
        return json.dumps(payload, indent=2)


def _sign_pattern_report(prop, fn_label, grid, max_order, tol, rows):
    """rows: iterable of (x, k, signed_value, scale, usable)."""
    worst = 0.0
    witness = None
    downgraded = {}
    for x, k, val, scale, usable in rows:
        if not usable:
            downgraded[x] = min(downgraded.get(x, max_order), k - 1)
            continue
        viol = -(val) / scale
        if viol > worst:
            worst = viol
            witness = {"x": float(x), "k": int(k), "value": float(val)}
    passed = worst <= tol
    notes = {"downgraded_orders": {repr(k): v for k, v in downgraded.items()}} if downgraded else {}
    return PropertyReport(property=prop, fn=fn_label, grid=[float(g) for g in grid],
                          max_order=max_order, passed=passed,
                          worst_violation=float(worst),
                          witness=witness if not passed else witness, notes=notes)


def _cm_rows(fn, grid, max_order, shift=0.0):
    for x in grid:
        jet = _jet_of(fn, float(x), max_order)
        usable = jet.usable_order()
        c0 = abs(jet.derivative(0) - (shift if False else 0.0))
        for k in range(max_order + 1):
            d = jet.derivative(k)
            if k == 0:
                d -= shift
            signed = (-1.0) ** k * d
            scale = abs(d) + math.factorial(k) * (abs(jet.coefficients[0]) + 1e-300)
            yield x, k, signed, scale, k <= usable


def check_cm(fn, grid=None, max_order: int = 10, tol: float = 1e-9,
             f_inf: float = 0.0) -> PropertyReport:
    """Alternating-derivative test: (-1)^k f^(k)(x) >= -tol*scale.

    scale = |f^(k)(x)| + k!|c0| keeps the test meaningful where the
    derivatives are tiny.  Orders past a jet's usable precision are
    recorded as downgraded, not failed.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    return _sign_pattern_report("CM", _fn_label(fn), grid, max_order, tol,
                                _cm_rows(fn, grid, max_order, shift=f_inf))


def check_lcm(fn, grid=None, max_order: int = 10, tol: float = 1e-9) -> PropertyReport:
    """Logarithmic complete monotonicity: (-1)^k [ln f]^(k) >= 0 for k >= 1."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)

    def rows():
        for x in grid:
            x0 = float(x)
            if isinstance(fn, (FunctionId, str)):
                base = _fn_jet_scaled(FunctionId(fn), x0, max_order)
            else:
                base = _Jet(fn.jet_at(x0, max_order).scaled)
            jet = _wrap_jet(x0, base.log())
            usable = jet.usable_order()
            for k in range(1, max_order + 1):
                d = jet.derivative(k)
                signed = (-1.0) ** k * d
                scale = abs(d) + math.factorial(k) * (abs(jet.coefficients[0]) + 1.0)
                yield x, k, signed, scale, k <= usable

    return _sign_pattern_report("LCM", _fn_label(fn), grid, max_order, tol, rows())


def check_bernstein(fn, grid=None, max_order: int = 10, tol: float = 1e-9) -> PropertyReport:
    """f >= 0 on the grid and f' completely monotone up to max_order."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)

    def rows():
        for x in grid:
            jet = _jet_of(fn, float(x), max_order)
            usable = jet.usable_order()
            f0 = jet.derivative(0)
            yield x, 0, f0, abs(f0) + 1e-300, True          # non-negativity
            for k in range(max_order):
                d = jet.derivative(k + 1)                    # (f')^(k)
                signed = (-1.0) ** k * d
                scale = abs(d) + math.factorial(k) * (abs(jet.coefficients[1]) + 1e-300)
                yield x, k + 1, signed, scale, (k + 1) <= usable

    return _sign_pattern_report("BERNSTEIN", _fn_label(fn), grid, max_order, tol, rows())


# --------------------------------------------------------------------------
# degrees


def degree_ratio(fn, x: float) -> float:
    """-x f'(x)/f(x), the pointwise cap on alpha for x^alpha f(x) monotone."""
    jet = _jet_of(fn, float(x), 1)
    return -jet.scaled[1] / jet.scaled[0]


def degree_ratio_closed_form_H(x: float) -> float:
    """Closed form of -x H'(x)/H(x) for cross-checking the jet route."""
    x = float(x)
    la = math.log(x * (x + 1.0) / (x * x + 1.0))
    lb = math.log((x * x + 1.0) / (x + 1.0))
    num = x * (x * x + 2.0 * x - 1.0) * la + (x * x - 2.0 * x - 1.0) * lb
    den = (x + 1.0) * (x * x + 1.0) * la * lb
    return num / den


@dataclass
class DegreeEstimate:
    fn: str
    upper_bound: float
    upper_bound_location: float
    largest_passing: float
    smallest_failing: float | None
    bracket: tuple
    consistent: bool
    reports: dict


def estimate_cm_degree(fn, candidates: Sequence[float], grid=None,
                       max_order: int = 8, tol: float = 1e-9,
                       f_inf: float = 0.0, refine_width: float = 0.01) -> DegreeEstimate:
    """Bracket the completely monotonic degree of f - f_inf.

    Upper bound: the infimum of -x f'(x)/f(x) over the grid (approached at
    small x for this family).  Lower bound: the largest alpha whose scaled
    check_cm passes, refined by bisection to `refine_width`.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    ratios = []
    for x in grid:
        jet = _jet_of(fn, float(x), 1)
        c0 = jet.scaled[0] - f_inf
        ratios.append(-jet.scaled[1] / c0)
    ratios = np.asarray(ratios)
    i_min = int(np.argmin(ratios))
    upper = float(ratios[i_min])

    reports = {}

    def passes(alpha: float) -> bool:
        rep = check_cm(power_scaled(fn, alpha, f_inf), grid, max_order, tol)
        reports[alpha] = rep
        return rep.passed

    passing = [a for a in sorted(candidates) if passes(a)]
    failing = [a for a in sorted(candidates) if not reports[a].passed]
    largest_passing = passing[-1] if passing else float("nan")
    smallest_failing = min(failing) if failing else None

    if passing and smallest_failing is not None:
        lo, hi = largest_passing, smallest_failing
        while hi - lo > refine_width:
            mid = 0.5 * (lo + hi)
            if passes(mid):
                lo = mid
            else:
                hi = mid
        largest_passing = lo
    consistent = not (passing and largest_passing > upper + 0.05)
    return DegreeEstimate(fn=_fn_label(fn), upper_bound=upper,
                          upper_bound_location=float(grid[i_min]),
                          largest_passing=float(largest_passing),
                          smallest_failing=smallest_failing,
                          bracket=(float(largest_passing), upper),
                          consistent=consistent, reports=reports)


# --------------------------------------------------------------------------
# half-plane criterion and closure identities


_GEOMETRIC_TARGETS = {
    "G": eval_G,
    "INV_Z2H": eval_inv_z2H,
}


def _resolvent(eps: float):
    def f(z):
        g = eval_G(z)
        return g / (eps * g + 1.0)
    f.__name__ = f"G/({eps}G+1)"
    return f


def check_stieltjes_geometric(fn, grid=None, tol: float = 1e-12,
                              eps: float | None = None) -> PropertyReport:
    """Im z * Im f(z) <= tol*(1+|f|) on a gated upper-half-plane grid.

    fn is "G", "INV_Z2H", or "RESOLVENT" with the eps parameter for
    G/(eps*G + 1).
    """
    if fn == "RESOLVENT":
        f = _resolvent(1.0 if eps is None else eps)
        label = f.__name__
    else:
        key = FunctionId(fn).value if not isinstance(fn, str) or fn in FunctionId.__members__ else fn
        f = _GEOMETRIC_TARGETS[key]
        label = key
    z = gated_upper_halfplane_grid() if grid is None else np.asarray(grid, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("geometric criterion grid must lie in the upper half-plane")
    vals = f(z)
    lhs = z.imag * vals.imag
    scale = 1.0 + np.abs(vals)
    viol = lhs / scale
    i = int(np.argmax(viol))
    worst = float(viol[i])
    passed = worst <= tol
    witness = {"x": float(z[i].real), "k": 0, "value": float(lhs[i]),
               "z_im": float(z[i].imag)}
    return PropertyReport(property="STIELTJES_GEOMETRIC", fn=label,
                          grid=[len(z)], max_order=0, passed=passed,
                          worst_violation=max(worst, 0.0), witness=witness)


def check_closure_identities(grid=None, tol: float = 1e-10) -> PropertyReport:
    """Numeric identities tying the family together.

    H(1/x)*H(x) = 1, x^2 H(x) = x*G(x), and (1/(xH(x)))*G(x) = 1, each in
    relative terms on a positive grid.
    """
    grid = np.geomspace(1e-3, 1e3, 200) if grid is None else np.asarray(grid, dtype=float)
    Hf = scalar_function(FunctionId.H)
    Gf = scalar_function(FunctionId.G)
    X2Hf = scalar_function(FunctionId.X2H)
    INV_XHf = scalar_function(FunctionId.INV_XH)
    rel1 = np.abs(Hf(1.0 / grid) * Hf(grid) - 1.0)
    rel2 = np.abs(X2Hf(grid) - grid * Gf(grid)) / np.abs(X2Hf(grid))
    rel3 = np.abs(INV_XHf(grid) * Gf(grid) - 1.0)
    worst = float(max(rel1.max(), rel2.max(), rel3.max()))
    which = int(np.argmax([rel1.max(), rel2.max(), rel3.max()]))
    idx = int(np.argmax([rel1, rel2, rel3][which]))
    witness = {"x": float(grid[idx]), "k": which, "value": worst}
    return PropertyReport(property="IDENTITY", fn="closure", grid=[float(g) for g in grid],
                          max_order=0, passed=worst <= tol,
                          worst_violation=worst, witness=witness)
