"""Principal-branch evaluation of the log-ratio family on the cut plane.

The scalar family lives on (0, oo) and extends to the cut plane
A = C \\ (-oo, 0]:

    h(z) = ln z / ln((1+z^2)/(1+z)),          h(1) = 2,
    H(z) = h(z) - 1,                          H(1) = 1,
    G(z) = z*H(z),
    1/(z^2 H(z)) = 1/(z*G(z)),

with every logarithm taken on its principal branch (arg in (-pi, pi)).
The removable singularity at z = 1 is crossed with a precomputed Taylor
series; evaluation close to +-i (where the inner logarithm blows up) is
flagged as accuracy loss.

Caveat on branch jumps: the composed argument w(z) = (1+z^2)/(1+z)
crosses the negative real axis along two arcs joining +-i to -(1+sqrt 2).
Across those arcs the literal principal-branch formula is discontinuous,
so complex verification grids must be gated by a continuity scan
(`gated_upper_halfplane_grid`).  On rays |arg z| <= 3*pi/4 the gate trims
every point past the first crossing.

Boundary behaviour along the cut is exposed through `boundary_G` and the
Richardson-extrapolated `boundary_limit`, which is the independent oracle
for the closed-form densities.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AccuracyLossWarning",
    "FunctionId",
    "ExtrapolationResult",
    "BoundaryComponent",
    "principal_log",
    "eval_h",
    "eval_H",
    "eval_G",
    "eval_inv_z2H",
    "boundary_G",
    "boundary_limit",
    "scalar_function",
    "h_series_coefficients",
    "gated_upper_halfplane_grid",
    "continuity_scan",
    "SERIES_RADIUS",
]

SERIES_RADIUS = 1e-3          # switch to the Taylor path inside |z-1| < this
_I_WARN_RADIUS = 1e-6         # |1+z^2| below this flags accuracy loss
_I_EXCLUSION_RADIUS = 1e-2    # test grids stay this far from +-i
_SERIES_TABLE_ORDER = 28


class AccuracyLossWarning(UserWarning):
    """Evaluation close to +-i, where the inner logarithm diverges."""


class FunctionId(str, enum.Enum):
    """Tags for the members of the family; aliases share base evaluators."""

    H = "H"
    h = "h"
    G = "G"                # z*H(z)
    XH = "XH"              # alias of G on the reals
    X2H = "X2H"            # z^2*H(z) = z*G(z)
    INV_H = "INV_H"
    INV_XH = "INV_XH"      # 1/(z*H) = 1/G
    INV_Z2H = "INV_Z2H"    # 1/(z^2*H) = 1/(z*G)
    INV_X2H = "INV_X2H"    # same function as INV_Z2H


class BoundaryComponent(str, enum.Enum):
    RE_G = "RE_G"
    IM_G = "IM_G"
    IM_INV_Z2H = "IM_INV_Z2H"


@dataclass(frozen=True)
class ExtrapolationResult:
    value: float
    error: float
    converged: bool


# --------------------------------------------------------------------------
# Taylor coefficients of h at z = 1.
#
# Both ln z and D(z) = ln((1+z^2)/(1+z)) vanish linearly at 1; with
# u = z - 1 the deflated quotient has coefficients q_k with q_0 = 2.


def h_series_coefficients(order: int = _SERIES_TABLE_ORDER) -> np.ndarray:
    """Taylor coefficients q_0..q_order of h(1+u) around u = 0."""
    n = order + 1
    k = np.arange(1, n + 1)
    # ln(1+u) = sum_{k>=1} (-1)^(k-1) u^k / k, kept to degree n
    num = (-1.0) ** (k - 1) / k
    # psi(u) = (1+z^2)/(1+z) - 1 = u(1+u)/(2+u); psi/u = (1+u)/(2+u)
    inv = 0.5 * (-0.5) ** np.arange(n)                    # 1/(2+u)
    psi_over_u = np.convolve([1.0, 1.0], inv)[:n]
    psi = np.concatenate([[0.0], psi_over_u[: n - 1]])    # degree n-1 suffices
    # D(u) = log(1+psi) via the series in psi
    D = np.zeros(n)
    power = np.zeros(n)
    power[0] = 1.0
    for m in range(1, n):
        power = np.convolve(power, psi)[:n]
        D += (-1.0) ** (m - 1) / m * power
    # deflate the common zero at u = 0 and divide
    Nt = num[:n]
    Dt = np.concatenate([D[1:], [0.0]])[:n]
    q = np.zeros(n)
    q[0] = Nt[0] / Dt[0]
    for j in range(1, n):
        q[j] = (Nt[j] - np.dot(q[:j], Dt[j:0:-1])) / Dt[0]
    return q


_H_SERIES = h_series_coefficients()
_H_SERIES_EVAL = _H_SERIES[:9]   # truncation order 8 for point evaluation


# --------------------------------------------------------------------------
# evaluation helpers


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _require_cut_plane(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError("point must be finite")
    on_cut = (arr.imag == 0.0) & (arr.real <= 0.0)
    if np.any(on_cut):
        raise ValueError("point on the branch cut (-oo, 0] or zero")


def _warn_near_i(arr: np.ndarray) -> None:
    if np.any(np.abs(1.0 + arr * arr) < _I_WARN_RADIUS):
        warnings.warn(
            "evaluation within 1e-6 of +-i loses accuracy", AccuracyLossWarning,
            stacklevel=3,
        )


def principal_log(z):
    """Principal branch ln z = ln|z| + i arg z, arg in (-pi, pi).

    Rejects z on (-oo, 0] and z = 0.
    """
    arr, scalar = _as_complex_array(z)
    _require_cut_plane(arr)
    out = np.log(arr)
    return complex(out) if scalar else out


def _h_values(arr: np.ndarray) -> np.ndarray:
    """h on validated cut-plane points, series path near 1."""
    out = np.empty(arr.shape, dtype=complex)
    u = arr - 1.0
    near = np.abs(u) < SERIES_RADIUS
    if np.any(near):
        out[near] = np.polynomial.polynomial.polyval(u[near], _H_SERIES_EVAL)
        out[near & (u == 0)] = 2.0  # exact special value
    far = ~near
    if np.any(far):
        zf = arr[far]
        real = (zf.imag == 0.0) & (zf.real > 0.0)
        vals = np.empty(zf.shape, dtype=complex)
        if np.any(real):
            x = zf[real].real
            vals[real] = np.log(x) / (np.log1p(x * x) - np.log1p(x))
        if np.any(~real):
            zc = zf[~real]
            vals[~real] = np.log(zc) / np.log((1.0 + zc * zc) / (1.0 + zc))
        out[far] = vals
    return out


def eval_h(z):
    """h(z) = ln z / ln((1+z^2)/(1+z)) on the cut plane, h(1) = 2."""
    arr, scalar = _as_complex_array(z)
    _require_cut_plane(arr)
    _warn_near_i(arr)
    out = _h_values(arr)
    return complex(out) if scalar else out


def eval_H(z):
    """H(z) = h(z) - 1, H(1) = 1.

    For real x > 0 the equivalent combined form
    log1p((x-1)/(1+x^2)) / (log1p(x^2) - log1p(x)) is used; it keeps full
    relative accuracy when H is tiny.  For complex z the value is h(z)-1,
    which is the branch whose boundary limits reproduce the closed-form
    densities.
    """
    arr, scalar = _as_complex_array(z)
    _require_cut_plane(arr)
    _warn_near_i(arr)
    out = np.empty(arr.shape, dtype=complex)
    u = arr - 1.0
    near = np.abs(u) < SERIES_RADIUS
    if np.any(near):
        coef = _H_SERIES_EVAL.copy()
        coef[0] = 1.0  # h-series minus 1, exact at the centre
        out[near] = np.polynomial.polynomial.polyval(u[near], coef)
    far = ~near
    if np.any(far):
        zf = arr[far]
        real = (zf.imag == 0.0) & (zf.real > 0.0)
        vals = np.empty(zf.shape, dtype=complex)
        if np.any(real):
            x = zf[real].real
            den = np.log1p(x * x) - np.log1p(x)
            vals[real] = np.log1p((x - 1.0) / (1.0 + x * x)) / den
        if np.any(~real):
            zc = zf[~real]
            vals[~real] = np.log(zc) / np.log((1.0 + zc * zc) / (1.0 + zc)) - 1.0
        out[far] = vals
    return complex(out) if scalar else out


def eval_G(z):
    """G(z) = z*H(z)."""
    arr, scalar = _as_complex_array(z)
    out = arr * eval_H(arr)
    return complex(out) if scalar else out


def eval_inv_z2H(z):
    """1/(z^2 H(z)) computed as 1/(z * G(z))."""
    arr, scalar = _as_complex_array(z)
    out = 1.0 / (arr * eval_G(arr))
    return complex(out) if scalar else out


_SCALAR_BUILDERS = {
    FunctionId.H: lambda x, Hx: Hx,
    FunctionId.h: lambda x, Hx: Hx + 1.0,
    FunctionId.G: lambda x, Hx: x * Hx,
    FunctionId.XH: lambda x, Hx: x * Hx,
    FunctionId.X2H: lambda x, Hx: x * x * Hx,
    FunctionId.INV_H: lambda x, Hx: 1.0 / Hx,
    FunctionId.INV_XH: lambda x, Hx: 1.0 / (x * Hx),
    FunctionId.INV_Z2H: lambda x, Hx: 1.0 / (x * x * Hx),
    FunctionId.INV_X2H: lambda x, Hx: 1.0 / (x * x * Hx),
}


def scalar_function(fn: FunctionId):
    """Real-valued evaluator on (0, oo) for a function tag.

    All aliases are algebraic combinations of the base H evaluator.
    """
    fn = FunctionId(fn)
    build = _SCALAR_BUILDERS[fn]

    def f(x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr <= 0):
            raise ValueError("argument must be positive")
        Hx = np.real(eval_H(arr.astype(complex)))
        out = build(arr, Hx)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    f.__name__ = f"fn_{fn.value}"
    return f


# --------------------------------------------------------------------------
# boundary behaviour along the cut


def boundary_G(t: float, eps: float):
    """G evaluated just above the cut at z = -t + i*eps."""
    if not (t > 0):
        raise ValueError("t must be positive")
    if not (0 < eps <= 1):
        raise ValueError("eps must lie in (0, 1]")
    return eval_G(complex(-t, eps))


_EPS_LEVELS = 2.0 ** -np.arange(10, 27)


def boundary_limit(t: float, which: BoundaryComponent,
                   tol: float = 1e-9) -> ExtrapolationResult:
    """Richardson limit eps -> 0+ of a boundary component at z = -t + i*eps.

    The eps-schedule is 2^-10 .. 2^-26; a polynomial-in-eps Neville tableau
    extrapolates to zero.  Convergence means two successive diagonal
    entries agree within `tol`; disagreement beyond 10*tol sets the
    non-convergence flag.  Within ~1e-9 of the breakpoints 1 and 1+sqrt(2)
    the eps-window cannot reach the asymptotic regime and the flag should
    be expected.
    """
    if not (t > 0):
        raise ValueError("t must be positive")
    which = BoundaryComponent(which)
    zs = -t + 1j * _EPS_LEVELS
    if which is BoundaryComponent.IM_INV_Z2H:
        vals = np.imag(eval_inv_z2H(zs))
    else:
        g = eval_G(zs)
        vals = np.real(g) if which is BoundaryComponent.RE_G else np.imag(g)

    eps = _EPS_LEVELS
    col = np.array(vals, dtype=float)
    diag = [col[0]]
    n = len(col)
    for j in range(1, n):
        nxt = np.empty(n - j)
        for i in range(n - j):
            e_hi, e_lo = eps[i], eps[i + j]
            nxt[i] = (e_hi * col[i + 1] - e_lo * col[i]) / (e_hi - e_lo)
        col = nxt
        diag.append(col[0])
    diffs = np.abs(np.diff(diag))
    best = int(np.argmin(diffs)) + 1
    value = diag[best]
    error = float(diffs[best - 1])
    return ExtrapolationResult(float(value), error, error <= tol)


# --------------------------------------------------------------------------
# gated complex grids
#
# Along each ray from small radius outward the cumulative argument of
# w(z) = (1+z^2)/(1+z) is unwrapped; once it leaves (-pi, pi) the literal
# formula has jumped off the branch that continues the positive reals and
# the remainder of the ray is discarded.


def _ray_valid_mask(z: np.ndarray) -> np.ndarray:
    w = (1.0 + z * z) / (1.0 + z)
    ang = np.unwrap(np.angle(w))
    ang += np.angle(w[0]) - ang[0]
    good = np.abs(ang) < np.pi - 1e-9
    bad = np.where(~good)[0]
    mask = np.ones(len(z), dtype=bool)
    if len(bad):
        mask[bad[0]:] = False
    return mask


def gated_upper_halfplane_grid(n_points: int = 2000,
                               r_lo: float = 0.05,
                               r_hi: float = 50.0,
                               theta_max: float = 0.75 * math.pi,
                               n_rays: int = 40) -> np.ndarray:
    """Upper half-plane grid restricted to the continuity-gated region.

    Rays with theta in (0, theta_max] are scanned from r_lo outward; points
    past a branch jump of the inner logarithm, or within 1e-2 of +-i, are
    dropped.  Returns at least n_points gated points (truncated to exactly
    n_points).
    """
    thetas = np.linspace(0.04, theta_max, n_rays)
    per_ray = max(2 * (n_points // n_rays), 8)
    pts = []
    for th in thetas:
        r = np.geomspace(r_lo, r_hi, per_ray)
        z = r * np.exp(1j * th)
        mask = _ray_valid_mask(z)
        mask &= np.abs(z - 1j) > _I_EXCLUSION_RADIUS
        mask &= np.abs(z + 1j) > _I_EXCLUSION_RADIUS
        pts.append(z[mask])
    grid = np.concatenate(pts)
    if len(grid) < n_points:
        raise RuntimeError("gating removed too many points; enlarge n_rays")
    stride = len(grid) / n_points
    idx = (np.arange(n_points) * stride).astype(int)
    return grid[idx]


def continuity_scan(values: np.ndarray, rel_jump: float = 0.5) -> bool:
    """True when adjacent values along a path show no branch-sized jump."""
    v = np.asarray(values)
    dv = np.abs(np.diff(v))
    scale = 1.0 + np.abs(v[:-1])
    return bool(np.all(dv <= rel_jump * scale))
