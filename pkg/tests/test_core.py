"""Core evaluators: principal branches, series path, boundary oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logratio.core import (
    AccuracyLossWarning,
    BoundaryComponent,
    FunctionId,
    SERIES_RADIUS,
    boundary_G,
    boundary_limit,
    continuity_scan,
    eval_G,
    eval_H,
    eval_h,
    eval_inv_z2H,
    gated_upper_halfplane_grid,
    h_series_coefficients,
    principal_log,
    scalar_function,
)

LN = math.log


class TestPrincipalLog:
    def test_at_one(self):
        assert principal_log(1.0) == 0.0

    def test_approach_cut_from_above(self):
        v = principal_log(complex(-1.0, 1e-9))
        assert v.imag == pytest.approx(math.pi - 1e-9, abs=1e-12)
        assert v.real == pytest.approx(0.0, abs=1e-12)

    def test_at_i(self):
        v = principal_log(1j)
        assert v == pytest.approx(0.5j * math.pi, abs=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0, complex(-2.0, 0.0)])
    def test_rejects_cut(self, bad):
        with pytest.raises(ValueError):
            principal_log(bad)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            principal_log(complex(np.inf, 1.0))


class TestSpecialValues:
    def test_h_at_one_exact(self):
        assert eval_h(1.0) == 2.0

    def test_H_at_one_exact(self):
        assert eval_H(1.0) == 1.0

    def test_G_at_one(self):
        assert eval_G(1.0) == 1.0

    def test_inv_z2H_at_one(self):
        assert eval_inv_z2H(1.0) == 1.0

    def test_h_at_two(self):
        # ln 2 / ln(5/3), direct arithmetic on the closed form
        assert complex(eval_h(2.0)).real == pytest.approx(LN(2) / LN(5 / 3), rel=1e-14)

    def test_H_at_two(self):
        assert complex(eval_H(2.0)).real == pytest.approx(LN(6 / 5) / LN(5 / 3), rel=1e-14)

    def test_h_tends_to_one_at_infinity(self):
        vals = [complex(eval_h(x)).real for x in (1e4, 1e6, 1e8)]
        assert abs(vals[-1] - 1.0) < 0.06
        assert abs(vals[0] - 1.0) > abs(vals[-1] - 1.0)


class TestSeriesPath:
    def test_series_direct_consistency_ring(self):
        # agreement on both sides of the series switch radius
        rng = np.random.default_rng(3)
        radii = np.concatenate([
            rng.uniform(SERIES_RADIUS / 2, SERIES_RADIUS, 40),
            rng.uniform(SERIES_RADIUS, 2 * SERIES_RADIUS, 40),
        ])
        angles = rng.uniform(-np.pi, np.pi, len(radii))
        z = 1.0 + radii * np.exp(1j * angles)
        direct = np.log(z) / np.log((1 + z * z) / (1 + z))
        series = eval_h(z)
        assert np.max(np.abs(series - direct) / np.abs(direct)) < 1e-10

    def test_series_coefficients_start(self):
        q = h_series_coefficients(4)
        assert q[0] == pytest.approx(2.0, abs=1e-15)

    def test_H_series_exact_constant(self):
        assert eval_H(1.0 + 0j) == 1.0 + 0j


class TestConjugateAndReciprocal:
    @given(st.floats(0.05, 50.0), st.floats(-3.0, 3.0).filter(lambda y: abs(y) > 1e-3))
    def test_conjugate_symmetry(self, x, y):
        z = complex(x, y)
        for f in (eval_h, eval_H, eval_G):
            a = complex(f(z))
            b = complex(f(z.conjugate()))
            assert abs(b - a.conjugate()) <= 1e-12 * (1 + abs(a))

    def test_conjugate_symmetry_bulk(self):
        rng = np.random.default_rng(11)
        z = rng.uniform(0.1, 10, 1000) * np.exp(1j * rng.uniform(-2.9, 2.9, 1000))
        z = z[np.abs(z - 1j) > 1e-2]
        z = z[np.abs(z + 1j) > 1e-2]
        g1 = eval_G(z)
        g2 = np.conj(eval_G(np.conj(z)))
        assert np.max(np.abs(g1 - g2) / (1 + np.abs(g1))) <= 1e-12

    @given(st.floats(1e-3, 1e3))
    def test_reciprocal_identity(self, x):
        Hf = scalar_function(FunctionId.H)
        assert abs(Hf(1.0 / x) * Hf(x) - 1.0) <= 1e-10

    def test_positivity_on_half_line(self):
        x = np.geomspace(1e-4, 1e4, 1000)
        Hx = np.real(eval_H(x.astype(complex)))
        hx = np.real(eval_h(x.astype(complex)))
        assert np.all(Hx > 0)
        assert np.all(hx > 1)


class TestAccuracyLossNearI:
    def test_warns_near_i(self):
        with pytest.warns(AccuracyLossWarning):
            eval_h(1j + 1e-8)

    def test_no_warning_away_from_i(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error", AccuracyLossWarning)
            eval_h(2.0 + 1.0j)


class TestBoundary:
    def test_boundary_G_is_eval_at_offset(self):
        assert boundary_G(0.5, 1e-4) == complex(eval_G(complex(-0.5, 1e-4)))

    def test_boundary_G_validation(self):
        with pytest.raises(ValueError):
            boundary_G(-1.0, 1e-4)
        with pytest.raises(ValueError):
            boundary_G(1.0, 2.0)

    def test_im_limit_at_half(self):
        # -(pi t)/ln((1+t^2)/(1-t)) at t = 1/2
        res = boundary_limit(0.5, BoundaryComponent.IM_G)
        assert res.converged
        assert res.value == pytest.approx(-math.pi * 0.5 / LN(2.5), rel=1e-12)

    def test_im_limit_branch_right(self):
        # t = 3 lies on the outermost branch
        t = 3.0
        L = LN((1 + t * t) / (t - 1))
        expect = -math.pi * t * LN((1 + t * t) / (t * (t - 1))) / (L * L + math.pi ** 2)
        res = boundary_limit(t, BoundaryComponent.IM_G)
        assert res.value == pytest.approx(expect, rel=1e-11)

    def test_limits_at_one(self):
        # at the breakpoint itself the boundary values are approached only
        # logarithmically in eps, so the extrapolant is loose there
        re1 = boundary_limit(1.0, BoundaryComponent.RE_G)
        im1 = boundary_limit(1.0, BoundaryComponent.IM_G)
        assert re1.value == pytest.approx(1.0, abs=0.05)
        assert im1.value == pytest.approx(0.0, abs=0.25)
        assert not im1.converged

    def test_near_breakpoint_degrades_gracefully(self):
        # inside 1e-9 of the breakpoint the eps-window cannot resolve the
        # one-sided limit; the extrapolant stays near the small limit value
        for t in (1.0 - 1e-9, 1.0 + 1e-9):
            res = boundary_limit(t, BoundaryComponent.IM_G)
            assert abs(res.value) < 0.25
            assert not res.converged

    def test_inv_z2h_component(self):
        res = boundary_limit(0.5, BoundaryComponent.IM_INV_Z2H)
        assert res.converged
        # equals -pi * rho/(t*g2) there; sanity against the known value
        assert res.value == pytest.approx(-math.pi * 0.2941568117370407, rel=1e-9)


class TestDecayLimits:
    def test_G_decay_far_field(self):
        theta = np.linspace(-np.pi, np.pi, 39)[1:-1]
        z = 1e8 * np.exp(1j * theta)
        assert np.max(np.abs(eval_G(z))) <= 0.06

    def test_z2H_decay_near_zero(self):
        theta = np.linspace(-np.pi / 2, np.pi / 2, 37)
        z = 1e-6 * np.exp(1j * theta)
        assert np.max(np.abs(z * eval_G(z))) <= 1e-4

    def test_inv_z2H_decay_far_field(self):
        theta = np.linspace(-np.pi, np.pi, 19)[1:-1]
        z = 1e8 * np.exp(1j * theta)
        assert np.max(np.abs(eval_inv_z2H(z))) <= 1e-6


class TestGatedGrid:
    def test_grid_size_and_halfplane(self):
        z = gated_upper_halfplane_grid(500)
        assert len(z) == 500
        assert np.all(z.imag > 0)
        assert np.all(np.abs(z - 1j) > 1e-2)

    def test_ray_continuity_inside_gate(self):
        # along a single gated ray h varies smoothly
        theta = 0.5
        r = np.geomspace(0.05, 50.0, 400)
        z = r * np.exp(1j * theta)
        vals = eval_h(z)
        assert continuity_scan(vals)

    def test_gate_trims_branch_jump(self):
        # the ray at 3*pi/4 crosses the inner-log cut near r = 2; the raw
        # formula jumps there while the gated grid keeps only the prefix
        theta = 0.75 * np.pi
        r = np.geomspace(0.05, 50.0, 400)
        vals = eval_h(r * np.exp(1j * theta))
        assert not continuity_scan(vals)
        z = gated_upper_halfplane_grid(500)
        on_ray = z[np.abs(np.angle(z) - theta) < 1e-9]
        assert len(on_ray) > 0
        assert np.max(np.abs(on_ray)) < 2.1

    def test_continuity_scan_detects_jump(self):
        vals = np.array([1.0, 1.01, 5.0, 1.02])
        assert not continuity_scan(vals)


class TestScalarFunctions:
    def test_aliases_consistent(self):
        x = 3.0
        H = scalar_function(FunctionId.H)(x)
        assert scalar_function(FunctionId.X2H)(x) == pytest.approx(x * x * H, rel=1e-14)
        assert scalar_function(FunctionId.INV_XH)(x) == pytest.approx(1 / (x * H), rel=1e-14)
        assert scalar_function(FunctionId.INV_Z2H)(x) == pytest.approx(
            scalar_function(FunctionId.INV_X2H)(x), rel=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            scalar_function(FunctionId.H)(-1.0)
