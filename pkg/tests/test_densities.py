"""Closed-form densities, the eps->0 oracle, and the Laplace-type kernels."""

import io
import math

import numpy as np
import pytest

from logratio.core import BoundaryComponent, boundary_limit
from logratio.densities import (
    BREAK2,
    BREAKPOINTS,
    density_table,
    g2,
    g2_logspace,
    h_rep_kernel,
    levy_density_invzH,
    levy_density_invzH_obj,
    levy_density_z2H,
    levy_density_z2H_obj,
    rho,
    rho_density,
    rho_logspace,
    select_sigma_candidate,
    sigma,
    sigma_discrepancy_report,
    sigma_weighted_logspace,
    varrho_paper,
)

PI = math.pi
LN = math.log


class TestRho:
    def test_value_at_one(self):
        assert rho(1.0) == 0.0

    def test_branch_left(self):
        assert rho(0.5) == pytest.approx(0.5 / LN(2.5), rel=1e-15)

    def test_limit_at_zero(self):
        assert rho(1e-8) == pytest.approx(1.0, abs=2e-8)

    def test_continuous_at_one(self):
        # the approach to rho(1) = 0 is ~1/|ln(1-t)|: slow but monotone
        steps = np.array([1e-3, 1e-6, 1e-9])
        left = rho(1.0 - steps)
        right = rho(1.0 + steps)
        assert np.all(np.diff(left) < 0) and np.all(np.diff(right) < 0)
        assert left[-1] < 0.05 and right[-1] < 0.05
        assert rho_density.limits[1.0] == (0.0, 0.0)

    def test_jump_at_second_breakpoint(self):
        left, right = rho_density.one_sided_limits(BREAK2)
        assert left > 0 and right > 0
        assert abs(left - right) > 0.1          # finite jump, recorded

    def test_non_negative(self):
        t = np.geomspace(1e-6, 1e6, 3000)
        assert np.all(rho(t) >= 0)

    def test_tail_law(self):
        v = rho(1e8) * LN(1e8) ** 2
        assert 0.9 <= v <= 1.05

    def test_domain_error(self):
        with pytest.raises(ValueError):
            rho(0.0)
        with pytest.raises(ValueError):
            rho(-3.0)

    def test_snap_to_branches(self):
        assert rho(1.0 + 1e-13) == 0.0
        # within 1e-12 of the second breakpoint the right branch applies
        assert rho(BREAK2 - 1e-14) == pytest.approx(rho(BREAK2), rel=1e-12)
        assert abs(rho(BREAK2 - 1e-14) - rho(BREAK2 - 1e-10)) > 0.1

    def test_logspace_matches(self):
        u = np.array([-5.0, -0.1, 0.3, 4.0, 200.0])
        assert rho_logspace(u) == pytest.approx(rho(np.exp(u)), rel=1e-13)

    def test_logspace_deep(self):
        assert rho_logspace(-1e7) == 1.0
        assert rho_logspace(1e7) == pytest.approx(1.0 / 1e14, rel=1e-6)

    def test_extreme_arguments_finite(self):
        for t in (1e-300, 1e160, 1e300):
            assert np.isfinite(rho(t))


class TestG2:
    def test_value_at_one(self):
        assert g2(1.0) == 1.0

    def test_positive(self):
        t = np.geomspace(1e-5, 1e5, 2000)
        assert np.all(g2(t) > 0)

    def test_matches_boundary_modulus(self):
        for t in (0.3, 2.0, 5.0):
            re = boundary_limit(t, BoundaryComponent.RE_G).value
            im = boundary_limit(t, BoundaryComponent.IM_G).value
            assert g2(t) == pytest.approx(re * re + im * im, rel=1e-9)

    def test_small_t_log_law(self):
        t = 1e-8
        assert g2(t) / LN(1.0 / t) ** 2 == pytest.approx(1.0, abs=0.05)

    def test_logspace_deep(self):
        assert g2_logspace(-1e6) == pytest.approx(1e12, rel=1e-9)


class TestVarrho:
    def test_value_at_one(self):
        assert varrho_paper(1.0) == 1.0

    def test_positive(self):
        t = np.geomspace(1e-4, 1e4, 1000)
        assert np.all(varrho_paper(t) > 0)

    def test_identity_with_g2(self):
        # varrho * t = g2, branch by branch, on a 100-point grid
        t = np.geomspace(1e-3, 1e3, 100)
        lhs = varrho_paper(t) * t
        rhs = g2(t)
        assert np.max(np.abs(lhs - rhs) / rhs) < 1e-10


class TestSigmaSelection:
    def test_candidates_differ_by_t_squared(self):
        t = np.array([0.2, 0.7, 3.0, 50.0])
        a = sigma(t, candidate="A")
        b = sigma(t, candidate="B")
        assert a == pytest.approx(b * t * t, rel=1e-12)

    def test_selection_decisive(self):
        sel = select_sigma_candidate()
        assert sel.decisive
        assert sel.selected == "B"
        assert sel.dev_B <= 1e-6
        assert sel.dev_A > 1e-3

    def test_sigma_at_one(self):
        assert sigma(1.0) == 0.0
        assert sigma(1.0, candidate="A") == 0.0

    def test_oracle_match_pointwise(self):
        for t in (0.5, 2.0, 10.0):
            oracle = -boundary_limit(t, BoundaryComponent.IM_INV_Z2H).value / PI
            assert sigma(t) == pytest.approx(oracle, abs=1e-9)

    def test_large_t_law(self):
        # only candidate B keeps t*sigma bounded
        for t in (1e4, 1e6):
            assert t * sigma(t) == pytest.approx(1.0, abs=0.05)
        assert sigma(1e4, candidate="A") > 1e3

    def test_discrepancy_report_shape(self):
        rep = sigma_discrepancy_report()
        assert rep["selected"] == "B"
        assert rep["decisive"] is True
        assert rep["max_abs_dev_candidate_A"] > rep["max_abs_dev_candidate_B"]
        assert len(rep["calibration_grid"]) == 40

    def test_weighted_logspace(self):
        u = np.array([-3.0, 0.5, 6.0])
        got = sigma_weighted_logspace(u)
        assert got == pytest.approx(np.exp(u) * sigma(np.exp(u)), rel=1e-12)


def _kink_graded_segments(lo: float, hi: float):
    """Log-grid segments for (e^lo, e^hi), graded into the 1/ln cusp at t=1.

    The jump at 1+sqrt(2) sits on a segment edge; ladders of the form
    [1 - 10^-k, 1 - 10^-k-1] resolve the slowly-vanishing approach to 1.
    The skipped sliver (1 +- 1e-12) carries mass below 1e-13.
    """
    segs = [(lo, math.log(1.0 - 1e-1), 200_000)]
    for k in range(1, 12):
        segs.append((math.log(1.0 - 10.0 ** -k), math.log(1.0 - 10.0 ** -(k + 1)), 40_000))
    for k in reversed(range(1, 12)):
        segs.append((math.log(1.0 + 10.0 ** -(k + 1)), math.log(1.0 + 10.0 ** -k), 40_000))
    # stop just below the jump so the edge node takes the left-branch value
    segs.append((math.log(1.0 + 1e-1), math.log(BREAK2) - 1e-9, 200_000))
    segs.append((math.log(BREAK2), hi, 200_000))
    return segs


def _trapezoid_reference(weight_log, t, lo=-40.0):
    """Independent kink-graded log-trapezoid for int f(u) e^{-tu} du.

    weight_log(v) must return u*f(u) at u = e^v.
    """
    total = 0.0
    for a, b, n in _kink_graded_segments(lo, math.log(90.0 / t)):
        v = np.linspace(a, b, n)
        total += np.trapezoid(weight_log(v) * np.exp(-t * np.exp(v)), v)
    return total


class TestLevyKernels:
    def test_z2H_monotone(self):
        v1, v2, v4 = (levy_density_z2H(t) for t in (1.0, 2.0, 4.0))
        assert v1 > v2 > v4 > 0

    def test_z2H_two_method_agreement(self):
        def wlog(v):
            with np.errstate(over="ignore", under="ignore"):
                return np.exp(2 * v) * rho_logspace(v)

        ref = _trapezoid_reference(wlog, 1.0)
        assert levy_density_z2H(1.0, 1e-9) == pytest.approx(ref, rel=1e-6)

    def test_invzH_two_method_agreement(self):
        def wlog(v):
            with np.errstate(over="ignore", under="ignore"):
                return np.exp(v) * sigma_weighted_logspace(v)

        ref = _trapezoid_reference(wlog, 1.0)
        assert levy_density_invzH(1.0, 1e-9) == pytest.approx(ref, rel=1e-6)

    def test_invzH_decreasing(self):
        vals = [levy_density_invzH(t) for t in (0.5, 1.0, 2.0)]
        assert vals[0] > vals[1] > vals[2] > 0

    def test_z2H_watson_decay(self):
        # t^2 m(t) tends to rho(0+) = 1 from below; C = 4*m(1) covers it
        v1 = levy_density_z2H(1.0)
        C = 4.0 * v1
        for t in (10.0, 100.0):
            assert levy_density_z2H(t) <= C / (t * t)

    def test_scaled_route_consistent(self):
        for obj, p in ((levy_density_z2H_obj, 2), (levy_density_invzH_obj, 1)):
            for tau in (-3.0, 0.0, 2.0):
                t = math.exp(tau)
                assert obj.scaled(tau, 1e-10) == pytest.approx(
                    t ** p * obj(t, 1e-10), rel=1e-8)

    def test_jet_matches_derivative_sign(self):
        jet = levy_density_z2H_obj.jet(1.0, 2)
        assert jet[0] > 0 and jet[1] < 0 and jet[2] > 0


class TestHRepKernel:
    def test_small_t_vanishes(self):
        assert h_rep_kernel(1e-6) < 0.1
        assert h_rep_kernel(1e-6) > 0

    def test_increasing(self):
        assert h_rep_kernel(1.0) < h_rep_kernel(2.0)

    def test_two_method_agreement(self):
        t = 1.0

        def wlog(v):
            with np.errstate(over="ignore", under="ignore"):
                return rho_logspace(v) * (-np.expm1(-t * np.exp(v)))

        ref = 0.0
        for a, b, n in _kink_graded_segments(-40.0, 6.0):
            v = np.linspace(a, b, n)
            ref += np.trapezoid(wlog(v), v)
        # log-slow tail on a geometric grid plus its analytic remainder
        v = np.geomspace(6.0, 1e7, 400001)
        ref += np.trapezoid(wlog(v), v) + 1.0 / 1e7
        assert h_rep_kernel(1.0, 1e-9) == pytest.approx(ref, rel=2e-6)


class TestDensityCSV:
    def test_header_and_shape(self):
        text = density_table([0.5, 1.0, 2.0])
        lines = text.strip().split("\n")
        assert lines[0] == "t,rho,varrho_paper,g2,sigma"
        assert len(lines) == 4
        row = lines[2].split(",")
        assert row == ["1", "0", "1", "1", "0"]

    def test_round_trip_precision(self):
        text = density_table([0.7])
        vals = text.strip().split("\n")[1].split(",")
        assert float(vals[1]) == rho(0.7)

    def test_deterministic(self):
        grid = np.geomspace(0.1, 10, 17)
        assert density_table(grid) == density_table(grid)
