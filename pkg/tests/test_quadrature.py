"""Adaptive engine: finite panels, semi-infinite shapes, divergence probes."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logratio.densities import (
    levy_density_invzH_obj,
    levy_density_z2H_obj,
    rho,
    rho_density,
    sigma,
    sigma_density,
)
from logratio.quadrature import (
    IntegrandSpec,
    Kernel,
    TailHint,
    integrate_panel,
    integrate_semi_infinite,
    laplace_transform,
    levy_integral,
    stieltjes_transform,
)

# int rho/(t+z) frozen to 12+ digits with 40-digit arithmetic and log-aware
# endpoint substitutions; these are what the Stieltjes engine must hit
CAUCHY_RHO = {
    0.1: 2.367962800057687,
    0.5: 1.31608351905998,
    1.0: 0.9935587964625535,
    2.0: 0.7475492645414299,
    10.0: 0.40643030312402645,
    100.0: 0.21706397547269254,
    1 + 1j: 0.8149988181870134 - 0.27540685882763066j,
    3 - 2j: 0.5710920335705487 + 0.13416699461570286j,
    0.5 + 2j: 0.6176221353407793 - 0.3821506463210302j,
}
CAUCHY_SIGMA = {
    0.1: 3.676288728060727,
    1.0: 0.7849942284933508,
    2.0: 0.5158272587991416,
    100.0: 0.039217874899691516,
    1 + 1j: 0.5592743334372015 - 0.2857785406866351j,
}


class TestIntegratePanel:
    def test_constant(self):
        r = integrate_panel(lambda t: np.ones_like(t), 0.0, 1.0, 1e-14)
        assert r.value == pytest.approx(1.0, abs=1e-14)
        assert r.converged

    def test_inverse_log_square(self):
        # antiderivative -1/ln t over [e, e^10]
        r = integrate_panel(lambda t: 1.0 / (t * np.log(t) ** 2),
                            math.e, math.e ** 10, 1e-12)
        assert r.value == pytest.approx(0.9, abs=1e-11)

    def test_rho_across_kink_vs_midpoint_reference(self):
        # brute-force composite midpoint with a million points
        t = np.linspace(0.5, 2.0, 2_000_001)
        mid = 0.5 * (t[1:] + t[:-1])
        ref = float(np.sum(rho(mid)) * (t[1] - t[0]))
        r = integrate_panel(rho, 0.5, 2.0, 1e-10, breakpoints=(1.0,))
        assert r.value == pytest.approx(ref, abs=1e-8)

    def test_validation(self):
        with pytest.raises(ValueError):
            integrate_panel(np.sin, 2.0, 1.0, 1e-8)

    @given(st.floats(0.15, 0.85))
    def test_additivity(self, frac):
        f = lambda t: np.exp(-t) * np.sin(3 * t)
        whole = integrate_panel(f, 0.0, 1.0, 1e-12)
        split = frac
        left = integrate_panel(f, 0.0, split, 1e-12)
        right = integrate_panel(f, split, 1.0, 1e-12)
        assert whole.value == pytest.approx(left.value + right.value,
                                            abs=whole.abs_error_estimate
                                            + left.abs_error_estimate
                                            + right.abs_error_estimate + 1e-13)

    def test_error_honesty_corpus(self):
        # twenty integrands with closed-form antiderivatives
        cases = []
        for k in range(1, 11):
            cases.append((lambda t, k=k: t ** k,
                          lambda a, b, k=k: (b ** (k + 1) - a ** (k + 1)) / (k + 1)))
        cases.append((np.exp, lambda a, b: math.exp(b) - math.exp(a)))
        cases.append((np.sin, lambda a, b: math.cos(a) - math.cos(b)))
        cases.append((np.cos, lambda a, b: math.sin(b) - math.sin(a)))
        cases.append((lambda t: 1 / t, lambda a, b: math.log(b / a)))
        cases.append((lambda t: 1 / (1 + t * t), lambda a, b: math.atan(b) - math.atan(a)))
        cases.append((lambda t: np.exp(-t * t),
                      lambda a, b: math.sqrt(math.pi) / 2 * (math.erf(b) - math.erf(a))))
        cases.append((lambda t: np.sqrt(t), lambda a, b: (b ** 1.5 - a ** 1.5) / 1.5))
        cases.append((np.log, lambda a, b: b * math.log(b) - b - a * math.log(a) + a))
        cases.append((lambda t: np.sin(10 * t), lambda a, b: (math.cos(10 * a) - math.cos(10 * b)) / 10))
        cases.append((lambda t: 1 / (t + 2) ** 2, lambda a, b: 1 / (a + 2) - 1 / (b + 2)))
        honest = 0
        for f, F in cases:
            r = integrate_panel(f, 0.5, 3.0, 1e-9)
            true_err = abs(r.value - F(0.5, 3.0))
            # the estimator cannot see summation roundoff; floor at ulp scale
            if true_err <= 3.0 * max(r.abs_error_estimate, 4e-16 * abs(r.value)):
                honest += 1
        assert honest >= 0.95 * len(cases)

    def test_breakpoint_declaration_saves_evals(self):
        f = rho
        plain = integrate_panel(f, 2.0, 3.0, 1e-10)
        declared = integrate_panel(f, 2.0, 3.0, 1e-10,
                                   breakpoints=(1.0 + math.sqrt(2.0),))
        assert declared.value == pytest.approx(plain.value, abs=1e-8)
        assert declared.evals <= plain.evals / 4

    def test_result_invariants(self):
        r = integrate_panel(np.exp, 0.0, 1.0, 1e-10)
        assert r.evals >= r.panels * 15
        assert r.converged
        assert r.abs_error_estimate <= 1e-10


class TestSemiInfinite:
    def test_exponential(self):
        r = laplace_transform(lambda t: np.ones_like(t), 1.0, 1e-12)
        assert r.value == pytest.approx(1.0, abs=1e-12)
        assert r.converged

    def test_laplace_scaling(self):
        r = laplace_transform(lambda t: np.ones_like(t), 2.0, 1e-12)
        assert r.value == pytest.approx(0.5, abs=1e-12)

    def test_log_slow_tail(self):
        # int_e^inf dt/(t ln^2 t) = 1 through the exponential fold
        def f(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", over="ignore"):
                lg = np.log(t)
                out = np.where((t >= math.e) & np.isfinite(t), 1.0 / (t * lg * lg), 0.0)
            return out

        def wlog(u):
            u = np.asarray(u, dtype=float)
            return np.where(u >= 1.0, 1.0 / (u * u), 0.0)

        spec = IntegrandSpec(density=f, kernel=Kernel.raw(), breakpoints=(math.e,),
                             tail=TailHint.LOG_SLOW, log_weighted=wlog,
                             probe_zero=False)
        r = integrate_semi_infinite(spec, 1e-9)
        assert r.value == pytest.approx(1.0, abs=1e-9)

    def test_rho_over_t_divergent_at_zero(self):
        spec = IntegrandSpec(density=lambda t: rho(t) / t, kernel=Kernel.raw(),
                             breakpoints=(1.0, 1 + math.sqrt(2)),
                             tail=TailHint.LOG_SLOW)
        r = integrate_semi_infinite(spec, 1e-6)
        assert r.divergent
        assert not r.converged

    def test_candidate_A_stieltjes_divergent(self):
        r = stieltjes_transform(lambda t: sigma(t, candidate="A"), 1.0, 1e-6)
        assert r.divergent


class TestStieltjes:
    @pytest.mark.parametrize("z", list(CAUCHY_RHO))
    def test_rho_transform_matches_oracle(self, z):
        r = stieltjes_transform(rho_density, z, 1e-8)
        assert r.converged
        assert complex(r.value) == pytest.approx(CAUCHY_RHO[z], rel=5e-8)

    @pytest.mark.parametrize("z", list(CAUCHY_SIGMA))
    def test_sigma_transform_matches_oracle(self, z):
        r = stieltjes_transform(sigma_density, z, 1e-8)
        assert complex(r.value) == pytest.approx(CAUCHY_SIGMA[z], rel=1e-7)

    def test_complex_shares_panels(self):
        r = stieltjes_transform(rho_density, 1 + 1j, 1e-8)
        assert isinstance(r.value, complex)

    def test_conjugate_symmetry(self):
        a = complex(stieltjes_transform(rho_density, 2 + 1j, 1e-8).value)
        b = complex(stieltjes_transform(rho_density, 2 - 1j, 1e-8).value)
        assert b == pytest.approx(a.conjugate(), rel=1e-9)

    def test_rejects_cut(self):
        with pytest.raises(ValueError):
            stieltjes_transform(rho_density, -2.0, 1e-8)


class TestLevy:
    def test_vanishes_at_zero(self):
        small = levy_integral(levy_density_z2H_obj, 1e-4, 1e-7)
        assert abs(small.value) < 2e-2

    def test_z2H_at_one_matches_cauchy_transform(self):
        # Tonelli collapses the nested display to z * int rho/(t+z)
        r = levy_integral(levy_density_z2H_obj, 1.0, 1e-6)
        assert complex(r.value) == pytest.approx(CAUCHY_RHO[1.0], rel=3e-7)

    def test_invzH_at_one_matches_cauchy_transform(self):
        r = levy_integral(levy_density_invzH_obj, 1.0, 1e-5)
        assert complex(r.value) == pytest.approx(CAUCHY_SIGMA[1.0], rel=3e-5)

    def test_complex_point(self):
        z = 3 - 2j
        r = levy_integral(levy_density_z2H_obj, z, 1e-6)
        assert complex(r.value) == pytest.approx(z * CAUCHY_RHO[z], rel=1e-6)

    def test_requires_right_halfplane(self):
        with pytest.raises(ValueError):
            levy_integral(levy_density_z2H_obj, -1.0 + 1j, 1e-6)

    def test_two_call_paths_agree(self):
        # laplace of t*rho(t) equals the levy density evaluator
        def trho(t):
            t = np.asarray(t, dtype=float)
            return t * rho(t)

        spec = IntegrandSpec(density=trho, kernel=Kernel.laplace(1.0),
                             breakpoints=(1.0, 1 + math.sqrt(2)),
                             tail=TailHint.EXPONENTIAL, t_max=70.0)
        a = integrate_semi_infinite(spec, 1e-9)
        b = levy_density_z2H_obj(1.0, 1e-9)
        assert complex(a.value).real == pytest.approx(b, rel=1e-7)

    def test_undeclared_jump_still_converges(self):
        # without the declared breakpoint the engine must not accept a
        # stale panel across the density jump
        def trho(t):
            t = np.asarray(t, dtype=float)
            return t * rho(t)

        a = laplace_transform(trho, 1.0, 1e-9, t_max=70.0)
        b = levy_density_z2H_obj(1.0, 1e-9)
        assert complex(a.value).real == pytest.approx(b, rel=1e-6)
