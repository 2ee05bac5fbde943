"""Closed-form breather: validation, velocities, dual evaluation paths."""

import math

import numpy as np
import pytest

from gardner5 import (
    GridTooNarrowError,
    ParameterError,
    breather_integral,
    envelope_center,
    eval_GF,
    eval_approx,
    eval_arctan_derivative,
    eval_rational,
    sample_breather,
    sech_profile,
    validate_params,
    velocities,
)
from gardner5.fourier import Grid, l2_norm, mean

from conftest import breather_window, mp_breather, mp_breather_value, random_valid_params


class TestValidate:
    def test_valid_tuple(self):
        p = validate_params(2, 1, 0.3)
        assert p.delta == pytest.approx(4.64, abs=1e-14)

    def test_mkdv_limit(self):
        p = validate_params(1, 1, 0)
        assert p.delta == 2.0

    def test_delta_nonpositive(self):
        with pytest.raises(ParameterError, match="Delta"):
            validate_params(1, 1, 1)  # Delta = -2

    def test_alpha_nonpositive(self):
        with pytest.raises(ParameterError, match="alpha"):
            validate_params(-2, 1, 0.1)

    def test_beta_nonpositive(self):
        with pytest.raises(ParameterError, match="beta"):
            validate_params(2, 0, 0.1)

    def test_mu_negative(self):
        with pytest.raises(ParameterError, match="mu"):
            validate_params(2, 1, -0.1)


class TestVelocities:
    @pytest.mark.parametrize(
        "abm,expected",
        [
            ((1, 1, 0), (4.0, 4.0)),
            ((2, 1, 0), (19.0, -41.0)),
            ((2, 1, 0.3), (19.657, -31.343)),
        ],
    )
    def test_examples(self, abm, expected):
        d5, g5 = velocities(validate_params(*abm))
        assert d5 == pytest.approx(expected[0], rel=1e-13)
        assert g5 == pytest.approx(expected[1], rel=1e-13)


class TestEvalGF:
    def test_identity_point(self):
        g, f, log_scale = eval_GF(validate_params(1, 1, 0), 0.0, 0.0)
        assert g == 0.0
        assert f == 1.0
        assert log_scale == 0.0

    def test_against_mp_oracle(self):
        p = validate_params(2, 1, 0.3)
        g, f, log_scale = eval_GF(p, 0.0, 0.5)
        G, F, _ = mp_breather(p, 0.0, 0.5)
        assert log_scale == 0.0
        assert g == pytest.approx(float(G), rel=1e-12)
        assert f == pytest.approx(float(F), rel=1e-12)

    def test_overflow_regime(self):
        # beta*y2 = 800: raw cosh overflows, the rescaled quotient must not
        p = validate_params(2, 1, 0.3)
        g, f, log_scale = eval_GF(p, 0.0, 800.0)
        assert np.isfinite(g) and np.isfinite(f)
        assert log_scale == pytest.approx(200.0, abs=1e-9)
        G, F, _ = mp_breather(p, 0.0, 800.0, dps=500)
        assert g / f == pytest.approx(float(G / F), rel=1e-12)


class TestRational:
    def test_mkdv_peak_value(self):
        # direct evaluation of 2M/N at the origin for alpha = beta = 1, mu = 0
        p = validate_params(1, 1, 0)
        b = eval_rational(p, 0.0, np.array([0.0]))[0]
        assert b == pytest.approx(2.0, abs=1e-14)
        assert b == pytest.approx(mp_breather_value(p, 0.0, 0.0), rel=1e-13)

    def test_matches_mp_oracle_along_line(self, rng):
        for _ in range(10):
            p = random_valid_params(rng)
            t = float(rng.uniform(-0.5, 0.5))
            xc = envelope_center(p, t)
            xs = xc + rng.uniform(-5 / p.beta, 5 / p.beta, size=6)
            got = eval_rational(p, t, xs)
            want = [mp_breather_value(p, t, x) for x in xs]
            np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-13)

    def test_schwartz_decay_to_zero(self):
        p = validate_params(2, 1, 0.3)
        far = eval_rational(p, 0.0, np.array([-1e7, -500.0, 500.0, 1e7]))
        assert np.max(np.abs(far[:1])) == 0.0
        assert np.max(np.abs(far)) < 1e-100

    def test_overflow_safe_at_huge_offsets(self):
        p = validate_params(2, 1, 0.3)
        vals = eval_rational(p, 0.0, np.array([800.0, -800.0, 9.5e3]))
        assert np.all(np.isfinite(vals))

    def test_cross_path_point(self):
        # rational vs spectral-arctan path at a single probe point
        p = validate_params(2, 1, 0.3)
        t = 0.1
        grid = breather_window(p, t)
        arct = eval_arctan_derivative(p, t, grid)
        j = int(np.argmin(np.abs(grid.nodes - 1.0)))
        rat = eval_rational(p, t, grid.nodes[j])
        assert rat == pytest.approx(arct.values[j], abs=1e-9)

    def test_translation_covariance(self, rng):
        for _ in range(20):
            p = random_valid_params(rng)
            c = float(rng.uniform(-10, 10))
            t = float(rng.uniform(-0.3, 0.3))
            x = float(rng.uniform(-3, 3)) + envelope_center(p, t)
            shifted = validate_params(p.alpha, p.beta, p.mu, p.x1 + c, p.x2 + c)
            a = eval_rational(shifted, t, x)
            b = eval_rational(p, t, x + c)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-300)

    def test_mu_to_zero_continuity(self):
        x = np.linspace(-20, 20, 257)
        near = eval_rational(validate_params(2, 1, 1e-8), 0.0, x)
        limit = eval_rational(validate_params(2, 1, 0), 0.0, x)
        assert np.max(np.abs(near - limit)) < 1e-6


class TestSchwartzDecay:
    def test_envelope_bound(self, rng):
        # |B(t, xc +- w)| <= 10 beta exp(-0.95 beta w) far into the tails
        for _ in range(50):
            p = random_valid_params(rng)
            t = float(rng.uniform(-0.5, 0.5))
            xc = envelope_center(p, t)
            for w in (5.0 / p.beta, 20.0 / p.beta, 100.0 / p.beta, 1e4 / p.beta):
                cap = 10.0 * p.beta * math.exp(-p.beta * w * 0.95)
                vals = eval_rational(p, t, np.array([xc - w, xc + w]))
                assert np.max(np.abs(vals)) <= cap


class TestArctanPath:
    def test_agrees_with_rational(self, rng):
        for _ in range(25):
            p = random_valid_params(rng)
            t = float(rng.uniform(-0.5, 0.5))
            grid = breather_window(p, t)
            arct = eval_arctan_derivative(p, t, grid).values
            rat = eval_rational(p, t, grid.nodes)
            cap = 1e-9 * (1.0 + np.max(np.abs(rat)))
            assert np.max(np.abs(arct - rat)) <= cap

    def test_mkdv_against_mp_oracle(self):
        p = validate_params(1, 1, 0)
        grid = breather_window(p, 0.0)
        arct = eval_arctan_derivative(p, 0.0, grid)
        idx = np.linspace(0, grid.points - 1, 9, dtype=int)
        want = [mp_breather_value(p, 0.0, grid.nodes[j]) for j in idx]
        np.testing.assert_allclose(arct.values[idx], want, rtol=1e-10, atol=1e-12)

    def test_narrow_grid_rejected(self):
        p = validate_params(2, 1, 0.3)
        grid = Grid(0.0, 14.0, 512)  # envelope decay only ~1e-3 at the edges
        with pytest.raises(GridTooNarrowError):
            eval_arctan_derivative(p, 0.0, grid)


class TestApprox:
    def test_peak(self):
        p = validate_params(16, 0.5, 0.05)
        assert eval_approx(p, 0.0, 0.0) == pytest.approx(2 * p.beta, rel=1e-14)

    def test_gap_shrinks_with_alpha(self):
        # fixed beta = 1; beta/alpha = 1/16 vs 1/64
        gaps = []
        for alpha in (16.0, 64.0):
            p = validate_params(alpha, 1.0, 0.0)
            grid = breather_window(p, 0.0, carrier_mult=10.0)
            x = grid.nodes
            gaps.append(np.max(np.abs(eval_rational(p, 0.0, x) - eval_approx(p, 0.0, x))))
        assert gaps[1] < gaps[0]

    def test_monotone_convergence(self):
        gaps = []
        for alpha in (16.0, 32.0, 64.0):
            p = validate_params(alpha, 1.0, 0.0)
            grid = breather_window(p, 0.0, carrier_mult=10.0)
            x = grid.nodes
            gaps.append(np.max(np.abs(eval_rational(p, 0.0, x) - eval_approx(p, 0.0, x))))
        assert gaps[0] > gaps[1] > gaps[2]

    def test_q_peak(self):
        assert sech_profile(1.0, 0.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)


class TestSechProfile:
    def test_ode_residual(self):
        # Q'' - Q + Q^3 = 0 with the exact second derivative of sech
        xi = np.linspace(-10, 10, 101)
        q = sech_profile(1.0, xi)
        s = 1 / np.cosh(xi)
        qpp = math.sqrt(2.0) * s * (1.0 - 2.0 * s**2)  # (sech)'' = sech(1 - 2 sech^2)
        residual = qpp - q + q**3
        assert np.max(np.abs(residual)) <= 1e-12

    def test_scaled_peak(self):
        assert sech_profile(0.0625, 0.0) == pytest.approx(
            math.sqrt(2.0) * 0.0625, rel=1e-15
        )

    def test_beta_positive_required(self):
        with pytest.raises(ParameterError):
            sech_profile(0.0, 1.0)


class TestEnvelopeCenter:
    def test_origin(self):
        assert envelope_center(validate_params(2, 1, 0.3), 0.0) == 0.0

    def test_travel(self):
        c = envelope_center(validate_params(2, 1, 0.3), 1.0)
        assert c == pytest.approx(31.343, rel=1e-13)

    def test_phase_shift(self):
        p = validate_params(2, 1, 0.3, 0.0, 5.0)
        assert envelope_center(p, 0.0) == -5.0


class TestIntegral:
    def test_closed_form_integral(self, rng):
        # window integral h*sum(B) equals 2*arctan(-4 mu beta / Delta);
        # it vanishes only at mu = 0
        for _ in range(8):
            p = random_valid_params(rng)
            fld = sample_breather(p, 0.0, breather_window(p, 0.0))
            want = breather_integral(p)
            assert mean(fld) == pytest.approx(want, abs=1e-10 * (1 + l2_norm(fld)))

    def test_zero_mean_at_mu_zero(self, rng):
        for _ in range(5):
            p = random_valid_params(rng, mu_zero=True)
            fld = sample_breather(p, 0.0, breather_window(p, 0.0))
            assert abs(mean(fld)) <= 1e-10 * (1.0 + l2_norm(fld))
