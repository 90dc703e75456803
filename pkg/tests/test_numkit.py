"""Tests for the shared numerical kernel."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonholo.distributions import car_fields
from nonholo.errors import NonFinite, StepSizeUnderflow
from nonholo.numkit import (
    Dual,
    PeriodicGrid1D,
    PeriodicGrid2D,
    Stepper,
    dealias_1d,
    generic_jacobian,
    integrate,
    jacobian,
    numerical_rank,
    spectral_derivative,
    spectral_partial_2d,
    step,
)


class TestSteppers:
    def test_zero_rhs_is_identity(self):
        rhs = lambda t, y: np.zeros_like(y)
        t, y, dt = step(rhs, 0.0, np.array([1.0, -2.0]), Stepper.rk4(0.1))
        assert t == 0.1 and np.array_equal(y, [1.0, -2.0])

    def test_rk4_single_step_matches_exponential(self):
        rhs = lambda t, y: y
        _, y, _ = step(rhs, 0.0, np.array([1.0]), Stepper.rk4(0.1))
        # one classical step carries the dt^5/5! truncation term, about 8.5e-8
        assert abs(y[0] - np.exp(0.1)) < 1e-7
        _, y_fine, _ = step(rhs, 0.0, np.array([1.0]), Stepper.rk4(0.01))
        assert abs(y_fine[0] - np.exp(0.01)) < 1e-12

    def test_rk45_matches_exponential_within_tolerance(self):
        rhs = lambda t, y: y
        times, states = integrate(rhs, [1.0], (0.0, 1.0), Stepper.rk45(atol=1e-10, rtol=1e-10))
        assert abs(states[-1, 0] - np.e) < 1e-7

    def test_blow_up_raises(self):
        rhs = lambda t, y: y * y
        with pytest.raises((NonFinite, StepSizeUnderflow)):
            integrate(rhs, [1.0], (0.0, 1.001), Stepper.rk45(dt_min=1e-10))

    def test_rk4_fourth_order_convergence(self):
        rhs = lambda t, y: y
        errs = []
        for dt in (0.02, 0.01):
            _, states = integrate(rhs, [1.0], (0.0, 1.0), Stepper.rk4(dt))
            errs.append(abs(states[-1, 0] - np.e))
        ratio = errs[0] / errs[1]
        assert 16 * 0.9 < ratio < 16 * 1.1

    def test_record_every(self):
        rhs = lambda t, y: -y
        times, states = integrate(rhs, [1.0], (0.0, 1.0), Stepper.rk4(0.01), record_every=10)
        assert len(times) == 11
        assert np.allclose(np.diff(times), 0.1)

    def test_nonfinite_initial_state(self):
        with pytest.raises(NonFinite):
            integrate(lambda t, y: y, [np.nan], (0.0, 1.0), Stepper.rk4(0.1))


class TestDual:
    def test_jacobian_identity(self):
        J = jacobian(lambda p: list(p), [0.3, -0.7, 2.0])
        assert np.array_equal(J, np.eye(3))

    def test_jacobian_hand_case(self):
        f = lambda p: [p[0] * p[1], p[0] + p[1]]
        J = jacobian(f, [2.0, 3.0])
        assert np.array_equal(J, [[3.0, 2.0], [1.0, 1.0]])

    def test_jacobian_matches_finite_differences_on_drive(self):
        drive = car_fields(1.0).generators[1]
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = rng.uniform(-0.6, 0.6, size=4)
            J = jacobian(drive.func, p)
            h = 1e-5
            for j in range(4):
                e = np.zeros(4)
                e[j] = h
                fd = (np.array(drive.func(p + e), dtype=float)
                      - np.array(drive.func(p - e), dtype=float)) / (2 * h)
                assert np.abs(J[:, j] - fd).max() < 1e-6

    def test_nested_differentiation(self):
        # d^2/dx^2 of x^3 via two tagged passes
        def first(p):
            rows = generic_jacobian(lambda q: [q[0] * q[0] * q[0]], p)
            return [rows[0][0]]

        second = generic_jacobian(first, [2.0])
        assert abs(second[0][0] - 12.0) < 1e-12

    def test_chain_rule_functions(self):
        x = Dual(0.7, 1.0, tag=1)
        y = (x.sin() * x.exp()).sqrt()
        v = np.sqrt(np.sin(0.7) * np.exp(0.7))
        dv = (np.cos(0.7) * np.exp(0.7) + np.sin(0.7) * np.exp(0.7)) / (2 * v)
        assert abs(y.val - v) < 1e-14 and abs(y.dot - dv) < 1e-13


class TestRank:
    def test_dependent_triple(self):
        e1, e2 = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
        assert numerical_rank([e1, e2, e1 + e2]) == 2

    def test_empty_and_zero(self):
        assert numerical_rank([]) == 0
        assert numerical_rank([np.zeros(4), np.zeros(4)]) == 0

    def test_hidden_rank_three(self):
        rng = np.random.default_rng(0)
        basis = rng.normal(size=(3, 8))
        vectors = rng.normal(size=(5, 3)) @ basis
        assert numerical_rank(list(vectors)) == 3

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_invariant_under_permutation_and_scaling(self, seed):
        rng = np.random.default_rng(seed)
        vectors = rng.normal(size=(4, 5))
        base = numerical_rank(list(vectors))
        perm = rng.permutation(4)
        scales = rng.choice([-3.0, 0.5, 2.0, -1.0], size=4)
        scaled = [scales[i] * vectors[perm[i]] for i in range(4)]
        assert numerical_rank(scaled) == base


class TestSpectral:
    def test_sin_first_derivative(self):
        x = np.arange(64) * (2 * np.pi / 64)
        d = spectral_derivative(np.sin(x), 1)
        assert np.abs(d - np.cos(x)).max() < 1e-12

    def test_constant_any_order(self):
        for order in (1, 2, 3):
            assert np.abs(spectral_derivative(np.full(32, 4.2), order)).max() < 1e-13

    def test_second_derivative(self):
        x = np.arange(64) * (2 * np.pi / 64)
        d = spectral_derivative(np.sin(x), 2)
        assert np.abs(d + np.sin(x)).max() < 1e-12

    def test_mode_exactness(self):
        n = 64
        x = np.arange(n) * (2 * np.pi / n)
        for k in (1, 5, 17, 31):
            for order in (1, 2, 3):
                d = spectral_derivative(np.cos(k * x), order)
                expected = {
                    1: -k * np.sin(k * x),
                    2: -k * k * np.cos(k * x),
                    3: k**3 * np.sin(k * x),
                }[order]
                assert np.abs(d - expected).max() < 1e-8 * max(1.0, k**order)

    def test_nyquist_zeroed_for_odd_orders(self):
        n = 32
        x = np.arange(n) * (2 * np.pi / n)
        nyq = np.cos((n // 2) * x)
        assert np.abs(spectral_derivative(nyq, 1)).max() < 1e-12

    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            spectral_derivative(np.zeros(48), 1)

    def test_2d_partials(self):
        n = 32
        x = np.arange(n) * (2 * np.pi / n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        f = np.sin(X) * np.cos(2 * Y)
        dx = spectral_partial_2d(f, 1, 0)
        dy = spectral_partial_2d(f, 1, 1)
        assert np.abs(dx - np.cos(X) * np.cos(2 * Y)).max() < 1e-11
        assert np.abs(dy + 2 * np.sin(X) * np.sin(2 * Y)).max() < 1e-11

    def test_dealias_removes_tail(self):
        n = 64
        x = np.arange(n) * (2 * np.pi / n)
        f = np.cos(3 * x) + np.cos(30 * x)
        g = dealias_1d(f)
        assert np.abs(g - np.cos(3 * x)).max() < 1e-12

    def test_grid_wrappers(self):
        n = 64
        g = PeriodicGrid1D(np.sin(np.arange(n) * (2 * np.pi / n)))
        assert abs(g.integral()) < 1e-13
        assert np.abs(g.derivative(1).values - np.cos(g.nodes)).max() < 1e-12
        x = np.arange(32) * (2 * np.pi / 32)
        X, Y = np.meshgrid(x, x, indexing="ij")
        g2 = PeriodicGrid2D(1.0 + np.sin(X + Y))
        assert abs(g2.integral() - (2 * np.pi) ** 2) < 1e-10
