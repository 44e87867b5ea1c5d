"""One-step map: clamping, box invariance, damping, Lipschitz behavior."""

import numpy as np
import pytest

from thickmarket import (
    DomainError,
    EquilibriumState,
    ModelParams,
    PeriodicSeries,
    apply_T,
    apply_T_damped,
    compute_affine_coefficients,
    compute_outputs,
    reservation_cutoffs,
)
from thickmarket.mapping import _step


def random_states(box, n, rng):
    X = rng.uniform(box.X_lo, box.X_hi, size=(n, 12))
    v = rng.uniform(box.v_lo, box.v_hi, size=(n, 12))
    return X, v


def pair_dist(X1, v1, X2, v2):
    return np.maximum(np.abs(X1 - X2).max(axis=-1), np.abs(v1 - v2).max(axis=-1))


@pytest.fixture()
def constant_setup(constant_params):
    coeffs = compute_affine_coefficients(constant_params.hazards,
                                         constant_params.beta,
                                         constant_params.u)
    return constant_params, coeffs


class TestMapStructure:
    def test_constant_inputs_give_constant_outputs(self, constant_setup):
        params, coeffs = constant_setup
        X = np.full(12, coeffs.box.X_lo)
        v = np.full(12, coeffs.box.v_lo)
        state = EquilibriumState.from_arrays(X, v, params, coeffs)
        out = apply_T(state, params, coeffs)
        assert np.ptp(out.X.values) == 0.0
        assert np.ptp(out.v.values) == 0.0
        assert np.ptp(out.epsilon.values) == 0.0

    def test_clamp_invariant(self, pre_params, pre_coeffs):
        rng = np.random.default_rng(2)
        X, v = random_states(pre_coeffs.box, 500, rng)
        _, _, eps_bar = _step(X, v, pre_params, pre_coeffs)
        assert np.all(eps_bar >= 0.0)
        assert np.all(eps_bar <= v)

    def test_box_self_mapping(self, pre_params, pre_coeffs):
        rng = np.random.default_rng(3)
        X, v = random_states(pre_coeffs.box, 2000, rng)
        Xn, vn, _ = _step(X, v, pre_params, pre_coeffs)
        box = pre_coeffs.box
        assert np.all(Xn >= box.X_lo) and np.all(Xn <= box.X_hi)
        assert np.all(vn >= box.v_lo) and np.all(vn <= box.v_hi)

    def test_cutoffs_consistent_on_state(self, pre_params, pre_coeffs):
        rng = np.random.default_rng(4)
        X, v = random_states(pre_coeffs.box, 1, rng)
        state = EquilibriumState.from_arrays(X[0], v[0], pre_params, pre_coeffs)
        expected = reservation_cutoffs(X[0], v[0], pre_params, pre_coeffs)
        assert np.array_equal(state.epsilon.values, expected)


class TestDamping:
    def test_lambda_one_is_bitwise_identical(self, pre_params, pre_coeffs):
        rng = np.random.default_rng(5)
        X, v = random_states(pre_coeffs.box, 1, rng)
        state = EquilibriumState.from_arrays(X[0], v[0], pre_params, pre_coeffs)
        a = apply_T(state, pre_params, pre_coeffs)
        b = apply_T_damped(state, 1.0, pre_params, pre_coeffs)
        assert np.array_equal(a.X.values, b.X.values)
        assert np.array_equal(a.v.values, b.v.values)
        assert np.array_equal(a.epsilon.values, b.epsilon.values)

    def test_small_lambda_is_convex_combination(self, pre_params, pre_coeffs):
        rng = np.random.default_rng(6)
        X, v = random_states(pre_coeffs.box, 1, rng)
        state = EquilibriumState.from_arrays(X[0], v[0], pre_params, pre_coeffs)
        full = apply_T(state, pre_params, pre_coeffs)
        damped = apply_T_damped(state, 0.01, pre_params, pre_coeffs)
        assert np.allclose(damped.X.values,
                           0.99 * state.X.values + 0.01 * full.X.values,
                           rtol=0, atol=1e-14)
        assert np.allclose(damped.v.values,
                           0.99 * state.v.values + 0.01 * full.v.values,
                           rtol=0, atol=1e-14)

    def test_invalid_lambda_rejected(self, pre_params, pre_coeffs):
        state = EquilibriumState.from_arrays(
            np.full(12, pre_coeffs.box.X_lo), np.full(12, pre_coeffs.box.v_lo),
            pre_params, pre_coeffs)
        for lam in (0.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                apply_T_damped(state, lam, pre_params, pre_coeffs)

    def test_fixed_point_preserved_for_any_lambda(self, pre_params,
                                                  pre_solution_tight,
                                                  pre_coeffs):
        state = pre_solution_tight.state
        for lam in (0.01, 0.3, 1.0):
            out = apply_T_damped(state, lam, pre_params, pre_coeffs)
            diff = max(np.abs(out.X.values - state.X.values).max(),
                       np.abs(out.v.values - state.v.values).max())
            assert diff < 1e-8


class TestLipschitzBound:
    """The one-step map obeys the stated constant on random pairs in the box."""

    @pytest.mark.parametrize("calibration", ["pre", "post", "constant"])
    def test_undamped_bound_on_random_pairs(self, calibration, pre_params,
                                            post_hazards, constant_params,
                                            beta_pair):
        if calibration == "pre":
            params = pre_params
        elif calibration == "constant":
            params = constant_params
        else:
            beta_hat, _ = beta_pair
            params = ModelParams(beta_hat=beta_hat, delta=0.025, theta=0.5,
                                 u=0.0012, hazards=post_hazards)
        coeffs = compute_affine_coefficients(params.hazards, params.beta,
                                             params.u)
        kappa = (params.beta + (coeffs.A_max / coeffs.A_min)
                 * (params.beta + coeffs.Wstar))
        rng = np.random.default_rng(7)
        X1, v1 = random_states(coeffs.box, 1000, rng)
        X2, v2 = random_states(coeffs.box, 1000, rng)
        TX1, Tv1, _ = _step(X1, v1, params, coeffs)
        TX2, Tv2, _ = _step(X2, v2, params, coeffs)
        ratios = pair_dist(TX1, Tv1, TX2, Tv2) / pair_dist(X1, v1, X2, v2)
        assert np.all(ratios <= kappa)


class TestOutputs:
    def test_cutoff_at_upper_support_kills_trade(self, pre_params, pre_coeffs):
        v = np.full(12, 0.5)
        state = EquilibriumState(
            X=PeriodicSeries(np.full(12, pre_coeffs.box.X_lo)),
            v=PeriodicSeries(v),
            epsilon=PeriodicSeries(v.copy()),
        )
        Q, _ = compute_outputs(state, pre_params, pre_coeffs)
        assert np.all(Q.values == 0.0)

    def test_zero_bargaining_weight_gives_flat_price(self, beta_pair,
                                                     pre_hazards):
        beta_hat, beta = beta_pair
        params = ModelParams(beta_hat=beta_hat, delta=0.025, theta=0.0,
                             u=0.5, hazards=pre_hazards)
        coeffs = compute_affine_coefficients(pre_hazards, beta, 0.5)
        rng = np.random.default_rng(8)
        X = rng.uniform(coeffs.box.X_lo, coeffs.box.X_hi, 12)
        v = rng.uniform(coeffs.box.v_lo, coeffs.box.v_hi, 12)
        state = EquilibriumState.from_arrays(X, v, params, coeffs)
        _, P = compute_outputs(state, params, coeffs)
        expected = 0.5 / (1.0 - beta)
        assert np.abs(P.values - expected).max() < 1e-12 * expected

    def test_transactions_never_negative(self, pre_params, pre_coeffs):
        rng = np.random.default_rng(9)
        X, v = random_states(pre_coeffs.box, 50, rng)
        for i in range(50):
            state = EquilibriumState.from_arrays(X[i], v[i], pre_params,
                                                 pre_coeffs)
            Q, _ = compute_outputs(state, pre_params, pre_coeffs)
            assert np.all(Q.values >= 0.0)
