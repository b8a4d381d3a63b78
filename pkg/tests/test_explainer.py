import itertools
import math

import numpy as np
import pytest

from repgrid.core import SlidingWindow
from repgrid.errors import TooManyFeaturesError, UnivariateError
from repgrid.explainer import (
    Attribution,
    background_window,
    segment_features,
    shap_values,
    variable_features,
    variable_importance,
    window_correlation,
    window_shap_scalar,
)
from repgrid.forecaster import ModelConfig, forward, init_model


def make_window(shape, seed=0, horizon=4):
    rng = np.random.default_rng(seed)
    return SlidingWindow(
        index=0, start=0, input=rng.uniform(size=shape), target=rng.uniform(size=horizon)
    )


def orderings_oracle(predictor, window_input, background, features):
    """Average marginal contribution over all |F|! orderings."""
    n_feat = len(features)

    def value(subset):
        x = background.copy()
        for j in subset:
            x[features[j].mask] = window_input[features[j].mask]
        return float(predictor(x[None])[0].mean())

    phi = np.zeros(n_feat)
    for perm in itertools.permutations(range(n_feat)):
        seen = []
        prev = value(seen)
        for j in perm:
            seen.append(j)
            cur = value(seen)
            phi[j] += cur - prev
            prev = cur
    return phi / math.factorial(n_feat)


def additive_stub(weights):
    """Stub predictor: horizon output = per-variable weighted column means."""

    def predict(batch):
        means = batch.mean(axis=1)  # (B, k)
        scalar = means @ np.asarray(weights)
        return np.repeat(scalar[:, None], 2, axis=1)

    return predict


class TestShapValues:
    def test_additive_stub_closed_form(self):
        weights = np.array([2.0, -1.0, 0.5])
        predict = additive_stub(weights)
        window = make_window((6, 3), seed=1)
        background = np.random.default_rng(2).uniform(size=(6, 3))
        features = variable_features((6, 3), ["a", "b", "c"])
        att = shap_values(predict, window, background, features)
        expected = weights * (window.input.mean(axis=0) - background.mean(axis=0))
        assert np.allclose(att.phi, expected, atol=1e-12)
        oracle = orderings_oracle(predict, window.input, background, features)
        assert np.allclose(att.phi, oracle, atol=1e-12)

    def test_window_equals_background_all_zero(self):
        predict = additive_stub([1.0, 1.0])
        window = make_window((5, 2), seed=3)
        features = variable_features((5, 2), ["a", "b"])
        att = shap_values(predict, window, window.input.copy(), features)
        assert np.allclose(att.phi, 0.0, atol=1e-15)

    def test_additivity_identity_on_network(self):
        config = ModelConfig(
            horizon=3, seed=5, conv_filters=4, conv_kernel=2, lstm_units=6, dense_units=5
        )
        model = init_model(config, (9, 3))
        rng = np.random.default_rng(6)
        features = variable_features((9, 3), ["a", "b", "c"])
        background = rng.uniform(size=(9, 3))
        for seed in range(5):
            window = make_window((9, 3), seed=seed, horizon=3)
            att = shap_values(model, window, background, features)
            prediction_scalar = forward(model, window.input).mean()
            assert abs(att.base + att.phi.sum() - prediction_scalar) < 1e-9

    def test_exact_equals_orderings_oracle_on_network(self):
        config = ModelConfig(
            horizon=2, seed=8, conv_filters=3, conv_kernel=2, lstm_units=5, dense_units=4
        )
        model = init_model(config, (6, 1))
        rng = np.random.default_rng(9)
        features = segment_features((6, 1), 3)
        background = rng.uniform(size=(6, 1))
        window = make_window((6, 1), seed=10, horizon=2)

        def predictor(batch):
            from repgrid.forecaster import forward_batch

            return forward_batch(model, batch)

        att = shap_values(model, window, background, features)
        oracle = orderings_oracle(predictor, window.input, background, features)
        assert np.allclose(att.phi, oracle, atol=1e-12)

    def test_dummy_axiom(self):
        # feature c never influences the prediction
        predict = additive_stub([1.5, -2.0, 0.0])
        window = make_window((7, 3), seed=11)
        background = np.random.default_rng(12).uniform(size=(7, 3))
        features = variable_features((7, 3), ["a", "b", "c"])
        att = shap_values(predict, window, background, features)
        assert abs(att.phi[2]) < 1e-9

    def test_symmetry_axiom(self):
        def predict(batch):
            total = batch[:, :, 0].mean(axis=1) + batch[:, :, 1].mean(axis=1)
            return np.repeat(total[:, None], 2, axis=1)

        rng = np.random.default_rng(13)
        column = rng.uniform(size=5)
        window_input = np.column_stack([column, column, rng.uniform(size=5)])
        window = SlidingWindow(index=0, start=0, input=window_input, target=np.zeros(2))
        bg_col = rng.uniform(size=5)
        background = np.column_stack([bg_col, bg_col, rng.uniform(size=5)])
        features = variable_features((5, 3), ["a", "b", "c"])
        att = shap_values(predict, window, background, features)
        assert abs(att.phi[0] - att.phi[1]) < 1e-9

    def test_too_many_features(self):
        window = make_window((26, 1), seed=1)
        features = segment_features((26, 1), 13)
        with pytest.raises(TooManyFeaturesError):
            shap_values(additive_stub([1.0]), window, window.input.copy(), features)

    def test_segment_partition(self):
        features = segment_features((240, 1), 12)
        assert len(features) == 12
        stacked = np.sum([f.mask for f in features], axis=0)
        assert (stacked == 1).all()
        assert features[0].mask[:20].all()

    def test_background_window_is_mean(self):
        rng = np.random.default_rng(14)
        windows = [make_window((4, 2), seed=s) for s in range(6)]
        bg = background_window(windows)
        assert np.allclose(bg, np.mean([w.input for w in windows], axis=0), atol=1e-15)


class TestShapScalar:
    def test_zero_at_background(self):
        att = Attribution(window_id=0, base=0.7, phi=np.zeros(4), feature_labels=("a",) * 4)
        assert window_shap_scalar(att) == 0.0

    def test_equals_prediction_minus_base(self):
        config = ModelConfig(
            horizon=3, seed=21, conv_filters=3, conv_kernel=2, lstm_units=4, dense_units=4
        )
        model = init_model(config, (8, 1))
        background = np.random.default_rng(22).uniform(size=(8, 1))
        features = segment_features((8, 1), 4)
        for seed in range(8):
            window = make_window((8, 1), seed=seed, horizon=3)
            att = shap_values(model, window, background, features)
            prediction_scalar = forward(model, window.input).mean()
            assert window_shap_scalar(att) == pytest.approx(
                prediction_scalar - att.base, abs=1e-9
            )

    def test_sign_consistency_sweep(self):
        config = ModelConfig(
            horizon=2, seed=23, conv_filters=3, conv_kernel=2, lstm_units=4, dense_units=4
        )
        model = init_model(config, (6, 1))
        background = np.random.default_rng(24).uniform(size=(6, 1))
        features = segment_features((6, 1), 3)
        checked = 0
        for seed in range(100):
            window = make_window((6, 1), seed=seed, horizon=2)
            att = shap_values(model, window, background, features)
            prediction_scalar = forward(model, window.input).mean()
            delta = prediction_scalar - att.base
            if abs(delta) > 1e-12:
                assert math.copysign(1, window_shap_scalar(att)) == math.copysign(1, delta)
                checked += 1
        assert checked > 50


class TestWindowCorrelation:
    def test_perfect(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        assert window_correlation(x, x) == pytest.approx(1.0)

    def test_reversed_monotone(self):
        ramp = np.arange(1.0, 9.0)  # reversal is an affine flip: exactly -1
        assert window_correlation(ramp[::-1].copy(), ramp) == pytest.approx(-1.0, abs=1e-9)
        curved = np.array([1.0, 2.0, 3.0, 5.0, 9.0])
        assert window_correlation(curved[::-1].copy(), curved) < -0.8

    def test_constant_absent(self):
        assert window_correlation(np.array([1.0, 1.0, 1.0]), np.arange(3.0)) is None
        assert window_correlation(np.arange(3.0), np.full(3, 2.0)) is None


class TestVariableImportance:
    def test_single_informative_variable(self):
        predict = additive_stub([0.0, 3.0, 0.0])
        features = variable_features((5, 3), ["a", "b", "c"])
        rng = np.random.default_rng(30)
        atts = []
        background = rng.uniform(size=(5, 3))
        for seed in range(10):
            window = make_window((5, 3), seed=seed)
            atts.append(shap_values(predict, window, background, features))
        ranked = variable_importance(atts, 3)
        assert ranked[0][0] == "b"
        assert ranked[1][1] < 1e-12 and ranked[2][1] < 1e-12

    def test_univariate_rejected(self):
        att = Attribution(window_id=0, base=0.0, phi=np.zeros(3), feature_labels=("a", "b", "c"))
        with pytest.raises(UnivariateError):
            variable_importance([att], 1)

    def test_rank_by_id_not_position(self):
        # permuting the variable order must not change the ranking
        weights = {"a": 0.5, "b": 2.0, "c": 1.0}
        rng = np.random.default_rng(31)

        def run(order):
            w = [weights[name] for name in order]
            predict = additive_stub(w)
            features = variable_features((5, 3), order)
            background = rng.uniform(size=(5, 3))
            atts = [
                shap_values(predict, make_window((5, 3), seed=s), background, features)
                for s in range(12)
            ]
            return [label for label, _ in variable_importance(atts, 3)]

        assert run(["a", "b", "c"])[0] == "b"
        assert run(["c", "b", "a"])[0] == "b"

    def test_deterministic_tie_break(self):
        att = Attribution(
            window_id=0, base=0.0, phi=np.array([0.5, 0.5, 0.1]),
            feature_labels=("z", "a", "m"),
        )
        ranked = variable_importance([att], 3)
        assert [label for label, _ in ranked] == ["a", "z", "m"]
