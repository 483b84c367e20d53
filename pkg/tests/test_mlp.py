import numpy as np
import pytest

from tierkb import dataset as ds
from tierkb import learners as L
from tierkb.errors import DivergenceError, EmptyDatasetError, SchemaError
from tierkb.learners import mlp as mlp_mod
from tierkb.learners.mlp import (
    batch_loss,
    default_hidden_size,
    init_weights,
    loss_and_gradients,
)

from .test_tree import toy_dataset


def finite_difference_gradients(X, T, w1, b1, w2, b2, eps=1e-5):
    """Central-difference oracle for every parameter."""
    grads = []
    for arr in (w1, b1, w2, b2):
        g = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            up = batch_loss(X, T, w1, b1, w2, b2)
            arr[idx] = orig - eps
            down = batch_loss(X, T, w1, b1, w2, b2)
            arr[idx] = orig
            g[idx] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


class TestGradients:
    def test_analytic_matches_central_differences(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(10, 3))
        T = np.eye(2)[rng.integers(0, 2, 10)]
        w1, b1, w2, b2 = init_weights(3, 4, 2, seed=1)
        _, *analytic = loss_and_gradients(X, T, w1, b1, w2, b2)
        numeric = finite_difference_gradients(X, T, w1, b1, w2, b2)
        assert max_relative_error(analytic, numeric) < 1e-4

    def test_twenty_random_networks(self):
        rng = np.random.default_rng(7)
        for trial in range(20):
            a = int(rng.integers(1, 5))
            h = int(rng.integers(1, 6))
            c = int(rng.integers(2, 5))
            n = int(rng.integers(2, 9))
            X = rng.normal(size=(n, a))
            T = np.eye(c)[rng.integers(0, c, n)]
            w1, b1, w2, b2 = init_weights(a, h, c, seed=trial)
            # larger weights exercise the nonlinear regime too
            w1 *= 10 * rng.uniform(0.1, 1.0)
            w2 *= 10 * rng.uniform(0.1, 1.0)
            _, *analytic = loss_and_gradients(X, T, w1, b1, w2, b2)
            numeric = finite_difference_gradients(X, T, w1, b1, w2, b2)
            assert max_relative_error(analytic, numeric) < 1e-4


class TestTrainer:
    def test_compiled_step_matches_reference_gradient_step(self):
        # one epoch over one instance with zero momentum is exactly w - lr*grad
        rng = np.random.default_rng(3)
        X = rng.normal(size=(1, 3))
        T = np.array([[1.0, 0.0]])
        w1, b1, w2, b2 = init_weights(3, 4, 2, seed=5)
        _, gw1, gb1, gw2, gb2 = loss_and_gradients(X, T, w1, b1, w2, b2)
        expect = (w1 - 0.3 * gw1, b1 - 0.3 * gb1, w2 - 0.3 * gw2, b2 - 0.3 * gb2)

        got = (w1.copy(), b1.copy(), w2.copy(), b2.copy())
        losses = np.zeros(1)
        mlp_mod._sgd_train(
            X, T, *got, 0.3, 0.0, np.zeros((1, 1), dtype=np.int64), losses
        )
        for g, e in zip(got, expect):
            assert g == pytest.approx(e, rel=1e-12)

    def test_default_hidden_size_matches_convention(self):
        assert default_hidden_size(9, 7) == 8
        assert default_hidden_size(3, 2) == 2
        assert default_hidden_size(1, 2) == 2

    def test_training_is_deterministic(self):
        data = toy_dataset([1, 2, 3, 8, 9, 10], ["a"] * 3 + ["b"] * 3)
        m1 = L.train_mlp(data, L.MlpParams(epochs=20, seed=4))
        m2 = L.train_mlp(data, L.MlpParams(epochs=20, seed=4))
        assert L.save_model(m1) == L.save_model(m2)

    def test_learns_linearly_separable_toy(self):
        data = toy_dataset([1, 2, 3, 8, 9, 10], ["a"] * 3 + ["b"] * 3)
        model = L.train_mlp(data, L.MlpParams(epochs=200, seed=0))
        assert all(L.predict_label(model, inst) == inst.label for inst in data.instances)

    def test_empty_dataset_rejected(self):
        schema = toy_dataset([1], ["a"]).schema
        with pytest.raises(EmptyDatasetError):
            L.train_mlp(ds.Dataset(schema=schema, instances=()))

    def test_divergence_reports_epoch(self, monkeypatch):
        # bounded sigmoid outputs cannot overflow organically, so simulate a
        # kernel that reports a non-finite epoch loss
        def bad_kernel(X, T, w1, b1, w2, b2, lr, momentum, orders, losses):
            losses[:3] = 1.0
            losses[3] = np.nan
            return losses

        monkeypatch.setattr(mlp_mod, "_sgd_train", bad_kernel)
        data = toy_dataset([1, 2, 8, 9], ["a", "a", "b", "b"])
        with pytest.raises(DivergenceError) as err:
            L.train_mlp(data, L.MlpParams(epochs=10, seed=0))
        assert err.value.epoch == 3


class TestModel:
    def test_zero_weights_give_uniform_half_activations(self):
        data = toy_dataset([1, 2, 8, 9], ["a", "a", "b", "b"])
        trained = L.train_mlp(data, L.MlpParams(epochs=1, seed=0))
        model = L.MlpModel(
            schema=trained.schema,
            params=trained.params,
            input_mean=trained.input_mean,
            input_std=trained.input_std,
            w1=np.zeros_like(trained.w1),
            b1=np.zeros_like(trained.b1),
            w2=np.zeros_like(trained.w2),
            b2=np.zeros_like(trained.b2),
        )
        out = model.activations((3.0,))
        assert out == pytest.approx(np.full(2, 0.5))
        assert model.predict_proba((3.0,)) == pytest.approx(np.full(2, 0.5))

    def test_distribution_sums_to_one(self):
        g = ds.load_glass()
        model = L.train_mlp(g.subset(range(60)), L.MlpParams(epochs=30, seed=2))
        for inst in g.instances[:10]:
            p = model.predict_proba(inst.values)
            assert p.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(p >= 0)

    def test_schema_mismatch_rejected(self):
        data = toy_dataset([1, 9], ["a", "b"])
        model = L.train_mlp(data, L.MlpParams(epochs=1, seed=0))
        with pytest.raises(SchemaError):
            model.predict_proba((1.0, 2.0))

    def test_shape_chain_validated(self):
        data = toy_dataset([1, 9], ["a", "b"])
        trained = L.train_mlp(data, L.MlpParams(epochs=1, seed=0))
        with pytest.raises(ValueError):
            L.MlpModel(
                schema=trained.schema,
                params=trained.params,
                input_mean=trained.input_mean,
                input_std=trained.input_std,
                w1=trained.w1,
                b1=np.zeros(99),
                w2=trained.w2,
                b2=trained.b2,
            )
