import numpy as np
import pytest

from biaslab import nets
from biaslab.nets import (
    AdamState,
    NetworkParams,
    adam_step,
    forward,
    grad_dpg,
    grad_mse,
    init_network,
    load_networks,
    save_networks,
    soft_update,
)


def random_net(rng, sizes, bounded=False):
    if bounded:
        out = sizes[-1]
        return init_network(sizes, rng, np.full(out, -2.0), np.full(out, 2.0))
    return init_network(sizes, rng)


def flatten_params(net):
    return np.concatenate([w.ravel() for w in net.weights]
                          + [b.ravel() for b in net.biases])


def set_flat(net, flat):
    i = 0
    for arr in net.weights + net.biases:
        arr.flat[:] = flat[i : i + arr.size]
        i += arr.size


def flatten_grads(grads):
    gw, gb = grads
    return np.concatenate([g.ravel() for g in gw] + [g.ravel() for g in gb])


class TestForward:
    def test_zero_net_maps_to_zero(self):
        net = NetworkParams(
            [np.zeros((3, 4)), np.zeros((4, 1))], [np.zeros(4), np.zeros(1)]
        )
        assert np.all(forward(net, np.ones(3)) == 0)

    def test_identity_affine_layer(self):
        net = NetworkParams([np.eye(3)], [np.zeros(3)])
        x = np.array([0.3, -1.2, 4.0])
        assert np.allclose(forward(net, x), x)

    def test_batch_matches_per_sample(self):
        rng = np.random.default_rng(0)
        net = random_net(rng, [5, 16, 16, 2])
        xs = rng.standard_normal((7, 5))
        batch = forward(net, xs)
        singles = np.stack([forward(net, x) for x in xs])
        # BLAS picks different kernels for batch vs single rows; agreement
        # is to rounding, not bit-exact
        assert np.allclose(batch, singles, rtol=0, atol=1e-12)

    def test_shape_mismatch(self):
        rng = np.random.default_rng(1)
        net = random_net(rng, [5, 8, 1])
        with pytest.raises(ValueError):
            forward(net, np.zeros(4))

    def test_bounded_output_stays_in_box(self):
        rng = np.random.default_rng(2)
        net = random_net(rng, [3, 16, 1], bounded=True)
        xs = rng.standard_normal((100, 3)) * 50
        y = forward(net, xs)
        assert np.all(y >= -2.0) and np.all(y <= 2.0)


class TestGradMse:
    def test_zero_loss_zero_gradient(self):
        rng = np.random.default_rng(3)
        net = random_net(rng, [4, 8, 1])
        x = rng.standard_normal((6, 4))
        targets = forward(net, x)
        grads, loss = grad_mse(net, x, targets)
        assert loss == 0.0
        assert np.all(flatten_grads(grads) == 0)

    def test_single_linear_unit(self):
        w = 1.7
        net = NetworkParams([np.array([[w]])], [np.zeros(1)])
        x = np.array([[2.0]])
        t = np.array([[1.0]])
        grads, loss = grad_mse(net, x, t)
        # d/dw mean (wx - t)^2 = 2 (wx - t) x
        assert grads[0][0][0, 0] == pytest.approx(2 * (w * 2 - 1) * 2, abs=1e-12)
        assert loss == pytest.approx((w * 2 - 1) ** 2, abs=1e-12)

    def test_finite_differences_small_nets(self):
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(20):
            net = random_net(rng, [3, 10, 7, 1])
            x = rng.standard_normal((5, 3))
            t = rng.standard_normal((5, 1))
            grads, _ = grad_mse(net, x, t)
            g = flatten_grads(grads)
            flat = flatten_params(net)
            idx = rng.integers(0, flat.size, size=20)
            for i in idx:
                fp = flat.copy()
                fp[i] += h
                set_flat(net, fp)
                lp = grad_mse(net, x, t)[1]
                fm = flat.copy()
                fm[i] -= h
                set_flat(net, fm)
                lm = grad_mse(net, x, t)[1]
                set_flat(net, flat)
                fd = (lp - lm) / (2 * h)
                denom = max(abs(fd), abs(g[i]), 1e-8)
                assert abs(fd - g[i]) / denom <= 1e-4

    def test_batch_length_mismatch(self):
        rng = np.random.default_rng(5)
        net = random_net(rng, [3, 4, 1])
        with pytest.raises(ValueError):
            grad_mse(net, rng.standard_normal((4, 3)), rng.standard_normal((5, 1)))


class TestGradDpg:
    def test_constant_critic_gives_zero_gradient(self):
        rng = np.random.default_rng(6)
        actor = random_net(rng, [3, 8, 1], bounded=True)
        critic = NetworkParams(
            [np.zeros((4, 8)), np.zeros((8, 1))], [np.zeros(8), np.array([5.0])]
        )
        grads, mean_q = grad_dpg(actor, critic, rng.standard_normal((6, 3)))
        assert mean_q == 5.0
        assert np.all(flatten_grads(grads) == 0)

    def test_linear_chain_rule(self):
        # critic Q(s, a) = -(a - 2 s)^2 is not dense-representable; use the
        # linear case Q(s, a) = 3 a with a linear unbounded actor a = w s
        actor = NetworkParams([np.array([[0.7]])], [np.zeros(1)])
        critic = NetworkParams([np.array([[0.0], [3.0]])], [np.zeros(1)])
        states = np.array([[1.5], [-2.0]])
        grads, _ = grad_dpg(actor, critic, states)
        # d/dw mean(3 w s) = 3 mean(s)
        assert grads[0][0][0, 0] == pytest.approx(3 * states.mean(), abs=1e-12)

    def test_finite_differences_actor_params(self):
        rng = np.random.default_rng(7)
        h = 1e-6
        for _ in range(10):
            actor = random_net(rng, [3, 10, 2], bounded=True)
            critic = random_net(rng, [5, 12, 1])
            states = rng.standard_normal((6, 3))

            def objective():
                a = forward(actor, states)
                q = forward(critic, np.concatenate([states, a], axis=1))
                return float(np.mean(q))

            grads, _ = grad_dpg(actor, critic, states)
            g = flatten_grads(grads)
            flat = flatten_params(actor)
            for i in rng.integers(0, flat.size, size=15):
                fp = flat.copy(); fp[i] += h
                set_flat(actor, fp)
                jp = objective()
                fm = flat.copy(); fm[i] -= h
                set_flat(actor, fm)
                jm = objective()
                set_flat(actor, flat)
                fd = (jp - jm) / (2 * h)
                denom = max(abs(fd), abs(g[i]), 1e-8)
                assert abs(fd - g[i]) / denom <= 1e-4


class TestAdam:
    def test_zero_gradient_leaves_params(self):
        rng = np.random.default_rng(8)
        net = random_net(rng, [3, 4, 1])
        before = flatten_params(net).copy()
        state = AdamState.for_network(net)
        zeros = ([np.zeros_like(w) for w in net.weights],
                 [np.zeros_like(b) for b in net.biases])
        adam_step(net, zeros, state)
        assert state.step == 1
        assert np.array_equal(flatten_params(net), before)

    def test_first_step_is_signed_lr(self):
        net = NetworkParams([np.array([[1.0]])], [np.zeros(1)])
        state = AdamState.for_network(net, lr=0.01)
        g = ([np.array([[0.3]])], [np.array([0.0])])
        adam_step(net, g, state)
        # bias-corrected first step: lr * g / (|g| + eps') ~ lr * sign(g)
        assert net.weights[0][0, 0] == pytest.approx(1.0 - 0.01, rel=1e-4)

    def test_matches_scalar_reference(self):
        # independent hand-rolled scalar Adam
        lr, b1, b2, eps = 0.05, 0.9, 0.999, 1e-8
        w_ref, m, v = 2.0, 0.0, 0.0
        net = NetworkParams([np.array([[2.0]])], [np.zeros(1)])
        state = AdamState.for_network(net, lr=lr)
        rng = np.random.default_rng(9)
        for t in range(1, 11):
            g = float(rng.standard_normal())
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            w_ref -= lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
            adam_step(net, ([np.array([[g]])], [np.array([0.0])]), state)
            assert net.weights[0][0, 0] == pytest.approx(w_ref, abs=1e-12)

    def test_rejects_nonfinite_gradient(self):
        net = NetworkParams([np.array([[1.0]])], [np.zeros(1)])
        state = AdamState.for_network(net)
        with pytest.raises(ValueError):
            adam_step(net, ([np.array([[np.nan]])], [np.array([0.0])]), state)


class TestSoftUpdate:
    def test_tau_one_copies_source(self):
        rng = np.random.default_rng(10)
        target, source = random_net(rng, [3, 6, 1]), random_net(rng, [3, 6, 1])
        soft_update(target, source, 1.0)
        assert np.array_equal(flatten_params(target), flatten_params(source))

    def test_tau_zero_is_noop(self):
        rng = np.random.default_rng(11)
        target, source = random_net(rng, [3, 6, 1]), random_net(rng, [3, 6, 1])
        before = flatten_params(target).copy()
        soft_update(target, source, 0.0)
        assert np.array_equal(flatten_params(target), before)

    def test_elementwise_formula(self):
        rng = np.random.default_rng(12)
        target, source = random_net(rng, [3, 6, 1]), random_net(rng, [3, 6, 1])
        t0, s0 = flatten_params(target).copy(), flatten_params(source)
        soft_update(target, source, 0.005)
        assert np.allclose(flatten_params(target), 0.005 * s0 + 0.995 * t0,
                           rtol=0, atol=1e-16)

    def test_contraction_toward_source(self):
        rng = np.random.default_rng(13)
        target, source = random_net(rng, [4, 8, 2]), random_net(rng, [4, 8, 2])
        tau, k = 0.1, 20
        gap0 = np.max(np.abs(flatten_params(target) - flatten_params(source)))
        for _ in range(k):
            soft_update(target, source, tau)
        gap = np.max(np.abs(flatten_params(target) - flatten_params(source)))
        assert gap <= (1 - tau) ** k * gap0 * (1 + 1e-9)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(14)
        nets_in = {
            "actor": random_net(rng, [3, 8, 1], bounded=True),
            "q1": random_net(rng, [4, 8, 1]),
        }
        path = tmp_path / "ckpt.npz"
        save_networks(path, nets_in)
        loaded = load_networks(path)
        assert set(loaded) == {"actor", "q1"}
        for name, net in nets_in.items():
            x = rng.standard_normal((5, net.in_dim))
            assert np.array_equal(forward(net, x), forward(loaded[name], x))
