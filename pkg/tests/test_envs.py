import numpy as np
import pytest

from biaslab.envs import (
    EnvSpec,
    NoisyPendulum,
    angle_wrap,
    base_reward,
    make_env,
    pendulum_dynamics,
    state_from_observation,
)


class TestReset:
    def test_deterministic_given_seed(self):
        env = NoisyPendulum(EnvSpec())
        a = env.reset(seed=5)
        b = env.reset(seed=5)
        assert np.array_equal(a, b)

    def test_observation_on_unit_circle(self):
        env = NoisyPendulum(EnvSpec(), np.random.default_rng(0))
        for _ in range(100):
            obs = env.reset()
            assert obs[0] ** 2 + obs[1] ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_angle_distribution(self):
        env = NoisyPendulum(EnvSpec(), np.random.default_rng(1))
        angles = []
        for _ in range(10_000):
            env.reset()
            angles.append(env.theta)
        angles = np.asarray(angles)
        se = np.pi / np.sqrt(3 * len(angles))  # std of uniform(-pi,pi) mean
        assert abs(angles.mean()) < 4 * se
        assert angles.min() > -np.pi and angles.max() <= np.pi


class TestStep:
    def test_equilibrium_fixed_point(self):
        env = NoisyPendulum(EnvSpec(nu=0.0))
        env.reset(seed=0)
        env.set_state(0.0, 0.0)
        obs, r, done = env.step([0.0])
        assert r == 0.0
        assert env.theta == 0.0 and env.theta_dot == 0.0
        assert np.allclose(obs, [1.0, 0.0, 0.0])

    def test_noiseless_reward_nonpositive(self):
        env = NoisyPendulum(EnvSpec(nu=0.0), np.random.default_rng(2))
        env.reset()
        for _ in range(500):
            _, r, done = env.step(np.random.default_rng(0).uniform(-2, 2, 1))
            assert r <= 0.0
            if done:
                env.reset()

    def test_reward_noise_variance(self):
        spec = EnvSpec(nu=2.0)
        env = NoisyPendulum(spec, np.random.default_rng(3))
        theta, theta_dot, torque = 1.0, 0.5, 0.7
        base = float(base_reward(theta, theta_dot, torque))
        n = 100_000
        rewards = np.empty(n)
        for i in range(n):
            env.set_state(theta, theta_dot)
            _, rewards[i], _ = env.step([torque])
        noise = rewards - base
        # 4 sigma bands for mean and variance of N(0, nu^2) samples
        assert abs(noise.mean()) < 4 * 2.0 / np.sqrt(n)
        var_se = 4.0 * np.sqrt(2.0 / (n - 1))
        assert abs(noise.var(ddof=1) - 4.0) < 4 * var_se

    def test_time_limit_termination(self):
        env = NoisyPendulum(EnvSpec(max_episode_steps=7), np.random.default_rng(4))
        env.reset()
        for i in range(1, 8):
            _, _, done = env.step([0.0])
            assert done == (i == 7)

    def test_nonfinite_action_rejected(self):
        env = NoisyPendulum(EnvSpec(), np.random.default_rng(5))
        env.reset()
        with pytest.raises(ValueError):
            env.step([np.nan])

    def test_speed_clamped_and_angle_wrapped(self):
        env = NoisyPendulum(EnvSpec(max_episode_steps=10_000),
                            np.random.default_rng(6))
        env.reset()
        rng = np.random.default_rng(7)
        for _ in range(2000):
            obs, _, _ = env.step(rng.uniform(-2, 2, 1))
            assert abs(env.theta_dot) <= 8.0
            assert -np.pi < env.theta <= np.pi
            assert obs[0] ** 2 + obs[1] ** 2 == pytest.approx(1.0, abs=1e-12)


class TestDeterminism:
    def test_noiseless_trajectories_replay_bit_identically(self):
        actions = np.random.default_rng(8).uniform(-2, 2, size=(300, 1))

        def rollout():
            env = NoisyPendulum(EnvSpec(nu=0.0))
            obs = [env.reset(seed=11)]
            rewards = []
            for a in actions:
                o, r, done = env.step(a)
                obs.append(o)
                rewards.append(r)
                if done:
                    obs.append(env.reset())
            return np.array(obs[: 300]), np.array(rewards)

        o1, r1 = rollout()
        o2, r2 = rollout()
        assert np.array_equal(o1, o2)
        assert np.array_equal(r1, r2)


class TestHelpers:
    def test_angle_wrap_range(self):
        xs = np.linspace(-20, 20, 10_001)
        w = angle_wrap(xs)
        assert np.all(w > -np.pi) and np.all(w <= np.pi)
        assert np.allclose(np.cos(w), np.cos(xs), atol=1e-12)
        assert np.allclose(np.sin(w), np.sin(xs), atol=1e-12)

    def test_state_round_trip(self):
        rng = np.random.default_rng(9)
        theta = rng.uniform(-np.pi, np.pi, 100)
        theta_dot = rng.uniform(-8, 8, 100)
        from biaslab.envs import observation

        t2, td2 = state_from_observation(observation(theta, theta_dot))
        assert np.allclose(t2, theta, atol=1e-12)
        assert np.array_equal(td2, theta_dot)

    def test_vectorized_dynamics_match_scalar_env(self):
        env = NoisyPendulum(EnvSpec(nu=0.0))
        env.reset(seed=12)
        theta0, dot0 = env.theta, env.theta_dot
        _, _, _ = env.step([1.3])
        t, d = pendulum_dynamics(np.array([theta0]), np.array([dot0]),
                                 np.array([1.3]))
        assert t[0] == env.theta and d[0] == env.theta_dot

    def test_make_env_unknown_name(self):
        with pytest.raises(ValueError):
            make_env("cartpole", EnvSpec())
