"""biaslab: estimation-bias laboratory for deterministic policy gradients."""

from .agents import (
    Agent,
    BetaScheduleState,
    Hyperparams,
    RngStreams,
    TargetRule,
    make_rule,
    swt_advance,
    swt_draw_beta,
    train,
)
from .bias import BiasRecord, estimate_true_q, measure_bias
from .config import ExperimentConfig, PRESETS, config_from_dict, load_config
from .envs import EnvSpec, NoisyPendulum
from .gaussian_bias import (
    BiasReport,
    CorrelatedGaussianSpec,
    expected_max2_equal_means,
    expected_max3_equal_means,
    expected_min2,
    expected_min2_equal_means,
    expected_tcu_error,
    expected_weighted_error,
    mc_order_stat_oracle,
    theta_of,
)
from .replay import ReplayBuffer, Transition

__version__ = "0.1.0"
