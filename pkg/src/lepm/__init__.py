"""Latent-equilibrium networks with delayed signalling and prospective messaging."""

from .compensators import (
    CompensatorConfig,
    IdentityCompensator,
    LinExCompensator,
    NetCompensator,
    ReplayBuffer,
    SignalHistory,
    build_compensator,
)
from .mlp import Adam, DenseNet, SGD, StackedDenseNet
from .network import (
    DelayAssignment,
    DelayedNetwork,
    DivergenceError,
    NetworkSpec,
    constant_delays,
)
from .tasks import make_task
from .transport import DelayLine, DelayLineError, Smoother

__all__ = [
    "Adam",
    "CompensatorConfig",
    "DelayAssignment",
    "DelayLine",
    "DelayLineError",
    "DelayedNetwork",
    "DenseNet",
    "DivergenceError",
    "IdentityCompensator",
    "LinExCompensator",
    "NetCompensator",
    "NetworkSpec",
    "ReplayBuffer",
    "SGD",
    "SignalHistory",
    "Smoother",
    "StackedDenseNet",
    "build_compensator",
    "constant_delays",
    "make_task",
]
