"""Run configuration: schema, validation, and the named RNG registry.

A run is described by one YAML file. Validation is collected, not
fail-fast: ``validate_config`` returns every violation it can find so a
user fixes a config in one pass, and ``load_config`` raises a single
``ConfigError`` carrying that list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

# Every simulator random draw comes from one of these named substreams,
# spawned from the master seed. Adding a consumer means adding a name
# here; reordering would silently change existing runs.
SEED_STREAMS = ("weights", "delays", "pm_init", "buffer", "task")


class ConfigError(ValueError):
    """Raised by load_config; ``violations`` lists every schema problem."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("invalid config:\n  " + "\n  ".join(violations))
        self.violations = violations


@dataclass
class TaskConfig:
    name: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class DelayConfig:
    kind: str  # "constant" | "uniform"
    steps: int = 0
    lo: int = 0
    hi: int = 0


@dataclass
class ScheduleConfig:
    t_max: int
    t_beta_off: int
    burn_in: int | None = None  # None -> derived from delays and lags


@dataclass
class MetricsConfig:
    every: int = 1
    predictions: bool = False


@dataclass
class RunConfig:
    task: TaskConfig
    network: dict[str, Any]
    compensator: dict[str, Any]
    delays: DelayConfig
    schedule: ScheduleConfig
    seed: int
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    output_dir: str | None = None


def rng_registry(seed: int) -> dict[str, np.random.Generator]:
    """Named, order-stable generators spawned from the master seed."""
    children = np.random.SeedSequence(seed).spawn(len(SEED_STREAMS))
    return {name: np.random.default_rng(s)
            for name, s in zip(SEED_STREAMS, children)}


_NETWORK_KEYS = {"layer_sizes", "tau_ms", "dt_ms", "beta", "eta_w", "eta_b",
                 "weight_init_gain", "smooth_sbar", "smooth_udot"}
_COMP_KEYS = {"kind", "h_steps", "smooth_udot", "hidden", "lags",
              "buffer_steps", "batch", "lr", "gain", "smooth_sbar",
              "optimizer", "train_during_test"}
_TOP_KEYS = {"task", "network", "compensator", "delays", "schedule", "seed",
             "metrics", "output_dir"}
_REQUIRED = ("task.name", "network.layer_sizes", "compensator.kind",
             "delays.kind", "schedule.t_max", "schedule.t_beta_off", "seed")


def _get(raw: dict, dotted: str):
    node: Any = raw
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return _is_int(v) or isinstance(v, float)


def validate_config(raw: Any) -> list[str]:
    """Return all schema violations for a parsed YAML document."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        return ["top level must be a mapping"]
    errs = []
    for key in _REQUIRED:
        if _get(raw, key) is None:
            errs.append(f"missing required field: {key}")
    for key in raw:
        if key not in _TOP_KEYS:
            errs.append(f"unknown top-level key: {key}")
    for section, allowed in (("network", _NETWORK_KEYS),
                             ("compensator", _COMP_KEYS)):
        sub = raw.get(section)
        if isinstance(sub, dict):
            for key in sub:
                if key not in allowed:
                    errs.append(f"unknown key: {section}.{key}")

    sizes = _get(raw, "network.layer_sizes")
    if sizes is not None:
        if (not isinstance(sizes, list) or len(sizes) < 2
                or not all(_is_int(s) and s > 0 for s in sizes)):
            errs.append("network.layer_sizes must be >=2 positive integers")
    for key in ("network.tau_ms", "network.dt_ms"):
        val = _get(raw, key)
        if val is not None and (not _is_num(val) or val <= 0):
            errs.append(f"{key} must be > 0")
    for key in ("network.beta", "network.eta_w", "network.eta_b",
                "network.weight_init_gain", "compensator.lr",
                "compensator.gain"):
        val = _get(raw, key)
        if val is not None and (not _is_num(val) or val < 0):
            errs.append(f"{key} must be >= 0")
    for key in ("network.smooth_sbar", "network.smooth_udot",
                "compensator.smooth_sbar", "compensator.smooth_udot"):
        val = _get(raw, key)
        if val is not None and (not _is_num(val) or not 0 < val <= 1):
            errs.append(f"{key} must be in (0, 1]")

    comp = raw.get("compensator")
    if isinstance(comp, dict):
        kind = comp.get("kind")
        if kind is not None and kind not in ("identity", "linex", "net"):
            errs.append("compensator.kind must be identity, linex, or net")
        for key, lower in (("h_steps", 1), ("buffer_steps", 1), ("batch", 1)):
            val = comp.get(key)
            if val is not None and (not _is_int(val) or val < lower):
                errs.append(f"compensator.{key} must be an integer >= {lower}")
        lags = comp.get("lags")
        if lags is not None and (
                not isinstance(lags, list) or not lags
                or not all(_is_int(v) and v >= 0 for v in lags)):
            errs.append("compensator.lags must be non-negative integers")
        hidden = comp.get("hidden")
        if hidden is not None and (
                not isinstance(hidden, list)
                or not all(_is_int(v) and v > 0 for v in hidden)):
            errs.append("compensator.hidden must be positive integers")
        opt = comp.get("optimizer")
        if opt is not None and opt not in ("sgd", "adam"):
            errs.append("compensator.optimizer must be sgd or adam")

    delays = raw.get("delays")
    if isinstance(delays, dict):
        kind = delays.get("kind")
        if kind not in (None, "constant", "uniform"):
            errs.append("delays.kind must be constant or uniform")
        if kind == "constant":
            steps = delays.get("steps")
            if not _is_int(steps) or steps < 0:
                errs.append("delays.steps must be an integer >= 0")
        if kind == "uniform":
            lo, hi = delays.get("lo"), delays.get("hi")
            if not (_is_int(lo) and _is_int(hi)) or lo < 0 or lo > hi:
                errs.append("delays.lo/hi must be integers with 0 <= lo <= hi")
        for key in delays:
            if key not in ("kind", "steps", "lo", "hi"):
                errs.append(f"unknown key: delays.{key}")

    sched = raw.get("schedule")
    if isinstance(sched, dict):
        t_max, t_off = sched.get("t_max"), sched.get("t_beta_off")
        if t_max is not None and (not _is_int(t_max) or t_max <= 0):
            errs.append("schedule.t_max must be a positive integer")
        if t_off is not None and (not _is_int(t_off) or t_off < 0):
            errs.append("schedule.t_beta_off must be an integer >= 0")
        if _is_int(t_max) and _is_int(t_off) and t_off >= t_max:
            errs.append("schedule.t_beta_off must be < schedule.t_max")
        burn = sched.get("burn_in")
        if burn is not None and (not _is_int(burn) or burn < 0):
            errs.append("schedule.burn_in must be an integer >= 0")
        for key in sched:
            if key not in ("t_max", "t_beta_off", "burn_in"):
                errs.append(f"unknown key: schedule.{key}")

    task = raw.get("task")
    if isinstance(task, dict):
        for key in task:
            if key not in ("name", "params"):
                errs.append(f"unknown key: task.{key}")
        if "params" in task and not isinstance(task["params"], dict):
            errs.append("task.params must be a mapping")

    metrics = raw.get("metrics")
    if isinstance(metrics, dict):
        every = metrics.get("every")
        if every is not None and (not _is_int(every) or every < 1):
            errs.append("metrics.every must be an integer >= 1")
        pred = metrics.get("predictions")
        if pred is not None and not isinstance(pred, bool):
            errs.append("metrics.predictions must be a boolean")
        for key in metrics:
            if key not in ("every", "predictions"):
                errs.append(f"unknown key: metrics.{key}")

    seed = raw.get("seed")
    if seed is not None and not _is_int(seed):
        errs.append("seed must be an integer")
    out = raw.get("output_dir")
    if out is not None and not isinstance(out, str):
        errs.append("output_dir must be a string")
    return errs


def config_from_dict(raw: dict) -> RunConfig:
    """Build a RunConfig from an already-validated mapping."""
    task = raw["task"]
    delays = raw["delays"]
    sched = raw["schedule"]
    metrics = raw.get("metrics") or {}
    return RunConfig(
        task=TaskConfig(task["name"], dict(task.get("params") or {})),
        network=dict(raw["network"]),
        compensator=dict(raw["compensator"]),
        delays=DelayConfig(delays["kind"], steps=delays.get("steps", 0),
                           lo=delays.get("lo", 0), hi=delays.get("hi", 0)),
        schedule=ScheduleConfig(sched["t_max"], sched["t_beta_off"],
                                sched.get("burn_in")),
        seed=raw["seed"],
        metrics=MetricsConfig(metrics.get("every", 1),
                              metrics.get("predictions", False)),
        output_dir=raw.get("output_dir"),
    )


def load_config(path: str, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Parse and validate a YAML config file.

    ``overrides`` maps dotted keys (e.g. ``"delays.steps"``) onto
    replacement values before validation, which is how the CLI applies
    --set flags and how sweeps build their grid cells.
    """
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if overrides:
        for dotted, value in overrides.items():
            node = raw
            parts = dotted.split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            node[parts[-1]] = value
    violations = validate_config(raw)
    if violations:
        raise ConfigError(violations)
    return config_from_dict(raw)
