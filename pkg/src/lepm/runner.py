"""Experiment orchestration: one run, and multi-seed sweeps over a grid.

A run executes the simulator step loop under a RunConfig, streams a
metrics CSV, and writes a key/value summary. Sweeps fan runs out across
worker processes (each run is single-threaded and self-contained) and
aggregate per-cell medians and ranges.
"""

from __future__ import annotations

import csv
import json
import os
import time
from multiprocessing import Pool

import numpy as np

from .compensators import CompensatorConfig
from .config import RunConfig, rng_registry
from .network import (DelayAssignment, DelayedNetwork, DivergenceError,
                      NetworkSpec, constant_delays)
from .tasks import make_task

METRICS_VERSION = "lepm-metrics v1"
_WINDOW = 10_000  # loss-trend window used in summaries


def sample_delays(layer_sizes, delay_cfg, rng) -> DelayAssignment:
    """Build the per-connection delay assignment for a topology.

    Uniform sampling draws one integer delay per forward connection and
    per loss link; feedback paths reuse the forward draw transposed, so
    the delta_ij = delta_ji symmetry holds by construction.
    """
    if delay_cfg.kind == "constant":
        return constant_delays(layer_sizes, delay_cfg.steps)
    if delay_cfg.kind != "uniform":
        raise ValueError(f"unknown delay kind: {delay_cfg.kind}")
    lo, hi = delay_cfg.lo, delay_cfg.hi
    forward = [rng.integers(lo, hi + 1, size=(layer_sizes[l + 1], layer_sizes[l]))
               for l in range(len(layer_sizes) - 1)]
    loss = rng.integers(lo, hi + 1, size=layer_sizes[-1])
    return DelayAssignment(forward=forward, loss=loss)


def _spec_from_config(cfg: RunConfig) -> NetworkSpec:
    kwargs = dict(cfg.network)
    kwargs["layer_sizes"] = tuple(kwargs["layer_sizes"])
    return NetworkSpec(**kwargs)


def _comp_from_config(cfg: RunConfig) -> CompensatorConfig:
    kwargs = dict(cfg.compensator)
    for key in ("hidden", "lags"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return CompensatorConfig(**kwargs)


def run_experiment(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """Execute one configured run; returns the summary mapping.

    Writes ``metrics.csv`` and ``summary.json`` into the output
    directory. Divergence is recorded, not raised: the metrics collected
    up to the offending step are kept and the summary carries the
    marker, so sweep cells containing divergent baselines still report.
    """
    out = out_dir or cfg.output_dir or "."
    os.makedirs(out, exist_ok=True)
    spec = _spec_from_config(cfg)
    comp_cfg = _comp_from_config(cfg)
    rngs = rng_registry(cfg.seed)
    delays = sample_delays(spec.layer_sizes, cfg.delays, rngs["delays"])
    net = DelayedNetwork(spec, delays, comp_cfg,
                         rngs["weights"], rng_pm=rngs["pm_init"],
                         rng_buffer=rngs["buffer"])
    task = make_task(cfg.task.name, spec.dt_ms, cfg.task.params)

    t_max = cfg.schedule.t_max
    t_off = cfg.schedule.t_beta_off
    burn_in = cfg.schedule.burn_in
    if burn_in is None:
        burn_in = comp_cfg.burn_in(int(delays.max_delay()))
    every = cfg.metrics.every
    want_preds = cfg.metrics.predictions

    losses = np.empty(t_max)
    diverged_at = None
    metrics_path = os.path.join(out, "metrics.csv")
    t_start = time.time()
    with open(metrics_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        fh.write(f"# {METRICS_VERSION}\n")
        header = ["step", "time_ms", "phase", "loss"]
        if want_preds:
            n_out = spec.layer_sizes[-1]
            header += [f"pred_{i}" for i in range(n_out)]
            header += [f"target_{i}" for i in range(n_out)]
        writer.writerow(header)
        n = 0
        try:
            for n in range(t_max):
                beta = spec.beta if n < t_off else 0.0
                result = net.step(n, task.x(n), task.y(n), beta)
                losses[n] = result.loss
                if n % every == 0:
                    if n < burn_in:
                        phase = "burnin"
                    elif n < t_off:
                        phase = "train"
                    else:
                        phase = "test"
                    row = [n, _fmt(n * spec.dt_ms), phase, _fmt(result.loss)]
                    if want_preds:
                        row += [_fmt(v) for v in result.output]
                        row += [_fmt(v) for v in np.atleast_1d(task.y(n))]
                    writer.writerow(row)
        except DivergenceError as err:
            diverged_at = err.step
            losses = losses[:n]
            writer.writerow([n, _fmt(n * spec.dt_ms), "diverged", "nan"])
    wall = time.time() - t_start

    summary = summarize(losses, t_off, t_max, burn_in, diverged_at)
    summary.update(task=cfg.task.name, compensator=comp_cfg.kind,
                   seed=cfg.seed, t_max=t_max, t_beta_off=t_off,
                   max_delay=int(delays.max_delay()),
                   wall_seconds=round(wall, 3))
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _fmt(value) -> str:
    return format(float(value), ".10g")


def summarize(losses: np.ndarray, t_off: int, t_max: int, burn_in: int,
              diverged_at: int | None) -> dict:
    """Loss statistics for one run; all windows exclude burn-in steps."""
    done = len(losses)
    out: dict = {"burn_in": int(burn_in),
                 "diverged": diverged_at is not None,
                 "divergence_step": diverged_at}
    train = losses[min(burn_in, done):min(t_off, done)]
    if len(train):
        out["train_loss_tail"] = float(np.mean(train[-_WINDOW:]))
        first = train[:_WINDOW]
        last = train[-_WINDOW:]
        out["train_first_window"] = float(np.mean(first))
        out["train_last_window"] = float(np.mean(last))
    if diverged_at is None and done == t_max and t_off < t_max:
        out["test_loss"] = float(np.mean(losses[t_off:]))
    else:
        out["test_loss"] = None
    return out


def _sweep_cell(args):
    base_raw, overrides, seed, out_dir = args
    # late import keeps worker start cheap under spawn
    from .config import config_from_dict, validate_config
    raw = json.loads(json.dumps(base_raw))
    for dotted, value in overrides.items():
        node = raw
        parts = dotted.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    raw["seed"] = seed
    violations = validate_config(raw)
    if violations:
        raise ValueError(f"invalid sweep cell {overrides}: {violations}")
    cfg = config_from_dict(raw)
    return run_experiment(cfg, out_dir)


def cell_label(overrides: dict) -> str:
    if not overrides:
        return "base"
    return "_".join(f"{k.split('.')[-1]}={v}" for k, v in overrides.items())


def sweep(base_raw: dict, grid: list[dict], seeds: list[int],
          out_dir: str, workers: int | None = None) -> list[dict]:
    """Run every grid cell for every seed and aggregate per cell.

    ``grid`` is a list of dotted-key override mappings, one per cell.
    Returns the aggregate rows and writes ``aggregate.csv`` with the
    per-cell median and range of test loss plus a divergence count.
    """
    jobs = []
    for overrides in grid:
        for seed in seeds:
            cell_dir = os.path.join(out_dir, cell_label(overrides),
                                    f"seed-{seed}")
            jobs.append((base_raw, overrides, seed, cell_dir))
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with Pool(workers) as pool:
            summaries = pool.map(_sweep_cell, jobs)
    else:
        summaries = [_sweep_cell(job) for job in jobs]

    rows = []
    idx = 0
    for overrides in grid:
        cell = summaries[idx:idx + len(seeds)]
        idx += len(seeds)
        tests = [s["test_loss"] for s in cell if s["test_loss"] is not None]
        rows.append({
            "cell": cell_label(overrides),
            "median": float(np.median(tests)) if tests else float("nan"),
            "min": float(np.min(tests)) if tests else float("nan"),
            "max": float(np.max(tests)) if tests else float("nan"),
            "diverged": sum(1 for s in cell if s["diverged"]),
            "n": len(cell),
        })
    agg_path = os.path.join(out_dir, "aggregate.csv")
    os.makedirs(out_dir, exist_ok=True)
    with open(agg_path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["cell", "median", "min", "max", "diverged", "n"])
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return rows
