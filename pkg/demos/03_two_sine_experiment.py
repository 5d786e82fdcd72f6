"""The headline comparison at desk scale: delays break learning and
prospective compensation restores it.

Runs shortened versions of the shipped two-sine configs (same settings,
an eighth of the schedule) and prints the test losses side by side. The
full-length runs live in configs/ and go through the CLI:

    lepm run configs/two_sine_pm_net.yaml --out runs/two_sine_pm_net
"""

import os
import tempfile

from lepm.config import load_config
from lepm.runner import run_experiment

SHORT = {"schedule.t_max": 30_000, "schedule.t_beta_off": 25_000}
CONFIGS = ("two_sine_undelayed", "two_sine_delayed",
           "two_sine_linex", "two_sine_pm_net")

config_dir = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
out_root = tempfile.mkdtemp(prefix="two_sine_demo_")

losses = {}
for name in CONFIGS:
    cfg = load_config(os.path.join(config_dir, name + ".yaml"), dict(SHORT))
    summary = run_experiment(cfg, os.path.join(out_root, name))
    losses[name] = summary["test_loss"]
    print(f"{name:>22}: test loss {summary['test_loss']:.5f}")

base = losses["two_sine_undelayed"]
print(f"\nrelative to the undelayed baseline ({base:.5f}):")
for name in CONFIGS[1:]:
    print(f"{name:>22}: {losses[name] / base:5.1f}x")
print(f"\nfull metrics CSVs under {out_root}")
