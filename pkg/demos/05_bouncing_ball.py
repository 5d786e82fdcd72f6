"""The bouncing-ball video task: two delayed views in, one frame out.

The input concatenates two stale 8x8 frames of the same ball (800 and
500 steps old); the target is the current frame. This script renders a
few frames as ASCII so the geometry is visible, then runs a short
training smoke through the full simulator.
"""

import numpy as np

from lepm.config import config_from_dict
from lepm.runner import run_experiment
from lepm.tasks import BouncingBallTask

task = BouncingBallTask(dt_ms=5.0)

def ascii_frame(frame):
    cells = " .:*#@"
    grid = frame.reshape(8, 8)
    scaled = (grid / max(grid.max(), 1e-9) * (len(cells) - 1)).astype(int)
    return "\n".join("".join(cells[v] for v in row) for row in scaled)

for step in (0, 1500, 3000):
    print(f"--- target frame at step {step} ---")
    print(ascii_frame(np.asarray(task.y(step))))

raw = {
    "task": {"name": "balls"},
    "network": {"layer_sizes": [128, 50, 64], "tau_ms": 10, "dt_ms": 5,
                "beta": 0.1, "eta_w": 0.2, "eta_b": 0.2},
    "compensator": {"kind": "identity"},
    "delays": {"kind": "constant", "steps": 100},
    "schedule": {"t_max": 4000, "t_beta_off": 3500},
    "metrics": {"every": 10},
    "seed": 0,
}
import tempfile
out = tempfile.mkdtemp(prefix="balls_demo_")
summary = run_experiment(config_from_dict(raw), out)
print(f"\nsmoke run: test loss {summary['test_loss']:.5f}, "
      f"diverged={summary['diverged']} (metrics in {out})")
