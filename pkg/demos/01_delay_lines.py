"""Delay lines and smoothing, the transport layer everything rides on.

Every inter-neuron signal goes through a ring-buffer delay line: the
sender pushes one value per step, each receiver reads at its own fixed
lag, and reads from before the first push return the fill value with a
pre-history flag.
"""

import numpy as np

from lepm.transport import DelayLine, Smoother

line = DelayLine(capacity=16, width=1)
for step in range(10):
    line.push(step, [float(step) ** 2])

print("value sent 3 steps ago:", line.read(9, 3)[0])
value, pre = line.read_info(9, 3)
print("same read with flag:", value[0], "prehistory:", pre)

# reads from before step 0 fall back to the fill value
value, pre = line.read_info(2, 7)
print("read reaching before history:", value[0], "prehistory:", pre)

# vectorized gather: one call serves many receivers with mixed lags
steps = np.array([9, 9, 9])
cols = np.array([0, 0, 0])
vals, flags = line.take(steps - np.array([0, 2, 4]), cols)
print("gathered lags 0/2/4:", vals, "flags:", flags)

# exponential smoothing; the first update passes through unchanged
sm = Smoother(alpha=0.5)
trace = [float(sm.update([x])[0]) for x in (0.0, 1.0, 1.0, 1.0)]
print("EMA(0.5) trace:", trace)
