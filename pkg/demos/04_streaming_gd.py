"""Why delays break streaming gradient descent, in three neurons.

The chain u1 -> u2 -> u3 fits y = x through two scalar weights. With no
delay the weight gradients are the textbook chain rule and converge
quickly; with a delay around a third of the input period the gradient
is assembled from mutually stale messages and keeps changing sign.
"""

from lepm.demo import run_demo, write_demo_csv

undelayed = run_demo(delta=0, steps=10_000)
final = undelayed.rows[-1]
print(f"delta=0:  w1*w2 = {final.w1 * final.w2:.6f} (target 1), "
      f"converged = {undelayed.final_small}")

delayed = run_demo(delta=33, steps=100_000)
print(f"delta=33: gradient sign changes = {delayed.sign_changes}, "
      f"converged = {delayed.final_small}")

write_demo_csv(delayed.rows, "streaming_gd_delta33.csv")
print("per-step trace written to streaming_gd_delta33.csv "
      "(step,grad_w1,grad_w2,w1,w2,loss)")
