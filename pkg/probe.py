"""Scratch probe runner used during calibration; not part of the package."""
import argparse
import time

import numpy as np

from lepm.network import NetworkSpec, DelayedNetwork, constant_delays, DivergenceError
from lepm.compensators import CompensatorConfig
from lepm.tasks import make_task


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--task", default="two_sine")
    ap.add_argument("--kind", default="identity")
    ap.add_argument("--delta", type=int, default=0)
    ap.add_argument("--steps", type=int, default=24000)
    ap.add_argument("--beta-off", type=int, default=20000)
    ap.add_argument("--sizes", default="2,10,1")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eta", type=float, default=0.1)
    ap.add_argument("--alpha-ex", type=float, default=0.15)
    ap.add_argument("--pm-hidden", default="100,100")
    ap.add_argument("--buffer", type=int, default=500)
    ap.add_argument("--batch", type=int, default=1)
    ap.add_argument("--pm-lr", type=float, default=0.002)
    ap.add_argument("--burnin", type=int, default=0)
    ap.add_argument("--tag", default="")
    args = ap.parse_args()

    np.seterr(all="ignore")
    sizes = tuple(int(s) for s in args.sizes.split(","))
    spec = NetworkSpec(layer_sizes=sizes, eta_w=args.eta, eta_b=args.eta)
    delays = constant_delays(sizes, args.delta)
    cfg = CompensatorConfig(kind=args.kind, h_steps=1, smooth_udot=args.alpha_ex,
                            hidden=tuple(int(h) for h in args.pm_hidden.split(",")),
                            buffer_steps=args.buffer, batch=args.batch,
                            lr=args.pm_lr)
    ss = np.random.SeedSequence(args.seed)
    rw, rd, rp, rb, rt = [np.random.default_rng(s) for s in ss.spawn(5)]
    net = DelayedNetwork(spec, delays, cfg, rw, rng_pm=rp, rng_buffer=rb)
    task = make_task(args.task, spec.dt_ms, {})
    losses, outs = [], []
    t0 = time.time()
    status = "ok"
    try:
        for n in range(args.steps):
            beta = spec.beta if n < args.beta_off else 0.0
            if args.burnin:
                frozen = n < args.burnin
                spec.eta_w = 0.0 if frozen else args.eta
                spec.eta_b = 0.0 if frozen else args.eta
            r = net.step(n, task.x(n), task.y(n), beta)
            losses.append(r.loss)
            outs.append(r.output[0])
            if n % 20000 == 19999:
                print(f"  [{args.tag}] n={n+1} loss[2k]={np.mean(losses[-2000:]):.3e} "
                      f"pm={r.pm_loss if r.pm_loss is None else round(r.pm_loss,6)}",
                      flush=True)
    except DivergenceError as err:
        status = f"DIVERGED@{err.step}"
    losses = np.asarray(losses)
    outs = np.asarray(outs)
    wall = time.time() - t0
    win = 10000
    grow = ""
    if len(losses) > 2 * win:
        grow = f" grow={losses[-win:].mean() / max(losses[win:2 * win].mean(), 1e-300):.3g}"
    if status == "ok" and args.steps > args.beta_off:
        test = losses[args.beta_off:]
        jit = np.abs(np.diff(outs[args.beta_off:])).mean()
        pm = "" if r.pm_loss is None else f" pm={r.pm_loss:.3g}"
        print(f"RESULT {args.tag} task={args.task} kind={args.kind} d={args.delta} "
              f"seed={args.seed} test={test.mean():.6g} jitter={jit:.6g}{grow}{pm} wall={wall:.0f}s")
    else:
        print(f"RESULT {args.tag} task={args.task} kind={args.kind} d={args.delta} "
              f"seed={args.seed} status={status}{grow} wall={wall:.0f}s")


if __name__ == "__main__":
    main()
