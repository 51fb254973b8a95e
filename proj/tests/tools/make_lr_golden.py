"""Writes tests/data/lr_golden.csv: closed-form cyclic learning rates for 10,000
iterations (step_size 500, base 0.001, max 0.006, gamma 0.9998), cross-checked
against torch.optim.lr_scheduler.CyclicLR."""

import math
import pathlib
import sys

BASE, MAX, STEP, GAMMA, N = 0.001, 0.006, 500, 0.9998, 10_000
POLICIES = ["constant", "triangular", "triangular2", "exp_range"]


def closed_form(policy, t):
    if policy == "constant":
        return BASE
    cycle = math.floor(1.0 + float(t) / (2.0 * STEP))
    x = abs(float(t) / STEP - 2.0 * cycle + 1.0)
    scale = 1.0
    if policy == "triangular2":
        scale = math.pow(2.0, 1.0 - cycle)
    elif policy == "exp_range":
        scale = math.pow(GAMMA, float(t))
    return BASE + (MAX - BASE) * max(0.0, 1.0 - x) * scale


def torch_trace(policy):
    import torch

    p = torch.nn.Parameter(torch.zeros(1))
    opt = torch.optim.SGD([p], lr=BASE)
    sched = torch.optim.lr_scheduler.CyclicLR(
        opt, base_lr=BASE, max_lr=MAX, step_size_up=STEP, mode=policy, gamma=GAMMA, cycle_momentum=False
    )
    out = []
    for _ in range(N):
        out.append(opt.param_groups[0]["lr"])
        opt.step()
        sched.step()
    return out


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parents[1] / "data" / "lr_golden.csv")
    table = {p: [closed_form(p, t) for t in range(N)] for p in POLICIES}
    try:
        for p in POLICIES[1:]:
            ref = torch_trace(p)
            worst = max(abs(a - b) / b for a, b in zip(table[p], ref))
            print(f"{p}: max relative difference to torch CyclicLR {worst:.3g}")
            assert worst < 1e-12, p
    except ImportError:
        print("torch not available; skipped the CyclicLR cross-check")
    with out.open("w") as f:
        f.write("iteration," + ",".join(POLICIES) + "\n")
        for t in range(N):
            f.write(str(t) + "," + ",".join(repr(table[p][t]) for p in POLICIES) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
