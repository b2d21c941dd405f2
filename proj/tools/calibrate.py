"""Sweep noise parameters and print the quantities the defaults are tuned on.

Usage: python tools/calibrate.py [--layout a] [--batches 6] [--grid small|wide]

For each candidate it prints the no-attack mean fidelity, the control-|0>
attack curve at n_cnot in 0..45 (step 5) with its Spearman rho and drop,
and the n_cnot = 45 recovery of each mitigation for control |0>.
"""

import argparse
import itertools
import json
import statistics

import qxtalk

NS = list(range(0, 46, 5))

GRIDS = {
    "small": {
        "zz_hz": [2e3, 5e3],
        "kappa": [8.0, 20.0],
        "detuning_sigma_hz": [20e3, 30e3],
        "p2": [0.015, 0.03],
    },
    "wide": {
        "zz_hz": [2e3, 5e3, 10e3, 25e3, 50e3],
        "kappa": [1.5, 4.0, 8.0, 20.0, 30.0],
        "detuning_sigma_hz": [0.0, 10e3, 20e3, 30e3],
        "p2": [0.0, 0.015, 0.03],
    },
}


def ranks(xs):
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    r = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        for k in range(i, j + 1):
            r[order[k]] = (i + j) / 2.0
        i = j + 1
    return r


def spearman(xs, ys):
    return statistics.correlation(ranks(xs), ranks(ys))


def means(records):
    acc = {}
    for r in records:
        acc.setdefault((r["scenario"], r["mitigation"], r["n_cnot"]), []).append(r["fidelity"])
    return {k: statistics.fmean(v) for k, v in acc.items()}


def evaluate(noise, layout, batches):
    cfg = {
        "layout": layout,
        "batches": batches,
        "seed": 11,
        "noise": noise,
        "experiments": [
            {"scenario": 1},
            {"scenario": 2},
            {"scenario": 3, "mitigation": "dd-xx"},
            {"scenario": 3, "mitigation": "dd-xyxy"},
            {"scenario": 3, "mitigation": "buffer"},
        ],
    }
    m = means(qxtalk.run_experiments(json.dumps(cfg), n_cnot_values=NS))
    s1 = statistics.fmean(m[(1, "none", n)] for n in NS)
    curve = [m[(2, "none", n)] for n in NS]
    gains = {mit: m[(3, mit, 45)] - curve[-1] for mit in ("dd-xx", "dd-xyxy", "buffer")}
    return s1, curve, gains


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--layout", default="a")
    ap.add_argument("--batches", type=int, default=6)
    ap.add_argument("--grid", choices=sorted(GRIDS), default="small")
    args = ap.parse_args()

    base = json.loads(qxtalk.default_noise_json())
    grid = GRIDS[args.grid]
    keys = sorted(grid)
    print("defaults:", json.dumps(base))
    for values in itertools.product(*(grid[k] for k in keys)):
        noise = dict(base, **dict(zip(keys, values)))
        s1, curve, gains = evaluate(noise, args.layout, args.batches)
        rho = spearman(NS, curve)
        label = " ".join(f"{k}={v:g}" for k, v in zip(keys, values))
        gain_text = " ".join(f"{k} {v:+.3f}" for k, v in gains.items())
        print(f"{label} | s1 {s1:.3f} rho {rho:+.2f} drop {curve[0] - curve[-1]:.3f} | {gain_text}", flush=True)


if __name__ == "__main__":
    main()
