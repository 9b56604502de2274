#!/usr/bin/env python3
"""Noisy-consensus shootout: classical protocol vs the filtered one.

Runs both algorithms on a complete graph driven by white model noise,
shared realization by realization, and prints the per-seed deviation
statistics next to the analytical coherence value. Optionally dumps the
deviation time series to CSV for plotting.
"""
import argparse
from pathlib import Path

import numpy as np

from mefcon import (DisturbanceProfile, ScenarioConfig, analytical_coherence,
                    make_graph, run_comparison, uniform_params)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", "--nodes", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=10,
                    help="number of noise realizations (default 10)")
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--horizon", type=float, default=5.0)
    ap.add_argument("--step", type=float, default=0.002)
    ap.add_argument("--x0-seed", type=int, default=123)
    ap.add_argument("--csv", type=Path, default=None,
                    help="write the deviation time series here")
    args = ap.parse_args()

    top = make_graph("complete", args.nodes)
    params = uniform_params(top)
    x0 = np.random.default_rng(args.x0_seed).uniform(-1, 1, args.nodes)
    profile = DisturbanceProfile(kind="white", sigma=args.sigma)
    config = ScenarioConfig(top, params, x0, None, profile,
                            args.step, args.horizon)

    d_ave = analytical_coherence(top).analytical
    print(f"complete graph N={args.nodes}, sigma={args.sigma}, "
          f"T={args.horizon}, h={args.step}")
    print(f"analytical coherence D_ave = {d_ave:.6f}")
    print()

    result = run_comparison(config, seeds=range(args.seeds))
    print(f"{'seed':>4}  {'baseline':>10}  {'filter est':>10}  {'filter state':>12}")
    for k, seed in enumerate(result.seeds):
        print(f"{seed:>4}  {result.baseline[k]:>10.4f}  "
              f"{result.mef_estimates[k]:>10.4f}  {result.mef_states[k]:>12.2f}")
    print()
    print(f"means: baseline {result.baseline.mean():.4f} "
          f"(off analytical by "
          f"{abs(result.baseline.mean() - d_ave) / d_ave:.1%}), "
          f"filter estimates {result.mef_estimates.mean():.4f}, "
          f"filter states {result.mef_states.mean():.2f}")
    print(f"filter estimates below baseline on every seed: "
          f"{result.ordering_holds}")
    print("note: the filtered plant state drifts under persistent noise; "
          "the estimates are what the protocol publishes")

    if args.csv is not None:
        data = np.column_stack([result.t, result.series_baseline,
                                result.series_mef_estimates,
                                result.series_mef_states])
        header = "t,baseline,filter_estimates,filter_states"
        np.savetxt(args.csv, data, delimiter=",", header=header, comments="")
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
