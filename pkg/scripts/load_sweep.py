"""Welfare gain of SIC and of a Stackelberg leader over SUD as the load K/N grows."""

import argparse
import logging

from energygames.harness import ExperimentSpec, alpha_max, emit, run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--M", type=int, nargs="+", default=[2, 100])
    parser.add_argument("--N", type=float, default=64.0)
    parser.add_argument("--snr-db", type=float, default=6.0)
    parser.add_argument("--realizations", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="load_sweep.csv")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)

    spec = ExperimentSpec(kind="load", N=args.N, M=args.M, snr_db=[args.snr_db],
                          realizations=args.realizations, seed=args.seed,
                          policies=["sic", "stackelberg"])
    result = run(spec)
    emit(result, "csv", args.out)
    for M in args.M:
        print(f"M={M}, alpha_max={alpha_max(M, args.N):.4f}")
        sic, se = result.select(f"sic@M={M}"), result.select(f"stackelberg@M={M}")
        for a, b in zip(sic, se):
            print(f"  K/N={a.sweep_var:.4f}  SIC gain {a.gain_pct:9.3f} %  Stackelberg gain {b.gain_pct:8.4f} %")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
