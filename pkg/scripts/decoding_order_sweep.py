"""Mean welfare and EVMN versus SNR for increasing, decreasing and random decoding orders."""

import argparse
import logging

from energygames.harness import ExperimentSpec, emit, run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--K", type=int, default=10)
    parser.add_argument("--M", type=int, default=100)
    parser.add_argument("--N", type=float, default=1.0)
    parser.add_argument("--realizations", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="decoding_order.csv")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)

    spec = ExperimentSpec(kind="snr", K=args.K, N=args.N, M=args.M,
                          realizations=args.realizations, seed=args.seed)
    result = run(spec)
    emit(result, "csv", args.out)
    print(f"{'SNR dB':>7} {'policy':>11} {'welfare':>12} {'EVMN':>12} {'gain %':>8}")
    for r in result.rows:
        print(f"{r.sweep_var:>7.1f} {r.policy:>11} {r.mean_welfare:>12.5g} {r.mean_evmn:>12.5g} {r.gain_pct:>8.2f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
