"""Print beta*, gamma* and the equilibrium gain ratios for a few block lengths."""

import argparse

from energygames.efficiency import EfficiencyModel, beta_star, gamma_star
from energygames.errors import InfeasibleError
from energygames.metrics import leader_follower_ratio, se_gain_ratios


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--M", type=int, nargs="+", default=[2, 5, 10, 20, 50, 100])
    parser.add_argument("--K", type=int, default=2)
    parser.add_argument("--N", type=float, default=64.0)
    args = parser.parse_args()

    print(f"{'M':>4} {'beta*':>10} {'gamma*':>10} {'lead/follow':>12} {'SE/SUD lead':>12} {'SE/SUD follow':>14}")
    for M in args.M:
        f = EfficiencyModel(M)
        b, g = beta_star(f), gamma_star(f, args.K, args.N)
        try:
            lead, follow = se_gain_ratios(args.K, M, args.N)
        except InfeasibleError:
            lead = follow = float("nan")
        print(f"{M:>4} {b:>10.6f} {g:>10.6f} {leader_follower_ratio(args.K, M, args.N):>12.6f} "
              f"{lead:>12.6f} {follow:>14.6f}")


if __name__ == "__main__":
    main()
