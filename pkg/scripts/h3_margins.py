"""Worst sampled H3 margin as the trial count grows, for a few seeds."""

import argparse

from hybridfrac import check_h3, example1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=3)
    args = p.parse_args()
    spec = example1()
    print("seed,trials,margin_f,margin_g")
    for seed in range(args.seeds):
        for n in (10**3, 10**4, 10**5):
            rf, rg = check_h3(spec, n, seed)
            print(f"{seed},{n},{rf.worst_margin:.6e},{rg.worst_margin:.6e}")


if __name__ == "__main__":
    main()
