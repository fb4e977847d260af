"""Certify and solve the worked example, printing the constants and the solution summary."""

import argparse

from hybridfrac import SolveSettings, certify, example1, solve


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=int, default=1025)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    spec = example1()
    rep = certify(spec, seed=args.seed)
    for k, v in rep.as_items():
        print(f"{k} = {v}")
    res = solve(spec, SolveSettings(grid_points=args.grid))
    print()
    for k, v in res.summary_items():
        print(f"{k} = {v}")
    print(f"history = {' '.join(f'{s:.3e}' for s in res.history)}")


if __name__ == "__main__":
    main()
