"""Grid refinement study for the worked example.

For each grid the script reports the refined-quadrature residual, the same-grid
fixed-point defect and the error against a reference solve on a much finer grid.
The error column shows the O(h) behaviour caused by the sqrt(t) layer at t = 0.
"""

import argparse

import numpy as np

from hybridfrac import SolveSettings, example1, solve


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, default=5, help="grids 129, 257, ... (doubling)")
    p.add_argument("--reference", type=int, default=16385)
    args = p.parse_args()

    spec = example1()
    ref = solve(spec, SolveSettings(grid_points=args.reference)).x
    print("grid_points,residual,residual_ratio,defect,error,error_ratio")
    prev_res = prev_err = None
    for m in range(args.levels):
        n = 128 * 2**m + 1
        r = solve(spec, SolveSettings(grid_points=n))
        stride = (args.reference - 1) // (n - 1)
        err = float(np.max(np.abs(r.x.values - ref.values[::stride])))
        rr = "" if prev_res is None else f"{prev_res / r.residual:.3f}"
        er = "" if prev_err is None else f"{prev_err / err:.3f}"
        print(f"{n},{r.residual:.4e},{rr},{r.fixed_point_defect:.2e},{err:.4e},{er}")
        prev_res, prev_err = r.residual, err


if __name__ == "__main__":
    main()
