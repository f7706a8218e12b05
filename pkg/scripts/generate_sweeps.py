#!/usr/bin/env python3
"""Generate the standard sweep CSVs consumed by the figures component.

Writes one 1-D sweep per angle axis (alpha in {0.5, 1, 2}) plus a 2-D
(theta1, theta2) grid at alpha = 1 into the output directory.
"""

import argparse
import pathlib

from hesim import sweep, sweep_to_csv


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="results", help="target directory")
    parser.add_argument("--points", type=int, default=181, help="grid points per axis")
    parser.add_argument(
        "--grid-points",
        type=int,
        default=61,
        help="points per axis of the 2-D grid (kept smaller: cost is quadratic)",
    )
    args = parser.parse_args()

    out = pathlib.Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    for axis in ("theta1", "theta2", "theta3"):
        rows = sweep([axis], points=args.points)
        path = out / f"sweep_{axis}.csv"
        path.write_text(sweep_to_csv(rows))
        print(f"wrote {path} ({len(rows)} rows)")

    rows = sweep(["theta1", "theta2"], alphas=(1.0,), points=args.grid_points)
    path = out / "sweep_theta1_theta2.csv"
    path.write_text(sweep_to_csv(rows))
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
