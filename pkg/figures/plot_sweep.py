#!/usr/bin/env python3
"""Render line and contour figures from a success-probability sweep CSV.

Consumes only the CSV contract (`theta1,theta2,theta3,alpha,P_closed,P_sim`)
emitted by the simulation package; it never recomputes any physics. Figures
embed their data extents, series counts, and per-series zero rows as PNG
metadata so a rerender of the same CSV is verifiable without pixel
comparison.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

EXPECTED_HEADER = ["theta1", "theta2", "theta3", "alpha", "P_closed", "P_sim"]

#: PNG text chunk holding the machine-readable figure description
METADATA_KEY = "sweep-figure"

AXIS_LABELS = {
    "theta1": r"$\theta_1$ (rad)",
    "theta2": r"$\theta_2$ (rad)",
    "theta3": r"$\theta_3$ (rad)",
}


class SweepFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SweepRow:
    theta1: float
    theta2: float
    theta3: float
    alpha: float
    p_closed: float
    p_sim: float

    def theta(self, axis: str) -> float:
        return getattr(self, axis)


def read_sweep(path: str) -> list[SweepRow]:
    """Parse and validate the sweep CSV."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SweepFormatError(f"{path}: empty file") from None
        if header != EXPECTED_HEADER:
            raise SweepFormatError(
                f"{path}: header {header!r} != {EXPECTED_HEADER!r}"
            )
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 6:
                raise SweepFormatError(f"{path}:{lineno}: expected 6 columns")
            try:
                vals = [float(v) for v in rec]
            except ValueError as exc:
                raise SweepFormatError(f"{path}:{lineno}: {exc}") from None
            row = SweepRow(*vals)
            for p in (row.p_closed, row.p_sim):
                if not 0.0 <= p <= 1.0:
                    raise SweepFormatError(
                        f"{path}:{lineno}: probability {p!r} outside [0, 1]"
                    )
            rows.append(row)
    if not rows:
        raise SweepFormatError(f"{path}: no data rows")
    return rows


def _detect_varying_axis(rows: list[SweepRow]) -> str:
    varying = [
        axis
        for axis in ("theta1", "theta2", "theta3")
        if len({row.theta(axis) for row in rows}) > 1
    ]
    if len(varying) != 1:
        raise SweepFormatError(
            f"line plot needs exactly one varying angle column, found {varying}"
        )
    return varying[0]


def plot_lines(rows: list[SweepRow], out_path: str, axis: str | None = None) -> dict:
    """One P-vs-theta curve per alpha value; returns the embedded metadata."""
    axis = axis or _detect_varying_axis(rows)
    series: dict[float, list[SweepRow]] = {}
    for row in rows:
        series.setdefault(row.alpha, []).append(row)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    zero_rows = {}
    for alpha in sorted(series):
        pts = sorted(series[alpha], key=lambda r: r.theta(axis))
        xs = [r.theta(axis) for r in pts]
        ys = [r.p_closed for r in pts]
        ax.plot(xs, ys, label=rf"$\alpha = {alpha:g}$")
        zero_rows[f"{alpha:.17g}"] = [
            f"{x:.17g}" for x, y in zip(xs, ys) if y == 0.0
        ]
    ax.set_xlabel(AXIS_LABELS[axis])
    ax.set_ylabel("P")
    ax.legend()
    fig.tight_layout()

    meta = {
        "kind": "lines",
        "axis": axis,
        "series": len(series),
        "x_min": f"{min(r.theta(axis) for r in rows):.17g}",
        "x_max": f"{max(r.theta(axis) for r in rows):.17g}",
        "p_max": f"{max(r.p_closed for r in rows):.17g}",
        "zero_rows": zero_rows,
    }
    fig.savefig(out_path, metadata={METADATA_KEY: json.dumps(meta, sort_keys=True)})
    plt.close(fig)
    return meta


def plot_contour(
    rows: list[SweepRow], out_path: str, axes: tuple[str, str] = ("theta1", "theta2")
) -> dict:
    """Filled contour of P_closed over a full 2-D angle grid."""
    ax_x, ax_y = axes
    xs = sorted({row.theta(ax_x) for row in rows})
    ys = sorted({row.theta(ax_y) for row in rows})
    if len(xs) < 2 or len(ys) < 2:
        raise SweepFormatError(f"contour needs a 2-D grid over {axes}")
    if len(rows) != len(xs) * len(ys):
        raise SweepFormatError(
            f"contour needs a full {len(xs)}x{len(ys)} grid, got {len(rows)} rows"
        )
    lookup = {(row.theta(ax_x), row.theta(ax_y)): row.p_closed for row in rows}
    if len(lookup) != len(rows):
        raise SweepFormatError("duplicate grid points in contour input")
    grid = [[lookup[(x, y)] for x in xs] for y in ys]

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    im = ax.contourf(xs, ys, grid, levels=24)
    fig.colorbar(im, ax=ax, label="P")
    ax.set_xlabel(AXIS_LABELS[ax_x])
    ax.set_ylabel(AXIS_LABELS[ax_y])
    fig.tight_layout()

    meta = {
        "kind": "contour",
        "axes": list(axes),
        "grid": [len(xs), len(ys)],
        "x_min": f"{xs[0]:.17g}",
        "x_max": f"{xs[-1]:.17g}",
        "y_min": f"{ys[0]:.17g}",
        "y_max": f"{ys[-1]:.17g}",
        "p_max": f"{max(r.p_closed for r in rows):.17g}",
    }
    fig.savefig(out_path, metadata={METADATA_KEY: json.dumps(meta, sort_keys=True)})
    plt.close(fig)
    return meta


def read_embedded_metadata(path: str) -> dict:
    """Recover the figure description embedded in a rendered PNG."""
    from PIL import Image

    with Image.open(path) as img:
        raw = img.info.get(METADATA_KEY)
    if raw is None:
        raise SweepFormatError(f"{path}: no embedded sweep metadata")
    return json.loads(raw)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot_sweep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_lines = sub.add_parser("lines", help="P vs one angle, one curve per alpha")
    p_lines.add_argument("input", help="sweep CSV path")
    p_lines.add_argument("output", help="output PNG path")
    p_lines.add_argument("--axis", choices=["theta1", "theta2", "theta3"])

    p_contour = sub.add_parser("contour", help="P over a 2-D angle grid")
    p_contour.add_argument("input", help="sweep CSV path")
    p_contour.add_argument("output", help="output PNG path")
    p_contour.add_argument("--axes", default="theta1,theta2")

    args = parser.parse_args(argv)
    try:
        rows = read_sweep(args.input)
        if args.command == "lines":
            plot_lines(rows, args.output, axis=args.axis)
        else:
            ax_pair = tuple(args.axes.split(","))
            if len(ax_pair) != 2:
                raise SweepFormatError("--axes needs two comma-separated names")
            plot_contour(rows, args.output, axes=ax_pair)
    except (SweepFormatError, OSError) as exc:
        print(f"error: {exc}")
        return 2
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
