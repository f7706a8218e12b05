"""Command-line front end.

Subcommands:
  ecp run    -- one concentration run (closed-form and simulated probability)
  ecp sweep  -- deterministic parameter sweeps to CSV
  hqis run   -- seeded hierarchical-teleportation trials
  hqis tables -- derived correction tables, checked against the published rows

Exit codes: 0 success, 2 invalid input, 3 numerical/verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import ecp as ecp_mod
from . import hqis as hqis_mod
from .optics import FidelityMode

OUTPUT_DIR_ENV = "HESIM_OUTPUT_DIR"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _resolve_output(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_params(args) -> ecp_mod.ECPParams:
    raw = [args.zeta, args.beta, args.gamma, args.delta]
    has_raw = any(v is not None for v in raw)
    if has_raw and args.angles is not None:
        raise CliError("give either raw coefficients or --angles, not both")
    try:
        if args.angles is not None:
            parts = [float(v) for v in args.angles.split(",")]
            if len(parts) != 3:
                raise CliError("--angles needs three comma-separated radians")
            return ecp_mod.AngleParams(*parts).to_params(args.alpha)
        if has_raw:
            if any(v is None for v in raw):
                raise CliError("all four of --zeta --beta --gamma --delta are required")
            return ecp_mod.ECPParams(*[float(v) for v in raw], args.alpha)
    except ecp_mod.InvalidParams as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    raise CliError("parameters required: --angles t1,t2,t3 or the four coefficients")


def cmd_ecp_run(args) -> int:
    params = _parse_params(args)
    mode = FidelityMode(args.mode)
    rng = np.random.default_rng(args.seed) if mode is FidelityMode.EXACT else None
    result = ecp_mod.run_ecp(params, mode, rng)
    payload = {
        "params": {
            "zeta": params.zeta,
            "beta": params.beta,
            "gamma": params.gamma,
            "delta": params.delta,
            "alpha": params.alpha,
        },
        "mode": mode.value,
        "P_closed": result.success_probability_closed_form,
        "P_sim": result.success_probability_ideal,
        "P_exact": result.success_probability_exact,
        "fidelity_vs_target": result.fidelity_vs_target,
    }
    if args.format == "json":
        text = json.dumps(payload, indent=2)
    else:
        lines = [
            f"P_closed        = {_fmt(payload['P_closed'])}",
            f"P_sim           = {_fmt(payload['P_sim'])}",
        ]
        if payload["P_exact"] is not None:
            lines.append(f"P_exact         = {_fmt(payload['P_exact'])}")
        if payload["fidelity_vs_target"] is not None:
            lines.append(
                f"fidelity_vs_MES = {_fmt(payload['fidelity_vs_target'])}"
            )
        else:
            lines.append("fidelity_vs_MES = n/a (zero-probability chain)")
        text = "\n".join(lines)
    _emit(text, args.output)
    if result.fidelity_vs_target is not None and not math.isfinite(
        result.success_probability_ideal
    ):
        raise CliError("numerical failure in pipeline", EXIT_NUMERICAL)
    return EXIT_OK


def cmd_ecp_sweep(args) -> int:
    axes = [args.axis]
    if args.axis2:
        axes.append(args.axis2)
    alphas = [float(v) for v in args.alphas.split(",")]
    try:
        rows = ecp_mod.sweep(axes, alphas=alphas, points=args.points)
    except ecp_mod.InvalidParams as exc:
        raise CliError(str(exc)) from exc
    text = ecp_mod.sweep_to_csv(rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_hqis_run(args) -> int:
    lam = complex(args.lambda_re, args.lambda_im)
    eta = complex(args.eta_re, args.eta_im)
    nrm = abs(lam) ** 2 + abs(eta) ** 2
    if abs(nrm - 1.0) > 1e-9:
        raise CliError(f"secret must be normalized (|lam|^2+|eta|^2 = {nrm!r})")
    # renormalize exactly to machine precision before running
    scale = 1.0 / math.sqrt(nrm)
    secret = hqis_mod.InputSecret(lam * scale, eta * scale)
    transcripts = hqis_mod.run_protocol(
        secret, args.recoverer, args.alpha, args.seed, args.trials
    )
    worst = min(t.recovered_fidelity for t in transcripts)
    if abs(worst - 1.0) > 1e-10:
        raise CliError(
            f"transcript fidelity deviates from 1: worst {worst!r}", EXIT_NUMERICAL
        )
    if args.format == "json":
        text = json.dumps([t.to_json_dict() for t in transcripts], indent=2)
    else:
        lines = [
            f"trial {t.trial}: alice={t.alice_outcome} helpers={','.join(t.helper_outcomes)} "
            f"corrections={','.join(t.corrections)} fidelity={_fmt(t.recovered_fidelity)}"
            for t in transcripts
        ]
        lines.append(f"{len(transcripts)} trials, worst fidelity {_fmt(worst)}")
        text = "\n".join(lines)
    _emit(text, args.output)
    return EXIT_OK


def cmd_hqis_tables(args) -> int:
    case1 = hqis_mod.derive_case1_table()
    case2_bob = hqis_mod.derive_case2_table("bob")
    case2_charlie = hqis_mod.derive_case2_table("charlie")
    lines = ["High-power recovery (Diana corrects; helpers always agree):"]
    for (outcome, helper), op in sorted(case1.items()):
        lines.append(f"  alice={outcome} helpers={helper} -> {op}")
    lines.append("Low-power recovery, Bob corrects (Charlie+Diana Bell-measure):")
    for (outcome, helper), op in sorted(case2_bob.items()):
        lines.append(f"  alice={outcome} {helper} -> {op}")
    lines.append("Low-power recovery, Charlie corrects (Bob+Diana Bell-measure):")
    for (outcome, helper), op in sorted(case2_charlie.items()):
        lines.append(f"  alice={outcome} {helper} -> {op}")
    checks = hqis_mod.check_published_rows()
    ok = all(checks.values())
    lines.append(
        "published rows: " + ("all match" if ok else f"MISMATCH {checks}")
    )
    _emit("\n".join(lines), args.output)
    if not ok:
        raise CliError("derived tables disagree with published rows", EXIT_NUMERICAL)
    return EXIT_OK


def _emit(text: str, output: str | None):
    path = _resolve_output(output)
    if path is None:
        print(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hesim",
        description=(
            "Exact simulator for hybrid polarization/coherent-state "
            "entanglement concentration and hierarchical teleportation. "
            "Angles are radians (pi/4 = 0.78539816..., 3pi/8 = 1.17809724...)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ecp = sub.add_parser("ecp", help="entanglement concentration")
    ecp_sub = p_ecp.add_subparsers(dest="subcommand", required=True)

    p_run = ecp_sub.add_parser("run", help="single concentration run")
    p_run.add_argument("--alpha", type=float, required=True)
    p_run.add_argument("--zeta", type=float)
    p_run.add_argument("--beta", type=float)
    p_run.add_argument("--gamma", type=float)
    p_run.add_argument("--delta", type=float)
    p_run.add_argument("--angles", help="theta1,theta2,theta3 in radians")
    p_run.add_argument("--mode", choices=["ideal", "exact"], default="ideal")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--format", choices=["text", "json"], default="text")
    p_run.add_argument("--output")
    p_run.set_defaults(func=cmd_ecp_run)

    p_sweep = ecp_sub.add_parser("sweep", help="parameter sweep to CSV")
    p_sweep.add_argument(
        "--axis", choices=["theta1", "theta2", "theta3"], default="theta1"
    )
    p_sweep.add_argument("--axis2", choices=["theta1", "theta2", "theta3"])
    p_sweep.add_argument("--points", type=int, default=181)
    p_sweep.add_argument("--alphas", default="0.5,1,2")
    p_sweep.add_argument("--output")
    p_sweep.set_defaults(func=cmd_ecp_sweep)

    p_hqis = sub.add_parser("hqis", help="hierarchical information splitting")
    hqis_sub = p_hqis.add_subparsers(dest="subcommand", required=True)

    p_hrun = hqis_sub.add_parser("run", help="seeded protocol trials")
    p_hrun.add_argument("--lambda-re", type=float, required=True)
    p_hrun.add_argument("--lambda-im", type=float, default=0.0)
    p_hrun.add_argument("--eta-re", type=float, required=True)
    p_hrun.add_argument("--eta-im", type=float, default=0.0)
    p_hrun.add_argument(
        "--recoverer", choices=["diana", "bob", "charlie"], required=True
    )
    p_hrun.add_argument("--alpha", type=float, default=1.0)
    p_hrun.add_argument("--trials", type=int, default=1)
    p_hrun.add_argument("--seed", type=int, default=0)
    p_hrun.add_argument("--format", choices=["text", "json"], default="text")
    p_hrun.add_argument("--output")
    p_hrun.set_defaults(func=cmd_hqis_run)

    p_tab = hqis_sub.add_parser("tables", help="derived correction tables")
    p_tab.add_argument("--output")
    p_tab.set_defaults(func=cmd_hqis_tables)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
