#!/usr/bin/env python3
"""Print the key verified quantities in one place.

Covers the closed-form/pipeline agreement at the reference points, the
derived correction tables against their published rows, and the exact
logical-Bell decomposition audit (including where the printed pairings
deviate from the exact expansion).
"""

import argparse
import math

from hesim import (
    ECPParams,
    run_ecp,
    success_probability_closed_form,
    verify_bell_decomposition,
)
from hesim.cli import main as cli_main
from hesim.ecp import DEFAULT_ANGLES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=1.0)
    args = parser.parse_args()

    print("== concentration reference points ==")
    r = run_ecp(ECPParams.equal(1.0))
    expected = 1.0 / (8.0 * (1.0 + math.exp(-2.0)) ** 3)
    print(f"equal coefficients, alpha=1: P_sim = {r.success_probability_ideal:.12g} "
          f"(closed form {expected:.12g}), fidelity {r.fidelity_vs_target:.12g}")
    for alpha in (0.5, 1.0, 2.0):
        p = success_probability_closed_form(DEFAULT_ANGLES.to_params(alpha))
        print(f"reference angles, alpha={alpha}: P = {p:.12g}")

    print()
    print("== derived correction tables ==")
    code = cli_main(["hqis", "tables"])

    print()
    print(f"== logical Bell decomposition at alpha={args.alpha} ==")
    report = verify_bell_decomposition(args.alpha)
    for entry in report.entries:
        terms = ", ".join(
            f"{c:+.6f} {pol} x {quasi}" for pol, quasi, c in entry.terms
        )
        match = "matches printed pairing" if entry.matches_published_pairing else \
            "printed pairing DIFFERS"
        print(f"{entry.logical_bell}: {terms}  [residual {entry.residual:.2e}; {match}]")
    print(f"max residual: {report.max_residual:.2e}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
