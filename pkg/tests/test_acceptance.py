"""Acceptance gate: one criterion per test, one printed pass/fail line each.

Each test prints a single `[PASS]` / `[FAIL]` summary line (visible with
`pytest -s`, or in captured output on failure) before asserting, so the
gate's verdict survives in the log either way.
"""

import math
import time

import numpy as np
import pytest

from hesim import (
    AngleParams,
    ECPParams,
    FidelityMode,
    InputSecret,
    alice_bell_measurement,
    derive_case1_table,
    derive_case2_table,
    reduced_density_logical,
    run_ecp,
    run_protocol,
    success_probability_closed_form,
    verify_bell_decomposition,
)
from hesim.ecp import DEFAULT_ANGLES, default_grid
from hesim.hqis import (
    BELL_NAMES,
    PUBLISHED_CASE1,
    PUBLISHED_CASE2,
    QUBITS_BCD,
    combined_input,
    diana_recovery,
)

from helpers import random_params

SEED = 20260826


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{verdict}] criterion {number}: {title}{suffix}")


@pytest.fixture(scope="module")
def random_runs():
    """1000 seeded random parameter sets, run once and shared by 1 and 2."""
    rng = np.random.default_rng(SEED)
    params = [random_params(rng) for _ in range(1000)]
    start = time.perf_counter()
    results = [run_ecp(p) for p in params]
    elapsed = time.perf_counter() - start
    return params, results, elapsed


def test_criterion_1_formula_reproduction(random_runs):
    params, results, elapsed = random_runs
    worst = max(
        abs(r.success_probability_ideal - success_probability_closed_form(p))
        for p, r in zip(params, results)
    )
    ok = worst < 1e-10 and elapsed < 5.0
    report(
        1,
        "formula reproduction over 1000 random parameter sets",
        ok,
        f"worst |P_sim - P_closed| = {worst:.3e}, runtime {elapsed:.2f} s",
    )
    assert worst < 1e-10
    assert elapsed < 5.0


def test_criterion_2_concentration_correctness(random_runs):
    _, results, _ = random_runs
    worst = max(abs(r.fidelity_vs_target - 1.0) for r in results)
    ok = worst < 1e-10
    report(
        2,
        "concentrated state matches the maximally entangled target",
        ok,
        f"worst |fidelity - 1| = {worst:.3e}",
    )
    assert ok


def test_criterion_3_reference_points():
    p1 = run_ecp(ECPParams.equal(1.0)).success_probability_ideal
    expected = 1.0 / (8.0 * (1.0 + math.exp(-2.0)) ** 3)
    dev1 = abs(p1 - expected)
    p3 = run_ecp(ECPParams.equal(3.0)).success_probability_ideal
    dev3 = abs(p3 - 0.125)
    ok = dev1 < 1e-10 and dev3 < 1e-6
    report(
        3,
        "equal-coefficient reference points at alpha = 1 and alpha = 3",
        ok,
        f"|P(1) - 1/(8(1+e^-2)^3)| = {dev1:.3e}, |P(3) - 1/8| = {dev3:.3e}",
    )
    assert ok


def test_criterion_4_sweep_structure():
    grid = default_grid(181)
    panels = {}
    for axis in ("theta1", "theta2", "theta3"):
        vals = []
        for t in grid:
            angles = {
                "theta1": DEFAULT_ANGLES.theta1,
                "theta2": DEFAULT_ANGLES.theta2,
                "theta3": DEFAULT_ANGLES.theta3,
                axis: float(t),
            }
            vals.append(
                success_probability_closed_form(
                    AngleParams(**angles).to_params(1.0)
                )
            )
        panels[axis] = np.array(vals)

    # exact zeros at theta = 0, pi/2, pi (grid indices 0, 90, 180)
    zeros_ok = all(
        set(np.flatnonzero(panels[a] == 0.0)) == {0, 90, 180} for a in panels
    )

    # local grid maxima within one step of pi/4 (index 45) and 3pi/4 (135)
    # for the theta1 and theta2 panels
    def local_maxima(v):
        return [
            i
            for i in range(1, len(v) - 1)
            if v[i] >= v[i - 1] and v[i] >= v[i + 1] and v[i] > 0
        ]

    argmax_detail = {}
    argmax_ok = True
    for axis in ("theta1", "theta2"):
        maxima = local_maxima(panels[axis])
        hits = {
            target: min(abs(i - target) for i in maxima)
            for target in (45, 135)
        }
        argmax_detail[axis] = hits
        if any(off > 1 for off in hits.values()):
            argmax_ok = False

    # the alpha comparison at the reference angles is reported, not ranked
    ref = {
        a: success_probability_closed_form(DEFAULT_ANGLES.to_params(a))
        for a in (0.5, 1.0, 2.0)
    }
    report_detail = (
        f"zeros {'ok' if zeros_ok else 'BROKEN'}; "
        f"grid-step offsets of local maxima from pi/4 and 3pi/4: {argmax_detail}; "
        f"P at reference angles: {ref}"
    )
    ok = zeros_ok and argmax_ok
    report(4, "sweep structure on the 181-point grid at alpha = 1", ok, report_detail)
    assert zeros_ok
    assert argmax_ok, (
        "local maxima are NOT within one grid step of pi/4 and 3pi/4: "
        f"{argmax_detail}"
    )


def test_criterion_5_exact_vs_ideal_convergence():
    alphas = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
    p_diffs, f_diffs, worst_fid = [], [], 0.0
    for alpha in alphas:
        r = run_ecp(
            ECPParams.equal(alpha), FidelityMode.EXACT, np.random.default_rng(0)
        )
        p_diffs.append(abs(r.success_probability_exact - r.success_probability_ideal))
        f_diffs.append(abs(r.fidelity_vs_target - 1.0))
        worst_fid = max(worst_fid, abs(r.fidelity_vs_target - 1.0))
    p_monotone = all(a > b for a, b in zip(p_diffs, p_diffs[1:]))
    f_monotone = all(a >= b for a, b in zip(f_diffs, f_diffs[1:]))
    ok = p_monotone and f_monotone and worst_fid < 1e-10
    report(
        5,
        "exact-detection pipeline converges to the idealized one",
        ok,
        f"probability gaps {['%.2e' % d for d in p_diffs]}, "
        f"worst |fidelity - 1| = {worst_fid:.3e}",
    )
    assert ok


def test_criterion_6_hqis_correctness():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for recoverer in ("diana", "bob", "charlie"):
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        lam = rng.uniform(0.1, 0.9)
        secret = InputSecret(lam, math.sqrt(1 - lam * lam) * phase)
        for t in run_protocol(secret, recoverer, 1.0, seed=SEED, trials=100):
            worst = max(worst, abs(t.recovered_fidelity - 1.0))
    fid_ok = worst < 1e-10

    case1 = derive_case1_table()
    case2 = derive_case2_table("bob")
    rows_ok = all(case1[k] == v for k, v in PUBLISHED_CASE1.items()) and all(
        case2[k] == v for k, v in PUBLISHED_CASE2.items()
    )

    # Alice's outcomes equiprobable within 3 sigma over 10^4 samples
    trials = 10_000
    state = combined_input(InputSecret(0.6, 0.8j), 1.0)
    sample_rng = np.random.default_rng(SEED + 1)
    counts = {name: 0 for name in BELL_NAMES}
    for _ in range(trials):
        outcome, _, _, _ = alice_bell_measurement(state, sample_rng)
        counts[outcome] += 1
    sigma = math.sqrt(trials * 0.25 * 0.75)
    freq_ok = all(abs(c - trials / 4) <= 3 * sigma for c in counts.values())

    ok = fid_ok and rows_ok and freq_ok
    report(
        6,
        "splitting protocol correctness and published correction rows",
        ok,
        f"worst |fidelity - 1| = {worst:.3e}, published rows "
        f"{'match' if rows_ok else 'MISMATCH'}, outcome counts {counts}",
    )
    assert ok


def test_criterion_7_hierarchy_witness():
    secret = InputSecret(0.6, 0.8)
    state = combined_input(secret, 1.0)
    worst_rho = 0.0
    agreements, branches = 0, 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        outcome, collapsed, _, _ = alice_bell_measurement(state, rng)
        rho_bob = reduced_density_logical(collapsed, QUBITS_BCD, keep=[0])
        worst_rho = max(worst_rho, float(np.max(np.abs(rho_bob - np.eye(2) / 2))))
        t = diana_recovery(collapsed, outcome, secret, rng)
        branches += 1
        if t.helper_outcomes[0] == t.helper_outcomes[1]:
            agreements += 1
    ok = worst_rho < 1e-10 and agreements == branches
    report(
        7,
        "access hierarchy: low-power agent ignorant, helpers always agree",
        ok,
        f"max |rho_B - I/2| = {worst_rho:.3e}, "
        f"helper agreement {agreements}/{branches}",
    )
    assert ok


def test_criterion_8_bell_decomposition_audit():
    worst = 0.0
    mismatched = []
    for alpha in (0.5, 1.0, 2.0):
        rep = verify_bell_decomposition(alpha)
        worst = max(worst, rep.max_residual)
        mismatched = [
            e.logical_bell for e in rep.entries if not e.matches_published_pairing
        ]
    ok = worst < 1e-12
    report(
        8,
        "logical Bell identities hold exactly with the 1/N weights",
        ok,
        f"max residual = {worst:.3e}; printed pairings deviating from the "
        f"exact expansion: {mismatched}",
    )
    assert ok
