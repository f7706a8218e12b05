"""Concentration pipeline: builders, closed form, full runs, sweeps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hesim import (
    CS_MINUS,
    CS_PLUS,
    AngleParams,
    CoherentLabel,
    ECPParams,
    FidelityMode,
    HybridState,
    Mode,
    ModeKind,
    Term,
    build_nonmax_omega,
    build_single_mode_ancilla,
    build_target_mes,
    build_two_mode_ancilla,
    run_ecp,
    success_probability_closed_form,
    sweep,
    sweep_to_csv,
)
from hesim.ecp import CSV_HEADER, DEFAULT_ANGLES, InvalidParams, default_grid

from helpers import assert_close, random_params

E2 = math.exp(-2.0)

#: equal coefficients at alpha = 1: P = 1 / (8 (1 + e^-2)^3)
P_EQUAL_ALPHA1 = 1.0 / (8.0 * (1.0 + E2) ** 3)

#: reference angles theta1 = theta2 = pi/4, theta3 = 3*pi/8 at alpha = 1
P_REFERENCE_ALPHA1 = 0.0730439516855928


# -- parameters ------------------------------------------------------------

def test_params_normalization_enforced():
    with pytest.raises(InvalidParams):
        ECPParams(0.5, 0.5, 0.5, 0.6, 1.0)
    with pytest.raises(InvalidParams):
        ECPParams(0.5, 0.5, 0.5, 0.5, 0.0)


def test_equal_params_normalizers():
    p = ECPParams.equal(1.0)
    assert_close(p.n1(), 1.0 / (1.0 + E2), tol=1e-14)
    assert_close(p.n2() ** 2, 8.0 / (1.0 + E2), tol=1e-12)


def test_angle_map_normalizes_exactly():
    ap = AngleParams(0.3, 1.1, 0.7)
    z, b, g, d = ap.coefficients()
    assert_close(z * z + b * b + g * g + d * d, 1.0, tol=1e-14)


def test_angle_map_snaps_boundary_zeros():
    z, b, g, d = AngleParams(0.0, math.pi / 4, 3 * math.pi / 8).coefficients()
    assert g == 0.0
    z, b, g, d = AngleParams(math.pi / 2, math.pi / 4, 3 * math.pi / 8).coefficients()
    assert d == 0.0


# -- state builders --------------------------------------------------------

def test_omega_state_normalized():
    p = ECPParams(0.6, 0.5, 0.4, math.sqrt(1 - 0.77), 1.0)
    s = build_nonmax_omega(p)
    assert_close(s.norm_sq(), 1.0, tol=1e-12)
    assert s.num_terms == 4


def test_omega_equal_coefficients_is_target():
    s = build_nonmax_omega(ECPParams.equal(1.0))
    assert_close(s.fidelity(build_target_mes(1.0)), 1.0, tol=1e-12)


def test_two_mode_ancilla_normalizer_matches_printed_formula():
    for p in (
        ECPParams.equal(1.0),
        ECPParams(0.6, 0.5, 0.4, math.sqrt(1 - 0.77), 0.7),
    ):
        modes = [Mode("e1", ModeKind.COHERENT), Mode("f1", ModeKind.COHERENT)]
        raw = HybridState(
            modes,
            [
                Term(p.zeta, (CS_MINUS, CS_PLUS)),
                Term(p.beta, (CS_PLUS, CS_PLUS)),
                Term(p.gamma, (CS_MINUS, CS_MINUS)),
                Term(p.delta, (CS_PLUS, CS_MINUS)),
            ],
            p.alpha,
        )
        # the normalization scale of the raw state is exactly n1()
        assert_close(raw.norm(), 1.0 / p.n1(), tol=1e-12)
        assert_close(build_two_mode_ancilla(p).norm_sq(), 1.0, tol=1e-12)


def test_two_mode_ancilla_normalizer_approaches_one():
    p = ECPParams.equal(4.0)
    assert_close(p.n1(), 1.0, tol=1e-10)


def test_single_mode_ancilla_normalizer():
    p = ECPParams(0.6, 0.5, 0.4, math.sqrt(1 - 0.77), 1.0)
    modes = [Mode("g1", ModeKind.COHERENT)]
    raw = HybridState(
        modes,
        [
            Term(p.zeta * p.beta, (CS_MINUS,)),
            Term(p.delta * p.gamma, (CS_PLUS,)),
        ],
        p.alpha,
    )
    assert_close(raw.norm(), 1.0 / p.n2(), tol=1e-12)


def test_single_mode_ancilla_balanced_when_products_equal():
    p = ECPParams.equal(1.0)
    s = build_single_mode_ancilla(p)
    amps = sorted(abs(t.amplitude) for t in s.terms)
    assert_close(amps[0], amps[1], tol=1e-12)


# -- closed form -----------------------------------------------------------

def test_closed_form_equal_coefficients():
    assert_close(
        success_probability_closed_form(ECPParams.equal(1.0)),
        P_EQUAL_ALPHA1,
        tol=1e-14,
    )


def test_closed_form_reference_angles():
    p = DEFAULT_ANGLES.to_params(1.0)
    assert_close(success_probability_closed_form(p), P_REFERENCE_ALPHA1, tol=1e-12)


def test_closed_form_zero_coefficient_is_exact_zero():
    p = ECPParams(0.0, 0.6, 0.48, 0.64, 1.0)
    assert success_probability_closed_form(p) == 0.0


# -- full pipeline ---------------------------------------------------------

def test_run_equal_coefficients_alpha1():
    r = run_ecp(ECPParams.equal(1.0))
    assert_close(r.success_probability_ideal, P_EQUAL_ALPHA1, tol=1e-10)
    assert_close(r.fidelity_vs_target, 1.0, tol=1e-10)


def test_run_large_alpha_limit():
    r = run_ecp(ECPParams.equal(3.0))
    assert abs(r.success_probability_ideal - 0.125) < 1e-6


def test_run_zero_coefficient_chain():
    r = run_ecp(ECPParams(0.0, 0.6, 0.48, 0.64, 1.0))
    assert r.success_probability_ideal == 0.0
    assert r.final_state is None


def test_run_matches_closed_form_random_draws():
    rng = np.random.default_rng(7)
    for _ in range(50):
        r = run_ecp(random_params(rng))
        assert_close(
            r.success_probability_ideal,
            r.success_probability_closed_form,
            tol=1e-10,
        )
        assert_close(r.fidelity_vs_target, 1.0, tol=1e-10)


def test_amplification_checkpoint_before_final_beamsplitter():
    r = run_ecp(ECPParams.equal(1.0))
    stages = dict((name, state) for name, state, _ in r.stage_trace)
    s = stages["before_bs2"]
    pos = s.mode_position("a2")
    sqrt2 = CoherentLabel(0, 1)
    for t in s.terms:
        lab = t.labels[pos]
        assert lab == sqrt2 or lab == -sqrt2


def test_run_exact_mode_matches_ideal():
    r = run_ecp(
        ECPParams.equal(1.0), FidelityMode.EXACT, np.random.default_rng(3)
    )
    assert r.success_probability_exact is not None
    assert 0.0 < r.success_probability_exact < 1.0
    assert_close(r.fidelity_vs_target, 1.0, tol=1e-10)


def test_run_exact_mode_requires_rng():
    with pytest.raises(InvalidParams):
        run_ecp(ECPParams.equal(1.0), FidelityMode.EXACT)


def test_exact_ideal_convergence_monotone():
    diffs = []
    for alpha in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
        r = run_ecp(
            ECPParams.equal(alpha), FidelityMode.EXACT, np.random.default_rng(0)
        )
        diffs.append(
            abs(r.success_probability_exact - r.success_probability_ideal)
        )
    assert all(a > b for a, b in zip(diffs, diffs[1:]))


# -- sweeps ----------------------------------------------------------------

def test_sweep_shape_and_zero_rows():
    rows = sweep(["theta1"], alphas=(1.0,), points=19)
    assert len(rows) == 19
    zeros = [r for r in rows if r.p_closed == 0.0]
    grid = default_grid(19)
    zero_thetas = {round(r.theta1, 12) for r in zeros}
    assert zero_thetas == {round(v, 12) for v in (grid[0], grid[9], grid[18])}
    for r in rows:
        assert_close(r.p_closed, r.p_sim, tol=1e-10)


def test_sweep_alpha_major_row_order():
    rows = sweep(["theta1"], alphas=(0.5, 1.0), points=5)
    assert [r.alpha for r in rows] == [0.5] * 5 + [1.0] * 5


def test_sweep_two_axes_grid():
    rows = sweep(["theta1", "theta2"], alphas=(1.0,), points=7)
    assert len(rows) == 49
    seen = {(round(r.theta1, 12), round(r.theta2, 12)) for r in rows}
    assert len(seen) == 49


def test_sweep_rejects_bad_axes():
    with pytest.raises(InvalidParams):
        sweep(["alpha"])
    with pytest.raises(InvalidParams):
        sweep(["theta1", "theta1"])
    with pytest.raises(InvalidParams):
        sweep(["theta1", "theta2", "theta3"])


def test_sweep_csv_schema_and_determinism():
    rows = sweep(["theta2"], alphas=(1.0,), points=9)
    text1 = sweep_to_csv(rows)
    text2 = sweep_to_csv(sweep(["theta2"], alphas=(1.0,), points=9))
    assert text1 == text2
    lines = text1.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 10
    # every float rendered at 17 significant digits round-trips exactly
    for line in lines[1:]:
        for tok in line.split(","):
            assert float(tok) == float(f"{float(tok):.17g}")
