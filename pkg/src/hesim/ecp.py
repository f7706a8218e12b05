"""Concentration of the non-maximally entangled four-party hybrid state.

Builds the partially entangled Omega-pattern state and both coherent-state
ancillas, runs the full beamsplitter / post-selection sequence, and checks
the resulting success probability against the closed form
P = 4 (N1 N2 zeta beta delta gamma)^2.

Ideal mode follows the label-based post-selection exactly.  Exact mode keeps
the same kept branch but books the acceptance probability of each vacuum
detection with the true projector applied to the pre-measurement state, and
samples the photon-count parity at each discard (with the deterministic
partner-mode sign correction).  The two modes converge as alpha grows.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .optics import (
    FidelityMode,
    MeasurementRecord,
    apply_beamsplitter,
    measure_photon_parity_discard,
    postselect_vacuum,
)
from .states import (
    CS_MINUS,
    CS_PLUS,
    HybridState,
    Mode,
    ModeKind,
    PolLabel,
    Term,
)

NORMALIZATION_TOL = 1e-12

#: coefficients this small are treated as exactly zero by the angle map, so
#: grid points at multiples of pi/2 produce P = 0 exactly
ANGLE_SNAP = 1e-12

P = PolLabel.PLUS
M = PolLabel.MINUS

CSV_HEADER = ["theta1", "theta2", "theta3", "alpha", "P_closed", "P_sim"]


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class ECPParams:
    """Real coefficients (zeta, beta, gamma, delta) and base amplitude alpha.

    The squared coefficients must sum to one; zeros are permitted (they occur
    at sweep-grid boundaries) and force a vanishing success probability.
    """

    zeta: float
    beta: float
    gamma: float
    delta: float
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidParams("alpha must be positive")
        s = self.zeta**2 + self.beta**2 + self.gamma**2 + self.delta**2
        if abs(s - 1.0) > NORMALIZATION_TOL:
            raise InvalidParams(
                f"coefficients must satisfy sum of squares = 1 (got {s!r})"
            )

    @classmethod
    def equal(cls, alpha: float) -> "ECPParams":
        return cls(0.5, 0.5, 0.5, 0.5, alpha)

    def n1(self) -> float:
        """Normalizer of the two-mode ancilla (coherent-overlap Gram sum)."""
        z, b, g, d, a = self.zeta, self.beta, self.gamma, self.delta, self.alpha
        e2 = math.exp(-2.0 * a * a)
        e4 = math.exp(-4.0 * a * a)
        s = (
            z * z + b * b + d * d + g * g
            + 2.0 * (z * b + z * g + d * b + g * d) * e2
            + 2.0 * (g * b + d * z) * e4
        )
        return 1.0 / math.sqrt(s)

    def n2(self) -> float:
        """Normalizer of the single-mode ancilla."""
        z, b, g, d, a = self.zeta, self.beta, self.gamma, self.delta, self.alpha
        e2 = math.exp(-2.0 * a * a)
        s = z * z * b * b + d * d * g * g + 2.0 * z * b * d * g * e2
        if s <= 0:
            raise InvalidParams("single-mode ancilla has zero norm")
        return 1.0 / math.sqrt(s)


@dataclass(frozen=True)
class AngleParams:
    """Hyperspherical parameterization of the four coefficients."""

    theta1: float
    theta2: float
    theta3: float

    def coefficients(self) -> tuple[float, float, float, float]:
        zeta = math.cos(self.theta3)
        beta = math.sin(self.theta3) * math.cos(self.theta2)
        delta = math.sin(self.theta3) * math.sin(self.theta2) * math.cos(self.theta1)
        gamma = math.sin(self.theta3) * math.sin(self.theta2) * math.sin(self.theta1)
        snap = lambda x: 0.0 if abs(x) < ANGLE_SNAP else x
        return snap(zeta), snap(beta), snap(gamma), snap(delta)

    def to_params(self, alpha: float) -> ECPParams:
        zeta, beta, gamma, delta = self.coefficients()
        return ECPParams(zeta, beta, gamma, delta, alpha)


#: Fig. 2 reference point: theta1 = theta2 = pi/4, theta3 = 3*pi/8
DEFAULT_ANGLES = AngleParams(math.pi / 4, math.pi / 4, 3 * math.pi / 8)


@dataclass
class ECPResult:
    success_probability_ideal: float
    success_probability_closed_form: float
    success_probability_exact: float | None
    final_state: HybridState | None
    fidelity_vs_target: float | None
    stage_trace: list[tuple[str, HybridState, MeasurementRecord | None]]


def _mode(name: str, kind: ModeKind) -> Mode:
    return Mode(name, kind)


def _four_party_modes(cs_names: Sequence[str]) -> list[Mode]:
    modes = [_mode(f"{p}:pol", ModeKind.POLARIZATION) for p in "abcd"]
    modes += [_mode(n, ModeKind.COHERENT) for n in cs_names]
    return modes


_OMEGA_PATTERN = [
    # (amplitude-selector, polarizations abcd, coherent signs abcd)
    ((P, P, P, P), (CS_PLUS, CS_PLUS, CS_PLUS, CS_PLUS)),
    ((P, M, M, P), (CS_PLUS, CS_MINUS, CS_MINUS, CS_PLUS)),
    ((M, P, P, M), (CS_MINUS, CS_PLUS, CS_PLUS, CS_MINUS)),
    ((M, M, M, M), (CS_MINUS, CS_MINUS, CS_MINUS, CS_MINUS)),
]


def build_nonmax_omega(
    p: ECPParams, cs_names: Sequence[str] = ("a1", "b", "c1", "d1")
) -> HybridState:
    """Partially entangled Omega-pattern state on four (pol, cs) pairs."""
    amps = [p.zeta, p.beta, p.gamma, -p.delta]
    terms = [
        Term(a, pols + css)
        for a, (pols, css) in zip(amps, _OMEGA_PATTERN)
        if a != 0
    ]
    return HybridState(_four_party_modes(cs_names), terms, p.alpha)


def build_target_mes(alpha: float, cs_names: Sequence[str] = ("a1", "b", "c1", "d1")) -> HybridState:
    """The maximally entangled Omega-pattern target (all coefficients 1/2)."""
    return build_nonmax_omega(ECPParams.equal(alpha), cs_names)


def build_two_mode_ancilla(p: ECPParams) -> HybridState:
    """Two-mode entangled coherent-state ancilla on modes e1, f1."""
    modes = [_mode("e1", ModeKind.COHERENT), _mode("f1", ModeKind.COHERENT)]
    raw = [
        (p.zeta, (CS_MINUS, CS_PLUS)),
        (p.beta, (CS_PLUS, CS_PLUS)),
        (p.gamma, (CS_MINUS, CS_MINUS)),
        (p.delta, (CS_PLUS, CS_MINUS)),
    ]
    terms = [Term(a, labels) for a, labels in raw if a != 0]
    state = HybridState(modes, terms, p.alpha)
    return state.normalized()


def build_single_mode_ancilla(p: ECPParams) -> HybridState:
    """Single-mode ancilla N2 (zeta*beta |-alpha> + delta*gamma |alpha>) on g1."""
    modes = [_mode("g1", ModeKind.COHERENT)]
    raw = [
        (p.zeta * p.beta, (CS_MINUS,)),
        (p.delta * p.gamma, (CS_PLUS,)),
    ]
    terms = [Term(a, labels) for a, labels in raw if a != 0]
    if not terms:
        raise InvalidParams("single-mode ancilla vanishes (zeta*beta = delta*gamma = 0)")
    return HybridState(modes, terms, p.alpha).normalized()


def success_probability_closed_form(p: ECPParams) -> float:
    """P = 4 (N1 N2 zeta beta delta gamma)^2; exactly 0 on a zero coefficient."""
    prod = p.zeta * p.beta * p.delta * p.gamma
    if prod == 0.0:
        return 0.0
    return 4.0 * (p.n1() * p.n2() * prod) ** 2


def _zero_result(trace) -> ECPResult:
    return ECPResult(0.0, 0.0, None, None, None, trace)


def run_ecp(
    p: ECPParams,
    fm: FidelityMode = FidelityMode.IDEAL,
    rng: np.random.Generator | None = None,
) -> ECPResult:
    """Execute the full concentration sequence.

    Stage order: attach the two-mode ancilla; beamsplit (c1,e1) and (d1,f1);
    vacuum-postselect e2 and f2; beamsplit c and d against fresh vacuum ports
    (the single-input beamsplitters act as two-port devices whose second
    input is vacuum, reproducing +-sqrt2*alpha -> (+-alpha, +-alpha));
    parity-discard the spare ports; attach the single-mode ancilla;
    beamsplit (a1,g1); vacuum-postselect g2; beamsplit a2 against vacuum;
    parity-discard the spare port.
    """
    exact = fm is FidelityMode.EXACT
    if exact and rng is None:
        raise InvalidParams("exact mode requires an rng")
    closed = success_probability_closed_form(p)
    trace: list[tuple[str, HybridState, MeasurementRecord | None]] = []

    s = build_nonmax_omega(p).tensor(build_two_mode_ancilla(p))
    trace.append(("combined_with_two_mode_ancilla", s, None))

    s = apply_beamsplitter(s, "c1", "e1").with_renamed({"c1": "c2", "e1": "e2"})
    s = apply_beamsplitter(s, "d1", "f1").with_renamed({"d1": "d2", "f1": "f2"})
    trace.append(("after_bs5_bs3", s, None))

    prob_ideal = 1.0
    prob_exact = 1.0 if exact else None

    for m in ("e2", "f2"):
        if exact:
            _, pe = postselect_vacuum(s, m, FidelityMode.EXACT)
            prob_exact *= pe
        s, pi_ = postselect_vacuum(s, m, FidelityMode.IDEAL)
        prob_ideal *= pi_
        trace.append(
            (
                f"vacuum_postselect_{m}",
                s,
                MeasurementRecord(m, "vacuum_postselect", "accepted", pi_),
            )
        )
        if s.is_empty():
            return _zero_result(trace)

    for src, out, spare in (("c2", "c3", "c4"), ("d2", "d3", "d4")):
        s = s.added_vacuum_mode(spare)
        s = apply_beamsplitter(s, src, spare).with_renamed({src: out})
        s, rec = measure_photon_parity_discard(
            s, spare, fm, rng=rng, partner_mode=out
        )
        trace.append((f"parity_discard_{spare}", s, rec))

    s = s.tensor(build_single_mode_ancilla(p))
    trace.append(("combined_with_single_mode_ancilla", s, None))

    s = apply_beamsplitter(s, "a1", "g1").with_renamed({"a1": "a2", "g1": "g2"})
    trace.append(("after_bs1", s, None))

    if exact:
        _, pe = postselect_vacuum(s, "g2", FidelityMode.EXACT)
        prob_exact *= pe
    s, pi_ = postselect_vacuum(s, "g2", FidelityMode.IDEAL)
    prob_ideal *= pi_
    trace.append(
        (
            "vacuum_postselect_g2",
            s,
            MeasurementRecord("g2", "vacuum_postselect", "accepted", pi_),
        )
    )
    if s.is_empty():
        return _zero_result(trace)
    trace.append(("before_bs2", s, None))

    s = s.added_vacuum_mode("a4")
    s = apply_beamsplitter(s, "a2", "a4").with_renamed({"a2": "a3"})
    s, rec = measure_photon_parity_discard(s, "a4", fm, rng=rng, partner_mode="a3")
    trace.append(("parity_discard_a4", s, rec))

    final = s.with_renamed({"a3": "a1", "c3": "c1", "d3": "d1"}).normalized()
    fid = final.fidelity(build_target_mes(p.alpha))
    return ECPResult(prob_ideal, closed, prob_exact, final, fid, trace)


# -- parameter sweeps ------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    theta1: float
    theta2: float
    theta3: float
    alpha: float
    p_closed: float
    p_sim: float


def default_grid(points: int = 181) -> np.ndarray:
    return np.linspace(0.0, math.pi, points)


def sweep(
    axes: Sequence[str],
    grids: Sequence[Sequence[float]] | None = None,
    fixed: AngleParams = DEFAULT_ANGLES,
    alphas: Sequence[float] = (0.5, 1.0, 2.0),
    points: int = 181,
) -> list[SweepRow]:
    """Evaluate P over a 1-D or 2-D grid of angle parameters.

    Rows are ordered alpha-major, then in grid order per axis.  P_sim comes
    from the ideal-mode pipeline and P_closed from the closed form; their
    agreement is an acceptance invariant, not an assumption.
    """
    valid = {"theta1", "theta2", "theta3"}
    if not axes or len(axes) > 2 or any(a not in valid for a in axes):
        raise InvalidParams(f"axes must name one or two of {sorted(valid)}")
    if len(set(axes)) != len(axes):
        raise InvalidParams("sweep axes must be distinct")
    if grids is None:
        grids = [default_grid(points) for _ in axes]
    if len(grids) != len(axes):
        raise InvalidParams("one grid per axis required")
    rows: list[SweepRow] = []
    base = {
        "theta1": fixed.theta1,
        "theta2": fixed.theta2,
        "theta3": fixed.theta3,
    }
    if len(axes) == 1:
        points_iter = [(v,) for v in grids[0]]
    else:
        points_iter = [(u, v) for u in grids[0] for v in grids[1]]
    for alpha in alphas:
        for values in points_iter:
            angles = dict(base)
            for ax, v in zip(axes, values):
                angles[ax] = float(v)
            ap = AngleParams(angles["theta1"], angles["theta2"], angles["theta3"])
            params = ap.to_params(alpha)
            p_closed = success_probability_closed_form(params)
            result = run_ecp(params, FidelityMode.IDEAL)
            rows.append(
                SweepRow(
                    ap.theta1,
                    ap.theta2,
                    ap.theta3,
                    alpha,
                    p_closed,
                    result.success_probability_ideal,
                )
            )
    return rows


def sweep_to_csv(rows: Iterable[SweepRow]) -> str:
    """Render sweep rows in the fixed CSV schema at 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                f"{v:.17g}"
                for v in (r.theta1, r.theta2, r.theta3, r.alpha, r.p_closed, r.p_sim)
            ]
        )
    return buf.getvalue()
