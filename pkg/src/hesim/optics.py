"""Linear-optical elements: 50:50 beamsplitters, vacuum post-selection,
photon-number discards, and logical single-qubit gates.

Two detection semantics coexist.  `ideal` reproduces the label-based
post-selection used in the protocol write-up (terms whose label is not the
vacuum are discarded outright).  `exact` applies the true measurement
operators: the vacuum projector damps every term by <0|x*alpha>, and the
photon-number discard samples the parity of the count, which imprints a
(-1)^parity phase on the opposite-sign coherent component.  The parity phase
is undone by a deterministic sign flip conditioned on the announced parity,
applied on the correlated partner mode; the equivalence of the corrected
exact output to the ideal output is a tested theorem, not an assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .states import (
    CS_MINUS,
    CS_PLUS,
    CoherentLabel,
    HybridState,
    LogicalQubit,
    ModeKind,
    PolLabel,
    Term,
)


class FidelityMode(Enum):
    IDEAL = "ideal"
    EXACT = "exact"


@dataclass(frozen=True)
class MeasurementRecord:
    mode: str
    kind: str  # "vacuum_postselect" | "photon_parity"
    outcome: str  # "accepted" | "rejected" | "even" | "odd"
    branch_probability: float


class ModeKindMismatch(ValueError):
    pass


class NonuniformLabelMagnitude(ValueError):
    pass


def _require_coherent(state: HybridState, name: str) -> int:
    pos = state.mode_position(name)
    if state.modes[pos].kind is not ModeKind.COHERENT:
        raise ModeKindMismatch(f"mode {name!r} is not a coherent mode")
    return pos


def apply_beamsplitter(state: HybridState, m1: str, m2: str) -> HybridState:
    """50:50 beamsplitter: labels (x, y) -> ((x+y)/sqrt2, (x-y)/sqrt2).

    The first listed mode receives the + combination.  Amplitudes and
    polarization labels are untouched; the map is unitary on the label ring,
    so inner products are preserved exactly.
    """
    p1 = _require_coherent(state, m1)
    p2 = _require_coherent(state, m2)
    terms = []
    for t in state.terms:
        x: CoherentLabel = t.labels[p1]
        y: CoherentLabel = t.labels[p2]
        labels = list(t.labels)
        labels[p1] = (x + y).div_sqrt2()
        labels[p2] = (x - y).div_sqrt2()
        terms.append(Term(t.amplitude, tuple(labels)))
    return state.with_terms(terms, prune=False)


def postselect_vacuum(
    state: HybridState, mode: str, fm: FidelityMode = FidelityMode.IDEAL
) -> tuple[HybridState, float]:
    """Condition on "no photon" in a coherent mode and drop it.

    ideal: keep exactly the terms whose label is 0 (the write-up's rule).
    exact: apply the vacuum projector |0><0|; every term is damped by
    <0|x*alpha> = exp(-|x*alpha|^2 / 2) and survives.

    Returns the reduced state and the acceptance probability.  An empty
    result in ideal mode is a zero-probability outcome, not a fault.
    """
    pos = _require_coherent(state, mode)
    norm_in = state.norm_sq()
    if norm_in == 0:
        return state.dropped_mode(mode), 0.0
    if fm is FidelityMode.IDEAL:
        kept = [t for t in state.terms if t.labels[pos].is_zero]
    else:
        a = state.alpha
        kept = [
            Term(
                t.amplitude
                * math.exp(-0.5 * (t.labels[pos].value * a) ** 2),
                t.labels,
            )
            for t in state.terms
        ]
    reduced = state.with_terms(kept).dropped_mode(mode)
    prob = reduced.norm_sq() / norm_in
    return reduced, prob


def _uniform_magnitude(state: HybridState, pos: int) -> CoherentLabel:
    """Representative +c for a mode whose labels are all +-c (c may be 0)."""
    if not state.terms:
        raise ValueError("cannot measure a mode of an empty state")
    reps = set()
    for t in state.terms:
        lab = t.labels[pos]
        reps.add(lab if lab.is_zero or lab.value > 0 else -lab)
    if len(reps) != 1:
        raise NonuniformLabelMagnitude(
            f"mode labels have mixed magnitudes: {sorted(str(r) for r in reps)}"
        )
    return reps.pop()


def measure_photon_parity_discard(
    state: HybridState,
    mode: str,
    fm: FidelityMode = FidelityMode.IDEAL,
    rng: np.random.Generator | None = None,
    partner_mode: str | None = None,
) -> tuple[HybridState, MeasurementRecord]:
    """Photon-number measurement on a mode holding only |+-c*alpha>, then drop it.

    Because |c*alpha> and |-c*alpha> share a photon-number distribution, the
    count reveals nothing about the sign; only its parity matters, through
    <n|-c*alpha> = (-1)^n <n|c*alpha>.

    ideal: drop the mode, amplitudes unchanged (the write-up's step).
    exact: sample the parity (even with probability (1+e^{-2|c*alpha|^2})/2),
    multiply the -c terms by (-1)^parity, drop the mode, then flip the sign
    of terms whose label on the correlated partner mode is negative when the
    parity was odd.  When the dropped mode's sign is perfectly correlated
    with the partner's, the corrected state equals the ideal one.
    """
    pos = _require_coherent(state, mode)
    rep = _uniform_magnitude(state, pos)
    if fm is FidelityMode.IDEAL:
        record = MeasurementRecord(mode, "photon_parity", "even", 1.0)
        return state.dropped_mode(mode), record
    if rng is None:
        raise ValueError("exact-mode parity measurement requires an rng")
    c_alpha_sq = (rep.value * state.alpha) ** 2
    p_even = 0.5 * (1.0 + math.exp(-2.0 * c_alpha_sq))
    even = bool(rng.random() < p_even)
    signs = [
        -1.0 if (not t.labels[pos].is_zero and t.labels[pos].value < 0) else 1.0
        for t in state.terms
    ]
    terms = list(state.terms)
    if not even:
        terms = [
            Term(t.amplitude * s, t.labels) for t, s in zip(terms, signs)
        ]
    out = state.with_terms(terms, prune=False).dropped_mode(mode)
    if not even:
        if partner_mode is not None:
            ppos = out.mode_position(partner_mode)
            corrected = [
                Term(
                    -t.amplitude
                    if (not t.labels[ppos].is_zero and t.labels[ppos].value < 0)
                    else t.amplitude,
                    t.labels,
                )
                for t in out.terms
            ]
        else:
            # no partner named: undo via the recorded signs of the dropped mode
            corrected = [
                Term(t.amplitude * s, t.labels)
                for t, s in zip(out.terms, signs)
            ]
        out = out.with_terms(corrected, prune=False)
    record = MeasurementRecord(
        mode,
        "photon_parity",
        "even" if even else "odd",
        p_even if even else 1.0 - p_even,
    )
    return out, record


_IN_SPAN = {
    (PolLabel.PLUS, CS_PLUS): 0,
    (PolLabel.MINUS, CS_MINUS): 1,
}


def apply_logical_pauli(
    state: HybridState, qubit: LogicalQubit, which: str
) -> HybridState:
    """Pauli gate on one logical qubit, as an exact label operation.

    Z is polarization-only (|-> picks up -1), which is the practical appeal
    of this encoding; X must flip the coherent sign along with the
    polarization, and Y = iXZ.  The qubit's support must lie in the logical
    span.
    """
    from .states import OutsideLogicalSpan

    if which not in ("I", "X", "Y", "Z"):
        raise ValueError(f"unknown Pauli {which!r}")
    ppos = state.mode_position(qubit.pol_mode)
    cpos = state.mode_position(qubit.cs_mode)
    terms = []
    for t in state.terms:
        key = (t.labels[ppos], t.labels[cpos])
        if key not in _IN_SPAN:
            raise OutsideLogicalSpan(
                f"term labels {key} outside span{{|0_L>,|1_L>}} on "
                f"({qubit.pol_mode},{qubit.cs_mode})"
            )
        bit = _IN_SPAN[key]
        amp = t.amplitude
        labels = list(t.labels)
        if which in ("Z", "Y") and bit == 1:
            amp = -amp
        if which in ("X", "Y"):
            pol, cs = _LOGICAL_FLIP[bit]
            labels[ppos] = pol
            labels[cpos] = cs
        if which == "Y":
            amp *= 1j
        terms.append(Term(amp, tuple(labels)))
    return state.with_terms(terms, prune=False)


_LOGICAL_FLIP = {
    0: (PolLabel.MINUS, CS_MINUS),
    1: (PolLabel.PLUS, CS_PLUS),
}
