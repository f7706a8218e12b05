"""Exact hybrid polarization/coherent-state vectors.

A state is a linear combination of product terms over named modes.
Polarization modes carry |+>/|-> labels (orthonormal); coherent modes carry
an exact multiplier of the base amplitude alpha, represented as a + b*sqrt(2)
with rational a, b.  That ring is closed under the 50:50 beamsplitter rule
(x +/- y)/sqrt(2), so chains of beamsplitters merge terms exactly instead of
up to a tolerance.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

#: amplitudes below this are dropped during canonicalization (unless pruning
#: is disabled for exact-arithmetic checks)
PRUNE_THRESHOLD = 1e-12


class ModeKind(str, Enum):
    POLARIZATION = "polarization"
    COHERENT = "coherent"


@dataclass(frozen=True)
class Mode:
    name: str
    kind: ModeKind


@dataclass(frozen=True, eq=False)
class CoherentLabel:
    """Exact coherent-amplitude multiplier a + b*sqrt(2), rational a and b.

    The mode holds the coherent state |(a + b*sqrt(2)) * alpha>.

    Hash and equality are defined over (a, b); the hash is computed once at
    construction because labels are used heavily as dict keys when merging
    terms, and hashing a Fraction is comparatively expensive.
    """

    a: Fraction
    b: Fraction
    _value: float = field(init=False, repr=False, compare=False, default=0.0)
    _key: tuple = field(init=False, repr=False, compare=False, default=())
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        a, b = self.a, self.b
        if type(a) is not Fraction:
            a = Fraction(a)
            object.__setattr__(self, "a", a)
        if type(b) is not Fraction:
            b = Fraction(b)
            object.__setattr__(self, "b", b)
        key = (a.numerator, a.denominator, b.numerator, b.denominator)
        object.__setattr__(self, "_value", float(a) + float(b) * SQRT2)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, CoherentLabel):
            return NotImplemented
        return self._key == other._key

    @property
    def value(self) -> float:
        """Numeric multiplier of alpha."""
        return self._value

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __add__(self, other: "CoherentLabel") -> "CoherentLabel":
        return CoherentLabel(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "CoherentLabel") -> "CoherentLabel":
        return CoherentLabel(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "CoherentLabel":
        return CoherentLabel(-self.a, -self.b)

    def div_sqrt2(self) -> "CoherentLabel":
        # (a + b*sqrt(2)) / sqrt(2) = b + (a/2)*sqrt(2); exact in the ring
        return CoherentLabel(self.b, self.a / 2)

    def __str__(self):
        return f"({self.a}+{self.b}√2)"


CS_ZERO = CoherentLabel(Fraction(0), Fraction(0))
CS_PLUS = CoherentLabel(Fraction(1), Fraction(0))
CS_MINUS = CoherentLabel(Fraction(-1), Fraction(0))


class PolLabel(Enum):
    """Polarization labels in the |+>, |-> basis; {H, V} is a derived view."""

    PLUS = "+"
    MINUS = "-"

    def flipped(self) -> "PolLabel":
        return PolLabel.MINUS if self is PolLabel.PLUS else PolLabel.PLUS


Label = PolLabel | CoherentLabel


@dataclass(frozen=True)
class Term:
    amplitude: complex
    labels: tuple[Label, ...]


class RegistryMismatch(ValueError):
    pass


class ZeroNormState(ValueError):
    pass


class OutsideLogicalSpan(ValueError):
    pass


def coherent_overlap(x: CoherentLabel, y: CoherentLabel, alpha: float) -> float:
    """<x*alpha | y*alpha> for real labels x, y and real alpha > 0.

    exp(-(|x a|^2 + |y a|^2)/2 + conj(x a) (y a)) = exp(-a^2 (x-y)^2 / 2).
    """
    d = x.value - y.value
    return math.exp(-0.5 * alpha * alpha * d * d)


@dataclass(frozen=True)
class LogicalQubit:
    """A (polarization, coherent) mode pair hosting one logical qubit.

    Basis: |0_L> = |+>|alpha>, |1_L> = |->|-alpha>; exactly orthonormal
    because the polarization factors are orthogonal.
    """

    pol_mode: str
    cs_mode: str


class HybridState:
    """Immutable linear combination of product terms over registered modes."""

    __slots__ = ("modes", "terms", "alpha", "_index")

    def __init__(
        self,
        modes: Sequence[Mode],
        terms: Iterable[Term],
        alpha: float,
        prune: bool = True,
    ):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        names = [m.name for m in modes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate mode names in {names}")
        self.modes = tuple(modes)
        self.alpha = float(alpha)
        self._index = {m.name: i for i, m in enumerate(self.modes)}
        merged: dict[tuple, complex] = {}
        for t in terms:
            if len(t.labels) != len(self.modes):
                raise ValueError("term label count does not match registry")
            merged[t.labels] = merged.get(t.labels, 0.0) + complex(t.amplitude)
        kept = []
        for labels, amp in merged.items():
            if prune and abs(amp) < PRUNE_THRESHOLD:
                continue
            if amp != 0:
                kept.append(Term(amp, labels))
        self.terms = tuple(kept)

    # -- registry helpers --------------------------------------------------

    def mode_position(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise RegistryMismatch(f"no mode named {name!r}") from None

    def mode(self, name: str) -> Mode:
        return self.modes[self.mode_position(name)]

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def is_empty(self) -> bool:
        return not self.terms

    def with_renamed(self, mapping: Mapping[str, str]) -> "HybridState":
        new_modes = [
            Mode(mapping.get(m.name, m.name), m.kind) for m in self.modes
        ]
        return HybridState(new_modes, self.terms, self.alpha, prune=False)

    def with_terms(self, terms: Iterable[Term], prune: bool = True) -> "HybridState":
        return HybridState(self.modes, terms, self.alpha, prune=prune)

    def scaled(self, factor: complex) -> "HybridState":
        return self.with_terms(
            Term(t.amplitude * factor, t.labels) for t in self.terms
        )

    def dropped_mode(self, name: str) -> "HybridState":
        pos = self.mode_position(name)
        modes = self.modes[:pos] + self.modes[pos + 1 :]
        terms = [
            Term(t.amplitude, t.labels[:pos] + t.labels[pos + 1 :])
            for t in self.terms
        ]
        return HybridState(modes, terms, self.alpha, prune=False)

    # -- inner products ----------------------------------------------------

    def inner(self, other: "HybridState") -> complex:
        """<self | other> over the shared registry (Gram over coherent modes)."""
        if (
            tuple(m.name for m in self.modes) != tuple(m.name for m in other.modes)
            or tuple(m.kind for m in self.modes) != tuple(m.kind for m in other.modes)
            or self.alpha != other.alpha
        ):
            raise RegistryMismatch("states are defined over different registries")
        cs_positions = [
            i for i, m in enumerate(self.modes) if m.kind is ModeKind.COHERENT
        ]
        pol_positions = [
            i for i, m in enumerate(self.modes) if m.kind is ModeKind.POLARIZATION
        ]
        # bucket by polarization pattern: cross-pattern pairs vanish exactly
        buckets: dict[tuple, list[Term]] = {}
        for t in other.terms:
            buckets.setdefault(tuple(t.labels[i] for i in pol_positions), []).append(t)
        total = 0.0 + 0.0j
        cache: dict[tuple[CoherentLabel, CoherentLabel], float] = {}
        for s in self.terms:
            pat = tuple(s.labels[i] for i in pol_positions)
            for t in buckets.get(pat, ()):
                ov = 1.0
                for i in cs_positions:
                    key = (s.labels[i], t.labels[i])
                    g = cache.get(key)
                    if g is None:
                        g = coherent_overlap(key[0], key[1], self.alpha)
                        cache[key] = g
                    ov *= g
                total += s.amplitude.conjugate() * t.amplitude * ov
        return total

    def norm_sq(self) -> float:
        return self.inner(self).real

    def norm(self) -> float:
        return math.sqrt(max(self.norm_sq(), 0.0))

    def normalized(self) -> "HybridState":
        n = self.norm()
        if n < 1e-300:
            raise ZeroNormState("cannot normalize a zero-norm state")
        return self.scaled(1.0 / n)

    def fidelity(self, other: "HybridState") -> float:
        ns, nt = self.norm_sq(), other.norm_sq()
        if ns <= 0 or nt <= 0:
            raise ZeroNormState("fidelity of a zero-norm state is undefined")
        return abs(self.inner(other)) ** 2 / (ns * nt)

    # -- composition -------------------------------------------------------

    def tensor(self, other: "HybridState") -> "HybridState":
        if self.alpha != other.alpha:
            raise ValueError("tensor factors must share base alpha")
        overlap = {m.name for m in self.modes} & {m.name for m in other.modes}
        if overlap:
            raise ValueError(f"duplicate mode names in tensor product: {overlap}")
        modes = self.modes + other.modes
        terms = [
            Term(s.amplitude * t.amplitude, s.labels + t.labels)
            for s in self.terms
            for t in other.terms
        ]
        return HybridState(modes, terms, self.alpha)

    def added_vacuum_mode(self, name: str) -> "HybridState":
        """Append a fresh coherent mode in the vacuum (label 0) to every term."""
        modes = self.modes + (Mode(name, ModeKind.COHERENT),)
        terms = [Term(t.amplitude, t.labels + (CS_ZERO,)) for t in self.terms]
        return HybridState(modes, terms, self.alpha, prune=False)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        def enc_label(label: Label):
            if isinstance(label, PolLabel):
                return label.value
            return {
                "a": [label.a.numerator, label.a.denominator],
                "b": [label.b.numerator, label.b.denominator],
            }

        return {
            "alpha": self.alpha,
            "modes": [{"name": m.name, "kind": m.kind.value} for m in self.modes],
            "terms": [
                {
                    "re": t.amplitude.real,
                    "im": t.amplitude.imag,
                    "labels": [enc_label(l) for l in t.labels],
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "HybridState":
        modes = [Mode(m["name"], ModeKind(m["kind"])) for m in data["modes"]]

        def dec_label(raw, kind: ModeKind) -> Label:
            if kind is ModeKind.POLARIZATION:
                return PolLabel(raw)
            return CoherentLabel(Fraction(*raw["a"]), Fraction(*raw["b"]))

        terms = [
            Term(
                complex(t["re"], t["im"]),
                tuple(dec_label(l, m.kind) for l, m in zip(t["labels"], modes)),
            )
            for t in data["terms"]
        ]
        return cls(modes, terms, data["alpha"], prune=False)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "HybridState":
        return cls.from_json_dict(json.loads(text))

    def __repr__(self):
        return (
            f"HybridState(alpha={self.alpha}, modes="
            f"{[m.name for m in self.modes]}, terms={len(self.terms)})"
        )


# -- logical-qubit view ----------------------------------------------------

_LOGICAL_LABELS = {
    0: (PolLabel.PLUS, CS_PLUS),
    1: (PolLabel.MINUS, CS_MINUS),
}


def logical_basis_state(
    qubits: Sequence[LogicalQubit], bits: Sequence[int], alpha: float
) -> HybridState:
    """Product basis state |b_1 ... b_n> over the given logical qubits."""
    modes: list[Mode] = []
    labels: list[Label] = []
    for q, b in zip(qubits, bits):
        pol, cs = _LOGICAL_LABELS[b]
        modes.append(Mode(q.pol_mode, ModeKind.POLARIZATION))
        modes.append(Mode(q.cs_mode, ModeKind.COHERENT))
        labels.append(pol)
        labels.append(cs)
    return HybridState(modes, [Term(1.0, tuple(labels))], alpha, prune=False)


def logical_state(
    qubits: Sequence[LogicalQubit], coeffs: np.ndarray, alpha: float
) -> HybridState:
    """State with the given coefficient vector (length 2^n) over logical basis."""
    n = len(qubits)
    coeffs = np.asarray(coeffs, dtype=complex).reshape(2**n)
    modes: list[Mode] = []
    for q in qubits:
        modes.append(Mode(q.pol_mode, ModeKind.POLARIZATION))
        modes.append(Mode(q.cs_mode, ModeKind.COHERENT))
    terms = []
    for idx in range(2**n):
        amp = coeffs[idx]
        if amp == 0:
            continue
        labels: list[Label] = []
        for k in range(n):
            bit = (idx >> (n - 1 - k)) & 1
            pol, cs = _LOGICAL_LABELS[bit]
            labels.append(pol)
            labels.append(cs)
        terms.append(Term(amp, tuple(labels)))
    return HybridState(modes, terms, alpha)


def _term_bits(state: HybridState, qubits: Sequence[LogicalQubit], term: Term):
    """Bitstring of a term if it is a pure logical-basis product, else None."""
    bits = []
    for q in qubits:
        pol = term.labels[state.mode_position(q.pol_mode)]
        cs = term.labels[state.mode_position(q.cs_mode)]
        if pol is PolLabel.PLUS and cs == CS_PLUS:
            bits.append(0)
        elif pol is PolLabel.MINUS and cs == CS_MINUS:
            bits.append(1)
        else:
            return None
    return tuple(bits)


def logical_coefficients(
    state: HybridState,
    qubits: Sequence[LogicalQubit],
    residual_tol: float = 1e-10,
) -> np.ndarray:
    """Coefficient vector of the state over the logical product basis.

    The qubit pairs must cover every registered mode.  Raises
    OutsideLogicalSpan if the projection leaves a residual above tolerance.
    """
    n = len(qubits)
    covered = {m for q in qubits for m in (q.pol_mode, q.cs_mode)}
    names = {m.name for m in state.modes}
    if covered != names:
        raise RegistryMismatch(
            f"logical qubits cover {sorted(covered)} but state has {sorted(names)}"
        )
    coeffs = np.zeros(2**n, dtype=complex)
    direct = True
    for t in state.terms:
        bits = _term_bits(state, qubits, t)
        if bits is None:
            direct = False
            break
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        coeffs[idx] += t.amplitude
    if not direct:
        # project term by term onto the orthonormal logical basis
        coeffs = np.zeros(2**n, dtype=complex)
        for idx in range(2**n):
            bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
            basis = logical_basis_state(qubits, bits, state.alpha)
            coeffs[idx] = _inner_reordered(basis, state)
    residual = state.norm_sq() - float(np.sum(np.abs(coeffs) ** 2))
    if abs(residual) > residual_tol:
        raise OutsideLogicalSpan(
            f"state has support outside the logical span (residual {residual:.3e})"
        )
    return coeffs


def _inner_reordered(bra: HybridState, ket: HybridState) -> complex:
    """<bra|ket> tolerating different registry orderings of the same modes."""
    order = [bra.mode_position(m.name) for m in ket.modes]
    modes = tuple(bra.modes[i] for i in order)
    terms = [
        Term(t.amplitude, tuple(t.labels[i] for i in order)) for t in bra.terms
    ]
    return HybridState(modes, terms, bra.alpha, prune=False).inner(ket)


def reduced_density_logical(
    state: HybridState,
    qubits: Sequence[LogicalQubit],
    keep: Sequence[int],
) -> np.ndarray:
    """Density matrix over the kept logical qubits, tracing out the rest.

    Valid only for states in the logical span, where the orthonormal logical
    basis makes the partial trace well-defined despite the nonorthogonal
    coherent basis underneath.
    """
    n = len(qubits)
    keep = list(keep)
    vec = logical_coefficients(state, qubits)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ZeroNormState("cannot reduce a zero-norm state")
    vec = (vec / nrm).reshape((2,) * n)
    traced = [i for i in range(n) if i not in keep]
    psi = np.moveaxis(vec, keep + traced, range(n))
    psi = psi.reshape(2 ** len(keep), 2 ** len(traced))
    return psi @ psi.conj().T
