"""Shared strategies and helpers for the test suite."""

import math
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from hesim import CoherentLabel, ECPParams

#: small exact rationals keep label arithmetic fast while exercising carries
rationals = st.fractions(
    min_value=Fraction(-4), max_value=Fraction(4), max_denominator=8
)

labels = st.builds(CoherentLabel, rationals, rationals)

alphas = st.floats(min_value=0.3, max_value=3.0, allow_nan=False)

amplitudes = st.complex_numbers(
    max_magnitude=2.0, allow_nan=False, allow_infinity=False
)


def random_params(rng: np.random.Generator) -> ECPParams:
    """A normalized positive coefficient 4-vector with alpha in [0.3, 3]."""
    v = rng.random(4) + 1e-3
    v /= np.linalg.norm(v)
    return ECPParams(*(float(x) for x in v), float(rng.uniform(0.3, 3.0)))


def assert_close(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a!r} != {b!r} (diff {abs(a - b):.3e})"
