"""Seeded random trigonometric polynomials and AP sequences.

Randomness comes from NumPy's ``PCG64`` bit generator (O'Neill's permuted
congruential generator, 128-bit state, 64-bit output), so a given seed gives
bit-identical draws on every platform NumPy supports.
"""

import math

import numpy as np

from .apcore import TWO_PI, APSequence, TrigPolynomial
from .errors import ArgumentError


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def _coefficients(rng, n):
    modulus = rng.uniform(0.1, 2.0, n)
    phase = rng.uniform(0.0, TWO_PI, n)
    return modulus * np.exp(1j * phase)


def generate_random_polynomial(seed, n_terms, freq_range=(-5.0, 5.0), min_gap=0.1):
    """Random polynomial with pairwise frequency gaps ``>= min_gap`` and ``|c| in [0.1, 2]``.

    Frequencies are drawn uniformly among all configurations with the required
    separation: sort ``n`` uniform points on the shortened interval
    ``[lo, hi - (n-1) min_gap]`` and spread them by ``min_gap * i``.
    """
    n_terms = int(n_terms)
    lo, hi = map(float, freq_range)
    if n_terms < 1:
        raise ArgumentError("n_terms must be >= 1")
    if not min_gap > 0:
        raise ArgumentError("min_gap must be positive")
    if not hi > lo or min_gap > (hi - lo) / n_terms:
        raise ArgumentError(
            f"cannot place {n_terms} frequencies {min_gap} apart in [{lo}, {hi}]"
        )
    rng = make_rng(seed)
    base = np.sort(rng.uniform(lo, hi - (n_terms - 1) * min_gap, n_terms))
    freqs = base + min_gap * np.arange(n_terms)
    return TrigPolynomial(freqs, _coefficients(rng, n_terms))


def generate_random_sequence(seed, n_phases, min_gap=0.1):
    """Random AP sequence with phases in ``[0, 2pi)`` at least ``min_gap`` apart on the circle."""
    n_phases = int(n_phases)
    if n_phases < 1 or min_gap * n_phases > TWO_PI:
        raise ArgumentError(f"cannot place {n_phases} phases {min_gap} apart on the circle")
    rng = make_rng(seed)
    start = rng.uniform(0.0, TWO_PI)
    base = np.sort(rng.uniform(0.0, TWO_PI - n_phases * min_gap, n_phases))
    phases = np.mod(start + base + min_gap * np.arange(n_phases), TWO_PI)
    return APSequence(phases, _coefficients(rng, n_phases))


def min_frequency_gap(f: TrigPolynomial) -> float:
    return float(np.min(np.diff(f.freqs))) if len(f) > 1 else math.inf
