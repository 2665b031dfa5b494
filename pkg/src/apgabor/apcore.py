"""
Finite-spectrum almost periodic functions and sequences.

A :class:`TrigPolynomial` is a finite sum ``sum_j c_j exp(i lam_j t)`` and an
:class:`APSequence` is a finite sum ``sum_j c_j exp(i theta_j n)`` over the
integers.  Inner products are evaluated exactly through Parseval; the
``*_time_average`` functions give the finite-window averages in closed form and
serve as independent checks of those inner products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ArgumentError

TOL_FREQ = 1e-9
TOL_COEFF = 1e-15
TWO_PI = 2.0 * math.pi


def _group_sorted(values, tol):
    """Labels for chains of sorted values whose neighbours differ by < tol."""
    if len(values) == 0:
        return np.zeros(0, dtype=np.intp)
    breaks = np.diff(values) >= tol
    return np.concatenate(([0], np.cumsum(breaks)))


def _canonical(freqs, coeffs, tol_freq, tol_coeff):
    freqs = np.asarray(freqs, dtype=float).ravel()
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    if freqs.shape != coeffs.shape:
        raise ArgumentError("frequencies and coefficients differ in length")
    if not np.all(np.isfinite(freqs)) or not np.all(np.isfinite(coeffs)):
        raise ArgumentError("non-finite frequency or coefficient")
    order = np.argsort(freqs, kind="stable")
    freqs, coeffs = freqs[order], coeffs[order]
    labels = _group_sorted(freqs, tol_freq)
    if len(freqs):
        first = np.concatenate(([True], labels[1:] != labels[:-1]))
        freqs = freqs[first]
        # np.add.at accumulates in index order, which is the canonical order
        merged = np.zeros(len(freqs), dtype=complex)
        np.add.at(merged, labels, coeffs)
        coeffs = merged
    keep = np.abs(coeffs) >= tol_coeff
    return freqs[keep], coeffs[keep]


def _frozen(arr):
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Trigonometric polynomial ``sum_j c_j e^{i lam_j t}``.

    Terms are kept sorted by frequency; frequencies closer than ``TOL_FREQ`` are
    merged and coefficients below ``TOL_COEFF`` in modulus are dropped.
    """

    freqs: np.ndarray
    coeffs: np.ndarray

    def __init__(self, freqs=(), coeffs=()):
        f, c = _canonical(freqs, coeffs, TOL_FREQ, TOL_COEFF)
        object.__setattr__(self, "freqs", _frozen(f))
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, complex]]) -> "TrigPolynomial":
        terms = list(terms)
        if not terms:
            return cls()
        f, c = zip(*terms)
        return cls(f, c)

    @classmethod
    def exponential(cls, freq: float, coeff: complex = 1.0) -> "TrigPolynomial":
        """The pure exponential ``coeff * e_freq``."""
        return cls([freq], [coeff])

    def __len__(self):
        return len(self.freqs)

    def __iter__(self):
        return iter(zip(self.freqs.tolist(), self.coeffs.tolist()))

    def __repr__(self):
        terms = ", ".join(f"({f:.6g}, {c:.6g})" for f, c in self)
        return f"TrigPolynomial([{terms}])"

    def __add__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return TrigPolynomial(
            np.concatenate((self.freqs, other.freqs)),
            np.concatenate((self.coeffs, other.coeffs)),
        )

    def __neg__(self):
        return TrigPolynomial(self.freqs, -self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return TrigPolynomial(self.freqs, self.coeffs * scalar)

    __rmul__ = __mul__

    def __call__(self, t):
        """Evaluate at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if not len(self):
            return np.zeros(t.shape, dtype=complex)
        return np.exp(1j * np.multiply.outer(t, self.freqs)) @ self.coeffs

    def coefficient(self, freq: float) -> complex:
        """Fourier coefficient ``(f, e_freq)``; zero off the spectrum."""
        if not len(self):
            return 0j
        i = int(np.argmin(np.abs(self.freqs - freq)))
        if abs(self.freqs[i] - freq) < TOL_FREQ:
            return complex(self.coeffs[i])
        return 0j

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"freq": float(f), "re": float(c.real), "im": float(c.imag)}
                for f, c in zip(self.freqs, self.coeffs)
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrigPolynomial":
        terms = data["terms"]
        return cls(
            [t["freq"] for t in terms],
            [complex(t["re"], t.get("im", 0.0)) for t in terms],
        )


def _wrap_phase(theta):
    return np.mod(np.asarray(theta, dtype=float), TWO_PI)


@dataclass(frozen=True, eq=False)
class APSequence:
    """Almost periodic sequence ``n -> sum_j c_j e^{i theta_j n}`` on the integers.

    Phases live in ``[0, 2pi)``; phases that agree modulo ``2pi`` within
    ``TOL_FREQ`` are merged (including across the wrap point).
    """

    phases: np.ndarray
    coeffs: np.ndarray

    def __init__(self, phases=(), coeffs=()):
        p = _wrap_phase(phases).ravel()
        c = np.asarray(coeffs, dtype=complex).ravel()
        # values just below 2pi merge with the group at 0
        p = np.where(TWO_PI - p < TOL_FREQ, 0.0, p)
        p, c = _canonical(p, c, TOL_FREQ, 0.0)
        if len(p) > 1 and p[-1] + TOL_FREQ > TWO_PI + p[0]:
            c = c.copy()
            c[0] += c[-1]
            p, c = p[:-1], c[:-1]
        keep = np.abs(c) >= TOL_COEFF
        object.__setattr__(self, "phases", _frozen(p[keep]))
        object.__setattr__(self, "coeffs", _frozen(c[keep]))

    @classmethod
    def from_terms(cls, terms):
        terms = list(terms)
        if not terms:
            return cls()
        p, c = zip(*terms)
        return cls(p, c)

    @classmethod
    def exponential(cls, phase: float, coeff: complex = 1.0) -> "APSequence":
        return cls([phase], [coeff])

    def __len__(self):
        return len(self.phases)

    def __iter__(self):
        return iter(zip(self.phases.tolist(), self.coeffs.tolist()))

    def __repr__(self):
        terms = ", ".join(f"({p:.6g}, {c:.6g})" for p, c in self)
        return f"APSequence([{terms}])"

    def __add__(self, other):
        if not isinstance(other, APSequence):
            return NotImplemented
        return APSequence(
            np.concatenate((self.phases, other.phases)),
            np.concatenate((self.coeffs, other.coeffs)),
        )

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return APSequence(self.phases, self.coeffs * scalar)

    __rmul__ = __mul__

    def __call__(self, n):
        n = np.asarray(n)
        if not len(self):
            return np.zeros(n.shape, dtype=complex)
        return np.exp(1j * np.multiply.outer(n.astype(float), self.phases)) @ self.coeffs

    def coefficient(self, phase: float) -> complex:
        """``(a, e~_phase)``; the phase is read modulo 2pi."""
        if not len(self):
            return 0j
        d = _phase_distance(self.phases, phase)
        i = int(np.argmin(d))
        return complex(self.coeffs[i]) if d[i] < TOL_FREQ else 0j

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"phase": float(p), "re": float(c.real), "im": float(c.imag)}
                for p, c in zip(self.phases, self.coeffs)
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "APSequence":
        terms = data["terms"]
        return cls(
            [t["phase"] for t in terms],
            [complex(t["re"], t.get("im", 0.0)) for t in terms],
        )


def _phase_distance(a, b):
    """Distance between phases on the circle R/2piZ."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


class ResidueDecomposition(NamedTuple):
    """``lam = residue + (2pi/alpha) * index`` with ``residue`` in ``[0, 2pi/alpha)``."""

    residue: float
    index: int


# --- inner products -------------------------------------------------------


def ap_inner(f: TrigPolynomial, g: TrigPolynomial) -> complex:
    """Parseval inner product ``sum_lam f^(lam) conj(g^(lam))``."""
    if not len(f) or not len(g):
        return 0j
    idx = np.searchsorted(g.freqs, f.freqs)
    total = np.zeros(len(f), dtype=complex)
    for cand in (idx - 1, idx):
        ok = (cand >= 0) & (cand < len(g))
        c = np.clip(cand, 0, len(g) - 1)
        hit = ok & (np.abs(g.freqs[c] - f.freqs) < TOL_FREQ)
        total = np.where(hit, f.coeffs * np.conj(g.coeffs[c]), total)
    return complex(np.sum(total))


def ap_norm(f: TrigPolynomial) -> float:
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def time_average_inner(f: TrigPolynomial, g: TrigPolynomial, T: float) -> complex:
    """Exact value of ``(2T)^-1 int_{-T}^{T} f(t) conj(g(t)) dt``."""
    if not T > 0:
        raise ArgumentError(f"averaging half-width must be positive, got {T}")
    if not len(f) or not len(g):
        return 0j
    delta = np.subtract.outer(f.freqs, g.freqs)
    # sin(dT)/(dT), equal to 1 at d = 0
    kernel = np.sinc(delta * T / math.pi)
    return complex(f.coeffs @ kernel @ np.conj(g.coeffs))


def seq_inner(a: APSequence, b: APSequence) -> complex:
    """Parseval inner product on AP(Z), phases matched modulo 2pi."""
    if not len(a) or not len(b):
        return 0j
    hit = _phase_distance(a.phases[:, None], b.phases[None, :]) < TOL_FREQ
    return complex(np.sum(np.where(hit, np.multiply.outer(a.coeffs, np.conj(b.coeffs)), 0)))


def seq_norm(a: APSequence) -> float:
    return float(np.sqrt(np.sum(np.abs(a.coeffs) ** 2)))


def seq_time_average(a: APSequence, b: APSequence, p: int) -> complex:
    """Exact ``(2p+1)^-1 sum_{n=-p}^{p} a_n conj(b_n)`` via the Dirichlet kernel.

    The divisor is the number of summands, ``2p + 1``.
    """
    if int(p) != p or p < 1:
        raise ArgumentError(f"p must be an integer >= 1, got {p}")
    if not len(a) or not len(b):
        return 0j
    n = 2 * int(p) + 1
    delta = np.mod(np.subtract.outer(a.phases, b.phases) + math.pi, TWO_PI) - math.pi
    half = np.sin(delta / 2.0)
    safe = np.where(half == 0.0, 1.0, half)
    kernel = np.where(half == 0.0, 1.0, np.sin(n * delta / 2.0) / (n * safe))
    return complex(a.coeffs @ kernel @ np.conj(b.coeffs))


# --- operators -------------------------------------------------------------


def translate(f: TrigPolynomial, x: float) -> TrigPolynomial:
    """``(T_x f)(t) = f(t - x)``: each coefficient picks up ``e^{-i lam x}``."""
    return TrigPolynomial(f.freqs, f.coeffs * np.exp(-1j * f.freqs * x))


def modulate(f: TrigPolynomial, omega: float) -> TrigPolynomial:
    """``(M_omega f)(t) = e^{i omega t} f(t)``."""
    return TrigPolynomial(f.freqs + omega, f.coeffs)


def convolve(f: TrigPolynomial, window) -> TrigPolynomial:
    """``f * psi`` for an integrable window; ``e_lam * psi = psi^(lam) e_lam``."""
    if not len(f):
        return TrigPolynomial()
    return TrigPolynomial(f.freqs, f.coeffs * window.fourier(f.freqs))


def residue_decompose(lam: float, alpha: float) -> ResidueDecomposition:
    """Split ``lam`` into its residue modulo ``2pi/alpha`` and the lattice index."""
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    gamma = TWO_PI / alpha
    p = math.floor(lam / gamma)
    residue = lam - gamma * p
    if residue < 0.0:
        residue += gamma
        p -= 1
    if gamma - residue < TOL_FREQ:
        residue = 0.0
        p += 1
    return ResidueDecomposition(float(residue), int(p))


# --- Stepanov norm ---------------------------------------------------------

_MAX_DENOMINATOR = 64


def quasi_period(freqs) -> float:
    """Period of ``t -> int_t^{t+1} |f|^2`` for the given spectrum.

    Exact when all frequency differences are rational multiples of each other
    (denominators up to 64); otherwise a heuristic horizon
    ``10 * max(1, 2pi / min_gap)``.
    """
    freqs = np.sort(np.asarray(freqs, dtype=float))
    if len(freqs) < 2:
        return 1.0
    diffs = freqs[1:] - freqs[0]
    base = diffs[0]
    denom = 1
    for d in diffs:
        r = d / base
        frac = Fraction(r).limit_denominator(_MAX_DENOMINATOR)
        if abs(r - float(frac)) > 1e-9 * max(1.0, abs(r)):
            break
        denom = math.lcm(denom, frac.denominator)
    else:
        if denom <= _MAX_DENOMINATOR:
            return TWO_PI * denom / base
    min_gap = float(np.min(np.diff(freqs)))
    return 10.0 * max(1.0, TWO_PI / min_gap)


def unit_window_energy(f: TrigPolynomial, t) -> np.ndarray:
    """``int_t^{t+1} |f(s)|^2 ds`` in closed form, vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if not len(f):
        return np.zeros(t.shape)
    delta = np.subtract.outer(f.freqs, f.freqs)
    safe = np.where(delta == 0.0, 1.0, delta)
    unit = np.where(delta == 0.0, 1.0, (np.exp(1j * delta) - 1.0) / (1j * safe))
    weights = np.outer(f.coeffs, np.conj(f.coeffs)) * unit
    u = np.exp(1j * np.multiply.outer(t, f.freqs))
    return np.real(np.sum((u @ weights) * np.conj(u), axis=-1))


def stepanov_norm(f: TrigPolynomial, grid_step: float, chunk: int = 1 << 16) -> float:
    """Grid lower estimate of ``sup_t (int_t^{t+1} |f|^2)^{1/2}``.

    The sup runs over ``[0, quasi_period(f.freqs)]`` with spacing ``grid_step``.
    """
    if not grid_step > 0:
        raise ArgumentError(f"grid_step must be positive, got {grid_step}")
    if not len(f):
        return 0.0
    if len(f) == 1:
        return float(abs(f.coeffs[0]))
    period = quasi_period(f.freqs)
    n = int(math.ceil(period / grid_step)) + 1
    best = 0.0
    for start in range(0, n, chunk):
        t = np.arange(start, min(n, start + chunk)) * grid_step
        best = max(best, float(np.max(unit_window_energy(f, t))))
    return math.sqrt(max(best, 0.0))


def group_phases(phases):
    """Cluster phases modulo 2pi the same way :class:`APSequence` merges them.

    Returns ``(representatives, labels)`` where ``labels[i]`` indexes the
    representative phase of ``phases[i]``; representatives are sorted.
    """
    p = _wrap_phase(phases).ravel()
    p = np.where(TWO_PI - p < TOL_FREQ, 0.0, p)
    if not len(p):
        return np.zeros(0), np.zeros(0, dtype=np.intp)
    order = np.argsort(p, kind="stable")
    sorted_labels = _group_sorted(p[order], TOL_FREQ)
    reps = p[order][np.concatenate(([True], sorted_labels[1:] != sorted_labels[:-1]))]
    if len(reps) > 1 and reps[-1] + TOL_FREQ > TWO_PI + reps[0]:
        sorted_labels = np.where(sorted_labels == len(reps) - 1, 0, sorted_labels)
        reps = reps[:-1]
    labels = np.empty(len(p), dtype=np.intp)
    labels[order] = sorted_labels
    return reps, labels
