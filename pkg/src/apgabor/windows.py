"""
Window functions with closed-form Fourier transforms.

The Fourier convention is ``psi^(w) = int psi(t) e^{-i w t} dt``.  Every
built-in window carries monotone envelopes for ``|psi^|`` and ``|psi^|^2``; the
truncation bounds (``freq_decay``, ``abs_freq_decay``) used to certify the
lattice sums elsewhere in the package are derived from those envelopes by the
usual "largest term plus integral" comparison for monotone sequences.

Window specifier strings::

    gaussian:sigma=1.0
    triangle
    rect:a=0,b=1
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import ArgumentError, UnsupportedWindowError

_EDGE = 1e-12


class Envelope(NamedTuple):
    """Nonincreasing bound ``value(r) >= g(w)`` for ``|w| >= r`` and its tail integral."""

    value: Callable[[float], float]
    tail: Callable[[float], float]


def ray_sum_bound(env: Envelope, start: float, step: float) -> float:
    """Upper bound on ``sum_{j>=0} env(|start + j*step|)``."""
    if start >= 0.0:
        return env.value(start) + env.tail(start) / step
    # the negative and nonnegative parts are each monotone in |w|
    return 2.0 * (env.value(0.0) + env.tail(0.0) / step)


@dataclass(frozen=True)
class Window:
    """A window ``psi`` given by closed forms for ``psi`` and ``psi^``.

    ``time_decay(K)`` bounds ``sum_{|k|>K} sup_{x in [0,1]} |psi(x-k)|``.
    ``shift`` records a modulation ``M_shift``; it changes the Fourier side
    only by translation, so every envelope is simply re-centred.
    """

    name: str
    spec: str
    base_eval: Callable = field(repr=False)
    base_fourier: Callable = field(repr=False)
    sq_envelope: Optional[Envelope] = field(default=None, repr=False)
    abs_envelope: Optional[Envelope] = field(default=None, repr=False)
    time_decay_fn: Optional[Callable[[int], float]] = field(default=None, repr=False)
    support_radius_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    # closed-form log |psi^|^2, for spectra that underflow in double precision
    base_log_sq_fourier: Optional[Callable] = field(default=None, repr=False)
    breakpoints: tuple = ()
    in_W: bool = False
    in_W0: bool = False
    in_L1: bool = False
    in_FW0: bool = False
    shift: float = 0.0

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        out = self.base_eval(t)
        if self.shift:
            out = out * np.exp(1j * self.shift * t)
        return out

    def fourier(self, w):
        return self.base_fourier(np.asarray(w, dtype=float) - self.shift)

    def log_sq_fourier(self, w):
        """``log |psi^(w)|^2``; finite where a closed form exists even if ``psi^`` underflows."""
        w = np.asarray(w, dtype=float) - self.shift
        if self.base_log_sq_fourier is not None:
            return self.base_log_sq_fourier(w)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.base_fourier(w)) ** 2)

    def modulated(self, omega: float) -> "Window":
        """The window ``M_omega psi``."""
        return replace(self, shift=self.shift + omega, spec=f"{self.spec}@mod={self.shift + omega!r}")

    def time_decay(self, K: int) -> float:
        if self.time_decay_fn is None:
            raise UnsupportedWindowError(f"{self.name}: no time-decay bound")
        return self.time_decay_fn(int(K))

    def support_radius(self, eps: float) -> float:
        """Radius outside which ``|psi| <= eps``."""
        if self.support_radius_fn is None:
            raise UnsupportedWindowError(f"{self.name}: no support radius")
        return self.support_radius_fn(eps)

    def freq_decay(self, lam: float, gamma: float, P: int) -> float:
        """Bound on ``sum_{|p|>P} |psi^(lam + gamma p)|^2``."""
        if self.sq_envelope is None:
            raise UnsupportedWindowError(f"{self.name}: no Fourier decay bound")
        return _two_sided(self.sq_envelope, lam - self.shift, gamma, P)

    def abs_freq_decay(self, lam: float, gamma: float, P: int) -> float:
        """Bound on ``sum_{|p|>P} |psi^(lam + gamma p)|``."""
        if self.abs_envelope is None:
            raise UnsupportedWindowError(
                f"{self.name}: |psi^| is not summable along lattices; no absolute decay bound"
            )
        return _two_sided(self.abs_envelope, lam - self.shift, gamma, P)

    def in_class(self, cls: str) -> bool:
        """Membership flag by name: ``"W"``, ``"W0"``, ``"L1"``, ``"FW0"``, ``"L1FW0"``."""
        flags = {
            "W": self.in_W,
            "W0": self.in_W0,
            "L1": self.in_L1,
            "FW0": self.in_FW0,
            "L1FW0": self.in_L1 and self.in_FW0,
        }
        try:
            return flags[cls]
        except KeyError:
            raise ArgumentError(f"unknown window class {cls!r}") from None


def _two_sided(env, lam, gamma, P):
    if not gamma > 0:
        raise ArgumentError(f"lattice step must be positive, got {gamma}")
    edge = gamma * (P + 1)
    return ray_sum_bound(env, edge + lam, gamma) + ray_sum_bound(env, edge - lam, gamma)


def _compact_time_decay(lo, hi, peak):
    """Tail of the Wiener sum for a window supported in ``[lo, hi]``."""

    def decay(K):
        # sup over x in [0,1] of |psi(x-k)| can be nonzero only if (-k, 1-k) meets (lo, hi)
        ks = np.arange(math.floor(-hi), math.ceil(1 - lo) + 1)
        ks = ks[(-ks < hi) & (1 - ks > lo) & (np.abs(ks) > K)]
        return float(peak * len(ks))

    return decay


# --- built-in windows --------------------------------------------------------


def gaussian(sigma: float = 1.0) -> Window:
    """``psi(t) = exp(-t^2 / (2 sigma^2))``."""
    if not sigma > 0:
        raise ArgumentError(f"sigma must be positive, got {sigma}")
    s = float(sigma)
    amp = s * math.sqrt(2.0 * math.pi)

    def time_decay(K):
        if K < 1:
            raise ArgumentError("K must be >= 1")
        one_side = math.exp(-(K**2) / (2 * s * s)) + s * math.sqrt(math.pi / 2) * math.erfc(
            K / (s * math.sqrt(2))
        )
        return 2.0 * one_side

    return Window(
        name="gaussian",
        spec=f"gaussian:sigma={s!r}",
        base_eval=lambda t: np.exp(-(t**2) / (2 * s * s)),
        base_fourier=lambda w: amp * np.exp(-(s * s) * w**2 / 2),
        base_log_sq_fourier=lambda w: 2 * math.log(amp) - (s * s) * w**2,
        sq_envelope=Envelope(
            lambda r: amp**2 * math.exp(-(s * s) * r * r),
            lambda r: math.pi**1.5 * s * math.erfc(s * r),
        ),
        abs_envelope=Envelope(
            lambda r: amp * math.exp(-(s * s) * r * r / 2),
            lambda r: math.pi * math.erfc(s * r / math.sqrt(2)),
        ),
        time_decay_fn=time_decay,
        support_radius_fn=lambda eps: s * math.sqrt(2 * math.log(1 / min(eps, 0.5))),
        in_W=True,
        in_W0=True,
        in_L1=True,
        in_FW0=True,
    )


def _tri_sq_tail(r):
    return 16.0 / (3 * r**3) if r >= 2 else (2 - r) + 2.0 / 3


def _tri_abs_tail(r):
    return 4.0 / r if r >= 2 else (2 - r) + 2.0


def triangle() -> Window:
    """Hat function ``max(0, 1 - |t|)``; ``psi^(w) = (sin(w/2) / (w/2))^2``.

    ``psi^`` does lie in W0, but the flag is left off; nothing here proves it.
    """
    return Window(
        name="triangle",
        spec="triangle",
        base_eval=lambda t: np.maximum(0.0, 1.0 - np.abs(t)),
        base_fourier=lambda w: np.sinc(w / (2 * math.pi)) ** 2,
        sq_envelope=Envelope(lambda r: min(1.0, 16.0 / r**4) if r else 1.0, _tri_sq_tail),
        abs_envelope=Envelope(lambda r: min(1.0, 4.0 / r**2) if r else 1.0, _tri_abs_tail),
        time_decay_fn=_compact_time_decay(-1.0, 1.0, 1.0),
        support_radius_fn=lambda eps: 1.0,
        breakpoints=(-1.0, 0.0, 1.0),
        in_W=True,
        in_W0=True,
        in_L1=True,
        in_FW0=False,
    )


def rectangle(a: float = 0.0, b: float = 1.0) -> Window:
    """Indicator of ``[a, b)``; ``psi^(w) = (e^{-iwa} - e^{-iwb}) / (iw)``."""
    if not b > a:
        raise ArgumentError(f"rectangle needs a < b, got a={a}, b={b}")
    a, b = float(a), float(b)
    width, centre = b - a, (a + b) / 2
    knee = 2.0 / width

    def sq_tail(r):
        return 4.0 / r if r >= knee else width**2 * (knee - r) + 2.0 * width

    return Window(
        name="rect",
        spec=f"rect:a={a!r},b={b!r}",
        base_eval=lambda t: ((t >= a) & (t < b)).astype(float),
        # e^{-iwc} * width * sinc: same value, no cancellation near w = 0
        base_fourier=lambda w: np.exp(-1j * w * centre) * width * np.sinc(w * width / (2 * math.pi)),
        sq_envelope=Envelope(lambda r: min(width**2, 4.0 / r**2) if r else width**2, sq_tail),
        abs_envelope=None,
        time_decay_fn=_compact_time_decay(a, b, 1.0),
        support_radius_fn=lambda eps: max(abs(a), abs(b)),
        breakpoints=(a, b),
        in_W=True,
        in_W0=False,
        in_L1=True,
        in_FW0=False,
    )


def custom(name, evaluate, fourier, *, sq_envelope=None, abs_envelope=None, time_decay=None,
           support_radius=None, breakpoints=(), **flags) -> Window:
    """Register a user window from closed forms; no numerical transforms are done."""
    return Window(
        name=name,
        spec=name,
        base_eval=evaluate,
        base_fourier=fourier,
        sq_envelope=sq_envelope,
        abs_envelope=abs_envelope,
        time_decay_fn=time_decay,
        support_radius_fn=support_radius,
        breakpoints=tuple(breakpoints),
        **flags,
    )


_BUILDERS = {
    "gaussian": (gaussian, {"sigma"}),
    "triangle": (triangle, set()),
    "rect": (rectangle, {"a", "b"}),
    "rectangle": (rectangle, {"a", "b"}),
}


def parse_window(spec: str) -> Window:
    """Build a window from a specifier such as ``"rect:a=0,b=1"``."""
    name, _, args = spec.strip().partition(":")
    if name not in _BUILDERS:
        raise ArgumentError(f"unknown window {name!r}")
    builder, allowed = _BUILDERS[name]
    kwargs = {}
    for item in filter(None, (s.strip() for s in args.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key not in allowed:
            raise ArgumentError(f"bad window parameter {item!r} for {name}")
        try:
            kwargs[key] = float(value)
        except ValueError:
            raise ArgumentError(f"window parameter {key} is not a number: {value!r}") from None
    return builder(**kwargs)


# --- Wiener norm and periodised spectral sums --------------------------------


def interval_sups(psi: Window, K: int, samples_per_interval: int) -> np.ndarray:
    """Grid maxima of ``|psi(x - k)|`` over ``x in [0, 1]`` for ``k = -K..K``.

    Samples are pulled ``1e-12`` inside each interval so jump discontinuities at
    the ends do not count (the norm uses the essential sup).
    """
    x = np.clip(np.linspace(0.0, 1.0, samples_per_interval), _EDGE, 1.0 - _EDGE)
    ks = np.arange(-K, K + 1)
    return np.max(np.abs(psi.eval(x[None, :] - ks[:, None])), axis=1)


def wiener_norm(psi: Window, K: int = 10, samples_per_interval: int = 1000) -> float:
    """``sum_k sup_{x in [0,1]} |psi(x-k)|``: grid maxima for ``|k| <= K`` plus the tail bound."""
    if int(K) != K or K < 1:
        raise ArgumentError(f"K must be an integer >= 1, got {K}")
    if int(samples_per_interval) != samples_per_interval or samples_per_interval < 2:
        raise ArgumentError("samples_per_interval must be an integer >= 2")
    sups = interval_sups(psi, int(K), int(samples_per_interval))
    return float(np.sum(sups)) + psi.time_decay(int(K))


def periodized_spectral_sum(psi: Window, lam: float, gamma: float, P: int) -> float:
    """``sum_{|p|<=P} |psi^(lam + gamma p)|^2`` plus the certified tail for ``|p| > P``."""
    if not gamma > 0:
        raise ArgumentError(f"gamma must be positive, got {gamma}")
    if int(P) != P or P < 1:
        raise ArgumentError(f"P must be an integer >= 1, got {P}")
    p = np.arange(-int(P), int(P) + 1)
    head = np.sum(np.abs(psi.fourier(lam + gamma * p)) ** 2)
    return float(head) + psi.freq_decay(lam, gamma, int(P))


def periodized_profile(psi: Window, alpha: float, grid_points: int, P: int):
    """Periodised sums on the grid ``lam_i = i * (2pi/alpha) / grid_points``.

    Returns ``(lambdas, sums)``; each sum already includes its tail bound.
    """
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    if int(grid_points) != grid_points or grid_points < 2:
        raise ArgumentError("grid_points must be an integer >= 2")
    gamma = 2 * math.pi / alpha
    lams = np.arange(int(grid_points)) * (gamma / grid_points)
    sums = np.array([periodized_spectral_sum(psi, lam, gamma, P) for lam in lams])
    return lams, sums


def bessel_condition_sup(psi: Window, alpha: float, grid_points: int = 256, P: int = 1000) -> float:
    """Grid estimate of ``sup_lam sum_p |psi^(lam + 2pi p / alpha)|^2``.

    The sum is ``2pi/alpha``-periodic in ``lam``, so one period is swept.  Each
    grid value is an upper bound for its own ``lam``; the max over the grid is
    a lower estimate of the true sup.
    """
    _, sums = periodized_profile(psi, alpha, grid_points, P)
    return float(np.max(sums))
