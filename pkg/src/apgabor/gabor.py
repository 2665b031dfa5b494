"""
Analysis and synthesis maps between AP(R) and AP(Z) for Gabor systems.

For a trigonometric polynomial ``f = sum_j c_j e_{lam_j}`` the coefficient
sequence ``k -> <f, T_{alpha k} M_{beta l} psi>`` is again a finite AP sequence,

    sum_j c_j conj(psi^(lam_j - l beta)) e~_{lam_j alpha},

so everything below is exact up to the certified truncation of lattice sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .apcore import (
    TWO_PI,
    APSequence,
    TrigPolynomial,
    ap_inner,
    ap_norm,
    group_phases,
    residue_decompose,
    seq_inner,
)
from .errors import ArgumentError, PrecisionError, UnsupportedWindowError
from .windows import Window

#: coefficient budget for the per-l arrays built by :func:`analysis_family`
MAX_ELL = 10**6


@dataclass(frozen=True)
class GaborSystem:
    """The system ``(T_{alpha k} M_{beta l} psi)_{k,l}``."""

    window: Window
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0 or not self.beta > 0:
            raise ArgumentError(f"alpha and beta must be positive, got {self.alpha}, {self.beta}")

    @property
    def gamma(self) -> float:
        """Residue period ``2pi / alpha``."""
        return TWO_PI / self.alpha


def analysis_sequence(f: TrigPolynomial, sys: GaborSystem, ell: int) -> APSequence:
    """``(<f, T_{k alpha} M_{l beta} psi>)_k`` as an AP sequence.

    Terms whose phases ``lam_j alpha`` coincide modulo 2pi are merged, which is
    the grouping of the spectrum of ``f`` by residue class modulo ``2pi/alpha``.
    """
    if not len(f):
        return APSequence()
    psi_hat = sys.window.fourier(f.freqs - ell * sys.beta)
    return APSequence(f.freqs * sys.alpha, f.coeffs * np.conj(psi_hat))


@dataclass(frozen=True, eq=False)
class AnalysisFamily:
    """A finite piece of an element of l^2(AP(Z)), stored densely.

    ``coeffs[i, g]`` is the coefficient of entry ``ells[i]`` at ``phases[g]``.
    ``tail_bound`` bounds the dropped ``sum_{|l| > ell_truncation} ||a^l||^2``.
    """

    ells: np.ndarray
    phases: np.ndarray
    coeffs: np.ndarray
    ell_truncation: int = 0
    tail_bound: float = 0.0
    alpha: float | None = None
    beta: float | None = None
    window_spec: str | None = field(default=None)

    @classmethod
    def from_entries(cls, entries: dict, **meta) -> "AnalysisFamily":
        """Build from a mapping ``l -> APSequence``."""
        ells = np.array(sorted(int(k) for k in entries), dtype=int)
        seqs = [entries[int(l)] if int(l) in entries else entries[str(l)] for l in ells]
        all_phases = np.concatenate([s.phases for s in seqs]) if seqs else np.zeros(0)
        reps, labels = group_phases(all_phases)
        coeffs = np.zeros((len(ells), len(reps)), dtype=complex)
        pos = 0
        for i, s in enumerate(seqs):
            n = len(s)
            np.add.at(coeffs[i], labels[pos:pos + n], s.coeffs)
            pos += n
        return cls(ells, reps, coeffs, **meta)

    @property
    def entries(self) -> dict:
        """Nonzero entries as ``{l: APSequence}``."""
        out = {}
        for l, row in zip(self.ells.tolist(), self.coeffs):
            seq = APSequence(self.phases, row)
            if len(seq):
                out[l] = seq
        return out

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "window": self.window_spec,
            "ell_truncation": int(self.ell_truncation),
            "entries": {str(l): s.to_dict() for l, s in self.entries.items()},
            "tail_bound": float(self.tail_bound),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisFamily":
        entries = {int(k): APSequence.from_dict(v) for k, v in data["entries"].items()}
        return cls.from_entries(
            entries,
            ell_truncation=data.get("ell_truncation", 0),
            tail_bound=data.get("tail_bound", 0.0),
            alpha=data.get("alpha"),
            beta=data.get("beta"),
            window_spec=data.get("window"),
        )


def _family_tail(psi, class_energy, class_of, freqs, beta, L):
    decay = np.array([psi.freq_decay(lam, beta, L) for lam in freqs])
    per_class = np.zeros(len(class_energy))
    np.add.at(per_class, class_of, decay)
    return float(class_energy @ per_class)


def ell_truncation_for(f: TrigPolynomial, sys: GaborSystem, tol: float, max_ell: int = MAX_ELL):
    """Smallest ``L`` whose certified tail is ``<= tol * ||f||^2``.

    Returns ``(L, tail)``.  Uses, per residue class ``g``, Cauchy-Schwarz:
    ``sum_{|l|>L} ||a^l||^2 <= sum_g (sum_{j in g} |c_j|^2) sum_{j in g} freq_decay(lam_j, beta, L)``.
    """
    if not tol > 0:
        raise ArgumentError(f"tol must be positive, got {tol}")
    if not len(f):
        return 0, 0.0
    psi = sys.window
    if psi.sq_envelope is None:
        raise UnsupportedWindowError(f"{psi.name}: no Fourier decay bound to truncate l-sums")
    _, class_of = group_phases(f.freqs * sys.alpha)
    class_energy = np.zeros(class_of.max() + 1)
    np.add.at(class_energy, class_of, np.abs(f.coeffs) ** 2)
    budget = tol * ap_norm(f) ** 2

    def tail(L):
        return _family_tail(psi, class_energy, class_of, f.freqs, sys.beta, L)

    hi = 1
    while tail(hi) > budget:
        if hi >= max_ell:
            raise PrecisionError(
                f"l-truncation would exceed {max_ell} for tol={tol}; loosen the tolerance"
            )
        hi = min(2 * hi, max_ell)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= budget:
            hi = mid
        else:
            lo = mid
    return hi, tail(hi)


def _analysis_matrix(f, sys, ells):
    """Rows ``a^l`` for ``l in ells`` over the residue phases of ``f``."""
    reps, labels = group_phases(f.freqs * sys.alpha)
    psi_hat = sys.window.fourier(f.freqs[None, :] - ells[:, None] * sys.beta)
    terms = np.conj(psi_hat) * f.coeffs[None, :]
    indicator = np.zeros((len(f), len(reps)))
    indicator[np.arange(len(f)), labels] = 1.0
    return reps, terms @ indicator


def analysis_family(f: TrigPolynomial, sys: GaborSystem, tol: float = 1e-8,
                    max_ell: int = MAX_ELL) -> AnalysisFamily:
    """All analysis sequences ``a^l`` with ``|l| <= L``, ``L`` certified by ``tol``."""
    meta = dict(alpha=sys.alpha, beta=sys.beta, window_spec=sys.window.spec)
    L, tail = ell_truncation_for(f, sys, tol, max_ell)
    if not len(f):
        return AnalysisFamily(np.zeros(0, dtype=int), np.zeros(0), np.zeros((0, 0), complex),
                              0, 0.0, **meta)
    ells = np.arange(-L, L + 1)
    reps, coeffs = _analysis_matrix(f, sys, ells)
    return AnalysisFamily(ells, reps, coeffs, L, tail, **meta)


def bessel_total(fam: AnalysisFamily) -> float:
    """``sum_l ||a^l||^2`` over the stored entries (see ``fam.tail_bound`` for the rest)."""
    return float(np.sum(np.abs(fam.coeffs) ** 2))


def h_lambda(sys: GaborSystem, lam: float, ell: int = 0, P: int = 50,
             require_continuous: bool = False):
    """Truncated ``h_{lam,l} = sum_{|p|<=P} psi^(lam + gamma p - l beta) e_{lam + gamma p}``.

    ``gamma = 2pi/alpha`` and ``lam`` must lie in ``[0, gamma)``.  Returns
    ``(h, tail)`` with ``tail`` bounding ``||h_{lam,l} - h||_AP^2``.  With
    ``require_continuous`` the window must be in W0 or have ``psi^`` in W0, the
    condition under which the untruncated ``h_{lam,l}`` is a continuous AP function.
    """
    gamma = sys.gamma
    if not 0.0 <= lam < gamma:
        raise ArgumentError(f"lambda={lam} outside the fundamental domain [0, {gamma})")
    if int(P) != P or P < 1:
        raise ArgumentError(f"P must be an integer >= 1, got {P}")
    psi = sys.window
    if require_continuous and not (psi.in_W0 or psi.in_FW0):
        raise UnsupportedWindowError(f"{psi.name}: neither psi nor psi^ is flagged in W0")
    mu = lam + gamma * np.arange(-int(P), int(P) + 1)
    h = TrigPolynomial(mu, psi.fourier(mu - ell * sys.beta))
    tail = psi.freq_decay(lam - ell * sys.beta, gamma, int(P))
    return h, tail


def _covering_P(f: TrigPolynomial, gamma: float) -> int:
    if not len(f):
        return 1
    return max(1, int(math.ceil(np.max(np.abs(f.freqs)) / gamma)) + 1)


def analysis_norm_via_h(f: TrigPolynomial, sys: GaborSystem, ell: int = 0, P: int | None = None,
                        rel_tol: float = 1e-12) -> float:
    """``sum_lam |(f, h_{lam,l})|^2`` over the residues of the spectrum of ``f``.

    The inner products only see frequencies of ``f``; when every frequency of
    ``f`` lies inside the truncated lattice the value is exact.  Otherwise the
    Cauchy-Schwarz error bound must stay below ``rel_tol * ||f||^2``.
    """
    if not len(f):
        return 0.0
    gamma = sys.gamma
    if P is None:
        P = _covering_P(f, gamma)
    decomposed = [residue_decompose(lam, sys.alpha) for lam in f.freqs]
    residues, labels = group_phases(np.array([d.residue for d in decomposed]) * sys.alpha)
    total = 0.0
    err = 0.0
    norm2 = ap_norm(f) ** 2
    for g, phase in enumerate(residues):
        members = [d for d, lab in zip(decomposed, labels) if lab == g]
        # representative residue of the class, in [0, gamma)
        lam = members[0].residue
        h, tail = h_lambda(sys, lam, ell, P)
        x2 = abs(ap_inner(f, h)) ** 2
        total += x2
        outside = [i for i, (d, lab) in enumerate(zip(decomposed, labels))
                   if lab == g and abs(d.index) > P]
        if outside:
            out_energy = float(np.sum(np.abs(f.coeffs[outside]) ** 2))
            err += 2 * math.sqrt(x2 * out_energy * tail) + out_energy * tail
    if err > rel_tol * norm2:
        raise PrecisionError(f"truncation error bound {err:.3g} exceeds {rel_tol:g} * ||f||^2")
    return total


def synthesis(a: APSequence, psi: Window, alpha: float, P: int = 50) -> TrigPolynomial:
    """Truncated ``sum_k a_k T_{k alpha} psi``.

    Frequency ``mu = (theta + 2pi p)/alpha`` carries ``alpha^-1 psi^(mu) (a, e~_{mu alpha})``
    for ``|p| <= P``; :func:`synthesis_tail` bounds what is dropped.
    """
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    if not len(a):
        return TrigPolynomial()
    p = np.arange(-int(P), int(P) + 1)
    mu = (a.phases[:, None] + TWO_PI * p[None, :]) / alpha
    coeffs = psi.fourier(mu) * a.coeffs[:, None] / alpha
    return TrigPolynomial(mu.ravel(), coeffs.ravel())


def synthesis_tail(a: APSequence, psi: Window, alpha: float, P: int = 50) -> float:
    """Bound on the squared AP norm of the part of the synthesis dropped by :func:`synthesis`."""
    gamma = TWO_PI / alpha
    return float(sum(abs(c) ** 2 * psi.freq_decay(th / alpha, gamma, int(P)) for th, c in a)
                 / alpha**2)


def gabor_synthesis(fam: AnalysisFamily, sys: GaborSystem, P: int = 50) -> TrigPolynomial:
    """``T a`` with Fourier coefficients ``sum_l psi^(lam - l beta) (a^l, e~_{lam alpha})``.

    Candidate frequencies are ``(theta + 2pi p)/alpha``, ``|p| <= P``, for every
    phase ``theta`` present in the family.  No ``alpha^-1`` factor is applied,
    unlike :func:`synthesis`.
    """
    if not len(fam.ells) or not len(fam.phases):
        return TrigPolynomial()
    p = np.arange(-int(P), int(P) + 1)
    lam = ((fam.phases[:, None] + TWO_PI * p[None, :]) / sys.alpha).ravel()
    group = np.repeat(np.arange(len(fam.phases)), len(p))
    psi_hat = sys.window.fourier(lam[None, :] - fam.ells[:, None] * sys.beta)
    coeffs = np.sum(psi_hat * fam.coeffs[:, group], axis=0)
    return TrigPolynomial(lam, coeffs)


def adjoint_residual(f: TrigPolynomial, b: APSequence, psi: Window, alpha: float,
                     P: int | None = None) -> float:
    """``|(S f, b) - alpha (f, T b)|`` with ``S`` the l=0 analysis map and ``T`` the synthesis."""
    sys = GaborSystem(psi, alpha, 1.0)
    if P is None:
        P = _covering_P(f, sys.gamma)
    lhs = seq_inner(analysis_sequence(f, sys, 0), b)
    rhs = alpha * ap_inner(f, synthesis(b, psi, alpha, P))
    return abs(lhs - rhs)


def adjoint_slack(f: TrigPolynomial, b: APSequence, psi: Window, alpha: float,
                  P: int | None = None) -> float:
    """Cauchy-Schwarz bound ``alpha ||f|| sqrt(synthesis_tail)`` on the truncation part of the residual.

    Zero when every frequency of ``f`` lies inside the truncated lattice.
    """
    gamma = TWO_PI / alpha
    if P is None:
        P = _covering_P(f, gamma)
    inside = all(abs(residue_decompose(lam, alpha).index) <= P for lam in f.freqs)
    if inside:
        return 0.0
    return alpha * ap_norm(f) * math.sqrt(synthesis_tail(b, psi, alpha, P))


def periodization_oracle(a: APSequence, psi: Window, alpha: float, mu: float, T: float,
                         dt: float = 1e-3, K: int | None = None) -> complex:
    """Time-domain estimate of the ``mu``-Fourier coefficient of ``sum_k a_k T_{k alpha} psi``.

    Builds ``g(t) = sum_{|k|<=K} a_k psi(t - k alpha)`` on a grid of ``[-T, T]``
    and returns ``(2T)^-1 int g(t) e^{-i mu t} dt`` by the composite trapezoid
    rule.  ``K`` must reach past ``T`` by the window's numerical support
    radius, so the dropped translates are below double precision on the grid.
    """
    if not T > 0 or not dt > 0:
        raise ArgumentError("T and dt must be positive")
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    radius = psi.support_radius(1e-17)
    k_min = int(math.ceil((T + radius) / alpha)) + 1
    if K is None:
        K = k_min
    elif K < k_min:
        raise ArgumentError(f"K={K} does not cover [-T, T]; need K >= {k_min}")
    n = int(round(2 * T / dt))
    t = np.linspace(-T, T, n + 1)
    step = t[1] - t[0]
    g = np.zeros(n + 1, dtype=complex)
    if len(a):
        ks = np.arange(-K, K + 1)
        ak = a(ks)
        for k, c in zip(ks, ak):
            centre = k * alpha
            i0 = max(0, int(math.floor((centre - radius + T) / step)))
            i1 = min(n + 1, int(math.ceil((centre + radius + T) / step)) + 1)
            if i0 < i1:
                g[i0:i1] += c * psi.eval(t[i0:i1] - centre)
    return complex(trapezoid(g * np.exp(-1j * mu * t), t) / (2 * T))
