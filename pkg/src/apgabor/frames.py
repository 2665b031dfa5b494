"""
Fiber matrices, eigenvalue frame bounds and subspace frames.

At residue ``lam`` the matrix

    m_{k,p}(lam) = sum_l psi^(lam + gamma k - l beta) conj(psi^(lam + gamma p - l beta)),
    gamma = 2pi / alpha,

is the Gram matrix whose quadratic form gives the total Gabor coefficient
energy of the part of ``f`` living on ``lam + gamma Z``.  Uniform bounds on its
spectrum are the AP-frame bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .apcore import TOL_FREQ, TrigPolynomial, ap_norm, group_phases, residue_decompose
from .errors import ArgumentError, CaseViolation, InvariantViolation, UnsupportedWindowError
from .gabor import GaborSystem, analysis_family, bessel_total

JACOBI_TOL = 1e-12
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiberMatrix:
    lam: float
    trunc_K: int
    ell_trunc: int
    entries: np.ndarray
    tail: float

    @property
    def size(self) -> int:
        return 2 * self.trunc_K + 1

    @property
    def eig_slack(self) -> float:
        """Spectral-norm bound ``n * tail`` on the dropped l-range."""
        return self.tail * self.size

    def check_hermitian(self, tol: float = HERMITIAN_TOL):
        _check_hermitian(self.entries, tol)


def _check_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvariantViolation(f"matrix must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > tol * scale:
        raise InvariantViolation(f"matrix is not Hermitian (asymmetry {asym:.3g})")


def fiber_matrix(sys: GaborSystem, lam: float, K: int = 10, L: int = 100) -> FiberMatrix:
    """Truncated ``(m_{k,p}(lam))_{|k|,|p| <= K}`` with the l-sum cut at ``|l| <= L``."""
    gamma = sys.gamma
    if not 0.0 <= lam < gamma:
        raise ArgumentError(f"lambda={lam} outside [0, {gamma})")
    if int(K) != K or K < 0 or int(L) != L or L < 0:
        raise ArgumentError(f"K and L must be nonnegative integers, got K={K}, L={L}")
    K, L = int(K), int(L)
    x = lam + gamma * np.arange(-K, K + 1)
    ells = np.arange(-L, L + 1)
    psi_hat = sys.window.fourier(x[:, None] - ells[None, :] * sys.beta)
    gram = psi_hat @ psi_hat.conj().T
    # upper triangle mirrored: Hermitian by construction, real diagonal
    upper = np.triu(gram, 1)
    entries = upper + upper.conj().T + np.diag(np.real(np.diag(gram)))
    tail = max(sys.window.freq_decay(xk, sys.beta, L) for xk in x)
    return FiberMatrix(float(lam), K, L, entries, float(tail))


def _round_robin(n):
    """Pairings of ``range(n)`` (n even) covering every pair once over n-1 rounds."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        rounds.append([(min(players[i], players[n - 1 - i]), max(players[i], players[n - 1 - i]))
                       for i in range(n // 2)])
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigenvalues(m, tol: float = JACOBI_TOL, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.

    Rotations are applied in round-robin order, ``n/2`` disjoint pairs at a
    time, until the off-diagonal Frobenius norm is below ``tol * ||m||_F``.
    """
    a = np.array(m, dtype=complex)
    _check_hermitian(a)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    if n % 2:
        a = np.pad(a, ((0, 1), (0, 1)))
    size = a.shape[0]
    target = tol * np.linalg.norm(a)
    # entries this small cannot stop convergence; rotating them only risks overflow
    negligible = 1e-3 * target / size
    rounds = _round_robin(size)
    idx = np.arange(size)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for pairs in rounds:
            p = np.array([i for i, _ in pairs])
            q = np.array([j for _, j in pairs])
            g = a[p, q]
            mag = np.abs(g)
            live = mag > negligible
            if not np.any(live):
                continue
            phase = np.where(live, g / np.where(live, mag, 1.0), 1.0)
            app, aqq = np.real(a[p, p]), np.real(a[q, q])
            theta = np.where(live, (aqq - app) / (2.0 * np.where(live, mag, 1.0)), 0.0)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(t**2 + 1.0)
            s = t * c
            rot = np.zeros((size, size), dtype=complex)
            rot[idx, idx] = 1.0
            rot[p, p] = c
            rot[p, q] = s
            rot[q, p] = -s * np.conj(phase)
            rot[q, q] = c * np.conj(phase)
            a = rot.conj().T @ a @ rot
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[idx, idx] = np.real(a[idx, idx])
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    # the padding row never rotates (its off-diagonal entries stay zero)
    return np.sort(np.real(np.diag(a))[:n])


def hermitian_extremal_eigs(mtx) -> tuple[float, float]:
    """``(lambda_min, lambda_max)`` of a fiber matrix (or plain Hermitian array)."""
    entries = mtx.entries if isinstance(mtx, FiberMatrix) else mtx
    eigs = jacobi_eigenvalues(entries)
    return float(eigs[0]), float(eigs[-1])


def gershgorin_interval(m) -> tuple[float, float]:
    """Real interval containing every Gershgorin disc of a Hermitian matrix."""
    m = np.asarray(m)
    radii = np.sum(np.abs(m), axis=1) - np.abs(np.diag(m))
    centres = np.real(np.diag(m))
    return float(np.min(centres - radii)), float(np.max(centres + radii))


@dataclass(frozen=True, eq=False)
class FrameBounds:
    """Grid-swept eigenvalue bounds.

    ``A`` is the grid minimum of ``lambda_min`` (an upper estimate of the true
    infimum) and ``B`` the grid maximum of ``lambda_max`` (a lower estimate of
    the true supremum).  ``certified_slack`` covers the l-truncation;
    ``grid_slack`` is the largest change of either extremal eigenvalue between
    neighbouring grid points, an estimate of what the grid can miss.
    """

    A: float
    B: float
    lambda_grid: int
    trunc_K: int
    ell_trunc: int
    certified_slack: float
    grid_slack: float = 0.0
    lambdas: np.ndarray = field(default=None, repr=False)
    eig_min: np.ndarray = field(default=None, repr=False)
    eig_max: np.ndarray = field(default=None, repr=False)

    @property
    def slack(self) -> float:
        return self.certified_slack + self.grid_slack

    @property
    def is_frame(self) -> bool | None:
        """True when ``A - slack > 0``; None when the lower bound is inconclusive."""
        return True if self.A - self.slack > 0 else None

    def to_dict(self) -> dict:
        out = {
            "A": self.A,
            "B": self.B,
            "lambda_grid": self.lambda_grid,
            "trunc_K": self.trunc_K,
            "ell_trunc": self.ell_trunc,
            "certified_slack": self.certified_slack,
            "grid_slack": self.grid_slack,
            "slack": self.slack,
            "A_estimate_side": "upper estimate of inf",
            "B_estimate_side": "lower estimate of sup",
        }
        if self.is_frame:
            out["is_frame"] = True
        return out

    def table(self):
        """Rows ``(lambda, eig_min, eig_max)`` of the sweep."""
        return list(zip(self.lambdas.tolist(), self.eig_min.tolist(), self.eig_max.tolist()))


def default_ell_truncation(sys: GaborSystem, K: int, target: float = 1e-8,
                           max_ell: int = 10**4) -> int:
    """Smallest ``L`` (capped at ``max_ell``) with l-tail below ``target`` at the outermost fiber rows."""
    edge = sys.gamma * (K + 1)

    def tail(L):
        return max(sys.window.freq_decay(x, sys.beta, L) for x in (edge, -edge, 0.0))

    L = 1
    while tail(L) > target and L < max_ell:
        L = min(2 * L, max_ell)
    lo = L // 2
    while L - lo > 1:
        mid = (lo + L) // 2
        if tail(mid) <= target:
            L = mid
        else:
            lo = mid
    return L


def frame_bounds(sys: GaborSystem, grid_points: int = 256, K: int = 10,
                 L: int | None = None) -> FrameBounds:
    """Sweep the fiber matrices over ``grid_points`` residues in ``[0, 2pi/alpha)``."""
    if int(grid_points) != grid_points or grid_points < 1:
        raise ArgumentError("grid_points must be a positive integer")
    if L is None:
        L = default_ell_truncation(sys, K)
    lams = np.arange(int(grid_points)) * (sys.gamma / grid_points)
    lo = np.empty(len(lams))
    hi = np.empty(len(lams))
    slack = 0.0
    for i, lam in enumerate(lams):
        fib = fiber_matrix(sys, float(lam), K, L)
        lo[i], hi[i] = hermitian_extremal_eigs(fib)
        slack = max(slack, fib.eig_slack)
    if len(lams) > 1:
        grid_slack = float(max(np.max(np.abs(np.diff(lo))), np.max(np.abs(np.diff(hi)))))
    else:
        grid_slack = 0.0
    return FrameBounds(
        A=float(np.min(lo)),
        B=float(np.max(hi)),
        lambda_grid=int(grid_points),
        trunc_K=int(K),
        ell_trunc=int(L),
        certified_slack=float(slack),
        grid_slack=grid_slack,
        lambdas=lams,
        eig_min=lo,
        eig_max=hi,
    )


@dataclass
class SandwichReport:
    S: float
    norm2: float
    lower: float
    upper: float
    tail_bound: float
    ell_truncation: int
    fibers_covered: bool
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def ratio(self) -> float:
        return self.S / self.norm2 if self.norm2 else 0.0

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "norm2": self.norm2,
            "ratio": self.ratio,
            "lower": self.lower,
            "upper": self.upper,
            "tail_bound": self.tail_bound,
            "ell_truncation": self.ell_truncation,
            "fibers_covered": self.fibers_covered,
            "passed": self.passed,
            "violations": self.violations,
        }


def frame_sandwich_check(f: TrigPolynomial, sys: GaborSystem, bounds: FrameBounds,
                         tol: float = 1e-8) -> SandwichReport:
    """Check ``(A - slack - tol)||f||^2 <= S(f) <= (B + slack + tol)||f||^2``.

    ``S(f)`` is the total Gabor coefficient energy with the l-sum certified to
    ``tol * ||f||^2``.  Failures are returned as entries of ``violations``.
    """
    norm2 = ap_norm(f) ** 2
    fam = analysis_family(f, sys, tol)
    S = bessel_total(fam)
    lower = (bounds.A - bounds.slack - tol) * norm2
    upper = (bounds.B + bounds.slack + tol) * norm2
    violations = []
    if S < lower:
        violations.append({"inequality": "(A - slack - tol) * ||f||^2 <= S(f)",
                           "lower": lower, "S": S, "upper": upper})
    if S > upper:
        violations.append({"inequality": "S(f) <= (B + slack + tol) * ||f||^2",
                           "lower": lower, "S": S, "upper": upper})
    covered = all(abs(residue_decompose(lam, sys.alpha).index) <= bounds.trunc_K for lam in f.freqs)
    return SandwichReport(S, norm2, lower, upper, fam.tail_bound, fam.ell_truncation, covered,
                          violations)


def schur_bessel_bound(sys: GaborSystem, residues, P: int = 50, L: int = 50) -> float:
    """Schur-test bound ``sqrt(r c)`` on the norms of ``b_{l,p} = psi^(lam_j + gamma p - l beta)``.

    ``r`` is the largest row sum over ``|l| <= L`` and ``c`` the largest column
    sum over ``|p| <= P``, each including the window's certified tail of
    ``|psi^|``; both are maximised over the given residues.  ``r * c`` bounds
    the largest eigenvalue of every truncated fiber matrix at these residues.
    """
    psi = sys.window
    if psi.abs_envelope is None:
        raise UnsupportedWindowError(
            f"{psi.name}: |psi^| is not summable along lattices; the Schur test does not apply"
        )
    gamma = sys.gamma
    ps = np.arange(-int(P), int(P) + 1)
    ells = np.arange(-int(L), int(L) + 1)
    r = c = 0.0
    for lam in residues:
        lam = float(lam)
        if not 0.0 <= lam < gamma:
            raise ArgumentError(f"residue {lam} outside [0, {gamma})")
        b = np.abs(psi.fourier(lam + gamma * ps[None, :] - ells[:, None] * sys.beta))
        rows = b.sum(axis=1) + np.array([psi.abs_freq_decay(lam - l * sys.beta, gamma, int(P))
                                         for l in ells])
        cols = b.sum(axis=0) + np.array([psi.abs_freq_decay(lam + gamma * p, sys.beta, int(L))
                                         for p in ps])
        r = max(r, float(rows.max()))
        c = max(c, float(cols.max()))
    return math.sqrt(r * c)


@dataclass(frozen=True, eq=False)
class SpectrumSet:
    """A finite set ``M = {mu_j}`` of frequencies (kept in the given order)."""

    mu: np.ndarray

    def __init__(self, mu):
        mu = np.asarray(mu, dtype=float).ravel()
        s = np.sort(mu)
        if len(s) > 1 and np.min(np.diff(s)) < TOL_FREQ:
            raise ArgumentError("spectrum points must be pairwise distinct")
        mu = mu.copy()
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    def __len__(self):
        return len(self.mu)

    def residue_collision(self, alpha: float):
        """First pair ``(mu_i, mu_j)`` with ``mu_i - mu_j`` in ``(2pi/alpha) Z``, else None."""
        _, labels = group_phases(self.mu * alpha)
        seen = {}
        for m, lab in zip(self.mu.tolist(), labels.tolist()):
            if lab in seen:
                return seen[lab], m
            seen[lab] = m
        return None

    def classify(self, alpha: float) -> str:
        """``"b"`` when no two points share a residue class, else ``"a"``-type overlap."""
        return "b" if self.residue_collision(alpha) is None else "a"


def subspace_diagonal_sums(M: SpectrumSet, sys: GaborSystem, L: int = 100) -> np.ndarray:
    """``s_j = sum_{|l|<=L} |psi^(mu_j - l beta)|^2`` plus the certified tail, per point."""
    pair = M.residue_collision(sys.alpha)
    if pair is not None:
        raise CaseViolation(
            f"mu={pair[0]!r} and mu={pair[1]!r} differ by a multiple of 2pi/alpha; "
            "the projected system is not diagonal (use the full residue lattice instead)",
            pair,
        )
    ells = np.arange(-int(L), int(L) + 1)
    vals = np.abs(sys.window.fourier(M.mu[:, None] - ells[None, :] * sys.beta)) ** 2
    tails = np.array([sys.window.freq_decay(m, sys.beta, int(L)) for m in M.mu])
    return vals.sum(axis=1) + tails


def subspace_frame_bounds(M: SpectrumSet, sys: GaborSystem, L: int = 100) -> tuple[float, float]:
    """Frame bounds of ``{psi^(mu_j - l beta) e_{mu_j}}`` in ``AP_2(M)``: ``(min s_j, max s_j)``."""
    s = subspace_diagonal_sums(M, sys, L)
    if not len(s):
        return 0.0, 0.0
    return float(np.min(s)), float(np.max(s))


def finite_modulation_failure(M: SpectrumSet, sys: GaborSystem, F, log: bool = False) -> np.ndarray:
    """``(sum_{l in F} |psi^(mu_j - l beta)|^2)_j`` for a finite modulation set ``F``.

    With ``log=True`` the natural logarithm of each sum is returned, computed
    without leaving log space so values far below the double-precision range
    stay ordered.
    """
    F = np.asarray(list(F), dtype=float)
    if not len(F):
        return np.full(len(M), -np.inf) if log else np.zeros(len(M))
    w = M.mu[:, None] - F[None, :] * sys.beta
    if log:
        return logsumexp(sys.window.log_sq_fourier(w), axis=1)
    return np.sum(np.abs(sys.window.fourier(w)) ** 2, axis=1)
