"""Acceptance checks, one test per criterion, with tolerances and time budgets as specified."""

import json
import math
import time

import numpy as np
import pytest

from apgabor import cli
from apgabor.apcore import (
    TWO_PI,
    APSequence,
    TrigPolynomial,
    ap_norm,
    seq_norm,
    stepanov_norm,
    time_average_inner,
)
from apgabor.frames import (
    SpectrumSet,
    fiber_matrix,
    finite_modulation_failure,
    frame_bounds,
    frame_sandwich_check,
    schur_bessel_bound,
    subspace_diagonal_sums,
    subspace_frame_bounds,
)
from apgabor.gabor import (
    GaborSystem,
    adjoint_residual,
    adjoint_slack,
    analysis_family,
    analysis_norm_via_h,
    analysis_sequence,
    bessel_total,
    periodization_oracle,
)
from apgabor.sampling import generate_random_polynomial, generate_random_sequence, make_rng
from apgabor.windows import gaussian, rectangle, triangle, wiener_norm

GAUSS = GaborSystem(gaussian(1.0), 1.0, 1.0)


def random_polys(seed, count, max_terms=8):
    rng = make_rng(seed)
    return [generate_random_polynomial(rng, int(rng.integers(1, max_terms + 1)), (-5.0, 5.0), 0.1)
            for _ in range(count)]


@pytest.fixture(scope="module")
def gauss_bounds():
    t0 = time.perf_counter()
    fb = frame_bounds(GAUSS, grid_points=256, K=10)
    return fb, time.perf_counter() - t0


def test_c01_parseval_time_average(record):
    t0 = time.perf_counter()
    polys = random_polys(101, 20)
    Ts = (1e3, 1e4, 1e5)
    within = True
    for f in polys:
        norm2 = ap_norm(f) ** 2
        budget = float(np.sum(np.abs(f.coeffs))) ** 2
        for T in Ts:
            within &= abs(time_average_inner(f, f, T) - norm2) <= budget / (0.1 * T)
    # a single T sits at an arbitrary phase of the sinc oscillation, so the
    # observed error per decade is the mean over T drawn uniformly in [T, 10T]
    rng = make_rng(102)
    mean_err = []
    for T in Ts:
        draws = rng.uniform(T, 10 * T, 200)
        mean_err.append(np.mean([abs(time_average_inner(f, f, s) - ap_norm(f) ** 2)
                                 for f in polys for s in draws]))
    ratios = [mean_err[i] / mean_err[i + 1] for i in range(2)]
    elapsed = time.perf_counter() - t0
    ok = within and min(ratios) >= 8 and elapsed < 1.0
    record(1, ok, f"bound held={within}, decade ratios={ratios[0]:.2f},{ratios[1]:.2f}, {elapsed:.2f}s")
    assert ok


def test_c02_periodization_identity(record):
    t0 = time.perf_counter()
    psi = gaussian(1.0)
    a = APSequence.exponential(0.5)
    closed = complex(psi.fourier(0.5))
    rel = {T: abs(periodization_oracle(a, psi, 1.0, 0.5, T) - closed) / abs(closed) for T in (200.0, 2000.0)}
    elapsed = time.perf_counter() - t0
    ok = rel[200.0] < 1e-2 and rel[2000.0] < 1e-3 and elapsed < 10 and abs(closed - 2.21217) < 1e-3
    record(2, ok, f"psi^(0.5)={closed.real:.6f}, rel err T=200: {rel[200.0]:.2e}, "
                  f"T=2000: {rel[2000.0]:.2e}, {elapsed:.2f}s")
    assert ok


def test_c03_dual_path(record):
    t0 = time.perf_counter()
    worst = 0.0
    for psi in (gaussian(1.0), triangle()):
        sys = GaborSystem(psi, 1.0, 1.0)
        for f in random_polys(303, 50):
            direct = seq_norm(analysis_sequence(f, sys, 0)) ** 2
            via_h = analysis_norm_via_h(f, sys, 0)
            worst = max(worst, abs(via_h - direct) / direct)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 2
    record(3, ok, f"max relative difference {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_c04_adjoint(record):
    t0 = time.perf_counter()
    psi = gaussian(1.0)
    rng = make_rng(404)
    worst_excess = -math.inf
    for f in random_polys(405, 50):
        b = generate_random_sequence(rng, int(rng.integers(1, 9)), 0.1)
        res = adjoint_residual(f, b, psi, 1.0)
        worst_excess = max(worst_excess, res - (1e-10 + adjoint_slack(f, b, psi, 1.0)))
    elapsed = time.perf_counter() - t0
    ok = worst_excess <= 0 and elapsed < 2
    record(4, ok, f"max residual minus allowance {worst_excess:.2e}, {elapsed:.2f}s")
    assert ok


def test_c05_rectangle_orthonormal(record):
    t0 = time.perf_counter()
    sys = GaborSystem(rectangle(0.0, 1.0), 1.0, TWO_PI)
    K, L, grid = 10, 10**4, 64
    lams = np.arange(grid) * (TWO_PI / grid)
    dev = max(float(np.max(np.abs(fiber_matrix(sys, lam, K, L).entries - np.eye(2 * K + 1)))) for lam in lams)
    fb = frame_bounds(sys, grid_points=grid, K=K, L=L)
    # the l-tail of the rectangle decays like 1/L, so S(f) is certified to 1e-4
    ratios = [frame_sandwich_check(f, sys, fb, tol=1e-4) for f in random_polys(505, 100)]
    all_pass = all(r.passed for r in ratios)
    lo, hi = min(r.ratio for r in ratios), max(r.ratio for r in ratios)
    elapsed = time.perf_counter() - t0
    ok = (dev <= 2e-3 and 0.99 <= fb.A <= 1.01 and 0.99 <= fb.B <= 1.01 and all_pass
          and 0.99 <= lo and hi <= 1.01 and elapsed < 30)
    record(5, ok, f"max |m-I|={dev:.2e}, A={fb.A:.6f}, B={fb.B:.6f}, ratios in [{lo:.6f}, {hi:.6f}], "
                  f"{elapsed:.1f}s")
    assert ok


def test_c06_gaussian_sandwich(record, gauss_bounds):
    fb, build = gauss_bounds
    t0 = time.perf_counter()
    reports = [frame_sandwich_check(f, GAUSS, fb) for f in random_polys(606, 100)]
    ratios = [r.ratio for r in reports]
    elapsed = build + time.perf_counter() - t0
    ok = (fb.A - fb.slack > 0 and all(r.passed for r in reports)
          and fb.B + fb.slack >= max(ratios) and fb.A - fb.slack <= min(ratios) and elapsed < 60)
    record(6, ok, f"A={fb.A:.6f}, B={fb.B:.6f}, slack={fb.slack:.2e}, "
                  f"ratios in [{min(ratios):.6f}, {max(ratios):.6f}], {elapsed:.1f}s")
    assert ok


def test_c07_schur_vs_fibers(record, gauss_bounds):
    fb, _ = gauss_bounds
    t0 = time.perf_counter()
    residues = np.round(np.arange(0, 63) * 0.1, 10)
    bound = schur_bessel_bound(GAUSS, residues)
    elapsed = time.perf_counter() - t0
    ok = bound**2 >= fb.B - fb.slack and elapsed < 10
    record(7, ok, f"schur^2={bound**2:.4f} >= B-slack={fb.B - fb.slack:.4f}, {elapsed:.2f}s")
    assert ok


def test_c08_stepanov(record):
    t0 = time.perf_counter()
    psi = triangle()
    sys = GaborSystem(psi, 1.0, 1.0)
    w = wiener_norm(psi)
    worst = -math.inf
    for f in random_polys(808, 20):
        lhs = seq_norm(analysis_sequence(f, sys, 0))
        worst = max(worst, lhs - (stepanov_norm(f, 1e-3) * w + 1e-3))
    elapsed = time.perf_counter() - t0
    ok = worst <= 0 and elapsed < 10
    record(8, ok, f"max lhs minus rhs {worst:.3e}, wiener_norm={w:.6f}, {elapsed:.2f}s")
    assert ok


def test_c09_subspace(record):
    t0 = time.perf_counter()
    M = SpectrumSet([j + 0.5 for j in range(51)])
    F = [-1, 0, 1]
    # values past j ~ 27 underflow double precision, so order is checked in log space
    logs = finite_modulation_failure(M, GAUSS, F, log=True)
    decreasing = bool(np.all(np.diff(logs[2:]) < 0))
    at50 = math.exp(logs[50])
    A, B = subspace_frame_bounds(M, GAUSS)
    sums = subspace_diagonal_sums(M, GAUSS)
    energies = np.array([bessel_total(analysis_family(TrigPolynomial.exponential(m), GAUSS, tol=1e-12))
                         for m in M.mu])
    rel = float(np.max(np.abs(sums - energies) / energies))
    rel_A = abs(A - energies.min()) / energies.min()
    elapsed = time.perf_counter() - t0
    ok = decreasing and at50 < 1e-6 and A > 0 and rel <= 1e-8 and rel_A <= 1e-8 and elapsed < 5
    record(9, ok, f"strictly decreasing j>=2: {decreasing}, value at j=50: exp({logs[50]:.1f}), "
                  f"A={A:.6f}, B={B:.6f}, max rel diff to S(e_mu) {rel:.1e}, {elapsed:.2f}s")
    assert ok


def test_c10_cli(record, tmp_path):
    t0 = time.perf_counter()
    args = ["sandwich", "--window", "gaussian:sigma=1", "--alpha", "1", "--beta", "1",
            "--grid", "64", "--K", "8", "--trials", "20", "--seed", "42"]
    texts = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        assert cli.main(args + ["--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        rep.pop("timestamp")
        texts.append(json.dumps(rep, indent=2, sort_keys=True).encode())
    same = texts[0] == texts[1] and (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    bad = tmp_path / "bad.json"
    code = cli.main(["sandwich", "--window", "gaussian:sigma=1", "--alpha", "1", "--beta", repr(8 * math.pi),
                     "--grid", "64", "--K", "8", "--trials", "5", "--seed", "42", "--out", str(bad)])
    violations = json.loads(bad.read_text())["violations"]
    elapsed = time.perf_counter() - t0
    ok = same and code == 2 and len(violations) > 0 and elapsed < 10
    record(10, ok, f"byte-identical={same}, violation exit={code}, {len(violations)} violations, {elapsed:.2f}s")
    assert ok
