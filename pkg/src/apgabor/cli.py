"""
Command line front end.

    apgabor frame-bounds --window gaussian:sigma=1 --alpha 1 --beta 1 --grid 256 --K 10
    apgabor sandwich --window rect:a=0,b=1 --alpha 1 --beta 6.283185307 --trials 100 --seed 42
    apgabor oracle-check --window gaussian:sigma=1 --alpha 1 --T 200

Every run writes a JSON report (``--out``, default stdout); sweep commands also
write a CSV table (``--csv``, default next to ``--out``).  Settings may come
from a JSON config file (``--config``) whose keys are the flag names; flags
given on the command line win.

Exit status: 0 success, 1 usage error, 2 invariant or inequality violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .apcore import APSequence, TrigPolynomial, ap_norm
from .errors import ArgumentError, CaseViolation, PrecisionError, UnsupportedWindowError
from .frames import (
    SpectrumSet,
    finite_modulation_failure,
    frame_bounds,
    frame_sandwich_check,
    subspace_diagonal_sums,
)
from .gabor import (
    AnalysisFamily,
    GaborSystem,
    analysis_family,
    bessel_total,
    gabor_synthesis,
    periodization_oracle,
    synthesis,
    synthesis_tail,
)
from .sampling import generate_random_polynomial
from .windows import parse_window, periodized_profile, wiener_norm

COMMANDS = ("bessel", "frame-bounds", "analyze", "synthesize", "sandwich", "subspace", "oracle-check")


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    window: str = "gaussian:sigma=1.0"
    alpha: float = 1.0
    beta: float = 1.0
    K: int = 10
    L: int | None = None
    P: int = 50
    grid: int = 256
    seed: int = 0
    trials: int = 100
    terms: int = 6
    freq_min: float = -5.0
    freq_max: float = 5.0
    min_gap: float = 0.1
    tol: float = 1e-4
    T: float = 200.0
    dt: float = 1e-3
    mu: list = field(default_factory=lambda: [0.5])
    F: list = field(default_factory=lambda: [-1, 0, 1])
    rtol: float = 1e-2
    input: str | None = None
    out: str | None = None
    csv: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.alpha > 0 or not self.beta > 0:
            raise UsageError("alpha and beta must be positive")
        for name in ("K", "P", "grid", "trials", "terms"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be >= 1")
        if self.L is not None and self.L < 1:
            raise UsageError("L must be >= 1")
        if not self.T > 0 or not self.dt > 0 or not self.tol > 0:
            raise UsageError("T, dt and tol must be positive")


# flags whose report value is a path or output location, not a parameter
_IO_KEYS = ("input", "out", "csv")


def _float_list(text):
    if isinstance(text, list):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text):
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apgabor", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"apgabor {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    add = parser.add_argument
    # default=None everywhere so we can tell which flags were given explicitly
    add("--config", help="JSON config file; keys are flag names")
    add("--window", default=None, help='e.g. "gaussian:sigma=1", "triangle", "rect:a=0,b=1"')
    add("--alpha", type=float, default=None)
    add("--beta", type=float, default=None)
    add("--K", type=int, default=None, help="fiber truncation (indices -K..K)")
    add("--L", type=int, default=None, help="modulation truncation (|l| <= L)")
    add("--P", type=int, default=None, help="lattice truncation for periodised sums")
    add("--grid", type=int, default=None, help="number of residue grid points")
    add("--seed", type=int, default=None)
    add("--trials", type=int, default=None)
    add("--terms", type=int, default=None, help="terms per random polynomial")
    add("--freq-min", dest="freq_min", type=float, default=None)
    add("--freq-max", dest="freq_max", type=float, default=None)
    add("--min-gap", dest="min_gap", type=float, default=None)
    add("--tol", type=float, default=None, help="relative l-tail tolerance")
    add("--T", type=float, default=None, help="oracle averaging half-width")
    add("--dt", type=float, default=None, help="oracle grid step")
    add("--mu", type=_float_list, default=None, help="comma-separated frequencies")
    add("--F", type=_int_list, default=None, help="comma-separated modulation indices")
    add("--rtol", type=float, default=None)
    add("--input", default=None, help="input JSON (polynomial, sequence or family)")
    add("--out", default=None, help="JSON report path (default: stdout)")
    add("--csv", default=None, help="CSV table path for sweep commands")
    return parser


def load_config(argv=None) -> ExperimentConfig:
    args = vars(build_parser().parse_args(argv))
    merged = {}
    if args.get("config"):
        try:
            data = json.loads(Path(args["config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args['config']}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(ExperimentConfig)}
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            merged[key] = value
    for key, value in args.items():
        if key != "config" and value is not None:
            merged[key] = value
    if "mu" in merged:
        merged["mu"] = _float_list(merged["mu"])
    if "F" in merged:
        merged["F"] = _int_list(merged["F"])
    try:
        cfg = ExperimentConfig(**merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg


# --- commands ----------------------------------------------------------------


def _system(cfg):
    return GaborSystem(parse_window(cfg.window), cfg.alpha, cfg.beta)


def _random_polys(cfg):
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    return [
        generate_random_polynomial(rng, cfg.terms, (cfg.freq_min, cfg.freq_max), cfg.min_gap)
        for _ in range(cfg.trials)
    ]


def _read_input(cfg):
    if cfg.input is None:
        return None
    try:
        return json.loads(Path(cfg.input).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input {cfg.input}: {exc}") from None


def run_bessel(cfg):
    psi = parse_window(cfg.window)
    lams, sums = periodized_profile(psi, cfg.alpha, cfg.grid, cfg.P)
    K = cfg.K
    results = {
        "bessel_condition_sup": float(np.max(sums)),
        "argmax_lambda": float(lams[int(np.argmax(sums))]),
        "wiener_norm": wiener_norm(psi, K, 1000),
    }
    certs = {
        "tails": {
            "wiener_time_decay": psi.time_decay(K),
            "spectral_tail_max": max(psi.freq_decay(l, 2 * math.pi / cfg.alpha, cfg.P) for l in lams),
        },
        "slack": 0.0,
        "truncation": {"P": cfg.P, "K": K, "grid": cfg.grid},
        "sides": {"bessel_condition_sup": "grid max of certified upper bounds (lower estimate of sup)",
                  "wiener_norm": "grid maxima plus certified tail"},
    }
    table = (["lambda", "periodized_sum"], list(zip(lams.tolist(), sums.tolist())))
    return results, certs, [], table


def run_frame_bounds(cfg):
    fb = frame_bounds(_system(cfg), cfg.grid, cfg.K, cfg.L)
    results = fb.to_dict()
    certs = {"tails": {"ell_tail_eig_slack": fb.certified_slack},
             "slack": fb.slack,
             "grid_oscillation": fb.grid_slack}
    table = (["lambda", "eig_min", "eig_max"], fb.table())
    return results, certs, [], table


def _input_polys(cfg):
    data = _read_input(cfg)
    if data is None:
        return _random_polys(cfg)
    if isinstance(data, list):
        return [TrigPolynomial.from_dict(d) for d in data]
    return [TrigPolynomial.from_dict(data)]


def run_analyze(cfg):
    sys_ = _system(cfg)
    fams = []
    for f in _input_polys(cfg):
        fam = analysis_family(f, sys_, cfg.tol)
        fams.append({
            "polynomial": f.to_dict(),
            "family": fam.to_dict(),
            "bessel_total": bessel_total(fam),
            "norm2": ap_norm(f) ** 2,
        })
    tails = [item["family"]["tail_bound"] for item in fams]
    return {"families": fams}, {"tails": {"ell_tail": tails}, "slack": 0.0}, [], None


def run_synthesize(cfg):
    data = _read_input(cfg)
    if data is None:
        raise UsageError("synthesize needs --input (an AP sequence or an analysis family)")
    psi = parse_window(cfg.window)
    if "entries" in data:
        fam = AnalysisFamily.from_dict(data)
        poly = gabor_synthesis(fam, _system(cfg), cfg.P)
        results = {"mode": "gabor", "polynomial": poly.to_dict(), "alpha_factor": 1.0}
        tails = {"family_tail": fam.tail_bound}
    else:
        a = APSequence.from_dict(data)
        poly = synthesis(a, psi, cfg.alpha, cfg.P)
        results = {"mode": "periodization", "polynomial": poly.to_dict(),
                   "alpha_factor": 1.0 / cfg.alpha}
        tails = {"synthesis_tail": synthesis_tail(a, psi, cfg.alpha, cfg.P)}
    return results, {"tails": tails, "slack": 0.0, "truncation": {"P": cfg.P}}, [], None


def run_sandwich(cfg):
    sys_ = _system(cfg)
    fb = frame_bounds(sys_, cfg.grid, cfg.K, cfg.L)
    violations = []
    if not fb.A - fb.slack > 0:
        violations.append({
            "inequality": "A - slack > 0 (lower frame bound)",
            "A": fb.A, "slack": fb.slack, "lhs": fb.A - fb.slack, "rhs": 0.0,
        })
    ratios = []
    trials = []
    for i, f in enumerate(_input_polys(cfg)):
        rep = frame_sandwich_check(f, sys_, fb, cfg.tol)
        ratios.append(rep.ratio)
        trials.append([i, rep.S, rep.norm2, rep.ratio, rep.lower, rep.upper, int(rep.passed)])
        for v in rep.violations:
            violations.append(dict(v, trial=i))
        if not rep.fibers_covered:
            violations.append({"inequality": "fiber indices within -K..K", "trial": i,
                               "lhs": float(np.max(np.abs(f.freqs))), "rhs": fb.trunc_K})
    results = {
        "bounds": fb.to_dict(),
        "trials": len(ratios),
        "passed": sum(t[-1] for t in trials),
        "ratio_min": min(ratios) if ratios else None,
        "ratio_max": max(ratios) if ratios else None,
    }
    certs = {"tails": {"ell_tail_eig_slack": fb.certified_slack, "tol": cfg.tol},
             "slack": fb.slack, "grid_oscillation": fb.grid_slack}
    table = (["trial", "S", "norm2", "ratio", "lower", "upper", "passed"], trials)
    return results, certs, violations, table


def run_subspace(cfg):
    sys_ = _system(cfg)
    M = SpectrumSet(cfg.mu)
    L = cfg.L if cfg.L is not None else 100
    sums = subspace_diagonal_sums(M, sys_, L)
    finite = finite_modulation_failure(M, sys_, cfg.F)
    results = {"A": float(np.min(sums)), "B": float(np.max(sums)), "case": M.classify(cfg.alpha),
               "F": list(cfg.F), "finite_F_min": float(np.min(finite))}
    certs = {"tails": {"ell_tail_max": max(sys_.window.freq_decay(m, cfg.beta, L) for m in M.mu)},
             "slack": 0.0, "truncation": {"L": L}}
    rows = [[j, m, s, v] for j, (m, s, v) in enumerate(zip(M.mu.tolist(), sums.tolist(), finite.tolist()))]
    return results, certs, [], (["j", "mu", "s_j", "finite_F_sum"], rows)


def run_oracle_check(cfg):
    psi = parse_window(cfg.window)
    data = _read_input(cfg)
    a = APSequence.from_dict(data) if data else APSequence.exponential(cfg.mu[0] * cfg.alpha)
    violations = []
    rows = []
    for mu in cfg.mu:
        oracle = periodization_oracle(a, psi, cfg.alpha, mu, cfg.T, cfg.dt)
        closed = complex(psi.fourier(mu)) * a.coefficient(mu * cfg.alpha) / cfg.alpha
        err = abs(oracle - closed)
        rel = err / abs(closed) if closed else err
        rows.append([mu, oracle.real, oracle.imag, closed.real, closed.imag, rel])
        if rel > cfg.rtol:
            violations.append({"inequality": "relative error <= rtol", "mu": mu,
                               "lhs": rel, "rhs": cfg.rtol})
    results = {"checks": [dict(zip(["mu", "oracle_re", "oracle_im", "closed_re", "closed_im",
                                    "rel_error"], r)) for r in rows]}
    certs = {"tails": {}, "slack": cfg.rtol, "truncation": {"T": cfg.T, "dt": cfg.dt}}
    return results, certs, violations, None


RUNNERS = {
    "bessel": run_bessel,
    "frame-bounds": run_frame_bounds,
    "analyze": run_analyze,
    "synthesize": run_synthesize,
    "sandwich": run_sandwich,
    "subspace": run_subspace,
    "oracle-check": run_oracle_check,
}


# --- output ------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def build_report(cfg, results, certs, violations, timestamp=None) -> dict:
    config = {k: v for k, v in asdict(cfg).items() if k not in _IO_KEYS}
    return _jsonable({
        "command": cfg.command,
        "config": config,
        "results": results,
        "certificates": certs,
        "violations": violations,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
    })


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def run(cfg: ExperimentConfig, stdout=None) -> int:
    """Execute ``cfg``; returns the exit status."""
    stdout = stdout or sys.stdout
    results, certs, violations, table = RUNNERS[cfg.command](cfg)
    report = build_report(cfg, results, certs, violations)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    if table is not None:
        csv_path = cfg.csv or (str(Path(cfg.out).with_suffix(".csv")) if cfg.out else None)
        if csv_path:
            Path(csv_path).write_text(format_csv(*table))
    return 2 if violations else 0


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
        return run(cfg)
    except SystemExit as exc:
        # argparse reports usage problems itself
        return 0 if exc.code in (0, None) else 1
    except (UsageError, ArgumentError, UnsupportedWindowError, CaseViolation, PrecisionError) as exc:
        print(f"apgabor: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
