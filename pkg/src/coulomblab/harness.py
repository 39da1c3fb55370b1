"""Batch experiments: configuration, deterministic orchestration and artifacts.

A run is described by a JSON ``RunConfig``.  Its resolved form (defaults filled
in) is hashed, and every artifact of the run is named ``<experiment>-<hash>``
inside the output directory.  The hash ignores ``threads`` and
``output_dir``, so re-running with another thread count rewrites the same
files with the same bytes.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from . import bargmann, discrepancy, gas, geometry, kernel, operators, potential
from .errors import DomainError, LabError, NumericalError, ResourceError

log = logging.getLogger("coulomblab")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_INT = {"type": "integer", "minimum": 1}
_POINT = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

WINDOW_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["type", "center", "radius"],
         "properties": {"type": {"const": "disk"}, "center": _POINT, "radius": _POS}},
        {"type": "object", "additionalProperties": False, "required": ["type", "corner", "width", "height"],
         "properties": {"type": {"const": "rect"}, "corner": _POINT, "width": _POS, "height": _POS}},
        {"type": "object", "additionalProperties": False, "required": ["type", "vertices"],
         "properties": {"type": {"const": "polygon"}, "vertices": {"type": "array", "items": _POINT, "minItems": 3}}},
        {"type": "object", "additionalProperties": False, "required": ["type", "base", "theta", "l"],
         "properties": {"type": {"const": "cut"}, "base": {"$ref": "#/$defs/window"}, "theta": _NUM, "l": _NUM}},
    ],
}
POTENTIAL_SCHEMA = {"type": "object", "additionalProperties": False, "required": ["family", "p"],
                    "properties": {"family": {"const": "radial"}, "p": {"type": "number", "minimum": 0.5}}}
KERNEL_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["type"],
         "properties": {"type": {"const": "ginibre"}}},
        {"type": "object", "additionalProperties": False, "required": ["type", "l"],
         "properties": {"type": {"const": "erfc"}, "l": _NUM}},
        {"type": "object", "additionalProperties": False, "required": ["type", "n"],
         "properties": {"type": {"const": "finite_n"}, "n": _INT, "potential": {"$ref": "#/$defs/potential"}}},
    ]
}
_DEFS = {"window": WINDOW_SCHEMA, "potential": POTENTIAL_SCHEMA, "kernel": KERNEL_SCHEMA}


def _params(props: dict, required=()) -> dict:
    return {"type": "object", "additionalProperties": False, "required": list(required), "properties": props,
            "$defs": _DEFS}


_WIN = {"$ref": "#/$defs/window"}
_POT = {"$ref": "#/$defs/potential"}
_GINIBRE_POT = {"family": "radial", "p": 1.0}


@dataclass(frozen=True)
class Experiment:
    name: str
    schema: dict
    defaults: dict
    columns: dict
    runner: Callable
    notes: str = ""


@dataclass
class Outcome:
    tables: dict  # artifact suffix ("" for the main table) -> CSV text
    summary: dict
    ok: bool = True
    message: str = ""


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    output_dir: str = "out"

    def resolved(self) -> dict:
        exp = EXPERIMENTS[self.experiment]
        params = copy.deepcopy(exp.defaults)
        params.update(copy.deepcopy(self.parameters))
        return {"experiment": self.experiment, "parameters": params, "seed": self.seed, "threads": self.threads,
                "output_dir": self.output_dir}

    def run_hash(self) -> str:
        r = self.resolved()
        key = json.dumps({"experiment": r["experiment"], "parameters": r["parameters"], "seed": r["seed"]},
                         sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(key.encode()).hexdigest()[:12]


RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "experiment": {"type": "string"},
        "parameters": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "threads": _INT,
        "output_dir": {"type": "string"},
    },
}


class ConfigError(LabError, ValueError):
    """The run configuration is malformed or violates its schema."""


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([_fmt(v) for v in r] for r in rows)
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _pot(d) -> potential.RadialPotential:
    return potential.potential_from_dict(d)


# ---------------------------------------------------------------- experiments


def _run_spectrum(p: dict, seed: int, pool) -> Outcome:
    kern = kernel.kernel_from_dict(p["kernel"])
    W = geometry.window_from_dict(p["window"])
    rs = operators.refined_spectrum(kern, W, p["h"])
    fitted = {}
    C = p["C_univ"]
    if C is None:
        C, _ = operators.fit_constant([kernel.Ginibre(), kernel.Erfc(0.0)],
                                      [geometry.Disk(0j, R) for R in operators.DISK_FAMILY])
        fitted["C_univ"] = C
    params = operators.bound_params(W, C, p["eta"])
    fitted.update({"kappa": params.kappa, "eta": params.eta})
    a = operators.window_reach(kern, W)
    spec = rs.fine
    rows = []
    for alpha in p["alphas"]:
        rows.append((alpha, operators.counting(spec, alpha), operators.pfad_rhs(W, alpha, a, params, "upper"),
                     operators.counting(spec, 1 - alpha), operators.pfad_rhs(W, alpha, a, params, "lower")))
    holds = all(r[1] <= r[2] + 1e-9 and r[3] >= r[4] - 1e-9 for r in rows)
    main = _csv(["alpha", "count", "rhs_upper", "count_complement", "rhs_lower"], rows)
    eig = _csv(["k", "lambda"], [(k + 1, lam) for k, lam in enumerate(spec.eigenvalues)])
    summary = {"trace": spec.trace, "hs_sq": spec.hs_sq, "excursion": spec.excursion, "method": spec.method,
               "refinement": {"max_shift": rs.max_shift, "checked": rs.checked, "accepted": rs.accepted},
               "bounds_hold": holds, "fitted": fitted}
    return Outcome({"": main, "eigenvalues": eig}, summary, rs.accepted,
                   "" if rs.accepted else f"refinement moved eigenvalues by {rs.max_shift:.3g}")


def _run_gas(p: dict, seed: int, pool) -> Outcome:
    pot = _pot(p["potential"])
    sc = gas.SamplerConfig(p["c"], p["proposal_sigma"], p["sweeps"], p["burn_in"], seed)
    cfg = gas.sample(p["n"], pot, sc)
    sq = math.sqrt(cfg.n)
    summary = {"sidecar": cfg.meta | {"n": cfg.n},
               "diagnostics": {"scaled_min_separation": sq * gas.min_separation(cfg),
                               "scaled_max_exterior_distance": sq * gas.max_exterior_distance(cfg, pot),
                               "energy": gas.hamiltonian(cfg, pot)},
               "fitted": {"proposal_sigma": cfg.meta["sigma"]}}
    return Outcome({"": cfg.to_csv()}, summary)


def _run_fekete(p: dict, seed: int, pool) -> Outcome:
    pot = _pot(p["potential"])
    cfg = gas.fekete(p["n"], pot, p["tol"], seed=seed)
    sq = math.sqrt(cfg.n)
    diag = {"H": cfg.meta["H"], "grad_max": cfg.meta["grad_max"], "iterations": cfg.meta["iterations"],
            "scaled_min_separation": sq * gas.min_separation(cfg) if cfg.n > 1 else None}
    if cfg.n <= p["lagrange_max_n"]:
        diag["lagrange_abs_max"] = gas.lagrange_abs_max(cfg, pot)
    summary = {"sidecar": {"n": cfg.n, "seed": seed, "potential": pot.to_dict(), "tol": p["tol"]},
               "diagnostics": diag}
    return Outcome({"": cfg.to_csv()}, summary)


def _run_boundary(p: dict, seed: int, pool) -> Outcome:
    pot = _pot(p["potential"])
    seeds = [seed + i for i in range(p["seeds"])]
    rep = discrepancy.boundary_sweep(pot, p["c"], p["n_list"], p["L_list"], seeds, p["sweeps"], p["burn_in"],
                                     p["band"], p["slope_max"], map_fn=pool.map)
    summary = {"fits": rep.fits, "fitted": {"C_fit": rep.fits["C_fit"]}, "pass": rep.fits["majority_pass"]}
    return Outcome({"": rep.to_csv()}, summary)


def _run_bulk(p: dict, seed: int, pool) -> Outcome:
    pot = _pot(p["potential"])
    seeds = [seed + i for i in range(p["seeds"])]
    windows = {k: geometry.window_from_dict(v) for k, v in sorted(p["windows"].items())}
    rep = discrepancy.bulk_sweep(pot, p["c"], p["n_list"], windows, seeds, p["M_bulk"], p["sweeps"],
                                 p["burn_in"], map_fn=pool.map)
    C = rep.fits["C_fit"]
    summary = {"fits": rep.fits, "fitted": {"C_fit": C}, "pass": bool(C <= p["ceiling"])}
    return Outcome({"": rep.to_csv()}, summary)


def _run_sandwich(p: dict, seed: int, pool) -> Outcome:
    pot = _pot(p["potential"])
    W = geometry.window_from_dict(p["window"])
    pt = complex(*p["p"])
    n = p["n"]
    if p["source"] == "fekete":
        cfg = gas.fekete(n, pot, seed=seed)
    else:
        cfg = gas.sample(n, pot, gas.SamplerConfig(p["c"], None, p["sweeps"], p["burn_in"], seed))
    rep = discrepancy.landau_sandwich(cfg, pot, pt, W, n, p["gamma"], p["C_fit"], p["M"], p["s"], p["h"])
    tasks = [(m, rho) for m in p["n_list"] for rho in p["rho_list"]]

    def one(t):
        m, rho = t
        fin = discrepancy.finite_count(pot, pt, W, m, rho, p["M"], rep.s, p["alpha"], p["h"])
        lim = discrepancy.limit_count(pot, pt, W, m, rho, p["M"], rep.s, p["alpha"], p["h"])
        return (m, rho, fin, lim, abs(fin - lim))

    rows = list(pool.map(one, tasks))
    converged = all(r[4] <= 1 for r in rows if r[0] == max(p["n_list"]))
    summary = {"sandwich": rep.to_dict(), "convergence_ok": converged, "fitted": {"s": rep.s, "M": p["M"]},
               "pass": rep.holds and rep.nested and converged}
    counts = _csv(["N_minus", "N", "N_plus", "upper_count", "lower_count", "upper_threshold", "lower_threshold"],
                  [(rep.N_minus, rep.N, rep.N_plus, rep.upper_count, rep.lower_count, rep.upper_threshold,
                    rep.lower_threshold)])
    return Outcome({"": _csv(["n", "rho", "finite_count", "limit_count", "difference"], rows), "counts": counts},
                   summary)


def _run_verify(p: dict, seed: int, pool) -> Outcome:
    from .verify import CHECKS

    names = [c for c in CHECKS if c not in set(p["skip"])]
    results = list(pool.map(lambda name: CHECKS[name](), names))
    rows = [(name, prop, value, tol, ok) for name, (prop, value, tol, ok) in zip(names, results)]
    failed = [r[0] for r in rows if not r[4]]
    return Outcome({"": _csv(["check", "property", "value", "tolerance", "pass"], rows)},
                   {"checks": len(rows), "failed": failed}, not failed,
                   f"failed checks: {', '.join(failed)}" if failed else "")


_DISC_BASE = {
    "potential": _POT, "c": _POS, "n_list": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
    "seeds": _INT, "sweeps": _INT, "burn_in": {"type": "integer", "minimum": 0},
}

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e for e in [
        Experiment(
            "spectrum",
            _params({"kernel": {"$ref": "#/$defs/kernel"}, "window": _WIN, "h": _POS,
                     "alphas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0,
                                                           "exclusiveMaximum": 0.5}, "minItems": 1},
                     "C_univ": {"type": ["number", "null"], "exclusiveMinimum": 0},
                     "eta": {"type": ["number", "null"], "exclusiveMinimum": 0}}, ["window"]),
            {"kernel": {"type": "ginibre"}, "h": 0.1, "alphas": list(operators.ALPHAS), "C_univ": None, "eta": None},
            {"alpha": "threshold of the counting function",
             "count": "#{k : lambda_k > alpha} of the refined Nystrom spectrum",
             "rhs_upper": "upper side of the two-sided counting bound: |W|/pi + C/kappa H1 (...)",
             "count_complement": "#{k : lambda_k > 1 - alpha}",
             "rhs_lower": "lower side: |W|/pi - h(a) C/kappa H1 (...), h(x) = 1 for x <= 2, x^2 log x otherwise",
             "eigenvalues.csv k, lambda": "descending eigenvalues above 1e-12"},
            _run_spectrum,
            "C_univ = null fits the constant on Ginibre and erfc(l=0) disks of radius 2..5 and freezes it.",
        ),
        Experiment(
            "gas",
            _params({"n": {"type": "integer", "minimum": 2}, "potential": _POT, "c": _POS,
                     "proposal_sigma": {"type": ["number", "null"], "exclusiveMinimum": 0},
                     "sweeps": _INT, "burn_in": {"type": "integer", "minimum": 0}}, ["n"]),
            {"potential": _GINIBRE_POT, "c": 2.0, "proposal_sigma": None, "sweeps": 400, "burn_in": 200},
            {"re, im": "particle coordinates after the Metropolis run at beta = c log n"},
            _run_gas,
        ),
        Experiment(
            "fekete",
            _params({"n": _INT, "potential": _POT, "tol": _POS, "lagrange_max_n": {"type": "integer", "minimum": 0}},
                    ["n"]),
            {"potential": _GINIBRE_POT, "tol": 1e-8, "lagrange_max_n": 128},
            {"re, im": "energy minimiser coordinates (stops when max |grad| <= tol n)"},
            _run_fekete,
        ),
        Experiment(
            "discrepancy-boundary",
            _params(_DISC_BASE | {"L_list": {"type": "array", "items": _POS, "minItems": 1}, "band": _POS,
                                  "slope_max": _POS}),
            {"potential": _GINIBRE_POT, "c": 2.0, "n_list": [4096], "L_list": [2, 4, 8, 16], "seeds": 5,
             "sweeps": 800, "burn_in": 500, "band": 2.0, "slope_max": 1.4},
            {"n, c, seed": "chain identification; chain seeds are seed, seed+1, ...",
             "window, scale": "Disk of radius L (microscopic units)",
             "p_re, p_im": "grid maximiser within |sqrt(n) d(p)| <= band",
             "count, expected": "points in p + W/sqrt(n) and (n/pi) dQ(p) |(p + W/sqrt(n)) ∩ S|",
             "discrepancy": "grid sup of |count - expected| (a lower bound of the true sup)",
             "summary fits.slope": "least-squares slope of log sup against log L over L >= 2, per chain; "
                                   "passes when <= slope_max, majority rule across chains",
             "summary fits.ratios": "sup / (H1 sqrt(log|W|) log(1 + log|W|)); C_fit is their maximum"},
            _run_boundary,
        ),
        Experiment(
            "discrepancy-bulk",
            _params(_DISC_BASE | {"windows": {"type": "object", "additionalProperties": _WIN, "minProperties": 1},
                                  "M_bulk": _POS, "ceiling": _POS}),
            {"potential": _GINIBRE_POT, "c": 2.0, "n_list": [1024], "seeds": 5, "sweeps": 800, "burn_in": 500,
             "M_bulk": 3.0, "ceiling": 2.0,
             "windows": {"disk2": geometry.Disk(0j, 2.0).to_dict(), "disk4": geometry.Disk(0j, 4.0).to_dict(),
                         "square4": geometry.Rect(-2 - 2j, 4.0, 4.0).to_dict()}},
            {"window": "window id from the parameters",
             "p_re, p_im": "grid maximiser with d(p, S^c) >= M_bulk log n / sqrt(n)",
             "expected": "dQ(p) |W| / pi",
             "discrepancy": "grid sup of |count - expected|",
             "summary fits.C_fit": "max over chains and windows of sup / perimeter; passes when <= ceiling"},
            _run_bulk,
        ),
        Experiment(
            "sandwich",
            _params({"potential": _POT, "n": {"type": "integer", "minimum": 2}, "source": {"enum": ["fekete", "gas"]},
                     "p": _POINT, "window": _WIN, "gamma": {"type": "number", "exclusiveMinimum": 0,
                                                            "exclusiveMaximum": 1},
                     "C_fit": _POS, "M": _POS, "s": {"type": ["number", "null"], "exclusiveMinimum": 0},
                     "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                     "n_list": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
                     "rho_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0,
                                                             "exclusiveMaximum": 2}, "minItems": 1},
                     "h": _POS, "c": _POS, "sweeps": _INT, "burn_in": {"type": "integer", "minimum": 0}}),
            {"potential": _GINIBRE_POT, "n": 64, "source": "fekete", "p": [1.0, 0.0],
             "window": geometry.Disk(0j, 3.0).to_dict(), "gamma": 0.3, "C_fit": 10.0, "M": 4.0, "s": None,
             "alpha": 0.5, "n_list": [32, 64, 128], "rho_list": [0.7, 1.0, 1.3], "h": 0.1, "c": 2.0,
             "sweeps": 400, "burn_in": 200},
            {"n, rho": "size and degree ratio of the weighted-polynomial space W_floor(rho n)",
             "finite_count": "#{lambda > alpha} for its concentration operator on (p + W/sqrt(n)) ∩ S_{M+s}",
             "limit_count": "#{lambda > alpha} for the limiting erfc (or Ginibre) operator on the rescaled window",
             "difference": "|finite_count - limit_count|; converged when <= 1 at the largest n",
             "counts.csv": "N_minus <= N <= N_plus window counts and the two spectral counts at "
                           "1 - gamma^2/C_fit (rho = 1 - gamma) and gamma^2/C_fit (rho = 1 + gamma)"},
            _run_sandwich,
            "s = null uses 0.3 sqrt(n) times the minimum separation of the configuration.",
        ),
        Experiment(
            "verify",
            _params({"skip": {"type": "array", "items": {"type": "string"}}}),
            {"skip": []},
            {"check": "check id", "property": "what is verified", "value": "measured value",
             "tolerance": "allowed bound", "pass": "1 when the check passes"},
            _run_verify,
        ),
    ]
}


def describe(name: str) -> str:
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    exp = EXPERIMENTS[name]
    schema = {k: v for k, v in exp.schema.items() if k != "$defs"}
    lines = [f"experiment: {name}", "", "parameters schema:", json.dumps(schema, indent=2), "",
             "defaults:", json.dumps(exp.defaults, indent=2, sort_keys=True), "", "output columns:"]
    lines += [f"  {col}: {text}" for col, text in exp.columns.items()]
    if exp.notes:
        lines += ["", exp.notes]
    return "\n".join(lines)


def parse_config(text: str, source: str = "<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    return data


def make_config(data: dict, experiment: str | None = None, seed: int | None = None, threads: int | None = None,
                output_dir: str | None = None) -> RunConfig:
    """Validate a config dict and apply command-line overrides."""
    try:
        jsonschema.validate(data, RUN_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config: {exc.message}") from exc
    name = data.get("experiment", experiment)
    if experiment is not None and name != experiment:
        raise ConfigError(f"config is for experiment {name!r}, not {experiment!r}")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    env_threads = os.environ.get("LAB_THREADS")
    if threads is None and "threads" not in data and env_threads:
        try:
            threads = int(env_threads)
        except ValueError as exc:
            raise ConfigError(f"LAB_THREADS must be an integer, got {env_threads!r}") from exc
    cfg = RunConfig(
        experiment=name,
        parameters=data.get("parameters", {}),
        seed=data.get("seed", 0) if seed is None else seed,
        threads=data.get("threads", 1) if threads is None else threads,
        output_dir=data.get("output_dir", "out") if output_dir is None else output_dir,
    )
    if cfg.threads < 1:
        raise ConfigError("threads must be at least 1")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    try:
        jsonschema.validate(cfg.resolved()["parameters"], EXPERIMENTS[name].schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "parameters"
        raise ConfigError(f"parameters/{where}: {exc.message}") from exc
    return cfg


@dataclass
class RunResult:
    status: int
    artifacts: list[Path]
    summary: dict
    message: str = ""


def run(cfg: RunConfig) -> RunResult:
    """Execute one experiment and write its artifacts.  Never raises for
    experiment failures; the status carries the exit code."""
    resolved = cfg.resolved()
    h = cfg.run_hash()
    stem = f"{cfg.experiment}-{h}"
    out = Path(cfg.output_dir)
    t0 = time.perf_counter()
    try:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcome = EXPERIMENTS[cfg.experiment].runner(resolved["parameters"], cfg.seed, pool)
    except (DomainError, ValueError) as exc:
        return RunResult(EXIT_INVALID, [], {}, f"invalid input: {exc}")
    except (NumericalError, ResourceError) as exc:
        return RunResult(EXIT_NUMERICAL, [], {}, f"numerical failure: {exc}")
    log.info("%s finished in %.1f s", stem, time.perf_counter() - t0)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix, text in sorted(outcome.tables.items()):
        path = out / (f"{stem}.csv" if not suffix else f"{stem}.{suffix}.csv")
        path.write_text(text)
        written.append(path)
    summary = {"experiment": cfg.experiment, "hash": h, "ok": outcome.ok, "message": outcome.message,
               **_jsonable(outcome.summary)}
    spath = out / f"{stem}.json"
    spath.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    mpath = out / f"{stem}.manifest.json"
    mpath.write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")
    written += [spath, mpath]
    status = EXIT_OK if outcome.ok else EXIT_NUMERICAL
    return RunResult(status, written, summary, outcome.message)
