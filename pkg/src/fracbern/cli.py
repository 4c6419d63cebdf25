"""Command-line entry point: ``fracbern {kernel,counterexample,torus,verify-appendix,plot}``.

Exit codes: 0 success, 2 configuration error, 3 certification failure,
4 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, bernstein, closedform, kernels, torus
from .errors import (
    ConfigError,
    ConstructionFailedError,
    ConvergenceError,
    DecayMismatchError,
    DegenerateInputError,
    FracbernError,
)
from .grid_fft import RealGrid, TorusGrid
from .config import COMMANDS, build_config, load_config_file, RunConfig
from .report import ReportEnvelope, csv_text, line_plot_svg, now_stamp, write_text

EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_CONVERGENCE = 0, 2, 3, 4

log = logging.getLogger("fracbern")


class CommandResult:
    def __init__(self, envelope: ReportEnvelope, files: dict[str, str] | None = None):
        self.envelope = envelope
        self.files = files or {}


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """Map preserving input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(jobs) as pool:
        return list(pool.map(fn, items))


def _tag(x: float) -> str:
    return f"{x:g}".replace(".", "p").replace("-", "m")


# Commands -----------------------------------------------------------------------

def cmd_kernel(cfg: RunConfig) -> CommandResult:
    tol = cfg.tol or 1e-12

    def one(s):
        prof = kernels.positivity_scan(s, cfg.dim, cfg.r_max, cfg.n_samples, tol)
        if cfg.moments:
            mass = kernels.l1_mass_detail(s, cfg.dim)
            prof.l1_mass = mass.value
            if cfg.dim == 1:
                prof.second_moment = kernels.second_moment(s, 1)
        asym = None
        if not kernels._is_even_integer(s):
            asym = kernels.asymptotic_check(s, cfg.dim, [10.0, 20.0, 40.0])
        return prof, asym

    out = _pmap(one, cfg.s_values, cfg.jobs)
    env = ReportEnvelope("kernel", cfg.to_dict())
    files = {}
    for s, (prof, asym) in zip(cfg.s_values, out):
        env.results.append({"kind": "kernel_profile", **prof.to_dict()})
        env.error_budgets.append({"s": s, "min_error": prof.min_error})
        if asym is not None:
            env.results.append({"kind": "asymptotic", **asym.to_dict()})
        files[f"kernel_s{_tag(s)}_d{cfg.dim}.csv"] = csv_text(
            ("r", "K", "error"), zip(prof.sample_points, prof.values, prof.errors))
    return CommandResult(env, files)


def _t1(cfg: RunConfig, env: ReportEnvelope) -> list:
    grid = bernstein.DEFAULT_T1_GRID
    if cfg.L is not None or cfg.n is not None:
        grid = RealGrid(cfg.L or grid.half_width, cfg.n or grid.num_points)
    search = bernstein.select_counterexample_params(cfg.N_list, grid)
    members = bernstein.construct_counterexample(search.params, cfg.dim, grid)
    env.results.append({"kind": "parameter_search", **search.to_dict()})
    for m in members:
        env.results.append({"kind": "counterexample_member", **m.to_dict()})
    return bernstein.theorem_t1_certificates(search, members)


def cmd_counterexample(cfg: RunConfig) -> CommandResult:
    env = ReportEnvelope("counterexample", cfg.to_dict())
    certs: list = []
    missing = []
    if "theorem_t1" in cfg.pipelines:
        for c in _t1(cfg, env):
            if c.certified:
                certs.append(c)
            else:
                missing.append({"pipeline": "theorem_t1", "N": c.params["N"]})
    grid = bernstein.DEFAULT_WITNESS_GRID
    if cfg.L is not None or cfg.n is not None:
        grid = RealGrid(cfg.L or grid.half_width, cfg.n or grid.num_points)
    jobs = []
    for s in cfg.s_values:
        for p in cfg.p_values:
            if "large_p" in cfg.pipelines and p >= 4:
                jobs.append(("large_p", s, p))
            if "small_p" in cfg.pipelines and 1 < p < 2:
                jobs.append(("small_p", s, p))

    def run(job):
        kind, s, p = job
        search = bernstein.witness_search_large_p if kind == "large_p" else bernstein.witness_search_small_p
        return search(s, p, grid)

    for (kind, s, p), cert in zip(jobs, _pmap(run, jobs, cfg.jobs)):
        if cert is None:
            missing.append({"pipeline": kind, "s": s, "p": p})
        else:
            certs.append(cert)
    for c in certs:
        env.results.append({"kind": "certificate", **c.to_dict()})
        env.error_budgets.append({"pipeline": c.pipeline, "s": c.s, "p": c.p,
                                  "error_budget": c.error_budget})
    if missing:
        env.status = "certification_failed"
        env.error = {"type": "CertificationFailure", "missing": missing}
    return CommandResult(env)


def cmd_torus(cfg: RunConfig) -> CommandResult:
    grid = TorusGrid(1, cfg.M)
    if cfg.function == "mode":
        funcs = [torus.torus_mode(grid, 1)]
    else:
        funcs = [torus.random_torus_function(grid, cfg.seed + i, max_mode=min(40, cfg.M // 2), decay=0.5)
                 for i in range(cfg.samples)]
    times = np.linspace(0.0, cfg.t_max, 11)
    env = ReportEnvelope("torus", cfg.to_dict())
    files = {}
    combos = [(s, p) for s in cfg.s_values for p in cfg.p_values]

    def one(sp):
        s, p = sp
        rows = []
        for i, f in enumerate(funcs):
            trace = torus.mean_zero_decay_check(f, s, p, times)
            ratio = torus.torus_bernstein(f, s, p).ratio
            loc = []
            for N in cfg.N_list:
                if grid.modes_per_dim < 2.02 * N:
                    continue
                try:
                    loc.append({"N": N, "ratio": torus.localized_bernstein(f, s, p, int(N)).ratio})
                except DegenerateInputError:
                    loc.append({"N": N, "ratio": None, "degenerate": True})
            rows.append((i, trace, ratio, loc))
        return rows

    for (s, p), rows in zip(combos, _pmap(one, combos, cfg.jobs)):
        for i, trace, ratio, loc in rows:
            env.results.append({"kind": "torus_case", "s": s, "p": p, "sample": i,
                                "torus_ratio": ratio, "fitted_rate": trace.fitted_rate,
                                "monotone": trace.monotone, "localized": loc})
            files[f"decay_s{_tag(s)}_p{_tag(p)}_f{i}.csv"] = trace.to_csv()
    return CommandResult(env, files)


def cmd_verify_appendix(cfg: RunConfig) -> CommandResult:
    tol = cfg.tol or 1e-8
    rep = closedform.quadrature_crosscheck(tol)
    env = ReportEnvelope("verify-appendix", cfg.to_dict())
    env.results.append({"kind": "closed_form_table", **closedform.closed_form_table().to_dict()})
    env.results.append({"kind": "crosscheck", **rep.to_dict()})
    env.error_budgets.append({"max_abs_discrepancy": rep.max_abs_discrepancy,
                              "quadrature_errors": list(rep.error_estimates)})
    if not rep.passed:
        env.status = "certification_failed"
        env.error = {"type": "CrosscheckFailure", "max_abs_discrepancy": rep.max_abs_discrepancy,
                     "abs_tol": tol}
    return CommandResult(env)


def plot_g(cfg: RunConfig) -> CommandResult:
    files = {}
    for name, hi in (("g_0_0p4.svg", 0.4), ("g_0_10.svg", 10.0)):
        x = np.linspace(0.0, hi, 801)
        files[name] = line_plot_svg([("g(x)", x, bernstein.g_function(x))],
                                    f"g(x) on [0, {hi:g}]", "x", "g(x)")
    env = ReportEnvelope("plot", cfg.to_dict())
    for s in cfg.s_values:
        prof = kernels.positivity_scan(s, cfg.dim, cfg.r_max, cfg.n_samples, cfg.tol or 1e-12)
        files[f"kernel_s{_tag(s)}_d{cfg.dim}.svg"] = line_plot_svg(
            [(f"K_{s:g},{cfg.dim}", prof.sample_points, prof.values)],
            f"heat kernel s = {s:g}, d = {cfg.dim}", "r", "K(r)", shade_negative=True)
        env.results.append({"kind": "kernel_plot", "s": s, "dim": cfg.dim,
                            "negative_dip": prof.certified_negative, "min_value": prof.min_value,
                            "min_location": prof.min_location})
    env.results.append({"kind": "g_plot", "files": sorted(k for k in files if k.startswith("g_")),
                        "sign_changes": [float(np.sqrt(2) - 1), float(np.sqrt(2) + 1)]})
    return CommandResult(env, files)


HANDLERS = {
    "kernel": cmd_kernel,
    "counterexample": cmd_counterexample,
    "torus": cmd_torus,
    "verify-appendix": cmd_verify_appendix,
    "plot": plot_g,
}


# Argument handling ----------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracbern", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fracbern {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, help="worker threads for sweeps")
        p.add_argument("--tol", type=float, help="tolerance override")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--dim", type=int)
        p.add_argument("--s", dest="s_values", type=_float_list, help="comma-separated s values")
        p.add_argument("--p", dest="p_values", type=_float_list, help="comma-separated p values")
        p.add_argument("--N", dest="N_list", type=_float_list, help="comma-separated band scales")
        if name == "counterexample":
            p.add_argument("--pipeline", dest="pipelines", action="append",
                           help="theorem_t1, large_p or small_p (repeatable)")
            p.add_argument("--L", type=float, help="grid half width")
            p.add_argument("--n", type=int, help="grid points")
        if name in ("kernel", "plot"):
            p.add_argument("--r-max", dest="r_max", type=float)
            p.add_argument("--moments", action="store_true", default=None,
                           help="also compute the L1 mass and second moment")
        if name == "torus":
            p.add_argument("--M", type=int, help="resolved modes")
            p.add_argument("--function", choices=("random", "mode"))
            p.add_argument("--samples", type=int)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _error_record(exc: BaseException, code: int) -> dict:
    rec = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    params = getattr(exc, "params", None)
    if params:
        rec["params"] = params
    return rec


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, ConstructionFailedError):
        return EXIT_CERT
    if isinstance(exc, (ConfigError, ValueError)):
        return EXIT_CONFIG
    return EXIT_CONVERGENCE


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    out_dir = Path(flags.get("out") or "fracbern-out")
    cfg = None
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = build_config(args.command, file_values, flags)
        out_dir = Path(cfg.out)
        log.info("running %s", cfg.command)
        result = HANDLERS[cfg.command](cfg)
    except (FracbernError, DecayMismatchError, ValueError) as exc:
        code = _exit_code(exc)
        env = ReportEnvelope(args.command, cfg.to_dict() if cfg else {"command": args.command},
                             status="error", error=_error_record(exc, code), timestamp=now_stamp())
        sys.stderr.write(json.dumps(env.error, sort_keys=True) + "\n")
        try:
            write_text(out_dir / "report.json", env.to_json())
        except OSError:
            pass
        return code
    env = result.envelope
    env.timestamp = now_stamp()
    try:
        for name, text in result.files.items():
            write_text(out_dir / name, text)
        path = write_text(out_dir / "report.json", env.to_json())
    except OSError as exc:
        rec = {"type": "IOError", "message": f"{exc.filename}: {exc.strerror}", "exit_code": EXIT_CONFIG}
        sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
        return EXIT_CONFIG
    print(f"{env.command}: {env.status} -> {path}")
    if env.status == "certification_failed":
        sys.stderr.write(json.dumps(env.error, sort_keys=True) + "\n")
        return EXIT_CERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
