"""Batch front-end: ``lvx <command> <config> [--set key=value]...``.

Commands
--------
check              run the applicable condition checkers, write report files
volterra           solve a deterministic Volterra problem (field + trace CSV)
simulate           Monte Carlo moments / stationarity / continuity probes
stability          asymptotic-stability check plus the fractional bound
reproduce-example  run a named built-in example preset

Exit status: 0 success/pass, 1 usage or configuration error, 2 a condition
check failed (reports are still written), 3 numerical failure (divergent
iteration; the trace is written).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import config as cfgmod
from . import plots, simulator, volterra, wellposedness
from .config import ConfigError
from .kernels import lp_norm
from .volterra import ContractionFailure, PicardDivergence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _write_report(outdir: Path, reports: List[wellposedness.ConditionReport], extra: str = "") -> None:
    text = "\n\n".join(r.to_text() for r in reports)
    if extra:
        text = text + ("\n\n" if text else "") + extra
    (outdir / "report.txt").write_text(text + "\n")
    rows = [row for r in reports for row in r.records()]
    with open(outdir / "report.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["check", "condition", "verdict", "quantities", "note"])
        writer.writeheader()
        writer.writerows(rows)


def _checks_for(cp, model) -> List[wellposedness.ConditionReport]:
    names = cfgmod._get(cp, "run", "checks", str, "auto")
    reports = []
    for name in [n.strip() for n in names.split(",") if n.strip()]:
        if name == "auto":
            reports.append(wellposedness.applicable_check(model))
            if model.q is not None and model.chars.modulation is not None:
                reports.append(wellposedness.check_heavy_tail(model))
        elif name == "finite-horizon":
            reports.append(wellposedness.check_finite_horizon(model))
        elif name == "heavy-tail":
            reports.append(wellposedness.check_heavy_tail(model))
        elif name == "infinite-memory":
            reports.append(wellposedness.check_infinite_memory(model))
        elif name == "asymptotic-stability":
            reports.append(wellposedness.check_asymptotic_stability(model))
        else:
            raise ConfigError(f"unknown check {name!r}")
    return reports


def _cmd_check(cp, outdir: Path, plot: bool) -> int:
    model = cfgmod.build_model(cp)
    reports = _checks_for(cp, model)
    _write_report(outdir, reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def _volterra_problem(cp, model):
    force = cfgmod._get(cp, "run", "force", float, 1.0)
    return volterra.VolterraProblem(
        terms=(volterra.VolterraTerm(kernel=model.kernel, power=cfgmod._get(cp, "run", "kernel_power", float, 1.0)),),
        force=force,
        t_end=model.interval.end,
        t_start=model.interval.start,
        p=cfgmod._get(cp, "run", "problem_p", float, 1.0),
        gamma=cfgmod._get(cp, "run", "problem_gamma", float, 1.0),
    )


def _cmd_volterra(cp, outdir: Path, plot: bool) -> int:
    model = cfgmod.build_model(cp)
    problem = _volterra_problem(cp, model)
    step = cfgmod._get(cp, "run", "grid_step", float, 1e-2)
    tol = cfgmod._get(cp, "run", "tol", float, 1e-8)
    if model.interval.start is None:
        grid = np.array([model.interval.end])
    else:
        n = int(round((model.interval.end - model.interval.start) / step))
        grid = model.interval.start + np.arange(n + 1) * step
    try:
        fld, trace = volterra.picard_solve(problem, grid=grid, tol=tol, max_iter=cfgmod._get(cp, "run", "max_iter", int, 400))
    except ContractionFailure as exc:
        (outdir / "report.txt").write_text(
            f"contraction failed: {exc}\nirreducible mass: {float(exc.irreducible_mass)!r}\n"
        )
        return EXIT_CHECK_FAILED
    except PicardDivergence as exc:
        exc.trace.to_csv(outdir / "trace.csv")
        (outdir / "report.txt").write_text(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    fld.to_csv(outdir / "field.csv")
    trace.to_csv(outdir / "trace.csv")
    mass = sum(t.total_mass() for t in problem.terms)
    lines = [
        f"volterra solve: {trace.iterations} iterations, rho={float(trace.rho)!r}",
        f"kernel mass: {float(mass)!r} ({'contractive' if mass < 1 else 'renewal-critical or supercritical'})",
        f"solution sup: {float(fld.sup())!r}",
    ]
    if cfgmod._get(cp, "run", "with_moment_bound", bool, False):
        bound = volterra.moment_bound(model, grid=grid)
        bound.to_csv(outdir / "bound.csv")
        lines.append(f"moment bound sup: {float(bound.sup())!r}")
    (outdir / "report.txt").write_text("\n".join(lines) + "\n")
    if plot:
        plots.render_field(fld, outdir / "field.png")
        plots.render_trace(trace, outdir / "trace.png")
    return EXIT_OK


def _default_box(model, cfg, span):
    if model.kernel.dim == 0:
        return ()
    lag = min(float(cfg.level), span if math.isfinite(span) else cfg.level)
    hw = 6.0 * math.sqrt(2.0 * max(lag, 1.0))
    hw = math.ceil(hw * cfg.level) / cfg.level
    return ((-hw, hw),)


def _cmd_simulate(cp, outdir: Path, plot: bool) -> int:
    model = cfgmod.build_model(cp)
    cfg = cfgmod.build_sim_config(cp)
    mode = cfgmod._get(cp, "run", "mode", str, "moments")
    half = cfgmod._get(cp, "run", "box_half_width", float, None)
    box = ((-half, half),) if (half and model.kernel.dim) else _default_box(model, cfg, model.interval.span)
    grid = simulator.build_grid(model.interval.end, box, cfg.level, t_start=model.interval.start)

    if mode == "stationarity":
        shifts = cfgmod.parse_pairs(cfgmod._get(cp, "run", "shifts", str, "1:0"))
        report = simulator.stationarity_probe(model, shifts, cfg, grid=grid)
        (outdir / "report.txt").write_text(report.to_text() + "\n")
        with open(outdir / "report.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["statistic", "base", "shifted", "z"])
            writer.writeheader()
            writer.writerows(report.records_rows())
        return EXIT_OK
    if mode == "continuity":
        node = (cfgmod._get(cp, "run", "probe_t", float, model.interval.end), cfgmod._get(cp, "run", "probe_x", float, 0.0))
        offsets = cfgmod.parse_pairs(cfgmod._get(cp, "run", "offsets", str, "0.5:0,0.25:0"))
        est, ses = simulator.continuity_probe(model, node, offsets, cfg, grid=grid)
        with open(outdir / "report.csv", "w", newline="") as fh:
            fh.write("offset_t,offset_x,estimate,se\n")
            for (ot, ox), e, s in zip(offsets, est, ses):
                fh.write(f"{float(ot)!r},{float(ox)!r},{float(e)!r},{float(s)!r}\n")
        (outdir / "report.txt").write_text(
            "\n".join(
                f"offset ({ot:g},{ox:g}): E|dY|^p = {float(e)!r} +- {float(s)!r}" for (ot, ox), e, s in zip(offsets, est, ses)
            )
            + "\n"
        )
        return EXIT_OK

    probes = None
    pt = cfgmod._get(cp, "run", "probe_t", str, None)
    if pt is not None:
        ts = [float(v) for v in str(pt).split(",")]
        xs = [float(v) for v in str(cfgmod._get(cp, "run", "probe_x", str, "0.0")).split(",")]
        if len(xs) == 1:
            xs = xs * len(ts)
        probes = list(zip(ts, xs))
    try:
        ens = simulator.estimate_moments(model, grid, cfg, probe_nodes=probes)
    except simulator.SimulationDivergence as exc:
        with open(outdir / "trace.csv", "w") as fh:
            fh.write("iteration,residual\n")
            for i, r in enumerate(exc.residuals, start=1):
                fh.write(f"{i},{float(r)!r}\n")
        (outdir / "report.txt").write_text(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    bound_vals = None
    bound_note = "moment bound: not computed"
    if cfgmod._get(cp, "run", "with_moment_bound", bool, True):
        try:
            bound = volterra.moment_bound(model, grid=grid.times)
            bound_vals = bound.values
            bound_note = f"moment bound sup: {float(bound.sup())!r}"
        except (ContractionFailure, ValueError) as exc:
            bound_note = f"moment bound unavailable: {exc}"
    ens.to_csv(outdir / "moments.csv", bound=bound_vals)
    if ens.probe_values is not None:
        with open(outdir / "paths.csv", "w") as fh:
            fh.write("replicate,t,x,value\n")
            for r in range(ens.probe_values.shape[0]):
                for k, (i, j) in enumerate(ens.probe_nodes):
                    fh.write(f"{r},{float(ens.times[i])!r},{float(ens.corners[j])!r},{float(ens.probe_values[r, k])!r}\n")
    lines = [
        f"moment estimation: p={ens.p}, replicates={ens.replicates}, seed={ens.seed}",
        f"estimable: {ens.estimable}",
        f"weighted sup statistic: {float(ens.sup_stat)!r} (se {float(ens.sup_se)!r})",
        bound_note,
    ]
    (outdir / "report.txt").write_text("\n".join(lines) + "\n")
    if plot and ens.estimable:
        plots.render_moments(
            ens.times,
            ens.corners,
            ens.estimates,
            ens.ses,
            outdir / "moments.png",
            bound=None if bound_vals is None else np.asarray(bound_vals) ** max(ens.p, 1.0),
        )
    return EXIT_OK


def _cmd_stability(cp, outdir: Path, plot: bool) -> int:
    model = cfgmod.build_model(cp)
    report = wellposedness.check_asymptotic_stability(model)
    extra = ""
    gam, c2 = model.sigma.growth_data()
    if gam < 1.0 and report.passed:
        terms, invp, _ = wellposedness._stability_terms(model)
        theta = sum((t.total_mass()) ** invp for t in terms)
        problem = volterra.moment_bound_problem(model)
        force = problem.force if not callable(problem.force) else float(np.max(problem.force(np.array([model.interval.end]))))
        a = volterra.stability_fixed_point(float(force), theta, gam)
        extra = f"fractional-growth sup bound: a = {float(a)!r} (force {float(force)!r}, theta {float(theta)!r}, gamma {float(gam)!r})"
    _write_report(outdir, [report], extra=extra)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_reproduce(cp, outdir: Path, plot: bool, name: str) -> int:
    handler = cfgmod._get(cp, "run", "command", str, "check")
    if name.startswith("ex4_1") or handler == "exp-family":
        lam = cfgmod._get(cp, "kernel", "rate", float, 2.0)
        alpha = cfgmod._get(cp, "run", "alpha_force", float, None)
        fam = volterra.exp_kernel_family(lam, alpha)
        lines = [f"exponential-kernel equation, rate {lam:g}" + (f", force exponent {alpha:g}" if alpha is not None else "")]
        lines.append(fam.describe())
        lines.append(f"bounded-unique: {fam.bounded_unique}")
        if fam.exists and fam.bounded_unique and alpha is None:
            problem = volterra.VolterraProblem(
                terms=(volterra.VolterraTerm(kernel=cfgmod.build_kernel(cp)),),
                force=1.0,
                t_end=0.0,
                t_start=None,
            )
            fld, trace = volterra.picard_solve(problem, tol=1e-10)
            lines.append(f"fixed point by iteration: {float(fld.values[-1])!r} ({trace.iterations} iterations)")
        text = "\n".join(lines)
        (outdir / "report.txt").write_text(text + "\n")
        print(text)
        return EXIT_OK if fam.exists else EXIT_CHECK_FAILED
    if handler == "check":
        code = _cmd_check(cp, outdir, plot)
    elif handler == "volterra":
        code = _cmd_volterra(cp, outdir, plot)
    elif handler == "simulate":
        code = _cmd_simulate(cp, outdir, plot)
    elif handler == "stability":
        code = _cmd_stability(cp, outdir, plot)
    else:
        raise ConfigError(f"unknown preset command {handler!r}")
    expected = cfgmod._get(cp, "run", "expected_verdict", str, None)
    if expected:
        got = "pass" if code == EXIT_OK else "fail"
        (outdir / "report.txt").open("a").write(f"expected verdict: {expected}; observed: {got}\n")
    return code


def preset_path(name: str):
    slug = name.replace(".", "_").replace("-", "_")
    ref = resources.files("lvx") / "presets" / f"{slug}.ini"
    if not ref.is_file():
        raise ConfigError(f"unknown example preset {name!r}")
    return ref


def main(argv: Optional[List[str]] = None) -> int:
    parser = _Parser(prog="lvx", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=["check", "volterra", "simulate", "stability", "reproduce-example"])
    parser.add_argument("config", help="config file path, or preset name for reproduce-example")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE")
    parser.add_argument("--out", default=None, help="output directory (default: [run] out or ./out)")
    parser.add_argument("--seed", type=int, default=None, help="override the base seed")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="exponential kernel rate shortcut")
    parser.add_argument("--plot", dest="plot", action="store_true", default=True)
    parser.add_argument("--no-plot", dest="plot", action="store_false")
    try:
        args = parser.parse_args(argv)
        if args.command == "reproduce-example":
            path = preset_path(args.config)
            with resources.as_file(path) as p:
                cp = cfgmod.load_config(p)
        else:
            cp = cfgmod.load_config(args.config)
        if args.lam is not None:
            args.overrides.append(f"kernel.rate={args.lam}")
        cfgmod.apply_overrides(cp, args.overrides)
        if args.seed is not None:
            if not cp.has_section("run"):
                cp.add_section("run")
            cp.set("run", "seed", str(args.seed))
        outdir = Path(args.out or cfgmod._get(cp, "run", "out", str, "out"))
        outdir.mkdir(parents=True, exist_ok=True)
        if args.command == "check":
            return _cmd_check(cp, outdir, args.plot)
        if args.command == "volterra":
            return _cmd_volterra(cp, outdir, args.plot)
        if args.command == "simulate":
            return _cmd_simulate(cp, outdir, args.plot)
        if args.command == "stability":
            return _cmd_stability(cp, outdir, args.plot)
        return _cmd_reproduce(cp, outdir, args.plot, args.config.replace(".", "_").replace("-", "_"))
    except ConfigError as exc:
        print(f"lvx: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"lvx: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
