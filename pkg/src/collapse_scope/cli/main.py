"""``collapse-scope`` command line.

Each subcommand reads one config, writes one primary output file plus a
``<name>_manifest.json`` next to it. Exit codes: 0 success, 1 usage or input
error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..amplification import effective_rate
from ..analysis import (classicality_bound, exclusion_scan, graphene_disk, macroscopicity,
                        macroscopicity_forecast, synthetic_fringes)
from ..analysis.synthetic import RNG_NAME
from ..analysis.validity import region_rT, region_ru, tau_C_limit, tau_margin
from ..cdcsl import verification_report
from ..core import CollapseParams, DomainError, Model, NumericalError, require_valid
from ..kernels import d_function
from ..talbot import pattern
from . import io
from .config import RunConfig, load_config

log = logging.getLogger("collapse_scope")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _params(cfg: RunConfig, args) -> CollapseParams:
    p = cfg.model
    if getattr(args, "model", None):
        p = CollapseParams(Model.parse(args.model), p.lam, p.r_C, p.T, p.u, p.tau_C)
    p = p.for_model(p.model)
    require_valid(p)
    return p


def _scan(cfg: RunConfig, args):
    s = cfg.scan
    if getattr(args, "rc_points", None) is not None:
        if args.rc_points < 1:
            raise UsageError("--rc-points must be >= 1")
        s = replace(s, rc_points=args.rc_points)
    if getattr(args, "criterion", None) is not None:
        if not args.criterion > 0:
            raise UsageError("--criterion must be > 0")
        s = replace(s, criterion=args.criterion)
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise UsageError("--seed must be >= 0")
        s = replace(s, seed=args.seed)
    if getattr(args, "lambda_min", None) is not None:
        s = replace(s, lambda_min=args.lambda_min)
    return s


def _prefactor(cfg: RunConfig, p: CollapseParams) -> float:
    return cfg.prefactor if cfg.prefactor is not None else effective_rate(cfg.molecule, p).Lambda


def cmd_pattern(cfg, args, scan):
    p = _params(cfg, args)
    spec, mol = cfg.experiment, cfg.molecule
    x = np.arange(scan.n_points) * scan.periods * spec.d / scan.n_points
    res = pattern(spec, mol, p, x, scan.order, prefactor=_prefactor(cfg, p))
    ref = pattern(spec, mol, p, x, scan.order, prefactor=0.0)
    s0 = res.coefficient(0).real
    rows = [(xi, si / s0) for xi, si in zip(x, res.S)]
    extra = {"visibility": res.visibility, "visibility_quantum": ref.visibility, "prefactor_per_s": res.prefactor,
             "series_order": int(res.orders.max())}
    return ("pattern", ("x_m", "intensity_over_mean"), rows, extra)


def _d_variants(cfg: RunConfig, args):
    base = cfg.model
    out = [("csl", CollapseParams(Model.CSL, base.lam, base.r_C))]
    if base.tau_C is not None:
        out.append(("ccsl", CollapseParams(Model.CCSL, base.lam, base.r_C, tau_C=base.tau_C)))
    if base.T is not None and base.u is not None:
        out.append((f"dcsl_T{base.T!r}K_ux{base.u[0]!r}mps",
                    CollapseParams(Model.DCSL, base.lam, base.r_C, T=base.T, u=base.u)))
    for T, u in cfg.dcsl_variants:
        out.append((f"dcsl_T{T!r}K_ux{u!r}mps", CollapseParams(Model.DCSL, base.lam, base.r_C, T=T, u=(u, 0.0, 0.0))))
    if getattr(args, "model", None):
        wanted = Model.parse(args.model).value
        out = [v for v in out if v[0].startswith(wanted)]
        if not out:
            raise UsageError(f"config defines no {wanted} variant")
    return out


def cmd_dfunction(cfg, args, scan):
    spec, mol = cfg.experiment, cfg.molecule
    x = np.linspace(0.0, scan.x_max, scan.x_points)
    variants = _d_variants(cfg, args)
    columns, curves, prefactors = ["x_m"], [], {}
    for name, p in variants:
        require_valid(p)
        pref = _prefactor(cfg, p)
        prefactors[name] = pref
        columns.append(f"absD_{name}")
        curves.append(np.abs(d_function(x, spec, p, pref, mol.mass)))
    rows = [(xi, *(c[i] for c in curves)) for i, xi in enumerate(x)]
    asym = {n: math.exp(-pf * (spec.t1 + spec.t2)) for n, pf in prefactors.items()}
    return ("dfunction", tuple(columns), rows, {"prefactor_per_s": prefactors, "asymptote": asym})


def _fringe_data(cfg, args, scan):
    path = Path(args.data) if getattr(args, "data", None) else cfg.data_path()
    if path is not None:
        return io.load_fringe_csv(path), str(path)
    data = synthetic_fringes(cfg.experiment, cfg.molecule, n_points=scan.n_points, periods=scan.periods,
                             mean_count=scan.mean_count, visibility_uncertainty=scan.visibility_uncertainty,
                             seed=scan.seed, N=scan.order)
    return data, data.source


def cmd_exclusion(cfg, args, scan):
    p = _params(cfg, args)
    data, source = _fringe_data(cfg, args, scan)
    curve = exclusion_scan(cfg.experiment, cfg.molecule, p, data, scan.r_C_grid, scan.criterion, N=scan.order,
                           classicality_object=graphene_disk(scan.classicality_radius),
                           classicality_time=scan.classicality_time)
    rows = list(zip(curve.r_C_grid, curve.lambda_min, curve.lambda_low, curve.regimes, curve.fully_excluded))
    return ("exclusion", ("r_C_m", "lambda_min_per_s", "lambda_low_per_s", "regime", "fully_excluded"), rows,
            {"data_source": source, "model": p.model.value, "criterion_delta_chi2": scan.criterion})


def cmd_classicality(cfg, args, scan):
    grid = scan.r_C_grid
    low = classicality_bound(graphene_disk(scan.classicality_radius), scan.classicality_time, grid)
    return ("classicality", ("r_C_m", "lambda_low_per_s"), list(zip(grid, low)),
            {"object": f"graphene disk radius {scan.classicality_radius!r} m",
             "localization_time_s": scan.classicality_time})


def cmd_macroscopicity(cfg, args, scan):
    if scan.lambda_min is None:
        raise UsageError("macroscopicity needs --lambda-min or [scan] lambda_min")
    mu = macroscopicity(scan.lambda_min)
    t = cfg.experiment.t1 + cfg.experiment.t2
    forecast = macroscopicity_forecast(t, cfg.molecule.mass, 1.0 / math.e, electron_offset=True)
    return ("macroscopicity", ("lambda_min_per_s", "mu"), [(scan.lambda_min, mu)],
            {"forecast_mu_at_flight_time": forecast, "flight_time_s": t})


def cmd_validity(cfg, args, scan):
    spec, mol = cfg.experiment, cfg.molecule
    dx = scan.delta_x if scan.delta_x is not None else spec.d
    flight = spec.t1 + spec.t2
    grid = args.grid
    T_grid = np.logspace(math.log10(scan.t_min), math.log10(scan.t_max), scan.t_points)
    if grid == "rT":
        rows = region_rT(mol.mass, dx, flight, scan.r_C_grid, T_grid, scan.threshold)
        cols = ("r_C_m", "T_K", "margin_first", "margin_second", "region")
    elif grid == "ru":
        u_grid = np.logspace(math.log10(scan.u_min), math.log10(scan.u_max), scan.u_points)
        rows = region_ru(dx, scan.r_C_grid, u_grid, scan.threshold)
        cols = ("r_C_m", "u_x_mps", "T_min_K")
    else:
        rows = [(float(T), float(tau_C_limit(T, 1.0)), float(tau_C_limit(T, scan.threshold))) for T in T_grid]
        cols = ("T_sys_K", "tau_C_margin1_s", "tau_C_threshold_s")
    extra = {"delta_x_m": dx, "flight_time_s": flight, "threshold": scan.threshold, "grid": grid,
             "system_temperature_K": scan.system_temperature}
    if cfg.model.tau_C is not None:
        extra["tau_C_margin"] = float(tau_margin(cfg.model.tau_C, scan.system_temperature))
    return (f"validity_{grid}", cols, rows, extra)


def cmd_verify_cdcsl(cfg, args, scan):
    p = cfg.model
    if p.T is None:
        raise UsageError("verify-cdcsl needs a noise temperature: set [model] T")
    lam = p.lam if p.lam > 0 else 1e-8
    report = verification_report(cfg.molecule.mass, p.r_C, p.T, lam)
    return ("verify_cdcsl", None, report, {})


def cmd_synth_data(cfg, args, scan):
    p = _params(cfg, args)
    data = synthetic_fringes(cfg.experiment, cfg.molecule, p, n_points=scan.n_points, periods=scan.periods,
                             mean_count=scan.mean_count, visibility_uncertainty=scan.visibility_uncertainty,
                             seed=scan.seed, N=scan.order)
    return ("fringes", io.FRINGE_COLUMNS, data.rows, {"source": data.source})


COMMANDS = {
    "pattern": (cmd_pattern, "fringe pattern over whole periods"),
    "dfunction": (cmd_dfunction, "|D(x)| for each configured model variant"),
    "exclusion": (cmd_exclusion, "lambda_min(r_C) from fringe data"),
    "classicality": (cmd_classicality, "classicality lower bound lambda_low(r_C)"),
    "macroscopicity": (cmd_macroscopicity, "macroscopicity of a bound lambda_min"),
    "validity": (cmd_validity, "validity-domain grids for the dissipative and coloured models"),
    "verify-cdcsl": (cmd_verify_cdcsl, "numerical checks of the Gibbs-stationary jump operator"),
    "synth-data": (cmd_synth_data, "seeded synthetic fringe data"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collapse-scope", description="Collapse-model bounds from matter-wave interferometry.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", required=True, help="config file, or preset name (kdtl, dcompare)")
        sp.add_argument("--out", help="output directory (default: [output] directory)")
        sp.add_argument("--model", choices=[m.value for m in Model])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--rc-points", type=int)
        sp.add_argument("--criterion", type=float, help="delta chi-square threshold")
        sp.add_argument("--lambda-min", type=float, help="collapse rate bound in 1/s")
        if name == "exclusion":
            sp.add_argument("--data", help="fringe CSV (overrides [scan] data)")
        if name == "validity":
            sp.add_argument("--grid", choices=("rT", "ru", "tau"), default="rT")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = load_config(args.config)
        scan = _scan(cfg, args)
        cfg = replace(cfg, scan=scan)
        stem, columns, payload, extra = COMMANDS[args.command][0](cfg, args, scan)
        out_dir = Path(args.out or cfg.output.directory)
        out_dir.mkdir(parents=True, exist_ok=True)
        comments = [f"collapse-scope {args.command}", f"config_sha256={cfg.sha256}"]
        if columns is None:
            primary = io.write_json(out_dir / f"{stem}.json", payload)
        elif cfg.output.format == "json":
            primary = io.write_curve_json(out_dir / f"{stem}.json", columns, payload, comments)
        else:
            primary = io.write_curve_csv(out_dir / f"{stem}.csv", columns, payload, comments)
        uses_rng = args.command in ("synth-data", "exclusion")
        man = io.manifest(args.command, cfg, seed=scan.seed if uses_rng else None,
                          rng=RNG_NAME if uses_rng else None, outputs=[primary.name],
                          wall_time=time.perf_counter() - start, extra=extra)
        io.write_json(out_dir / f"{stem}_manifest.json", man)
    except (UsageError, DomainError, OSError) as exc:
        print(f"collapse-scope: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, FloatingPointError, ArithmeticError) as exc:
        print(f"collapse-scope: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    log.info("wrote %s", primary)
    print(primary)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
