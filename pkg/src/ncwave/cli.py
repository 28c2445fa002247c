"""Command-line front end.

Exit codes: 0 success, 1 a check failed (or a run did not complete), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import bhnum, clgeom, symcheck, waveops
from .ncalg import ModelConfig, ParseError, format_expr, parse

PHYS_KEYS = ("gamma", "lambda_p", "c", "omega", "l")


class UsageError(Exception):
    pass


# -- output helpers -----------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def emit_table(columns, rows, out_path=None, json_path=None, meta=None, stdout=None) -> None:
    """Write ``rows`` as CSV (17 significant digits) and optionally a JSON mirror."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    if json_path:
        doc = {"columns": list(columns), "rows": [[_jsonable(v) for v in row] for row in rows]}
        if meta:
            doc["meta"] = meta
        with open(json_path, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def emit_mapping(values: dict, json_path=None, stdout=None) -> None:
    out = stdout or sys.stdout
    for key, val in values.items():
        out.write(f"{key}={_fmt(val)}\n")
    if json_path:
        with open(json_path, "w") as fh:
            json.dump({k: _jsonable(v) for k, v in values.items()}, fh, indent=1, sort_keys=True)
            fh.write("\n")


# -- argument handling --------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, physics: bool = True, output: bool = True) -> None:
    p.add_argument("--config", help="JSON file of flag values (keys are flag names)")
    if physics:
        g = p.add_argument_group("physical parameters")
        g.add_argument("--gamma", type=float, help="Schwarzschild radius (default 1)")
        g.add_argument("--lambda-p", dest="lambda_p", type=float, help="Planck-scale time (default 0.1)")
        g.add_argument("--c", type=float, help="speed of light (default 1)")
        g.add_argument("--omega", type=float, help="mode frequency (default 1)")
        g.add_argument("--l", type=int, help="angular momentum (default 0)")
    if output:
        p.add_argument("--out", help="write CSV here instead of stdout")
        p.add_argument("--json", dest="json_path", metavar="PATH", help="also write a JSON mirror")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncwave", description="Noncommutative black-hole wave operator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symcheck", help="run the exact identity suites")
    _add_common(p, physics=False, output=False)
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--cases", type=int, help="random cases per suite (default 200)")
    p.add_argument("--json", dest="json_path", metavar="PATH", help="write a JSON report")

    p = sub.add_parser("ricci", help="Ricci components of -F dt^2 + H dr^2 + r^2 dOmega^2")
    _add_common(p, physics=False, output=False)
    p.add_argument("--F", dest="F", help="time-time function, e.g. '1-gam/r'")
    p.add_argument("--H", dest="H", help="radial function, e.g. '1/(1-gam/r)'")
    p.add_argument("--check", choices=["ricci-flat", "einstein", "none"], help="which check sets the exit code (default ricci-flat)")
    p.add_argument("--json", dest="json_path", metavar="PATH", help="write a JSON report")

    p = sub.add_parser("dfield", help="tabulate D(omega, r)")
    _add_common(p)
    p.add_argument("--r-min", dest="r_min", type=float, help="first radius (default 0.1)")
    p.add_argument("--r-max", dest="r_max", type=float, help="last radius (default 5)")
    p.add_argument("--n", type=int, help="number of radii (default 200)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")

    p = sub.add_parser("solve", help="integrate the radial equation across one region")
    _add_common(p)
    p.add_argument("--preset", choices=sorted(bhnum.PRESETS), help="named run")
    p.add_argument("--region", choices=list(bhnum.REGIONS), help="region to solve in")
    p.add_argument("--r-min", dest="r_min", type=float, help="inner grid end")
    p.add_argument("--r-max", dest="r_max", type=float, help="outer grid end")
    p.add_argument("--bc-location", dest="bc_location", choices=["left", "right"], help="where psi, psi' are imposed")
    p.add_argument("--psi0", type=complex, help="boundary value of psi")
    p.add_argument("--dpsi0", type=complex, help="boundary value of psi'")
    p.add_argument("--n-points", dest="n_points", type=int, help="uniform grid size")
    p.add_argument("--rtol", type=float, help="relative tolerance")
    p.add_argument("--atol", type=float, help="absolute tolerance (relative to boundary amplitude)")
    p.add_argument("--cap", type=float, help="divergence cap relative to boundary amplitude")
    p.add_argument("--classical", action="store_true", default=None, help="set lambda_p = 0")

    p = sub.add_parser("redshift", help="tabulate 1+z(r) or report the maximum redshift")
    _add_common(p)
    p.add_argument("--r-min", dest="r_min", type=float, help="first radius (default 1.5 gamma)")
    p.add_argument("--r-max", dest="r_max", type=float, help="last radius (default 10 gamma)")
    p.add_argument("--n", type=int, help="number of radii (default 100)")
    p.add_argument("--zmax", action="store_true", default=None, help="print z_max and its small-x asymptote")

    p = sub.add_parser("cycles", help="count interior standing-wave cycles over omega/nu")
    _add_common(p, physics=False)
    p.add_argument("--gamma", type=float, help="Schwarzschild radius (default 1)")
    p.add_argument("--c", type=float, help="speed of light (default 1)")
    p.add_argument("--omega-lambda", dest="omega_lambda", type=float, help="fixed omega*lambda_p (default 1)")
    p.add_argument("--ratios", help="comma-separated omega/nu values (default 16)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")

    p = sub.add_parser("deficit", help="harmonic wavelength deficit and accumulation length")
    _add_common(p, output=False)
    p.add_argument("--n", type=int, help="harmonic number (default 10)")
    p.add_argument("--r", type=float, help="emission radius (default 10 gamma)")
    p.add_argument("--json", dest="json_path", metavar="PATH", help="write a JSON report")

    p = sub.add_parser("apply", help="apply a symbolic operator to an expression")
    _add_common(p, physics=False, output=False)
    p.add_argument("--expr", help="expression in x1,x2,x3,r,t,lam,gam,dx1,dx2,dx3,dt,th")
    p.add_argument("--op", choices=["normal", "d", "d-formula", "box", "assembled", "delta0", "partial0", "tau"], help="operator (default normal)")
    p.add_argument("--beta", help="calculus parameter beta (default 1)")
    p.add_argument("--drift", help="drift q(r) for the flat+drift geometry")
    p.add_argument("--geometry", choices=list(waveops.GEOMETRIES), help="geometry for --op assembled (default flat)")
    p.add_argument("--json", dest="json_path", metavar="PATH", help="write a JSON report")
    return parser


DEFAULTS = {
    "gamma": 1.0,
    "lambda_p": 0.1,
    "c": 1.0,
    "omega": 1.0,
    "l": 0,
    "seed": 0,
    "cases": 200,
    "check": "ricci-flat",
    "n": None,
    "jobs": 1,
    "op": "normal",
    "geometry": "flat",
    "omega_lambda": 1.0,
    "ratios": "16",
}


def merge_config(args: argparse.Namespace, parser_dests: set) -> argparse.Namespace:
    """Fill unset flags from ``--config``; explicit flags always win."""
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in doc.items():
            dest = key.lstrip("-").replace("-", "_")
            if dest not in parser_dests or dest in ("config", "command"):
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, dest) is None:
                setattr(args, dest, val)
    for key, val in DEFAULTS.items():
        if key in parser_dests and getattr(args, key, None) is None:
            setattr(args, key, val)
    return args


def _phys(args, **overrides) -> bhnum.PhysParams:
    values = {k: getattr(args, k) for k in PHYS_KEYS if hasattr(args, k)}
    values.update(overrides)
    try:
        values = {k: (int(v) if k == "l" else float(v)) for k, v in values.items() if v is not None}
        return bhnum.PhysParams(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


# -- subcommands --------------------------------------------------------------

def cmd_symcheck(args, out) -> int:
    results = symcheck.run_all(seed=int(args.seed), n_cases=int(args.cases))
    ok = True
    report = {}
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        ok &= res.ok
        out.write(f"{res.name:20s} {res.passed}/{res.total}  {status}\n")
        report[res.name] = {"passed": res.passed, "total": res.total}
    out.write(f"{'ALL':20s} {'PASS' if ok else 'FAIL'}\n")
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return 0 if ok else 1


def cmd_ricci(args, out) -> int:
    if args.F is None or args.H is None:
        raise UsageError("ricci needs --F and --H")
    try:
        F, H = clgeom.ratfn(args.F), clgeom.ratfn(args.H)
        comps = clgeom.ricci_static4(F, H)
        residual = clgeom.einstein_residual(H)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None
    flat = comps.is_zero()
    einstein = residual.is_zero()
    out.write(f"c_ang = {comps.c_ang}\nc_rr = {comps.c_rr}\nc_tt = {comps.c_tt}\n")
    out.write(f"einstein_residual = {residual}\n")
    triple = ", ".join(str(c) for c in comps.as_tuple())
    out.write(f"({triple})  RICCI-FLAT: {'PASS' if flat else 'FAIL'}\n")
    out.write(f"spatial slice EINSTEIN: {'PASS' if einstein else 'FAIL'}\n")
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(
                {"c_ang": str(comps.c_ang), "c_rr": str(comps.c_rr), "c_tt": str(comps.c_tt),
                 "einstein_residual": str(residual), "ricci_flat": flat, "einstein": einstein},
                fh, indent=1, sort_keys=True,
            )
            fh.write("\n")
    if args.check == "ricci-flat":
        return 0 if flat else 1
    if args.check == "einstein":
        return 0 if einstein else 1
    return 0


def _dfield_row(job):
    omega, r, params = job
    try:
        d = bhnum.dfield(omega, r, params)
    except ValueError:
        return (r, math.nan, math.nan)
    return (r, d.real, d.imag)


def _pool_map(fn, jobs, n_workers):
    if n_workers and n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_dfield(args, out) -> int:
    params = _phys(args)
    r_min = args.r_min if args.r_min is not None else 0.1 * params.gamma or 0.1
    r_max = args.r_max if args.r_max is not None else 5 * params.gamma or 5.0
    n = args.n if args.n is not None else 200
    if not (0 < r_min < r_max) or n < 2:
        raise UsageError("need 0 < r-min < r-max and n >= 2")
    rs = np.linspace(r_min, r_max, n)
    rows = _pool_map(_dfield_row, [(params.omega, float(r), params) for r in rs], int(args.jobs))
    rows.sort(key=lambda row: row[0])
    emit_table(["r", "re_D", "im_D"], rows, args.out, args.json_path, meta=_meta(params), stdout=out)
    return 0


def _meta(params: bhnum.PhysParams) -> dict:
    return {k: getattr(params, k) for k in PHYS_KEYS}


def cmd_solve(args, out) -> int:
    if args.preset:
        preset = bhnum.PRESETS[args.preset]
        params = preset.params
        spec = preset.spec
        overrides = {k: getattr(args, k) for k in PHYS_KEYS if getattr(args, k) is not None}
        if overrides:
            params = params.replace(**overrides)
    else:
        params = _phys(args)
        if args.region is None or args.r_min is None or args.r_max is None:
            raise UsageError("solve needs --preset, or --region with --r-min and --r-max")
        spec = bhnum.RegionSpec(args.region, float(args.r_min), float(args.r_max))
    changes = {}
    for flag, field_name in (("region", "region"), ("r_min", "r_min"), ("r_max", "r_max"),
                             ("bc_location", "bc_location"), ("psi0", "bc_value"), ("dpsi0", "bc_slope"),
                             ("n_points", "n_points"), ("rtol", "rtol"), ("atol", "atol"), ("cap", "cap")):
        val = getattr(args, flag)
        if val is not None:
            if field_name in ("bc_value", "bc_slope"):
                val = complex(val)
            elif field_name == "n_points":
                val = int(val)
            elif field_name not in ("region", "bc_location"):
                val = float(val)
            changes[field_name] = val
    spec = replace(spec, **changes)
    if args.classical:
        params = params.replace(lambda_p=0.0)
    try:
        sol = bhnum.solve_region(spec, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [
        (r, p.real, p.imag, abs(p), d.real, d.imag) for r, p, d in zip(sol.r, sol.psi, sol.dpsi)
    ]
    meta = _meta(params)
    meta.update(region=spec.region, status=sol.status, diverged=sol.diverged,
                error_estimate=_jsonable(sol.error_estimate))
    emit_table(["r", "re_psi", "im_psi", "abs_psi", "re_dpsi", "im_dpsi"], rows, args.out, args.json_path, meta, stdout=out)
    diag = bhnum.diagnostics(sol)
    sys.stderr.write(
        f"status={sol.status} diverged={sol.diverged} error_estimate={sol.error_estimate:.3g} "
        f"zero_crossings={len(diag.zero_crossings)} cycle_count={diag.cycle_count} "
        f"max_amplitude={diag.max_amplitude:.6g}\n"
    )
    return 0 if sol.status in ("ok", "diverged") else 1


def cmd_redshift(args, out) -> int:
    params = _phys(args)
    if args.zmax:
        try:
            opz = bhnum.one_plus_zmax(params.omega, params)
        except (ValueError, OverflowError) as exc:
            raise UsageError(str(exc)) from None
        x = params.omega * params.lambda_p
        emit_mapping({"one_plus_zmax": opz, "zmax": opz - 1, "small_x_asymptote": math.sqrt(2 / x)}, args.json_path, out)
        return 0
    gam = params.gamma
    r_min = args.r_min if args.r_min is not None else 1.5 * gam
    r_max = args.r_max if args.r_max is not None else 10 * gam
    n = args.n if args.n is not None else 100
    rows = []
    for r in np.linspace(r_min, r_max, n):
        try:
            rows.append((float(r), bhnum.one_plus_z(params.omega, float(r), params)))
        except ValueError as exc:
            raise UsageError(f"r={r}: {exc}") from None
    emit_table(["r", "one_plus_z"], rows, args.out, args.json_path, _meta(params), stdout=out)
    return 0


def _cycles_row(job):
    ratio, x, gamma, c = job
    omega = ratio * c / gamma
    params = bhnum.PhysParams(gamma=gamma, lambda_p=x / omega, c=c, omega=omega)
    hi = bhnum.region_bounds("interior", omega, params)[1]
    spec = bhnum.RegionSpec("interior", bhnum.INSET * gamma, hi * (1 - bhnum.INSET), "left", 0.0, 1.0, estimate_error=False)
    sol = bhnum.solve_region(spec, params)
    diag = bhnum.diagnostics(sol)
    return (ratio, omega, params.lambda_p, diag.cycle_count, len(diag.zero_crossings))


def cmd_cycles(args, out) -> int:
    gamma = float(args.gamma if args.gamma is not None else 1.0)
    c = float(args.c if args.c is not None else 1.0)
    try:
        ratios = [float(v) for v in str(args.ratios).split(",") if v.strip()]
    except ValueError:
        raise UsageError("--ratios must be comma-separated numbers") from None
    if not ratios or gamma <= 0 or c <= 0 or float(args.omega_lambda) <= 0:
        raise UsageError("need gamma > 0, c > 0, omega-lambda > 0 and at least one ratio")
    jobs = [(r, float(args.omega_lambda), gamma, c) for r in ratios]
    rows = sorted(_pool_map(_cycles_row, jobs, int(args.jobs)))
    emit_table(["omega_over_nu", "omega", "lambda_p", "cycle_count", "zero_crossings"], rows, args.out, args.json_path, stdout=out)
    return 0


def cmd_deficit(args, out) -> int:
    params = _phys(args)
    n = int(args.n if args.n is not None else 10)
    r = float(args.r if args.r is not None else 10 * params.gamma)
    try:
        res = bhnum.harmonic_shift(params.omega, n, r, params)
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from None
    emit_mapping(
        {
            "deficit_exact": res.deficit_exact,
            "deficit_first_order": res.deficit_first_order,
            "deficit_weak_field": res.deficit_weak_field,
            "accumulation_length": res.accumulation_length,
            "accumulation_length_exact": res.accumulation_length_exact,
        },
        args.json_path,
        out,
    )
    return 0


def cmd_apply(args, out) -> int:
    if not args.expr:
        raise UsageError("apply needs --expr")
    try:
        beta = parse(args.beta) if args.beta else None
        drift = parse(args.drift) if args.drift else None
        model = ModelConfig(beta=beta if beta is not None else ModelConfig().beta, drift=drift)
        value = parse(args.expr, model)
    except ParseError as exc:
        raise UsageError(f"parse error: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    op = args.op
    from .ncalg import AlgebraElement, tau

    if op != "normal" and not isinstance(value, AlgebraElement):
        raise UsageError(f"--op {op} needs a function, not a 1-form")
    try:
        if op == "normal":
            result = value
        elif op == "d":
            result = waveops.exterior_d(value, model)
        elif op == "d-formula":
            result = waveops.exterior_d_formula(value, model)
        elif op == "box":
            result = waveops.wave_extract(value, model).box
        elif op == "assembled":
            result = waveops.wave_assembled(value, model, args.geometry)
        elif op == "delta0":
            result = waveops.delta0(value, model)
        elif op == "partial0":
            result = waveops.partial0(value)
        else:
            result = tau(value)
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(str(exc)) from None
    text = format_expr(result)
    out.write(text + "\n")
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump({"op": op, "expr": args.expr, "result": text}, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return 0


COMMANDS = {
    "symcheck": cmd_symcheck,
    "ricci": cmd_ricci,
    "dfield": cmd_dfield,
    "solve": cmd_solve,
    "redshift": cmd_redshift,
    "cycles": cmd_cycles,
    "deficit": cmd_deficit,
    "apply": cmd_apply,
}


def main(argv=None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in sub._actions}
    out = stdout or sys.stdout
    try:
        args = merge_config(args, dests)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        sys.stderr.write(f"ncwave {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
