"""Scenario-driven command-line front end.

Commands: ``verify-reilly``, ``eig {closed|boundary|steklov|wentzell}``,
``audit {heintze-karcher|minkowski|eigen-bounds|schur}``, ``converge``,
``catalog``, plus ``run`` to execute a scenario file.  A scenario file is
TOML whose keys mirror the command-line flags; flags given on the command
line override file values.

Exit codes: 0 all checks pass, 1 at least one check fails, 2 input or
hypothesis error (bad flags, parse errors, unmet audit hypotheses).
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

import numpy as np

from . import audits, catalog, hypersurface, integrate, reilly, report, spectral
from .chart import ScalarField
from .errors import DriftgeoError, InvalidTarget, ScenarioError
from .expr import parse as parse_expr

VERSION = "0.1.0"

_EIG_FUNCS = {
    "closed": lambda m, beta: spectral.eigen_closed(m),
    "boundary": lambda m, beta: spectral.eigen_boundary_weighted(m),
    "steklov": lambda m, beta: spectral.eigen_steklov(m),
    "wentzell": lambda m, beta: spectral.eigen_wentzell(m, beta),
}


# ------------------------------------------------------------ geometry setup


def _grid_params(args, angular_factor: int = 1) -> dict:
    out = {}
    for key in ("n_theta", "n_phi"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val * angular_factor
    return out


def _make_geometry(args, size=None, angular_factor: int = 1):
    if not getattr(args, "geometry", None):
        raise ScenarioError("no geometry selected; pass --geometry (see `driftgeo catalog`)")
    phi_fn = parse_expr(args.phi) if getattr(args, "phi", None) else None
    V_fn = parse_expr(args.V) if getattr(args, "V", None) else None
    kwargs = _grid_params(args, angular_factor)
    try:
        return catalog.make(args.geometry, size=size or args.size,
                            phi_fn=phi_fn, V_fn=V_fn, **kwargs)
    except TypeError as exc:
        raise InvalidTarget(f"geometry {args.geometry!r} rejected parameters: {exc}") from None


def _expr_on_meshes(expression, domain):
    """Adapt an env-dict expression to positional-mesh callables."""

    def fn(*meshes):
        return expression(dict(zip(domain.names, meshes)))

    return fn


def _field_from_expr(m, text: str) -> ScalarField:
    expression = parse_expr(text)
    values = np.broadcast_to(
        np.asarray(expression(m.alias_fields()), dtype=float), m.domain.shape
    ).copy()
    return ScalarField(m.domain, values)


def _collect_params(args, names) -> dict:
    out = {}
    for name in names:
        val = getattr(args, name, None)
        if val is not None:
            out[name] = val
    return out


def _emit(args, payload: dict, csv_text: str | None, plot_text: str | None) -> None:
    if getattr(args, "json", None):
        report.write_json(args.json, payload)
    if getattr(args, "csv", None) and csv_text is not None:
        report.write_text(args.csv, csv_text)
    if getattr(args, "plot", None) and plot_text is not None:
        report.write_text(args.plot, plot_text)


# ------------------------------------------------------------ leaf commands


def _cmd_catalog(args) -> int:
    print("geometries:")
    for name in sorted(catalog.CATALOG):
        _, desc = catalog.CATALOG[name]
        print(f"  {name:<18} {desc}")
    print("hypersurfaces:")
    for name in sorted(hypersurface.HYPERSURFACES):
        _, desc = hypersurface.HYPERSURFACES[name]
        print(f"  {name:<18} {desc}")
    if args.json:
        payload = {
            "run": report.run_header("catalog", [], {}, VERSION),
            "audits": [],
            "geometries": sorted(catalog.CATALOG),
            "hypersurfaces": sorted(hypersurface.HYPERSURFACES),
        }
        report.write_json(args.json, payload)
    return 0


def _level_sizes(base: int, levels: int) -> list:
    sizes = [base]
    for _ in range(levels - 1):
        sizes.append(2 * sizes[-1] - 1)
    return sizes


def _reilly_levels(args):
    if not args.f:
        raise ScenarioError("verify-reilly needs a test field; pass --f EXPR")
    parse_expr(args.f)  # fail fast on syntax errors before building grids
    base = args.size or 9
    rows = []
    finest = None
    for level, size in enumerate(_level_sizes(base, args.levels)):
        m = _make_geometry(args, size=size, angular_factor=2 ** level)
        f = _field_from_expr(m, args.f)
        bd = reilly.reilly_term_breakdown(m, f)
        h = reilly.grid_parameter(m)
        rel = abs(bd.residual) / bd.scale if bd.scale > 0 else 0.0
        rows.append({
            "size": size,
            "h": h,
            "B_II": bd.B_II, "B_H": bd.B_H, "B_cross": bd.B_cross,
            "I_sq": bd.I_sq, "I_A": bd.I_A, "I_ric": bd.I_ric,
            "residual": bd.residual,
            "scale": bd.scale,
            "relative_residual": rel,
            "passes": bd.passes(h),
        })
        finest = m
    order = None
    if len(rows) >= 3:
        est = integrate.convergence_order(
            [abs(r["residual"]) for r in rows], 0.0, [r["h"] for r in rows]
        )
        order = float(est)
    return rows, order, finest


def _cmd_verify_reilly(args) -> int:
    rows, order, finest = _reilly_levels(args)
    print(f"{'size':>6} {'h':>12} {'residual':>14} {'scale':>14} {'rel':>12}  pass")
    for r in rows:
        print(f"{r['size']:>6} {r['h']:>12.6g} {r['residual']:>14.6g} "
              f"{r['scale']:>14.6g} {r['relative_residual']:>12.6g}  "
              f"{'yes' if r['passes'] else 'NO'}")
    if order is not None:
        print(f"estimated order: {order:.3f}")
    all_pass = all(r["passes"] for r in rows)
    print("verdict:", "PASS" if all_pass else "FAIL")

    params = _collect_params(args, ("f", "phi", "V"))
    params["levels"] = args.levels
    payload = {
        "run": report.run_header(args.geometry, finest.domain.resolution, params, VERSION),
        "audits": [],
        "levels": rows,
        "order": order,
        "verdict": "PASS" if all_pass else "FAIL",
    }
    csv_lines = ["size,h,residual,scale,relative_residual,passes"]
    for r in rows:
        csv_lines.append(",".join([
            str(r["size"]), report.format_float(r["h"]),
            report.format_float(r["residual"]), report.format_float(r["scale"]),
            report.format_float(r["relative_residual"]),
            "true" if r["passes"] else "false",
        ]))
    plot = report.plot_data([r["h"] for r in rows], [abs(r["residual"]) for r in rows])
    _emit(args, payload, "\n".join(csv_lines) + "\n", plot)
    return 0 if all_pass else 1


def _cmd_eig(args) -> int:
    m = _make_geometry(args)
    res = _EIG_FUNCS[args.problem](m, args.beta)
    print(f"{res.kind} eigenvalue = {res.eigenvalue:.12g} "
          f"(residual {res.residual_norm:.3g})")
    params = _collect_params(args, ("phi", "V"))
    if args.problem == "wentzell":
        params["beta"] = args.beta
    rows = [{"kind": res.kind, "eigenvalue": res.eigenvalue,
             "residual_norm": res.residual_norm}]
    payload = {
        "run": report.run_header(args.geometry, m.domain.resolution, params, VERSION),
        "audits": [],
        "eigenvalues": rows,
    }
    _emit(args, payload, report.eigenvalues_to_csv(rows), None)
    return 0


def _schur_reports(args):
    if not args.target:
        raise ScenarioError("audit schur needs --target {H,S_r,R,sigma_k}")
    phi_fn = parse_expr(args.phi) if args.phi else None
    V_fn = parse_expr(args.V) if args.V else None
    r = args.k if (args.target == "sigma_k" and args.k is not None) else args.r
    if args.hypersurface:
        hs = hypersurface.make_hypersurface(args.hypersurface, size=args.size)
        m = hs.manifold(
            phi_fn and _expr_on_meshes(phi_fn, hs.domain),
            V_fn and _expr_on_meshes(V_fn, hs.domain),
        )
        rep = hypersurface.audit_almost_schur(
            args.target, m, K1=args.K1, r=r, hypersurface=hs,
            conformally_flat=args.conformally_flat,
        )
        label = args.hypersurface
    else:
        m = _make_geometry(args)
        rep = hypersurface.audit_almost_schur(
            args.target, m, K1=args.K1, r=r,
            conformally_flat=args.conformally_flat,
        )
        label = args.geometry
    return [rep], m, label


def _cmd_audit(args) -> int:
    if args.name == "schur":
        reports, m, label = _schur_reports(args)
        params = _collect_params(args, ("target", "phi", "V"))
        params["K1"] = args.K1
    else:
        m = _make_geometry(args)
        label = args.geometry
        mdim = args.m if args.m is not None else float(m.dim)
        params = _collect_params(args, ("phi", "V"))
        params["m"] = mdim
        if args.name == "heintze-karcher":
            reports = [audits.audit_heintze_karcher(m, mdim)]
        elif args.name == "minkowski":
            reports = [audits.audit_minkowski(m, mdim)]
        else:
            reports = audits.audit_eigen_bounds(m, mdim=mdim, K=args.K, beta=args.beta)
            params["K"] = args.K
            params["beta"] = args.beta

    dicts = [r.as_dict() for r in reports]
    for d in dicts:
        line = (f"{d['name']}: {d['verdict']} lhs={d['lhs']:.12g} "
                f"rhs={d['rhs']:.12g} margin={d['relative_margin']:.6g}")
        if d["sharp"]:
            line += " [sharp]"
        print(line)
        if d["verdict"] == "HYPOTHESIS_UNMET":
            for h in d["hypotheses"]:
                if not h["satisfied"] and not h["name"].startswith("diagnostic:"):
                    print(f"  unmet: {h['name']} (witness {h['witness']:.6g})")

    payload = {
        "run": report.run_header(label, m.domain.resolution, params, VERSION),
        "audits": dicts,
    }
    _emit(args, payload, report.audits_to_csv(dicts), None)
    verdicts = {d["verdict"] for d in dicts}
    if "FAIL" in verdicts:
        return 1
    if "HYPOTHESIS_UNMET" in verdicts:
        return 2
    return 0


def _cmd_converge(args) -> int:
    if args.quantity == "reilly":
        rows, order, finest = _reilly_levels(args)
        hs = [r["h"] for r in rows]
        errs = [abs(r["residual"]) for r in rows]
        label = "reilly residual"
        geometry = args.geometry
        grid = finest.domain.resolution
    else:
        base = args.size or 9
        hs, lams = [], []
        grid = None
        for level, size in enumerate(_level_sizes(base, args.levels)):
            m = _make_geometry(args, size=size, angular_factor=2 ** level)
            res = _EIG_FUNCS[args.quantity](m, args.beta)
            hs.append(reilly.grid_parameter(m))
            lams.append(res.eigenvalue)
            grid = m.domain.resolution
        if len(lams) < 3:
            raise ScenarioError("eigenvalue convergence needs --levels >= 3")
        ratio = hs[-2] / hs[-1]
        lam_star = lams[-1] + (lams[-1] - lams[-2]) / (ratio ** 2 - 1.0)
        errs = [abs(l - lam_star) for l in lams]
        order = float(integrate.convergence_order(lams, lam_star, hs))
        label = f"{args.quantity} eigenvalue vs extrapolated {lam_star:.12g}"
        geometry = args.geometry

    print(f"{'h':>12} {'error':>14}")
    for h, e in zip(hs, errs):
        print(f"{h:>12.6g} {e:>14.6g}")
    print(f"{label}: estimated order {order:.3f}")

    params = _collect_params(args, ("f", "phi", "V", "quantity"))
    params["levels"] = args.levels
    payload = {
        "run": report.run_header(geometry, grid, params, VERSION),
        "audits": [],
        "levels": [{"h": h, "error": e} for h, e in zip(hs, errs)],
        "order": order,
    }
    _emit(args, payload, None, report.plot_data(hs, errs))
    if args.min_order is not None and not (order >= args.min_order):
        print(f"order below required minimum {args.min_order:g}")
        return 1
    return 0


# ------------------------------------------------------------ scenario files


def _scenario_argv(path: str, overrides) -> list:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    if "command" not in data:
        raise ScenarioError(f"{path}: missing 'command' key")
    argv = [str(data.pop("command"))]
    if "problem" in data:
        argv.append(str(data.pop("problem")))
    if "name" in data:
        argv.append(str(data.pop("name")))
    for key in sorted(data):
        flag = "--" + key.replace("_", "-")
        val = data[key]
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        else:
            argv.extend([flag, str(val)])
    argv.extend(overrides)
    return argv


def _cmd_run(args) -> int:
    return main(_scenario_argv(args.path, args.overrides))


# ------------------------------------------------------------ argument parsing


def _add_geometry_flags(p, with_f=False):
    p.add_argument("--geometry", help="catalog geometry id (see `driftgeo catalog`)")
    p.add_argument("--size", type=int, default=None, help="base grid resolution")
    p.add_argument("--n-theta", dest="n_theta", type=int, default=None)
    p.add_argument("--n-phi", dest="n_phi", type=int, default=None)
    p.add_argument("--phi", help="drift potential expression, e.g. 'sin(x)/5'")
    p.add_argument("--V", dest="V", help="weight expression, must be positive")
    if with_f:
        p.add_argument("--f", help="test field expression, e.g. 'x^2+y'")


def _add_output_flags(p):
    p.add_argument("--json", help="write JSON report to this path")
    p.add_argument("--csv", help="write CSV table to this path")
    p.add_argument("--plot", help="write two-column (h, residual) plot data")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="driftgeo",
        description="numerical checks for weighted manifolds with boundary",
    )
    top.add_argument("--version", action="version", version=f"driftgeo {VERSION}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list built-in geometries")
    p.add_argument("--json", help="write the listing as JSON")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("verify-reilly", help="integral identity refinement check")
    _add_geometry_flags(p, with_f=True)
    p.add_argument("--levels", type=int, default=4)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_verify_reilly)

    p = sub.add_parser("eig", help="first nonzero eigenvalue of one problem")
    p.add_argument("problem", choices=sorted(_EIG_FUNCS))
    _add_geometry_flags(p)
    p.add_argument("--beta", type=float, default=1.0)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_eig)

    p = sub.add_parser("audit", help="inequality audit with hypothesis checks")
    p.add_argument("name", choices=["heintze-karcher", "minkowski", "eigen-bounds", "schur"])
    _add_geometry_flags(p)
    p.add_argument("--m", type=float, default=None,
                   help="dimension parameter; accepts 'inf' (default: chart dimension)")
    p.add_argument("--K", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--K1", type=float, default=0.0)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--target", choices=["H", "S_r", "R", "sigma_k"])
    p.add_argument("--hypersurface", help="embedded hypersurface id for H/S_r targets")
    p.add_argument("--conformally-flat", dest="conformally_flat", action="store_true",
                   help="assert local conformal flatness (sigma_k target)")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("converge", help="refinement study with order estimate")
    _add_geometry_flags(p, with_f=True)
    p.add_argument("--quantity", default="reilly",
                   choices=["reilly"] + sorted(_EIG_FUNCS))
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--min-order", dest="min_order", type=float, default=None,
                   help="exit 1 if the estimated order falls below this")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("run", help="execute a TOML scenario file")
    p.add_argument("path")
    p.add_argument("overrides", nargs=argparse.REMAINDER,
                   help="flags appended after the scenario's own keys")
    p.set_defaults(func=_cmd_run)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DriftgeoError as exc:
        print(f"driftgeo: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"driftgeo: io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
