"""Command-line front end: derive, check, simulate, compare.

Exit codes: 0 success, 1 verification or numerical failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .checks import run_checks
from .errors import ConfigError, JetPHError, NumericalError, ParseError
from .geometric import legendre_transform, power_balance_form
from .models import FieldModel, load_model
from .stokes_dirac import build_stokes_dirac, compatibility_residuals, formal_adjoint_identity
from .symbolic import DepCoord, JetCoordinate, normalize, substitute
from .textio import to_text
from .variational import boundary_form, euler_lagrange, rectangle_facets

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
BUNDLED_CONFIGS = ("clamped_demo", "forced_demo", "compare_coarse", "compare_fine")


# ---------------------------------------------------------------------------
# derivation documents


def _fraction_text(v) -> str:
    return str(v)


def derive_lagrangian(model: FieldModel) -> dict:
    L = model.lagrangian
    el = euler_lagrange(L)
    bf = boundary_form(L)
    return {
        "model": model.name,
        "form": "lagrangian",
        "independent": [c.name for c in L.chart.indep],
        "dependent": [d.name for d in L.chart.deps],
        "lagrangian": to_text(L.expr),
        "residuals": {d.name: to_text(el[d]) for d in L.chart.deps},
        "boundary": {
            c.name: {d.name: to_text(e) for d, e in coefs.items()} for c, coefs in bf.facets.items()
        },
        "facets": {
            f.name: {d.name: to_text(normalize(bf.coefficient(f.coord, d) * f.side)) for d in L.chart.deps}
            for f in rectangle_facets(L.chart)
        },
    }


def derive_geometric(model: FieldModel) -> dict:
    mm, ph = legendre_transform(model.lagrangian)
    pf = power_balance_form(ph)
    return {
        "model": model.name,
        "form": "geometric",
        "state": [d.name for d in ph.state],
        "J": [[_fraction_text(v) for v in row] for row in ph.J],
        "momenta": {m.momentum.name: to_text(m.definition) for m in mm},
        "velocities": {m.dep.name: to_text(m.inverse) for m in mm},
        "hamiltonian": to_text(ph.H.expr),
        "rhs": {d.name: to_text(r) for d, r in zip(ph.state, ph.rhs())},
        "power": {c.name: to_text(e) for c, e in pf.facets.items()},
    }


def derive_dirac(model: FieldModel) -> dict:
    sd = build_stokes_dirac(model)
    B = formal_adjoint_identity(sd.J)
    names = sd.state.names
    e_syms = [JetCoordinate(DepCoord(f"e_{n}", i)) for i, n in enumerate(names)]
    bilinear = {c.name: to_text(B.half_quadratic(c, e_syms)) for c in B.matrices}
    conf = sd.to_configuration()
    ports = {c.name: to_text(B.half_quadratic(c, [substitute(e, conf) for e in sd.efforts])) for c in B.matrices}
    return {
        "model": model.name,
        "form": "dirac",
        "state": [
            {"name": v.coord.name, "kind": v.kind, "definition": to_text(normalize(v.provenance))} for v in sd.state
        ],
        "hamiltonian": to_text(sd.H.expr),
        "efforts": {n: to_text(e) for n, e in zip(names, sd.efforts)},
        "stiffness": [[to_text(x) for x in row] for row in sd.stiffness],
        "operator": sd.J.table(),
        "boundary_bilinear": bilinear,
        "boundary_power": ports,
        "compatibility": [to_text(r) for r in compatibility_residuals(sd.state)],
    }


DERIVERS = {"lagrangian": derive_lagrangian, "geometric": derive_geometric, "dirac": derive_dirac}


def _operator_cell(cell: dict) -> str:
    parts = []
    for key, val in cell.items():
        if val == "0":
            continue
        if key == "c0":
            parts.append(val)
        else:
            d = "d" + key[1:]
            parts.append(d if val == "1" else f"-{d}" if val == "-1" else f"{val}*{d}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def render_text(doc: dict) -> str:
    out = io.StringIO()
    form = doc["form"]
    print(f"model: {doc['model']}  form: {form}", file=out)
    if form == "lagrangian":
        print(f"L = {doc['lagrangian']}", file=out)
        print("Euler-Lagrange residuals (delta_alpha L = 0):", file=out)
        for k, v in doc["residuals"].items():
            print(f"  {k}: {v}", file=out)
        print("boundary coefficients dL/d(y_A) per facet (outward sign):", file=out)
        for f, coefs in doc["facets"].items():
            print(f"  {f}: " + ", ".join(f"{d}: {e}" for d, e in coefs.items()), file=out)
    elif form == "geometric":
        print("state: " + ", ".join(doc["state"]), file=out)
        print("J:", file=out)
        for row in doc["J"]:
            print("  [" + " ".join(f"{v:>2}" for v in row) + "]", file=out)
        for k, v in doc["momenta"].items():
            print(f"{k} = {v}", file=out)
        print(f"H = {doc['hamiltonian']}", file=out)
        print("x_t = J delta H:", file=out)
        for k, v in doc["rhs"].items():
            print(f"  {k}_t = {v}", file=out)
        print("boundary power integrands:", file=out)
        for k, v in doc["power"].items():
            print(f"  {k}: {v}", file=out)
    else:
        print("state: " + ", ".join(f"{s['name']} = {s['definition']}" for s in doc["state"]), file=out)
        print(f"H = {doc['hamiltonian']}", file=out)
        print("efforts e = dH/dchi:", file=out)
        for k, v in doc["efforts"].items():
            print(f"  e_{k} = {v}", file=out)
        print("J_SD (d = total derivative):", file=out)
        cells = [[_operator_cell(c) for c in row] for row in doc["operator"]]
        width = max(len(c) for row in cells for c in row)
        for row in cells:
            print("  [" + " ".join(c.rjust(width) for c in row) + "]", file=out)
        print("boundary bilinear 1/2 B(e, e):", file=out)
        for k, v in doc["boundary_bilinear"].items():
            print(f"  {k}: {v}", file=out)
        print("compatibility residuals:", file=out)
        for r in doc["compatibility"]:
            print(f"  {r}", file=out)
    return out.getvalue()


# ---------------------------------------------------------------------------
# commands


def _resolve_sim_config(name: str):
    from .fdm.simulate import config_from_dict, load_config

    if Path(name).is_file():
        return load_config(name)
    if name in BUNDLED_CONFIGS:
        text = resources.files("jetph").joinpath("configs").joinpath(f"{name}.json").read_text()
        return config_from_dict(json.loads(text))
    raise ConfigError(f"simulation config not found: {name}")


def cmd_derive(args) -> int:
    model = load_model(args.model)
    doc = DERIVERS[args.form](model)
    text = render_text(doc)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.form}.json").write_text(json.dumps(doc, indent=2) + "\n")
        (out / f"{args.form}.txt").write_text(text)
    sys.stdout.write(json.dumps(doc, indent=2) + "\n" if args.format == "json" else text)
    return EXIT_OK


def cmd_check(args) -> int:
    model = load_model(args.model)
    results = run_checks(model)
    if args.format == "json":
        print(json.dumps([{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results], indent=2))
    else:
        for r in results:
            print(r.line())
        failed = sum(not r.passed for r in results)
        print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _parse_grid(text: str) -> tuple:
    try:
        nx, ny = (int(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"--grid expects NX,NY, got {text!r}") from None
    return nx, ny


def _parse_bc(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--bc expects FACET=TYPE, got {item!r}")
        facet, kind = item.split("=", 1)
        out[facet.strip()] = kind.strip()
    return out


def _sim_columns(result) -> dict:
    if len(result.series) == 1:
        (s,) = result.series.values()
        return s.columns()
    g, d = result.series["geometric"], result.series["dirac"]
    return {
        "t": g.t,
        "H_geometric": g.H,
        "P_boundary_geometric": g.P_boundary,
        "balance_residual_geometric": g.balance_residual,
        "H_dirac": d.H,
        "P_boundary_dirac": d.P_boundary,
        "balance_residual_dirac": d.balance_residual,
        "discrepancy": result.discrepancy,
    }


def _summary(result) -> dict:
    out = {"dt": result.dt, "steps": len(next(iter(result.series.values())).t) - 1, "forms": {}}
    for form, s in result.series.items():
        H0 = s.H[0]
        out["forms"][form] = {
            "H0": float(H0),
            "max_relative_energy_change": float(np.max(np.abs(s.H - H0)) / H0) if H0 else float(np.max(np.abs(s.H))),
            "max_abs_balance_residual": s.max_abs_residual(),
        }
        if s.compatibility is not None:
            out["forms"][form]["max_compatibility_residual"] = float(np.max(s.compatibility))
    if result.discrepancy is not None:
        out["max_discrepancy"] = float(np.max(result.discrepancy))
    return out


def _simulate(args, formulation=None) -> int:
    from .fdm.output import write_csv, write_snapshots
    from .fdm.simulate import run, with_overrides

    cfg = _resolve_sim_config(args.config)
    cfg = with_overrides(
        cfg,
        grid=_parse_grid(args.grid) if args.grid else None,
        dt=args.dt,
        steps=args.steps,
        bc=_parse_bc(args.bc),
        formulation=formulation or args.formulation,
        force=args.force,
    )
    if args.snapshot_every is not None:
        from dataclasses import replace

        cfg = replace(cfg, snapshot_every=args.snapshot_every)
    result = run(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = "compare.csv" if len(result.series) == 2 else "timeseries.csv"
    columns = _sim_columns(result)
    write_csv(out / name, columns)
    (out / "run_config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    for form, (times, data) in result.snapshots.items():
        write_snapshots(out / f"snapshots_{form}.bin", times, data)
    summary = _summary(result)
    summary["output"] = str(out / name)
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    elif args.format == "csv":
        sys.stdout.write((out / name).read_text())
    else:
        print(f"dt = {summary['dt']:.6g}, steps = {summary['steps']}, written {summary['output']}")
        for form, s in summary["forms"].items():
            print(f"  {form}: " + ", ".join(f"{k} = {v:.6g}" for k, v in s.items()))
        if "max_discrepancy" in summary:
            print(f"  max discrepancy |w_geometric - w_dirac| = {summary['max_discrepancy']:.6g}")
    status = EXIT_OK
    tol = cfg.tolerance
    if "balance_residual" in tol:
        for form, s in result.series.items():
            if s.max_abs_residual() > float(tol["balance_residual"]):
                print(f"FAIL {form} balance residual {s.max_abs_residual():.6g} exceeds {tol['balance_residual']}",
                      file=sys.stderr)
                status = EXIT_FAIL
    if "discrepancy" in tol and result.discrepancy is not None:
        if float(np.max(result.discrepancy)) > float(tol["discrepancy"]):
            print(f"FAIL discrepancy exceeds {tol['discrepancy']}", file=sys.stderr)
            status = EXIT_FAIL
    return status


def cmd_simulate(args) -> int:
    return _simulate(args)


def cmd_compare(args) -> int:
    return _simulate(args, formulation="both")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetph",
        description="Derive port-Hamiltonian forms from Lagrangian densities and simulate the Mindlin plate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print Euler-Lagrange, geometric or Stokes-Dirac derivations")
    p.add_argument("model", help="model config file or preset name (mindlin, wave1d)")
    p.add_argument("--form", choices=sorted(DERIVERS), default="lagrangian")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.add_argument("--out", help="directory receiving <form>.json and <form>.txt")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", help="run the symbolic equivalence checks")
    p.add_argument("model", help="model config file or preset name")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_check)

    for name, func, help_text in (
        ("simulate", cmd_simulate, "run a plate simulation"),
        ("compare", cmd_compare, "run both formulations and record their discrepancy"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help=f"simulation config file or bundled name ({', '.join(BUNDLED_CONFIGS)})")
        p.add_argument("--grid", metavar="NX,NY")
        p.add_argument("--dt", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--bc", action="append", metavar="FACET=TYPE", help="clamped, hinged, free or forced")
        if name == "simulate":
            p.add_argument("--formulation", choices=["geometric", "dirac", "both"])
        p.add_argument("--snapshot-every", type=int, metavar="N")
        p.add_argument("--out", default=".", metavar="DIR")
        p.add_argument("--format", choices=["text", "json", "csv"], default="text")
        p.add_argument("--force", action="store_true", help="run even if dt exceeds the stability bound")
        p.set_defaults(func=func, formulation=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except JetPHError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
