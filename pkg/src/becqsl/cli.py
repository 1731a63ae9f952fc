"""Command-line front end.

    becqsl gamma --preset fig2 --dimension 1 --a_B 0 --out gamma.csv
    becqsl qsl --distance 13e-5 --dimension 3
    becqsl sweep --vary a_B --values 0.2a_Rb,0.6a_Rb,1a_Rb --distance 11e-5
    becqsl reproduce fig2 --out fig2/

Parameters are SI; lengths accept ``nm``/``um`` suffixes and a_B also
accepts ``a_Rb``. Times are internal units unless suffixed with ``s``.
Exit codes: 0 success, 2 usage or parameter error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import datetime
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dephasing import CURVE_COLUMNS, QubitState, evolve, fmt, sample_curve, write_curve_csv
from .figures import (FIG3_GEOMETRIES, FIG4_AB_FACTORS, FIG4_DISTANCES, FIG5_L_DISTANCES, FIG5_LS,
                      FIG5_SIGMA_DISTANCES, FIG5_SIGMAS, FIGURE_IDS, NAMED_PRESETS, a_b_cap, preset,
                      preset_grid)
from .numerics import DEFAULT_SPEC, NonConvergence, QuadratureSpec
from .qsl import QslProblem, bures_angle, distance_bound_curve, qfi, solve_tau_qsl
from .reservoir import ReservoirModel, reduce
from .spectrum import (DegenerateFit, InvalidRegime, fit_ohmicity, spectral_model, spectrum_table,
                       write_spectrum_csv)
from .units import (A_RB, FIELD_NAMES, INTERNAL, ParameterError, PhysicalParams, format_params, load_params,
                    parse_value, to_internal)

log = logging.getLogger("becqsl")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
SWEEP_VARS = ("a_B", "sigma", "L", "dimension", "distance")
QSL_COLUMNS = ("tau_qsl_internal", "tau_qsl_seconds", "v_qsl", "sup_dub", "solver_iterations")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def parse_quantity(text: str) -> float:
    text = text.strip()
    if text.endswith("a_Rb"):
        head = text[:-4].strip()
        return (float(head) if head else 1.0) * A_RB
    return parse_value(text)


def parse_time(text: str, r: ReservoirModel) -> float:
    text = text.strip()
    if text.endswith("s"):
        return float(text[:-1]) / INTERNAL.time_unit
    return float(text)


def parse_time_grid(text: str | None, r: ReservoirModel) -> np.ndarray:
    """Comma list of times, or ``log:lo:hi:n`` in multiples of m_B sigma^2."""
    if text is None:
        return r.time_scale * np.logspace(-2, 3, 64)
    if text.startswith("log:"):
        try:
            lo, hi, n = text[4:].split(":")
            return r.time_scale * np.logspace(math.log10(float(lo)), math.log10(float(hi)), int(n))
        except ValueError as exc:
            raise UsageError(f"bad log grid {text!r}, expected log:lo:hi:n") from exc
    try:
        return np.array([parse_time(v, r) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"bad time grid {text!r}") from exc


def resolve_params(args) -> PhysicalParams:
    base = NAMED_PRESETS[args.preset]() if args.preset else None
    overrides = {}
    for name in FIELD_NAMES:
        raw = getattr(args, name, None)
        if raw is None:
            continue
        try:
            overrides[name] = int(raw) if name == "dimension" else parse_quantity(raw)
        except ValueError as exc:
            raise ParameterError(f"--{name}: {exc}") from exc
    p = load_params(args.config, overrides, base)
    cap = a_b_cap(p.dimension)
    if p.a_B > cap:
        log.warning("a_B=%g m exceeds the %dD cap of %g m", p.a_B, p.dimension, cap)
    return p


def quad_spec(args) -> QuadratureSpec:
    if args.rel_tol is None:
        return DEFAULT_SPEC
    return QuadratureSpec(rel_tol=args.rel_tol, abs_tol=DEFAULT_SPEC.abs_tol,
                          max_panels=DEFAULT_SPEC.max_panels, oscillation_guard=DEFAULT_SPEC.oscillation_guard)


def model(p: PhysicalParams) -> ReservoirModel:
    return reduce(to_internal(p))


def preamble(p: PhysicalParams, **extra) -> str:
    lines = [format_params(p).rstrip("\n")]
    lines += [f"{k}={v}" for k, v in extra.items()]
    return "\n".join(lines)


# ---------------------------------------------------------------- output

@contextlib.contextmanager
def open_out(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        yield fh


def cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def write_table(rows: list[dict], columns, stream, pre: str | None = None) -> None:
    if pre:
        for line in pre.splitlines():
            stream.write(f"# {line}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([cell(row.get(c)) for c in columns])


def write_json(obj, stream) -> None:
    json.dump(obj, stream, indent=2, allow_nan=True)
    stream.write("\n")


def emit_plot_script(csv_path: str, xcol: int, ycol: int, logx: bool = True) -> Path:
    script = Path(str(csv_path) + ".gp")
    script.write_text(
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead\n"
        + ("set logscale x\n" if logx else "")
        + f"plot '{Path(csv_path).name}' using {xcol}:{ycol} with linespoints\n"
    )
    return script


def qsl_record(res, p: PhysicalParams, distance: float) -> dict:
    return {
        "params": format_params(p).splitlines(),
        "D_target": distance,
        "tau_qsl_internal": res.tau if res.reachable else "unreachable",
        "tau_qsl_seconds": res.tau * INTERNAL.time_unit if res.reachable else "unreachable",
        "v_qsl": res.v_qsl if res.reachable else None,
        "sup_dub": res.sup_dub,
        "solver_iterations": res.iterations,
    }


def qsl_row(res) -> dict:
    if not res.reachable:
        return {"tau_qsl_internal": "unreachable", "tau_qsl_seconds": "unreachable", "v_qsl": None,
                "sup_dub": res.sup_dub, "solver_iterations": res.iterations}
    return {"tau_qsl_internal": res.tau, "tau_qsl_seconds": res.tau * INTERNAL.time_unit, "v_qsl": res.v_qsl,
            "sup_dub": res.sup_dub, "solver_iterations": res.iterations}


def state_from(args) -> QubitState:
    return QubitState(args.x, args.y, args.z)


def t_max_internal(args, r: ReservoirModel) -> float | None:
    return None if args.t_max is None else parse_time(args.t_max, r)


# ---------------------------------------------------------------- commands

def cmd_params(args) -> int:
    p = resolve_params(args)
    with open_out(args.out) as fh:
        if args.format == "json":
            write_json({k: v for k, v in p.as_dict().items()}, fh)
        else:
            fh.write(format_params(p))
    return EXIT_OK


def cmd_gamma(args) -> int:
    p = resolve_params(args)
    r = model(p)
    grid = parse_time_grid(args.t_grid, r)
    curve = sample_curve(r, grid, quad_spec(args))
    with open_out(args.out) as fh:
        if args.format == "json":
            write_json({"params": format_params(p).splitlines(),
                        "columns": list(CURVE_COLUMNS),
                        "rows": [[float(v) for v in row] for row in zip(
                            curve.times, curve.times * INTERNAL.time_unit, curve.gamma, curve.gamma_dot,
                            curve.err_gamma, curve.err_gamma_dot)]}, fh)
        else:
            write_curve_csv(curve, fh, INTERNAL.time_unit, preamble(p))
    if args.emit_plot_script and args.out not in (None, "-"):
        emit_plot_script(args.out, 1, 3)
    if curve.failed.any():
        log.error("quadrature did not converge at %d of %d times", curve.failed.sum(), curve.failed.size)
        return EXIT_NUMERIC
    return EXIT_OK


def _spectrum(p: PhysicalParams, n: int = 64):
    r = model(p)
    m = spectral_model(r)
    w = m.cutoff * np.logspace(-4, 1, n)
    fit = fit_ohmicity(r, 1e-4 * m.cutoff, 1e-3 * m.cutoff)
    return m, spectrum_table(m, w), fit


def _fit_record(m, fit) -> dict:
    return {"regime": m.regime, "dimension": m.reservoir.dimension, "cutoff_internal": m.cutoff,
            "exponent_expected": m.exponent, "exponent_fit": fit.exponent,
            "classification": fit.classification, "fit_window_internal": [fit.omega_lo, fit.omega_hi]}


def cmd_spectrum(args) -> int:
    p = resolve_params(args)
    m, table, fit = _spectrum(p)
    rec = _fit_record(m, fit)
    with open_out(args.out) as fh:
        if args.format == "json":
            write_json({"params": format_params(p).splitlines(), "fit": rec,
                        "columns": ["omega_internal", "j_exact", "j_asymptotic", "ratio"],
                        "rows": table.tolist()}, fh)
        else:
            write_spectrum_csv(table, fh, preamble(p, exponent_fit=fmt(fit.exponent)))
    if args.out not in (None, "-"):
        with open(Path(str(args.out) + ".fit.json"), "w") as fh:
            write_json({"params": format_params(p).splitlines(), **rec}, fh)
        if args.emit_plot_script:
            emit_plot_script(args.out, 1, 2)
    return EXIT_OK


def cmd_qfi(args) -> int:
    p = resolve_params(args)
    r = model(p)
    state = state_from(args)
    grid = parse_time_grid(args.t_grid, r)
    curve = sample_curve(r, grid, quad_spec(args))
    if curve.failed.any():
        log.error("quadrature did not converge at %d times", curve.failed.sum())
        return EXIT_NUMERIC
    dub = distance_bound_curve(QslProblem(r, state, spec=quad_spec(args)), curve.times)
    rho0 = state.density_matrix()
    rows = []
    for i, t in enumerate(curve.times):
        g, gd = curve.gamma[i], curve.gamma_dot[i]
        rows.append({"t_internal": t, "t_si_seconds": t * INTERNAL.time_unit, "gamma": g, "gamma_dot": gd,
                     "qfi": qfi(state, g, gd), "d_ub": dub[i], "bures": bures_angle(rho0, evolve(state, g))})
    cols = ("t_internal", "t_si_seconds", "gamma", "gamma_dot", "qfi", "d_ub", "bures")
    with open_out(args.out) as fh:
        if args.format == "json":
            write_json({"params": format_params(p).splitlines(), "state": [state.x, state.y, state.z],
                        "rows": rows}, fh)
        else:
            write_table(rows, cols, fh, preamble(p, x=state.x, y=state.y, z=state.z))
    return EXIT_OK


def cmd_qsl(args) -> int:
    p = resolve_params(args)
    r = model(p)
    prob = QslProblem(r, state_from(args), args.distance, args.tolerance, t_max_internal(args, r), quad_spec(args))
    res = solve_tau_qsl(prob)
    rec = qsl_record(res, p, args.distance)
    with open_out(args.out) as fh:
        if args.format == "json":
            write_json(rec, fh)
        else:
            write_table([{"D_target": args.distance, **qsl_row(res)}], ("D_target",) + QSL_COLUMNS, fh, preamble(p))
    return EXIT_OK


def _sweep_row(job) -> dict:
    """Worker for one sweep row; returns plain data so it pickles."""
    p, distance, state, tol, t_max, spec = job
    try:
        r = model(p)
        tm = None if t_max is None else parse_time(t_max, r)
        res = solve_tau_qsl(QslProblem(r, state, distance, tol, tm, spec))
    except (NonConvergence, ArithmeticError, ValueError) as exc:
        return {"status": f"failed: {exc}".replace("\n", " ")}
    return {"status": "ok" if res.reachable else "unreachable", **qsl_row(res)}


def run_rows(jobs, n_jobs: int) -> list[dict]:
    if n_jobs <= 1 or len(jobs) <= 1:
        return [_sweep_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(_sweep_row, jobs))  # map keeps input order


def cmd_sweep(args) -> int:
    if not args.values or not args.values.strip():
        raise UsageError("--values must list at least one value")
    base = resolve_params(args)
    var = args.vary
    try:
        values = [int(v) if var == "dimension" else parse_quantity(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --values: {exc}") from exc
    if not values:
        raise UsageError("--values must list at least one value")
    if any(not math.isfinite(v) or v < 0 for v in values):
        raise UsageError("sweep values must be finite and non-negative")
    state = state_from(args)
    jobs = []
    for v in values:
        if var == "distance":
            p, d = base, v
        else:
            p, d = base.replace(**{var: v}), args.distance
        if p.a_B > a_b_cap(p.dimension):
            log.warning("row %s=%g: a_B exceeds the %dD cap", var, v, p.dimension)
        jobs.append((p, d, state, args.tolerance, args.t_max, quad_spec(args)))
    rows = run_rows(jobs, args.jobs)
    for v, (p, d, *_), row in zip(values, jobs, rows):
        row.update({var: v, "distance": d} if var != "distance" else {"distance": v})
    cols = (var,) + (("distance",) if var != "distance" else ()) + QSL_COLUMNS + ("status",)
    with open_out(args.out) as fh:
        if args.format == "json":
            write_json({"params": format_params(base).splitlines(), "vary": var, "rows": rows}, fh)
        else:
            write_table(rows, cols, fh, preamble(base, vary=var))
    ok = sum(not r["status"].startswith("failed") for r in rows)
    for v, r in zip(values, rows):
        if r["status"].startswith("failed"):
            log.error("row %s=%g %s", var, v, r["status"])
    return EXIT_OK if ok else EXIT_NUMERIC


# ---------------------------------------------------------------- reproduce

def _write_curve_file(path: Path, p: PhysicalParams, spec: QuadratureSpec) -> bool:
    r = model(p)
    curve = sample_curve(r, r.time_scale * np.logspace(-2, 3, 64), spec)
    with open(path, "w", newline="") as fh:
        write_curve_csv(curve, fh, INTERNAL.time_unit, preamble(p))
    return not curve.failed.any()


def _qsl_table(path: Path, base: PhysicalParams, var: str, values, distances, spec, n_jobs: int) -> bool:
    state = QubitState()
    cells = [(v, d) for d in distances for v in values]
    jobs = [(base.replace(**{var: v}), d, state, 1e-12, None, spec) for v, d in cells]
    rows = run_rows(jobs, n_jobs)
    for (v, d), row in zip(cells, rows):
        row.update({var: v, "distance": d})
    cols = (var, "distance") + QSL_COLUMNS + ("status",)
    with open(path, "w", newline="") as fh:
        write_table(rows, cols, fh, preamble(base, vary=var))
    return all(not r["status"].startswith("failed") for r in rows)


def reproduce(fig: str, out: Path, spec: QuadratureSpec = DEFAULT_SPEC, n_jobs: int = 1,
              plot_scripts: bool = False) -> tuple[list[dict], bool]:
    """Write the data files behind one figure; returns manifest entries and success."""
    out.mkdir(parents=True, exist_ok=True)
    entries, ok = [], True

    def add(name, p, **extra):
        entries.append({"file": name, "params": p.as_dict(), **extra})

    if fig == "fig2":
        for key, p in preset_grid().items():
            name = f"fig2_{key}.csv"
            ok &= _write_curve_file(out / name, p, spec)
            add(name, p, curve=key)
    elif fig == "fig3":
        base = preset("interacting", 3)
        for sigma, L in FIG3_GEOMETRIES:
            p = base.replace(sigma=sigma, L=L)
            name = f"fig3_sigma{round(sigma * 1e9)}nm_L{round(L * 1e9)}nm.csv"
            ok &= _write_curve_file(out / name, p, spec)
            add(name, p)
    elif fig == "fig4":
        for dim, dists in FIG4_DISTANCES.items():
            base = preset("interacting", dim)
            name = f"fig4_{dim}d.csv"
            ok &= _qsl_table(out / name, base, "a_B", [f * A_RB for f in FIG4_AB_FACTORS], dists, spec, n_jobs)
            add(name, base, vary="a_B", distances=list(dists))
    elif fig == "fig5":
        base = preset("interacting", 3)
        ok &= _qsl_table(out / "fig5_sigma.csv", base, "sigma", FIG5_SIGMAS, FIG5_SIGMA_DISTANCES, spec, n_jobs)
        add("fig5_sigma.csv", base, vary="sigma", distances=list(FIG5_SIGMA_DISTANCES))
        ok &= _qsl_table(out / "fig5_L.csv", base, "L", FIG5_LS, FIG5_L_DISTANCES, spec, n_jobs)
        add("fig5_L.csv", base, vary="L", distances=list(FIG5_L_DISTANCES))
    elif fig == "appendixA":
        fits = []
        for key, p in preset_grid().items():
            m, table, fit = _spectrum(p)
            name = f"appendixA_{key}.csv"
            with open(out / name, "w", newline="") as fh:
                write_spectrum_csv(table, fh, preamble(p))
            fits.append({"preset": key, **_fit_record(m, fit)})
            add(name, p)
        cols = ("preset", "regime", "dimension", "cutoff_internal", "exponent_expected", "exponent_fit",
                "classification")
        with open(out / "appendixA_fits.csv", "w", newline="") as fh:
            write_table(fits, cols, fh)
        entries.append({"file": "appendixA_fits.csv"})
    else:
        raise UsageError(f"unknown figure id {fig!r}; choose from {', '.join(FIGURE_IDS)}")
    if plot_scripts:
        for e in entries:
            if fig in ("fig2", "fig3"):
                emit_plot_script(out / e["file"], 1, 3)
    return entries, ok


def cmd_reproduce(args) -> int:
    if args.figure not in FIGURE_IDS:
        raise UsageError(f"unknown figure id {args.figure!r}; choose from {', '.join(FIGURE_IDS)}")
    out = Path(args.out or args.figure)
    entries, ok = reproduce(args.figure, out, quad_spec(args), args.jobs, args.emit_plot_script)
    manifest = {
        "figure": args.figure,
        "package_version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "rel_tol": quad_spec(args).rel_tol,
        "files": entries,
    }
    with open(out / "manifest.json", "w") as fh:
        write_json(manifest, fh)
    return EXIT_OK if ok else EXIT_NUMERIC


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value parameter file (SI units)")
    common.add_argument("--out", help="output file (directory for reproduce); stdout if omitted")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--rel-tol", type=float, help="relative tolerance of the k-space quadrature")
    common.add_argument("--t-max", help="QSL search horizon; internal units, or seconds with an 's' suffix")
    common.add_argument("--preset", choices=sorted(NAMED_PRESETS), help="start from a figure's parameter set")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--emit-plot-script", action="store_true", help="write a gnuplot script next to the CSV")
    grp = common.add_argument_group("parameter overrides")
    for name in FIELD_NAMES:
        grp.add_argument(f"--{name}", metavar="VALUE")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--x", type=float, default=1.0)
    state.add_argument("--y", type=float, default=0.0)
    state.add_argument("--z", type=float, default=0.0)

    ap = argparse.ArgumentParser(prog="becqsl", description="Dephasing and quantum speed limit of an impurity qubit "
                                 "in a Bose-Einstein condensate.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", parents=[common], help="dephasing function on a time grid")
    p.add_argument("--t-grid", help="comma list of times, or log:lo:hi:n in units of m_B sigma^2")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("spectrum", parents=[common], help="spectral density and Ohmicity fit")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("qfi", parents=[common, state], help="QFI, distance bound and Bures angle on a time grid")
    p.add_argument("--t-grid")
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("qsl", parents=[common, state], help="quantum speed limit time for one target distance")
    p.add_argument("--distance", type=float, required=True)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.set_defaults(func=cmd_qsl)

    p = sub.add_parser("sweep", parents=[common, state], help="QSL time over a list of parameter values")
    p.add_argument("--vary", choices=SWEEP_VARS, required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--distance", type=float, default=11e-5)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", parents=[common], help="data bundle behind a figure")
    p.add_argument("figure", help=", ".join(FIGURE_IDS))
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("params", parents=[common], help="print the resolved parameter set")
    p.set_defaults(func=cmd_params)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterError, InvalidRegime, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (NonConvergence, DegenerateFit, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
