"""Command-line interface.

Exit codes: 0 success, 1 computational error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
from pathlib import Path
import sys

from . import __version__
from .analysis import (PUBLISHED_CROSSINGS, classical_onset, crossing_checks, find_extremum,
                       find_sign_change, model_ratio_report, sweep)
from .errors import CasimirError, TableError
from .lifshitz import FilmSystem, compute
from .materials import (BUILTIN_NAMES, DATA_DIR_ENV, builtin_material, data_range,
                        load_spectral_table, load_synthetic_table, resolve_data_path)
from .permittivity import Variant

log = logging.getLogger("filmcasimir")

CSV_COLUMNS = ["thickness_nm", "free_energy_J_per_m2", "pressure_Pa", "variant", "film", "plate",
               "temperature_K", "l_max"]

# applied after flags and the config file
COMMON_DEFAULTS = {"variant": "simple-drude", "temperature": 300.0, "workers": 1}
DEFAULTS = {
    "compute": {"a": [50.0]},
    "sweep": {"a_min": 20.0, "a_max": 200.0, "n_points": 19, "spacing": "linear"},
    "sign-change": {"a_lo": 10.0, "a_hi": 30.0, "tol": 0.01},
    "extremum": {"a_lo": 10.0, "a_hi": 30.0, "tol": 0.1},
    "onset": {"threshold": 0.01, "a_min": None, "a_max": 300.0},
    "ratios": {"a": [50.0, 100.0]},
}


class UsageError(Exception):
    pass


def fmt(x):
    return f"{x:.11e}"


def _add_system_args(p):
    p.add_argument("--config", help="key = value file; keys are flag names")
    p.add_argument("--film", help="film metal (Au, Ag, Cu, Al)")
    p.add_argument("--plate", help="plate metal (Au, Ag, Cu, Al)")
    p.add_argument("--variant", help="simple-drude | simple-plasma | data-drude | data-plasma")
    p.add_argument("--variants", help="comma-separated list of variants (overrides --variant)")
    p.add_argument("--temperature", type=float, help="K (default 300)")
    p.add_argument("--film-data", help="optical data file for the film")
    p.add_argument("--plate-data", help="optical data file for the plate")
    p.add_argument("--data", action="append", metavar="METAL=PATH",
                   help="attach an optical data file to a metal (repeatable)")
    p.add_argument("--synthetic-data", action="store_true", default=None,
                   help="use the bundled synthetic Drude-generated tables (testing only)")
    p.add_argument("--allow-thin", action="store_true", default=None,
                   help="permit films thinner than 10 nm")
    p.add_argument("--backend", choices=["numba", "numpy"], help="integration kernel backend")
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="filmcasimir",
        description="Casimir free energy and pressure of metal films on metal plates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("materials", help="list built-in metals")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--data", action="append", metavar="METAL=PATH")

    p = sub.add_parser("compute", help="F and P at one or more thicknesses")
    _add_system_args(p)
    p.add_argument("--a", type=float, nargs="+", help="film thickness(es) in nm")

    p = sub.add_parser("sweep", help="F and P over a thickness grid")
    _add_system_args(p)
    p.add_argument("--a-min", type=float)
    p.add_argument("--a-max", type=float)
    p.add_argument("--n-points", type=int)
    p.add_argument("--spacing", choices=["linear", "log"])
    p.add_argument("--workers", type=int)
    p.add_argument("--emit-plot", action="store_true", default=None,
                   help="write |F| (log scale) and P plots as SVG")
    p.add_argument("--plot-prefix", help="path prefix for plot files")

    p = sub.add_parser("sign-change", help="thickness where F changes sign (bisection)")
    _add_system_args(p)
    p.add_argument("--a-lo", type=float)
    p.add_argument("--a-hi", type=float)
    p.add_argument("--tol", type=float, help="bracket width in nm (default 0.01)")

    p = sub.add_parser("extremum", help="interior extremum of F(a)")
    _add_system_args(p)
    p.add_argument("--a-lo", type=float)
    p.add_argument("--a-hi", type=float)
    p.add_argument("--tol", type=float, help="nm (default 0.1)")

    p = sub.add_parser("onset", help="thickness where the classical limit sets in (Drude only)")
    _add_system_args(p)
    p.add_argument("--threshold", type=float, help="relative deviation (default 0.01)")
    p.add_argument("--a-min", type=float)
    p.add_argument("--a-max", type=float)

    p = sub.add_parser("ratios", help="Drude/plasma and simple/data ratio report")
    _add_system_args(p)
    p.add_argument("--a", type=float, nargs="+", help="thicknesses in nm (default 50 100)")
    p.add_argument("--crossings", action="store_true", default=None,
                   help="also check zero crossings and extrema of F(a)")
    return parser


def read_config(path):
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value.strip().strip('"').strip("'")
    return out


def _apply_config(args, subparser):
    config = read_config(args.config) if getattr(args, "config", None) else {}
    actions = {a.dest: a for a in subparser._actions}
    for key, raw in config.items():
        if key not in actions or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key) is not None:
            continue  # flags win
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif action.nargs == "+":
            value = [action.type(x) if action.type else x for x in raw.replace(",", " ").split()]
        elif isinstance(action, argparse._AppendAction):
            value = [x for x in raw.replace(",", " ").split()]
        else:
            value = action.type(raw) if action.type else raw
            if action.choices and value not in action.choices:
                raise UsageError(f"config {key}: {value!r} not in {list(action.choices)}")
        setattr(args, key, value)
    for key, value in {**COMMON_DEFAULTS, **DEFAULTS.get(args.command, {})}.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _data_overrides(entries):
    out = {}
    for item in entries or []:
        if "=" not in item:
            raise UsageError(f"--data expects METAL=PATH, got {item!r}")
        name, path = item.split("=", 1)
        out[builtin_material(name).name] = path
    return out


def _table_for(name, explicit, overrides, synthetic):
    path = explicit or overrides.get(name)
    if path:
        return load_spectral_table(resolve_data_path(path))
    if synthetic:
        return load_synthetic_table(name)
    base = os.environ.get(DATA_DIR_ENV)
    if base:
        candidate = Path(base) / f"{name}.txt"
        if candidate.exists():
            return load_spectral_table(candidate)
    return None


def _variants(args):
    if getattr(args, "variants", None):
        return [Variant.parse(v) for v in args.variants.split(",") if v.strip()]
    return [Variant.parse(args.variant)]


def make_systems(args):
    """One FilmSystem template per requested variant."""
    if not args.film or not args.plate:
        raise UsageError("--film and --plate are required")
    film = builtin_material(args.film)
    plate = builtin_material(args.plate)
    variants = _variants(args)
    if any(v.is_data for v in variants):
        overrides = _data_overrides(args.data)
        ft = _table_for(film.name, args.film_data, overrides, args.synthetic_data)
        pt = _table_for(plate.name, args.plate_data, overrides, args.synthetic_data)
        if ft is None or pt is None:
            raise UsageError("data-* variants need optical data for both film and plate "
                             "(--film-data/--plate-data, --data, --synthetic-data or $CASIMIR_DATA_DIR)")
        film = film.with_table(ft)
        plate = plate.with_table(pt)
    a0 = 50.0
    return [FilmSystem(film, plate, a0, args.temperature, v, allow_thin=bool(args.allow_thin))
            for v in variants]


def _csv_text(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


def _emit(text, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _row(system, res):
    return {"thickness_nm": float(system.thickness), "free_energy_J_per_m2": res.free_energy,
            "pressure_Pa": res.pressure, "variant": system.variant.value, "film": system.film.name,
            "plate": system.plate.name, "temperature_K": float(system.temperature), "l_max": res.l_max}


def cmd_materials(args):
    overrides = _data_overrides(args.data)
    base = os.environ.get(DATA_DIR_ENV)
    items = []
    for name in BUILTIN_NAMES:
        m = builtin_material(name)
        attached = overrides.get(name)
        if attached is None and base and (Path(base) / f"{name}.txt").exists():
            attached = str(Path(base) / f"{name}.txt")
        lo, hi = data_range(name)
        items.append({"name": name, "plasma_frequency_eV": m.drude.plasma_frequency,
                      "relaxation_frequency_eV": m.drude.relaxation_frequency,
                      "usual_data_range_eV": [lo, hi], "data": attached})
    if args.json:
        sys.stdout.write(json.dumps(items, indent=2) + "\n")
    else:
        sys.stdout.write(f"{'metal':<6}{'wp [eV]':>9}{'gamma [eV]':>12}  data\n")
        for it in items:
            sys.stdout.write(f"{it['name']:<6}{it['plasma_frequency_eV']:>9.4g}"
                             f"{it['relaxation_frequency_eV']:>12.4g}  {it['data'] or 'none'}\n")
    return 0


def cmd_compute(args):
    rows = []
    for system in make_systems(args):
        for a in args.a:
            s = system.with_thickness(a)
            rows.append(_row(s, compute(s, backend=args.backend)))
    _emit(_csv_text(rows, CSV_COLUMNS), args.output)
    return 0


def cmd_sweep(args):
    rows = []
    results = []
    for system in make_systems(args):
        res = sweep(system, args.a_min, args.a_max, args.n_points, args.spacing,
                    workers=args.workers, backend=args.backend)
        results.append(res)
        rows.extend(res.rows())
    _emit(_csv_text(rows, CSV_COLUMNS), args.output)
    if args.emit_plot:
        prefix = args.plot_prefix or (str(Path(args.output).with_suffix("")) if args.output else "sweep")
        for path in write_plots(results, prefix):
            log.info("wrote %s", path)
    return 0


def write_plots(results, prefix):
    """|F| on a log scale and P against thickness; data variants solid, simple dashed."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    colors = {True: "C0", False: "C3"}  # Drude, plasma
    paths = []
    for quantity, ylabel, logy in (("free_energy", "|F| [J/m$^2$]", True),
                                   ("pressure", "P [Pa]", False)):
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        for r in results:
            y = getattr(r, quantity)
            if logy:
                y = [abs(v) for v in y]
            style = "-" if r.variant.is_data else "--"
            ax.plot(r.thicknesses, y, style, color=colors[r.variant.is_drude], label=r.variant.value)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel("film thickness a [nm]")
        ax.set_ylabel(ylabel)
        if results:
            ax.set_title(f"{results[0].film} film on {results[0].plate} plate, "
                         f"T = {results[0].temperature:g} K")
        ax.legend()
        fig.tight_layout()
        path = f"{prefix}_{quantity}.svg"
        # fixed metadata keeps the file byte-stable
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(path)
    return paths


def cmd_sign_change(args):
    cols = ["variant", "film", "plate", "crossing_nm", "bracket_lo_nm", "bracket_hi_nm",
            "sign_below", "sign_above"]
    rows = []
    for system in make_systems(args):
        r = find_sign_change(system, args.a_lo, args.a_hi, args.tol, backend=args.backend)
        rows.append({"variant": system.variant.value, "film": system.film.name,
                     "plate": system.plate.name, "crossing_nm": r.crossing_thickness,
                     "bracket_lo_nm": r.bracket[0], "bracket_hi_nm": r.bracket[1],
                     "sign_below": "+" if r.sign_below > 0 else "-",
                     "sign_above": "+" if r.sign_above > 0 else "-"})
    _emit(_csv_text(rows, cols), args.output)
    return 0


def cmd_extremum(args):
    cols = ["variant", "film", "plate", "thickness_nm", "free_energy_J_per_m2"]
    rows = []
    for system in make_systems(args):
        a, F = find_extremum(system, args.a_lo, args.a_hi, args.tol, backend=args.backend)
        rows.append({"variant": system.variant.value, "film": system.film.name,
                     "plate": system.plate.name, "thickness_nm": float(a), "free_energy_J_per_m2": F})
    _emit(_csv_text(rows, cols), args.output)
    return 0


def cmd_onset(args):
    cols = ["variant", "film", "plate", "threshold", "onset_nm"]
    rows = []
    for system in make_systems(args):
        onset = classical_onset(system, args.threshold, a_min=args.a_min, a_max=args.a_max,
                                backend=args.backend)
        rows.append({"variant": system.variant.value, "film": system.film.name,
                     "plate": system.plate.name, "threshold": float(args.threshold), "onset_nm": onset})
    _emit(_csv_text(rows, cols), args.output)
    return 0


def cmd_ratios(args):
    if not args.film or not args.plate:
        raise UsageError("--film and --plate are required")
    film = builtin_material(args.film).name
    plate = builtin_material(args.plate).name
    overrides = _data_overrides(args.data)
    tables = {}
    for name, explicit in ((film, args.film_data), (plate, args.plate_data)):
        t = _table_for(name, explicit, overrides, args.synthetic_data)
        if t is not None:
            tables[name] = t
    report = model_ratio_report(film, plate, args.a, tables, args.temperature, backend=args.backend)
    lines = report.lines()
    if args.crossings:
        pair = (film, plate)
        if pair in PUBLISHED_CROSSINGS:
            lines.extend(c.line() for c in crossing_checks(tables, args.temperature, args.backend, [pair]))
    _emit("\n".join(lines) + "\n", args.output)
    return 0


COMMANDS = {
    "materials": cmd_materials,
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "sign-change": cmd_sign_change,
    "extremum": cmd_extremum,
    "onset": cmd_onset,
    "ratios": cmd_ratios,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    try:
        _apply_config(args, subparser)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        subparser.error(str(exc))
    except (CasimirError, TableError, ValueError, OSError) as exc:
        print(f"filmcasimir: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
