"""Command-line front end producing plottable tables.

Subcommands: ``eta``, ``bifurcation``, ``pullin-sweep`` and ``device``.
Exit codes: 0 success, 1 invalid input, 2 numerical non-convergence
(suppressed by ``--allow-partial``).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import replace

from scipy import constants

from magnetocasimir import __version__
from magnetocasimir import config as cfgmod
from magnetocasimir.lifshitz import eta
from magnetocasimir.material import MaterialSpec, PlateModel
from magnetocasimir.pullin import (
    CantileverGeometry,
    bifurcation_curve,
    device_translate,
    field_sweep,
    find_pullin,
)

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2

APPROXIMATIONS = "voigt-orientation-all-azimuths;half-space-plates;zero-temperature"

_MODEL_ALIASES = {
    "perfect": "perfect-conductor",
    "pc": "perfect-conductor",
    "drude": "drude-magneto",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return f"{value:.9g}"


def _number(value):
    if isinstance(value, float):
        return float(f"{value:.9g}")
    return value


# --------------------------------------------------------------------------
# argument parsing


def _common_parser():
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="key = value or JSON configuration file")
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    g.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
    g.add_argument("--serial", action="store_true", help="single process, deterministic order")
    g.add_argument("--allow-partial", action="store_true",
                   help="exit 0 even if some points did not converge")
    m = common.add_argument_group("material")
    m.add_argument("--model", help="drude-magneto | isotropic | perfect-conductor (alias: perfect)")
    m.add_argument("--eps-L", dest="eps_L", type=float, help="background permittivity")
    m.add_argument("--gamma", dest="gamma_hat", type=float, help="damping / omega_p")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog="magnetocasimir", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eta", parents=[common], help="reduction factor table")
    p.add_argument("--L", dest="separations", help="separation(s) L*omega_p/c, comma separated")
    p.add_argument("--omega-c", dest="fields", help="cyclotron ratio(s), comma separated")
    p.add_argument("--inset", action="store_true",
                   help="eta at 0.8*L0 for omega_c in 0,1,2,5,6")
    p.add_argument("--L0", dest="L0_hat", type=float, help="rest gap for --inset")

    p = sub.add_parser("bifurcation", parents=[common], help="lambda(z) curves per field")
    p.add_argument("--L0", dest="L0_hat", type=float, help="rest gap L0*omega_p/c")
    p.add_argument("--fields", help="cyclotron ratios, comma separated")
    p.add_argument("--points", type=int, help="grid points per curve (>= 3)")
    p.add_argument("--reference", action="store_true", default=None,
                   help="add the perfect-conductor curve")
    p.add_argument("--eta-mode", choices=("pointwise", "fixed"))

    p = sub.add_parser("pullin-sweep", parents=[common], help="pull-in point versus field")
    p.add_argument("--L0", dest="L0_hat", type=float, help="rest gap L0*omega_p/c")
    p.add_argument("--fields", help="cyclotron ratios including the 0 baseline")
    p.add_argument("--device", help="E=..,w=..,t=..,l=..,L0=..[,A=..][,omega_p=..] in SI")

    p = sub.add_parser("device", parents=[common], help="cantilever quantities at pull-in")
    p.add_argument("--L0", dest="L0_hat", type=float, help="rest gap L0*omega_p/c")
    p.add_argument("--omega-c", dest="fields", help="single cyclotron ratio")
    p.add_argument("--device", help="E=..,w=..,t=..,l=..,L0=..[,A=..][,omega_p=..] in SI")
    return parser


def _parse_device(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise cfgmod.ConfigError(f"--device: expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        out[key] = value
    return cfgmod._convert({"device": out}, "--device")["device"]


def resolve_config(args) -> cfgmod.RunConfig:
    """Defaults, then the config file, then command-line flags."""
    base = cfgmod.RunConfig()
    if args.config:
        base = cfgmod.build(cfgmod.load(args.config), base)

    over: dict = {"material": {}, "quadrature": {}, "sweep": {}, "output": {}}
    if args.model is not None:
        over["material"]["model"] = _MODEL_ALIASES.get(args.model, args.model)
    for key in ("eps_L", "gamma_hat"):
        if getattr(args, key) is not None:
            over["material"][key] = getattr(args, key)
    if args.rel_tol is not None:
        over["quadrature"]["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        over["quadrature"]["abs_tol"] = args.abs_tol
    sweep = over["sweep"]
    try:
        for key in ("separations", "fields"):
            if getattr(args, key, None) is not None:
                sweep[key] = cfgmod._float_list(getattr(args, key))
    except ValueError as exc:
        raise cfgmod.ConfigError(f"invalid number list: {exc}") from None
    for key in ("L0_hat", "points", "reference", "eta_mode"):
        if getattr(args, key, None) is not None:
            sweep[key] = getattr(args, key)
    if getattr(args, "inset", False):
        L0 = sweep.get("L0_hat", base.sweep.L0_hat)
        sweep["separations"] = (0.8 * L0,)
        sweep["fields"] = cfgmod.DEFAULT_FIELDS
    if args.format is not None:
        over["output"]["format"] = args.format
    if args.out is not None:
        over["output"]["path"] = args.out
    if getattr(args, "device", None):
        over["device"] = _parse_device(args.device)
    if "model" in over["material"]:
        try:
            PlateModel(over["material"]["model"])
        except ValueError:
            raise cfgmod.ConfigError(f"--model: unknown model {args.model!r}") from None
    return cfgmod.build(over, base)


# --------------------------------------------------------------------------
# output


class Table:
    def __init__(self, command, run, columns):
        self.command = command
        self.run = run
        self.columns = columns
        self.rows = []
        self.summary_columns = None
        self.summary = []

    def metadata(self):
        meta = {"command": self.command, "build": f"magnetocasimir {__version__}",
                "approximations": APPROXIMATIONS}
        for section, values in self.run.as_dict().items():
            for key, value in values.items():
                if isinstance(value, list):
                    value = ",".join(repr(v) for v in value)
                meta[f"{section}.{key}"] = value
        return meta

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata().items():
            buf.write(f"# {key}={value}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) for v in row) + "\n")
        if self.summary_columns:
            buf.write("\n")
            buf.write(",".join(self.summary_columns) + "\n")
            for row in self.summary:
                buf.write(",".join(fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        meta = {k: v for k, v in self.metadata().items() if not k.split(".")[0] in self.run.as_dict()}
        doc = {
            "meta": meta,
            "config": self.run.as_dict(),
            "columns": self.columns,
            "rows": [[_number(v) for v in row] for row in self.rows],
        }
        if self.summary_columns:
            doc["summary_columns"] = self.summary_columns
            doc["summary"] = [[_number(v) for v in row] for row in self.summary]
        return json.dumps(doc, indent=2) + "\n"

    def write(self):
        text = self.to_json() if self.run.output.format == "json" else self.to_csv()
        if self.run.output.path:
            with open(self.run.output.path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


@contextmanager
def _executor(serial: bool, tasks: int):
    if serial or tasks < 2:
        yield None
        return
    workers = min(tasks, os.cpu_count() or 1)
    if workers < 2:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield pool


# --------------------------------------------------------------------------
# commands


def _field_specs(run):
    return [run.material.with_field(w) for w in run.sweep.fields]


def cmd_eta(run, serial):
    table = Table("eta", run, ["L_hat", "omega_c_hat", "eta", "err_est", "converged"])
    jobs = [(run.material.with_field(w), L) for L in run.sweep.separations for w in run.sweep.fields]
    with _executor(serial, len(jobs)) as pool:
        args = ([s for s, _ in jobs], [L for _, L in jobs], [run.quadrature] * len(jobs))
        points = list(pool.map(eta, *args)) if pool else list(map(eta, *args))
    ok = True
    for (spec, L), p in zip(jobs, points):
        table.rows.append([L, spec.omega_c_hat, p.eta, p.err_est, p.converged])
        ok &= p.converged
    return table, ok


def _curve_task(spec, L0_hat, sweep, quad):
    curve = bifurcation_curve(spec, L0_hat, sweep.points, quad, (sweep.z_min, sweep.z_max),
                              eta_mode=sweep.eta_mode, fixed_z=sweep.fixed_z)
    pull = find_pullin(spec, L0_hat, quad, eta_mode=sweep.eta_mode)
    return curve, pull


def cmd_bifurcation(run, serial):
    table = Table("bifurcation", run, ["omega_c_hat", "z_bar", "lambda", "eta_at"])
    table.summary_columns = ["omega_c_hat", "z_bar_in", "lambda_in"]
    specs = _field_specs(run)
    labels = [s.omega_c_hat for s in specs]
    if run.sweep.reference:
        specs.append(MaterialSpec(model=PlateModel.PERFECT_CONDUCTOR))
        labels.append("perfect")
    n = len(specs)
    with _executor(serial, n) as pool:
        args = (specs, [run.sweep.L0_hat] * n, [run.sweep] * n, [run.quadrature] * n)
        results = list(pool.map(_curve_task, *args)) if pool else list(map(_curve_task, *args))
    ok = True
    for label, (curve, pull) in zip(labels, results):
        for pt in curve:
            table.rows.append([label, pt.z_bar, pt.lam, pt.eta_at])
            ok &= pt.converged
        table.summary.append([label, pull.z_bar_in, pull.lambda_in])
        ok &= pull.converged
    return table, ok


def _geometry(dev: cfgmod.DeviceConfig):
    return CantileverGeometry(dev.E, dev.w, dev.t, dev.l, dev.L0, dev.A)


def _omega_p(dev: cfgmod.DeviceConfig, L0_hat: float) -> float:
    if dev.omega_p is not None:
        return dev.omega_p
    return L0_hat * constants.c / dev.L0


_DEVICE_COLUMNS = ["kappa", "F0", "lambda", "detach_length_max", "pulled_in"]


def cmd_pullin_sweep(run, serial):
    columns = ["omega_c_hat", "z_bar_in", "lambda_in", "kappa_min_ratio", "detach_ratio"]
    if run.device is not None:
        columns += _DEVICE_COLUMNS
        geom = _geometry(run.device)
        omega_p = _omega_p(run.device, run.sweep.L0_hat)
    table = Table("pullin-sweep", run, columns)
    with _executor(serial, len(run.sweep.fields)) as pool:
        results = field_sweep(run.material, run.sweep.L0_hat, run.sweep.fields,
                              run.quadrature, executor=pool)
    ok = True
    for r in results:
        row = [r.omega_c_hat, r.z_bar_in, r.lambda_in, r.kappa_min_ratio, r.detach_ratio]
        if run.device is not None:
            d = device_translate(geom, r, omega_p)
            row += [d.kappa, d.F0, d.lam, d.detach_length_max, d.pulled_in]
        table.rows.append(row)
        ok &= r.converged
    return table, ok


def cmd_device(run, serial):
    if run.device is None:
        raise UsageError("device: --device (or a [device] config section) is required")
    if len(run.sweep.fields) != 1:
        raise UsageError("device: give exactly one --omega-c value")
    geom = _geometry(run.device)
    omega_p = _omega_p(run.device, run.sweep.L0_hat)
    spec = run.material.with_field(run.sweep.fields[0])
    r = find_pullin(spec, run.sweep.L0_hat, run.quadrature)
    d = device_translate(geom, r, omega_p)
    table = Table("device", run, ["omega_c_hat", "L0_hat", "kappa", "F0", "lambda",
                                  "lambda_in", "detach_length_max", "pulled_in"])
    table.rows.append([spec.omega_c_hat, d.L0_hat, d.kappa, d.F0, d.lam, d.lambda_in,
                       d.detach_length_max, d.pulled_in])
    return table, r.converged


COMMANDS = {
    "eta": cmd_eta,
    "bifurcation": cmd_bifurcation,
    "pullin-sweep": cmd_pullin_sweep,
    "device": cmd_device,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = resolve_config(args)
        if run.sweep.fields is None:
            if args.command in ("eta", "device"):
                default = (run.material.omega_c_hat,)
            else:
                default = cfgmod.DEFAULT_FIELDS
            run = replace(run, sweep=replace(run.sweep, fields=default))
        table, ok = COMMANDS[args.command](run, args.serial)
    except (cfgmod.ConfigError, UsageError, ValueError) as exc:
        print(f"magnetocasimir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    table.write()
    if not ok:
        print(f"magnetocasimir {args.command}: some points did not converge", file=sys.stderr)
        if not args.allow_partial:
            return EXIT_NONCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
