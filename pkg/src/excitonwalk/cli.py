"""Command-line interface: ``excitonwalk {simulate,sweep,susceptibility,grover}``.

Sites are numbered from 1 on the command line. Quantities accept an explicit
unit suffix (``10ps``, ``1ns1``, ``35cm1``, ``295K``); bare numbers are read in
the canonical unit (ps, ps^-1, cm^-1, K).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (ete, grover_check, hessian, pathway_map, susceptibility, sweep)
from .dynamics import NotHurwitzError, propagate
from .liouville import build_model
from .model import BathSpec, NetworkError, NetworkSpec, fmo_path, initial_state, load_bath, load_network

EXIT_OK = 0
EXIT_NOT_FOUND = 2
EXIT_INVALID = 3
EXIT_SOLVER = 4
EXIT_USAGE = 64

EXIT_HELP = """exit codes:
  0   success
  2   network file not found
  3   invalid input (network file, parameter value, site index)
  4   numerical failure (generator not Hurwitz, efficiency out of range)
  64  command-line usage error
"""

_UNITS = {
    "time": {"": 1.0, "ps": 1.0, "fs": 1e-3, "ns": 1e3},
    "rate": {"": 1.0, "ps1": 1.0, "ns1": 1e-3, "fs1": 1e3},
    "energy": {"": 1.0, "cm1": 1.0},
    "temperature": {"": 1.0, "K": 1.0},
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z0-9]*)\s*$")


class InputError(ValueError):
    pass


def parse_quantity(text: str, kind: str) -> float:
    """Parse ``"<number><unit>"`` into the canonical unit of ``kind``."""
    match = _QUANTITY.match(text)
    if not match:
        raise InputError(f"cannot parse {kind} value {text!r}")
    number, unit = match.groups()
    factors = _UNITS[kind]
    if unit not in factors:
        allowed = ", ".join(u for u in factors if u)
        raise InputError(f"unit {unit!r} not valid for {kind} (use {allowed})")
    return float(number) * factors[unit]


def parse_init(text: str, n_sites: int):
    kind, _, rest = text.partition(":")
    if kind == "uniform":
        return initial_state("uniform", n_sites)
    if kind not in ("site", "mixture") or not rest:
        raise InputError(f"bad initial state {text!r}; use site:K, mixture:K,L,... or uniform")
    try:
        sites = [int(s) - 1 for s in rest.split(",")]
    except ValueError as exc:
        raise InputError(f"bad site list {rest!r}") from exc
    for s in sites:
        if not (0 <= s < n_sites):
            raise InputError(f"invalid site index {s + 1} (sites are 1..{n_sites})")
    return initial_state(kind, n_sites, sites)


def parse_grid(text: str) -> np.ndarray:
    """``lin:start:stop:count`` or ``log:start:stop:count``."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in ("lin", "log"):
        raise InputError(f"bad grid {text!r}; use lin:START:STOP:COUNT or log:START:STOP:COUNT")
    try:
        start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}") from exc
    if count < 1:
        raise InputError("grid count must be positive")
    if parts[0] == "log":
        if start <= 0 or stop <= 0:
            raise InputError("log grid bounds must be positive")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", required=True,
                   help="network JSON file, or 'fmo' for the bundled FMO complex")
    p.add_argument("--init", default="site:1", help="site:K | mixture:K,L,... | uniform (1-based)")
    p.add_argument("--temperature", help="bath temperature, e.g. 295K")
    p.add_argument("--reorg", help="reorganization energy, e.g. 35cm1")
    p.add_argument("--cutoff", help="bath cutoff, e.g. 150cm1")
    p.add_argument("--trap", action="append", default=[], metavar="SITE:RATE",
                   help="trap rate override, e.g. 3:1ps1 (repeatable)")
    p.add_argument("--loss", help="loss rate, e.g. 1ns1")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default="csv",
                   help="format of tabular outputs")
    p.add_argument("--group-tol", type=float, default=1e-6,
                   help="Bohr-frequency grouping tolerance in cm^-1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="excitonwalk", description=__doc__.splitlines()[0],
                     epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="propagate and report efficiency", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--t-max", default="10ps", help="trajectory length, e.g. 10ps")
    p.add_argument("--dt", default="10fs", help="trajectory sampling step, e.g. 10fs")

    p = sub.add_parser("sweep", help="efficiency versus one parameter", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--param", required=True, choices=("temperature", "reorg", "trap"))
    p.add_argument("--grid", required=True, help="lin:START:STOP:COUNT or log:START:STOP:COUNT "
                   "(canonical units: K, cm^-1, ps^-1)")
    p.add_argument("--trap-site", type=int, help="site whose rate a trap sweep varies (1-based)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("susceptibility", help="efficiency sensitivities", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--method", choices=("analytic", "finite-difference"), default="analytic")
    p.add_argument("--hessian", action="store_true", help="also compute the Hessian")
    p.add_argument("--no-pathways", action="store_true", help="skip the site-pair map")

    p = sub.add_parser("grover", help="check unitary search conditions", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--target", type=int, required=True, help="target site (1-based)")
    p.add_argument("--t-max", default="10ps")
    p.add_argument("--dt", default="1fs")
    p.add_argument("--tol", type=float, default=0.1, help="threshold for alpha and beta")
    return parser


def _load(args) -> tuple[NetworkSpec, BathSpec]:
    path = fmo_path() if args.network == "fmo" else Path(args.network)
    net = load_network(path)
    bath = load_bath(path)
    changes = {}
    if args.temperature is not None:
        changes["temperature"] = parse_quantity(args.temperature, "temperature")
    if args.reorg is not None:
        changes["reorg_energy"] = parse_quantity(args.reorg, "energy")
    if args.cutoff is not None:
        changes["cutoff"] = parse_quantity(args.cutoff, "energy")
    bath = bath.replace(**changes)
    traps = np.array(net.trap_rates)
    for item in args.trap:
        site, sep, rate = item.partition(":")
        if not sep:
            raise InputError(f"bad trap override {item!r}; use SITE:RATE")
        k = int(site) - 1
        if not (0 <= k < net.n_sites):
            raise InputError(f"invalid site index {site} (sites are 1..{net.n_sites})")
        traps[k] = parse_quantity(rate, "rate")
    loss = net.loss_rate if args.loss is None else parse_quantity(args.loss, "rate")
    return net.replace(trap_rates=traps, loss_rate=loss), bath


def _params(net: NetworkSpec, bath: BathSpec) -> dict:
    return {
        "temperature_K": bath.temperature,
        "reorg_cm1": bath.reorg_energy,
        "cutoff_cm1": bath.cutoff,
        "trap_rates_ps1": {str(k + 1): float(r) for k, r in enumerate(net.trap_rates) if r},
        "loss_rate_ps1": net.loss_rate,
    }


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_table(path: Path, header: list[str], rows: list[list], fmt: str) -> Path:
    if fmt == "json":
        path = path.with_suffix(".json")
        _write_json(path, [dict(zip(header, r)) for r in rows])
        return path
    path = path.with_suffix(".csv")
    with path.open("w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(f"{x:.12g}" if isinstance(x, float) else str(x) for x in r) + "\n")
    return path


def cmd_simulate(args) -> int:
    net, bath = _load(args)
    rho0 = parse_init(args.init, net.n_sites)
    t_max = parse_quantity(args.t_max, "time")
    dt = parse_quantity(args.dt, "time")
    if t_max <= 0 or dt <= 0:
        raise InputError("--t-max and --dt must be positive")
    sm = build_model(net, bath, args.group_tol)
    steps = int(round(t_max / dt))
    times = np.linspace(0.0, steps * dt, steps + 1)
    traj = propagate(sm, rho0, times)
    report = ete(sm, rho0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        traj.to_csv(out / "trajectory.csv")
    else:
        n = net.n_sites
        _write_json(out / "trajectory.json", {
            "time_ps": traj.times.tolist(),
            "populations": [[float(r[i, i].real) for i in range(n)] for r in traj.rho],
            "trapped": traj.trapped.tolist(),
            "lost": traj.lost.tolist(),
        })
    doc = report.to_dict() | {"params": _params(net, bath), "init": args.init}
    _write_json(out / "report.json", doc)
    print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK


_SWEEP_NAMES = {"temperature": "temperature", "reorg": "reorg_energy", "trap": "trap_rate"}


def cmd_sweep(args) -> int:
    net, bath = _load(args)
    rho0 = parse_init(args.init, net.n_sites)
    grid = parse_grid(args.grid)
    trap_site = None
    if args.trap_site is not None:
        trap_site = args.trap_site - 1
        if not (0 <= trap_site < net.n_sites):
            raise InputError(f"invalid site index {args.trap_site}")
    reports = sweep(net, bath, _SWEEP_NAMES[args.param], grid, rho0, trap_site=trap_site,
                    jobs=max(1, args.jobs))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = [args.param, "eta", "tau", "eta_loss", "residual"]
    rows = [[float(g), r.eta, r.tau, r.eta_loss, r.residual] for g, r in zip(grid, reports)]
    path = _write_table(out / "curve", header, rows, args.format)
    print(path)
    return EXIT_OK


def cmd_susceptibility(args) -> int:
    net, bath = _load(args)
    rho0 = parse_init(args.init, net.n_sites)
    sm = build_model(net, bath, args.group_tol)
    sus = susceptibility(sm, rho0, args.method)
    doc = {
        "eta": ete(sm, rho0).eta,
        "method": sus.method,
        "susceptibility": sus.as_dict(),
        "sum": sus.total,
        "params": _params(net, bath),
        "init": args.init,
    }
    if args.hessian:
        hess = hessian(sm, rho0, "analytic" if args.method == "analytic" else "finite-difference")
        doc["hessian"] = {"channels": list(hess.channels), "matrix": hess.hessian.tolist(),
                          "sum": float(hess.hessian.sum())}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", doc)
    if not args.no_pathways:
        rows = [[m + 1, n + 1, v] for m, n, v in pathway_map(sm, rho0)]
        _write_table(out / "pathway", ["m", "n", "susceptibility"], rows, args.format)
    print(json.dumps(sus.as_dict(), sort_keys=True))
    return EXIT_OK


def cmd_grover(args) -> int:
    net, _ = _load(args)
    rho0 = parse_init(args.init, net.n_sites)
    target = args.target - 1
    if not (0 <= target < net.n_sites):
        raise InputError(f"invalid site index {args.target} (sites are 1..{net.n_sites})")
    report = grover_check(net, rho0, target, parse_quantity(args.t_max, "time"),
                          parse_quantity(args.dt, "time"), args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = report.to_dict() | {"target": args.target, "init": args.init}
    _write_json(out / "grover.json", doc)
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "susceptibility": cmd_susceptibility,
    "grover": cmd_grover,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: network file not found: {exc.filename or args.network}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (InputError, NetworkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NotHurwitzError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
