"""Command-line front end: spectrum, sweep, holonomy and verify commands.

Configuration is a flat key=value file (# comments) mirrored one-to-one
by command-line flags; flags override file values and unknown keys are
rejected.  All floating-point output uses 17 significant digits so the
CSV round-trips the underlying doubles exactly, and every random choice
funnels through the single ``seed`` key.  Exit codes: 0 success, 1
computational failure or invariant violation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .eigensolver import NoConvergenceError, SolverConfig, solve
from .experiments import FULL, SweepConfig, flux_sweep
from .gauge import GaugeError, uniform_flux_field, wilson_loop
from .hamiltonian import (
    EVEN,
    ODD,
    HoppingParams,
    assemble,
    restrict,
    sector_isometry,
)
from .lattice import (
    TOPOLOGIES,
    LatticeError,
    LoopError,
    build_lattice,
    center_loop,
    homology_class,
    offset_loop,
)
from .svgplot import render_sweep_svg
from .verify import run_verification

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_CONFIG = 2

_INPUT_ERRORS = (LatticeError, LoopError, GaugeError)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    topology: str = "moebius"
    nx: int = 48
    ny: int = 9
    tx: float = 1.0
    ty: float = 1.0
    f: float = 0.0
    f_min: float = -0.25
    f_max: float = 1.25
    f_steps: int = 151
    k: int = 6
    solver: str = "auto"
    tol: float = 1e-10
    seed: int = 12345
    sectors: str = "full,even,odd"
    out: Optional[str] = None
    plot: Optional[str] = None
    strict: bool = False

    def sector_list(self) -> tuple:
        names = tuple(s.strip() for s in self.sectors.split(",") if s.strip())
        for name in names:
            if name not in (FULL, EVEN, ODD):
                raise ConfigError(f"unknown sector {name!r} in key 'sectors'")
        if not names:
            raise ConfigError("key 'sectors' names no sector")
        return names

    def solver_config(self) -> SolverConfig:
        try:
            return SolverConfig(k=self.k, tol=self.tol, seed=self.seed, method=self.solver)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_INT_KEYS = ("nx", "ny", "f_steps", "k", "seed")
_FLOAT_KEYS = ("tx", "ty", "f", "f_min", "f_max", "tol")
_BOOL_KEYS = ("strict",)


def _parse_value(key: str, text: str):
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _FLOAT_KEYS:
            return float(text)
        if key in _BOOL_KEYS:
            low = text.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for key {key!r}: {exc}") from exc


def load_config_file(path: str) -> dict:
    """Parse a key = value config file; unknown keys are an error."""
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, text = (part.strip() for part in line.split("=", 1))
        values[key] = _parse_value(key, text)
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key in _FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    config = RunConfig(**values)
    if config.topology not in TOPOLOGIES:
        raise ConfigError(f"topology must be one of {TOPOLOGIES}, got {config.topology!r}")
    return config


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(config: RunConfig, stdout) -> int:
    sectors = config.sector_list()
    if len(sectors) == 1:
        sector = sectors[0]
    elif FULL in sectors:
        sector = FULL
    else:
        raise ConfigError("spectrum needs a single sector (or 'full' among them)")
    try:
        lat = build_lattice(config.nx, config.ny, config.topology)
        h = assemble(lat, uniform_flux_field(lat, config.f), HoppingParams(config.tx, config.ty))
        if sector in (EVEN, ODD):
            h = restrict(h, sector_isometry(lat, sector))
    except _INPUT_ERRORS as exc:
        raise ConfigError(str(exc)) from exc
    cfg = dataclasses.replace(config.solver_config(), k=min(config.k, h.n))
    result = solve(h, cfg)
    stdout.write("index,eigenvalue,residual\n")
    for idx, (val, res) in enumerate(zip(result.values, result.residuals)):
        stdout.write(f"{idx},{_fmt(float(val))},{_fmt(float(res))}\n")
    return EXIT_OK


_CSV_COLUMNS = ("f", "e0_full", "e0_even", "e0_odd", "gap", "node_amp", "current", "status")


def render_sweep_csv(records) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for rec in records:
        lines.append(",".join(_fmt(getattr(rec, col)) for col in _CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> list:
    """Parse sweep CSV back into row dicts (floats, None for empty)."""
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    if header != list(_CSV_COLUMNS):
        raise ConfigError(f"unexpected CSV header {header}")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row = {}
        for col, cell in zip(header, cells):
            if col == "status":
                row[col] = cell
            else:
                row[col] = float(cell) if cell else None
        rows.append(row)
    return rows


def cmd_sweep(config: RunConfig, stdout) -> int:
    try:
        sweep_cfg = SweepConfig(
            nx=config.nx,
            ny=config.ny,
            topology=config.topology,
            tx=config.tx,
            ty=config.ty,
            f_min=config.f_min,
            f_max=config.f_max,
            f_steps=config.f_steps,
            k=config.k,
            solver=config.solver_config(),
            sectors=config.sector_list(),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    records = flux_sweep(sweep_cfg)
    csv_text = render_sweep_csv(records)
    if config.out:
        Path(config.out).write_text(csv_text, encoding="utf-8", newline="\n")
    else:
        stdout.write(csv_text)
    if config.plot:
        Path(config.plot).write_text(render_sweep_svg(records), encoding="utf-8", newline="\n")
    failed = sum(1 for rec in records if rec.status != "ok")
    if failed and config.strict:
        print(f"{failed} of {len(records)} sweep points failed to converge", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_holonomy(config: RunConfig, loop_spec: str, stdout) -> int:
    try:
        lat = build_lattice(config.nx, config.ny, config.topology)
        if loop_spec == "center":
            loop = center_loop(lat)
        elif loop_spec.startswith("offset="):
            try:
                row = int(loop_spec.split("=", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"bad loop selector {loop_spec!r}") from exc
            loop = offset_loop(lat, row)
        else:
            raise ConfigError(f"loop selector must be 'center' or 'offset=<j>', got {loop_spec!r}")
        field = uniform_flux_field(lat, config.f)
        result = wilson_loop(field, loop)
        cls = homology_class(lat, loop)
    except _INPUT_ERRORS as exc:
        raise ConfigError(str(exc)) from exc
    stdout.write(f"homology_class {cls}\n")
    stdout.write(f"wilson_angle {_fmt(result.angle)}\n")
    stdout.write(f"holonomy_re {_fmt(result.holonomy.real)}\n")
    stdout.write(f"holonomy_im {_fmt(result.holonomy.imag)}\n")
    return EXIT_OK


def cmd_verify(config: RunConfig, broken_seam: bool, stdout) -> int:
    results = run_verification(seed=config.seed, broken_seam=broken_seam)
    all_passed = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        all_passed &= res.passed
        stdout.write(f"{status} {res.name}: {res.detail} [{res.seconds:.2f}s]\n")
    stdout.write(f"{'all checks passed' if all_passed else 'SUITE FAILED'}\n")
    return EXIT_OK if all_passed else EXIT_COMPUTE


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key = value config file")
    parser.add_argument("--topology", choices=TOPOLOGIES)
    for key in _INT_KEYS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    for key in _FLOAT_KEYS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
    parser.add_argument("--solver", choices=("dense", "lanczos", "auto"))
    parser.add_argument("--sectors", help="comma list from full,even,odd")
    parser.add_argument("--out", help="CSV output path (default: stdout)")
    parser.add_argument("--plot", help="SVG output path")
    parser.add_argument("--strict", action="store_const", const=True, default=None,
                        help="exit 1 if any sweep point fails to converge")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mobiusflux",
        description="Flux quantization experiments on annulus and Moebius lattice rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="k lowest eigenvalues at one flux (CSV to stdout)")
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="flux sweep to CSV, optional SVG plot")
    _add_config_flags(p)

    p = sub.add_parser("holonomy", help="homology class and Wilson loop of a canonical loop")
    _add_config_flags(p)
    p.add_argument("--loop", default="center", metavar="center|offset=<j>",
                   help="loop selector (default: center)")

    p = sub.add_parser("verify", help="run the invariant suite, exit 0 iff all checks pass")
    _add_config_flags(p)
    p.add_argument("--broken-seam", action="store_true", help=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    stdout = sys.stdout
    try:
        config = build_config(args)
        if args.command == "spectrum":
            return cmd_spectrum(config, stdout)
        if args.command == "sweep":
            return cmd_sweep(config, stdout)
        if args.command == "holonomy":
            return cmd_holonomy(config, args.loop, stdout)
        if args.command == "verify":
            return cmd_verify(config, args.broken_seam, stdout)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
