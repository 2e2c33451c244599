"""Command-line entry point.

    airs solve  [--config PATH] [--set KEY=VALUE ...] [--grid NX,NY] [--step-m S] [--out CSV]
    airs single --target-x X [--target-y Y] [...]
    airs sweep  --kind {ratio,gain,elements,placement,power,single} [...]

Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 solver failure.
CSV files go to ``--out`` or, failing that, to ``$AIRS_OUTPUT_DIR`` (default: cwd).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from airs.pipeline import SweepResult, SweepSpec, run_sweep, solve
from airs.placement import single_location_placement, single_location_ratio
from airs.scenario import ConfigError, GroundPoint, ScenarioConfig, load_config, make_grid

log = logging.getLogger("airs")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
OUTPUT_DIR_ENV = "AIRS_OUTPUT_DIR"

KIND_ALIASES = {
    "ratio": "ratio_curve",
    "gain": "gain_profile",
    "elements": "elements_sweep",
    "placement": "placement_sweep",
    "power": "power_sweep",
    "single": "single_location",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML/JSON scenario file, or 'default'")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], dest="overrides",
                        help="override one scenario field (repeatable)")
    common.add_argument("--grid", metavar="NX,NY", help="area sampling resolution")
    common.add_argument("--out", metavar="PATH", help="CSV output path")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="airs", description="AIRS placement and beamforming design.")
    sub = parser.add_subparsers(dest="command", metavar="{solve,single,sweep}", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", parents=[common], help="max-min SNR design over the coverage area")
    p.add_argument("--step-m", type=float, default=10.0, help="placement search step (m)")

    p = sub.add_parser("single", parents=[common], help="closed-form single-target placement")
    p.add_argument("--target-x", type=float, required=True)
    p.add_argument("--target-y", type=float, default=0.0)
    p.add_argument("--n-step", type=int, default=50, help="N spacing of the printed SNR table")

    p = sub.add_parser("sweep", parents=[common], help="regenerate a figure's data table")
    p.add_argument("--kind", required=True, choices=sorted(KIND_ALIASES) + sorted(KIND_ALIASES.values()),
                   metavar="{" + ",".join(KIND_ALIASES) + "}")
    p.add_argument("--step-m", type=float, default=10.0, help="placement search step (m)")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--target-x", type=float)
    p.add_argument("--target-y", type=float, default=0.0)
    return parser


def resolve_config(args) -> ScenarioConfig:
    if args.config in (None, "default"):
        cfg = ScenarioConfig()
    else:
        if not Path(args.config).is_file():
            raise UsageError(f"airs: error: config file not found: {args.config}")
        cfg = load_config(args.config)
    changes = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"airs: error: --set expects KEY=VALUE, got {item!r}")
        changes[key.strip()] = value
    if args.grid:
        try:
            nx, ny = (int(v) for v in args.grid.split(","))
        except ValueError:
            raise UsageError(f"airs: error: --grid expects NX,NY, got {args.grid!r}") from None
        changes["grid_nx"], changes["grid_ny"] = nx, ny
    return ScenarioConfig.from_mapping(changes, base=cfg) if changes else cfg


def _output_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def _write_csv(path: Path, header, rows):
    table = SweepResult("snr_map", tuple(h[0] for h in header), tuple(h[1] for h in header), tuple(rows))
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path)


def cmd_solve(args, cfg: ScenarioConfig, out) -> None:
    grid = make_grid(cfg)
    res = solve(cfg, step_m=args.step_m, grid=grid)
    part = res.phases.partition
    boundary = cfg.boundary_point
    print(f"placement q*          : ({res.placement[0]:.2f}, {res.placement[1]:.2f}) m", file=out)
    print(f"sub-arrays L          : {part.num_subarrays} (sizes {', '.join(map(str, part.subarray_sizes))})",
          file=out)
    print(f"max sin-AoD deviation : {part.max_deviation:.4f}", file=out)
    print(f"worst-case SNR        : {res.worst_snr_db:.2f} dB", file=out)
    print(f"worst point           : ({res.worst_point[0]:.2f}, {res.worst_point[1]:.2f}) m", file=out)
    if res.worst_at(boundary):
        print(f"boundary check        : worst case at ({boundary[0]:.2f}, {boundary[1]:.2f}) as expected",
              file=out)
    else:
        print(f"boundary check        : VIOLATED, worst case is not at ({boundary[0]:.2f}, {boundary[1]:.2f})",
              file=out)
    path = _output_path(args, "snr_map.csv")
    rows = [(p[0], p[1], float(s)) for p, s in zip(res.grid, res.snr_map)]
    _write_csv(path, (("x_m", "m"), ("y_m", "m"), ("snr_db", "dB")), rows)
    print(f"snr map               : {path}", file=out)


def cmd_single(args, cfg: ScenarioConfig, out) -> None:
    target = GroundPoint(args.target_x, args.target_y)
    D = (target[0] ** 2 + target[1] ** 2) ** 0.5
    if D == 0:
        raise ConfigError("target coincides with the source node (D = 0)")
    sol = single_location_ratio(cfg.altitude_m / D)
    q, snr_db = single_location_placement(cfg, target)
    print(f"rho = H/D             : {sol.rho:.6g} ({sol.regime})", file=out)
    print(f"optimal xi*           : {', '.join(f'{r:.6f}' for r in sol.roots)}", file=out)
    print(f"chosen q*             : ({q[0]:.2f}, {q[1]:.2f}) m", file=out)
    print(f"SNR at target (N={cfg.irs_elements:d}) : {snr_db:.2f} dB", file=out)

    spec = SweepSpec("single_location", config=cfg, target=target, step=float(args.n_step))
    table = run_sweep(spec)
    print("     N   SNR [dB]", file=out)
    for n, snr in zip(table.column("N"), table.column("snr_db")):
        print(f"{int(n):6d}   {snr:8.2f}", file=out)
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(path)
        print(f"table written to {path}", file=out)


def cmd_sweep(args, cfg: ScenarioConfig, out) -> None:
    kind = KIND_ALIASES.get(args.kind, args.kind)
    target = GroundPoint(args.target_x, args.target_y) if args.target_x is not None else None
    spec = SweepSpec(kind, config=cfg, start=args.start, stop=args.stop, step=args.step,
                     target=target, step_m=args.step_m)
    table = run_sweep(spec)
    path = _output_path(args, f"sweep_{kind}.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path)
    print(f"{kind}: {len(table)} rows, columns {', '.join(table.header())}", file=out)
    print(f"written to {path}", file=out)


COMMANDS = {"solve": cmd_solve, "single": cmd_single, "sweep": cmd_sweep}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = resolve_config(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"airs: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE

    try:
        COMMANDS[args.command](args, cfg, out)
    except ConfigError as exc:
        print(f"airs: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any solver failure maps to one exit code
        log.debug("solver failure", exc_info=True)
        print(f"airs: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
