"""apt-sim command-line tool.

Thin client over the service handlers: every subcommand parses a TOML
config into the shared request schema, calls the same handler the HTTP
endpoints use, and formats the response as CSV or key=value text.

Exit codes: 0 success, 1 input/config errors, 2 computation errors.
"""

from __future__ import annotations

import argparse
import sys

from .config import StackConfig, load_config
from .errors import AptSimError, ConfigError
from .service import handlers
from .service.models import SweepResponse

CSV_HEADER = (
    "frequency_hz,re_zin_ohm,im_zin_ohm,p_in_w,p_load_w,p_backing_w,efficiency"
)


def _num(value: float) -> str:
    return f"{value:.12g}"


def sweep_csv(response: SweepResponse) -> str:
    """Serialize a sweep as CSV with 12 significant digits.

    The error column appears only when at least one row failed, keeping
    the plain header byte-stable for clean runs.
    """
    failed = response.failed_rows > 0
    header = CSV_HEADER + (",error" if failed else "")
    lines = [header]
    for row in response.rows:
        fields = [
            _num(row.frequency_hz),
            _num(row.re_zin_ohm),
            _num(row.im_zin_ohm),
            _num(row.p_in_w),
            _num(row.p_load_w),
            _num(row.p_backing_w),
            _num(row.efficiency),
        ]
        if failed:
            fields.append(row.error or "")
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _load(path: str) -> StackConfig:
    return load_config(path)


def cmd_sweep(args) -> int:
    config = _load(args.config)
    response = handlers.run_sweep(config)
    _write_text(args.out, sweep_csv(response))
    return 2 if response.failed_rows else 0


def cmd_optimize(args) -> int:
    config = _load(args.config)
    response = handlers.run_optimize(config)
    for key, value in (
        ("frequency_hz", response.frequency_hz),
        ("z_opt_re_ohm", response.z_opt_re_ohm),
        ("z_opt_im_ohm", response.z_opt_im_ohm),
        ("p_max_w", response.p_max_w),
        ("efficiency_at_opt", response.efficiency_at_opt),
        ("z_eff_re_ohm", response.z_eff_re_ohm),
        ("z_eff_im_ohm", response.z_eff_im_ohm),
        ("efficiency_max", response.efficiency_max),
        ("p_at_efficiency_opt_w", response.p_at_efficiency_opt_w),
    ):
        print(f"{key}={_num(value)}")
    return 0


def cmd_check(args) -> int:
    config = _load(args.config)
    response = handlers.run_check(config, corrupt_sign=args.corrupt_sign)
    print(f"max_deviation={_num(response.max_deviation)}")
    print(f"frequencies_checked={response.frequencies_checked}")
    print(f"threshold={_num(response.threshold)}")
    print(f"passed={'true' if response.passed else 'false'}")
    return 0 if response.passed else 2


def cmd_netlist(args) -> int:
    config = _load(args.config)
    response = handlers.run_netlist(
        config,
        f_center_hz=args.f_center,
        lossy_lines=args.lossy_lines,
        omit_negative_capacitance=args.omit_negative_capacitance,
    )
    _write_text(args.out, response.netlist)
    return 0


def cmd_materials(args) -> int:
    response = handlers.list_materials()
    print(f"# {response.provenance}")
    for material in response.materials:
        fields = [
            f"name={material.name}",
            f"kind={material.kind}",
            f"density_kg_m3={_num(material.density_kg_m3)}",
            f"speed_m_s={_num(material.speed_m_s)}",
            f"loss_tangent={_num(material.loss_tangent)}",
        ]
        if material.kind == "piezo":
            fields.append(f"h_v_per_m={_num(material.h_v_per_m)}")
            fields.append(
                f"permittivity_f_per_m={_num(material.permittivity_f_per_m)}"
            )
        fields.append(f'note="{material.note}"')
        print(" ".join(fields))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apt-sim",
        description=(
            "1-D acoustic power transfer simulator: sweeps, load "
            "optimization, solver cross-checks, and netlist export."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a frequency sweep, emit CSV")
    p.add_argument("config", help="TOML stack configuration")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="optimal receiver load at one frequency")
    p.add_argument("config")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser(
        "check", help="cross-check the two solver paths across the sweep band"
    )
    p.add_argument("config")
    p.add_argument("--corrupt-sign", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("netlist", help="export the equivalent-circuit netlist")
    p.add_argument("config")
    p.add_argument("--out", help="netlist output path (default: stdout)")
    p.add_argument("--f-center", type=float, help="analysis frequency (Hz)")
    p.add_argument(
        "--lossy-lines",
        action="store_true",
        help="emit lumped fits for lossy layers instead of refusing them",
    )
    p.add_argument(
        "--omit-negative-capacitance",
        action="store_true",
        help="drop the negative capacitance (nonstandard simplification)",
    )
    p.set_defaults(func=cmd_netlist)

    p = sub.add_parser("materials", help="list material presets")
    p.set_defaults(func=cmd_materials)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AptSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
