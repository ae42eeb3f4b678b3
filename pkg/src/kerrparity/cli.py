"""Command-line front end: ``kerrparity <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .errors import NumericalError, UsageError
from . import sweep as sw

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {"format": "csv", "convention": "both", "tol": sw.DEFAULT_TOL, "oracle": False, "grid": 3, "out": None}
_OPTION_KEYS = {"out", "format", "convention", "tol", "oracle", "grid", "target", "free", "lo", "hi", "gnuplot"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    return format(float(v), ".16e")


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def write_rows(rows: list[dict], fmt: str, stream, meta: dict | None = None) -> None:
    if fmt == "json":
        payload = {**(meta or {}), "rows": [{k: _json_value(float(v) if not isinstance(v, str) else v) for k, v in r.items()} for r in rows]}
        stream.write(json.dumps(_json_value(payload), indent=2) + "\n")
        return
    if not rows:
        return
    writer = csv.writer(stream, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for r in rows:
        writer.writerow([_format_value(r.get(k, math.nan)) for k in header])


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _parse_float(name, text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be a number, got {text!r}") from None


def _parse_assignments(items) -> dict[str, float]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_float(k.strip(), v.strip())
    return out


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def _merged(args) -> dict:
    """Defaults, then config file, then command-line flags."""
    opts = dict(DEFAULTS)
    fixed: dict[str, float] = {}
    axes = []
    if args.config:
        for k, v in read_config(args.config).items():
            if k in _OPTION_KEYS:
                opts[k] = v
            elif k == "axis":
                axes.append(sw.Axis.parse(v))
            else:
                fixed[k] = _parse_float(k, v)
    for k in _OPTION_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    fixed.update(_parse_assignments(getattr(args, "set", None)))
    cli_axes = [sw.Axis.parse(a) for a in getattr(args, "axis", None) or ()]
    names = {a.name for a in cli_axes}
    opts["axes"] = [a for a in axes if a.name not in names] + cli_axes
    opts["fixed"] = fixed
    opts["tol"] = _parse_float("tol", opts["tol"])
    opts["oracle"] = _parse_bool(opts["oracle"])
    if opts["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {opts['format']!r}")
    sw.conventions_for(opts["convention"])
    return opts


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(rows, opts, meta=None):
    stream, close = _open_out(opts["out"])
    try:
        write_rows(rows, opts["format"], stream, meta)
    finally:
        if close:
            stream.close()


def gnuplot_script(spec: sw.SweepSpec, data_path: str, columns: list[str]) -> str:
    """A small gnuplot script plotting every error column of a CSV sweep against the first axis."""
    x = spec.axes[0].name
    xi = columns.index(x) + 1
    ys = [c for c in columns if c.startswith(("point_", "window_", "p_"))]
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
        "set ylabel 'error probability'",
    ]
    if spec.axes[0].scale == "log":
        lines.append("set logscale x")
    plots = [f"'{data_path}' using {xi}:{columns.index(y) + 1} with points" for y in ys]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def cmd_channel(args) -> int:
    opts = _merged(args)
    spec = sw.SweepSpec(args.command, tuple(opts["axes"]), opts["fixed"], opts["convention"], opts["oracle"], opts["tol"])
    rows = sw.run_sweep(spec)
    _emit(rows, opts, {"channel": spec.channel, "convention": spec.convention})
    return EXIT_OK


def cmd_figure(args) -> int:
    opts = _merged(args)
    spec = sw.figure_spec(
        args.name,
        axes=opts["axes"],
        fixed=opts["fixed"],
        convention=opts["convention"],
        oracle_check=opts["oracle"],
        tol=opts["tol"],
    )
    rows = sw.run_sweep(spec)
    _emit(rows, opts, {"figure": args.name, "channel": spec.channel, "convention": spec.convention})
    if opts.get("gnuplot"):
        if opts["out"] in (None, "-") or opts["format"] != "csv":
            raise UsageError("--gnuplot needs --out FILE with csv format")
        Path(opts["gnuplot"]).write_text(gnuplot_script(spec, opts["out"], list(rows[0])), encoding="utf-8")
    return EXIT_OK


def cmd_threshold(args) -> int:
    opts = _merged(args)
    if opts.get("target") is None or opts.get("free") is None:
        raise UsageError("threshold needs --target and --free")
    conv = "paper" if opts["convention"] == "both" else opts["convention"]
    lo = None if opts.get("lo") is None else _parse_float("lo", opts["lo"])
    hi = None if opts.get("hi") is None else _parse_float("hi", opts["hi"])
    res = sw.solve_threshold(args.channel, _parse_float("target", opts["target"]), opts["free"], opts["fixed"], lo, hi, conv)
    row = res.as_row()
    row["convention"] = conv
    _emit([row], opts)
    return EXIT_OK


def cmd_verify(args) -> int:
    opts = _merged(args)
    tol = float(args.tol) if args.tol is not None else None
    report = sw.verify(args.channel, int(opts["grid"]), tol)
    _emit(report.rows, opts, report.summary())
    s = report.summary()
    devs = ", ".join(f"{k}={v:.3e}" for k, v in s["max_dev"].items())
    print(
        f"verify {s['channel']}: {s['points']} points, {s['skipped']} skipped, max deviation {devs}, "
        f"tolerance {s['tolerance']:.1e}, verdict {s['verdict']}: {'PASS' if s['passed'] else 'FAIL'}",
        file=sys.stderr,
    )
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--convention", choices=("paper", "normalized", "both"))
    common.add_argument("--tol", type=float, help="integration / comparison tolerance")
    common.add_argument("--oracle", action="store_const", const=True, help="add oracle columns")
    common.add_argument("--config", help="key = value file; command-line flags override it")
    common.add_argument("--set", action="append", metavar="NAME=VALUE", help="fix a channel parameter")
    common.add_argument("--axis", action="append", metavar="NAME=LO:HI:N[:log]", help="sweep a parameter")

    parser = _Parser(prog="kerrparity", description="Error models of the bus-mediated parity gate.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    for ch in sw.CHANNELS:
        p = sub.add_parser(ch, parents=[common], help=f"sweep the {ch} channel")
        p.set_defaults(func=cmd_channel)

    p = sub.add_parser("figure", parents=[common], help="regenerate a figure grid")
    p.add_argument("name", choices=tuple(sw.FIGURES))
    p.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("threshold", parents=[common], help="solve for the parameter value hitting a target error")
    p.add_argument("channel", choices=sw.CHANNELS)
    p.add_argument("--target", type=float)
    p.add_argument("--free", help="parameter to solve for")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("verify", parents=[common], help="compare formulas with the oracle")
    p.add_argument("channel", choices=sw.CHANNELS)
    p.add_argument("--grid", type=int, help="points per axis (default 3)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"kerrparity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"kerrparity: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
