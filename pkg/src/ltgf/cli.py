"""Command line entry point: ``ltgf simulate | analytic | dist dump | roundtrip``.

Exit status is 0 on success, 1 on usage or configuration errors and 2 on
runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import degree
from .codec import SourceBlock, format_symbol, lt_stream, parse_symbol, random_linear_stream
from .decoders import LinearSystem, bp_decode, ge_decode, ge_square_replace
from .gf import field_new
from .simulator import (
    ExperimentConfig,
    analytic_rows,
    epsilon_grid,
    run_experiment,
    write_csv,
)

log = logging.getLogger("ltgf")

USAGE_ERROR, RUNTIME_ERROR = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(" ", "").split(",") if x)


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.replace(" ", "").split(",") if x)


SIMULATE_KEYS = {
    # config key -> (argparse dest, converter)
    "k": ("k", int),
    "q": ("q", _int_list),
    "dist": ("dist", _str_list),
    "c": ("c", float),
    "delta": ("delta", _float_list),
    "eps-max": ("eps_max", float),
    "eps-step": ("eps_step", float),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "mode": ("mode", str),
    "tail-mode": ("tail_mode", str),
    "workers": ("workers", int),
    "out": ("out", str),
    "plot": ("plot", str),
    "figure": ("figure", str),
}
SIMULATE_DEFAULTS = {
    "k": 100, "q": (4, 8, 16, 32), "dist": ("robust", "raptor", "novel"), "c": 0.05,
    "delta": (0.01, 0.001), "eps_max": 0.05, "eps_step": 0.01, "trials": 10000, "seed": 0,
    "mode": "square", "tail_mode": "per-symbol", "workers": 1, "out": None, "plot": None,
    "figure": None,
}
MODE_NAMES = {"square": "square-replace", "rect": "rectangular",
              "square-replace": "square-replace", "rectangular": "rectangular"}


def read_config(path: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-").lower()
            if key not in SIMULATE_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            dest, conv = SIMULATE_KEYS[key]
            try:
                out[dest] = conv(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from None
    return out


def _resolve(args, config: dict) -> dict:
    merged = dict(SIMULATE_DEFAULTS)
    merged.update(config)
    merged.update({k: v for k, v in vars(args).items() if k in SIMULATE_DEFAULTS and v is not None})
    if args.ci and args.trials is None and "trials" not in config:
        merged["trials"] = 1000
    return merged


def cmd_simulate(args) -> int:
    opts = _resolve(args, read_config(args.config) if args.config else {})
    if not opts["out"]:
        raise UsageError("simulate needs --out (or 'out' in the config file)")
    if opts["mode"] not in MODE_NAMES:
        raise UsageError(f"--mode must be square or rect, got {opts['mode']!r}")
    config = ExperimentConfig(
        K=opts["k"], q_list=tuple(opts["q"]), distributions=tuple(opts["dist"]), c=opts["c"],
        deltas=tuple(opts["delta"]), epsilon_grid=epsilon_grid(opts["eps_max"], opts["eps_step"]),
        trials=opts["trials"], seed=opts["seed"], decode_mode=MODE_NAMES[opts["mode"]],
        tail_mode=opts["tail_mode"], workers=opts["workers"],
    )
    config.validate()
    log.info("simulate: %s", config)
    rows = run_experiment(config)
    write_csv(rows, opts["out"])
    _emit_plots(rows, opts["out"], opts["plot"], opts["figure"])
    return 0


def _emit_plots(rows, csv_path, script, figure) -> None:
    if script or figure:
        from .plotting import emit_plot_script, render_figure

        if script:
            emit_plot_script(rows, script, csv_path)
        if figure:
            render_figure(rows, figure)


def cmd_analytic(args) -> int:
    for q in args.q:
        field_new(q)
    rows = analytic_rows(args.k, args.q, epsilon_grid(args.eps_max, args.eps_step))
    write_csv(rows, args.out)
    _emit_plots(rows, args.out, args.plot, args.figure)
    return 0


def _degree_source(name: str, K: int, q: int, c: float, delta: float, tail_mode: str, rng):
    if name == "ideal":
        return degree.ideal_soliton(K)
    if name == "robust":
        return degree.robust_soliton(degree.RobustSolitonParams(K, c, delta))
    if name == "raptor":
        return degree.raptor_omega(K)
    if name == "novel":
        return degree.novel_omega(q, K, tail_mode, rng)
    raise UsageError(f"unknown distribution {name!r}")


def cmd_dist_dump(args) -> int:
    rng = np.random.default_rng(args.seed)
    src = _degree_source(args.name, args.k, args.q, args.c, args.delta, args.tail_mode, rng)
    pmf = src.marginal() if isinstance(src, degree.NovelSampler) else src
    for d, p in pmf.entries:
        print(f"{d} {p:.9f}")
    return 0


def cmd_roundtrip(args) -> int:
    f = field_new(args.q)
    rng = np.random.default_rng(args.seed)
    block = SourceBlock.random(f, args.k, rng, args.symbol_len)
    if args.dist == "random-linear":
        stream = random_linear_stream(block, rng)
    else:
        stream = lt_stream(block, _degree_source(args.dist, args.k, args.q, args.c, args.delta,
                                                 args.tail_mode, rng), rng)
    symbols = [next(stream) for _ in range(args.n)]
    if args.packets:
        with open(args.packets, "w") as fh:
            fh.writelines(format_symbol(s) + "\n" for s in symbols)
        with open(args.packets) as fh:
            symbols = [parse_symbol(line) for line in fh if line.strip()]
    if args.decoder == "bp":
        report = bp_decode(symbols, args.k, f)
    elif args.decoder == "square":
        if args.n < args.k:
            raise UsageError("square decoding needs --n >= --k")
        report = ge_square_replace(iter(symbols), args.k, f, args.n, rng)
    else:
        report = ge_decode(LinearSystem.from_symbols(symbols, args.k, f))
    print(f"verdict: {report.status}")
    print(f"decoder: {args.decoder}")
    print(f"received: {args.n}")
    print(f"resolved: {report.resolved_count}/{args.k}")
    if not report.success:
        print("symbol mismatches: -")
        return 0
    diff = int(np.count_nonzero(np.any(report.recovered != block.symbols, axis=1)))
    print(f"symbol mismatches: {diff}")
    return 0 if diff == 0 else RUNTIME_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ltgf", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="Monte Carlo failure rate vs overhead")
    s.add_argument("--config")
    s.add_argument("--k", type=int)
    s.add_argument("--q", type=_int_list)
    s.add_argument("--dist", type=_str_list,
                   help="comma list of robust, robust:<delta>, raptor, novel, random-linear")
    s.add_argument("--c", type=float)
    s.add_argument("--delta", type=_float_list)
    s.add_argument("--eps-max", type=float)
    s.add_argument("--eps-step", type=float)
    s.add_argument("--trials", type=int)
    s.add_argument("--ci", action="store_true", help="fast preset: 1000 trials per point")
    s.add_argument("--seed", type=int)
    s.add_argument("--mode", choices=["square", "rect"])
    s.add_argument("--tail-mode", choices=list(degree.TAIL_MODES))
    s.add_argument("--workers", type=int)
    s.add_argument("--out")
    s.add_argument("--plot", help="write a gnuplot script")
    s.add_argument("--figure", help="render a figure (png, pdf, svg)")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analytic", help="closed-form random linear failure rates")
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--q", type=_int_list, required=True)
    a.add_argument("--eps-max", type=float, default=0.05)
    a.add_argument("--eps-step", type=float, default=0.01)
    a.add_argument("--out", required=True)
    a.add_argument("--plot")
    a.add_argument("--figure")
    a.set_defaults(func=cmd_analytic)

    d = sub.add_parser("dist", help="degree distribution utilities")
    dsub = d.add_subparsers(dest="dist_command", required=True, parser_class=_Parser)
    dump = dsub.add_parser("dump", help="print degree and probability columns")
    dump.add_argument("--name", choices=["ideal", "robust", "raptor", "novel"], required=True)
    dump.add_argument("--k", type=int, default=100)
    dump.add_argument("--c", type=float, default=0.05)
    dump.add_argument("--delta", type=float, default=0.01)
    dump.add_argument("--q", type=int, default=32)
    dump.add_argument("--seed", type=int, default=0)
    dump.add_argument("--tail-mode", choices=list(degree.TAIL_MODES), default="per-symbol")
    dump.set_defaults(func=cmd_dist_dump)

    r = sub.add_parser("roundtrip", help="encode, decode and compare one block")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--q", type=int, required=True)
    r.add_argument("--dist", choices=["ideal", "robust", "raptor", "novel", "random-linear"], required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--c", type=float, default=0.05)
    r.add_argument("--delta", type=float, default=0.01)
    r.add_argument("--tail-mode", choices=list(degree.TAIL_MODES), default="per-symbol")
    r.add_argument("--decoder", choices=["ge", "bp", "square"], default="ge")
    r.add_argument("--symbol-len", type=int, default=1)
    r.add_argument("--packets", help="also write the packets in text form and decode from that file")
    r.set_defaults(func=cmd_roundtrip)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:  # ConfigError and FieldError included
        print(f"ltgf: error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as e:  # noqa: BLE001
        print(f"ltgf: failed: {e}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
