"""Command-line front end: bound queries, sweeps, simulation, verification.

Subcommands
-----------
bounds    print outer/leakage/inner for one (K, B, L) point
sweep     write a CSV of bound points over a B range for several L values
simulate  Monte Carlo rate estimates with z-scores against the closed forms
verify    exact-enumeration cross-check of every closed form (small instances)

Exit codes: 0 success, 1 usage error (including guard-rail refusals),
2 runtime/I-O error, 3 verification mismatch.

Options may also be supplied through ``--config FILE`` holding ``key=value``
lines (``#`` comments allowed); explicit flags override file values.  The
``BBP_THREADS`` environment variable caps Monte Carlo worker processes.
"""

from __future__ import annotations

import argparse
import sys

from .bounds import (
    bound_point,
    leakage_rate,
    main_entropy_rate,
    prefix_probability_table,
)
from .estimators import estimate_rates, unseen_table_prefixes
from .model import ModelConfig, compute_schedule
from .oracle import GuardRailError, verify_against_closed_forms

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_MISMATCH = 3

VERIFY_TOL = 1e-12


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_l_list(raw: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad L list: {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty L list")
    return values


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {text!r}")
            key, _, value = text.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(args: argparse.Namespace, argv: list[str], converters: dict) -> None:
    """Fill args from the config file for flags not given on the command line."""
    if not getattr(args, "config", None):
        return
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    for key, raw in _load_config_file(args.config).items():
        if key not in converters:
            raise ValueError(f"unknown config key: {key}")
        if key in explicit:
            continue
        setattr(args, key, converters[key](raw))


def _schedule_or_die(K: int, B: float, L: int):
    # ModelConfig carries the validation rules; reuse them for plain queries.
    ModelConfig(K=K, L=L, B=B)
    return compute_schedule(K, B, L)


def _fmt_schedule(sched) -> str:
    return "[" + ", ".join(f"{c:g}" for c in sched.c) + "]"


def cmd_bounds(args: argparse.Namespace) -> int:
    sched = _schedule_or_die(args.K, args.B, args.L)
    pt = bound_point(args.K, args.B, args.L)
    print(f"K={args.K} B={args.B:g} L={args.L} schedule={_fmt_schedule(sched)}")
    print(f"outer     = {pt.outer:.10g}")
    print(f"leakage   = {pt.leakage:.10g}")
    print(f"inner_raw = {pt.inner_raw:.10g}")
    print(f"inner     = {pt.inner:.10g}")
    return EXIT_OK


def _fmt_b(B: float) -> str:
    return str(int(B)) if B == int(B) else repr(B)


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.B_step <= 0:
        raise ValueError("B step must be positive")
    if args.B_stop < args.B_start:
        raise ValueError("empty B range")
    n_steps = int((args.B_stop - args.B_start) / args.B_step + 1e-9) + 1
    b_grid = [args.B_start + i * args.B_step for i in range(n_steps)]
    rows = []
    for L in sorted(set(args.L)):
        for B in b_grid:
            pt = bound_point(args.K, B, L)
            rows.append(
                f"{args.K},{L},{_fmt_b(B)},{pt.outer!r},{pt.leakage!r},"
                f"{pt.inner_raw!r},{pt.inner!r}"
            )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("K,L,B,outer,leakage,inner_raw,inner\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.blocks < 1:
        raise ValueError("blocks must be >= 1")
    config = ModelConfig(
        K=args.K, L=args.L, B=args.B, seed=args.seed, blocks=args.blocks
    )
    sched = compute_schedule(args.K, args.B, args.L)
    if not sched.is_integral:
        print(
            f"warning: fractional schedule {_fmt_schedule(sched)} is floored to "
            f"{list(sched.c_int)} for simulation; closed-form agreement is "
            "only approximate",
            file=sys.stderr,
        )
    main_est, leak_est, stats = estimate_rates(
        config, sched, dump_path=args.dump_transcripts
    )
    closed_main = main_entropy_rate(args.K, args.B, args.L)
    closed_leak = leakage_rate(args.K, args.B, args.L)
    table = prefix_probability_table(args.K, args.B, args.L)

    def z(est, closed):
        if est.stderr == 0.0:
            return 0.0 if est.value == closed else float("inf")
        return (est.value - closed) / est.stderr

    print(
        f"K={args.K} B={args.B:g} L={args.L} blocks={args.blocks} "
        f"seed={args.seed} schedule={_fmt_schedule(sched)}"
    )
    print(
        f"main_rate estimate={main_est.value:.10g} stderr={main_est.stderr:.4g} "
        f"closed={closed_main:.10g} z={z(main_est, closed_main):+.3f}"
    )
    print(
        f"leakage   estimate={leak_est.value:.10g} stderr={leak_est.stderr:.4g} "
        f"closed={closed_leak:.10g} z={z(leak_est, closed_leak):+.3f}"
    )
    print(
        f"clamped_probes={stats.clamped_probes} "
        f"cost_violations={stats.cost_violations} "
        f"unseen_table_prefixes={len(unseen_table_prefixes(stats, table))}"
    )
    if args.dump_transcripts:
        print(f"transcripts written to {args.dump_transcripts}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    _schedule_or_die(args.K, args.B, args.L)
    report = verify_against_closed_forms(args.K, args.B, args.L, tol=VERIFY_TOL)
    print(report.render())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def build_parser(require_flags: bool = True) -> _Parser:
    """Build the CLI parser.

    ``require_flags=False`` defers the required-option check to ``main`` so a
    ``--config`` file may supply K/B/L; the check then runs after the merge.
    """
    parser = _Parser(prog="bbp-secrecy", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, converters, required=()):
        p.add_argument("--config", help="key=value file; flags take precedence")
        p.set_defaults(_converters=converters, _required=required)

    p = sub.add_parser("bounds", help="closed-form bounds at one (K, B, L)")
    p.add_argument("--K", type=int, required=require_flags, help="number of beams")
    p.add_argument("--B", type=float, required=require_flags, help="per-symbol cost budget")
    p.add_argument("--L", type=int, required=require_flags, help="channel uses per block")
    add_common(p, {"K": int, "B": float, "L": int}, required=("K", "B", "L"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="CSV of bound points over a B range")
    p.add_argument("--K", type=int, default=32)
    p.add_argument(
        "--L", type=_parse_l_list, default=[2, 5, 8, 12], help="comma-separated list"
    )
    p.add_argument("--B-start", type=float, default=1.0, dest="B_start")
    p.add_argument("--B-stop", type=float, default=32.0, dest="B_stop")
    p.add_argument("--B-step", type=float, default=1.0, dest="B_step")
    p.add_argument("--out", default="sweep.csv", help="output CSV path")
    add_common(
        p,
        {
            "K": int,
            "L": _parse_l_list,
            "B_start": float,
            "B_stop": float,
            "B_step": float,
            "out": str,
        },
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo estimates vs closed forms")
    p.add_argument("--K", type=int, required=require_flags)
    p.add_argument("--B", type=float, required=require_flags)
    p.add_argument("--L", type=int, required=require_flags)
    p.add_argument("--blocks", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--dump-transcripts",
        dest="dump_transcripts",
        metavar="PATH",
        help="write one transcript per line to PATH",
    )
    add_common(
        p,
        {
            "K": int,
            "B": float,
            "L": int,
            "blocks": int,
            "seed": int,
            "dump_transcripts": str,
        },
        required=("K", "B", "L"),
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="exact-enumeration check of the closed forms")
    p.add_argument("--K", type=int, required=require_flags)
    p.add_argument("--B", type=float, required=require_flags)
    p.add_argument("--L", type=int, required=require_flags)
    add_common(p, {"K": int, "B": float, "L": int}, required=("K", "B", "L"))
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    has_config = any(t == "--config" or t.startswith("--config=") for t in argv)
    parser = build_parser(require_flags=not has_config)
    try:
        args = parser.parse_args(argv)
        _apply_config(args, argv, args._converters)
        missing = [k for k in args._required if getattr(args, k, None) is None]
        if missing:
            parser.error(
                "the following arguments are required: "
                + ", ".join(f"--{k}" for k in missing)
            )
        return args.func(args)
    except GuardRailError as exc:
        print(f"bbp-secrecy: refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"bbp-secrecy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bbp-secrecy: i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
