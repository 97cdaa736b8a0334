"""Command-line front end.

Subcommands: count, density, coprime-const, montecarlo, asymptotic, rho.
Exit codes: 0 success, 2 configuration error, 3 resource error,
4 convergence warning under --strict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from mpmath import mp, mpf

from . import constants, counting, montecarlo, specfun

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_CONVERGENCE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


class ConfigError(ValueError):
    pass


def _parse_int(text: str) -> int:
    """Integer with scientific shorthand: '1e8' -> 100000000."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}")
    if v != int(v):
        raise ConfigError(f"not an integer: {text!r}")
    return int(v)


def parse_range(text: str) -> tuple[int, int]:
    """'LO:HI' inclusive; a bare 'HI' means 1:HI."""
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = _parse_int(lo_s), _parse_int(hi_s)
    else:
        lo, hi = 1, _parse_int(text)
    if lo < 1 or hi < lo:
        raise ConfigError(f"empty or invalid range {lo}:{hi}")
    return lo, hi


def _threads(flag_value) -> int:
    """Flag beats CBC_THREADS beats available parallelism."""
    if flag_value is not None:
        if flag_value < 1:
            raise ConfigError(f"threads must be >= 1, got {flag_value}")
        return flag_value
    env = os.environ.get("CBC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"CBC_THREADS is not an integer: {env!r}")
        if n < 1:
            raise ConfigError(f"CBC_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def cmd_count(args) -> int:
    lo, hi = parse_range(args.range)
    if args.ell_max < 0:
        raise ConfigError(f"ell-max must be >= 0, got {args.ell_max}")
    threads = _threads(args.threads)
    ell_max = max(args.ell_max, 1)
    table = None
    start = lo
    if args.checkpoint and os.path.exists(args.checkpoint):
        prev = counting.checkpoint_read(args.checkpoint)
        if (
            prev.range_lo == lo
            and prev.range_hi <= hi
            and prev.ell_max == ell_max
            and (prev.coprime_count is not None or not args.coprime)
        ):
            table = prev
            start = prev.range_hi + 1
        # otherwise the checkpoint belongs to a different run; recompute
    chunk = args.segment_size * 64
    pos = start
    while pos <= hi:
        end = min(pos + chunk - 1, hi)
        part = counting.count_range(
            pos,
            end,
            ell_max=ell_max,
            include_coprime=args.coprime,
            segment_size=args.segment_size,
            threads=threads,
        )
        table = part if table is None else counting.merge(table, part)
        if args.checkpoint:
            counting.checkpoint_write(table, args.checkpoint)
        pos = end + 1
    out = CountTableView(table, args.ell_max, args.coprime)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "range_lo": lo,
                    "range_hi": hi,
                    "rows": [{"ell": e, "count": c} for e, c in out.rows()],
                }
            )
        )
    else:
        print("range_lo,range_hi,ell,count")
        for e, c in out.rows():
            print(f"{lo},{hi},{e},{c}")
    return EXIT_OK


class CountTableView:
    """Rows to print: ell = 0 means the coprime count."""

    def __init__(self, table, ell_max: int, coprime: bool):
        self.table = table
        self.ell_max = ell_max
        self.coprime = coprime

    def rows(self):
        out = []
        if self.coprime:
            out.append((0, self.table.coprime_count))
        for ell in range(1, self.ell_max + 1):
            out.append((ell, self.table.counts_by_ell[ell - 1]))
        return out


def cmd_density(args) -> int:
    if not 1 <= args.ell <= 30:
        raise ConfigError(f"ell must be in [1, 30], got {args.ell}")
    est = constants.compute_cl(
        args.ell, precision=args.precision, nodes=args.nodes, tol=args.tol
    )
    print(est.to_json())
    if est.warning and args.strict:
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_coprime_const(args) -> int:
    est = constants.compute_coprime_c(precision=args.precision, nodes=args.nodes)
    print(est.to_json())
    if est.warning and args.strict:
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    if args.ell < 1:
        raise ConfigError(f"ell must be >= 1, got {args.ell}")
    if args.depth < 2 * args.ell + 2:
        raise ConfigError(f"depth must be >= 2*ell+2, got {args.depth}")
    workers = _threads(args.workers)
    res = montecarlo.mc_estimate(
        args.ell,
        samples=args.samples,
        seed=args.seed,
        depth=args.depth,
        workers=workers,
    )
    print(res.to_json())
    return EXIT_OK


def cmd_asymptotic(args) -> int:
    if args.ell < 2:
        raise ConfigError(f"ell must be >= 2, got {args.ell}")
    est = constants.asymptotic_cl(args.ell, precision=args.precision)
    print(est.to_json())
    return EXIT_OK


def cmd_rho(args) -> int:
    if args.u < 0:
        raise ConfigError(f"u must be >= 0, got {args.u}")
    table = specfun.default_dickman_table()
    if args.u > table.u_max:
        raise ConfigError(f"u exceeds table range {table.u_max}")
    with mp.workdps(args.precision):
        value = specfun.rho(mpf(args.u), table)
        print(
            json.dumps(
                {
                    "target": "rho",
                    "u": args.u,
                    "value": mp.nstr(value, args.precision, strip_zeros=False),
                    "precision_digits": args.precision,
                }
            )
        )
    return EXIT_OK


def build_parser() -> _Parser:
    p = _Parser(prog="cbcdiv", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("count", help="exact counts over an integer range")
    c.add_argument("--range", required=True, help="LO:HI inclusive, 1e8 shorthand ok")
    c.add_argument("--ell-max", type=int, default=3)
    c.add_argument("--coprime", action="store_true")
    c.add_argument("--segment-size", type=int, default=1 << 20)
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--checkpoint", default=None)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_count)

    d = sub.add_parser("density", help="compute c_ell")
    d.add_argument("--ell", type=int, required=True)
    d.add_argument("--precision", type=int, default=100)
    d.add_argument("--nodes", type=int, default=64)
    d.add_argument("--tol", type=float, default=None)
    d.add_argument("--strict", action="store_true")
    d.set_defaults(func=cmd_density)

    k = sub.add_parser("coprime-const", help="compute the coprime density constant")
    k.add_argument("--precision", type=int, default=50)
    k.add_argument("--nodes", type=int, default=64)
    k.add_argument("--strict", action="store_true")
    k.set_defaults(func=cmd_coprime_const)

    m = sub.add_parser("montecarlo", help="Monte Carlo estimate of c_ell")
    m.add_argument("--ell", type=int, required=True)
    m.add_argument("--samples", type=_parse_int, default=10**7)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--depth", type=int, default=50)
    m.add_argument("--workers", type=int, default=None)
    m.set_defaults(func=cmd_montecarlo)

    a = sub.add_parser("asymptotic", help="asymptotic estimate rho(u*)")
    a.add_argument("--ell", type=int, required=True)
    a.add_argument("--precision", type=int, default=50)
    a.set_defaults(func=cmd_asymptotic)

    r = sub.add_parser("rho", help="Dickman rho")
    r.add_argument("--u", type=float, required=True)
    r.add_argument("--precision", type=int, default=30)
    r.set_defaults(func=cmd_rho)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MemoryError, OSError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
