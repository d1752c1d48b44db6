"""Command-line interface: ``polar-mismatch <subcommand> ...``.

Exit codes: 0 success, 1 usage, 2 input or validation error, 3 resource cap
(alphabet size or depth), 4 numerical non-convergence or failed self-check.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import capacity as cap_mod
from .channels import canonicalize, dump_pair, load_pair, merge_outputs, metric_from_channel, pairs_equal, save_pair
from .codec import select_info_set, simulate_fer
from .errors import AlphabetCapError, NonConvergenceError, PairFormatError
from .experiments import records_to_csv, sweep
from .polar import DEFAULT_ALPHABET_CAP, DEFAULT_MAX_DEPTH, minus_transform, parse_signs, plus_transform, transform_steps

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_NUMERIC = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x):
    """JSON-compatible float with the same text in human output."""
    return float(x)


def _fmt(x) -> str:
    return json.dumps(x)


def _warn_overrides(args):
    if getattr(args, "alphabet_cap", None) is not None and args.alphabet_cap != DEFAULT_ALPHABET_CAP:
        print(f"warning: alphabet cap overridden to {args.alphabet_cap} (default {DEFAULT_ALPHABET_CAP})", file=sys.stderr)
    if getattr(args, "max_depth", None) is not None and args.max_depth != DEFAULT_MAX_DEPTH:
        print(f"warning: depth cap overridden to {args.max_depth} (default {DEFAULT_MAX_DEPTH})", file=sys.stderr)
    if getattr(args, "quant_bins", None) is not None:
        print(f"warning: lossy output quantization to {args.quant_bins} levels per sign", file=sys.stderr)


def _cap(args):
    return DEFAULT_ALPHABET_CAP if args.alphabet_cap is None else args.alphabet_cap


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands


def capacity_report(pair) -> dict:
    c, tilt = cap_mod.balakirsky_capacity(pair)
    info = cap_mod.mismatched_info(pair)
    rep = {
        "C_WV": _num(c),
        "C_WV_unclamped": _num(tilt.unclamped),
        "alpha": _num(tilt.alpha),
        "residual": _num(tilt.residual),
        "I_WV": _num(info),
        "I_WV_pos": _num(cap_mod.positive_part(info)),
        "C_W": _num(cap_mod.symmetric_capacity(pair.w)),
    }
    if pair.L == 2:
        rep["harmony"] = cap_mod.harmony_event(pair.w, metric_from_channel(pair.v))
    return rep


def cmd_capacity(args):
    rep = capacity_report(load_pair(args.pair))
    if args.json:
        print(json.dumps(rep, indent=2))
    else:
        for k, v in rep.items():
            print(f"{k}: {_fmt(v)}")
    return 0


def cmd_transform(args):
    pair = load_pair(args.pair)
    seq = parse_signs(args.seq)
    print(f"input: L={pair.L}")
    if not seq:
        out, _ = canonicalize(pair)
    else:
        out = pair
        for k, sign, raw, p in transform_steps(pair, seq, cap=_cap(args), bins=args.quant_bins):
            print(f"step {k} ({sign}): {raw} outputs before merging, {p.L} after")
            out = p
    print(f"output: L={out.L}, W == V: {'yes' if pairs_equal(out) else 'no'}")
    if args.out:
        save_pair(out, args.out)
    else:
        sys.stdout.write(dump_pair(out))
    return 0


def cmd_bound(args):
    pair = load_pair(args.pair)
    max_depth = DEFAULT_MAX_DEPTH if args.max_depth is None else args.max_depth
    if args.depth > max_depth:
        raise AlphabetCapError(f"depth {args.depth} exceeds the depth cap {max_depth} (raise it with --max-depth)")
    prof = cap_mod.bound_profile(pair, args.depth, cap=_cap(args), max_depth=max_depth, bins=args.quant_bins)
    if args.json:
        text = json.dumps({"depth": args.depth, "bounds": [_num(b) for b in prof.per_depth_bounds]}, indent=2) + "\n"
    else:
        text = "depth,bound\n" + "".join(f"{k},{b:.12g}\n" for k, b in enumerate(prof.per_depth_bounds))
    _emit(text, args.out)
    return 0


def cmd_sweep(args):
    records, summary = sweep(args.L, args.trials, depth=args.depth, seed=args.seed, cap=_cap(args), workers=args.workers)
    _emit(records_to_csv(records, args.depth), args.out)
    stream = sys.stdout if args.out else sys.stderr
    for line in summary.lines():
        print(line, file=stream)
    return 0


def cmd_simulate(args):
    pair = load_pair(args.pair)
    lines = ["N,rate,trials,block_errors,fer,seed\n"]
    for N in args.blocklen:
        n = N.bit_length() - 1
        for rate in args.rate:
            cfg = select_info_set(pair, n, rate, genie_trials=args.genie_trials, seed=args.seed, cap=_cap(args))
            res = simulate_fer(pair, cfg, args.trials, seed=args.seed, workers=args.workers)
            lines.append(f"{N},{rate:.12g},{res.trials},{res.block_errors},{res.fer:.12g},{args.seed}\n")
    _emit("".join(lines), args.out)
    return 0


def verify_pair(pair, cap=DEFAULT_ALPHABET_CAP):
    """Self-checks on one pair; returns ``(ok, [(name, value, threshold)])``."""
    checks = []
    c, tilt = cap_mod.balakirsky_capacity(pair)
    if pair.L <= 6:
        orc = cap_mod.id_oracle(0.5, pair.w, metric_from_channel(pair.v))
        checks.append(("closed form vs oracle", abs(c - orc.value), 1e-6))
    if tilt.alpha > 0.0:
        checks.append(("tilt residual", abs(tilt.residual), 1e-10))
    else:
        # the even split must already satisfy the constraint
        checks.append(("slack constraint", max(0.0, tilt.residual), 1e-10))
    i0 = cap_mod.mismatched_info(pair)
    im = cap_mod.mismatched_info(minus_transform(pair))
    ip = cap_mod.mismatched_info(plus_transform(pair))
    if all(math.isfinite(x) for x in (i0, im, ip)):
        checks.append(("conservation", abs(im + ip - 2 * i0), 1e-10))
    checks.append(("info below capacity", max(0.0, i0 - c), 1e-8))
    checks.append(("merge invariance", abs(cap_mod.mismatched_capacity(merge_outputs(pair)) - c), 1e-8))
    ok = all(v <= t for _, v, t in checks)
    return ok, checks


def cmd_verify(args):
    ok, checks = verify_pair(load_pair(args.pair), cap=_cap(args))
    for name, v, t in checks:
        print(f"{name}: {v:.3e} (limit {t:g}) {'ok' if v <= t else 'FAIL'}")
    print("OK" if ok else "FAIL")
    return 0 if ok else EXIT_NUMERIC


# --------------------------------------------------------------------------
# parser


def _pos_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def _blocklen(s):
    v = int(s)
    if v < 1 or v & (v - 1):
        raise argparse.ArgumentTypeError(f"block length must be a power of two, got {s}")
    return v


def _rate(s):
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"rate must lie in [0, 1], got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polar-mismatch", description="Mismatched capacity and polar coding for symmetric channel pairs.")
    p.add_argument("-v", "--verbose", action="store_true", help="log numerical notes (clamping etc.)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    caps = argparse.ArgumentParser(add_help=False)
    caps.add_argument("--alphabet-cap", type=_pos_int, default=None, help=f"max outputs per synthetic channel (default {DEFAULT_ALPHABET_CAP})")
    caps.add_argument("--quant-bins", type=_pos_int, default=None, help="lossy merge into this many levels per sign")

    s = sub.add_parser("capacity", help="C(W,V), tilt, I(W,V), C(W)")
    s.add_argument("pair")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_capacity)

    s = sub.add_parser("transform", parents=[caps], help="apply a sign sequence and write the merged pair")
    s.add_argument("pair")
    s.add_argument("--seq", default="", help="signs over {+,-}; write --seq=-+ when it starts with '-'")
    s.add_argument("--out")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("bound", parents=[caps], help="per-depth bound profile as CSV")
    s.add_argument("pair")
    s.add_argument("--depth", type=_nonneg_int, required=True)
    s.add_argument("--max-depth", type=_nonneg_int, default=None, help=f"depth cap (default {DEFAULT_MAX_DEPTH})")
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("sweep", parents=[caps], help="random-pair sweep of delta and bounds")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--trials", type=_pos_int, required=True)
    s.add_argument("--depth", type=_nonneg_int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=_pos_int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("simulate", parents=[caps], help="Monte Carlo FER of the mismatched SC decoder")
    s.add_argument("pair")
    s.add_argument("--blocklen", type=_blocklen, action="append", required=True)
    s.add_argument("--rate", type=_rate, action="append", required=True)
    s.add_argument("--trials", type=_pos_int, default=10000)
    s.add_argument("--genie-trials", type=_pos_int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=_pos_int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", parents=[caps], help="closed form vs oracle and conservation self-checks")
    s.add_argument("pair")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "sweep" and args.L < 2:
        parser.error("--L must be at least 2")
    _warn_overrides(args)
    try:
        return args.func(args)
    except (PairFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AlphabetCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
