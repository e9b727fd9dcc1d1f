"""Batch command-line front end.

Subcommands compute return-time distributions, correlations, Cesaro
averages, exceptional sets and zero-correlation times, run the generic
extractor on a CSV series, apply the transformation pointwise, and run the
deterministic verification suite.  Output is CSV (comma, header row, LF,
UTF-8, seed recorded in a leading comment line) or JSON with sorted keys;
identical config and seed give byte-identical output.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction

from . import constants, correlation, exceptional, oracle, tower
from .correlation import SizeError
from .exceptional import HFunction, InputError
from .oracle import FragmentationError
from .tower import DepthExceededError
from .triadic import DomainError, TriadicRational, TriadicSet

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def dec12(x: Fraction) -> str:
    """12-significant-digit decimal for a rational."""
    return "%.12g" % (x.numerator / x.denominator)


def parse_range(text: str) -> range:
    """'A..B' (inclusive) or a single integer."""
    if ".." in text:
        a, b = text.split("..", 1)
        return range(int(a), int(b) + 1)
    v = int(text)
    return range(v, v + 1)


def parse_point(text: str) -> TriadicRational:
    try:
        return TriadicRational.parse(text)
    except (DomainError, ValueError):
        return TriadicRational.from_fraction(Fraction(text))


class Output:
    """Collects rows and writes them as CSV or JSON, deterministically."""

    def __init__(self, fmt: str, out: str | None, seed: int):
        self.fmt = fmt
        self.out = out
        self.seed = seed

    def emit_rows(self, header: list[str], rows: list[list], meta: dict) -> None:
        if self.fmt == "csv":
            lines = ["# seed=%d %s" % (self.seed, " ".join(
                "%s=%s" % (k, meta[k]) for k in sorted(meta)))]
            lines.append(",".join(header))
            for row in rows:
                lines.append(",".join(str(c) for c in row))
            text = "\n".join(lines) + "\n"
        else:
            payload = dict(meta)
            payload["seed"] = self.seed
            payload["columns"] = header
            payload["rows"] = rows
            text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        self._write(text)

    def emit_json(self, payload: dict) -> None:
        payload = dict(payload)
        payload["seed"] = self.seed
        self._write(json.dumps(payload, sort_keys=True, indent=2) + "\n")

    def _write(self, text: str) -> None:
        if self.out:
            with open(self.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_dl(args, out: Output) -> int:
    rows = []
    for l in parse_range(args.l):
        d = correlation.compute_dl(args.k, l, max_l=args.cap_l)
        for i, m in enumerate(d.masses):
            rows.append([l, d.start + i, m.numerator, m.denominator, dec12(m)])
    out.emit_rows(["l", "n", "num", "den", "decimal"], rows,
                  {"command": "dl", "k": args.k})
    return EXIT_OK


def cmd_corr(args, out: Output) -> int:
    rows = []
    for n in parse_range(args.n):
        c = correlation.autocorrelation(args.k, n, max_n=args.cap_n)
        rows.append([n, c.numerator, c.denominator, dec12(c)])
    out.emit_rows(["n", "num", "den", "decimal"], rows,
                  {"command": "corr", "k": args.k})
    return EXIT_OK


def cmd_cesaro(args, out: Output) -> int:
    target = correlation.mu_Ak(args.k) ** 2
    total = Fraction(0)
    rows = []
    for n in range(args.n_max):
        if n > args.cap_n:
            raise SizeError(f"n = {n} exceeds cap {args.cap_n}")
        total += abs(correlation.autocorrelation(args.k, n, max_n=args.cap_n) - target)
        c = total / (n + 1)
        rows.append([n + 1, c.numerator, c.denominator, dec12(c)])
    out.emit_rows(["N", "num", "den", "decimal"], rows,
                  {"command": "cesaro", "k": args.k})
    return EXIT_OK


def cmd_jset(args, out: Output) -> int:
    h = HFunction.parse(args.h)
    meta: dict = {"command": "jset", "h": args.h, "n_max": args.n_max}
    if args.global_set:
        gj = exceptional.build_J(args.k, h, args.n_max)
        jset = gj.jset
        meta["mode"] = "global"
        meta["k_max"] = args.k
        meta["skipped"] = ";".join("%d:%s" % (k, r) for k, r in gj.skipped) or "none"
    else:
        hk = tower.height(args.k)
        jset = exceptional.build_Jk(args.k, h, args.n_max // hk + 3).clip(0, args.n_max)
        meta["mode"] = "layer"
        meta["k"] = args.k
    rows = [[a, b, jset.count(b)] for a, b in jset.intervals]
    meta["count"] = jset.count(args.n_max)
    out.emit_rows(["lo", "hi", "count_cum"], rows, meta)
    return EXIT_OK


def cmd_eset(args, out: Output) -> int:
    l_max = max(parse_range(args.l))
    ek, covered = exceptional.enumerate_Ek(args.k, l_max)
    rows = [[a, b, ek.count(b)] for a, b in ek.intervals]
    out.emit_rows(["lo", "hi", "count_cum"], rows,
                  {"command": "eset", "k": args.k, "l_max": l_max,
                   "covered": covered, "count": len(ek)})
    return EXIT_OK


def cmd_extract(args, out: Output) -> int:
    ns: dict[int, Fraction] = {}
    bs: dict[int, Fraction] = {}
    cs: dict[int, Fraction] = {}

    def parse_value(text: str) -> Fraction:
        text = text.strip()
        if "/" in text:
            return Fraction(text)
        return Fraction(text) if "." not in text and "e" not in text.lower() \
            else Fraction(float(text))

    with open(args.series, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("n,"):
                continue
            parts = line.split(",")
            n = int(parts[0])
            ns[n] = parse_value(parts[1])
            if len(parts) > 2 and parts[2].strip():
                bs[n] = parse_value(parts[2])
            if len(parts) > 3 and parts[3].strip():
                cs[n] = parse_value(parts[3])
    if not ns:
        raise InputError(f"no data rows in {args.series}")
    n_max = max(ns)
    if set(ns) != set(range(n_max + 1)):
        raise InputError("series must cover every n from 0 to its maximum")
    a = [ns[n] for n in range(n_max + 1)]
    if bs:
        if set(bs) != set(range(n_max + 1)):
            raise InputError("b column must cover every n when present")
        b = [bs[n] for n in range(n_max + 1)]
    else:
        run = Fraction(0)
        b = [Fraction(0)]
        for n in range(1, n_max + 1):
            run += a[n - 1]
            b.append(run / n)
    if cs:
        if set(cs) != set(range(n_max + 1)):
            raise InputError("c column must cover every n when present")
        c = [cs[n] for n in range(n_max + 1)]
    else:
        c = [Fraction(1 / math.log(n + 2)) for n in range(n_max + 1)]

    res = exceptional.extract_exceptional(a, b, c, n_max)
    rows = [["l_k", k + 1, lk] for k, lk in enumerate(res.thresholds)]
    rows += [["interval", lo, hi] for lo, hi in res.exceptional.intervals]
    out.emit_rows(["kind", "x", "y"], rows,
                  {"command": "extract", "n_max": n_max,
                   "count": len(res.exceptional)})
    return EXIT_OK


def cmd_apply_t(args, out: Output) -> int:
    x = parse_point(args.point)
    n = int(args.n) if args.n else 1
    y = tower.apply_T_power(x, n)
    q = y.as_fraction()
    out.emit_rows(["n", "point", "image", "decimal"],
                  [[n, str(x), str(y), dec12(q)]],
                  {"command": "apply-t"})
    return EXIT_OK


def cmd_locate(args, out: Output) -> int:
    x = parse_point(args.point)
    addr = tower.locate(x, args.k)
    level = "" if addr.level is None else addr.level
    out.emit_rows(["k", "level", "offset_num", "offset_den", "decimal"],
                  [[args.k, level, addr.offset.numerator, addr.offset.denominator,
                    dec12(addr.offset)]],
                  {"command": "locate",
                   "region": "spacer_remainder" if addr.level is None else "level"})
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suite

def _suite_checks(rng: random.Random) -> list[dict]:
    checks: list[dict] = []

    def record(name: str, ok: bool, detail: str) -> None:
        checks.append({"name": name, "pass": bool(ok), "detail": detail})

    # distribution table for small indices
    table = {
        0: (0, [Fraction(1)]),
        1: (4, [Fraction(1, 2), Fraction(1, 2)]),
        2: (8, [Fraction(1, 6), Fraction(2, 3), Fraction(1, 6)]),
        3: (13, [Fraction(1, 2), Fraction(1, 2)]),
    }
    ok = all(
        (correlation.compute_dl(1, l).start, list(correlation.compute_dl(1, l).masses))
        == (s, m) for l, (s, m) in table.items())
    record("small-distribution-table", ok, "k=1, l<=3")

    ok = all(
        (oracle.brute_dl(k, l).start, oracle.brute_dl(k, l).masses)
        == (correlation.compute_dl(k, l).start, correlation.compute_dl(k, l).masses)
        for k in (1, 2) for l in range(61))
    record("distribution-oracle", ok, "enumeration vs recursion, k<=2, l<=60")

    a1 = TriadicSet.from_endpoints([(Fraction(0), Fraction(2, 9))])
    ok = all(oracle.brute_correlation(a1, a1, n) == correlation.autocorrelation(1, n)
             for n in range(61))
    record("correlation-oracle", ok, "level bookkeeping vs recursion, k=1, n<=60")

    ok = True
    for l in range(81):
        d = correlation.compute_dl(1, l)
        if d.total() != 1 or d.masses != tuple(reversed(d.masses)):
            ok = False
            break
        peak = max(range(len(d.masses)), key=lambda i: d.masses[i])
        up = all(x <= y for x, y in zip(d.masses[:peak + 1], d.masses[1:peak + 1]))
        down = all(x >= y for x, y in zip(d.masses[peak:], d.masses[peak + 1:]))
        if not (up and down):
            ok = False
            break
    record("normalization-shape", ok, "sum 1, palindromic, unimodal, l<81")

    ok = all(correlation.compute_dl(1, l).support_size == correlation.compute_bl(l)
             for l in range(243))
    ok = ok and all(abs(correlation.compute_bl(l) - correlation.compute_bl(l + 1)) == 1
                    for l in range(243))
    record("support-size", ok, "balanced-ternary weight, l<243")

    ok = True
    for _ in range(200):
        e = rng.randint(1, 8)
        x = TriadicRational.from_fraction(Fraction(rng.randrange(3 ** e), 3 ** e))
        if tower.apply_T_inverse(tower.apply_T(x)) != x:
            ok = False
            break
    record("bijectivity", ok, "T^-1 T = id on 200 random triadic points")

    ok = True
    for _ in range(25):
        e = rng.randint(2, 6)
        a = rng.randrange(3 ** e - 1)
        b = rng.randrange(a + 1, 3 ** e)
        if a <= 2 * 3 ** (e - 1) <= b:
            # an interval whose closure meets 2/3 has an infinite image
            continue
        st = oracle.PushforwardState.of(
            TriadicSet.from_endpoints([(Fraction(a, 3 ** e), Fraction(b, 3 ** e))]))
        if oracle.pushforward_step(st).measure() != Fraction(b - a, 3 ** e):
            ok = False
            break
    record("measure-preservation", ok, "one pushforward step on random intervals")

    ok = all(oracle.precedes(oracle.phi_repr(l),
                             oracle.walk_poly(correlation.compute_bl(l) - 1))
             for l in range(1, 101))
    ok = ok and all(
        oracle.center_value(oracle.phi_repr(l))
        <= oracle.center_value(oracle.walk_poly(correlation.compute_bl(l) - 1))
        for l in range(1, 101))
    record("majorization", ok, "smoothing order and peak comparison, l<=100")

    fr = constants.FROZEN
    m1, _ = constants.sweep_c1_sq(fr.sweep_l_bound)
    m2, _ = constants.sweep_c2_sq(fr.sweep_l_bound)
    m3, _ = constants.sweep_c3_sq(fr.sweep_envelope_l, fr.sweep_p)
    ok = (m1 * fr.headroom_sq == fr.c1_sq and m2 * fr.headroom_sq == fr.c2_sq
          and m3 * fr.headroom_sq == fr.c3_sq)
    record("frozen-constants", ok, "re-sweep reproduces the frozen values")

    ek, covered = exceptional.enumerate_Ek(1, 200)
    ok = all(correlation.autocorrelation(1, n) == 0 for n in ek.iter_points())
    for _ in range(100):
        n = rng.randrange(covered)
        if n not in ek and correlation.autocorrelation(1, n) == 0:
            ok = False
            break
    record("zero-correlation-times", ok, "gap set matches vanishing correlation")

    n_max = 4096
    a = [Fraction(1) if n and n & (n - 1) == 0 else Fraction(0)
         for n in range(n_max + 1)]
    b = [Fraction(1)] + [Fraction(math.floor(math.log2(n)) + 2, n)
                         for n in range(1, n_max + 1)]
    c = [Fraction(1 / math.log(n + 2)) for n in range(n_max + 1)]
    res = exceptional.extract_exceptional(a, b, c, n_max)
    ok = len(res.thresholds) >= 2
    for k in range(1, len(res.thresholds) + 1):
        lk = res.thresholds[k - 1]
        hi = res.thresholds[k] if k < len(res.thresholds) else n_max
        for n in range(lk, n_max + 1):
            if n not in res.exceptional and a[n] * k > 1:
                ok = False
        for n in range(max(lk, 1), hi):
            if c[n] * res.exceptional.count(n) * k > n * b[n]:
                ok = False
    record("extractor-contract", ok, "synthetic power-of-two series, window 4096")

    return checks


def cmd_verify(args, out: Output) -> int:
    rng = random.Random(args.seed)
    checks = _suite_checks(rng)
    fr = constants.FROZEN
    report = {
        "suite": args.suite,
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
        "constants": {
            "c1_sq": str(fr.c1_sq),
            "c2_sq": str(fr.c2_sq),
            "c3_sq": str(fr.c3_sq),
            "c_star": fr.c_star,
            "headroom_sq": str(fr.headroom_sq),
        },
    }
    out.emit_json(report)
    return EXIT_OK if report["pass"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chacon",
        description="Exact computations for a rank-one cutting-and-stacking map.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap-l", type=int, default=correlation.DEFAULT_MAX_L)
        p.add_argument("--cap-n", type=int, default=correlation.DEFAULT_MAX_N)

    p = sub.add_parser("dl", help="return-time distribution masses")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", required=True, help="index or range A..B")
    common(p)
    p.set_defaults(fn=cmd_dl)

    p = sub.add_parser("corr", help="autocorrelation series")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", required=True, help="time or range A..B")
    common(p)
    p.set_defaults(fn=cmd_corr)

    p = sub.add_parser("cesaro", help="running Cesaro averages of deviations")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N-max", dest="n_max", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_cesaro)

    p = sub.add_parser("jset", help="exceptional time sets")
    p.add_argument("--k", type=int, required=True,
                   help="stage (layer mode) or maximal stage (global mode)")
    p.add_argument("--h", default="linear")
    p.add_argument("--N-max", dest="n_max", type=int, required=True)
    p.add_argument("--global", dest="global_set", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_jset)

    p = sub.add_parser("eset", help="zero-correlation times")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", required=True, help="index bound or range")
    common(p)
    p.set_defaults(fn=cmd_eset)

    p = sub.add_parser("extract", help="generic exceptional-set extractor")
    p.add_argument("series", help="CSV with columns n, a_n [, b_n [, c_n]]")
    common(p)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("verify", help="deterministic verification suite")
    p.add_argument("--suite", default="all")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("apply-t", help="apply the map at a triadic point")
    p.add_argument("point", help="p/3^m, 0.a1a2..., or a plain fraction")
    p.add_argument("--n", default="1", help="power (may be negative)")
    common(p)
    p.set_defaults(fn=cmd_apply_t)

    p = sub.add_parser("locate", help="tower address of a point")
    p.add_argument("point")
    p.add_argument("--k", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_locate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    out = Output(args.format, args.out, args.seed)
    try:
        return args.fn(args, out)
    except (SizeError, FragmentationError, DepthExceededError, OverflowError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, InputError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
