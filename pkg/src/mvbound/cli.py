"""Command-line front end.

Exit codes: 0 success or pass, 1 verification/audit failure (or a failed
mathematical precondition), 2 usage or format error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import bounds, family as fam, fourier, ldc, reduction, search
from .errors import FormatError, MVError, TraceStructureError
from .modular import Partition, validate_partition
from .serialize import dumps, read_json, resolve_output, write_csv, write_json

DEFAULT_SEED = 1729

BOUND_COLUMNS = ["m", "n", "log10_bound_general", "oracle_value", "oracle_optimal"]


class UsageError(Exception):
    pass


def _out(obj) -> None:
    sys.stdout.write(dumps(obj))


def _family(path) -> fam.MVFamily:
    try:
        return fam.load_family(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _range(text: str) -> list[int]:
    try:
        if ":" in text:
            a, b = text.split(":")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc


def _message(text, t: int) -> list[int]:
    if text is None:
        return [i % 2 for i in range(t)]
    digits = text.split(",") if "," in text else list(text)
    try:
        x = [int(d) for d in digits]
    except ValueError as exc:
        raise UsageError(f"bad message {text!r}") from exc
    if len(x) != t:
        raise UsageError(f"message has {len(x)} symbols, family size is {t}")
    return x


def round_summary(rd: reduction.ReductionRound) -> dict:
    return reduction.round_to_dict(rd)


# ---------------------------------------------------------------- handlers


def cmd_family(a) -> int:
    if a.kind == "unit":
        F = fam.unit_family(a.m, a.t)
    elif a.kind == "canonical":
        F = fam.canonical_family(a.m)
    else:
        F = fam.random_greedy_family(a.m, a.n, a.t, random.Random(a.seed))
    write_json(a.output, fam.family_to_dict(F))
    print(f"wrote family m={F.m} n={F.n} t={F.t} to {resolve_output(a.output)}")
    return 0


def cmd_verify(a) -> int:
    F = _family(a.family)
    rep = fam.verify_mv(F)
    if rep:
        print(f"ok: MV family m={F.m} n={F.n} t={F.t}")
        return 0
    print(f"FAIL at {rep.pair}: {rep.reason}")
    return 1


def cmd_search(a) -> int:
    res = search.brute_force_mv(a.m, a.n, search.Budget(a.max_nodes, a.time_limit))
    rel = "=" if res.optimal else ">="
    note = "" if res.optimal else " (budget exceeded, lower bound)"
    print(f"MV({a.m},{a.n}) {rel} {res.value}{note}")
    out = a.witness or f"mv_m{a.m}_n{a.n}.json"
    write_json(out, fam.family_to_dict(res.witness))
    return 0


def cmd_bias(a) -> int:
    mu = fourier.distribution_from_dict(read_json(a.distribution))
    cert = fourier.find_biased_character(mu, fourier.FBudget.parse(a.f), diagnostic=a.diagnostic)
    _out({"r": mu.r, "j": cert.j, "s": cert.s, "magnitude": cert.magnitude, "threshold": cert.threshold,
          "margin": cert.margin, "below_threshold": cert.below_threshold})
    return 0


def cmd_reduce(a) -> int:
    F = _family(a.family)
    if a.partition:
        try:
            r = [int(x) for x in a.partition.split(",")]
            P = validate_partition(*r, F.m)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad partition {a.partition!r}: {exc}") from exc
    else:
        P = Partition(1, 1, F.m)
    W = fam.respects(F, P)
    if W is None:
        print(f"family does not respect {P}", file=sys.stderr)
        return 1
    F2, P2, W2, rd = reduction.reduce_once(F, P, W, fourier.FBudget.parse(a.f), mode=a.mode, variant=a.variant)
    write_json(a.output, fam.family_to_dict(F2))
    _out({"partition_after": list(P2.as_tuple()), "round": round_summary(rd)})
    return 0


def cmd_drive(a) -> int:
    F = _family(a.family)
    T = reduction.drive(F, fourier.FBudget.parse(a.f), variant=a.variant, mode=a.mode)
    write_json(a.output, reduction.trace_to_dict(T))
    print(f"{len(T.rounds)} rounds, terminal {T.terminal}, final size {T.final_size}; trace in {resolve_output(a.output)}")
    return 0


def cmd_audit(a) -> int:
    try:
        T = reduction.trace_from_dict(read_json(a.trace))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{a.trace}: not JSON") from exc
    f = fourier.FBudget.parse(a.f) if a.f else None
    rep = reduction.audit_trace(T, f)
    for c in rep.checks:
        status = "PASS" if c.passed else ("FAIL" if c.required else "info")
        where = "" if c.round is None else f" [round {c.round}]"
        slack = "" if c.slack is None else f" slack={c.slack:.6g}"
        print(f"{status} {c.name}{where}{slack}")
    print("audit passed" if rep.passed else "audit FAILED")
    return 0 if rep.passed else 1


def bound_rows(ms, ns, oracle: bool, budget: search.Budget):
    rows = []
    for m in ms:
        for n in ns:
            rep = bounds.bound_eval(m, n)
            val = opt = None
            if oracle:
                try:
                    res = search.brute_force_mv(m, n, budget)
                    val, opt = res.value, res.optimal
                except MVError:
                    pass
            rows.append([m, n, rep.log10_bound, val, opt])
    return rows


def cmd_bound(a) -> int:
    if a.csv:
        ms = _range(a.m_range)
        ns = _range(a.n_range)
        rows = bound_rows(ms, ns, a.oracle, search.Budget(a.max_nodes, a.time_limit))
        write_csv(a.csv, BOUND_COLUMNS, rows)
        bad = [r for r in rows if r[3] is not None and not bounds.bound_eval(r[0], r[1]).admits(r[3])]
        print(f"wrote {len(rows)} rows to {resolve_output(a.csv)}")
        return 1 if bad else 0
    if a.m is None or a.n is None:
        raise UsageError("bound needs --m and --n, or --csv with ranges")
    trace = reduction.trace_from_dict(read_json(a.trace)) if a.trace else None
    rep = bounds.bound_eval(a.m, a.n, a.variant, trace)
    _out({"m": rep.m, "n": rep.n, "variant": rep.variant, "exponent": rep.exponent,
          "log10_bound": rep.log10_bound, "log10_audited": rep.log10_audited})
    return 0


def cmd_rate(a) -> int:
    if a.family:
        F = _family(a.family)
        t, m, n = F.t, F.m, F.n
    else:
        if None in (a.t, a.m, a.n):
            raise UsageError("rate needs --t --m --n or --family")
        t, m, n = a.t, a.m, a.n
    r = bounds.rate_check(t, m, n)
    _out({"K": r.K, "m": r.m, "n": r.n, "log_N": r.log_N, "log_K": r.log_K, "ratio": r.ratio,
          "N_exceeds_K_19_18": r.exceeds, "branch": r.branch,
          "bound_exponent_ratio": r.bound_exponent_ratio, "bound_implies": r.bound_implies})
    return 0


def _params_dict(P: ldc.CodeParams) -> dict:
    return {"m": P.m, "n": P.n, "t": P.K, "p": P.p, "gamma": P.gamma, "K": P.K, "N": P.N, "q": P.q,
            "symbol_bits": P.symbol_bits, "codeword_bits": P.N * P.symbol_bits}


def cmd_ldc_setup(a) -> int:
    _out(_params_dict(ldc.setup(_family(a.family))))
    return 0


def cmd_ldc_encode(a) -> int:
    P = ldc.setup(_family(a.family))
    c = ldc.encode(P, _message(a.message, P.K))
    path = resolve_output(a.output)
    path.write_bytes(c.to_bytes())
    print(f"wrote {P.N} symbols over Z_{P.p} to {path}")
    return 0


def cmd_ldc_decode(a) -> int:
    P = ldc.setup(_family(a.family))
    try:
        c = ldc.Codeword.from_bytes(Path(a.codeword).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {a.codeword}: {exc}") from exc
    if (c.m, c.n, c.p, c.t) != (P.m, P.n, P.p, P.K):
        raise FormatError("codeword header does not match the family parameters")
    oracle = ldc.CountingOracle(c)
    res = ldc.decode_bit(P, oracle, a.index, a.seed)
    _out({"index": a.index, "value": res.value, "in_alphabet": res.in_alphabet, "w": list(res.w),
          "queries": oracle.queries})
    return 0


def cmd_ldc_sim(a) -> int:
    P = ldc.setup(_family(a.family))
    rep = ldc.simulate(P, _message(a.message, P.K), a.delta, a.trials, a.seed)
    d = rep.to_dict()
    if a.output:
        write_json(a.output, d)
    _out(d)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mvbound", description="Matching-vector family toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def reduction_opts(p):
        p.add_argument("--f", default="power:1.735", help="power:ALPHA or loglaw")
        p.add_argument("--mode", choices=[reduction.STRICT, reduction.BEST_EFFORT], default=reduction.STRICT)
        p.add_argument("--variant", choices=[reduction.GENERAL, reduction.DISTINCT_PRIME], default=reduction.GENERAL)

    p = sub.add_parser("family", help="write a generated family")
    p.add_argument("kind", choices=["unit", "canonical", "random"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", type=int, default=10)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output", default="family.json")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify", help="check the matching-vector property")
    p.add_argument("family")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exact MV(m, n) by clique search")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-nodes", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--witness", help="witness family path (default mv_m<M>_n<N>.json)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bias", help="find a biased character of a distribution")
    p.add_argument("distribution")
    p.add_argument("--f", default="power:1.735")
    p.add_argument("--diagnostic", action="store_true", help="waive the mu(0) precondition")
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("reduce", help="run a single reduction round")
    p.add_argument("family")
    p.add_argument("--partition", help="r1,r2,r3 (default 1,1,m)")
    p.add_argument("-o", "--output", default="reduced.json")
    reduction_opts(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("drive", help="iterate reduction rounds and write a trace")
    p.add_argument("family")
    p.add_argument("-o", "--output", default="trace.json")
    reduction_opts(p)
    p.set_defaults(func=cmd_drive)

    p = sub.add_parser("audit", help="audit a reduction trace")
    p.add_argument("trace")
    p.add_argument("--f", help="override the trace's f")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bound", help="evaluate the upper bound (or a CSV sweep)")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--variant", choices=[reduction.GENERAL, reduction.DISTINCT_PRIME], default=reduction.GENERAL)
    p.add_argument("--trace", help="trace for the audited squarefree form")
    p.add_argument("--csv", help="write a sweep table here")
    p.add_argument("--m-range", default="2:6")
    p.add_argument("--n-range", default="1:3")
    p.add_argument("--oracle", action="store_true", help="fill oracle_value by clique search")
    p.add_argument("--max-nodes", type=int, default=200000)
    p.add_argument("--time-limit", type=float, default=20.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("rate", help="codeword length vs K^(19/18)")
    p.add_argument("--t", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--family")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("ldc-setup", help="field parameters for a family")
    p.add_argument("family")
    p.set_defaults(func=cmd_ldc_setup)

    p = sub.add_parser("ldc-encode", help="encode a message")
    p.add_argument("family")
    p.add_argument("--message", help="bits, e.g. 101101 (default alternating)")
    p.add_argument("-o", "--output", default="codeword.bin")
    p.set_defaults(func=cmd_ldc_encode)

    p = sub.add_parser("ldc-decode", help="locally decode one symbol")
    p.add_argument("family")
    p.add_argument("codeword")
    p.add_argument("--index", type=int, required=True, help="0-based message index")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_ldc_decode)

    p = sub.add_parser("ldc-sim", help="empirical decoding success under corruption")
    p.add_argument("family")
    p.add_argument("--message")
    p.add_argument("--delta", type=float, default=0.02)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ldc_sim)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormatError, TraceStructureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MVError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
