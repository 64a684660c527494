"""Command-line experiment runner.

Exit codes: 0 success, 1 an invariant check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .blum import (
    AdviceTooOptimistic,
    BudgetSchedule,
    advice,
    build_R,
    check_R,
    cn_measure,
    fast_R_with_advice,
    poly_bound,
)
from .dump import LReq, PReq, ce_run
from .encoding import word_to_index, words_of_length
from .finite_extension import DIAGONAL_FOUND, fe_stage, FEState, replay_check
from .machine import CorpusError, default_corpus, load_corpus
from .trace import Trace


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _natural(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text}")
    return v


def _requirement(text: str):
    try:
        kind, args = text.split(":", 1)
        nums = [int(a) for a in args.split(",")]
        if kind == "L" and len(nums) == 2:
            return LReq(*nums)
        if kind == "P" and len(nums) == 1:
            return PReq(*nums)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"requirement must look like L:e,i or P:e, got {text!r}")


def _schedule(name: str) -> BudgetSchedule:
    return BudgetSchedule.simple() if name == "2exp" else BudgetSchedule.iterated()


def cmd_fe(args, corpus, trace: Trace, out) -> int:
    state = FEState()
    for _ in range(args.stages):
        state = fe_stage(state, args.budget, corpus)
        rec = state.log[-1]
        payload = dict(e=rec.e, i=rec.i, outcome=rec.outcome, sigma_length=rec.sigma_length,
                       search_steps=rec.search_steps)
        if rec.witness is not None:
            w = rec.witness
            payload.update(n=w.n, phi=w.value_phi, r=w.value_r, ones=sorted(w.tau.ones))
        trace.emit(rec.stage, "finite_extension", "stage", **payload)
    problems = replay_check(state, corpus)
    found = sum(r.outcome == DIAGONAL_FOUND for r in state.log)
    print(f"stages {args.stages}  budget {args.budget}  diagonal {found}  fallback {args.stages - found}", file=out)
    print(f"sigma length {state.sigma.length}  ones {sorted(state.sigma.ones)}", file=out)
    for p in problems:
        print(f"INVARIANT {p}", file=out)
    return 1 if problems else 0


def cmd_ce(args, corpus, trace: Trace, out) -> int:
    result = ce_run(args.req, args.stages, corpus, trace)
    final = result.A
    problems = list(result.violations)
    for s, cands in result.candidates.items():
        if final.prefix(s) not in cands:
            problems.append(f"stage {s}: final prefix not among candidates")
    print(f"stages {args.stages}  requirements {len(args.req)}  |A| {len(final.members)}", file=out)
    print(f"A {sorted(final.members)}", file=out)
    for k, st in enumerate(result.strategies):
        if st.kind == "L":
            print(f"  {k} L({st.e},{st.i}) {st.status} psi={len(st.psi)} injuries={st.injuries}", file=out)
        else:
            print(f"  {k} P({st.e}) {st.status} follower={st.follower} resets={st.resets}", file=out)
    for p in problems:
        print(f"INVARIANT {p}", file=out)
    return 1 if problems else 0


def _print_R(table, reg, out):
    for n in range(table.max_len + 1):
        ones = table.ones(n)
        print(f"R length {n}: {','.join(x or 'eps' for x in ones) if ones else '-'}", file=out)
    for i, rec in sorted(reg.records.items()):
        print(f"theta({i}) = {rec.x or 'eps'}  phi={rec.bit}  steps={rec.steps}", file=out)


def cmd_blum(args, corpus, trace: Trace, out) -> int:
    sched = _schedule(args.schedule)
    table, reg = build_R(sched, args.max_len, corpus)
    for n in range(args.max_len + 1):
        trace.emit(n, "blum_speedup", "length", ones=[word_to_index(x) for x in table.ones(n)],
                   cost=table.length_costs[n])
    for i, rec in sorted(reg.records.items()):
        trace.emit(rec.length, "blum_speedup", "deactivated", index=i, x=rec.x, bit=rec.bit, steps=rec.steps)
    _print_R(table, reg, out)
    problems = check_R(sched, table, reg, corpus)
    for p in problems:
        print(f"INVARIANT {p}", file=out)
    return 1 if problems else 0


def cmd_speedup(args, corpus, trace: Trace, out) -> int:
    if args.schedule != "square":
        print("speedup needs an iterated schedule (--schedule square)", file=sys.stderr)
        return 2
    sched = _schedule(args.schedule)
    table, reg = build_R(sched, args.max_len, corpus)
    adv = advice(reg, args.k)
    print(f"k {adv.k}  sigma {sorted(adv.sigma)}  cutoff length {adv.cutoff}", file=out)
    agree = total = 0
    problems = []
    print("len  strings  agree  fast_steps  direct_steps", file=out)
    try:
        for n in range(max(adv.cutoff + 1, adv.k), args.max_len + 1):
            fast = direct = ok = 0
            for x in words_of_length(n):
                fr = fast_R_with_advice(sched, adv, x, table, corpus)
                ok += fr.bit == table(x)
                fast += fr.steps
                direct += table.costs[x]
                if fr.steps > poly_bound(sched, x, max(adv.k, 1)):
                    problems.append(f"{x!r}: {fr.steps} steps exceeds the bound")
                trace.emit(n, "blum_speedup", "fast", x=word_to_index(x), bit=fr.bit, steps=fr.steps,
                           direct=table.costs[x])
            agree += ok
            total += 1 << n
            print(f"{n:3d}  {1 << n:7d}  {ok:5d}  {_magnitude(fast):>10}  {_magnitude(direct):>12}", file=out)
    except AdviceTooOptimistic as exc:
        problems.append(str(exc))
    pct = Fraction(agree * 100, total) if total else Fraction(100)
    print(f"agreement {agree}/{total} ({pct}%)", file=out)
    if agree != total:
        problems.append("fast procedure disagrees with direct R")
    for p in problems:
        print(f"INVARIANT {p}", file=out)
    return 1 if problems else 0


def _magnitude(v: int) -> str:
    s = str(v)
    return s if len(s) <= 10 else f"~10^{len(s) - 1}"


def cmd_schnorr(args, corpus, trace: Trace, out) -> int:
    horizon = args.horizon
    table, _ = build_R(BudgetSchedule.simple(), horizon, corpus)
    problems = []
    for n in range(horizon + 1):
        m = cn_measure(n, table)
        bound = Fraction(1, 1 << n)
        tight = m == bound
        trace.emit(n, "blum_speedup", "cn", measure=m, bound=bound, tight=tight)
        print(f"n {n:2d}  lambda(C_n) = {m}  bound {bound}  {'tight' if tight else ''}".rstrip(), file=out)
        if m > bound or tight != bool(table.ones(n)):
            problems.append(f"n={n}: measure {m} violates the bound or tightness rule")
    for p in problems:
        print(f"INVARIANT {p}", file=out)
    return 1 if problems else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowspeed", description="Finite-stage oracle constructions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", help="machine corpus file (default: bundled corpus)")
    common.add_argument("--trace", help="write the JSON Lines trace here")
    sub = parser.add_subparsers(dest="command", required=True)

    fe = sub.add_parser("fe", parents=[common], help="finite-extension construction over sparse prefixes")
    fe.add_argument("--stages", type=_natural, default=4)
    fe.add_argument("--budget", type=_positive, default=64)

    ce = sub.add_parser("ce", parents=[common], help="c.e. dump construction")
    ce.add_argument("--stages", type=_natural, default=40)
    ce.add_argument("--req", type=_requirement, action="append", default=[],
                    help="requirement in priority order: L:e,i or P:e (repeatable)")

    bl = sub.add_parser("blum", parents=[common], help="build the diagonal set R")
    bl.add_argument("--schedule", choices=["2exp", "square"], default="2exp")
    bl.add_argument("--max-len", type=_natural, default=8)

    sp = sub.add_parser("speedup", parents=[common], help="two-phase fast computation of R from advice")
    sp.add_argument("--schedule", choices=["2exp", "square"], default="square")
    sp.add_argument("--max-len", type=_natural, default=8)
    sp.add_argument("--k", type=_natural, default=2)

    sc = sub.add_parser("schnorr", parents=[common], help="exact measures of the sets C_n")
    sc.add_argument("--horizon", type=_natural, default=8)
    return parser


COMMANDS = {"fe": cmd_fe, "ce": cmd_ce, "blum": cmd_blum, "speedup": cmd_speedup, "schnorr": cmd_schnorr}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        corpus = load_corpus(args.corpus) if args.corpus else default_corpus()
    except (OSError, CorpusError) as exc:
        print(f"lowspeed: cannot load corpus: {exc}", file=sys.stderr)
        return 2
    trace = Trace()
    status = COMMANDS[args.command](args, corpus, trace, out)
    if args.trace:
        trace.write(args.trace)
    return status


if __name__ == "__main__":
    sys.exit(main())
