"""Fast R from advice versus the direct construction, per length and per k."""

from __future__ import annotations

import argparse

from lowspeed.blum import BudgetSchedule, advice, build_R, fast_R_with_advice, poly_bound
from lowspeed.encoding import words_of_length
from lowspeed.machine import default_corpus


def digits(v: int) -> str:
    s = str(v)
    return s if len(s) <= 8 else f"1e{len(s) - 1}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=8)
    ap.add_argument("--ks", type=int, nargs="+", default=[2, 3, 4, 5])
    args = ap.parse_args()
    sched = BudgetSchedule.iterated()
    corpus = default_corpus()
    table, reg = build_R(sched, args.max_len, corpus)
    print("k  len  agree  max_fast  max_direct  max_bound")
    for k in args.ks:
        adv = advice(reg, k)
        for n in range(max(adv.cutoff + 1, k), args.max_len + 1):
            rows = [(fast_R_with_advice(sched, adv, x, table, corpus), x) for x in words_of_length(n)]
            agree = sum(fr.bit == table(x) for fr, x in rows)
            print(f"{k}  {n:3d}  {agree:3d}/{len(rows):<3d} {digits(max(fr.steps for fr, _ in rows)):>8}  "
                  f"{digits(max(table.costs[x] for _, x in rows)):>10}  "
                  f"{digits(max(poly_bound(sched, x, k) for _, x in rows)):>9}")


if __name__ == "__main__":
    main()
