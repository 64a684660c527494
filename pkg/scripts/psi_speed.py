"""Tabulate Psi's accounted cost against the simulated machine's running time.

Fits the exponent d in psi_steps ~ c * phi_steps**d by least squares on
the log-log points and reports the worst ratio against 2(p+1)^3.
"""

from __future__ import annotations

import argparse
import math

from lowspeed.finite_extension import psi_simulate
from lowspeed.machine import default_corpus
from lowspeed.sparse import enumerate_sparse_prefixes


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-input", type=int, default=1 << 12)
    ap.add_argument("--max-stage", type=int, default=24)
    args = ap.parse_args()
    corpus = default_corpus()
    bases = [p for n in (0, 2, 16) for p in enumerate_sparse_prefixes(n)]
    worst: dict[int, int] = {}
    for name, machine in zip(corpus.names, corpus.planted):
        n = 0
        while n < args.max_input:
            for base in bases:
                r = psi_simulate(machine, base, n, args.max_stage)
                if r.found:
                    worst[r.phi_steps] = max(worst.get(r.phi_steps, 0), r.psi_steps)
            n = 2 * n + 1
    print(f"{'phi_steps':>9}  {'max psi_steps':>13}  {'ratio to 2(p+1)^3':>18}")
    for p in sorted(worst):
        print(f"{p:9d}  {worst[p]:13d}  {worst[p] / (2 * (p + 1) ** 3):18.4f}")
    pts = [(math.log(p), math.log(v)) for p, v in worst.items() if p > 1]
    if len(pts) >= 2:
        mx = sum(x for x, _ in pts) / len(pts)
        my = sum(y for _, y in pts) / len(pts)
        slope = sum((x - mx) * (y - my) for x, y in pts) / sum((x - mx) ** 2 for x, _ in pts)
        print(f"fitted exponent d = {slope:.2f}")


if __name__ == "__main__":
    main()
