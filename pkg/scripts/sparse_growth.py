"""Count and time sparse-prefix enumeration at doubling lengths."""

from __future__ import annotations

import time

from lowspeed.sparse import count_sparse_prefixes, enumerate_sparse_prefixes


def main() -> None:
    print(f"{'t':>8}  {'count':>5}  {'seconds':>9}  ratio")
    prev = None
    t = 1
    while t <= 1 << 20:
        start = time.perf_counter()
        for _ in range(200):
            out = enumerate_sparse_prefixes(t)
        elapsed = (time.perf_counter() - start) / 200
        ratio = f"{elapsed / prev:.2f}" if prev else "-"
        print(f"{t:8d}  {len(out):5d}  {elapsed:9.2e}  {ratio}")
        assert len(out) == count_sparse_prefixes(t) <= max(1, t)
        prev = elapsed
        t *= 2


if __name__ == "__main__":
    main()
