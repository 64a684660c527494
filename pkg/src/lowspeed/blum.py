"""Diagonal sets with time-bounded budgets, advice, and the block functional.

``build_R`` constructs a computable set R that disagrees with every
machine which converges quickly enough.  Two budget regimes are offered:

* ``Simple2Exp``: all strings of length ``n`` are handled together.  The
  lexicographically least pair ``(e, x)`` (smallest ``e``, then smallest
  ``x``) with ``e <= n`` active and ``Phi_e(x)`` halting within ``2**n``
  steps is diagonalised, so R has at most one 1-valued string per length.
* ``Iterated(f)``: each string ``x`` in turn is diagonalised against the
  least active ``i <= |x|`` converging in fewer than ``f^(|x|-i)(|x|)``
  steps.

Machines are drawn from a ``Corpus``; indices outside it never halt and
are charged their whole allowance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .encoding import index_to_word, proj3, word_to_index, words_of_length
from .machine import BudgetExceeded, Corpus, Program, RunResult, run_plain

SIMPLE_2EXP = "Simple2Exp"
ITERATED = "Iterated"


def _square(n: int) -> int:
    return n * n


@dataclass(frozen=True)
class BudgetSchedule:
    mode: str = SIMPLE_2EXP
    f: Callable[[int], int] | None = None
    name: str = "2exp"

    @classmethod
    def simple(cls) -> "BudgetSchedule":
        return cls(SIMPLE_2EXP, None, "2exp")

    @classmethod
    def iterated(cls, f: Callable[[int], int] = _square, name: str = "square") -> "BudgetSchedule":
        return cls(ITERATED, f, name)

    def iterate(self, m: int, n: int) -> int:
        """``f^m(n)``, with ``f^0`` the identity."""
        if self.f is _square:
            return n ** (1 << m)
        for _ in range(m):
            n = self.f(n)
        return n

    def budget(self, i: int, n: int) -> int:
        if self.mode == SIMPLE_2EXP:
            return 1 << n
        return self.iterate(n - i, n)

    def allowance(self, i: int, n: int) -> int:
        """Steps a probe may use: ``2**n`` inclusive, or strictly fewer than ``f^(n-i)(n)``."""
        b = self.budget(i, n)
        return b if self.mode == SIMPLE_2EXP else b - 1


@lru_cache(maxsize=1 << 18)
def _probe(prog: Program | None, x: str, allowance: int) -> RunResult:
    if prog is None or allowance <= 0:
        return BudgetExceeded(max(allowance, 0))
    return run_plain(prog, x, allowance)


def probe(corpus: Corpus, i: int, x: str, allowance: int) -> RunResult:
    """``Phi_i(x)`` on the empty oracle, memoised."""
    return _probe(corpus.program(i), x, allowance)


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class DiagRecord:
    x: str
    bit: int
    length: int
    steps: int


@dataclass
class DiagRegistry:
    horizon: int
    records: dict[int, DiagRecord] = field(default_factory=dict)

    def active(self, i: int, before: str | None = None) -> bool:
        """Is ``i`` still active; with ``before``, was it active when ``before`` was handled."""
        rec = self.records.get(i)
        if rec is None:
            return True
        return before is not None and word_to_index(rec.x) >= word_to_index(before)

    def active_set(self) -> set[int]:
        return {i for i in range(self.horizon + 1) if i not in self.records}

    def dumps(self) -> str:
        return "".join(f"{i} {r.length} {int(r.x, 2) if r.x else 0} {r.bit}\n"
                       for i, r in sorted(self.records.items()))

    @classmethod
    def loads(cls, text: str, horizon: int) -> "DiagRegistry":
        reg = cls(horizon)
        for line in text.splitlines():
            if not line.strip():
                continue
            i, n, v, b = map(int, line.split())
            x = format(v, f"0{n}b") if n else ""
            reg.records[i] = DiagRecord(x, b, n, 0)
        return reg


@dataclass
class RTable:
    max_len: int
    values: dict[str, int] = field(default_factory=dict)
    winners: dict[str, int] = field(default_factory=dict)
    costs: dict[str, int] = field(default_factory=dict)
    length_costs: dict[int, int] = field(default_factory=dict)

    def __call__(self, x: str | int) -> int:
        if isinstance(x, int):
            x = index_to_word(x)
        return self.values[x]

    def ones(self, n: int) -> list[str]:
        return [x for x in words_of_length(n) if self.values[x] == 1]

    def dumps(self) -> str:
        lines = []
        for n in range(self.max_len + 1):
            ones = self.ones(n)
            lines.append(f"{n} {','.join(str(word_to_index(x)) for x in ones) if ones else 'none'}\n")
        return "".join(lines)

    @classmethod
    def loads(cls, text: str) -> "RTable":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        table = cls(len(rows) - 1)
        for n, spec in rows:
            ones = set() if spec == "none" else {index_to_word(int(v)) for v in spec.split(",")}
            for x in words_of_length(int(n)):
                table.values[x] = int(x in ones)
        return table


def theta(reg: DiagRegistry, i: int) -> str | None:
    rec = reg.records.get(i)
    return None if rec is None else rec.x


def build_R(schedule: BudgetSchedule, max_len: int, corpus: Corpus) -> tuple[RTable, DiagRegistry]:
    table = RTable(max_len)
    reg = DiagRegistry(max_len)
    for n in range(max_len + 1):
        if schedule.mode == SIMPLE_2EXP:
            _length_2exp(schedule, n, corpus, table, reg)
        else:
            for x in words_of_length(n):
                _string_iterated(schedule, x, corpus, table, reg)
    return table, reg


def _length_2exp(schedule, n, corpus, table, reg):
    cost = 0
    hit = None
    allowance = schedule.allowance(0, n)
    for e in range(n + 1):
        if e in reg.records:
            continue
        for x in words_of_length(n):
            res = probe(corpus, e, x, allowance)
            cost += res.steps
            if res.halted:
                hit = (e, x, res)
                break
        if hit:
            break
    for x in words_of_length(n):
        table.values[x] = 0
    if hit:
        e, x, res = hit
        table.values[x] = 1 - res.bit
        table.winners[x] = e
        reg.records[e] = DiagRecord(x, res.bit, n, res.steps)
    table.length_costs[n] = cost


def _string_iterated(schedule, x, corpus, table, reg):
    n = len(x)
    cost = 0
    table.values[x] = 0
    for i in range(n + 1):
        if i in reg.records:
            continue
        res = probe(corpus, i, x, schedule.allowance(i, n))
        cost += res.steps
        if res.halted:
            table.values[x] = 1 - res.bit
            table.winners[x] = i
            reg.records[i] = DiagRecord(x, res.bit, n, res.steps)
            break
    table.costs[x] = cost
    table.length_costs[n] = table.length_costs.get(n, 0) + cost


def check_R(schedule: BudgetSchedule, table: RTable, reg: DiagRegistry, corpus: Corpus) -> list[str]:
    """Invariant violations of a finished construction (empty when sound)."""
    problems = []
    for i, rec in reg.records.items():
        if table.values.get(rec.x) != 1 - rec.bit:
            problems.append(f"theta({i})={rec.x!r}: R value is not 1-{rec.bit}")
        res = probe(corpus, i, rec.x, schedule.allowance(i, rec.length))
        if not (res.halted and res.bit == rec.bit and res.steps <= schedule.allowance(i, rec.length)):
            problems.append(f"theta({i})={rec.x!r}: record does not replay within budget")
        if i > rec.length:
            problems.append(f"index {i} diagonalised on a shorter string {rec.x!r}")
    if schedule.mode == SIMPLE_2EXP:
        per_len: dict[int, int] = {}
        for rec in reg.records.values():
            per_len[rec.length] = per_len.get(rec.length, 0) + 1
        for n in range(table.max_len + 1):
            if len(table.ones(n)) > 1:
                problems.append(f"length {n} has {len(table.ones(n))} ones")
            if per_len.get(n, 0) > 1:
                problems.append(f"length {n} has {per_len[n]} deactivations")
        problems.extend(_escape_problems(schedule, reg, corpus, table.max_len))
    return problems


def _escape_problems(schedule, reg, corpus, max_len) -> list[str]:
    """Each index passed over while converging is passed over for a smaller one, at most ``e`` times."""
    problems = []
    winner_at = {rec.length: i for i, rec in reg.records.items()}
    skips: dict[int, int] = {}
    for n in range(max_len + 1):
        for e in range(n + 1):
            rec = reg.records.get(e)
            if rec is not None and rec.length < n:
                continue
            allowance = schedule.allowance(e, n)
            if not any(probe(corpus, e, x, allowance).halted for x in words_of_length(n)):
                continue
            w = winner_at.get(n)
            if w == e:
                continue
            if w is None or w > e:
                problems.append(f"length {n}: index {e} converges but nothing smaller won")
            skips[e] = skips.get(e, 0) + 1
    for e, c in skips.items():
        if c > e:
            problems.append(f"index {e} skipped {c} times")
    return problems


# ---------------------------------------------------------------- advice and the fast procedure

class AdviceTooOptimistic(RuntimeError):
    """An index below k outside the advice list was diagonalised past the cutoff."""


@dataclass(frozen=True)
class AdviceList:
    k: int
    sigma: frozenset[int]
    horizon: int
    cutoff: int

    def past_cutoff(self, x: str) -> bool:
        return len(x) > self.cutoff and len(x) >= self.k


def advice(reg: DiagRegistry, k: int) -> AdviceList:
    sigma = frozenset(i for i in range(k) if i in reg.records)
    cutoff = max((reg.records[i].length for i in sigma), default=-1)
    return AdviceList(k, sigma, reg.horizon, cutoff)


@dataclass(frozen=True)
class FastResult:
    bit: int
    steps: int
    winner: int | None
    phase1_steps: int
    replay_steps: int


def _phase2(schedule, x, k, active, corpus):
    """Least active ``j`` in ``[k, |x|]`` converging within its allowance, and the steps used."""
    n = len(x)
    used = 0
    for j in range(k, n + 1):
        if j not in active:
            continue
        res = probe(corpus, j, x, schedule.allowance(j, n))
        used += min(res.steps, schedule.allowance(j, n))
        if res.halted:
            return j, res.bit, used
    return None, 0, used


@lru_cache(maxsize=64)
def _fast_table(schedule: BudgetSchedule, adv: AdviceList, corpus: Corpus, upto: int, winners: tuple):
    rdirect_winner = dict(winners)
    # phase 1: the full construction, until every index in sigma_k is inactive
    if adv.cutoff >= 0:
        table, reg = build_R(schedule, adv.cutoff, corpus)
        phase1 = sum(table.length_costs.values())
        inactive = set(reg.records)
    else:
        phase1, inactive = 0, set()
    if schedule.mode == SIMPLE_2EXP:
        raise ValueError("the two-phase procedure needs an iterated schedule")
    out = {}
    replay = 0
    for n in range(adv.cutoff + 1, upto + 1):
        for x in words_of_length(n):
            w = rdirect_winner.get(x)
            if w is not None and w < adv.k:
                raise AdviceTooOptimistic(f"index {w} < k={adv.k} diagonalised at {x!r} past cutoff {adv.cutoff}")
            active = {j for j in range(adv.k, n + 1) if j not in inactive}
            j, bit, used = _phase2(schedule, x, adv.k, active, corpus)
            value = 0 if j is None else 1 - bit
            if j is not None:
                inactive.add(j)
            out[x] = FastResult(value, used, j, phase1, replay)
            replay += used
    return out


def fast_R_with_advice(schedule: BudgetSchedule, adv: AdviceList, x: str, Rdirect: RTable, corpus: Corpus) -> FastResult:
    """R(x) from the advice list: replay the full construction to the cutoff, then simulate only indices ``>= k``.

    ``steps`` counts the phase-two probes made for ``x`` itself;
    ``replay_steps`` is what the same procedure spent on earlier strings.
    """
    if not adv.past_cutoff(x):
        raise ValueError(f"{x!r} is not past the advice cutoff {adv.cutoff} (k={adv.k})")
    if len(x) > Rdirect.max_len:
        raise ValueError(f"{x!r} is beyond the direct table's horizon")
    winners = tuple(sorted(Rdirect.winners.items()))
    return _fast_table(schedule, adv, corpus, len(x), winners)[x]


def poly_bound(schedule: BudgetSchedule, x: str, k: int, C: int = 1, d: int = 1) -> int:
    """``C * (|x| * f^(|x|-k)(|x|))**d``."""
    n = len(x)
    return C * (n * schedule.iterate(n - k, n)) ** d


# ---------------------------------------------------------------- avoidance and Psi for the DNC argument

def forbidden(reg: DiagRegistry, k: int) -> set[int]:
    return {proj3(2, word_to_index(reg.records[i].x)) for i in range(k) if i in reg.records}


def f_avoider(reg: DiagRegistry, k: int) -> int:
    bad = forbidden(reg, k)
    v = 0
    while v in bad:
        v += 1
    return v


def f_avoider_cost(k: int) -> int:
    """Accounted steps to compute ``f_avoider(., k)``: one per index inspected, plus one."""
    return k + 1


FALLBACK_BUDGET = "FallbackBudget"
FALLBACK_MISMATCH = "FallbackMismatch"
FAST_PATH = "FastPath"


@dataclass(frozen=True)
class DncResult:
    bit: int
    steps: int
    path: str


def psi_dnc(x: int, reg: DiagRegistry, schedule: BudgetSchedule, Rdirect: RTable, corpus: Corpus) -> DncResult:
    """Decode ``x = <k, l, m>`` and compute R(x), fast when ``l`` is the avoider value.

    On the fast path no index below ``k`` can own ``x`` (its theta would
    share the middle projection ``F(k)``), so the least active index in
    ``[k, |x|]`` that converges in time decides R(x).
    """
    k, l, m = proj3(1, x), proj3(2, x), proj3(3, x)
    word = index_to_word(x)
    cost = f_avoider_cost(k)
    if cost > m:
        return DncResult(Rdirect(word), m, FALLBACK_BUDGET)
    if l != f_avoider(reg, k):
        return DncResult(Rdirect(word), cost, FALLBACK_MISMATCH)
    active = {j for j in range(k, len(word) + 1) if reg.active(j, before=word)}
    j, bit, used = _phase2(schedule, word, k, active, corpus)
    return DncResult(0 if j is None else 1 - bit, cost + used, FAST_PATH)


# ---------------------------------------------------------------- the block functional

def block(zprefix: str, n: int) -> str:
    """``zeta_n`` where ``Z = zeta_1 zeta_2 ...`` and ``|zeta_i| = i``."""
    start = n * (n - 1) // 2
    if len(zprefix) < start + n:
        raise ValueError(f"need {start + n} bits of Z to read block {n}, got {len(zprefix)}")
    return zprefix[start:start + n]


def schnorr_psi(zprefix: str, x: str, Rdirect: RTable) -> tuple[int, bool]:
    if x == block(zprefix, len(x)):
        return 0, True
    return Rdirect(x), False


def cn_measure(n: int, Rdirect: RTable) -> Fraction:
    """Exact measure of ``{Z : Psi^Z(x) != R(x) for some |x| = n}``.

    Only block ``zeta_n`` matters, so it suffices to count the blocks that
    trigger a disagreement.
    """
    pad = "0" * (n * (n - 1) // 2)
    bad = 0
    for zeta in words_of_length(n):
        # every x other than zeta gets R(x) back unchanged
        if schnorr_psi(pad + zeta, zeta, Rdirect)[0] != Rdirect(zeta):
            bad += 1
    return Fraction(bad, 1 << n)
