"""A c.e. set built by a dump construction under a finite-injury priority list.

Every enumeration follows the dump rule: whatever enters at stage ``t``
brings the whole interval ``[x, t]`` (inclusive) with it.  Consequently
the length-``s`` prefixes the final set can still have are few: the
current approximation, plus one block of ones ``[x, s)`` for each
``x <= s``.

Two kinds of requirement are scheduled round-robin in a fixed priority
order:

* ``L(e, i)`` builds a fast simulator Psi of ``Phi_e^A`` from the candidate
  prefixes and diagonalises as soon as ``R_i`` disagrees with Psi.  It also
  gates every lower-priority enumeration until ``R_i`` has confirmed Psi on
  all points where Psi is defined, simulating the pending interval as if it
  were already in ``A`` while it waits.
* ``P(e)`` is a Friedberg-Muchnik follower strategy for ``complement(A) != W_e``.

A committed enumeration (a P follower or an L diagonalisation) injures and
resets every lower-priority strategy.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .machine import Corpus, FinitePrefix, run, run_plain
from .trace import Trace

ACTIVE = "Active"
SATISFIED = "SatisfiedByDiagonal"
PENDING = "PendingConfirmation"

WAITING_FOLLOWER = "WaitingForFollower"
WAITING_WE = "WaitingForWe"
REQUESTED = "Requested"
ENUMERATED = "Enumerated"

CONFIRMED = "Confirmed"
STILL_WAITING = "StillWaiting"
DIAGONALIZED_INSTEAD = "DiagonalizedInstead"


@dataclass(frozen=True)
class CESet:
    members: frozenset[int] = frozenset()
    history: tuple[tuple[int, int], ...] = ()

    def __contains__(self, y: int) -> bool:
        return y in self.members

    def prefix(self, s: int) -> str:
        return "".join("1" if y in self.members else "0" for y in range(s))

    def closure_ok(self) -> bool:
        covered = set()
        for x, t in self.history:
            covered.update(range(x, t + 1))
        return covered == set(self.members)


def dump(A: CESet, x: int, t: int) -> CESet:
    """Enumerate ``x`` at stage ``t``: add all of ``[x, t]``."""
    if not 0 <= x <= t:
        raise ValueError(f"dump needs 0 <= x <= t, got x={x}, t={t}")
    block = range(x, t + 1)
    if all(y in A.members for y in block):
        return A
    return CESet(A.members | frozenset(block), A.history + ((x, t),))


def candidate_prefixes(A: CESet, s: int) -> list[str]:
    """Length-``s`` strings that can still be a prefix of the final set, sorted."""
    base = [y in A.members for y in range(s)]
    out = set()
    for x in range(s + 1):
        out.add("".join("1" if (b or y >= x) else "0" for y, b in enumerate(base)))
    return sorted(out)


def realizing_start(A: CESet, alpha: str) -> int | None:
    """The ``y`` such that dumping from ``y`` makes ``alpha`` a prefix of ``A``.

    Returns ``len(alpha)`` when nothing needs adding and None when ``alpha``
    is no longer reachable.
    """
    m = len(alpha)
    ones = {y for y, b in enumerate(alpha) if b == "1"}
    if any(y in A.members and y not in ones for y in range(m)):
        return None
    missing = sorted(y for y in ones if y not in A.members)
    if not missing:
        return m
    y = missing[0]
    if missing != list(range(y, m)):
        return None
    return y


# ---------------------------------------------------------------- strategies

@dataclass(frozen=True)
class PsiEntry:
    bit: int
    prefix: str
    steps: int
    stage: int


@dataclass(frozen=True)
class Diagonalization:
    x: int
    prefix: str
    psi_bit: int
    r_bit: int
    start: int


@dataclass(frozen=True)
class LStrategyState:
    e: int
    i: int
    psi: dict = field(default_factory=dict)
    status: str = ACTIVE
    pending: tuple[tuple[int, int], ...] = ()
    diagonal: Diagonalization | None = None
    injuries: int = 0

    kind = "L"


@dataclass(frozen=True)
class PStrategyState:
    e: int
    follower: int | None = None
    status: str = WAITING_FOLLOWER
    resets: int = 0

    kind = "P"


def l_strategy_step(L: LStrategyState, A: CESet, s: int, corpus: Corpus) -> LStrategyState:
    """One eligible action of an L strategy at stage ``s``.

    Defines Psi on new points ``x <= s`` from the fastest convergence over
    all candidate prefixes (pretend prefixes for pending intervals
    included), then looks for a confirmed disagreement with ``R_i``.
    """
    phi, r = corpus.program(L.e), corpus.program(L.i)
    if L.status == SATISFIED or phi is None or r is None:
        return L
    cands = set(candidate_prefixes(A, s))
    for y, t in L.pending:
        cands.update(candidate_prefixes(dump(A, y, t), s))
    cands = sorted(cands)
    psi = dict(L.psi)
    for x in range(s + 1):
        if x in psi:
            continue
        best = None
        for alpha in cands:
            res = run(phi, FinitePrefix(alpha), x, s)
            if res.halted and (best is None or res.steps < best[0].steps):
                best = (res, alpha)
        if best is not None:
            psi[x] = PsiEntry(best[0].bit, best[1], best[0].steps, s)
    for x in sorted(psi):
        res = run_plain(r, x, s)
        if res.halted and res.bit != psi[x].bit:
            start = realizing_start(A, psi[x].prefix)
            if start is None:
                continue
            diag = Diagonalization(x, psi[x].prefix, psi[x].bit, res.bit, start)
            return replace(L, psi=psi, status=SATISFIED, diagonal=diag)
    return replace(L, psi=psi)


def confirm_pending(L: LStrategyState, s: int, corpus: Corpus) -> str:
    """Has ``R_i`` converged to Psi's value on every point where Psi is defined?"""
    r = corpus.program(L.i)
    waiting = False
    for x in sorted(L.psi):
        res = run_plain(r, x, s)
        if not res.halted:
            waiting = True
        elif res.bit != L.psi[x].bit:
            return DIAGONALIZED_INSTEAD
    return STILL_WAITING if waiting else CONFIRMED


def p_strategy_step(P: PStrategyState, A: CESet, s: int, corpus: Corpus, fresh: int) -> tuple[PStrategyState, tuple[int, int] | None]:
    """One eligible action of a P strategy.

    ``fresh`` is the next unused number of the construction.  Returns the
    new state and an enumeration request ``(follower, s)`` or None.
    """
    if P.status in (ENUMERATED, REQUESTED):
        return P, None
    if P.follower is None:
        return replace(P, follower=fresh, status=WAITING_WE), None
    prog = corpus.program(P.e)
    x = P.follower
    if prog is not None and x <= s and run_plain(prog, x, s).halted:
        return replace(P, status=REQUESTED), (x, s)
    return P, None


# ---------------------------------------------------------------- scheduler

@dataclass(frozen=True)
class LReq:
    e: int
    i: int


@dataclass(frozen=True)
class PReq:
    e: int


def interleave(l_requirements: Sequence[LReq], p_requirements: Sequence[PReq]) -> list:
    """Priority list L0, P0, L1, P1, ... from the two separate lists."""
    out = []
    for k in range(max(len(l_requirements), len(p_requirements))):
        if k < len(l_requirements):
            out.append(l_requirements[k])
        if k < len(p_requirements):
            out.append(p_requirements[k])
    return out


@dataclass
class _Request:
    owner: int
    start: int | None
    stage: int
    waiting: set[int]
    gated_by: set[int]
    diagonal: Diagonalization | None = None


@dataclass
class CERunResult:
    A: CESet
    strategies: list
    trace: Trace
    candidates: dict[int, list[str]]
    acts: dict[int, list[int]]
    commits: dict[int, int]
    safety_checks: int = 0
    violations: list[str] = field(default_factory=list)


class _Scheduler:
    def __init__(self, requirements, corpus: Corpus, trace: Trace):
        self.corpus = corpus
        self.trace = trace
        self.A = CESet()
        self.strategies = []
        for req in requirements:
            if isinstance(req, LReq):
                self.strategies.append(LStrategyState(req.e, req.i))
            elif isinstance(req, PReq):
                self.strategies.append(PStrategyState(req.e))
            else:
                raise TypeError(f"unknown requirement {req!r}")
        self.requests: list[_Request] = []
        self.mentioned = 0
        self.candidates: dict[int, list[str]] = {}
        self.acts = {k: [] for k in range(len(self.strategies))}
        self.commits = {k: 0 for k in range(len(self.strategies))}
        self.safety_checks = 0
        self.violations: list[str] = []

    # -- helpers
    def emit(self, s, k, action, **payload):
        self.trace.emit(s, "dump_construction", action, strategy=k, **payload)

    def check(self, s):
        if not self.A.closure_ok():
            self.violations.append(f"stage {s}: dump closure broken")

    def gating(self, owner: int) -> set[int]:
        return {j for j in range(owner) if self.strategies[j].kind == "L" and self.strategies[j].status != SATISFIED
                and self.corpus.program(self.strategies[j].e) is not None}

    def refresh_pending(self):
        """Recompute each L's pending intervals from the outstanding requests."""
        for j, st in enumerate(self.strategies):
            if st.kind != "L" or st.status == SATISFIED:
                continue
            intervals = tuple((rq.start, rq.stage) for rq in self.requests
                              if j in rq.gated_by and rq.start is not None and rq.start < rq.stage + 1)
            status = PENDING if any(j in rq.gated_by for rq in self.requests) else ACTIVE
            self.strategies[j] = replace(st, pending=intervals, status=status)

    def request(self, s, owner, start, diagonal=None):
        gate = self.gating(owner)
        rq = _Request(owner, start, s, set(gate), set(gate), diagonal)
        self.requests.append(rq)
        self.emit(s, owner, "dump-requested", x=-1 if start is None else start, t=s, gated_by=sorted(rq.waiting))
        self.refresh_pending()

    def injure_below(self, s, owner):
        for j in range(owner + 1, len(self.strategies)):
            st = self.strategies[j]
            if st.kind == "L":
                self.strategies[j] = LStrategyState(st.e, st.i, injuries=st.injuries + 1)
            else:
                self.strategies[j] = PStrategyState(st.e, resets=st.resets + 1)
            self.emit(s, j, "injured", by=owner)
        dropped = [rq for rq in self.requests if rq.owner > owner]
        for rq in dropped:
            self.emit(s, rq.owner, "request-cancelled", reason="injury")
        self.requests = [rq for rq in self.requests if rq.owner <= owner]

    def safety(self, s, j):
        """Replay Phi_e^A on every Psi point of a confirming L after a commit."""
        L = self.strategies[j]
        phi, r = self.corpus.program(L.e), self.corpus.program(L.i)
        view = FinitePrefix(self.A.prefix(s + 1))
        for x, entry in sorted(L.psi.items()):
            got = run(phi, view, x, 4 * (s + 1))
            want = run_plain(r, x, 4 * (s + 1))
            self.safety_checks += 1
            if got.halted and want.halted and got.bit != entry.bit and got.bit == want.bit:
                self.violations.append(f"stage {s}: L{j} psi({x})={entry.bit} overturned in R's favour")
            self.emit(s, j, "safety-check", x=x, psi=entry.bit,
                      phi=got.bit if got.halted else -1, r=want.bit if want.halted else -1)

    def commit_ready(self, s):
        while True:
            ready = sorted((rq for rq in self.requests if not rq.waiting), key=lambda rq: rq.owner)
            if not ready:
                return
            rq = ready[0]
            self.requests.remove(rq)
            owner = rq.owner
            st = self.strategies[owner]
            start = rq.start
            if rq.diagonal is not None:
                start = realizing_start(self.A, rq.diagonal.prefix)
                if start is None:
                    self.strategies[owner] = replace(st, status=ACTIVE, diagonal=None)
                    self.emit(s, owner, "request-cancelled", reason="prefix-lost")
                    self.refresh_pending()
                    continue
            if start is not None and start <= s and start < (len(rq.diagonal.prefix) if rq.diagonal else s + 1):
                self.A = dump(self.A, start, s)
                self.mentioned = max(self.mentioned, s)
            self.check(s)
            self.commits[owner] += 1
            if st.kind == "P":
                self.strategies[owner] = replace(st, status=ENUMERATED)
            self.emit(s, owner, "dump-committed", x=-1 if start is None else start, t=s,
                      members=len(self.A.members))
            for j in sorted(rq.gated_by):
                if self.strategies[j].kind == "L" and self.strategies[j].status != SATISFIED:
                    self.safety(s, j)
            self.injure_below(s, owner)
            self.refresh_pending()

    # -- one stage
    def stage(self, s):
        self.mentioned = max(self.mentioned, s)
        cands = candidate_prefixes(self.A, s)
        self.candidates[s] = cands
        if len(cands) > s + 1:
            self.violations.append(f"stage {s}: {len(cands)} candidates")
        if not self.strategies:
            return
        k = (s - 1) % len(self.strategies)
        self.acts[k].append(s)
        st = self.strategies[k]
        if st.kind == "L":
            self.act_l(s, k)
        else:
            self.act_p(s, k)
        self.commit_ready(s)
        self.check(s)

    def act_l(self, s, k):
        L = self.strategies[k]
        if L.status == SATISFIED:
            return
        mine = [rq for rq in self.requests if k in rq.waiting]
        if mine:
            verdict = confirm_pending(L, s, self.corpus)
            self.emit(s, k, "confirmation", verdict=verdict)
            if verdict == CONFIRMED:
                for rq in mine:
                    rq.waiting.discard(k)
                self.emit(s, k, "confirmed", requests=len(mine))
        before = set(L.psi)
        L = l_strategy_step(L, self.A, s, self.corpus)
        self.strategies[k] = L
        for x in sorted(set(L.psi) - before):
            self.mentioned = max(self.mentioned, x)
            self.emit(s, k, "psi-defined", x=x, bit=L.psi[x].bit, prefix=L.psi[x].prefix, steps=L.psi[x].steps)
        if L.status == SATISFIED and L.diagonal is not None:
            d = L.diagonal
            self.emit(s, k, "diagonalized", x=d.x, psi=d.psi_bit, r=d.r_bit, prefix=d.prefix)
            for rq in self.requests:
                rq.waiting.discard(k)
                rq.gated_by.discard(k)
            self.request(s, k, None if d.start >= len(d.prefix) else d.start, diagonal=d)

    def act_p(self, s, k):
        P = self.strategies[k]
        fresh = self.mentioned + 1
        P2, req = p_strategy_step(P, self.A, s, self.corpus, fresh)
        self.strategies[k] = P2
        if P.follower is None and P2.follower is not None:
            self.mentioned = max(self.mentioned, P2.follower)
            self.emit(s, k, "follower-assigned", follower=P2.follower)
        if req is not None:
            self.request(s, k, req[0])


def ce_run(requirements: Sequence, stages: int, corpus: Corpus, trace: Trace | None = None) -> CERunResult:
    """Run the priority construction for stages ``1..stages``.

    ``requirements`` is the priority-ordered list of ``LReq``/``PReq``.
    """
    trace = trace if trace is not None else Trace()
    sch = _Scheduler(requirements, corpus, trace)
    for s in range(1, stages + 1):
        sch.stage(s)
    trace.emit(stages, "dump_construction", "horizon", members=sorted(sch.A.members), strategy=-1)
    return CERunResult(sch.A, sch.strategies, trace, sch.candidates, sch.acts, sch.commits,
                       sch.safety_checks, sch.violations)
