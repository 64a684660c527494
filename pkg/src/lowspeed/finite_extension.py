"""Finite-extension construction of a sparse oracle, plus the fast simulator Psi.

Stage ``s+1`` takes ``(e, i) = unpair(s)`` and looks for a sparse prefix
``tau`` extending the current ``sigma`` and an input ``n`` on which
``Phi_e^tau(n)`` and ``R_i(n)`` both converge to different values.  The
search is truncated at a step budget; when it fails the stage appends a 0
and records that the fallback was budget-limited (the true case split is a
Pi-1 question no finite run settles).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .encoding import unpair
from .machine import Corpus, FinitePrefix, Program, run, run_plain
from .sparse import SparsePrefix, enumerate_sparse_prefixes

DIAGONAL_FOUND = "DiagonalFound"
FALLBACK_BUDGET = "FallbackBudgetLimited"
FALLBACK_NO_WITNESS = "FallbackNoWitnessPossible"


@dataclass(frozen=True)
class Witness:
    tau: SparsePrefix
    n: int
    value_phi: int
    value_r: int


@dataclass(frozen=True)
class FEStageRecord:
    stage: int
    e: int
    i: int
    outcome: str
    sigma_length: int
    search_steps: int
    witness: Witness | None = None

    def __post_init__(self):
        if self.outcome == DIAGONAL_FOUND:
            assert self.witness is not None and self.witness.value_phi != self.witness.value_r


@dataclass(frozen=True)
class FEState:
    sigma: SparsePrefix = SparsePrefix(0)
    stage: int = 0
    log: tuple[FEStageRecord, ...] = field(default=())

    def sigmas(self) -> list[SparsePrefix]:
        """sigma_0, sigma_1, ... reconstructed from the log."""
        out = [SparsePrefix(0)]
        for rec in self.log:
            if rec.witness is not None:
                out.append(rec.witness.tau)
            else:
                out.append(out[-1].extend_zero())
        return out


def diagonal_search(phi: Program, r: Program, sigma: SparsePrefix, budget: int) -> tuple[Witness | None, int]:
    """Look for the length-lex-first sparse ``tau`` extending ``sigma`` that splits Phi^tau from R.

    Stage ``t > |sigma|`` of the search tries every sparse ``tau`` of length ``t``
    and every input ``n <= t``, each machine run for ``t`` steps.  Returns
    the witness (or None) and the number of simulated steps spent.
    """
    cost = 0
    for t in range(sigma.length + 1, budget + 1):
        r_vals = {}
        for n in range(t + 1):
            res = run_plain(r, n, t)
            cost += res.steps
            if res.halted:
                r_vals[n] = res.bit
        if not r_vals:
            continue
        for tau in enumerate_sparse_prefixes(t, sigma):
            for n, rv in r_vals.items():
                res = run(phi, tau, n, t)
                cost += res.steps
                if res.halted and res.bit != rv:
                    return Witness(tau, n, res.bit, rv), cost
    return None, cost


def fe_stage(state: FEState, budget: int, corpus: Corpus) -> FEState:
    if budget < 1:
        raise ValueError("budget must be at least 1")
    e, i = unpair(state.stage)
    phi, r = corpus.program(e), corpus.program(i)
    if phi is None or r is None:
        witness, cost, outcome = None, 0, FALLBACK_NO_WITNESS
    else:
        witness, cost = diagonal_search(phi, r, state.sigma, budget)
        outcome = DIAGONAL_FOUND if witness else FALLBACK_BUDGET
    sigma = witness.tau if witness else state.sigma.extend_zero()
    rec = FEStageRecord(state.stage + 1, e, i, outcome, sigma.length, cost, witness)
    return FEState(sigma, state.stage + 1, state.log + (rec,))


def fe_run(stages: int, budget: int, corpus: Corpus) -> FEState:
    state = FEState()
    for _ in range(stages):
        state = fe_stage(state, budget, corpus)
    return state


def replay_check(state: FEState, corpus: Corpus, budget: int = 10_000) -> list[str]:
    """Re-verify every diagonal record against the final prefix; returns problems found."""
    problems = []
    sigmas = state.sigmas()
    for a, b in zip(sigmas, sigmas[1:]):
        if not b.extends(a) or b.length <= a.length:
            problems.append(f"sigma chain broken between lengths {a.length} and {b.length}")
    final = FinitePrefix(state.sigma.bits)
    for rec in state.log:
        if rec.outcome != DIAGONAL_FOUND:
            continue
        w = rec.witness
        got = run(corpus.program(rec.e), final, w.n, budget)
        want = run_plain(corpus.program(rec.i), w.n, budget)
        if not (got.halted and want.halted and got.bit != want.bit):
            problems.append(f"stage {rec.stage}: witness n={w.n} does not replay ({got}, {want})")
    return problems


# ---------------------------------------------------------------- Psi

def query_horizon(t: int) -> int:
    """Prefix length that answers every query a ``t``-step run can make.

    In ``t`` steps a machine appends at most ``t - 1`` bits before asking,
    and strings of length below ``t`` have indices below ``2**t - 1``.
    """
    return (1 << t) - 1


@dataclass(frozen=True)
class PsiResult:
    value: int | None
    winner: SparsePrefix | None
    phi_steps: int | None
    psi_steps: int
    stage: int

    @property
    def found(self) -> bool:
        return self.value is not None


def psi_simulate(machine: int | Program, base: SparsePrefix | str, n: int, max_stage: int) -> PsiResult:
    """Compute Phi^Y(n) uniformly over every sparse Y extending ``base``.

    Outer stage ``t`` runs the machine for ``t`` steps on every sparse
    prefix of length ``max(2**t - 1, |base|)`` extending ``base``; there are
    at most ``2t`` of them.  The first stage with a convergence returns the
    fastest one (ties go to the lexicographically first prefix).
    ``psi_steps`` charges each simulated machine step plus one unit of
    set-up per candidate prefix.
    """
    if isinstance(base, str):
        base = SparsePrefix.from_bits(base)
    psi_steps = 0
    for t in range(1, max_stage + 1):
        best = None
        for tau in enumerate_sparse_prefixes(max(query_horizon(t), base.length), base):
            res = run(machine, tau, n, t)
            psi_steps += res.steps + 1
            if res.halted and (best is None or res.steps < best[0].steps):
                best = (res, tau)
        if best is not None:
            res, tau = best
            return PsiResult(res.bit, tau, res.steps, psi_steps, t)
    return PsiResult(None, None, None, psi_steps, max_stage)
