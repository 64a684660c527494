"""Oracle Turing machines: format, Goedel numbering, and a step-exact interpreter.

Machine model
-------------
One work tape over ``{0, 1, _}`` (one-way infinite; a left move at cell 0
stays put), holding the input string at cells ``0..|x|-1`` with the head on
cell 0 and the machine in state 0.  Beside the work tape there is a
write-only query register.  Every transition costs one step and performs,
in order: write, move, query action, state change.  The query action is one
of

* ``-``  nothing,
* ``0``/``1``  append that bit to the query register,
* ``?``  ask the oracle about the string in the register; the register is
  cleared and the machine branches to ``next`` on a No and ``next_yes`` on
  a Yes.

Entering ``H0``/``H1`` halts with output 0/1.

Assembler text
--------------
One transition per line::

    <state> <symbol> <write> <move> <action> <next>

with symbols ``0 1 _``, moves ``L R S``, actions ``- 0 1 ?`` and ``next``
either a state number, ``H0``/``H1``, or ``no/yes`` for an ask.  ``#``
starts a comment.  A corpus file holds several programs, each introduced
by ``.program NAME``, plus an optional ``.sweep N`` directive.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

from .encoding import index_to_word, pair, unpair, word_to_index

BLANK = 2
SYMBOLS = "01_"
MOVES = "SLR"
ACTIONS = "-01?"
_MOVE_DELTA = {"S": 0, "L": -1, "R": 1}


class ProgramError(ValueError):
    """A malformed program or assembler text."""


@dataclass(frozen=True)
class Transition:
    write: int
    move: str
    action: str
    next: int
    next_yes: int

    def __post_init__(self):
        if self.action != "?" and self.next_yes != self.next:
            raise ProgramError("only ask transitions may branch")


@dataclass(frozen=True)
class Program:
    """A total transition table. ``table[3*q + symbol]`` is the rule for state ``q``.

    Targets ``n_states`` and ``n_states + 1`` are the halting states H0 and H1.
    """

    n_states: int
    table: tuple[Transition, ...]

    def __post_init__(self):
        self.validate()
        object.__setattr__(self, "_hash", hash((self.n_states, self.table)))

    def __hash__(self):
        # programs key several memo tables; hashing the table every time dominates
        return self._hash

    def validate(self) -> None:
        n = self.n_states
        if n < 1:
            raise ProgramError("a program needs at least one state")
        if len(self.table) != 3 * n:
            raise ProgramError(f"expected {3 * n} transitions, got {len(self.table)}")
        for tr in self.table:
            if tr.write not in (0, 1, BLANK) or tr.move not in MOVES or tr.action not in ACTIONS:
                raise ProgramError(f"bad transition {tr}")
            for target in (tr.next, tr.next_yes):
                if not 0 <= target < n + 2:
                    raise ProgramError(f"target {target} out of range")

    def rule(self, state: int, symbol: int) -> Transition:
        return self.table[3 * state + symbol]


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class Halt:
    bit: int
    steps: int
    halted = True


@dataclass(frozen=True)
class BudgetExceeded:
    steps: int
    halted = False


@dataclass(frozen=True)
class OracleUnresolved:
    query: int
    steps: int
    halted = False


RunResult = Union[Halt, BudgetExceeded, OracleUnresolved]


# ---------------------------------------------------------------- oracles

class EmptyOracle:
    """Answers No to everything."""

    def query(self, index: int) -> bool:
        return False

    def __repr__(self):
        return "Empty"


EMPTY = EmptyOracle()


@dataclass(frozen=True)
class FinitePrefix:
    """Oracle known only on indices below ``len(bits)``; beyond that it is unresolved."""

    bits: str

    def __len__(self):
        return len(self.bits)

    def query(self, index: int) -> bool | None:
        if index < len(self.bits):
            return self.bits[index] == "1"
        return None


@dataclass(frozen=True)
class Generated:
    """Oracle given by a decision rule over word indices."""

    rule: Callable[[int], bool]

    def query(self, index: int) -> bool:
        return bool(self.rule(index))


# ---------------------------------------------------------------- assembler

def _target_name(target: int, n: int) -> str:
    return f"H{target - n}" if target >= n else str(target)


def _parse_target(token: str) -> int | str:
    if token in ("H0", "H1"):
        return token
    if not token.isdigit():
        raise ProgramError(f"bad target {token!r}")
    return int(token)


def format_program(p: Program) -> str:
    lines = []
    n = p.n_states
    for q in range(n):
        for s in range(3):
            tr = p.rule(q, s)
            if tr.action == "?":
                nxt = f"{_target_name(tr.next, n)}/{_target_name(tr.next_yes, n)}"
            else:
                nxt = _target_name(tr.next, n)
            lines.append(f"{q} {SYMBOLS[s]} {SYMBOLS[tr.write]} {tr.move} {tr.action} {nxt}")
    return "\n".join(lines) + "\n"


def parse_program(text: str) -> Program:
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ProgramError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        q, sym, write, move, action, nxt = parts
        if not q.isdigit() or sym not in SYMBOLS or write not in SYMBOLS:
            raise ProgramError(f"line {lineno}: bad state or symbol")
        if move not in MOVES or action not in ACTIONS:
            raise ProgramError(f"line {lineno}: bad move or action")
        if action == "?":
            if "/" not in nxt:
                raise ProgramError(f"line {lineno}: ask needs no/yes targets")
            no, yes = nxt.split("/", 1)
            targets = (_parse_target(no), _parse_target(yes))
        else:
            targets = (_parse_target(nxt),) * 2
        key = (int(q), SYMBOLS.index(sym))
        if key in rows:
            raise ProgramError(f"line {lineno}: duplicate rule for {key}")
        rows[key] = (SYMBOLS.index(write), move, action, targets)
    if not rows:
        raise ProgramError("empty program")
    n = max(q for q, _ in rows) + 1
    table = []
    for q in range(n):
        for s in range(3):
            if (q, s) not in rows:
                raise ProgramError(f"missing rule for state {q} symbol {SYMBOLS[s]}")
            write, move, action, targets = rows[(q, s)]
            resolved = [n + int(t[1]) if isinstance(t, str) else t for t in targets]
            table.append(Transition(write, move, action, resolved[0], resolved[1]))
    return Program(n, tuple(table))


# ---------------------------------------------------------------- numbering
#
# e = pair(code, pad); code + 1 = 2**(n-1) * (2*tn + 1), so the number of
# states is bounded by the bit length of the code.  tn lists the 3n
# transitions as digits in base K = 9 * (3H + H*H), H = n + 2.

def _digit_base(n: int) -> int:
    h = n + 2
    return 9 * (3 * h + h * h)


def _transition_digit(tr: Transition, n: int) -> int:
    h = n + 2
    low = tr.write * 3 + MOVES.index(tr.move)
    if tr.action == "?":
        sub = 3 * h + tr.next * h + tr.next_yes
    else:
        sub = ACTIONS.index(tr.action) * h + tr.next
    return sub * 9 + low


def _digit_transition(d: int, n: int) -> Transition:
    h = n + 2
    sub, low = divmod(d, 9)
    write, move = divmod(low, 3)
    if sub < 3 * h:
        a, nxt = divmod(sub, h)
        return Transition(write, MOVES[move], ACTIONS[a], nxt, nxt)
    no, yes = divmod(sub - 3 * h, h)
    return Transition(write, MOVES[move], "?", no, yes)


def program_code(p: Program) -> int:
    n = p.n_states
    k = _digit_base(n)
    tn = 0
    for tr in reversed(p.table):
        tn = tn * k + _transition_digit(tr, n)
    return (1 << (n - 1)) * (2 * tn + 1) - 1


def assemble(p: Program) -> int:
    """Canonical index of ``p`` (padding 0)."""
    if not isinstance(p, Program):
        raise ProgramError(f"not a program: {p!r}")
    p.validate()
    return pair(program_code(p), 0)


def padded(e: int, pad: int) -> int:
    """Another index of the same program as ``e``."""
    code, _ = unpair(e)
    return pair(code, pad)


@functools.lru_cache(maxsize=4096)
def decode_program(e: int) -> Program:
    """Total decoding: every natural names a program; invalid codes name LOOP."""
    if e < 0:
        raise ValueError("indices are naturals")
    code, _pad = unpair(e)
    c = code + 1
    n = (c & -c).bit_length()          # 2-adic valuation + 1
    tn = ((c >> (n - 1)) - 1) // 2
    k = _digit_base(n)
    if tn >= k ** (3 * n):
        return LOOP
    table = []
    for _ in range(3 * n):
        tn, d = divmod(tn, k)
        table.append(_digit_transition(d, n))
    return Program(n, tuple(table))


# ---------------------------------------------------------------- interpreter

@dataclass(frozen=True)
class _Compiled:
    n: int
    write: tuple[int, ...]
    delta: tuple[int, ...]
    act: tuple[int, ...]
    nxt: tuple[int, ...]
    nxt_yes: tuple[int, ...]
    drifts: tuple[bool, ...]
    inert: bool


@functools.lru_cache(maxsize=4096)
def _compile(p: Program) -> _Compiled:
    n = p.n_states
    write = tuple(tr.write for tr in p.table)
    delta = tuple(_MOVE_DELTA[tr.move] for tr in p.table)
    act = tuple(ACTIONS.index(tr.action) for tr in p.table)
    nxt = tuple(tr.next for tr in p.table)
    nxt_yes = tuple(tr.next_yes for tr in p.table)
    # A state drifts if, reading blanks beyond all written cells, it keeps
    # moving right without asking and never halts.
    drifts = []
    for q in range(n):
        seen = set()
        cur = q
        verdict = False
        while True:
            if cur in seen:
                verdict = True
                break
            seen.add(cur)
            j = 3 * cur + BLANK
            if delta[j] != 1 or act[j] == 3:
                break
            cur = nxt[j]
            if cur >= n:
                break
        drifts.append(verdict)
    # Inert: from state 0 no halting state and no ask is reachable, so every run diverges.
    reach, frontier, inert = {0}, [0], True
    while frontier and inert:
        q = frontier.pop()
        for j in range(3 * q, 3 * q + 3):
            if act[j] == 3 or nxt[j] >= n:
                inert = False
            elif nxt[j] not in reach:
                reach.add(nxt[j])
                frontier.append(nxt[j])
    return _Compiled(n, write, delta, act, nxt, nxt_yes, tuple(drifts), inert)


def program_of(machine: int | Program) -> Program:
    return machine if isinstance(machine, Program) else decode_program(machine)


def run(machine: int | Program, oracle, x: int | str, budget: int) -> RunResult:
    """Run ``machine`` with ``oracle`` on input ``x`` for at most ``budget`` steps.

    ``x`` is a word index (a ``str`` is accepted as the word itself).
    Runs that provably never halt (a repeated configuration, or an endless
    drift right over blank tape) are reported as ``BudgetExceeded(budget)``
    without stepping through the rest of the budget; the result is the same
    as a literal run.
    """
    if budget <= 0:
        return BudgetExceeded(0)
    word = x if isinstance(x, str) else index_to_word(x)
    c = _compile(program_of(machine))
    if c.inert:
        return BudgetExceeded(budget)
    return _execute(c, oracle, word, budget)


def _execute(c: _Compiled, oracle, word: str, budget: int) -> RunResult:
    n = c.n
    write, delta, act, nxt, nxt_yes, drifts = c.write, c.delta, c.act, c.nxt, c.nxt_yes, c.drifts
    tape = bytearray(word.encode("ascii").translate(_ASCII_BITS))
    head = 0
    state = 0
    steps = 0
    qlen = 0
    qval = 0
    check_at = 1
    ck = None
    while steps < budget:
        size = len(tape)
        if head < size:
            sym = tape[head]
        else:
            if drifts[state]:
                return BudgetExceeded(budget)
            sym = BLANK
        j = 3 * state + sym
        steps += 1
        w = write[j]
        if head < size:
            tape[head] = w
        elif w != BLANK:
            tape.extend(b"\x02" * (head - size))
            tape.append(w)
        head += delta[j]
        if head < 0:
            head = 0
        a = act[j]
        if a == 0:
            state = nxt[j]
        elif a == 3:
            idx = (1 << qlen) - 1 + qval
            ans = oracle.query(idx)
            if ans is None:
                return OracleUnresolved(idx, steps)
            qlen = qval = 0
            state = nxt_yes[j] if ans else nxt[j]
        else:
            qval = 2 * qval + (a - 1)
            qlen += 1
            state = nxt[j]
        if state >= n:
            return Halt(state - n, steps)
        if ck is not None and state == ck[0] and head == ck[1] and qlen == ck[2] and qval == ck[3]:
            if tape.rstrip(b"\x02") == ck[4]:
                return BudgetExceeded(budget)
        if steps == check_at:
            ck = (state, head, qlen, qval, bytes(tape.rstrip(b"\x02")))
            check_at *= 2
    return BudgetExceeded(budget)


_ASCII_BITS = bytes.maketrans(b"01", b"\x00\x01")


def run_plain(machine: int | Program, x: int | str, budget: int) -> RunResult:
    """The partial computable function R_i: machine ``i`` with the empty oracle."""
    return run(machine, EMPTY, x, budget)


def we_stage(machine: int | Program, s: int) -> set[int]:
    """W_e[s]: inputs with index <= s on which the plain run halts within s steps."""
    return {x for x in range(s + 1) if run_plain(machine, x, s).halted}


# ---------------------------------------------------------------- planted programs

LOOP = Program(1, tuple(Transition(0, "S", "-", 0, 0) for _ in range(3)))

_PLANTED_TEXT = {
    "ORACLE_BIT": """
        0 0 0 R 0 0
        0 1 1 R 1 0
        0 _ _ S ? H0/H1
    """,
    "LOOP": format_program(LOOP),
    "CONST_0": """
        0 0 0 S - H0
        0 1 1 S - H0
        0 _ _ S - H0
    """,
    "CONST_1": """
        0 0 0 S - H1
        0 1 1 S - H1
        0 _ _ S - H1
    """,
    "PARITY": """
        0 0 0 R - 0
        0 1 1 R - 1
        0 _ _ S - H0
        1 0 0 R - 1
        1 1 1 R - 0
        1 _ _ S - H1
    """,
    "SPARSE_PROBE": """
        0 0 0 R 0 0
        0 1 1 R 0 0
        0 _ _ S ? H0/H1
    """,
    "HALT_ALL": """
        0 0 _ R - H1
        0 1 _ R - H1
        0 _ _ R - H1
    """,
    "NEG_ORACLE_BIT": """
        0 0 0 R 0 0
        0 1 1 R 1 0
        0 _ _ S ? H1/H0
    """,
    "ASK_EMPTY": """
        0 0 0 S ? H0/H1
        0 1 1 S ? H0/H1
        0 _ _ S ? H0/H1
    """,
    "DRIFT": """
        0 0 0 R - 0
        0 1 1 R - 0
        0 _ _ R - 0
    """,
}

PLANTED: dict[str, Program] = {name: parse_program(text) for name, text in _PLANTED_TEXT.items()}
ORACLE_BIT = PLANTED["ORACLE_BIT"]
CONST_0 = PLANTED["CONST_0"]
CONST_1 = PLANTED["CONST_1"]
PARITY = PLANTED["PARITY"]
SPARSE_PROBE = PLANTED["SPARSE_PROBE"]
HALT_ALL = PLANTED["HALT_ALL"]
NEG_ORACLE_BIT = PLANTED["NEG_ORACLE_BIT"]
ASK_EMPTY = PLANTED["ASK_EMPTY"]
DRIFT = PLANTED["DRIFT"]


# ---------------------------------------------------------------- corpora

class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Corpus:
    """An effective list of machines used by the constructions.

    Indices below ``len(planted)`` are the planted programs; the next
    ``sweep`` indices fall through to ``decode_program(i - len(planted))``.
    Anything past that is outside the corpus and treated as never halting.
    """

    planted: tuple[Program, ...] = ()
    names: tuple[str, ...] = ()
    sweep: int = 0

    def __len__(self):
        return len(self.planted) + self.sweep

    def program(self, i: int) -> Program | None:
        if i < len(self.planted):
            return self.planted[i]
        if i < len(self):
            return decode_program(i - len(self.planted))
        return None

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    @classmethod
    def of(cls, *names: str, sweep: int = 0) -> "Corpus":
        return cls(tuple(PLANTED[nm] for nm in names), tuple(names), sweep)


def parse_corpus(text: str) -> Corpus:
    programs: list[tuple[str, list[str]]] = []
    sweep = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(".program"):
            parts = line.split()
            if len(parts) != 2:
                raise CorpusError(f"line {lineno}: .program needs a name")
            programs.append((parts[1], []))
        elif line.startswith(".sweep"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise CorpusError(f"line {lineno}: .sweep needs a natural")
            sweep = int(parts[1])
        else:
            if not programs:
                raise CorpusError(f"line {lineno}: transition outside .program")
            programs[-1][1].append(line)
    names = []
    planted = []
    for name, lines in programs:
        if name in names:
            raise CorpusError(f"duplicate program name {name}")
        try:
            planted.append(parse_program("\n".join(lines)))
        except ProgramError as exc:
            raise CorpusError(f"program {name}: {exc}") from exc
        names.append(name)
    return Corpus(tuple(planted), tuple(names), sweep)


def load_corpus(path: str | Path) -> Corpus:
    return parse_corpus(Path(path).read_text())


DEFAULT_CORPUS_PATH = Path(__file__).parent / "data" / "default.tm"


def default_corpus() -> Corpus:
    return load_corpus(DEFAULT_CORPUS_PATH)


def format_corpus(corpus: Corpus) -> str:
    chunks = []
    for name, p in zip(corpus.names, corpus.planted):
        chunks.append(f".program {name}\n{format_program(p)}")
    if corpus.sweep:
        chunks.append(f".sweep {corpus.sweep}\n")
    return "\n".join(chunks)
