"""Instrumented partition of a family with (2,k)-colourings into A, U, D, P, R parts.

The engine keeps the full list of valid 2-colourings that agree with every
colour fixed so far (as int64 codes, bit ``j`` = colour of member ``j``), so
each "most frequent colour" or "likely case" decision is made exactly.

Parts are bitmasks over family indices.  ``A[i]``, ``U[i]``, ``D[i]``,
``P[i]`` use 1-based part numbers with ``A[1]`` the top part; ``R`` is one
mask until the last stage splits it.  All stage functions mutate the state
in place and return it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .counting import count as count_colourings
from .counting import valid_colourings
from .errors import EngineFault, PreconditionError, UsageError
from .lattice import SetFamily, elements_of, height, linear_extension, longest_chain, mirsky_index

MAX_ENGINE_MEMBERS = 24
STAGES = ("init", "I", "II", "III", "IV")


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def default_epsilon(k: int) -> Fraction:
    return Fraction(1, 500 * k * k)


def default_omega(epsilon: Fraction, k: int) -> int:
    eps = float(epsilon)
    return math.ceil(4 * k * math.log2(1 / eps) / eps)


@dataclass(frozen=True)
class EngineParams:
    k: int
    epsilon: Fraction
    omega: int
    overrides: tuple[str, ...] = ()

    @classmethod
    def make(cls, k: int, epsilon=None, omega: int | None = None) -> "EngineParams":
        if k < 2:
            raise UsageError(f"chain bound k must be >= 2, got {k}")
        over = []
        if epsilon is None:
            eps = default_epsilon(k)
        else:
            eps = Fraction(epsilon)
            over.append("epsilon")
            if not 0 < eps < 1:
                raise UsageError(f"epsilon must lie in (0, 1), got {eps}")
        if omega is None:
            om = default_omega(eps, k)
        else:
            om = int(omega)
            over.append("omega")
            if om < 0:
                raise UsageError(f"omega must be non-negative, got {om}")
        return cls(k, eps, om, tuple(over))

    @property
    def regime(self) -> str:
        return "override" if "omega" in self.overrides else "default"

    def to_dict(self) -> dict:
        return {"k": self.k, "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
                "omega": self.omega, "overrides": list(self.overrides), "regime": self.regime}


@dataclass
class BranchStep:
    direction: str
    part: int
    neighbourhood: int
    case: int | None  # 0 = all opposite, j >= 1 = j-th neighbour is first same-coloured, None = no such part
    before: int
    after: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LedgerEntry:
    stage: str
    op: str  # colour | pair-mono | pair-opposite | branch
    sets: list[int]
    before: int
    after: int
    moved: int = 0
    steps: list[BranchStep] = field(default_factory=list)
    start_degree_ok: bool = True

    @property
    def shrink(self) -> Fraction:
        return Fraction(self.before, self.after)

    def to_dict(self) -> dict:
        s = self.shrink
        return {"stage": self.stage, "op": self.op, "sets": [elements_of(m) for m in self.sets],
                "before": self.before, "after": self.after, "moved": self.moved,
                "shrink": f"{s.numerator}/{s.denominator}",
                "start_degree_ok": self.start_degree_ok,
                "steps": [st.to_dict() for st in self.steps]}


class PartitionState:
    """Mutable engine state; build it with :func:`initialize`."""

    def __init__(self, fam: SetFamily, params: EngineParams, colourings: np.ndarray, paranoid: bool = False):
        self.fam = fam
        self.params = params
        self.k = params.k
        self.paranoid = paranoid
        self.up = fam.up_masks
        self.down = fam.down_masks
        self.pos = linear_extension(fam).position()
        self.L = 2 * self.k - 2
        size = 2 * self.k - 1
        self.A = [0] * size
        self.U = [0] * size
        self.D = [0] * size
        self.P = [0] * size
        self.R = 0
        self.R_parts: list[int] | None = None
        self.where: dict[int, tuple[str, int]] = {}
        for idx, part in enumerate(mirsky_index(fam)):
            self.A[part] |= 1 << idx
            self.where[idx] = ("A", part)
        self.colourings = colourings
        self.initial_count = int(colourings.size)
        self.fixed: dict[int, int] = {}
        self.entry: dict[int, int] = {}
        self.npr: dict[int, int] = {}
        self._clock = 0
        self.ledger: list[LedgerEntry] = []
        self.trace: list[str] = []
        self.stage = "init"
        self.ops = 0
        self.restarts = 0
        self.r_moved: dict[str, int] = {}
        self.max_ops = 20 * (len(fam) + 1) ** 2

    # -- small queries ------------------------------------------------------
    @property
    def omega(self) -> int:
        return self.params.omega

    def ordered(self, mask: int) -> list[int]:
        return sorted(_bits(mask), key=self.pos.__getitem__)

    def part(self, kind: str, i: int) -> int:
        table = {"A": self.A, "U": self.U, "D": self.D, "P": self.P}[kind]
        return table[i] if 0 <= i < len(table) else 0

    def all_of(self, kind: str) -> int:
        if kind == "R":
            return self.R
        out = 0
        for m in {"A": self.A, "U": self.U, "D": self.D, "P": self.P}[kind]:
            out |= m
        return out

    def d_up(self, f: int, mask: int) -> int:
        return (self.up[f] & mask).bit_count()

    def d_down(self, f: int, mask: int) -> int:
        return (self.down[f] & mask).bit_count()

    def d(self, f: int, mask: int) -> int:
        return ((self.up[f] | self.down[f]) & mask).bit_count()

    def _a(self, i: int) -> int:
        return self.A[i] if 1 <= i <= self.L else 0

    # -- mutation -----------------------------------------------------------
    def _tick(self) -> None:
        self.ops += 1
        if self.ops > self.max_ops:
            raise EngineFault(f"operation cap {self.max_ops} exceeded in stage {self.stage}", dump=self.to_dict())

    def _remove(self, f: int) -> None:
        kind, i = self.where.pop(f)
        bit = ~(1 << f)
        if kind == "R":
            self.R &= bit
        else:
            {"A": self.A, "U": self.U, "D": self.D, "P": self.P}[kind][i] &= bit
        self.entry.pop(f, None)
        self.npr.pop(f, None)

    def _place(self, f: int, kind: str, i: int = 0, npr: int | None = None) -> None:
        self._remove(f)
        if kind == "R":
            self.R |= 1 << f
            self.r_moved[self.stage] = self.r_moved.get(self.stage, 0) + 1
        else:
            {"A": self.A, "U": self.U, "D": self.D, "P": self.P}[kind][i] |= 1 << f
        self.where[f] = (kind, i)
        if kind in "UDP":
            self._clock += 1
            self.entry[f] = self._clock
            self.npr[f] = npr or 0

    def _restrict(self, keep: np.ndarray) -> None:
        self.colourings = self.colourings[keep]
        if self.colourings.size == 0:
            raise EngineFault("retained colouring list became empty", dump=self.to_dict())

    def _colour_bits(self, f: int) -> np.ndarray:
        return (self.colourings >> f) & 1

    def _fix(self, f: int, colour: int) -> None:
        if f in self.fixed:
            raise EngineFault(f"set {elements_of(self.fam.members[f])} coloured twice")
        self.fixed[f] = colour
        self._restrict(self._colour_bits(f) == colour)

    def _log(self, text: str) -> None:
        sizes = lambda t: ",".join(str(m.bit_count()) for m in t[1:self.k])
        self.trace.append(f"stage={self.stage} {text} |C|={self.colourings.size} "
                          f"A=[{sizes(self.A)}] U=[{sizes(self.U)}] D=[{sizes(self.D)}] "
                          f"P=[{sizes(self.P)}] R={self.R.bit_count()}")

    # -- building blocks ----------------------------------------------------
    def colour_most_frequent(self, f: int) -> int:
        """Fix ``f`` to its more frequent colour (ties go to 0), move it to R, and log the shrink."""
        self._tick()
        before = int(self.colourings.size)
        ones = int(self._colour_bits(f).sum())
        colour = 1 if ones > before - ones else 0
        self._fix(f, colour)
        self._place(f, "R")
        self.ledger.append(LedgerEntry(self.stage, "colour", [self.fam.members[f]], before, int(self.colourings.size), 1))
        self._log(f"op=colour set={elements_of(self.fam.members[f])} colour={colour}")
        return colour

    def _chain(self, x: int, colour: int, part: int, direction: str, entry: LedgerEntry) -> bool:
        """Branch from ``x`` through successive parts; True iff it ends on a nonempty all-opposite neighbourhood."""
        step = -1 if direction == "up" else 1
        while True:
            before = int(self.colourings.size)
            if not 1 <= part <= self.L:
                entry.steps.append(BranchStep(direction, part, 0, None, before, before))
                return False
            rel = self.up[x] if direction == "up" else self.down[x]
            nbrs = self.ordered(rel & self.A[part])
            if not nbrs:
                entry.steps.append(BranchStep(direction, part, 0, 0, before, before))
                return False
            remaining = np.ones(before, dtype=bool)
            firsts = []
            for y in nbrs:
                same = remaining & (self._colour_bits(y) == colour)
                firsts.append(same)
                remaining &= ~same
            counts = [int(remaining.sum())] + [int(s.sum()) for s in firsts]
            choice = max(range(len(counts)), key=lambda j: (counts[j], -j))
            if choice == 0:
                for y in nbrs:
                    self.fixed[y] = 1 - colour
                    self._place(y, "R")
                self._restrict(remaining)
            else:
                self._restrict(firsts[choice - 1])
                for y in nbrs[:choice - 1]:
                    self.fixed[y] = 1 - colour
                    self._place(y, "R")
                self.fixed[nbrs[choice - 1]] = colour
                self._place(nbrs[choice - 1], "R")
            moved = len(nbrs) if choice == 0 else choice
            entry.moved += moved
            entry.steps.append(BranchStep(direction, part, len(nbrs), choice, before, int(self.colourings.size)))
            if choice == 0:
                return True
            x = nbrs[choice - 1]
            part += step

    def branch(self, up_from: tuple[int, int] | None, down_from: tuple[int, int] | None, colour: int) -> LedgerEntry:
        """One branching operation: up from ``up_from = (set, part)``, then down unless the up phase
        ended on a nonempty all-opposite neighbourhood."""
        self._tick()
        sets = sorted({start[0] for start in (up_from, down_from) if start is not None}, key=self.pos.__getitem__)
        entry = LedgerEntry(self.stage, "branch", [self.fam.members[x] for x in sets], int(self.colourings.size), 0)
        first = up_from or down_from
        first_dir = "up" if up_from else "down"
        rel = self.up[first[0]] if first_dir == "up" else self.down[first[0]]
        entry.start_degree_ok = (rel & self._a(first[1])).bit_count() > self.omega
        closed = False
        if up_from is not None:
            closed = self._chain(up_from[0], colour, up_from[1], "up", entry)
        if down_from is not None and not closed:
            self._chain(down_from[0], colour, down_from[1], "down", entry)
        entry.after = int(self.colourings.size)
        self.ledger.append(entry)
        cases = ",".join("-" if s.case is None else str(s.case) for s in entry.steps)
        self._log(f"op=branch from={[elements_of(m) for m in entry.sets]} moved={entry.moved} cases=[{cases}] "
                  f"shrink={entry.shrink}")
        return entry

    def shift_up(self, top: int) -> int:
        """Repeat passes i = 2..top, moving sets with at most omega supersets in the part above."""
        total = 0
        while True:
            moved = 0
            for i in range(2, top + 1):
                for f in reversed(self.ordered(self.A[i])):
                    if self.d_up(f, self.A[i - 1]) <= self.omega:
                        self._place(f, "A", i - 1)
                        moved += 1
                        if self.paranoid:
                            bad = check_q1(self)
                            if bad is not None:
                                raise EngineFault(f"shift-up broke part monotonicity at {bad}", dump=self.to_dict())
            total += moved
            if not moved:
                break
        if total:
            self._log(f"op=shift-up moved={total}")
        return total

    def move_to_u_or_d(self) -> int:
        """Move sets lacking enough supersets above (to U) or subsets below (to D), until stable."""
        k1 = self.k - 1
        total = 0
        while True:
            moved = 0
            for f in self.ordered(self.all_of("A")):
                i = self.where[f][1]
                if i >= 2 and self.d_up(f, self.A[i - 1]) <= self.omega:
                    self._place(f, "U", i, npr=self.nbhd(f, self.A[i] | self.A[i - 1]))
                    moved += 1
                elif i <= k1 - 1 and self.d_down(f, self.A[i + 1]) <= self.omega:
                    self._place(f, "D", i, npr=self.nbhd(f, self.A[i] | self.A[i + 1]))
                    moved += 1
            total += moved
            if not moved:
                break
        if total:
            self._log(f"op=move-to-UD moved={total}")
        return total

    def nbhd(self, f: int, mask: int) -> int:
        return (self.up[f] | self.down[f]) & mask

    # -- serialisation ------------------------------------------------------
    def _sets(self, mask: int) -> list[list[int]]:
        return [elements_of(self.fam.members[j]) for j in self.ordered(mask)]

    def to_dict(self) -> dict:
        k1 = self.k - 1
        parts = {}
        for kind in "AUDP":
            parts[kind] = {str(i): self._sets(self.part(kind, i)) for i in range(1, self.L + 1)}
        parts["R"] = ({str(i): self._sets(m) for i, m in enumerate(self.R_parts) if i >= 1}
                      if self.R_parts is not None else {"all": self._sets(self.R)})
        return {
            "n": self.fam.n, "family_size": len(self.fam), "params": self.params.to_dict(),
            "stage": self.stage, "parts_in_use": self.L if self.stage in ("init", "I") else k1,
            "parts": parts, "retained": int(self.colourings.size), "initial": self.initial_count,
            "fixed": [[elements_of(self.fam.members[f]), c] for f, c in sorted(self.fixed.items(), key=lambda t: self.pos[t[0]])],
            "stage_two_restarts": self.restarts,
            "ledger": [e.to_dict() for e in self.ledger],
        }


# -- stages ------------------------------------------------------------------------

def initialize(fam: SetFamily, params: EngineParams, paranoid: bool = False) -> PartitionState:
    """Peel maximal elements into 2k-2 parts and list every (2,k)-colouring."""
    k = params.k
    h = height(fam)
    if h > 2 * k - 2:
        chain = longest_chain(fam)[: 2 * k - 1]
        raise PreconditionError(
            f"family contains a {2 * k - 1}-chain, so every 2-colouring has a monochromatic {k}-chain",
            witness=[elements_of(m) for m in chain])
    if len(fam) > MAX_ENGINE_MEMBERS:
        raise UsageError(f"the engine lists colourings explicitly; at most {MAX_ENGINE_MEMBERS} sets, got {len(fam)}")
    cols = valid_colourings(fam, k)
    if cols.size == 0:
        raise PreconditionError("family has no (2,k)-colouring")
    state = PartitionState(fam, params, cols, paranoid)
    state._log("op=init")
    return state


def _require(state: PartitionState, previous: str) -> None:
    if state.stage != previous:
        raise UsageError(f"stage order violated: expected state after stage {previous}, found {state.stage}")


def run_stage_I(state: PartitionState) -> PartitionState:
    """Compress 2k-2 parts into k-1: shift up, and colour-and-branch from the lowest overfull part."""
    _require(state, "init")
    state.stage = "I"
    k = state.k
    while True:
        state.shift_up(state.L)
        ell = max((i for i in range(1, state.L + 1) if state.A[i]), default=0)
        if ell < k:
            break
        f1 = state.ordered(state.A[ell])[0]
        colour = state.colour_most_frequent(f1)
        state.branch((f1, ell - 1), None, colour)
    state.L = k - 1
    return state


def run_stage_II(state: PartitionState) -> PartitionState:
    """Give every A-set many subsets in the part below, colouring and restarting when a set has too many in its own part."""
    _require(state, "I")
    state.stage = "II"
    k1 = state.k - 1
    cap = len(state.fam) * (len(state.fam) + 1)
    while True:
        restart = False
        for i in range(k1, 0, -1):
            for f in state.ordered(state.A[i]):
                if state.where[f] != ("A", i):
                    continue
                if state.d_down(f, state.A[i]) > state.omega:
                    r_before = state.R.bit_count()
                    colour = state.colour_most_frequent(f)
                    state.branch((f, i - 1), (f, i), colour)
                    for j in range(1, k1 + 1):
                        for g in state.ordered(state.D[j]):
                            state._place(g, "A", j)
                    state.shift_up(k1)
                    if state.R.bit_count() <= r_before:
                        raise EngineFault("reserved part did not grow across a restart", dump=state.to_dict())
                    state.restarts += 1
                    if state.restarts > cap:
                        raise EngineFault(f"more than {cap} restarts", dump=state.to_dict())
                    state._log("op=restart")
                    restart = True
                    break
                if i <= k1 - 1 and state.d_down(f, state.A[i + 1]) <= state.omega:
                    state._place(f, "D", i, npr=state.nbhd(f, state.A[i] | state.A[i + 1]))
            if restart:
                break
        if not restart:
            break
    state.move_to_u_or_d()
    return state


def _first_pair(state: PartitionState) -> tuple[int, int, int] | None:
    for i in range(1, state.k):
        for a in state.ordered(state.A[i]):
            sup = state.up[a] & state.A[i]
            if sup:
                return i, a, min(_bits(sup), key=state.pos.__getitem__)
    return None


def run_stage_III(state: PartitionState) -> PartitionState:
    """Remove comparable pairs inside the A parts: often-monochromatic pairs go to R, the rest to P."""
    _require(state, "II")
    state.stage = "III"
    while True:
        found = _first_pair(state)
        if found is None:
            break
        i, a, b = found
        state._tick()
        before = int(state.colourings.size)
        ca, cb = state._colour_bits(a), state._colour_bits(b)
        both0 = int(((ca == 0) & (cb == 0)).sum())
        both1 = int(((ca == 1) & (cb == 1)).sum())
        if 3 * (both0 + both1) >= before:
            colour = 1 if both1 > both0 else 0
            state._fix(a, colour)
            state._fix(b, colour)
            state._place(a, "R")
            state._place(b, "R")
            state.ledger.append(LedgerEntry("III", "pair-mono", [state.fam.members[a], state.fam.members[b]],
                                            before, int(state.colourings.size), 2))
            state._log(f"op=pair-mono pair={elements_of(state.fam.members[a])}<{elements_of(state.fam.members[b])}")
            state.branch((b, i - 1), (a, i + 1), colour)
        else:
            a1b0 = int(((ca == 1) & (cb == 0)).sum())
            a0b1 = int(((ca == 0) & (cb == 1)).sum())
            colour_a = 1 if a1b0 > a0b1 else 0
            state._fix(a, colour_a)
            state._fix(b, 1 - colour_a)
            for x in (a, b):
                state._place(x, "P", i, npr=state.nbhd(x, state.A[i]))
            state.ledger.append(LedgerEntry("III", "pair-opposite", [state.fam.members[a], state.fam.members[b]],
                                            before, int(state.colourings.size), 0))
            state._log(f"op=pair-opposite pair={elements_of(state.fam.members[a])}<{elements_of(state.fam.members[b])}")
        state.move_to_u_or_d()
    return state


def r_index(state: PartitionState, f: int) -> int | None:
    """Least part number whose A-part meets f in at most 2*omega sets."""
    for i in range(1, state.k):
        if state.d(f, state.A[i]) <= 2 * state.omega:
            return i
    return None


def run_stage_IV(state: PartitionState) -> PartitionState:
    """Branch from R-sets with many neighbours in every part, then split R by first sparse part."""
    _require(state, "III")
    state.stage = "IV"
    k1 = state.k - 1
    om = state.omega
    while True:
        target = next((f for f in state.ordered(state.R) if r_index(state, f) is None), None)
        if target is None:
            break
        colour = state.fixed[target]
        if state.d_down(target, state.A[1]) > om:
            state.branch(None, (target, 1), colour)
        elif state.d_up(target, state.A[k1]) > om:
            state.branch((target, k1), None, colour)
        else:
            i0 = max((i for i in range(1, k1 + 1) if state.d_up(target, state.A[i]) > om), default=None)
            if i0 is None or i0 >= k1:
                raise EngineFault("no part to branch through from a dense reserved set", dump=state.to_dict())
            state.branch((target, i0), (target, i0 + 1), colour)
        state.move_to_u_or_d()
    parts = [0] * (k1 + 1)
    for f in _bits(state.R):
        parts[r_index(state, f)] |= 1 << f
    state.R_parts = parts
    return state


def run_all(state: PartitionState) -> PartitionState:
    for step in (run_stage_I, run_stage_II, run_stage_III, run_stage_IV):
        step(state)
    return state


def branch_from(state: PartitionState, element: int, direction: str, start_level: int) -> LedgerEntry:
    """Branch from a coloured member (given by its mask).

    ``up`` starts in part ``start_level``; ``down`` likewise; ``up-and-down``
    goes up into ``start_level`` and down into ``start_level + 1``.
    """
    f = state.fam.index(element) if element in state.fam else None
    if f is None:
        raise UsageError(f"{elements_of(element)} is not a member of the family")
    if f not in state.fixed:
        raise UsageError(f"{elements_of(element)} has no fixed colour; branching needs a coloured set")
    colour = state.fixed[f]
    if direction == "up":
        return state.branch((f, start_level), None, colour)
    if direction == "down":
        return state.branch(None, (f, start_level), colour)
    if direction == "up-and-down":
        return state.branch((f, start_level), (f, start_level + 1), colour)
    raise UsageError(f"direction must be up, down or up-and-down, got {direction!r}")


def fix_colour(state: PartitionState, element: int, colour: int) -> None:
    """Colour a member by hand and move it to R (for experiments and tests)."""
    f = state.fam.index(element)
    state._fix(f, colour)
    state._place(f, "R")


# -- verification ------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    witness: object = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "witness": self.witness}


@dataclass
class Report:
    checks: dict[str, Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {name: c.to_dict() for name, c in self.checks.items()}


QualityReport = Report
PropertyReport = Report


def _pair(state: PartitionState, a: int, b: int) -> list[list[int]]:
    return [elements_of(state.fam.members[a]), elements_of(state.fam.members[b])]


def _first_violation(state, members, predicate, describe):
    for f in members:
        bad = predicate(f)
        if bad is not None:
            return describe(f, bad)
    return None


def check_q1(state: PartitionState):
    """Witness pair (F in A_i, G in A_j, i < j, F ⊊ G), or None."""
    for i in range(1, state.L + 1):
        later = 0
        for j in range(i + 1, state.L + 1):
            later |= state.A[j]
        for f in state.ordered(state.A[i]):
            sup = state.up[f] & later
            if sup:
                return _pair(state, f, _bits(sup)[0])
    return None


def verify(state: PartitionState, true_count: int | None = None) -> tuple[Report, Report]:
    """Check qualities Q1-Q9 and properties P1-P5 from their definitions."""
    k1 = state.k - 1
    om = state.omega
    A = lambda i: state._a(i) if 1 <= i <= k1 else 0
    name = lambda f: elements_of(state.fam.members[f])
    q: dict[str, Check] = {}

    w = check_q1(state)
    q["Q1"] = Check("Q1", w is None, w and {"set_in_earlier_part": w[0], "its_superset_in_later_part": w[1]})

    def degree_check(label, parts, fn, bound_ok):
        for i in parts:
            for f in state.ordered(A(i)):
                val = fn(f, i)
                if not bound_ok(val):
                    return Check(label, False, {"set": name(f), "part": i, "degree": val})
        return Check(label, True)

    q["Q2"] = degree_check("Q2", range(1, k1 + 1), lambda f, i: state.d_up(f, A(i)), lambda v: v <= om)
    q["Q3"] = degree_check("Q3", range(2, k1 + 1), lambda f, i: state.d_up(f, A(i - 1)), lambda v: v > om)
    q["Q4"] = degree_check("Q4", range(1, k1 + 1), lambda f, i: state.d_down(f, A(i)), lambda v: v <= om)
    q["Q5"] = degree_check("Q5", range(1, k1), lambda f, i: state.d_down(f, A(i + 1)), lambda v: v > om)

    q6 = None
    if state.U[1] or (k1 >= 1 and state.D[k1]):
        q6 = {"nonempty": "U_1" if state.U[1] else f"D_{k1}"}
    for i in range(1, k1 + 1):
        for f in state.ordered(state.U[i]):
            worst = max(state.d(f, A(i)), state.d(f, A(i - 1)))
            if q6 is None and worst > 2 * om:
                q6 = {"set": name(f), "part": f"U_{i}", "degree": worst}
        for f in state.ordered(state.D[i]):
            worst = max(state.d(f, A(i)), state.d(f, A(i + 1)))
            if q6 is None and worst > 2 * om:
                q6 = {"set": name(f), "part": f"D_{i}", "degree": worst}
    q["Q6"] = Check("Q6", q6 is None, q6)

    q7 = None
    for i in range(1, k1 + 1):
        for f in state.ordered(A(i)):
            sup = state.up[f] & A(i)
            if sup and q7 is None:
                q7 = {"part": i, "pair": _pair(state, f, _bits(sup)[0])}
    q["Q7"] = Check("Q7", q7 is None, q7)

    q8 = None
    for i in range(1, k1 + 1):
        for f in state.ordered(state.P[i]):
            if state.d(f, A(i)) > 2 * om and q8 is None:
                q8 = {"set": name(f), "part": i, "degree": state.d(f, A(i))}
    q["Q8"] = Check("Q8", q8 is None, q8)

    q9 = None
    for f in state.ordered(state.R):
        i = r_index(state, f)
        if i is None:
            q9 = {"set": name(f), "reason": "dense in every part"}
            break
        if state.R_parts is not None and not state.R_parts[i] >> f & 1:
            q9 = {"set": name(f), "reason": f"stored in the wrong R part, expected {i}"}
            break
    q["Q9"] = Check("Q9", q9 is None, q9)

    q["Npr"] = _check_npr(state)

    p: dict[str, Check] = {}
    p["P1"] = _check_p1(state, true_count)
    p["P2"] = Check("P2", q7 is None, q7)
    p3 = None
    if state.U[1] or state.D[k1]:
        p3 = {"nonempty": "U_1" if state.U[1] else f"D_{k1}"}
    for i in range(1, k1 + 1):
        r_i = state.R_parts[i] if state.R_parts is not None else 0
        near = state.U[i] | state.part("U", i + 1) | state.D[i] | state.part("D", i - 1) | state.P[i] | r_i
        for f in state.ordered(near):
            if state.d(f, A(i)) > 2 * om and p3 is None:
                p3 = {"set": name(f), "part": i, "degree": state.d(f, A(i))}
    p["P3"] = Check("P3", p3 is None, p3)
    p4 = None
    for i in range(1, k1 + 1):
        for label, b in _b_choices(state, i):
            pairs = _pairs_inside(state, A(i) | b)
            if pairs > 3 * om * b.bit_count() and p4 is None:
                p4 = {"part": i, "B": label, "pairs": pairs, "bound": 3 * om * b.bit_count()}
    p["P4"] = Check("P4", p4 is None, p4)
    h = height(state.fam)
    p["P5"] = Check("P5", h <= 2 * state.k - 2, None if h <= 2 * state.k - 2 else {"height": h})
    return Report(q), Report(p)


def _b_choices(state: PartitionState, i: int) -> list[tuple[str, int]]:
    u = lambda j: state.part("U", j) if 1 <= j <= state.k - 1 else 0
    dd = lambda j: state.part("D", j) if 1 <= j <= state.k - 1 else 0
    return [("U_i+D_i+P_i", u(i) | dd(i) | state.P[i]), ("U_i+D_i-1", u(i) | dd(i - 1)), ("D_i+U_i+1", dd(i) | u(i + 1))]


def _pairs_inside(state: PartitionState, mask: int) -> int:
    return sum((state.up[f] & mask).bit_count() for f in _bits(mask))


def _check_npr(state: PartitionState) -> Check:
    om = state.omega
    for f, nb in state.npr.items():
        if nb.bit_count() > 3 * om:
            return Check("Npr", False, {"set": elements_of(state.fam.members[f]), "size": nb.bit_count()})
    for i in range(1, state.k):
        for label, b in _b_choices(state, i):
            for f in _bits(b):
                later = sum(1 << g for g in _bits(b) if state.entry[g] > state.entry[f])
                left = (state.up[f] | state.down[f]) & (state.A[i] | later)
                if left & ~state.npr[f]:
                    return Check("Npr", False, {"set": elements_of(state.fam.members[f]), "B": label, "part": i,
                                                "outside": [elements_of(state.fam.members[g]) for g in _bits(left & ~state.npr[f])]})
    return Check("Npr", True)


def _le_scaled_pow2(x: Fraction, exponent: Fraction) -> bool:
    """Exactly decide x <= 2**exponent for rational x and exponent."""
    if x <= 0:
        return True
    p, q = exponent.numerator, exponent.denominator
    a, b = x.numerator, x.denominator
    if p >= 0:
        return a**q <= b**q * 2**p
    return a**q * 2**(-p) <= b**q


def p1_bound_holds(count: int, free: int, eps_r: Fraction, pairs: int) -> bool:
    """count <= 2^(free + eps_r) * 3^pairs, decided exactly."""
    return _le_scaled_pow2(Fraction(count, 3**pairs), free + eps_r)


def _check_p1(state: PartitionState, true_count: int | None) -> Check:
    if true_count is None:
        true_count = count_colourings(state.fam, 2, state.k)
    free = sum(state.all_of(kind).bit_count() for kind in "AUD")
    r = state.R.bit_count()
    p_size = state.all_of("P").bit_count()
    if p_size % 2:
        return Check("P1", False, {"reason": "P has odd size", "size": p_size})
    ok = p1_bound_holds(true_count, free, state.params.epsilon * r, p_size // 2)
    eps = state.params.epsilon
    witness = {"count": str(true_count), "free_sets": free, "reserved": r, "paired": p_size,
               "epsilon": f"{eps.numerator}/{eps.denominator}",
               "log2_count": math.log2(true_count) if true_count else None,
               "log2_bound": free + float(eps) * r + p_size / 2 * math.log2(3)}
    return Check("P1", ok, witness)


# -- ledger certification ------------------------------------------------------------

_LN2_UPPER = Fraction(7, 10)


def _step_fraction_ok(after: int, before: int, j: int, eps: Fraction) -> bool:
    """after/before >= (1 - 2^-eps) * 2^(-eps j)."""
    ratio = Fraction(after, before)
    # 1 - 2^-eps <= eps ln 2 < 0.7 eps, and 2^(-eps j) <= 1
    if ratio >= _LN2_UPPER * eps:
        return True
    with localcontext() as ctx:
        ctx.prec = 60
        ln2 = Decimal(2).ln()
        e = Decimal(eps.numerator) / Decimal(eps.denominator)
        rhs = (1 - (-e * ln2).exp()) * (-e * j * ln2).exp()
        return Decimal(ratio.numerator) / Decimal(ratio.denominator) >= rhs


@dataclass
class LedgerReport:
    literal_branch_bound: Check   # each branching op: shrink <= (1/6) 2^(eps t)
    literal_branch_bound_large_t: Check  # the same, only for ops with t >= omega
    step_fractions: Check         # each branching step keeps its certified fraction
    colour_steps: Check           # colour <= 2, monochromatic pair <= 6, opposite pair <= 3
    stage_bounds: Check           # per-stage totals against 2^(eps t) (times 3^(|P|/2) in stage III)
    conservation: Check | None = None

    def checks(self) -> dict[str, Check]:
        out = {"literal_branch_bound": self.literal_branch_bound,
               "literal_branch_bound_large_t": self.literal_branch_bound_large_t,
               "step_fractions": self.step_fractions, "colour_steps": self.colour_steps,
               "stage_bounds": self.stage_bounds}
        if self.conservation is not None:
            out["conservation"] = self.conservation
        return out

    def to_dict(self) -> dict:
        return {name: c.to_dict() for name, c in self.checks().items()}


def ledger_checks(state: PartitionState, conservation: bool = False) -> LedgerReport:
    eps = state.params.epsilon
    om = state.omega
    lit = lit_large = steps = colour = None
    limits = {"colour": 2, "pair-mono": 6, "pair-opposite": 3}
    for n_op, e in enumerate(state.ledger):
        if e.op == "branch":
            ok = _le_scaled_pow2(6 * e.shrink, eps * e.moved)
            if not ok and lit is None:
                lit = {"op": n_op, "stage": e.stage, "moved": e.moved, "shrink": str(e.shrink)}
            if not ok and e.moved >= om and lit_large is None:
                lit_large = {"op": n_op, "stage": e.stage, "moved": e.moved, "shrink": str(e.shrink)}
            for s in e.steps:
                if s.case is not None and s.neighbourhood and steps is None:
                    if not _step_fraction_ok(s.after, s.before, s.case, eps):
                        steps = {"op": n_op, "step": s.to_dict()}
        elif e.shrink > limits[e.op] and colour is None:
            colour = {"op": n_op, "kind": e.op, "shrink": str(e.shrink)}
    stage = None
    for st in ("I", "II", "III", "IV"):
        entries = [e for e in state.ledger if e.stage == st]
        total = Fraction(1)
        for e in entries:
            total *= e.shrink
        t = state.r_moved.get(st, 0)
        pairs = sum(1 for e in entries if e.op == "pair-opposite")
        if not _le_scaled_pow2(total / 3**pairs, eps * t) and stage is None:
            stage = {"stage": st, "moved_to_R": t, "shrink": str(total), "opposite_pairs": pairs}
    cons = None
    if conservation:
        ok = conservation_holds(state)
        cons = Check("conservation", ok, None if ok else {"retained": int(state.colourings.size)})
    return LedgerReport(
        Check("literal_branch_bound", lit is None, lit),
        Check("literal_branch_bound_large_t", lit_large is None, lit_large),
        Check("step_fractions", steps is None, steps),
        Check("colour_steps", colour is None, colour),
        Check("stage_bounds", stage is None, stage),
        cons,
    )


def conservation_holds(state: PartitionState) -> bool:
    """Retained list == all valid colourings that agree with every fixed colour."""
    everything = valid_colourings(state.fam, state.k)
    keep = np.ones(everything.size, dtype=bool)
    for f, c in state.fixed.items():
        keep &= ((everything >> f) & 1) == c
    return np.array_equal(np.sort(everything[keep]), np.sort(state.colourings))


@dataclass
class PartitionResult:
    state: PartitionState
    qualities: Report
    properties: Report
    ledger: LedgerReport

    def to_dict(self) -> dict:
        out = self.state.to_dict()
        out["qualities"] = self.qualities.to_dict()
        out["properties"] = self.properties.to_dict()
        out["ledger_checks"] = self.ledger.to_dict()
        return out


def partition(fam: SetFamily, k: int, epsilon=None, omega: int | None = None,
              paranoid: bool = False, true_count: int | None = None) -> PartitionResult:
    """Run all four stages and verify the outcome."""
    params = EngineParams.make(k, epsilon, omega)
    state = run_all(initialize(fam, params, paranoid))
    qual, prop = verify(state, true_count)
    return PartitionResult(state, qual, prop, ledger_checks(state, conservation=paranoid))
