"""Unified single-step reduction semantics over (stack, dialog, input) states.

The machine state is a triple: a stack of dialog constructors (one-hole
contexts, top first), the current expression, and the pending input, a
sequence of answer sets.  Entering a sub-dialog pushes the context that
re-embeds it; completing one pops and applies.  Arrows compose the top
two contexts so that the eventual pop re-inserts the finished fragment
several levels up, handing control to an enclosing W.  Constructor
outputs are simplified to canonical form, which is what makes the
relation terminating (an extracted ``~`` cannot be re-extracted).

A state where the current expression carries arrows reduces only by
[ARROW]; with fewer than two contexts on the stack it is stuck and dies.
Non-determinism (W and SPE' child choice, union sides) makes reduction
set-valued; staging explores the whole frontier.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .expr import (
    EMPTY,
    Atom,
    DialogExpr,
    Empty,
    Mnemonic,
    Node,
    Union,
    arrow_count,
    solicitation_set,
    with_arrows,
)
from .simplify import canon
from .syntax import Episode, Utterance, print_expr


class Terminal:
    """The bottom constructor: maps every dialog to ``~``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Terminal()"


TERMINAL = Terminal()


@dataclass(frozen=True)
class Hole:
    """Re-embeds a dialog between fixed left/right siblings under a mnemonic."""

    mnemonic: Mnemonic
    left: tuple[DialogExpr, ...]
    right: tuple[DialogExpr, ...]


@dataclass(frozen=True)
class Composed:
    """Function composition: apply inner, then outer."""

    outer: "Context"
    inner: "Context"


Context = Terminal | Hole | Composed


def apply_context(ctx: Context, d: DialogExpr) -> DialogExpr:
    if ctx is TERMINAL or isinstance(ctx, Terminal):
        return EMPTY
    if isinstance(ctx, Hole):
        return canon(Node(ctx.mnemonic, 0, ctx.left + (d,) + ctx.right))
    return apply_context(ctx.outer, apply_context(ctx.inner, d))


def print_context(ctx: Context) -> str:
    """Render a constructor with ``@`` marking the hole; compositions with ``.``."""
    if isinstance(ctx, Terminal):
        return "~"
    if isinstance(ctx, Hole):
        parts = [print_expr(c) for c in ctx.left] + ["@"] + [print_expr(c) for c in ctx.right]
        return f"{ctx.mnemonic.value}[{', '.join(parts)}]"
    return f"{print_context(ctx.outer)} . {print_context(ctx.inner)}"


AnswerSet = frozenset[str]


@dataclass(frozen=True)
class ReductionState:
    stack: tuple[Context, ...]  # top first
    current: DialogExpr
    pending: tuple[AnswerSet, ...]


Frontier = frozenset[ReductionState]


def init_state(expr: DialogExpr) -> ReductionState:
    return ReductionState((TERMINAL,), expr, ())


def _atom_names(children: tuple[DialogExpr, ...]) -> list[str] | None:
    names = []
    for c in children:
        if not isinstance(c, Atom) or c.arrows:
            return None
        names.append(c.name)
    return names


def reduce_one(s: ReductionState) -> tuple[ReductionState, ...]:
    """All states reachable by exactly one rule; empty means stuck."""
    out: list[ReductionState] = []
    cur = s.current

    if arrow_count(cur):
        # [ARROW]: collapse the top two constructors into their composition.
        if len(s.stack) >= 2:
            composed = Composed(s.stack[1], s.stack[0])
            out.append(
                ReductionState(
                    (composed,) + s.stack[2:], with_arrows(cur, cur.arrows - 1), s.pending
                )
            )
        return tuple(out)

    if isinstance(cur, Empty):
        if s.stack:
            out.append(
                ReductionState(s.stack[1:], apply_context(s.stack[0], EMPTY), s.pending)
            )
        return tuple(out)

    if isinstance(cur, Atom):
        if s.stack and s.pending and s.pending[0] == frozenset({cur.name}):
            out.append(
                ReductionState(s.stack[1:], apply_context(s.stack[0], EMPTY), s.pending[1:])
            )
        return tuple(out)

    if isinstance(cur, Union):
        out.append(ReductionState(s.stack, cur.left, s.pending))
        out.append(ReductionState(s.stack, cur.right, s.pending))
        return tuple(out)

    m = cur.mnemonic
    kids = cur.children
    if not kids:
        # A node with no sub-expressions is the empty dialog; complete it.
        if s.stack:
            out.append(
                ReductionState(s.stack[1:], apply_context(s.stack[0], EMPTY), s.pending)
            )
        return tuple(out)

    # Extraction rules grow the stack and consume no input.
    if m is Mnemonic.C:
        hole = Hole(Mnemonic.C, (), kids[1:])
        out.append(ReductionState((hole,) + s.stack, kids[0], s.pending))
    elif m in (Mnemonic.W, Mnemonic.SPE_PRIME):
        for i, child in enumerate(kids):
            hole = Hole(m, kids[:i], kids[i + 1 :])
            out.append(ReductionState((hole,) + s.stack, child, s.pending))

    # Consumption rules match only arrow-free solicitation children.
    if not s.pending:
        return tuple(out)
    names = _atom_names(kids)
    if names is None:
        return tuple(out)
    nameset = frozenset(names)
    u = s.pending[0]
    rest = s.pending[1:]

    def now(e: DialogExpr) -> ReductionState:
        return ReductionState(s.stack, canon(e), rest)

    def remainder(mn: Mnemonic, keep: list[str]) -> DialogExpr:
        return Node(mn, 0, tuple(Atom(n) for n in keep))

    single = next(iter(u)) if len(u) == 1 else None
    if m is Mnemonic.I:
        if u == nameset and s.stack:
            out.append(
                ReductionState(s.stack[1:], apply_context(s.stack[0], EMPTY), rest)
            )
    elif m is Mnemonic.SPE:
        if single in nameset:
            out.append(now(remainder(Mnemonic.I, [n for n in names if n != single])))
    elif m is Mnemonic.SPE_STAR:
        if single in nameset:
            out.append(now(remainder(Mnemonic.SPE_STAR, [n for n in names if n != single])))
        if u == nameset:
            out.append(now(EMPTY))
    elif m is Mnemonic.PFA1:
        if single == names[0]:
            out.append(now(remainder(Mnemonic.I, names[1:])))
    elif m is Mnemonic.PFA1_STAR:
        if single == names[0]:
            out.append(now(remainder(Mnemonic.PFA1_STAR, names[1:])))
        if u == nameset:
            out.append(now(EMPTY))
    elif m is Mnemonic.PFAN:
        if u == frozenset(names[: len(u)]):
            out.append(now(remainder(Mnemonic.I, names[len(u) :])))
    elif m is Mnemonic.PFAN_STAR:
        if u == frozenset(names[: len(u)]):
            out.append(now(remainder(Mnemonic.PFAN_STAR, names[len(u) :])))
    elif m is Mnemonic.PE:
        if u < nameset:
            out.append(now(remainder(Mnemonic.I, [n for n in names if n not in u])))
    elif m is Mnemonic.PE_STAR:
        if u <= nameset:
            out.append(now(remainder(Mnemonic.PE_STAR, [n for n in names if n not in u])))
    return tuple(out)


def stage_response(frontier: Frontier, answers: AnswerSet) -> Frontier:
    """Feed one utterance to every state; keep states that consumed it.

    Exploration follows reduce_one breadth-first with memoization; a state
    is harvested exactly when its pending input empties.  An empty result
    is a rejection.
    """
    result: set[ReductionState] = set()
    seen: set[ReductionState] = set()
    queue: deque[ReductionState] = deque(
        ReductionState(st.stack, st.current, st.pending + (answers,)) for st in frontier
    )
    while queue:
        st = queue.popleft()
        if st in seen:
            continue
        seen.add(st)
        if not st.pending:
            result.add(st)
            continue
        queue.extend(reduce_one(st))
    return frozenset(result)


def _completes(state: ReductionState) -> bool:
    seen: set[ReductionState] = set()
    queue: deque[ReductionState] = deque([state])
    while queue:
        st = queue.popleft()
        if st in seen:
            continue
        seen.add(st)
        if not st.stack and isinstance(st.current, Empty) and not st.pending:
            return True
        queue.extend(reduce_one(st))
    return False


def is_complete(frontier: Frontier, strict: bool = False) -> bool:
    """Can the dialog finish right now?

    Default: some state reaches (empty stack, ~, no input) by input-free
    reductions.  ``strict`` demands that every surviving state does.
    """
    if not frontier:
        return False
    if strict:
        return all(_completes(s) for s in frontier)
    return any(_completes(s) for s in frontier)


def membership(expr: DialogExpr, ep: Episode, strict: bool = False) -> bool:
    """Is the episode a member of the dialog's extension?"""
    frontier: Frontier = frozenset({init_state(expr)})
    for turn in ep.turns:
        frontier = stage_response(frontier, turn.answers)
        if not frontier:
            return False
    return is_complete(frontier, strict=strict)


def is_prefix(expr: DialogExpr, turns: list[Utterance] | tuple[Utterance, ...]) -> bool:
    """Can the dialog consume these turns and continue?"""
    frontier: Frontier = frozenset({init_state(expr)})
    for turn in turns:
        frontier = stage_response(frontier, turn.answers)
        if not frontier:
            return False
    return True


def state_names(state: ReductionState) -> frozenset[str]:
    """Solicitations still present anywhere in a state."""

    def ctx_names(ctx: Context) -> frozenset[str]:
        if isinstance(ctx, Terminal):
            return frozenset()
        if isinstance(ctx, Hole):
            out: frozenset[str] = frozenset()
            for e in ctx.left + ctx.right:
                out |= solicitation_set(e)
            return out
        return ctx_names(ctx.outer) | ctx_names(ctx.inner)

    names = solicitation_set(state.current)
    for ctx in state.stack:
        names |= ctx_names(ctx)
    return names


def candidates(frontier: Frontier, universe: frozenset[str] | None = None) -> set[AnswerSet]:
    """Every utterance the frontier accepts, singletons and groups alike.

    Probes all non-empty subsets of the names still present in the
    frontier (optionally clipped to ``universe``), so the result is exact
    for the grouping mnemonics too.
    """
    remaining: set[str] = set()
    for st in frontier:
        remaining |= state_names(st)
    if universe is not None:
        remaining &= universe
    accepted: set[AnswerSet] = set()
    pool = sorted(remaining)
    for size in range(1, len(pool) + 1):
        for combo in combinations(pool, size):
            u = frozenset(combo)
            if stage_response(frontier, u):
                accepted.add(u)
    return accepted


def trace_path(expr: DialogExpr, ep: Episode) -> list[ReductionState] | None:
    """One shortest successful reduction path for the whole episode.

    The initial state carries the entire input, mirroring the formal
    membership definition; None when the episode is not a member.
    """
    start = ReductionState((TERMINAL,), expr, tuple(t.answers for t in ep.turns))
    parents: dict[ReductionState, ReductionState | None] = {start: None}
    queue: deque[ReductionState] = deque([start])
    goal = None
    while queue:
        st = queue.popleft()
        if not st.stack and isinstance(st.current, Empty) and not st.pending:
            goal = st
            break
        for nxt in reduce_one(st):
            if nxt not in parents:
                parents[nxt] = st
                queue.append(nxt)
    if goal is None:
        return None
    path = []
    node: ReductionState | None = goal
    while node is not None:
        path.append(node)
        node = parents[node]
    return list(reversed(path))


def state_to_dict(state: ReductionState) -> dict:
    return {
        "stack": [print_context(c) for c in state.stack],
        "current": print_expr(state.current),
        "pending": [
            "{" + ", ".join(sorted(u)) + "}" if len(u) > 1 else next(iter(u))
            for u in state.pending
        ],
    }
