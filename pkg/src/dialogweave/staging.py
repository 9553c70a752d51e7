"""Two-step staging for arrow-free, W-free dialog expressions.

``stage`` maps a (dialog, utterance) pair to the dialog representing the
remaining interaction, or rejects the utterance.  Rules are keyed on the
shape of the expression; after a successful rule application the result
is reduced to canonical form.  PFA1 and SPE rules match only solicitation
children, so the sub-dialog-bearing shapes validation admits under them
reject every utterance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    EMPTY,
    Atom,
    DialogExpr,
    Empty,
    Mnemonic,
    Node,
    Union,
    solicitation_set,
)
from .simplify import RewriteTrace, canonicalize
from .syntax import Episode, Utterance, print_expr, print_utterance


@dataclass(frozen=True)
class Advanced:
    next: DialogExpr
    trace: RewriteTrace


@dataclass(frozen=True)
class Rejected:
    reason: str
    rule: str | None = None


StagingOutcome = Advanced | Rejected


def _check_basic(expr: DialogExpr) -> None:
    def walk(e: DialogExpr) -> None:
        if isinstance(e, (Atom, Node)) and e.arrows:
            raise ValueError("basic staging handles arrow-free expressions only")
        if isinstance(e, Node):
            if e.mnemonic is Mnemonic.W:
                raise ValueError("basic staging does not handle the W mnemonic")
            for c in e.children:
                walk(c)
        elif isinstance(e, Union):
            walk(e.left)
            walk(e.right)

    walk(expr)


def _atom_names(children: tuple[DialogExpr, ...]) -> list[str] | None:
    names = []
    for c in children:
        if not isinstance(c, Atom) or c.arrows:
            return None
        names.append(c.name)
    return names


def _stage(e: DialogExpr, u: frozenset[str]) -> DialogExpr | None:
    if isinstance(e, Atom):
        return EMPTY if u == frozenset({e.name}) else None
    if isinstance(e, Union):
        left = _stage(e.left, u)
        right = _stage(e.right, u)
        if left is not None and right is not None:
            return Union(left, right)
        if left is not None:
            return left
        return right
    if not isinstance(e, Node) or not e.children:
        return None

    m = e.mnemonic
    if m is Mnemonic.C:
        first = _stage(e.children[0], u)
        if first is None:
            return None
        return Node(Mnemonic.C, 0, (first,) + e.children[1:])
    if m is Mnemonic.SPE_PRIME:
        for i, child in enumerate(e.children):
            staged = _stage(child, u)
            if staged is not None:
                rest = e.children[:i] + e.children[i + 1 :]
                return Node(Mnemonic.C, 0, (staged, Node(Mnemonic.SPE_PRIME, 0, rest)))
        return None

    names = _atom_names(e.children)
    if names is None:
        return None
    nameset = frozenset(names)
    single = next(iter(u)) if len(u) == 1 else None

    if m is Mnemonic.I:
        return EMPTY if u == nameset else None
    if m is Mnemonic.SPE:
        if single in nameset:
            return Node(Mnemonic.I, 0, tuple(Atom(n) for n in names if n != single))
        return None
    if m is Mnemonic.SPE_STAR:
        if single in nameset:
            return Node(Mnemonic.SPE_STAR, 0, tuple(Atom(n) for n in names if n != single))
        if u == nameset:
            return EMPTY
        return None
    if m is Mnemonic.PFA1:
        if single == names[0]:
            return Node(Mnemonic.I, 0, e.children[1:])
        return None
    if m is Mnemonic.PFA1_STAR:
        if single == names[0]:
            return Node(Mnemonic.PFA1_STAR, 0, e.children[1:])
        if u == nameset:
            return EMPTY
        return None
    if m is Mnemonic.PFAN:
        if u == frozenset(names[: len(u)]):
            return Node(Mnemonic.I, 0, e.children[len(u) :])
        return None
    if m is Mnemonic.PFAN_STAR:
        if u == frozenset(names[: len(u)]):
            return Node(Mnemonic.PFAN_STAR, 0, e.children[len(u) :])
        return None
    if m is Mnemonic.PE:
        if u < nameset:  # proper subset: the full set is not a partial evaluation
            return Node(Mnemonic.I, 0, tuple(c for c in e.children if c.name not in u))
        return None
    if m is Mnemonic.PE_STAR:
        if u <= nameset:
            return Node(Mnemonic.PE_STAR, 0, tuple(c for c in e.children if c.name not in u))
        return None
    return None


def _rejection(expr: DialogExpr, u: frozenset[str]) -> Rejected:
    known = solicitation_set(expr)
    unknown = u - known
    if unknown:
        return Rejected(
            f"unknown solicitation(s): {', '.join(sorted(unknown))}", rule="unknown-name"
        )
    family = expr.mnemonic.value if isinstance(expr, Node) else type(expr).__name__.lower()
    return Rejected(
        f"{print_utterance(Utterance(u))} is out of order or wrongly grouped for {family}",
        rule=family,
    )


def stage(expr: DialogExpr, u: Utterance) -> StagingOutcome:
    """One staging step followed by canonicalization."""
    _check_basic(expr)
    staged = _stage(expr, u.answers)
    if staged is None:
        return _rejection(expr, u.answers)
    trace = canonicalize(staged)
    return Advanced(trace.result, trace)


def run_episode(expr: DialogExpr, ep: Episode) -> bool:
    """True iff every turn advances and the dialog ends empty."""
    _check_basic(expr)
    current = expr
    for turn in ep.turns:
        outcome = stage(current, turn)
        if isinstance(outcome, Rejected):
            return False
        current = outcome.next
    return isinstance(current, Empty)


def explain(expr: DialogExpr, u: Utterance) -> str:
    """Human-readable account of one staging attempt (CLI support)."""
    outcome = stage(expr, u)
    if isinstance(outcome, Advanced):
        return print_expr(outcome.next)
    return f"REJECTED: {outcome.reason}"
