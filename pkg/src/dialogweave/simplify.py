"""Simplification of dialog expressions to canonical form.

Seven rewrite rules, applicable at any node of the tree (substructural
closure), each strictly decreasing :func:`dialogweave.expr.expr_size`:

====================  =======================================================
EMPTY-1               ``M[]        ~> ~``            any mnemonic
EMPTY-2               ``M[.. ~ ..] ~> M[.. ..]``     sub-dialog-capable M
EMPTY-3 / EMPTY-4     ``~ | d ~> d``  /  ``d | ~ ~> d``
ATOM-1                ``M[d] ~> d``                  M in {C, SPE'}
ATOM-2                ``M[x] ~> x``                  other M, x an atom
FLATTEN               ``C[.. C[..] ..] ~> C[.. .. ..]``
====================  =======================================================

ATOM-1/ATOM-2 and FLATTEN remove one tree level, so they fire only when no
arrow chain inside the lifted subtree reaches that level or beyond
(otherwise the lift re-targets a control transfer and changes the episode
set); an element at depth d below the lifted root may carry at most d - 1
arrows.  The collapsing node's own arrows migrate onto the surviving
child, which is behavior-preserving.  Deterministic application order is
leftmost-innermost with the rule order above.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    EMPTY,
    SUBDIALOG_CAPABLE,
    Atom,
    DialogExpr,
    Empty,
    Mnemonic,
    Node,
    Path,
    Union,
    replace_at,
    with_arrows,
)

RULE_IDS = ("EMPTY-1", "EMPTY-2", "EMPTY-3", "EMPTY-4", "ATOM-1", "ATOM-2", "FLATTEN")


@dataclass(frozen=True)
class RewriteStep:
    """One rule application; before/after are whole expressions."""

    rule: str
    path: Path
    before: DialogExpr
    after: DialogExpr


@dataclass(frozen=True)
class RewriteTrace:
    start: DialogExpr
    steps: tuple[RewriteStep, ...]
    result: DialogExpr


def _lift_safe(e: DialogExpr, depth: int = 0) -> bool:
    """No arrow chain in ``e`` escapes when ``e`` is lifted one level up."""
    if isinstance(e, (Atom, Node)) and e.arrows >= max(depth, 1):
        return False
    if isinstance(e, Node):
        return all(_lift_safe(c, depth + 1) for c in e.children)
    if isinstance(e, Union):
        # Unions push no constructor; their sides sit at the same level.
        return _lift_safe(e.left, depth) and _lift_safe(e.right, depth)
    return True


def _collapsible(e: Node) -> DialogExpr | None:
    """Result of ATOM-1/ATOM-2 at ``e`` if the rule applies, else None."""
    if len(e.children) != 1:
        return None
    child = e.children[0]
    if isinstance(child, Empty):
        return None  # EMPTY-2 owns this case
    if e.mnemonic in (Mnemonic.C, Mnemonic.SPE_PRIME):
        if not _lift_safe(child):
            return None
        if isinstance(child, (Atom, Node)):
            return with_arrows(child, e.arrows) if e.arrows else child
        return child if not e.arrows else None  # a union cannot carry arrows
    if e.mnemonic is Mnemonic.PE:
        # PE demands a proper subset per utterance, so PE over one
        # solicitation accepts nothing; collapsing it to the atom would
        # grow the episode set.
        return None
    if isinstance(child, Atom) and not child.arrows:
        return Atom(child.name, e.arrows)
    return None


def _local_steps(e: DialogExpr) -> list[tuple[str, DialogExpr]]:
    """Every (rule, replacement) applicable at the root of ``e``."""
    out: list[tuple[str, DialogExpr]] = []
    if isinstance(e, Node):
        if not e.children and not e.arrows:
            out.append(("EMPTY-1", EMPTY))
        if e.mnemonic in SUBDIALOG_CAPABLE:
            for i, c in enumerate(e.children):
                if isinstance(c, Empty):
                    kids = e.children[:i] + e.children[i + 1 :]
                    out.append(("EMPTY-2", Node(e.mnemonic, e.arrows, kids)))
        collapsed = _collapsible(e)
        if collapsed is not None:
            rule = "ATOM-1" if e.mnemonic in (Mnemonic.C, Mnemonic.SPE_PRIME) else "ATOM-2"
            out.append((rule, collapsed))
        if e.mnemonic is Mnemonic.C:
            for i, c in enumerate(e.children):
                if isinstance(c, Node) and c.mnemonic is Mnemonic.C and _lift_safe(c):
                    kids = e.children[:i] + c.children + e.children[i + 1 :]
                    out.append(("FLATTEN", Node(Mnemonic.C, e.arrows, kids)))
    elif isinstance(e, Union):
        if isinstance(e.left, Empty):
            out.append(("EMPTY-3", e.right))
        if isinstance(e.right, Empty):
            out.append(("EMPTY-4", e.left))
    order = {r: i for i, r in enumerate(RULE_IDS)}
    out.sort(key=lambda t: order[t[0]])
    return out


def _subtrees_innermost(e: DialogExpr, path: Path):
    """Yield (path, subexpr) in leftmost-innermost order."""
    if isinstance(e, Node):
        for i, c in enumerate(e.children):
            yield from _subtrees_innermost(c, path + (i,))
    elif isinstance(e, Union):
        yield from _subtrees_innermost(e.left, path + (0,))
        yield from _subtrees_innermost(e.right, path + (1,))
    yield path, e


def simplify_step(expr: DialogExpr) -> RewriteStep | None:
    """The first applicable step, leftmost-innermost; None when canonical."""
    for path, sub in _subtrees_innermost(expr, ()):
        local = _local_steps(sub)
        if local:
            rule, replacement = local[0]
            return RewriteStep(rule, path, expr, replace_at(expr, path, replacement))
    return None


def all_steps(expr: DialogExpr) -> list[RewriteStep]:
    """Every applicable (rule, path) pair; the branching confluence tests walk."""
    steps = []
    for path, sub in _subtrees_innermost(expr, ()):
        for rule, replacement in _local_steps(sub):
            steps.append(RewriteStep(rule, path, expr, replace_at(expr, path, replacement)))
    return steps


def canonicalize(expr: DialogExpr) -> RewriteTrace:
    """Apply simplify_step to fixpoint, recording every step.

    Terminates because each rule strictly shrinks ``expr_size``.
    """
    steps: list[RewriteStep] = []
    current = expr
    while (step := simplify_step(current)) is not None:
        steps.append(step)
        current = step.after
    return RewriteTrace(expr, tuple(steps), current)


def canon(expr: DialogExpr) -> DialogExpr:
    """Canonical form without a trace: a single bottom-up pass.

    Produces the same normal form as :func:`canonicalize` (the rewrite
    relation is confluent; the property suite checks agreement of the two
    routes), at a fraction of the cost.  The reduction machine calls this
    on every constructor application.
    """
    if isinstance(expr, (Empty, Atom)):
        return expr
    if isinstance(expr, Union):
        left = canon(expr.left)
        right = canon(expr.right)
        if isinstance(left, Empty):
            return right
        if isinstance(right, Empty):
            return left
        return Union(left, right)
    kids = [canon(c) for c in expr.children]
    if expr.mnemonic is Mnemonic.C:
        flat: list[DialogExpr] = []
        for c in kids:
            if isinstance(c, Node) and c.mnemonic is Mnemonic.C and _lift_safe(c):
                flat.extend(c.children)
            else:
                flat.append(c)
        kids = flat
    if expr.mnemonic in SUBDIALOG_CAPABLE:
        kids = [c for c in kids if not isinstance(c, Empty)]
    if not kids:
        return EMPTY if not expr.arrows else Node(expr.mnemonic, expr.arrows, ())
    e = Node(expr.mnemonic, expr.arrows, tuple(kids))
    collapsed = _collapsible(e)
    return e if collapsed is None else canon(collapsed)
