"""Dialog expression trees.

A dialog is either the empty dialog ``~``, an atomic solicitation, a
mnemonic node over an ordered list of sub-dialogs, or a union of two
dialogs.  Atoms and nodes may carry a non-negative number of control
arrows (``^``); the empty dialog and unions never do.  All values are
immutable and hashable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Mnemonic(enum.Enum):
    """The twelve behaviorally distinct concept mnemonics.

    Three further spellings are accepted on input and normalized away
    (see :func:`normalize_mnemonics`): PFA1' behaves as C, PFAn' as
    PFAn*, and PE' as PE*.
    """

    I = "I"
    C = "C"
    SPE = "SPE"
    SPE_STAR = "SPE*"
    SPE_PRIME = "SPE'"
    PE = "PE"
    PE_STAR = "PE*"
    PFA1 = "PFA1"
    PFA1_STAR = "PFA1*"
    PFAN = "PFAn"
    PFAN_STAR = "PFAn*"
    W = "W"

    def __str__(self) -> str:
        return self.value


#: All fifteen accepted spellings, including the three redundant ones.
MNEMONIC_SPELLINGS: dict[str, Mnemonic] = {m.value: m for m in Mnemonic}
MNEMONIC_SPELLINGS["PFA1'"] = Mnemonic.C
MNEMONIC_SPELLINGS["PFAn'"] = Mnemonic.PFAN_STAR
MNEMONIC_SPELLINGS["PE'"] = Mnemonic.PE_STAR

#: Mnemonics whose children may be arbitrary sub-dialogs.
SUBDIALOG_CAPABLE = frozenset(
    {Mnemonic.C, Mnemonic.SPE_PRIME, Mnemonic.W, Mnemonic.PFA1, Mnemonic.SPE}
)

#: Mnemonics restricted to plain (arrow-free) solicitation children.
ATOMS_ONLY = frozenset(set(Mnemonic) - SUBDIALOG_CAPABLE)


@dataclass(frozen=True)
class Empty:
    """The dialog ``~`` with no episodes."""

    def __repr__(self) -> str:
        return "Empty()"


EMPTY = Empty()


@dataclass(frozen=True)
class Atom:
    """A single solicitation, optionally suspended by arrows."""

    name: str
    arrows: int = 0


@dataclass(frozen=True)
class Node:
    """A mnemonic applied to an ordered sequence of sub-dialogs."""

    mnemonic: Mnemonic
    arrows: int
    children: tuple["DialogExpr", ...]


@dataclass(frozen=True)
class Union:
    """The dialog whose episodes are the union of both sides'."""

    left: "DialogExpr"
    right: "DialogExpr"


DialogExpr = Empty | Atom | Node | Union

Path = tuple[int, ...]


def union_all(exprs: list[DialogExpr]) -> DialogExpr:
    """Right-fold a list into nested binary unions; [] is the empty dialog."""
    if not exprs:
        return EMPTY
    out = exprs[-1]
    for e in reversed(exprs[:-1]):
        out = Union(e, out)
    return out


def arrow_count(expr: DialogExpr) -> int:
    if isinstance(expr, (Atom, Node)):
        return expr.arrows
    return 0


def with_arrows(expr: DialogExpr, arrows: int) -> DialogExpr:
    if isinstance(expr, Atom):
        return Atom(expr.name, arrows)
    if isinstance(expr, Node):
        return Node(expr.mnemonic, arrows, expr.children)
    raise ValueError(f"cannot place arrows on {type(expr).__name__}")


def children_of(expr: DialogExpr) -> tuple[DialogExpr, ...]:
    if isinstance(expr, Node):
        return expr.children
    if isinstance(expr, Union):
        return (expr.left, expr.right)
    return ()


def subexpr_at(expr: DialogExpr, path: Path) -> DialogExpr:
    for i in path:
        expr = children_of(expr)[i]
    return expr


def replace_at(expr: DialogExpr, path: Path, new: DialogExpr) -> DialogExpr:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(expr, Node):
        kids = list(expr.children)
        kids[i] = replace_at(kids[i], rest, new)
        return Node(expr.mnemonic, expr.arrows, tuple(kids))
    if isinstance(expr, Union):
        if i == 0:
            return Union(replace_at(expr.left, rest, new), expr.right)
        return Union(expr.left, replace_at(expr.right, rest, new))
    raise IndexError(f"no child {i} under {type(expr).__name__}")


def solicitation_set(expr: DialogExpr) -> frozenset[str]:
    """All atom names in the tree."""
    names: set[str] = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Atom):
            names.add(e.name)
        else:
            stack.extend(children_of(e))
    return frozenset(names)


def expr_size(expr: DialogExpr) -> int:
    """Termination measure: nodes weigh 2 so every rewrite strictly shrinks it."""
    if isinstance(expr, Node):
        return 2 + sum(expr_size(c) for c in expr.children)
    if isinstance(expr, Union):
        return 1 + expr_size(expr.left) + expr_size(expr.right)
    return 1


def normalize_mnemonics(expr: DialogExpr) -> DialogExpr:
    """Rewrite the three redundant mnemonics to their representatives.

    The parser applies the mapping while reading spellings, so trees built
    from source are already normal; this covers programmatic trees.  The
    enum has no members for the redundant spellings, which makes this
    idempotent by construction.
    """
    if isinstance(expr, Node):
        return Node(expr.mnemonic, expr.arrows, tuple(normalize_mnemonics(c) for c in expr.children))
    if isinstance(expr, Union):
        return Union(normalize_mnemonics(expr.left), normalize_mnemonics(expr.right))
    return expr


@dataclass(frozen=True)
class Violation:
    rule: str
    path: Path
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(expr: DialogExpr) -> ValidationReport:
    """Check the context-sensitive restrictions on a dialog expression.

    R1  atoms-only mnemonics take only arrow-free atom children;
    R2  PFA1/SPE may hold sub-dialogs only with <= 2 children, or with the
        sub-dialog first when there are more than two (such nodes parse
        but no staging rule matches them, so they accept no utterance);
    R3  a chain of k arrows must resolve, k levels above the annotated
        element's parent (union nodes are transparent), to a W node;
    R4  solicitation names are distinct within every union-free branch
        (the two sides of a union describe alternatives for one dialog
        and may reuse names);
    R5  union operands should be compound dialogs (warning only).
    """
    violations: list[Violation] = []
    warnings: list[Violation] = []
    dup_reported: set[str] = set()

    # Name sets per union branch, bounded: unions add branches, node children
    # combine them pairwise.  Overlap within one combination is an R4 hit.
    _BRANCH_CAP = 4096

    def branches(e: DialogExpr, path: Path) -> list[frozenset[str]]:
        if isinstance(e, Atom):
            return [frozenset({e.name})]
        if isinstance(e, Empty):
            return [frozenset()]
        if isinstance(e, Union):
            return branches(e.left, path + (0,)) + branches(e.right, path + (1,))
        acc: list[frozenset[str]] = [frozenset()]
        for i, c in enumerate(e.children):
            child_sets = branches(c, path + (i,))
            nxt: list[frozenset[str]] = []
            for base in acc:
                for cs in child_sets:
                    clash = base & cs
                    for name in sorted(clash - dup_reported):
                        dup_reported.add(name)
                        violations.append(
                            Violation("R4", path, f"duplicate solicitation {name!r}")
                        )
                    nxt.append(base | cs)
                    if len(nxt) >= _BRANCH_CAP:
                        break
                if len(nxt) >= _BRANCH_CAP:
                    break
            acc = nxt
        return acc

    def check_arrows(e: Atom | Node, path: Path, ancestors: list[Node]) -> None:
        k = e.arrows
        if k <= 0:
            return
        # ancestors holds enclosing Nodes nearest-first; index 0 is the parent,
        # index k is the receiver of control.
        if len(ancestors) <= k:
            violations.append(
                Violation("R3", path, f"{k} arrow(s) climb past the root; no W receiver exists")
            )
        elif ancestors[k].mnemonic is not Mnemonic.W:
            violations.append(
                Violation(
                    "R3",
                    path,
                    f"arrow target {k} level(s) above the parent is "
                    f"{ancestors[k].mnemonic}, not W",
                )
            )

    def walk(e: DialogExpr, path: Path, ancestors: list[Node]) -> None:
        if isinstance(e, Atom):
            check_arrows(e, path, ancestors)
            return
        if isinstance(e, Union):
            for i, side in enumerate((e.left, e.right)):
                if isinstance(side, (Empty, Atom)):
                    warnings.append(
                        Violation("R5", path + (i,), "union operand is not a compound dialog")
                    )
                # Unions are transparent to arrow targeting: the machine pushes
                # no constructor for them, so the ancestor chain is unchanged.
                walk(side, path + (i,), ancestors)
            return
        if isinstance(e, Node):
            check_arrows(e, path, ancestors)
            if e.mnemonic in ATOMS_ONLY:
                for i, c in enumerate(e.children):
                    if not isinstance(c, Atom) or c.arrows:
                        violations.append(
                            Violation(
                                "R1",
                                path + (i,),
                                f"{e.mnemonic} admits only arrow-free solicitations",
                            )
                        )
            elif e.mnemonic in (Mnemonic.PFA1, Mnemonic.SPE):
                subdialogs = [i for i, c in enumerate(e.children) if not isinstance(c, Atom)]
                if subdialogs and len(e.children) > 2 and subdialogs != [0]:
                    violations.append(
                        Violation(
                            "R2",
                            path,
                            f"{e.mnemonic} with more than two children admits a "
                            "sub-dialog only in the first position",
                        )
                    )
            inner = [e] + ancestors
            for i, c in enumerate(e.children):
                walk(c, path + (i,), inner)
            return
        # Empty: nothing to check.

    branches(expr, ())
    walk(expr, (), [])
    return ValidationReport(tuple(violations), tuple(warnings))


def arrow_targets(expr: DialogExpr) -> list[tuple[Path, Path]]:
    """(annotated element, resolved receiver) paths for every arrow chain.

    Only defined for valid expressions; used to assert the every-target-is-W
    invariant.
    """
    out: list[tuple[Path, Path]] = []

    def walk(e: DialogExpr, path: Path, ancestors: list[Path]) -> None:
        if isinstance(e, (Atom, Node)) and e.arrows:
            out.append((path, ancestors[e.arrows]))
        if isinstance(e, Node):
            for i, c in enumerate(e.children):
                walk(c, path + (i,), [path] + ancestors)
        elif isinstance(e, Union):
            walk(e.left, path + (0,), ancestors)
            walk(e.right, path + (1,), ancestors)

    walk(expr, (), [])
    return out
