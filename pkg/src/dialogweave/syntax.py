"""Concrete textual syntax.

Expressions (``.dlg``)::

    expr     := term ('|' term)*            unions, lowest precedence, left-assoc
    term     := '~'
              | '(' expr ')' '^'*           arrows attach to the inner atom/node
              | MNEMONIC '^'* '[' expr (',' expr)* ']'
              | name '^'*
    name     := letter (letter | digit | '-' | '_')* '?'?

The fifteen mnemonic spellings are ``I C W SPE SPE* SPE' PE PE* PE' PFA1
PFA1* PFA1' PFAn PFAn* PFAn'``; an identifier counts as a mnemonic only
when a ``[`` follows.  ``#`` starts a comment.

Episodes (``.eps``, one per line)::

    episode  := '<' turn+ '>'
    turn     := response | '{' response (',' response)* '}'
    response := name ('=' value)?

A single-response turn is written without braces.  Payload values are
carried verbatim and ignored by all semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import (
    EMPTY,
    MNEMONIC_SPELLINGS,
    Atom,
    DialogExpr,
    Empty,
    Node,
    Union,
    ValidationReport,
    normalize_mnemonics,
    validate,
    with_arrows,
)

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*\??")
_VALUE_RE = re.compile(r"[^\s,{}<>]+")


class DialogSyntaxError(ValueError):
    def __init__(self, message: str, origin: str, line: int, col: int):
        super().__init__(f"{origin}:{line}:{col}: {message}")
        self.origin = origin
        self.line = line
        self.col = col


class ValidationFailure(ValueError):
    """Raised when a parsed expression violates the structural restrictions."""

    def __init__(self, report: ValidationReport, origin: str):
        lines = [f"{v.rule} at {fmt_path(v.path)}: {v.message}" for v in report.violations]
        super().__init__(f"{origin}: invalid expression\n  " + "\n  ".join(lines))
        self.report = report


def fmt_path(path: tuple[int, ...]) -> str:
    return "root" if not path else ".".join(str(i) for i in path)


class _Scanner:
    def __init__(self, text: str, origin: str):
        self.text = text
        self.origin = origin
        self.pos = 0

    def error(self, message: str, at: int | None = None) -> DialogSyntaxError:
        pos = self.pos if at is None else at
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return DialogSyntaxError(message, self.origin, line, col)

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif c == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl < 0 else nl
            else:
                return

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.text.startswith(ch, self.pos):
            self.pos += len(ch)
            return True
        return False

    def expect(self, ch: str, what: str = "") -> None:
        if not self.take(ch):
            found = self.peek() or "end of input"
            raise self.error(f"expected {what or ch!r}, found {found!r}")

    def name(self) -> str:
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            found = self.peek() or "end of input"
            raise self.error(f"expected a name, found {found!r}")
        self.pos = m.end()
        return m.group()

    def arrows(self) -> int:
        n = 0
        while self.take("^"):
            n += 1
        return n

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_term(s: _Scanner) -> DialogExpr:
    s.skip_ws()
    if s.take("~"):
        if s.peek() == "^":
            raise s.error("the empty dialog cannot carry arrows")
        return EMPTY
    if s.take("("):
        inner = _parse_union(s)
        s.skip_ws()
        s.expect(")")
        extra = s.arrows()
        if extra:
            if not isinstance(inner, (Atom, Node)):
                raise s.error("arrows may decorate only an atom or a mnemonic expression")
            inner = with_arrows(inner, inner.arrows + extra)
        return inner
    start = s.pos
    ident = s.name()
    suffix = ""
    if s.peek() in ("*", "'"):
        suffix = s.text[s.pos]
        s.pos += 1
    arrows = s.arrows()
    s.skip_ws()
    if s.peek() == "[":
        spelling = ident + suffix
        mnemonic = MNEMONIC_SPELLINGS.get(spelling)
        if mnemonic is None:
            raise s.error(f"unknown mnemonic {spelling!r}", at=start)
        s.expect("[")
        children = [_parse_union(s)]
        s.skip_ws()
        while s.take(","):
            children.append(_parse_union(s))
            s.skip_ws()
        s.expect("]")
        return Node(mnemonic, arrows, tuple(children))
    if suffix:
        raise s.error(f"{ident + suffix!r} reads as a mnemonic but no '[' follows", at=start)
    return Atom(ident, arrows)


def _parse_union(s: _Scanner) -> DialogExpr:
    left = _parse_term(s)
    s.skip_ws()
    while s.take("|"):
        right = _parse_term(s)
        left = Union(left, right)
        s.skip_ws()
    return left


def parse_expr(text: str, origin: str = "<inline>", *, check: bool = True) -> DialogExpr:
    """Parse one dialog expression; normalize mnemonics and validate.

    With ``check=False`` the raw (still mnemonic-normalized) tree is
    returned without the structural restrictions being enforced.
    """
    s = _Scanner(text, origin)
    expr = _parse_union(s)
    if not s.at_end():
        raise s.error(f"unexpected trailing input {s.peek()!r}")
    expr = normalize_mnemonics(expr)
    if check:
        report = validate(expr)
        if not report.ok:
            raise ValidationFailure(report, origin)
    return expr


def print_expr(expr: DialogExpr) -> str:
    if isinstance(expr, Empty):
        return "~"
    if isinstance(expr, Atom):
        return expr.name + "^" * expr.arrows
    if isinstance(expr, Node):
        inner = ", ".join(print_expr(c) for c in expr.children)
        return f"{expr.mnemonic.value}{'^' * expr.arrows}[{inner}]"
    # Right-nested unions need parentheses to survive the left-assoc reparse.
    left = print_expr(expr.left)
    right = print_expr(expr.right)
    if isinstance(expr.right, Union):
        right = f"({right})"
    return f"{left} | {right}"


# -- Utterances, episodes, enumerated specifications -------------------------


@dataclass(frozen=True)
class Utterance:
    """One user turn: a non-empty set of answered solicitations."""

    answers: frozenset[str]
    payloads: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.answers:
            raise ValueError("an utterance answers at least one solicitation")

    @property
    def payload_map(self) -> dict[str, str]:
        return dict(self.payloads)


def utterance(*names: str, **payloads: str) -> Utterance:
    return Utterance(frozenset(names) | frozenset(payloads), tuple(sorted(payloads.items())))


@dataclass(frozen=True)
class Episode:
    """A complete path through a dialog: an ordered sequence of utterances."""

    turns: tuple[Utterance, ...]

    def __post_init__(self) -> None:
        names = [n for t in self.turns for n in t.answers]
        if len(names) != len(set(names)):
            raise ValueError("an episode answers each solicitation at most once")

    @property
    def names(self) -> frozenset[str]:
        return frozenset(n for t in self.turns for n in t.answers)

    @property
    def answer_sets(self) -> tuple[frozenset[str], ...]:
        return tuple(t.answers for t in self.turns)


def episode_of(answer_sets: tuple[frozenset[str], ...]) -> Episode:
    return Episode(tuple(Utterance(s) for s in answer_sets))


@dataclass(frozen=True)
class EnumeratedSpec:
    """The extension of a dialog: the set of episodes it must support."""

    episodes: frozenset[Episode]
    universe: frozenset[str]

    def __post_init__(self) -> None:
        for ep in self.episodes:
            if not ep.names <= self.universe:
                raise ValueError(f"episode {print_episode(ep)} escapes the universe")

    @property
    def size(self) -> int:
        return len(self.episodes)

    def contains(self, ep: Episode) -> bool:
        return ep in self.episodes

    def union(self, other: "EnumeratedSpec") -> "EnumeratedSpec":
        return EnumeratedSpec(self.episodes | other.episodes, self.universe | other.universe)


def _parse_response(s: _Scanner) -> tuple[str, str | None]:
    name = s.name()
    if s.take("="):
        m = _VALUE_RE.match(s.text, s.pos)
        if not m:
            raise s.error("expected a payload value after '='")
        s.pos = m.end()
        return name, m.group()
    return name, None


def _parse_turn(s: _Scanner) -> Utterance:
    s.skip_ws()
    answers: list[str] = []
    payloads: list[tuple[str, str]] = []
    if s.take("{"):
        while True:
            s.skip_ws()
            name, value = _parse_response(s)
            answers.append(name)
            if value is not None:
                payloads.append((name, value))
            s.skip_ws()
            if s.take("}"):
                break
            s.expect(",", "',' or '}'")
    else:
        name, value = _parse_response(s)
        answers.append(name)
        if value is not None:
            payloads.append((name, value))
    if len(set(answers)) != len(answers):
        raise s.error("duplicate name within one utterance")
    return Utterance(frozenset(answers), tuple(sorted(payloads)))


def parse_utterance(text: str, origin: str = "<inline>") -> Utterance:
    s = _Scanner(text, origin)
    u = _parse_turn(s)
    if not s.at_end():
        raise s.error(f"unexpected trailing input {s.peek()!r}")
    return u


def print_utterance(u: Utterance) -> str:
    payloads = u.payload_map
    parts = [n + (f"={payloads[n]}" if n in payloads else "") for n in sorted(u.answers)]
    if len(parts) == 1:
        return parts[0]
    return "{" + ", ".join(parts) + "}"


def parse_episode(text: str, origin: str = "<inline>") -> Episode:
    s = _Scanner(text, origin)
    s.skip_ws()
    s.expect("<")
    turns = [_parse_turn(s)]
    while True:
        s.skip_ws()
        if s.take(">"):
            break
        turns.append(_parse_turn(s))
    if not s.at_end():
        raise s.error(f"unexpected trailing input {s.peek()!r}")
    try:
        return Episode(tuple(turns))
    except ValueError as exc:
        raise s.error(str(exc)) from None


def print_episode(ep: Episode) -> str:
    return "<" + " ".join(print_utterance(t) for t in ep.turns) + ">"


def parse_spec_file(text: str, origin: str = "<inline>") -> EnumeratedSpec:
    """One episode per non-comment line; duplicate lines collapse (set semantics)."""
    episodes: set[Episode] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        episodes.add(parse_episode(line, origin=f"{origin}:{lineno}"))
    universe = frozenset(n for ep in episodes for n in ep.names)
    return EnumeratedSpec(frozenset(episodes), universe)


def print_spec_file(spec: EnumeratedSpec) -> str:
    return "\n".join(sorted(print_episode(ep) for ep in spec.episodes)) + ("\n" if spec.episodes else "")


def parse_expr_file(text: str, origin: str = "<file>") -> DialogExpr:
    """A ``.dlg`` file: comments plus exactly one expression."""
    return parse_expr(text, origin)
