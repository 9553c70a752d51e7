"""Decompression: the exact episode set of a dialog expression.

Enumeration drives the reduction machine: from the initial frontier it
probes every non-empty subset of the still-unanswered solicitations,
recurses on surviving frontiers, and collects each turn sequence whose
frontier can finish.  Probing subset utterances (not just singletons)
makes the result exact for the grouping mnemonics as well.  Episode
counts grow super-exponentially, so a hard universe cap guards the
search; the empty dialog has an empty episode set.
"""

from __future__ import annotations

from itertools import combinations

from .expr import DialogExpr, solicitation_set
from .machine import Frontier, init_state, is_complete, stage_response, state_names
from .syntax import EnumeratedSpec, Episode, Utterance

DEFAULT_CAP = 8


class EnumerationCapExceeded(ValueError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"{n} solicitations exceed the enumeration cap of {cap}")
        self.n = n
        self.cap = cap


def enumerate_episodes(expr: DialogExpr, cap: int = DEFAULT_CAP) -> EnumeratedSpec:
    """The exact extension: ep in the result iff membership(expr, ep)."""
    universe = solicitation_set(expr)
    if len(universe) > cap:
        raise EnumerationCapExceeded(len(universe), cap)

    memo: dict[Frontier, frozenset[tuple[frozenset[str], ...]]] = {}

    def suffixes(frontier: Frontier) -> frozenset[tuple[frozenset[str], ...]]:
        cached = memo.get(frontier)
        if cached is not None:
            return cached
        acc: set[tuple[frozenset[str], ...]] = set()
        if is_complete(frontier):
            acc.add(())
        remaining: set[str] = set()
        for st in frontier:
            remaining |= state_names(st)
        pool = sorted(remaining)
        for size in range(1, len(pool) + 1):
            for combo in combinations(pool, size):
                u = frozenset(combo)
                nxt = stage_response(frontier, u)
                if nxt:
                    for rest in suffixes(nxt):
                        acc.add((u,) + rest)
        result = frozenset(acc)
        memo[frontier] = result
        return result

    start: Frontier = frozenset({init_state(expr)})
    episodes = frozenset(
        Episode(tuple(Utterance(ans) for ans in seq))
        for seq in suffixes(start)
        if seq  # the zero-turn sequence is not an episode
    )
    return EnumeratedSpec(episodes, universe)


def equivalent(a: DialogExpr, b: DialogExpr, cap: int = DEFAULT_CAP) -> bool:
    """Episode-set equality of two dialogs."""
    return enumerate_episodes(a, cap).episodes == enumerate_episodes(b, cap).episodes


def difference_witness(a: DialogExpr, b: DialogExpr, cap: int = DEFAULT_CAP) -> Episode | None:
    """An episode in exactly one of the two extensions, if any."""
    ea = enumerate_episodes(a, cap).episodes
    eb = enumerate_episodes(b, cap).episodes
    delta = sorted(ea ^ eb, key=lambda ep: (len(ep.turns), str(ep)))
    return delta[0] if delta else None
