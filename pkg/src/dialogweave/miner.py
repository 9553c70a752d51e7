"""Random dialog generation, spec mining, and the compression experiment.

The generator produces weaving dialogs: a W root over {C, SPE', W}
sub-trees of fresh solicitations, each atom independently suspended with
arrows where a valid W receiver exists.  The miner goes the other way:
given an enumerated specification it selects a union of arrow-free,
W-free expressions whose joint extension equals the spec exactly.  It is
sound and covering by construction (a per-episode fallback always fits)
but makes no minimality claim.

Mining works in a compact encoding: with the universe sorted, an answer
set is a bitmask and an episode a tuple of bitmasks.  Candidate pool
extensions are composed per-block from machine-enumerated flat tables;
the final union is always re-verified through the machine.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .episodes import DEFAULT_CAP, EnumerationCapExceeded, enumerate_episodes
from .expr import Atom, DialogExpr, Mnemonic, Node, validate
from .simplify import canon
from .syntax import EnumeratedSpec, Episode, Utterance, print_expr

#: Flat mnemonics whose extension ignores child order (one canonical order suffices).
ORDER_FREE = (
    Mnemonic.I,
    Mnemonic.PE,
    Mnemonic.PE_STAR,
    Mnemonic.SPE,
    Mnemonic.SPE_STAR,
    Mnemonic.SPE_PRIME,
)
#: Flat mnemonics where child order matters (all permutations are distinct candidates).
ORDER_SENSITIVE = (
    Mnemonic.C,
    Mnemonic.PFA1,
    Mnemonic.PFA1_STAR,
    Mnemonic.PFAN,
    Mnemonic.PFAN_STAR,
)


@dataclass(frozen=True)
class GenConfig:
    solicitations: int = 5
    arrow_prob: float = 0.5
    seed: int = 0
    inner: tuple[Mnemonic, ...] = (Mnemonic.C, Mnemonic.SPE_PRIME, Mnemonic.W)
    max_children: int = 4

    def __post_init__(self) -> None:
        if not 0.0 <= self.arrow_prob <= 1.0:
            raise ValueError("arrow_prob must lie in [0, 1]")
        if self.solicitations < 1:
            raise ValueError("need at least one solicitation")


def _split(rng: random.Random, names: list[str], max_children: int) -> list[list[str]]:
    """Multinomial split into 2..max_children non-empty parts, evenly biased."""
    count = rng.randint(2, min(len(names), max_children))
    for _ in range(64):
        parts: list[list[str]] = [[] for _ in range(count)]
        for name in names:
            parts[rng.randrange(count)].append(name)
        if all(parts):
            return parts
    # Vanishingly unlikely fallback: deal round-robin.
    parts = [[] for _ in range(count)]
    for i, name in enumerate(names):
        parts[i % count].append(name)
    return parts


def generate_random(cfg: GenConfig) -> DialogExpr:
    """A fresh validated weaving dialog; identical for identical configs."""
    rng = random.Random(cfg.seed)
    names = [f"q{i + 1}" for i in range(cfg.solicitations)]

    def build(part: list[str], is_root: bool) -> list:
        if len(part) == 1 and not is_root:
            return ["atom", part[0], 0]
        mnemonic = Mnemonic.W if is_root else rng.choice(cfg.inner)
        if len(part) == 1:
            return ["node", mnemonic, [["atom", part[0], 0]]]
        return ["node", mnemonic, [build(p, False) for p in _split(rng, part, cfg.max_children)]]

    tree = build(names, True)

    def place_arrows(t: list, ancestors: list[Mnemonic]) -> None:
        if t[0] == "atom":
            if rng.random() < cfg.arrow_prob:
                valid = [k for k in range(1, len(ancestors)) if ancestors[k] is Mnemonic.W]
                if valid:
                    t[2] = rng.choice(valid)
            return
        for child in t[2]:
            place_arrows(child, [t[1]] + ancestors)

    place_arrows(tree, [])

    def freeze(t: list) -> DialogExpr:
        if t[0] == "atom":
            return Atom(t[1], t[2])
        return Node(t[1], 0, tuple(freeze(c) for c in t[2]))

    expr = freeze(tree)
    report = validate(expr)
    if not report.ok:  # pragma: no cover - generator is valid by construction
        raise AssertionError(f"generator produced an invalid expression: {report.violations}")
    return expr


# -- Candidate pool -----------------------------------------------------------

EpisodeKey = tuple[int, ...]  # answer-set bitmasks, in turn order
Extension = frozenset[EpisodeKey]


def _mask(names: frozenset[str], bit: dict[str, int]) -> int:
    m = 0
    for n in names:
        m |= 1 << bit[n]
    return m


def _episode_key(ep: Episode, bit: dict[str, int]) -> EpisodeKey:
    return tuple(_mask(t.answers, bit) for t in ep.turns)


def _key_episode(key: EpisodeKey, universe: tuple[str, ...]) -> Episode:
    turns = []
    for mask in key:
        names = frozenset(n for i, n in enumerate(universe) if mask >> i & 1)
        turns.append(Utterance(names))
    return Episode(tuple(turns))


def _flat_exprs(names: tuple[str, ...], exclude: frozenset[Mnemonic]) -> list[DialogExpr]:
    if len(names) == 1:
        return [Atom(names[0])]
    out: list[DialogExpr] = []
    for m in ORDER_FREE:
        if m not in exclude:
            out.append(Node(m, 0, tuple(Atom(n) for n in names)))
    for m in ORDER_SENSITIVE:
        if m not in exclude:
            for perm in permutations(names):
                out.append(Node(m, 0, tuple(Atom(n) for n in perm)))
    return out


def _ordered_partitions(items: tuple[str, ...]):
    """All ordered sequences of disjoint non-empty blocks covering items."""
    if not items:
        yield ()
        return
    rest = items
    n = len(rest)
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            block = tuple(rest[i] for i in combo)
            remaining = tuple(rest[i] for i in range(n) if i not in combo)
            for tail in _ordered_partitions(remaining):
                yield (block,) + tail


def _concat_product(exts: list[Extension]) -> Extension:
    acc: set[EpisodeKey] = {()}
    for ext in exts:
        acc = {a + e for a in acc for e in ext}
    return frozenset(acc)


#: Candidates are drawn from spec episode name-sets of at most this many
#: solicitations; the pool grows like the ordered-Bell numbers, so wider
#: name-sets are covered by the per-episode fallback instead.
DEFAULT_POOL_LIMIT = 5

_POOL_CACHE: dict[tuple[str, ...], list[tuple[DialogExpr, Extension]]] = {}


def _subset_pool(names: tuple[str, ...]) -> list[tuple[DialogExpr, Extension]]:
    """Deduplicated (expression, extension) candidates over exactly ``names``.

    Every candidate is a complete dialog over the whole name tuple, so its
    episodes all answer exactly these names.  Extensions are encoded with
    bit i standing for names[i].
    """
    cached = _POOL_CACHE.get(names)
    if cached is not None:
        return cached
    bit = {n: i for i, n in enumerate(names)}
    flat_ext: dict[DialogExpr, Extension] = {}

    def ext_of_flat(e: DialogExpr) -> Extension:
        ext = flat_ext.get(e)
        if ext is None:
            spec = enumerate_episodes(e, cap=len(names))
            ext = frozenset(_episode_key(ep, bit) for ep in spec.episodes)
            flat_ext[e] = ext
        return ext

    by_ext: dict[Extension, DialogExpr] = {}

    def offer(e: DialogExpr, ext: Extension) -> None:
        if ext and ext not in by_ext:
            by_ext[ext] = e

    for e in _flat_exprs(names, exclude=frozenset()):
        offer(e, ext_of_flat(e))

    no_exclude = frozenset()
    no_inner_c = frozenset({Mnemonic.C})
    if len(names) >= 2:
        for parts in _ordered_partitions(names):
            if len(parts) < 2 or max(len(p) for p in parts) < 2:
                continue
            canonical_order = all(
                parts[i][0] < parts[i + 1][0] for i in range(len(parts) - 1)
            )
            for top, inner_exclude, use in (
                (Mnemonic.C, no_inner_c, True),
                (Mnemonic.SPE_PRIME, no_exclude, canonical_order),
            ):
                if not use:
                    continue
                block_choices = [_flat_exprs(p, exclude=inner_exclude) for p in parts]
                for kids in _product(block_choices):
                    expr = Node(top, 0, tuple(kids))
                    block_exts = [ext_of_flat(k) for k in kids]
                    if top is Mnemonic.C:
                        ext = _concat_product(block_exts)
                    else:
                        pieces: set[EpisodeKey] = set()
                        for order in permutations(range(len(block_exts))):
                            pieces |= _concat_product([block_exts[i] for i in order])
                        ext = frozenset(pieces)
                    offer(expr, ext)

    pool = [(e, ext) for ext, e in by_ext.items()]
    # Deterministic order: prefer small extensions and short prints for greedy ties.
    pool.sort(key=lambda t: (len(t[1]), len(print_expr(t[0])), print_expr(t[0])))
    _POOL_CACHE[names] = pool
    return pool


def _candidates_for(
    spec_name_sets: set[frozenset[str]],
    universe: tuple[str, ...],
    limit: int,
) -> list[tuple[DialogExpr, Extension]]:
    """Pool candidates over each spec episode name-set, in universe bits.

    A candidate's episodes all span its own name-set, so only name-sets
    that actually occur in the spec can host an exact-fitting candidate.
    """
    bit = {n: i for i, n in enumerate(universe)}
    out: list[tuple[DialogExpr, Extension]] = []
    for subset in sorted(spec_name_sets, key=lambda s: (len(s), sorted(s))):
        if len(subset) > limit:
            continue
        names = tuple(sorted(subset))
        pool = _subset_pool(names)
        if names == universe:
            out.extend(pool)
            continue
        # Translate local bitmasks into universe bitmasks.
        table = [0] * (1 << len(names))
        for mask in range(1 << len(names)):
            m = 0
            for i in range(len(names)):
                if mask >> i & 1:
                    m |= 1 << bit[names[i]]
            table[mask] = m
        for e, ext in pool:
            out.append((e, frozenset(tuple(table[m] for m in key) for key in ext)))
    return out


def _product(choices: list[list[DialogExpr]]):
    if not choices:
        yield []
        return
    for head in choices[0]:
        for tail in _product(choices[1:]):
            yield [head] + tail


class MinerSoundnessError(AssertionError):
    pass


def _episode_expr(key: EpisodeKey, universe: tuple[str, ...]) -> DialogExpr:
    """Fallback that fits one episode exactly: C of turns, sets as I nodes."""
    items: list[DialogExpr] = []
    for mask in key:
        names = sorted(n for i, n in enumerate(universe) if mask >> i & 1)
        if len(names) == 1:
            items.append(Atom(names[0]))
        else:
            items.append(Node(Mnemonic.I, 0, tuple(Atom(n) for n in names)))
    return canon(Node(Mnemonic.C, 0, tuple(items)))


def mine(
    spec: EnumeratedSpec, cap: int = DEFAULT_CAP, pool_limit: int = DEFAULT_POOL_LIMIT
) -> list[DialogExpr]:
    """A union of original-language expressions enumerating exactly ``spec``.

    Greedy maximum-new-coverage over exact-fitting pool candidates, then a
    per-episode fallback; never more expressions than episodes.  The result
    is verified by machine enumeration before being returned.
    """
    if len(spec.universe) > cap:
        raise EnumerationCapExceeded(len(spec.universe), cap)
    if not spec.episodes:
        return []
    universe = tuple(sorted(spec.universe))
    bit = {n: i for i, n in enumerate(universe)}
    target: Extension = frozenset(_episode_key(ep, bit) for ep in spec.episodes)

    name_sets = {ep.names for ep in spec.episodes}
    pool = _candidates_for(name_sets, universe, pool_limit)
    exact = [(e, ext) for e, ext in pool if ext <= target]
    covered: set[EpisodeKey] = set()
    target_set = set(target)
    picks: list[DialogExpr] = []
    while covered != target_set:
        best = None
        for e, ext in exact:
            gain = len(ext - covered)
            if gain and (best is None or gain > best[0]):
                best = (gain, e, ext)
        if best is None:
            break
        picks.append(best[1])
        covered |= best[2]
    for key in sorted(target - covered):
        picks.append(_episode_expr(key, universe))

    # The sides of a union stage independently, so the union's extension is
    # the union of per-expression extensions; verify each through the machine.
    got: set[Episode] = set()
    for e in picks:
        got |= enumerate_episodes(e, cap=max(cap, len(universe))).episodes
    if got != set(spec.episodes):
        raise MinerSoundnessError("mined union does not reproduce the specification")
    return picks


# -- Metrics and the experiment harness ---------------------------------------


def verbosity(sizes) -> float:
    """Arithmetic mean of sizes (episode counts or union widths)."""
    sizes = list(sizes)
    if not sizes:
        raise ValueError("verbosity of an empty collection is undefined")
    return sum(sizes) / len(sizes)


@dataclass
class ExperimentReport:
    n: int
    verb_l1: float
    verb_l2: float
    verb_l3: float
    factor_orig: float
    factor_arrow: float
    factor_total: float
    compressible_fraction: float
    max_compression: tuple[int, int]
    histogram_l1: dict[int, int]
    histogram_l2: dict[int, int]
    samples: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "verbosity": {"L1": self.verb_l1, "L2": self.verb_l2, "L3": self.verb_l3},
            "compression_factor": {
                "enumerated_to_original": self.factor_orig,
                "original_to_weaving": self.factor_arrow,
                "total": self.factor_total,
            },
            "compressible_fraction": self.compressible_fraction,
            "max_compression": {
                "episodes": self.max_compression[0],
                "union_size": self.max_compression[1],
            },
            "histogram_l1": {str(k): v for k, v in sorted(self.histogram_l1.items())},
            "histogram_l2": {str(k): v for k, v in sorted(self.histogram_l2.items())},
            "samples": [{"episodes": a, "union_size": b} for a, b in self.samples],
        }

    def to_text(self) -> str:
        lines = [
            f"samples                 {self.n}",
            f"verbosity L1 (episodes) {self.verb_l1:.3f}",
            f"verbosity L2 (mined)    {self.verb_l2:.3f}",
            f"verbosity L3 (weaving)  {self.verb_l3:.3f}",
            f"factor L1/L2            {self.factor_orig:.3f}",
            f"factor L2/L3            {self.factor_arrow:.3f}",
            f"factor L1/L3            {self.factor_total:.3f}",
            f"compressible fraction   {self.compressible_fraction:.3f}",
            f"max compression         {self.max_compression[0]} -> {self.max_compression[1]}",
        ]
        return "\n".join(lines)

    def histogram_csv(self, which: str) -> str:
        hist = self.histogram_l1 if which == "L1" else self.histogram_l2
        rows = ["bin,count"] + [f"{k},{v}" for k, v in sorted(hist.items())]
        return "\n".join(rows) + "\n"


def run_experiment(cfg: GenConfig, n: int, cap: int = DEFAULT_CAP) -> ExperimentReport:
    """Generate n dialogs, enumerate each, mine each back, aggregate."""
    if n < 1:
        raise ValueError("need at least one sample")
    master = random.Random(cfg.seed)
    seeds = [master.randrange(2**63) for _ in range(n)]
    samples: list[tuple[int, int]] = []
    for seed in seeds:
        sub = GenConfig(
            solicitations=cfg.solicitations,
            arrow_prob=cfg.arrow_prob,
            seed=seed,
            inner=cfg.inner,
            max_children=cfg.max_children,
        )
        expr = generate_random(sub)
        spec = enumerate_episodes(expr, cap=cap)
        mined = mine(spec, cap=cap)
        samples.append((spec.size, len(mined)))

    verb_l1 = verbosity(s for s, _ in samples)
    verb_l2 = verbosity(m for _, m in samples)
    verb_l3 = verbosity([1] * n)
    best = max(samples, key=lambda t: t[0] / t[1])
    return ExperimentReport(
        n=n,
        verb_l1=verb_l1,
        verb_l2=verb_l2,
        verb_l3=verb_l3,
        factor_orig=verb_l1 / verb_l2,
        factor_arrow=verb_l2 / verb_l3,
        factor_total=verb_l1 / verb_l3,
        compressible_fraction=sum(1 for s, m in samples if m < s) / n,
        max_compression=best,
        histogram_l1=dict(Counter(s for s, _ in samples)),
        histogram_l2=dict(Counter(m for _, m in samples)),
        samples=samples,
    )
