import random
from itertools import combinations

import pytest

from dialogweave.episodes import enumerate_episodes
from dialogweave.expr import Mnemonic, Node, solicitation_set
from dialogweave.machine import membership
from dialogweave.staging import Advanced, Rejected, run_episode, stage
from dialogweave.syntax import (
    Episode,
    Utterance,
    parse_episode,
    parse_expr,
    parse_utterance,
    print_expr,
)

from genutil import gen_basic_expr, random_turn_sequences


def staged(expr_text, utt_text):
    outcome = stage(parse_expr(expr_text, check=False), parse_utterance(utt_text))
    assert isinstance(outcome, Advanced), outcome
    return print_expr(outcome.next)


def rejected(expr_text, utt_text):
    outcome = stage(parse_expr(expr_text, check=False), parse_utterance(utt_text))
    return isinstance(outcome, Rejected)


def test_flight_examples():
    assert staged(
        "C[departure-time, PE*[from, to], first-class?]", "departure-time"
    ) == "C[PE*[from, to], first-class?]"
    assert rejected("C[departure-time, PE*[from, to], first-class?]", "from")


def test_grouped_utterance_through_c():
    assert staged(
        "C[PE*[size, blend, type-of-milk], rewards-id, receipt?]",
        "{size, blend, type-of-milk}",
    ) == "C[rewards-id, receipt?]"


def test_atom_rule():
    assert staged("a", "a") == "~"
    assert rejected("a", "b")


def test_pe_requires_proper_subset():
    # Brute-force the side condition: every proper non-empty subset advances,
    # the full set does not.
    e = parse_expr("PE[a, b, c]")
    names = sorted(solicitation_set(e))
    for r in range(1, 4):
        for combo in combinations(names, r):
            outcome = stage(e, Utterance(frozenset(combo)))
            if set(combo) == set(names):
                assert isinstance(outcome, Rejected)
            else:
                assert isinstance(outcome, Advanced)


def test_pe_star_permits_full_set():
    assert staged("PE*[a, b, c]", "{a, b, c}") == "~"


def test_spe_prime_wraps_with_c():
    # Entering a sub-dialog forces it to finish before the rest resumes.
    out = staged("SPE'[rewards-id, SPE'[size, blend], receipt?]", "size")
    assert out == "C[blend, SPE'[rewards-id, receipt?]]"


def test_union_staging():
    both = stage(parse_expr("C[a, b] | C[a, c]", check=False), parse_utterance("a"))
    assert isinstance(both, Advanced)
    assert print_expr(both.next) == "b | c"
    one = stage(parse_expr("C[a, b] | C[c, a]", check=False), parse_utterance("c"))
    assert isinstance(one, Advanced)
    assert print_expr(one.next) == "a"  # the losing side drops, the rest canonicalizes
    neither = stage(parse_expr("C[a, b] | C[c, a]", check=False), parse_utterance("b"))
    assert isinstance(neither, Rejected)


def test_pfa_family():
    assert staged("PFA1[a, b, c]", "a") == "I[b, c]"
    assert rejected("PFA1[a, b, c]", "b")
    assert staged("PFA1*[a, b, c]", "a") == "PFA1*[b, c]"
    assert staged("PFA1*[a, b, c]", "{a, b, c}") == "~"
    assert staged("PFAn[a, b, c]", "{a, b}") == "c"
    assert rejected("PFAn[a, b, c]", "{a, c}")
    assert staged("PFAn*[a, b, c]", "a") == "PFAn*[b, c]"


def test_subdialog_bearing_pfa1_is_inert():
    assert rejected("PFA1[PE*[a, b], c]", "a")
    assert rejected("PFA1[PE*[a, b], c]", "{a, b}")


def test_arrow_and_w_refused():
    with pytest.raises(ValueError):
        stage(parse_expr("W[C[a^, b], c]", check=False), parse_utterance("a"))
    with pytest.raises(ValueError):
        run_episode(parse_expr("W[a, b]", check=False), parse_episode("<a b>"))


def test_run_episode_examples():
    assert run_episode(parse_expr("C[a, b, c]"), parse_episode("<a b c>"))
    assert not run_episode(parse_expr("C[a, b, c]"), parse_episode("<b a c>"))
    assert run_episode(parse_expr("PE*[a, b, c]"), parse_episode("<{a, b} c>"))


def test_rejection_reasons_are_structured():
    out = stage(parse_expr("C[a, b]"), parse_utterance("zzz"))
    assert isinstance(out, Rejected)
    assert out.rule == "unknown-name" and "zzz" in out.reason
    out = stage(parse_expr("C[a, b]"), parse_utterance("b"))
    assert out.rule == "C"


def test_progress_consumes_exactly_the_utterance():
    from dialogweave.expr import Union

    def union_free(e):
        if isinstance(e, Union):
            return False
        if isinstance(e, Node):
            return all(union_free(c) for c in e.children)
        return True

    for i in range(120):
        rng = random.Random(1300 + i)
        e = gen_basic_expr(rng, max_names=5)
        spec = enumerate_episodes(e)
        for ep in list(spec.episodes)[:4]:
            current = e
            for turn in ep.turns:
                out = stage(current, turn)
                assert isinstance(out, Advanced)
                remaining = solicitation_set(current) - turn.answers
                if union_free(current):
                    assert solicitation_set(out.next) == remaining
                else:
                    assert solicitation_set(out.next) <= remaining
                current = out.next
            assert print_expr(current) == "~"


def test_spe_prime_at_most_one_child_stages():
    for i in range(100):
        e = gen_basic_expr(random.Random(2200 + i), max_names=5)
        stack = [e]
        while stack:
            node = stack.pop()
            if isinstance(node, Node):
                stack.extend(node.children)
                if node.mnemonic is Mnemonic.SPE_PRIME:
                    for name in solicitation_set(node):
                        hits = [
                            c
                            for c in node.children
                            if isinstance(stage(c, Utterance(frozenset({name}))), Advanced)
                        ]
                        assert len(hits) <= 1


def test_union_concurrency_law():
    rng = random.Random(99)
    for i in range(60):
        a = gen_basic_expr(random.Random(3000 + i), max_names=3)
        b = gen_basic_expr(random.Random(4000 + i), max_names=3)
        u = parse_expr(f"{print_expr(a)} | {print_expr(b)}", check=False)
        for seq in random_turn_sequences(rng, solicitation_set(u), 4):
            turn = Utterance(seq[0])
            ua = stage(a, turn)
            ub = stage(b, turn)
            uu = stage(u, turn)
            assert isinstance(uu, Advanced) == (
                isinstance(ua, Advanced) or isinstance(ub, Advanced)
            )
            if isinstance(ua, Advanced) and isinstance(ub, Advanced):
                got = enumerate_episodes(uu.next).episodes
                want = enumerate_episodes(ua.next).episodes | enumerate_episodes(ub.next).episodes
                assert got == want


def test_extension_soundness_small():
    # run_episode agrees with the enumerated extension and the machine.
    for i in range(80):
        rng = random.Random(6000 + i)
        e = gen_basic_expr(rng, max_names=4)
        spec = enumerate_episodes(e)
        for ep in spec.episodes:
            assert run_episode(e, ep)
        for seq in random_turn_sequences(rng, solicitation_set(e), 5):
            try:
                ep = Episode(tuple(Utterance(s) for s in seq))
            except ValueError:
                continue
            inside = ep in spec.episodes
            assert run_episode(e, ep) == inside == membership(e, ep)
