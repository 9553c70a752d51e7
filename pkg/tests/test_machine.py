import random

from dialogweave.expr import EMPTY, solicitation_set
from dialogweave.machine import (
    TERMINAL,
    Composed,
    Hole,
    ReductionState,
    apply_context,
    candidates,
    init_state,
    is_complete,
    is_prefix,
    membership,
    print_context,
    reduce_one,
    stage_response,
    trace_path,
)
from dialogweave.syntax import Episode, parse_episode, parse_expr, parse_utterance

from genutil import gen_full_expr

GAS = "W[C[call-attendant, name], C[credit-card, octane^, receipt?]]"
BREAKFAST = "W[C[eggs^, toast], C[coffee^, cream?]]"


def frontier(expr):
    return frozenset({init_state(expr)})


def answers(text):
    return parse_utterance(text).answers


def total_arrows(e):
    from dialogweave.expr import Atom, Node, Union

    if isinstance(e, (Atom,)):
        return e.arrows
    if isinstance(e, Node):
        return e.arrows + sum(total_arrows(c) for c in e.children)
    if isinstance(e, Union):
        return total_arrows(e.left) + total_arrows(e.right)
    return 0


def state_arrows(s):
    def ctx_arrows(c):
        if isinstance(c, Hole):
            return sum(total_arrows(x) for x in c.left + c.right)
        if isinstance(c, Composed):
            return ctx_arrows(c.outer) + ctx_arrows(c.inner)
        return 0

    return total_arrows(s.current) + sum(ctx_arrows(c) for c in s.stack)


def test_init_state():
    e = parse_expr("C[a, b]")
    assert init_state(e) == ReductionState((TERMINAL,), e, ())
    assert init_state(EMPTY).current is EMPTY


def test_terminal_empty_state_is_final():
    done = ReductionState((), EMPTY, ())
    assert reduce_one(done) == ()
    # The initial empty-dialog state reaches it by one [EMPTY] pop.
    (nxt,) = reduce_one(init_state(EMPTY))
    assert nxt == done


def test_w_offers_one_successor_per_child():
    e = parse_expr("W[C[a, b], C[c, d]]")
    succ = reduce_one(init_state(e))
    assert len(succ) == 2
    currents = {s.current for s in succ}
    assert currents == set(e.children)


def test_atom_consumes_under_context():
    e = parse_expr(GAS)
    st = ReductionState((TERMINAL,), e, (answers("credit-card"),))
    # dive W -> pump sub-dialog, then C extracts credit-card, then consume
    (right,) = [s for s in reduce_one(st) if "credit-card" in solicitation_set(s.current)]
    (extracted,) = reduce_one(right)
    assert extracted.current == parse_expr("credit-card", check=False)
    (consumed,) = reduce_one(extracted)
    assert consumed.current == parse_expr("C[octane^, receipt?]", check=False)
    assert consumed.pending == ()


def test_arrow_composes_and_conserves():
    e = parse_expr(BREAKFAST)
    f = frontier(e)
    f2 = stage_response(f, answers("eggs"))
    assert f2
    for st in f2:
        # one arrow was spent consuming eggs
        assert state_arrows(st) == total_arrows(e) - 1


def test_arrow_reduces_stack_depth_by_one():
    e = parse_expr(GAS)
    # Walk to the state whose current is octane^ and apply the arrow rule.
    path = trace_path(e, parse_episode("<credit-card octane call-attendant name receipt?>"))
    before = [s for s in path if str(s.current) == str(parse_expr("octane^", check=False))]
    assert before
    st = before[0]
    (after,) = reduce_one(st)
    assert len(after.stack) == len(st.stack) - 1
    assert isinstance(after.stack[0], Composed)


def test_apply_context_simplifies():
    hole = Hole(parse_expr("C[a, b]").mnemonic, (), (parse_expr("receipt?", check=False),))
    assert apply_context(hole, EMPTY) == parse_expr("receipt?", check=False)
    assert apply_context(TERMINAL, parse_expr("C[a, b]")) is EMPTY
    comp = Composed(TERMINAL, hole)
    assert apply_context(comp, EMPTY) is EMPTY


def test_stage_response_examples():
    gas = parse_expr(GAS)
    assert stage_response(frontier(gas), answers("credit-card"))
    assert stage_response(frontier(gas), answers("call-attendant"))
    assert not stage_response(frontier(gas), answers("octane"))
    assert not stage_response(frontier(parse_expr("C[a, b]")), answers("b"))
    bk = parse_expr(BREAKFAST)
    assert stage_response(frontier(bk), answers("coffee"))


def test_is_complete():
    assert is_complete(frozenset({ReductionState((TERMINAL,), EMPTY, ())}))
    assert not is_complete(frontier(parse_expr("C[a, b]")))
    assert not is_complete(frozenset())
    gas = parse_expr(GAS)
    f = frontier(gas)
    for turn in "credit-card octane call-attendant name receipt?".split():
        f = stage_response(f, answers(turn))
    assert is_complete(f)
    assert is_complete(f, strict=True)


def test_membership_examples():
    gas = parse_expr(GAS)
    assert membership(gas, parse_episode("<credit-card octane call-attendant name receipt?>"))
    bk = parse_expr(BREAKFAST)
    assert not membership(bk, parse_episode("<cream? eggs coffee toast>"))
    assert membership(EMPTY, Episode(()))
    assert not membership(parse_expr("C[a, b]"), Episode(()))


def test_is_prefix_examples():
    c = parse_expr("C[a, b, c]")
    assert is_prefix(c, [parse_utterance("a")])
    assert not is_prefix(c, [parse_utterance("b")])
    w = parse_expr("W[SPE'[size^, blend], type-of-milk]")
    assert is_prefix(w, [parse_utterance("size"), parse_utterance("type-of-milk")])


def test_candidates_examples():
    gas = parse_expr(GAS)
    got = candidates(frontier(gas), solicitation_set(gas))
    assert got == {frozenset({"credit-card"}), frozenset({"call-attendant"})}
    c = parse_expr("C[a, b]")
    assert candidates(frontier(c), solicitation_set(c)) == {frozenset({"a"})}
    pe = parse_expr("PE*[a, b]")
    assert candidates(frontier(pe), solicitation_set(pe)) == {
        frozenset({"a"}),
        frozenset({"b"}),
        frozenset({"a", "b"}),
    }


def test_candidates_agree_with_stage_response():
    for i in range(40):
        e = gen_full_expr(random.Random(800 + i), max_names=4)
        f = frontier(e)
        cands = candidates(f, solicitation_set(e))
        for u in cands:
            assert stage_response(f, u)


def test_stuck_arrow_dies_silently():
    # An arrow with a single context below it has nothing to compose with.
    st = ReductionState((TERMINAL,), parse_expr("x^", check=False), (frozenset({"x"}),))
    assert reduce_one(st) == ()


def test_pending_never_grows():
    e = parse_expr(BREAKFAST)
    st = ReductionState((TERMINAL,), e, tuple(answers(t) for t in "eggs toast coffee cream?".split()))
    seen, stack = set(), [st]
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        for nxt in reduce_one(s):
            assert len(nxt.pending) <= len(s.pending)
            stack.append(nxt)


def test_suspension_rewrites_the_remaining_dialog():
    # After the opening answer, the suspended state behaves exactly like
    # the re-nested expression: the chain continues to the arrow, then the
    # weave resumes.
    original = parse_expr(
        "W[C[rewards-id, credit-card, octane^, car-wash?, receipt?], C[call-attendant, name]]"
    )
    rewritten = parse_expr(
        "C[credit-card, octane, W[C[car-wash?, receipt?], C[call-attendant, name]]]"
    )
    from dialogweave.episodes import enumerate_episodes

    suffixes = {
        Episode(ep.turns[1:])
        for ep in enumerate_episodes(original).episodes
        if ep.turns[0].answers == frozenset({"rewards-id"})
    }
    assert suffixes == set(enumerate_episodes(rewritten).episodes)

    f = stage_response(frontier(original), answers("rewards-id"))
    assert candidates(f) == {frozenset({"credit-card"})}


def test_print_context_forms():
    e = parse_expr(GAS)
    path = trace_path(e, parse_episode("<credit-card octane call-attendant name receipt?>"))
    rendered = [tuple(print_context(c) for c in s.stack) for s in path]
    assert ("C[@, octane^, receipt?]", "W[C[call-attendant, name], @]", "~") in rendered
    assert any("." in ctx for row in rendered for ctx in row)  # the composed constructor
