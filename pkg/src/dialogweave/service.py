"""Stateless HTTP facade.

Every handler is a pure function of the request body.  Session state
travels inside the SessionSnapshot: the server re-derives the frontier by
replaying the transcript against the spec, so identical snapshot plus
utterance always produces an identical response and any instance can
serve any request.

Status codes: 400 malformed input (syntax errors included); 422 a parsed
expression violating the structural restrictions (body lists rule ids and
node paths); 409 an utterance the current frontier rejects.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import miner
from .episodes import (
    DEFAULT_CAP,
    EnumerationCapExceeded,
    difference_witness,
    enumerate_episodes,
)
from .expr import Atom, DialogExpr, Empty, Node
from .machine import (
    Frontier,
    candidates,
    init_state,
    is_complete,
    stage_response,
    state_to_dict,
)
from .simplify import canonicalize
from .syntax import (
    DialogSyntaxError,
    Utterance,
    ValidationFailure,
    parse_episode,
    parse_expr,
    parse_spec_file,
    parse_utterance,
    print_episode,
    print_expr,
    print_utterance,
)


class ExprBody(BaseModel):
    expr: str


class EquivBody(BaseModel):
    left: str
    right: str
    cap: int = DEFAULT_CAP


class EnumBody(BaseModel):
    expr: str
    cap: int = DEFAULT_CAP


class MineBody(BaseModel):
    episodes: list[str]
    cap: int = DEFAULT_CAP


class InitBody(BaseModel):
    spec: str


class Snapshot(BaseModel):
    spec: str
    transcript: list[str] = Field(default_factory=list)
    frontier: list[dict[str, Any]] = Field(default_factory=list)
    complete: bool = False
    candidates: list[str] = Field(default_factory=list)


class StepBody(BaseModel):
    snapshot: Snapshot
    utterance: str


class SnapshotBody(BaseModel):
    snapshot: Snapshot


def expr_tree(e: DialogExpr) -> dict[str, Any]:
    """Structured AST for clients that want more than the printed string."""
    if isinstance(e, Empty):
        return {"kind": "empty"}
    if isinstance(e, Atom):
        return {"kind": "atom", "name": e.name, "arrows": e.arrows}
    if isinstance(e, Node):
        return {
            "kind": "node",
            "mnemonic": e.mnemonic.value,
            "arrows": e.arrows,
            "children": [expr_tree(c) for c in e.children],
        }
    return {"kind": "union", "left": expr_tree(e.left), "right": expr_tree(e.right)}


def _parse(text: str) -> DialogExpr:
    try:
        return parse_expr(text)
    except ValidationFailure as exc:
        raise HTTPException(
            status_code=422,
            detail={
                "violations": [
                    {"rule": v.rule, "path": list(v.path), "message": v.message}
                    for v in exc.report.violations
                ]
            },
        ) from None
    except DialogSyntaxError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def _parse_utterance(text: str) -> Utterance:
    try:
        return parse_utterance(text)
    except DialogSyntaxError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def build_app(strict_complete: bool = False) -> FastAPI:
    app = FastAPI(title="dialogweave", version="0.1.0")
    # The browser runner may be served from another origin; handlers hold
    # no state and no credentials, so a blanket allowance is safe here.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def replay(snapshot: Snapshot) -> tuple[DialogExpr, Frontier, list[Utterance]]:
        expr = _parse(snapshot.spec)
        frontier: Frontier = frozenset({init_state(expr)})
        turns = [_parse_utterance(t) for t in snapshot.transcript]
        for turn in turns:
            frontier = stage_response(frontier, turn.answers)
            if not frontier:
                raise HTTPException(
                    status_code=400, detail="snapshot transcript does not replay"
                )
        return expr, frontier, turns

    def snapshot_of(expr: DialogExpr, frontier: Frontier, turns: list[Utterance]) -> Snapshot:
        cands = candidates(frontier)
        return Snapshot(
            spec=print_expr(expr),
            transcript=[print_utterance(t) for t in turns],
            frontier=[state_to_dict(s) for s in sorted(frontier, key=repr)],
            complete=is_complete(frontier, strict=strict_complete),
            candidates=sorted(print_utterance(Utterance(u)) for u in cands),
        )

    @app.post("/parse")
    def parse(body: ExprBody):
        expr = _parse(body.expr)
        return {"expr": print_expr(expr), "tree": expr_tree(expr)}

    @app.post("/canon")
    def canon_endpoint(body: ExprBody):
        expr = _parse(body.expr)
        trace = canonicalize(expr)
        return {
            "expr": print_expr(trace.result),
            "tree": expr_tree(trace.result),
            "trace": [
                {
                    "rule": s.rule,
                    "path": list(s.path),
                    "before": print_expr(s.before),
                    "after": print_expr(s.after),
                }
                for s in trace.steps
            ],
        }

    @app.post("/enum")
    def enum_endpoint(body: EnumBody):
        expr = _parse(body.expr)
        try:
            spec = enumerate_episodes(expr, cap=body.cap)
        except EnumerationCapExceeded as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {
            "universe": sorted(spec.universe),
            "episodes": sorted(print_episode(ep) for ep in spec.episodes),
        }

    @app.post("/equiv")
    def equiv_endpoint(body: EquivBody):
        left = _parse(body.left)
        right = _parse(body.right)
        try:
            witness = difference_witness(left, right, cap=body.cap)
        except EnumerationCapExceeded as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {
            "equivalent": witness is None,
            "witness": None if witness is None else print_episode(witness),
        }

    @app.post("/mine")
    def mine_endpoint(body: MineBody):
        try:
            spec = parse_spec_file("\n".join(body.episodes))
        except DialogSyntaxError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        try:
            exprs = miner.mine(spec, cap=body.cap)
        except EnumerationCapExceeded as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {"exprs": [print_expr(e) for e in exprs]}

    @app.post("/session/init")
    def session_init(body: InitBody):
        expr = _parse(body.spec)
        frontier: Frontier = frozenset({init_state(expr)})
        return snapshot_of(expr, frontier, [])

    @app.post("/session/step")
    def session_step(body: StepBody):
        expr, frontier, turns = replay(body.snapshot)
        turn = _parse_utterance(body.utterance)
        nxt = stage_response(frontier, turn.answers)
        if not nxt:
            cands = candidates(frontier)
            raise HTTPException(
                status_code=409,
                detail={
                    "reason": f"{print_utterance(turn)} is not answerable now",
                    "utterance": print_utterance(turn),
                    "candidates": sorted(print_utterance(Utterance(u)) for u in cands),
                },
            )
        return snapshot_of(expr, nxt, turns + [turn])

    @app.post("/session/candidates")
    def session_candidates(body: SnapshotBody):
        _, frontier, _ = replay(body.snapshot)
        cands = candidates(frontier)
        return {
            "utterances": sorted(print_utterance(Utterance(u)) for u in cands),
            "complete": is_complete(frontier, strict=strict_complete),
        }

    return app
