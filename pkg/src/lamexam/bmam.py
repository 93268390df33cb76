"""Extended MAM computing strong normal forms by backtracking.

It walks back out of every finished sub-term through a dump of saved
application frames.  Used as the differential baseline for the EXAM.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .mam import Env, Stack, env_lookup, render_env, render_stack
from .syntax import App, Lam, Name, NameSupply, Term, pretty, rename_fresh
from .trace import FINAL, FUEL_EXHAUSTED, Label, Trace, TraceStep

AbsStack = Tuple[Name, ...]
Frame = Tuple[AbsStack, Term, Stack]
Dump = Tuple[Frame, ...]


class Phase(Enum):
    EVAL = "▼"
    BACKTRACK = "▲"


@dataclass(frozen=True)
class BmamState:
    abs: AbsStack
    active: Term
    stack: Stack
    dump: Dump
    env: Env
    phase: Phase
    supply: NameSupply

    def is_final(self) -> bool:
        return self.phase is Phase.BACKTRACK and not self.stack and not self.abs and not self.dump

    def snapshot(self) -> dict:
        frames = " : ".join(
            f"({' '.join(map(str, a)) or 'ε'}, {pretty(t)}, {render_stack(s)})" for a, t, s in self.dump
        )
        return {
            "abs": " ".join(map(str, self.abs)) or "ε",
            "term": pretty(self.active),
            "stack": render_stack(self.stack),
            "dump": frames or "ε",
            "env": render_env(self.env),
            "phase": self.phase.value,
        }


def bmam_init(t: Term, supply: Optional[NameSupply] = None) -> BmamState:
    active, supply = rename_fresh(t, supply or NameSupply.above(t))
    return BmamState((), active, (), (), (), Phase.EVAL, supply)


def bmam_step(s: BmamState) -> Optional[Tuple[Label, BmamState]]:
    t = s.active
    if s.phase is Phase.EVAL:
        if isinstance(t, App):
            return Label.SEA_APP, _with(s, active=t.fun, stack=(t.arg,) + s.stack)
        if isinstance(t, Lam):
            if s.stack:
                env = ((t.binder, s.stack[0]),) + s.env
                return Label.BETA, _with(s, active=t.body, stack=s.stack[1:], env=env)
            return Label.SEA_LAM, _with(s, abs=s.abs + (t.binder,), active=t.body)
        u = env_lookup(s.env, t.name)
        if u is not None:
            copy, supply = rename_fresh(u, s.supply)
            return Label.SUB, _with(s, active=copy, supply=supply)
        return Label.DOWN_UP, _with(s, phase=Phase.BACKTRACK)

    if s.stack:
        # arguments are evaluated with an empty abstraction stack; the saved
        # frame restores the outer one when backtracking out
        frame = (s.abs, t, s.stack[1:])
        return Label.UP_DOWN, BmamState((), s.stack[0], (), (frame,) + s.dump, s.env, Phase.EVAL, s.supply)
    if s.abs:
        return Label.UP_LAM, _with(s, abs=s.abs[:-1], active=Lam(s.abs[-1], t))
    if s.dump:
        (outer, head, rest), dump = s.dump[0], s.dump[1:]
        return Label.UP_APP, BmamState(outer, App(head, t), rest, dump, s.env, Phase.BACKTRACK, s.supply)
    return None


def _with(s: BmamState, **changes) -> BmamState:
    fields = dict(abs=s.abs, active=s.active, stack=s.stack, dump=s.dump, env=s.env, phase=s.phase, supply=s.supply)
    fields.update(changes)
    return BmamState(**fields)


def bmam_result(s: BmamState) -> Term:
    if not s.is_final():
        raise ValueError("bmam_result needs a final state")
    return s.active


def bmam_run(t: Term, fuel: int = 10_000, keep_states: bool = False, snapshots: bool = False) -> Trace:
    s = bmam_init(t)
    trace = Trace(machine="bmam", initial=t, fuel=fuel)
    if keep_states:
        trace.states.append(s)
    while True:
        nxt = bmam_step(s)
        if nxt is None:
            trace.outcome = FINAL
            trace.result = bmam_result(s)
            break
        if len(trace.steps) >= fuel:
            trace.outcome = FUEL_EXHAUSTED
            break
        label, s2 = nxt
        trace.steps.append(TraceStep(label, snapshot=s.snapshot() if snapshots else None))
        s = s2
        if keep_states:
            trace.states.append(s)
    if snapshots:
        trace.final_snapshot = s.snapshot()
    return trace
