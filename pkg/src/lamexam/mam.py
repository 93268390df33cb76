"""The Milner Abstract Machine for weak head reduction.

Also hosts the global-environment helpers shared with the extended MAM and
the EXAM: environments are tuples of ``(name, term)`` pairs, most recent
entry first, and read-back substitutes them front to back.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

from .syntax import App, Lam, Name, NameSupply, Term, free_vars, pretty, rename_fresh, subst
from .trace import FINAL, FUEL_EXHAUSTED, Label, Trace, TraceStep

Stack = Tuple[Term, ...]
Env = Tuple[Tuple[Name, Term], ...]

EMPTY = "ε"


def env_lookup(env: Env, x: Name) -> Optional[Term]:
    for y, t in env:
        if y == x:
            return t
    return None


def env_dom(env: Env) -> frozenset:
    return frozenset(x for x, _ in env)


def apply_env(t: Term, env: Env) -> Term:
    """``t↓E``: substitute the entries of ``env`` into ``t``, most recent first."""
    if not env:
        return t
    fv = free_vars(t)
    for x, u in env:
        if x in fv:
            t = subst(t, x, u)
            fv = (fv - {x}) | free_vars(u)
    return t


def unwind(t: Term, stack: Iterable[Term]) -> Term:
    """``t↓S``: apply ``t`` to the stack items, top first."""
    for u in stack:
        t = App(t, u)
    return t


def readback_pair(t: Term, stack: Stack, env: Env) -> Term:
    return unwind(apply_env(t, env), (apply_env(u, env) for u in stack))


def render_stack(stack: Stack, name: Callable = str) -> str:
    if not stack:
        return EMPTY
    return " : ".join(pretty(u, name=name) for u in stack)


def render_env(env: Env, name: Callable = str) -> str:
    if not env:
        return EMPTY
    return " : ".join(f"[{name(x)}:={pretty(u, name=name)}]" for x, u in env)


@dataclass(frozen=True)
class MamState:
    active: Term
    stack: Stack = ()
    env: Env = ()
    supply: NameSupply = NameSupply()

    def snapshot(self) -> dict:
        return {"term": pretty(self.active), "stack": render_stack(self.stack), "env": render_env(self.env)}


def mam_init(t: Term, supply: Optional[NameSupply] = None) -> MamState:
    active, supply = rename_fresh(t, supply or NameSupply.above(t))
    return MamState(active, (), (), supply)


def mam_step(s: MamState) -> Optional[Tuple[Label, MamState]]:
    """One transition, or ``None`` when the state is final."""
    t = s.active
    if isinstance(t, App):
        return Label.SEA_APP, MamState(t.fun, (t.arg,) + s.stack, s.env, s.supply)
    if isinstance(t, Lam):
        if not s.stack:
            return None
        return Label.BETA, MamState(t.body, s.stack[1:], ((t.binder, s.stack[0]),) + s.env, s.supply)
    u = env_lookup(s.env, t.name)
    if u is None:
        return None
    copy, supply = rename_fresh(u, s.supply)
    return Label.SUB, MamState(copy, s.stack, s.env, supply)


def mam_readback(s: MamState) -> Term:
    return readback_pair(s.active, s.stack, s.env)


def mam_run(t: Term, fuel: int = 10_000, keep_states: bool = False, snapshots: bool = False) -> Trace:
    s = mam_init(t)
    trace = Trace(machine="mam", initial=t, fuel=fuel)
    if keep_states:
        trace.states.append(s)
    while True:
        nxt = mam_step(s)
        if nxt is None:
            trace.outcome = FINAL
            trace.result = mam_readback(s)
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
