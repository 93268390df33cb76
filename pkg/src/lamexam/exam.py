"""The EXternal Abstract Machine.

A state is an approximant (a named multi-context holding the stable part
of the normal form), a pool of named MAM jobs, one per hole, a global
environment shared by all jobs, and the fresh-name supply.  The machine
is parametric in the pool template, which decides the evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .mam import Env, env_dom, env_lookup, readback_pair, render_env, render_stack
from .pools import Chooser, Job, Pool, make_pool
from .syntax import (
    Address, App, Hole, HoleName, Lam, MultiCtx, Name, NameSupply, Term, Var,
    binders, free_vars, hole_names, plug, plug_many, pretty, rename_fresh, subterm_at,
)
from .trace import FINAL, FUEL_EXHAUSTED, Label, Trace, TraceStep

OVERHEAD_LABELS = frozenset({Label.SEA_APP, Label.SUB, Label.SEA_LAM, Label.SEA_VAR})


@dataclass(frozen=True)
class ExamState:
    approximant: MultiCtx
    pool: Pool
    env: Env = ()
    supply: NameSupply = NameSupply()


# --------------------------------------------------------------------------
# approximants

def is_approximant(c: MultiCtx) -> bool:
    """``B ::= ⟨·⟩ | S | λx.B`` and ``S ::= x | S B``: holes never applied."""
    while isinstance(c, Lam):
        c = c.body
    if isinstance(c, Hole):
        return True
    return _is_rigid(c)


def _is_rigid(c: MultiCtx) -> bool:
    while isinstance(c, App):
        if not is_approximant(c.arg):
            return False
        c = c.fun
    return isinstance(c, Var)


# --------------------------------------------------------------------------
# transitions

def exam_init(t: Term, template: str = "set", seed: int = 0, chooser: Optional[Chooser] = None) -> ExamState:
    alpha, supply = NameSupply.above(t).fresh_hole()
    term, supply = rename_fresh(t, supply)
    pool = make_pool(template, Job(alpha, term), seed=seed, chooser=chooser)
    return ExamState(Hole(alpha), pool, (), supply)


def job_label(job: Job, env: Env) -> Label:
    t = job.term
    if isinstance(t, App):
        return Label.SEA_APP
    if isinstance(t, Lam):
        return Label.BETA if job.stack else Label.SEA_LAM
    return Label.SUB if env_lookup(env, t.name) is not None else Label.SEA_VAR


def enabled(s: ExamState) -> List[Tuple[HoleName, Label]]:
    return [(n, job_label(s.pool.job(n), s.env)) for n in s.pool.selectable()]


def redex_address(job: Job) -> Address:
    """Address, in the read-back, of the redex a beta step on ``job`` contracts."""
    return job.address + ("l",) * (len(job.stack) - 1)


def exam_step(s: ExamState, pick: HoleName) -> Tuple[Label, ExamState]:
    job, rest = s.pool.select(pick)
    t, stack = job.term, job.stack
    label = job_label(job, s.env)
    if label is Label.SEA_APP:
        moved = replace(job, term=t.fun, stack=(t.arg,) + stack)
        return label, replace(s, pool=rest.drop(moved))
    if label is Label.BETA:
        moved = replace(job, term=t.body, stack=stack[1:])
        env = ((t.binder, stack[0]),) + s.env
        return label, replace(s, pool=rest.drop(moved), env=env)
    if label is Label.SUB:
        copy, supply = rename_fresh(env_lookup(s.env, t.name), s.supply)
        moved = replace(job, term=copy)
        return label, replace(s, pool=rest.drop(moved), supply=supply)
    if label is Label.SEA_LAM:
        moved = replace(job, term=t.body, address=job.address + ("λ",))
        approx = plug(s.approximant, pick, Lam(t.binder, Hole(pick)))
        return label, replace(s, approximant=approx, pool=rest.drop(moved))
    # sea_var: the job is over; its arguments become new jobs
    n = len(stack)
    names, supply = s.supply.fresh_holes(n)
    spine: MultiCtx = Var(t.name)
    for b in names:
        spine = App(spine, Hole(b))
    children = [
        Job(b, u, (), job.address + ("l",) * (n - 1 - i) + ("r",))
        for i, (b, u) in enumerate(zip(names, stack))
    ]
    approx = plug(s.approximant, pick, spine)
    return label, replace(s, approximant=approx, pool=rest.add_list(children), supply=supply)


def is_final(s: ExamState) -> bool:
    return not s.pool.names()


def successors(s: ExamState) -> List[Tuple[HoleName, Label, ExamState]]:
    out = []
    for n, _ in enabled(s):
        label, s2 = exam_step(s, n)
        out.append((n, label, s2))
    return out


# --------------------------------------------------------------------------
# read-back

def job_readback(job: Job, env: Env) -> Term:
    return readback_pair(job.term, job.stack, env)


def exam_readback(s: ExamState) -> MultiCtx:
    fillers = {j.name: job_readback(j, s.env) for j in s.pool.support()}
    return plug_many(s.approximant, fillers)


def subterm_at_state(s: ExamState, a: Address) -> Optional[Tuple[str, str]]:
    """Constructor tags at ``a`` in the approximant and in the read-back."""
    here = subterm_at(s.approximant, a)
    if here is None:
        return None
    there = subterm_at(exam_readback(s), a)
    return _tag(here), (_tag(there) if there is not None else "⊥")


def _tag(t: MultiCtx) -> str:
    return {Var: "var", Lam: "lam", App: "app", Hole: "hole"}[type(t)]


# --------------------------------------------------------------------------
# invariants

@dataclass
class InvariantReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


class _EnvSummary:
    """What the invariant clauses need to know about an environment.

    Environments only grow at the front along a run, so a summary can be
    extended entry by entry instead of rescanned at every state.
    """

    def __init__(self) -> None:
        self.entries: Env = ()
        self.dom: set = set()
        self.bindings: set = set()  # entry names and binders inside entry terms
        self.term_binders: set = set()
        self.fv: set = set()
        self.repeated = False
        self.scope_broken = False
        self.order_broken = False

    @classmethod
    def of(cls, env: Env) -> "_EnvSummary":
        summary = cls()
        for entry in reversed(env):
            summary.push(entry)
        return summary

    def push(self, entry: Tuple[Name, Term]) -> None:
        x, u = entry
        inner = list(binders(u))
        fv = free_vars(u)
        fresh = inner + [x]
        if len(set(fresh)) < len(fresh) or not self.bindings.isdisjoint(fresh):
            self.repeated = True
        if not fv.isdisjoint(self.term_binders) or not fv.isdisjoint(inner) or not self.fv.isdisjoint(inner):
            self.scope_broken = True
        # a name bound by an entry may not occur in that entry or in any older one
        if x in fv or x in self.fv:
            self.order_broken = True
        self.bindings.update(fresh)
        self.term_binders.update(inner)
        self.fv |= fv
        self.dom.add(x)
        self.entries = (entry,) + self.entries

    def follow(self, env: Env) -> "_EnvSummary":
        """Summary of ``env``, reusing this one when ``env`` extends it at the front."""
        extra = len(env) - len(self.entries)
        if extra >= 0 and (not self.entries or env[extra] is self.entries[0]):
            for entry in reversed(env[:extra]):
                self.push(entry)
            return self
        return _EnvSummary.of(env)


class _TermFacts:
    """Binders and free variables of terms, remembered per term object.

    Stack items and environment entries are shared between the states of a
    run, so one cache serves a whole trace.
    """

    def __init__(self) -> None:
        self.memo: Dict[int, Tuple[MultiCtx, int, frozenset, frozenset]] = {}

    def __call__(self, t: MultiCtx) -> Tuple[int, frozenset, frozenset]:
        hit = self.memo.get(id(t))
        if hit is None or hit[0] is not t:
            bs = list(binders(t))
            hit = (t, len(bs), frozenset(bs), free_vars(t))
            self.memo[id(t)] = hit
        return hit[1:]


def validate_invariants(
    s: ExamState, env_summary: Optional[_EnvSummary] = None, facts: Optional[_TermFacts] = None
) -> InvariantReport:
    report = InvariantReport()
    env = env_summary if env_summary is not None else _EnvSummary.of(s.env)
    facts = facts if facts is not None else _TermFacts()
    jobs = s.pool.support()
    holes = hole_names(s.approximant)

    if len(holes) != len(set(holes)):
        report.violations.append("uniqueness")

    count, job_binders, job_fv = 0, set(), set()
    for j in jobs:
        for t in (j.term,) + j.stack:
            n, bs, fv = facts(t)
            count += n
            job_binders |= bs
            job_fv |= fv
    outer = list(binders(s.approximant))
    repeated = (
        env.repeated
        or count != len(job_binders)
        or len(outer) != len(set(outer))
        or not job_binders.isdisjoint(outer)
        or not env.bindings.isdisjoint(outer)
        or not env.bindings.isdisjoint(job_binders)
    )
    if repeated:
        report.violations.append("freshness")

    if set(holes) != set(s.pool.names()) or len(jobs) != len(s.pool.names()):
        report.violations.append("bijection")

    outer_fv = free_vars(s.approximant)
    if not outer_fv.isdisjoint(env.dom):
        report.violations.append("freeness")

    # a binder in a job or in the environment may occur only inside its own body
    scoped = job_binders | env.term_binders
    if (
        env.scope_broken
        or env.order_broken
        or not env.fv.isdisjoint(job_binders)
        or not job_fv.isdisjoint(scoped)
        or not outer_fv.isdisjoint(scoped)
    ):
        report.violations.append("local scope")
    return report


def trace_invariant_violations(states: Sequence[ExamState]) -> List[Tuple[int, List[str]]]:
    """``validate_invariants`` at every state of a run, sharing the environment work."""
    out = []
    summary, facts = _EnvSummary(), _TermFacts()
    for i, s in enumerate(states):
        summary = summary.follow(s.env)
        report = validate_invariants(s, summary, facts)
        if not report.ok:
            out.append((i, report.violations))
    return out


# --------------------------------------------------------------------------
# overhead measure

def _check_acyclic(env: Env) -> None:
    deps = {x: free_vars(u) for x, u in env}
    done, active = set(), set()

    def visit(x: Name) -> None:
        if x in done:
            return
        if x in active:
            raise ValueError("cyclic environment")
        active.add(x)
        for y in deps.get(x, ()):
            if y in deps:
                visit(y)
        active.discard(x)
        done.add(x)

    for x in deps:
        visit(x)


def job_measure(term: Term, stack: Sequence[Term], env: Env) -> int:
    _check_acyclic(env)
    lookup = {}
    for x, u in reversed(env):
        lookup[x] = u

    memo: Dict[int, int] = {}

    def m(t: Term, stack: Tuple[Term, ...]) -> int:
        if not stack:
            key = id(t)
            if key not in memo:
                memo[key] = _m(t, ())
            return memo[key]
        return _m(t, stack)

    def _m(t: Term, stack: Tuple[Term, ...]) -> int:
        if isinstance(t, Lam):
            if stack:
                return 0
            return 1 + m(t.body, ())
        if isinstance(t, App):
            return 1 + m(t.fun, (t.arg,) + stack)
        u = lookup.get(t.name)
        if u is not None:
            return 1 + m(u, stack)
        return 1 + sum(m(a, ()) for a in stack)

    return m(term, tuple(stack))


def overhead_measure(s: ExamState) -> int:
    return sum(job_measure(j.term, j.stack, s.env) for j in s.pool.support())


def is_o_normal(s: ExamState) -> bool:
    """No overhead transition applies to any job in the pool."""
    return all(job_label(j, s.env) is Label.BETA for j in s.pool.support())


# --------------------------------------------------------------------------
# equivalence of states

def _dependent(a: Tuple[Name, Term], b: Tuple[Name, Term]) -> bool:
    (x, t), (y, u) = a, b
    return x in free_vars(u) or y in free_vars(t)


def env_canonical(env: Env) -> Env:
    """Least representative (by name) of the class of ``env`` under independent swaps."""
    remaining = list(env)
    out = []
    while remaining:
        best = None
        for i, entry in enumerate(remaining):
            if any(_dependent(prev, entry) for prev in remaining[:i]):
                continue
            key = (entry[0], pretty(entry[1]))
            if best is None or key < best[0]:
                best = (key, i)
        out.append(remaining.pop(best[1]))
    return tuple(out)


def env_equiv(e1: Env, e2: Env) -> bool:
    return env_canonical(e1) == env_canonical(e2)


class _Renaming:
    """Bijection between the bound names and holes of two states."""

    def __init__(self) -> None:
        self.fwd: Dict[object, object] = {}
        self.bwd: Dict[object, object] = {}

    def bind(self, a, b) -> bool:
        if a in self.fwd or b in self.bwd:
            return self.fwd.get(a) == b and self.bwd.get(b) == a
        self.fwd[a] = b
        self.bwd[b] = a
        return True

    def match(self, t: MultiCtx, u: MultiCtx, holes: List[Tuple[HoleName, HoleName]]) -> bool:
        stack = [(t, u)]
        while stack:
            a, b = stack.pop()
            if type(a) is not type(b):
                return False
            if isinstance(a, Var):
                # names bound by the environment or the approximant are met free here
                if not self.bind(a.name, b.name):
                    return False
            elif isinstance(a, Lam):
                if not self.bind(a.binder, b.binder):
                    return False
                stack.append((a.body, b.body))
            elif isinstance(a, App):
                stack.append((a.fun, b.fun))
                stack.append((a.arg, b.arg))
            else:
                if not self.bind(a.name, b.name):
                    return False
                holes.append((a.name, b.name))
        return True


def state_equiv(s1: ExamState, s2: ExamState) -> bool:
    """``s1 ≡ s2``: equal up to reordering independent environment entries.

    Fresh names (bound variables and hole names) are compared up to a
    consistent bijection, since a fresh renaming is only defined up to the
    choice of names.  Globally free variables must coincide.
    """
    globals1 = _global_free(s1)
    globals2 = _global_free(s2)
    if globals1 != globals2:
        return False
    ren = _Renaming()
    for g in globals1:
        ren.bind(g, g)
    holes: List[Tuple[HoleName, HoleName]] = []
    if not ren.match(s1.approximant, s2.approximant, holes):
        return False
    if len(s1.pool) != len(s2.pool) or len(holes) != len(s1.pool):
        return False
    for h1, h2 in holes:
        try:
            j1, j2 = s1.pool.job(h1), s2.pool.job(h2)
        except KeyError:
            return False
        if len(j1.stack) != len(j2.stack):
            return False
        for a, b in zip((j1.term,) + j1.stack, (j2.term,) + j2.stack):
            if not ren.match(a, b, []):
                return False
    if len(s1.env) != len(s2.env):
        return False
    by_name2 = {x: u for x, u in s2.env}
    for x, u in s1.env:
        y = ren.fwd.get(x)
        if y is None:
            # entry not reachable from approximant or jobs: pair by equal name
            y = x if x in by_name2 and x not in ren.bwd else None
            if y is None or not ren.bind(x, y):
                return False
        if y not in by_name2 or not ren.match(u, by_name2[y], []):
            return False
    renamed2 = tuple((ren.bwd[y], _rename_all(u, ren.bwd)) for y, u in s2.env)
    return env_equiv(s1.env, renamed2)


def _global_free(s: ExamState) -> frozenset:
    dom = env_dom(s.env)
    fv = set(free_vars(s.approximant))
    for j in s.pool.support():
        for t in (j.term,) + j.stack:
            fv |= free_vars(t)
    for _, u in s.env:
        fv |= free_vars(u)
    bound = set(dom)
    bound.update(binders(s.approximant))
    return frozenset(x for x in fv if x not in bound)


def _rename_all(t: MultiCtx, mapping: Dict[object, object]) -> MultiCtx:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Lam):
        return Lam(mapping.get(t.binder, t.binder), _rename_all(t.body, mapping))
    if isinstance(t, App):
        return App(_rename_all(t.fun, mapping), _rename_all(t.arg, mapping))
    return Hole(mapping.get(t.name, t.name))


def diamond_close(s: ExamState, s1: ExamState, s2: ExamState) -> Optional[Tuple[ExamState, ExamState]]:
    """Find one-step successors of ``s1`` and ``s2`` that are ``≡``.

    Returns ``None`` when no closing pair exists.
    """
    for _, _, t1 in successors(s1):
        for _, _, t2 in successors(s2):
            if state_equiv(t1, t2):
                return t1, t2
    return None


# --------------------------------------------------------------------------
# rendering and runs

def render_job(job: Job, name: Callable = str, hole: Callable = str) -> str:
    stack = render_stack(job.stack, name=name)
    return f"({pretty(job.term, name=name)}, {stack}){hole(job.name)}"


def render_state(s: ExamState, name: Callable = str, hole: Callable = str) -> Dict[str, str]:
    return {
        "approximant": pretty(s.approximant, name=name, hole=lambda h: f"⟨·⟩{hole(h)}"),
        "pool": s.pool.render(lambda j: render_job(j, name=name, hole=hole)),
        "env": render_env(s.env, name=name),
    }


def exam_run(
    t: Term,
    template: str = "set",
    seed: int = 0,
    fuel: int = 10_000,
    chooser: Optional[Chooser] = None,
    schedule: Optional[Sequence[HoleName]] = None,
    keep_states: bool = False,
    snapshots: bool = False,
) -> Trace:
    """Run the EXAM from ``t`` until a final state or ``fuel`` transitions.

    ``schedule``, when given, overrides the template's own choices step by
    step (each entry must be selectable at its step).
    """
    s = exam_init(t, template, seed=seed, chooser=chooser)
    trace = Trace(machine="exam", initial=t, template=template, seed=seed, fuel=fuel)
    if keep_states:
        trace.states.append(s)
    i = 0
    while not is_final(s):
        if len(trace.steps) >= fuel:
            trace.outcome = FUEL_EXHAUSTED
            break
        if schedule is not None and i < len(schedule):
            pick = schedule[i]
        else:
            pick, pool = s.pool.choose()
            s = replace(s, pool=pool)
        i += 1
        job = s.pool.job(pick)
        before = s
        label, s = exam_step(s, pick)
        step = TraceStep(label, job=pick)
        if label is Label.BETA:
            step.address = redex_address(job)
        if snapshots:
            step.snapshot = render_state(before)
        trace.steps.append(step)
        if keep_states:
            trace.states.append(s)
    else:
        trace.outcome = FINAL
        # a final state reads back to its approximant
        trace.result = s.approximant
    if snapshots:
        trace.final_snapshot = render_state(s)
    return trace
