"""Property and differential checks over machine traces and sampled states.

The trace-level checkers return lists of violation messages (empty means
pass) so that callers can both assert and report.  ``run_suite`` drives
them over a generated corpus and collects a :class:`CheckReport`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .bmam import bmam_run
from .exam import (
    OVERHEAD_LABELS, ExamState, diamond_close, exam_readback, exam_run, is_final, is_o_normal,
    overhead_measure, redex_address, successors, trace_invariant_violations,
)
from .generate import gen_terms
from .pools import Job
from .strategies import (
    FuelExhausted, contract, external_redexes, leftmost_step, least_level_redexes, normalize,
)
from .syntax import (
    Address, App, Hole, HoleName, Name, NameSupply, Term, Var, alpha_eq, format_address,
    free_vars, hole_names, plug_many, pretty, subst, subterm_at,
)
from .mam import env_lookup
from .trace import FINAL, Label, Trace

SUITES = (
    "transparency", "projection", "reflection", "measure", "diamond",
    "invariants", "differential", "leftmost", "level", "fair",
)


@dataclass
class Failure:
    term: Term
    message: str
    trace: Optional[Trace] = None

    def describe(self) -> str:
        return f"{pretty(self.term)}: {self.message}"


@dataclass
class CheckReport:
    suite: str
    cases: int = 0
    skipped: int = 0
    failures: List[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        line = f"{verdict} {self.suite}: {self.cases} cases, {self.skipped} skipped, {len(self.failures)} failures"
        if self.failures:
            line += "\n  first counterexample: " + self.failures[0].describe()
        return line


# --------------------------------------------------------------------------
# per-trace checkers; traces must be run with keep_states=True

class _Readbacks:
    """Read-backs of a run's states, computed on first use."""

    def __init__(self, trace: Trace) -> None:
        self.states = trace.states
        self.cache: Dict[int, Term] = {}

    def __getitem__(self, i: int) -> Term:
        if i not in self.cache:
            self.cache[i] = exam_readback(self.states[i])
        return self.cache[i]


def _readbacks(trace: Trace) -> _Readbacks:
    return _Readbacks(trace)


def _unchanged(label: Label, before: Term, after: Term) -> bool:
    # sub copies an entry under fresh binder names, so only alpha-equality survives it
    if label is Label.SUB:
        return alpha_eq(before, after)
    return before == after


class _Resolver:
    """Applies a run's environment, resolving each entry once.

    An entry may only mention names bound by older entries (local scope),
    so it is resolved against those when it is pushed, and applying the
    whole environment becomes a substitution of resolved entries.  Valid
    for environments that satisfy the invariants, which the invariant
    suite checks separately.
    """

    def __init__(self) -> None:
        self.entries: tuple = ()
        self.resolved: Dict[Name, Term] = {}

    def follow(self, env) -> "_Resolver":
        extra = len(env) - len(self.entries)
        if extra < 0 or (self.entries and env[extra] is not self.entries[0]):
            fresh = _Resolver()
            return fresh.follow(env)
        for x, u in reversed(env[:extra]):
            self.resolved[x] = self(u)
        self.entries = env
        return self

    def __call__(self, t: Term) -> Term:
        for x in free_vars(t):
            if x in self.resolved:
                t = subst(t, x, self.resolved[x])
        return t

    def unwind(self, head: Term, items: Sequence[Term]) -> Term:
        t = self(head)
        for u in items:
            t = App(t, self(u))
        return t


def _shared_suffix(a: Tuple[Term, ...], b: Tuple[Term, ...]) -> int:
    k = 0
    while k < min(len(a), len(b)) and a[len(a) - 1 - k] is b[len(b) - 1 - k]:
        k += 1
    return k


def transparency_violations(trace: Trace, readbacks=None, whole: bool = False) -> List[str]:
    """Overhead steps leave the read-back unchanged.

    By default only the selected job's part of the read-back is compared:
    an overhead step touches neither the environment nor the other jobs,
    and holes are unique, so the whole read-back is unchanged exactly when
    that part is.  Stack items shared by the job before and after the step
    contribute the same outer applications and are skipped.  ``whole=True``
    (or passing ``readbacks``) compares full read-backs instead.
    """
    if whole or readbacks is not None:
        rb = readbacks or _readbacks(trace)
        return [
            f"step {i} ({step.label}) changed the read-back {pretty(rb[i])} -> {pretty(rb[i + 1])}"
            for i, step in enumerate(trace.steps)
            if step.label in OVERHEAD_LABELS and not _unchanged(step.label, rb[i], rb[i + 1])
        ]
    out = []
    env = _Resolver()
    for i, step in enumerate(trace.steps):
        if step.label not in OVERHEAD_LABELS:
            continue
        s, s2 = trace.states[i], trace.states[i + 1]
        job = s.pool.job(step.job)
        if subterm_at(s.approximant, job.address) != Hole(job.name):
            out.append(f"step {i}: job {job.name} is not at {format_address(job.address)}")
            continue
        if s2.env is not s.env:
            out.append(f"step {i} ({step.label}) changed the environment")
            continue
        env = env.follow(s.env)
        if step.label in (Label.SEA_APP, Label.SUB):
            moved = s2.pool.job(job.name)
            k = _shared_suffix(job.stack, moved.stack)
            if step.label is Label.SUB:
                # the copy differs from the entry only in bound names, which
                # substituting free variables preserves
                entry = env_lookup(s.env, job.term.name) if isinstance(job.term, Var) else None
                ok = (
                    entry is not None and alpha_eq(entry, moved.term)
                    and k == len(job.stack) == len(moved.stack)
                )
            else:
                before = env.unwind(job.term, job.stack[: len(job.stack) - k])
                after = env.unwind(moved.term, moved.stack[: len(moved.stack) - k])
                ok = before == after
        else:
            before = env.unwind(job.term, job.stack)
            part = subterm_at(s2.approximant, job.address)
            mine = set(hole_names(part))
            after = plug_many(part, {
                j.name: env.unwind(j.term, j.stack) for j in s2.pool.support() if j.name in mine
            })
            ok = before == after
        if not ok:
            out.append(f"step {i} ({step.label}) changed the read-back of job {job.name}")
    return out


def projection_violations(trace: Trace, readbacks=None) -> List[str]:
    """Every beta step contracts an external redex of the read-back it starts from."""
    rb = readbacks or _readbacks(trace)
    out = []
    for i, step in enumerate(trace.steps):
        if step.label is not Label.BETA:
            continue
        a = step.address
        if a not in external_redexes(rb[i]):
            out.append(f"step {i}: address {format_address(a)} is not an external redex of {pretty(rb[i])}")
        elif not alpha_eq(contract(rb[i], a), rb[i + 1]):
            out.append(f"step {i}: read-back {pretty(rb[i + 1])} is not the contractum at {format_address(a)}")
    return out


def _beta_address_violations(
    trace: Trace, allowed: Callable[[Term], frozenset], what: str, readbacks=None
) -> List[str]:
    rb = readbacks or _readbacks(trace)
    return [
        f"step {i}: address {format_address(step.address)} is not {what} in {pretty(rb[i])}"
        for i, step in enumerate(trace.steps)
        if step.label is Label.BETA and step.address not in allowed(rb[i])
    ]


def leftmost_violations(trace: Trace, readbacks=None) -> List[str]:
    def leftmost(t: Term) -> frozenset:
        r = leftmost_step(t)
        return frozenset() if r is None else frozenset({r.at})

    return _beta_address_violations(trace, leftmost, "the leftmost redex", readbacks)


def level_violations(trace: Trace, readbacks=None) -> List[str]:
    return _beta_address_violations(trace, least_level_redexes, "a least-level redex", readbacks)


def invariant_violations(trace: Trace) -> List[str]:
    return [f"state {i}: {', '.join(v)}" for i, v in trace_invariant_violations(trace.states)]


# --------------------------------------------------------------------------
# per-state checkers

def measure_violations(s: ExamState) -> List[str]:
    m = overhead_measure(s)
    out = []
    if (m == 0) != is_o_normal(s):
        out.append(f"measure {m} but o-normal is {is_o_normal(s)}")
    for name, label, s2 in successors(s):
        if label in OVERHEAD_LABELS:
            m2 = overhead_measure(s2)
            if m2 != m - 1:
                out.append(f"{label} on {name} took the measure from {m} to {m2}")
    return out


def reflection_violations(s: ExamState) -> List[str]:
    """At an o-normal state, each external redex is contracted by some enabled beta step."""
    if not is_o_normal(s) or is_final(s):
        return []
    rb = exam_readback(s)
    reached: Dict[Address, Term] = {}
    for name, label, s2 in successors(s):
        if label is Label.BETA:
            reached[redex_address(s.pool.job(name))] = exam_readback(s2)
    out = []
    for a in sorted(external_redexes(rb)):
        if a not in reached:
            out.append(f"no beta step contracts the external redex at {format_address(a)} of {pretty(rb)}")
        elif not alpha_eq(reached[a], contract(rb, a)):
            out.append(f"beta step at {format_address(a)} does not read back to the contractum")
    return out


def diamond_violations(s: ExamState) -> List[str]:
    succ = successors(s)
    out = []
    for i in range(len(succ)):
        for j in range(i + 1, len(succ)):
            (n1, _, s1), (n2, _, s2) = succ[i], succ[j]
            if diamond_close(s, s1, s2) is None:
                out.append(f"steps on {n1} and {n2} do not close")
    return out


# --------------------------------------------------------------------------
# whole-term checks

def level_trace_check(t: Term, fuel: int = 2000) -> bool:
    """Every beta step of the least-level EXAM on ``t`` contracts a least-level redex."""
    trace = exam_run(t, "least-level", fuel=fuel, keep_states=True)
    return not level_violations(trace)


def fair_progress_check(t: Term, budget: int = 2000, template: str = "fair") -> bool:
    """No job waits longer than one round of the pool.

    A job present at step ``i`` in a pool of size ``k`` must be selected
    again within ``k`` steps, plus one for every job added meanwhile.
    """
    trace = exam_run(t, template, fuel=budget, keep_states=True)
    pending: Dict[HoleName, int] = {}
    for i, step in enumerate(trace.steps):
        before, after = trace.states[i], trace.states[i + 1]
        names = before.pool.names()
        for n in names:
            pending.setdefault(n, i + len(names) - 1)
        if step.job in pending:
            if i > pending.pop(step.job):
                return False
        added = len(after.pool.names() - names)
        for n in pending:
            pending[n] += added
        if any(i > deadline for deadline in pending.values()):
            return False
    return True


def completion_step(t: Term, template: str, address: Address, budget: int) -> Optional[int]:
    """First step after which the approximant is hole-free at ``address``.

    ``None`` when that part of the normal form is not finished within
    ``budget`` transitions.
    """
    trace = exam_run(t, template, fuel=budget, keep_states=True)
    for i, s in enumerate(trace.states):
        sub = subterm_at(s.approximant, address)
        if sub is not None and not hole_names(sub):
            return i
    return None


def differential_case(t: Term, fuel: int = 2000, seeds: Sequence[int] = range(10)) -> Tuple[Optional[str], Optional[Trace]]:
    """Three-way comparison of leftmost normalization, the stack EXAM and the
    backtracking MAM, plus seeded set-EXAM runs.

    Returns ``(None, trace)`` on agreement or when the stack run exhausts its
    fuel (``trace.outcome`` tells which), else a message and the stack trace.
    """
    stack = exam_run(t, "stack", fuel=fuel)
    if stack.outcome != FINAL:
        return None, stack
    k = stack.beta_count
    try:
        nf, steps = normalize(t, "leftmost", fuel=k, max_size=None)
    except FuelExhausted:
        return f"leftmost reduction needs more than the {k} betas of the stack EXAM", stack
    if steps != k or not alpha_eq(nf, stack.result):
        return f"stack EXAM gave {pretty(stack.result)} in {k} betas, leftmost {pretty(nf)} in {steps}", stack
    back = bmam_run(t, fuel=10 * fuel)
    if back.outcome != FINAL or back.beta_count != k or not alpha_eq(back.result, nf):
        return f"backtracking MAM disagrees: {back.outcome}, {back.beta_count} betas", stack
    for seed in seeds:
        run = exam_run(t, "set", seed=seed, fuel=fuel)
        if run.outcome != FINAL or run.beta_count != k or not alpha_eq(run.result, nf):
            return f"set EXAM seed {seed} disagrees: {run.outcome}, {run.beta_count} betas", stack
    return None, stack


# --------------------------------------------------------------------------
# negative controls for the invariant validator

def negative_controls() -> List[Tuple[str, ExamState]]:
    """Hand-built unreachable states, each breaking one invariant clause."""
    from .pools import SetPool

    x, y = Name("x"), Name("y")
    a, b = HoleName(1), HoleName(2)
    supply = NameSupply(10)
    duplicated = ExamState(
        App(App(Var(x), Hole(a)), Hole(a)),
        SetPool(jobs=(Job(a, Var(y)),)),
        (),
        supply,
    )
    self_loop = ExamState(Hole(a), SetPool(jobs=(Job(a, Var(x)),)), ((x, Var(x)),), supply)
    substituted = ExamState(
        App(Var(x), Hole(b)),
        SetPool(jobs=(Job(b, Var(y)),)),
        ((x, Var(y)),),
        supply,
    )
    return [("uniqueness", duplicated), ("local scope", self_loop), ("freeness", substituted)]


# --------------------------------------------------------------------------
# suites

def sample_states(
    terms: Sequence[Term], count: int, seed: int = 0, fuel: int = 200,
    keep: Callable[[ExamState], bool] = lambda s: True,
) -> List[Tuple[Term, ExamState]]:
    """Up to ``count`` reachable set-EXAM states drawn from seeded runs on ``terms``."""
    rng = random.Random(seed)
    found: List[Tuple[Term, ExamState]] = []
    for t in terms:
        run = exam_run(t, "set", seed=rng.getrandbits(32), fuel=fuel, keep_states=True)
        found.extend((t, s) for s in run.states if keep(s))
    rng.shuffle(found)
    return found[:count]


def _branching(s: ExamState) -> bool:
    return len(s.pool.selectable()) >= 2


def _reflection_candidate(s: ExamState) -> bool:
    return is_o_normal(s) and not is_final(s)


def run_suite(
    suite: str, count: int = 100, seed: int = 0, size: int = 12, fuel: int = 500, mode: str = "closed"
) -> CheckReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    report = CheckReport(suite)
    terms = gen_terms(count, size, seed=seed, mode=mode)

    if suite in ("reflection", "measure", "diamond"):
        checker, keep = {
            "reflection": (reflection_violations, _reflection_candidate),
            "measure": (measure_violations, lambda s: True),
            "diamond": (diamond_violations, _branching),
        }[suite]
        for t, s in sample_states(terms, count, seed=seed, fuel=fuel, keep=keep):
            report.cases += 1
            problems = checker(s)
            if problems:
                report.failures.append(Failure(t, problems[0]))
        return report

    if suite == "differential":
        for t in terms:
            message, trace = differential_case(t, fuel=fuel)
            if trace.outcome != FINAL:
                report.skipped += 1
                continue
            report.cases += 1
            if message:
                report.failures.append(Failure(t, message, trace))
        return report

    if suite == "fair":
        for t in terms:
            report.cases += 1
            if not fair_progress_check(t, fuel):
                report.failures.append(Failure(t, "a job starved under the fair template"))
        return report

    template = {"leftmost": "stack", "level": "least-level"}.get(suite, "set")
    for i, t in enumerate(terms):
        trace = exam_run(t, template, seed=seed + i, fuel=fuel, keep_states=True)
        report.cases += 1
        if suite == "invariants":
            problems = invariant_violations(trace)
        else:
            problems = {
                "transparency": transparency_violations,
                "projection": projection_violations,
                "leftmost": leftmost_violations,
                "level": level_violations,
            }[suite](trace)
        if problems:
            report.failures.append(Failure(t, problems[0], trace))
    return report
