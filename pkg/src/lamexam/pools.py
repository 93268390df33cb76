"""Job pools: the scheduling interface of the EXAM and its templates.

Every template answers the same questions: which names are in the pool,
which jobs may be selected next, and where a job goes when it is dropped
back after a step or added as a new job.  Pools are immutable values.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, ClassVar, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Type

from .syntax import Address, HoleName, Term

__all__ = [
    "Job", "Pool", "SetPool", "StackPool", "LevelPool", "FairPool",
    "InteractivePool", "TEMPLATES", "make_pool", "level_trace_check", "fair_progress_check",
]


@dataclass(frozen=True)
class Job:
    """A named weak-head evaluation task: a term and its argument stack.

    ``address`` is where the job's hole sits in the approximant; it is
    bookkeeping for traces and plays no part in the transitions.
    """

    name: HoleName
    term: Term
    stack: Tuple[Term, ...] = ()
    address: Address = ()


@dataclass(frozen=True)
class Pool:
    template: ClassVar[str] = "abstract"
    jobs: Tuple[Job, ...] = ()

    @classmethod
    def new(cls, job: Job, **_) -> "Pool":
        return cls(jobs=(job,))

    def names(self) -> FrozenSet[HoleName]:
        return frozenset(j.name for j in self.jobs)

    def support(self) -> Tuple[Job, ...]:
        return self.jobs

    def __len__(self) -> int:
        return len(self.jobs)

    def job(self, name: HoleName) -> Job:
        for j in self.jobs:
            if j.name == name:
                return j
        raise KeyError(name)

    def selectable(self) -> List[HoleName]:
        """Names ``n`` for which selecting ``n`` is allowed right now."""
        return [j.name for j in self.jobs]

    def select(self, name: HoleName) -> Tuple[Job, "Pool"]:
        if name not in self.selectable():
            raise ValueError(f"job {name} cannot be selected from this pool")
        j = self.job(name)
        return j, replace(self, jobs=tuple(k for k in self.jobs if k.name != name))

    def choose(self) -> Tuple[HoleName, "Pool"]:
        """The template's own scheduling decision among :meth:`selectable`."""
        options = self.selectable()
        if not options:
            raise ValueError("empty pool")
        return options[0], self

    def _check_fresh(self, job: Job) -> None:
        if job.name in self.names():
            raise ValueError(f"job name {job.name} already in the pool")

    def drop(self, job: Job) -> "Pool":
        self._check_fresh(job)
        return replace(self, jobs=(job,) + self.jobs)

    def add(self, job: Job) -> "Pool":
        self._check_fresh(job)
        return replace(self, jobs=(job,) + self.jobs)

    def add_list(self, jobs: Sequence[Job]) -> "Pool":
        pool = self
        for j in jobs:
            pool = pool.add(j)
        return pool

    def render(self, job_text: Callable[[Job], str]) -> str:
        if not self.jobs:
            return "ε"
        return " : ".join(job_text(j) for j in self.jobs)


@dataclass(frozen=True)
class SetPool(Pool):
    """Any job may be selected; the scheduler draws one with a seeded RNG."""

    template: ClassVar[str] = "set"
    rng_state: int = 0

    @classmethod
    def new(cls, job: Job, seed: int = 0, **_) -> "SetPool":
        return cls(jobs=(job,), rng_state=seed)

    def _sorted(self, jobs: Iterable[Job]) -> Tuple[Job, ...]:
        return tuple(sorted(jobs, key=lambda j: j.name.id))

    def drop(self, job: Job) -> "SetPool":
        self._check_fresh(job)
        return replace(self, jobs=self._sorted(self.jobs + (job,)))

    add = drop

    def choose(self) -> Tuple[HoleName, "SetPool"]:
        options = self.selectable()
        if not options:
            raise ValueError("empty pool")
        rng = random.Random(self.rng_state)
        pick = options[rng.randrange(len(options))]
        return pick, replace(self, rng_state=rng.getrandbits(64))

    def render(self, job_text: Callable[[Job], str]) -> str:
        if not self.jobs:
            return "∅"
        return "{" + ", ".join(job_text(j) for j in self.jobs) + "}"


@dataclass(frozen=True)
class StackPool(Pool):
    """Leftmost scheduling: selection pops, drop and add push on the front."""

    template: ClassVar[str] = "stack"

    def selectable(self) -> List[HoleName]:
        return [self.jobs[0].name] if self.jobs else []

    def add_list(self, jobs: Sequence[Job]) -> "StackPool":
        for j in jobs:
            self._check_fresh(j)
        return replace(self, jobs=tuple(jobs) + self.jobs)


@dataclass(frozen=True)
class LevelPool(StackPool):
    """Least-level scheduling: drop pushes on the front, add appends at the end."""

    template: ClassVar[str] = "least-level"

    def add(self, job: Job) -> "LevelPool":
        self._check_fresh(job)
        return replace(self, jobs=self.jobs + (job,))

    def add_list(self, jobs: Sequence[Job]) -> "LevelPool":
        return Pool.add_list(self, jobs)


@dataclass(frozen=True)
class FairPool(LevelPool):
    """Round robin: both drop and add append at the end."""

    template: ClassVar[str] = "fair"

    def drop(self, job: Job) -> "FairPool":
        self._check_fresh(job)
        return replace(self, jobs=self.jobs + (job,))


Chooser = Callable[[Sequence[Job]], HoleName]


@dataclass(frozen=True)
class InteractivePool(SetPool):
    """Set-like pool whose selection is delegated to a callback.

    The callback receives the selectable jobs and must return one of their
    names.
    """

    template: ClassVar[str] = "interactive"
    chooser: Optional[Chooser] = field(default=None, compare=False)

    @classmethod
    def new(cls, job: Job, chooser: Optional[Chooser] = None, **_) -> "InteractivePool":
        return cls(jobs=(job,), chooser=chooser)

    def choose(self) -> Tuple[HoleName, "InteractivePool"]:
        if self.chooser is None:
            raise ValueError("interactive pool has no chooser")
        options = self.selectable()
        pick = self.chooser([self.job(n) for n in options])
        if pick not in options:
            raise ValueError(f"chooser returned {pick}, not one of the offered jobs")
        return pick, self


TEMPLATES: Dict[str, Type[Pool]] = {
    cls.template: cls for cls in (SetPool, StackPool, LevelPool, FairPool, InteractivePool)
}


def make_pool(template: str, job: Job, seed: int = 0, chooser: Optional[Chooser] = None) -> Pool:
    try:
        cls = TEMPLATES[template]
    except KeyError:
        raise ValueError(f"unknown pool template {template!r}; expected one of {sorted(TEMPLATES)}") from None
    return cls.new(job, seed=seed, chooser=chooser)


def level_trace_check(t: Term, fuel: int = 2000) -> bool:
    """Every beta step of the least-level EXAM on ``t`` contracts a least-level redex."""
    from .checks import level_trace_check as check  # the checks need the machine, which needs pools

    return check(t, fuel)


def fair_progress_check(t: Term, budget: int = 2000, template: str = "fair") -> bool:
    """No job of the ``template`` EXAM on ``t`` starves within ``budget`` steps."""
    from .checks import fair_progress_check as check

    return check(t, budget, template)
