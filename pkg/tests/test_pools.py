import pytest
from hypothesis import given
from hypothesis import strategies as st

from lamexam.exam import exam_run
from lamexam.pools import (
    TEMPLATES, FairPool, InteractivePool, Job, LevelPool, SetPool, StackPool,
    fair_progress_check, level_trace_check, make_pool,
)
from lamexam.syntax import HoleName, Var, Name, parse
from lamexam.trace import FINAL

from conftest import EXAMPLE, OMEGA, generated


def job(i):
    return Job(HoleName(i), Var(Name("x")))


def order(pool):
    return [j.name.id for j in pool.support()]


AUTOMATIC = ["set", "stack", "least-level", "fair"]


@given(st.sampled_from(AUTOMATIC), st.lists(st.integers(1, 50), unique=True, max_size=8), st.integers(0, 99))
def test_interface_algebra(template, ids, seed):
    pool = make_pool(template, job(0), seed=seed)
    pool = pool.add_list([job(i) for i in ids])
    assert pool.names() == {HoleName(i) for i in [0] + ids}
    assert len(pool) == len(ids) + 1
    sel = pool.selectable()
    assert sel and set(sel) <= pool.names()
    picked, pool2 = pool.choose()
    assert picked in sel
    j, rest = pool2.select(picked)
    assert j.name == picked and rest.names() == pool.names() - {picked}
    back = rest.drop(j)
    assert back.names() == pool.names()
    with pytest.raises(ValueError):
        back.add(j)


def test_stack_order():
    p = StackPool.new(job(0)).add_list([job(1), job(2)])
    assert order(p) == [1, 2, 0] and p.selectable() == [HoleName(1)]
    j, rest = p.select(HoleName(1))
    with pytest.raises(ValueError):
        p.select(HoleName(2))
    assert order(rest.drop(j)) == [1, 2, 0]


def test_least_level_and_fair_order():
    p = LevelPool.new(job(0)).add_list([job(1), job(2)])
    assert order(p) == [0, 1, 2]
    j, rest = p.select(HoleName(0))
    assert order(rest.drop(j)) == [0, 1, 2]
    f = FairPool.new(job(0)).add_list([job(1), job(2)])
    j, rest = f.select(HoleName(0))
    assert order(rest.drop(j)) == [1, 2, 0]


def test_set_pool_is_seeded():
    base = SetPool.new(job(0), seed=7).add_list([job(i) for i in range(1, 6)])
    assert base.choose()[0] == SetPool.new(job(0), seed=7).add_list([job(i) for i in range(1, 6)]).choose()[0]
    picks = set()
    for seed in range(30):
        picks.add(SetPool.new(job(0), seed=seed).add_list([job(i) for i in range(1, 6)]).choose()[0])
    assert len(picks) > 1
    assert base.render(lambda j: str(j.name.id)) == "{0, 1, 2, 3, 4, 5}"
    assert SetPool().render(str) == "∅" and StackPool().render(str) == "ε"


def test_make_pool_rejects_unknown():
    assert set(TEMPLATES) == {"set", "stack", "least-level", "fair", "interactive"}
    with pytest.raises(ValueError):
        make_pool("queue", job(0))


def test_interactive_pool():
    seen = []

    def chooser(jobs):
        seen.append([j.name.id for j in jobs])
        return jobs[-1].name

    p = make_pool("interactive", job(0), chooser=chooser).add(job(1))
    assert isinstance(p, InteractivePool)
    assert p.choose()[0] == HoleName(1) and seen == [[0, 1]]
    with pytest.raises(ValueError):
        make_pool("interactive", job(0), chooser=lambda jobs: HoleName(9)).choose()
    with pytest.raises(ValueError):
        make_pool("interactive", job(0)).choose()


def test_interactive_run_follows_chooser():
    run = exam_run(EXAMPLE, "interactive", chooser=lambda jobs: jobs[0].name)
    assert run.outcome == FINAL and run.beta_count == 2


@given(generated(size=10), st.sampled_from(AUTOMATIC), st.integers(0, 99))
def test_runs_are_reproducible(t, template, seed):
    a = exam_run(t, template, seed=seed, fuel=200)
    b = exam_run(t, template, seed=seed, fuel=200)
    assert [(s.label, s.job) for s in a.steps] == [(s.label, s.job) for s in b.steps]


def test_level_trace_check_examples():
    assert level_trace_check(parse("x (x ((\\a. a) y)) ((\\b. b) z)"))
    assert level_trace_check(EXAMPLE)
    assert level_trace_check(parse(f"x ({OMEGA}) ((\\y. y) z)"), fuel=300)


@given(generated(size=10))
def test_level_trace_check_random(t):
    assert level_trace_check(t, fuel=300)


def test_fair_progress():
    t = parse(f"x ({OMEGA}) ((\\y. y) z)")
    assert fair_progress_check(t, budget=300)
    assert not fair_progress_check(t, budget=300, template="stack")


@given(generated(size=10))
def test_fair_progress_random(t):
    assert fair_progress_check(t, budget=300)
