"""Acceptance criteria 1-11, one test each.

Each test records a ``PASS``/``FAIL`` line; pytest shows them in the
terminal summary, and running this file directly prints them as it goes.
"""
import time
from contextlib import contextmanager
from functools import lru_cache

import pytest

from lamexam.bmam import bmam_run
from lamexam.checks import (
    _branching, _reflection_candidate, completion_step, invariant_violations, measure_violations,
    negative_controls, projection_violations, reflection_violations, sample_states,
    transparency_violations, diamond_violations,
)
from lamexam.exam import exam_run, render_state, validate_invariants
from lamexam.generate import gen_terms
from lamexam.strategies import leftmost_step, normalize, redex_level
from lamexam.syntax import HoleName, alpha_eq, parse, pretty
from lamexam.trace import FINAL, Label

from conftest import ACCEPTANCE, EXAMPLE, OMEGA, load_golden, table_rows

CORPUS_COUNT, CORPUS_SIZE, CORPUS_FUEL, CORPUS_SEED = 300, 25, 2000, 0
SET_SEEDS = range(10)
BMAM_FUEL = 10 * CORPUS_FUEL

SET_PICKS = ["α", "α", "α", "γ", "γ", "β", "γ", "β", "β", "γ", "γ", "γ'", "β", "γ'"]
GREEK_IDS = {"α": 0, "β": 3, "γ": 4, "γ'": 5}


@contextmanager
def criterion(n, title):
    t0 = time.perf_counter()
    notes = []
    try:
        yield notes
    except BaseException as e:
        line = f"FAIL criterion {n:>2} {title}: {e}".splitlines()[0]
        ACCEPTANCE.append(line)
        print(line)
        raise
    extra = f" ({'; '.join(notes)})" if notes else ""
    line = f"PASS criterion {n:>2} {title}{extra} [{time.perf_counter() - t0:.1f}s]"
    ACCEPTANCE.append(line)
    print(line)


def set_golden_trace(keep_states=True):
    schedule = [HoleName(GREEK_IDS[p]) for p in SET_PICKS]
    return exam_run(EXAMPLE, "set", schedule=schedule, keep_states=keep_states)


def stack_golden_trace(keep_states=True):
    return exam_run(EXAMPLE, "stack", keep_states=keep_states)


def rows_match(trace, golden, skip=0):
    rows, _ = table_rows(trace)
    rows = rows[skip:]
    expected = load_golden(golden)
    assert len(rows) == len(expected), f"{len(rows)} rows, expected {len(expected)}"
    for i, (got, want) in enumerate(zip(rows, expected)):
        assert got == want, f"row {i + 1}: {got} != {want}"
    return rows


@lru_cache(maxsize=None)
def corpus():
    return tuple(gen_terms(CORPUS_COUNT, CORPUS_SIZE, seed=CORPUS_SEED))


@lru_cache(maxsize=None)
def corpus_outcomes():
    """Per corpus term: the stack run without states, or its mismatch message."""
    out = []
    for t in corpus():
        stack = exam_run(t, "stack", fuel=CORPUS_FUEL)
        problem = None
        if stack.outcome == FINAL:
            k = stack.beta_count
            nf, steps = normalize(t, "leftmost", fuel=k + 1, max_size=None)
            if steps != k or not alpha_eq(nf, stack.result):
                problem = f"stack EXAM {pretty(stack.result)} in {k}, leftmost {pretty(nf)} in {steps}"
            for seed in SET_SEEDS:
                run = exam_run(t, "set", seed=seed, fuel=CORPUS_FUEL)
                if run.outcome != FINAL or run.beta_count != k or not alpha_eq(run.result, nf):
                    problem = problem or f"set seed {seed}: {run.outcome}, {run.beta_count} betas"
        out.append((t, stack, problem))
    return out


def corpus_traces():
    """Every trace of criteria 1-3 again, states kept, one at a time."""
    yield "set golden", set_golden_trace()
    yield "stack golden", stack_golden_trace()
    for i, t in enumerate(corpus()):
        stack = exam_run(t, "stack", fuel=CORPUS_FUEL, keep_states=True)
        yield f"corpus {i} stack", stack
        if stack.outcome == FINAL:
            for seed in SET_SEEDS:
                yield f"corpus {i} set/{seed}", exam_run(t, "set", seed=seed, fuel=CORPUS_FUEL, keep_states=True)


@lru_cache(maxsize=None)
def trace_checks():
    """Transparency and invariant violations over all traces of criteria 1-3."""
    transparency, invariants, states, traces = [], [], 0, 0
    for what, trace in corpus_traces():
        traces += 1
        states += len(trace.states)
        transparency += [f"{what}: {v}" for v in transparency_violations(trace)]
        invariants += [f"{what}: {v}" for v in invariant_violations(trace)]
    return transparency, invariants, states, traces


def small_terms(count=120, size=12, seed=1, **shape):
    return gen_terms(count, size, seed=seed, mode="open", **shape)


def test_criterion_01_set_golden():
    with criterion(1, "set EXAM golden trace") as notes:
        t0 = time.perf_counter()
        trace = set_golden_trace()
        rows = rows_match(trace, "set_exam.jsonl")
        assert time.perf_counter() - t0 < 1.0
        last = rows[-1]
        assert trace.outcome == FINAL
        assert (last["approximant"], last["pool"], last["env"]) == ("x z (z z)", "∅", "[y:=z] : [w:=z]")
        notes.append(f"{len(rows) - 1} transitions match")


def test_criterion_02_leftmost_golden():
    with criterion(2, "leftmost EXAM golden trace") as notes:
        t0 = time.perf_counter()
        trace = stack_golden_trace()
        rows = rows_match(trace, "leftmost_exam.jsonl", skip=3)
        assert time.perf_counter() - t0 < 1.0
        assert rows[-1]["env"] == "[w:=z] : [y:=z]" and trace.beta_count == 2
        notes.append(f"{len(rows)} rows match, 2 betas")


def test_criterion_03_beta_matching():
    with criterion(3, "beta matching against leftmost and set EXAM") as notes:
        t0 = time.perf_counter()
        outcomes = corpus_outcomes()
        elapsed = time.perf_counter() - t0
        final = [o for o in outcomes if o[1].outcome == FINAL]
        bad = [(pretty(t), p) for t, _, p in outcomes if p]
        assert len(outcomes) >= 300 and max(len(pretty(t)) for t in corpus()) > 0
        assert not bad, f"{len(bad)} mismatches, first {bad[0]}"
        assert elapsed < 60, f"took {elapsed:.1f}s"
        notes.append(f"{len(final)}/{len(outcomes)} terminate, 0 mismatches, {elapsed:.1f}s")


def test_criterion_04_transparency():
    with criterion(4, "overhead transparency") as notes:
        transparency, _, states, traces = trace_checks()
        assert not transparency, f"{len(transparency)} violations, first {transparency[0]}"
        notes.append(f"{traces} traces, {states} states")


def test_criterion_05_projection_reflection():
    with criterion(5, "beta projection and reflection") as notes:
        betas, projection = 0, []
        for i, t in enumerate(small_terms()):
            trace = exam_run(t, "set", seed=i, fuel=300, keep_states=True)
            betas += trace.beta_count
            projection += projection_violations(trace)
        for trace in (set_golden_trace(), stack_golden_trace()):
            betas += trace.beta_count
            projection += projection_violations(trace)
        sampled = sample_states(small_terms(), 300, seed=5, fuel=300, keep=_reflection_candidate)
        reflection = [v for _, s in sampled for v in reflection_violations(s)]
        assert betas >= 100 and len(sampled) >= 100, f"{betas} betas, {len(sampled)} states"
        assert not projection, projection[0]
        assert not reflection, reflection[0]
        notes.append(f"{betas} beta steps, {len(sampled)} o-normal states")


def test_criterion_06_measure():
    with criterion(6, "overhead termination measure") as notes:
        sampled = sample_states(small_terms(size=8), 300, seed=6, fuel=200)
        problems = [v for _, s in sampled for v in measure_violations(s)]
        assert len(sampled) >= 100 and not problems, problems[:1]
        notes.append(f"{len(sampled)} states")


def test_criterion_07_diamond():
    with criterion(7, "set EXAM diamond up to equivalence") as notes:
        # looping subterms keep the pool at a single job, so branch-rich terms are drawn without them
        terms = small_terms(200, p_loop=0.0, p_lam=0.3)
        sampled = sample_states(terms, 300, seed=7, fuel=300, keep=_branching)
        problems = [v for _, s in sampled for v in diamond_violations(s)]
        assert len(sampled) >= 200 and not problems, problems[:1]
        notes.append(f"{len(sampled)} branching states")


def test_criterion_08_invariants():
    with criterion(8, "EXAM invariants") as notes:
        _, invariants, states, traces = trace_checks()
        assert not invariants, f"{len(invariants)} violations, first {invariants[0]}"
        for clause, s in negative_controls():
            assert validate_invariants(s).violations == [clause], f"control for {clause}"
        notes.append(f"{traces} traces, {states} states, 3 controls fail as targeted")


def test_criterion_09_backtracking():
    with criterion(9, "backtracking MAM baseline") as notes:
        compared = 0
        for t, stack, _ in corpus_outcomes():
            if stack.outcome != FINAL:
                continue
            back = bmam_run(t, fuel=BMAM_FUEL)
            assert back.outcome == FINAL, f"bmam ran out of fuel on {pretty(t)}"
            assert back.beta_count == stack.beta_count and alpha_eq(back.result, stack.result), pretty(t)
            compared += 1
        t = parse(f"(\\x. \\y. x) z ({OMEGA})")
        z = parse("z")
        for run in (exam_run(t, "stack"), bmam_run(t)):
            assert run.outcome == FINAL and run.result == z and run.beta_count == 2
        for seed in range(20):
            assert normalize(t, "external", fuel=10, seed=seed) == (z, 2)
        notes.append(f"{compared} corpus terms agree; outermost example gives z in 2")


def test_criterion_10_least_level():
    with criterion(10, "least-level first beta"):
        t = parse("x (x ((\\a. a) y)) ((\\b. b) z)")
        trace = exam_run(t, "least-level")
        first = next(s for s in trace.steps if s.label is Label.BETA)
        assert first.address == ("r",) and redex_level(t, first.address) == 1
        lm = leftmost_step(t).at
        assert lm == ("l", "r", "r") and redex_level(t, lm) == 2


def test_criterion_11_fairness():
    with criterion(11, "fair template completes the terminating job") as notes:
        t = parse(f"x ({OMEGA}) ((\\y. y) z)")
        budget = 2000
        fair = completion_step(t, "fair", ("r",), budget)
        stack = completion_step(t, "stack", ("r",), budget)
        assert fair is not None and stack is None, (fair, stack)
        notes.append(f"fair done after {fair} steps, stack not within {budget}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
