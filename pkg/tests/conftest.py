import json
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lamexam.generate import gen_term
from lamexam.syntax import App, Lam, Name, Var, parse

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NAMES = [Name(c) for c in "xyzw"]


def _terms(children):
    return st.one_of(
        st.builds(Lam, st.sampled_from(NAMES), children),
        st.builds(App, children, children),
    )


# arbitrary pre-terms: free variables, repeated binders and shadowing included
terms = st.recursive(st.builds(Var, st.sampled_from(NAMES)), _terms, max_leaves=12)


@st.composite
def generated(draw, size=10, mode="open"):
    """Terms from the package's own generator, driven by a hypothesis seed."""
    seed = draw(st.integers(0, 2**32 - 1))
    return gen_term(random.Random(seed), draw(st.integers(1, size)), mode)


I_ = "(\\y. y)"
EXAMPLE = parse("x ((\\y. y) z) ((\\w. w w) z)")
OMEGA = "(\\u. u u) (\\u. u u)"


@pytest.fixture
def example_term():
    return EXAMPLE


GOLDEN = Path(__file__).parent / "golden"
PAPER_HOLES = ["α", "β", "γ", "γ'"]


def load_golden(name):
    return [json.loads(line) for line in (GOLDEN / name).read_text(encoding="utf-8").splitlines() if line]


def table_rows(trace):
    """Rows of a kept-states EXAM run in the example tables' notation.

    Variables print by base name and holes get the tables' Greek names in
    order of creation.
    """
    from lamexam.exam import render_state
    from lamexam.syntax import hole_names

    ids = sorted({h.id for s in trace.states for h in hole_names(s.approximant)})
    greek = {i: PAPER_HOLES[k] for k, i in enumerate(ids)}
    name, hole = (lambda n: n.base), (lambda h: greek[h.id])
    rows = []
    for i, s in enumerate(trace.states):
        row = render_state(s, name=name, hole=hole)
        step = trace.steps[i] if i < len(trace.steps) else None
        row["transition"] = step.label.value if step else ""
        row["job"] = hole(step.job) if step else ""
        rows.append(row)
    return rows, greek


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
