"""Input checks shared by the estimator wrapper and the command line."""
from __future__ import annotations

from typing import Iterable, List, Union

from .pools import TEMPLATES
from .syntax import App, Lam, Term, Var, parse

MACHINES = ("mam", "bmam", "exam")


def check_term(x: Union[str, Term]) -> Term:
    if isinstance(x, (Var, Lam, App)):
        return x
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"expected a term or its text, got {type(x).__name__}")


def check_terms(X: Union[str, Term, Iterable[Union[str, Term]]]) -> List[Term]:
    """Coerce one term, one term text, or an iterable of either, to a list of terms."""
    if isinstance(X, (str, Var, Lam, App)):
        return [check_term(X)]
    try:
        items = list(X)
    except TypeError:
        raise TypeError(f"expected terms, got {type(X).__name__}") from None
    return [check_term(x) for x in items]


def check_machine(machine: str) -> str:
    if machine not in MACHINES:
        raise ValueError(f"unknown machine {machine!r}; expected one of {', '.join(MACHINES)}")
    return machine


def check_template(template: str) -> str:
    if template not in TEMPLATES:
        raise ValueError(f"unknown pool template {template!r}; expected one of {', '.join(TEMPLATES)}")
    return template


def check_natural(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"{what} must be a natural number, got {value!r}")
    return value
