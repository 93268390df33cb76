"""Seeded random lambda-term corpora for differential and property checks."""
from __future__ import annotations

import random
from typing import List

from .syntax import App, Lam, Name, Term, Var

BINDERS = "xyzuvwpqst"
FREE = ("a", "b", "c")


def gen_term(
    rng: random.Random, size: int, mode: str = "closed", p_lam: float = 0.45, p_loop: float = 0.7
) -> Term:
    """A term with exactly ``size`` abstraction and application nodes.

    In ``"closed"`` mode every variable is bound; in ``"open"`` mode leaves
    may also be one of the free variables ``a``, ``b``, ``c``.

    Uniformly grown terms almost always normalize, so with probability
    ``p_loop`` a node with room for it becomes the self-applying shape
    ``(λx. x x) (λx. x x t)``, which loops unless it gets erased.
    """
    if mode not in ("closed", "open"):
        raise ValueError(f"mode must be 'closed' or 'open', not {mode!r}")

    def go(n: int, scope: List[Name]) -> Term:
        pool = scope + [Name(f) for f in FREE] if mode == "open" else scope
        if n == 0:
            return Var(pool[rng.randrange(len(pool))])
        if not pool or rng.random() < p_lam:
            x = Name(BINDERS[len(scope) % len(BINDERS)])
            return Lam(x, go(n - 1, scope + [x]))
        if n >= 6 and rng.random() < p_loop:
            x = Name(BINDERS[len(scope) % len(BINDERS)])
            delta = Lam(x, App(Var(x), Var(x)))
            return App(delta, Lam(x, App(App(Var(x), Var(x)), go(n - 6, scope + [x]))))
        k = rng.randrange(n)
        return App(go(k, scope), go(n - 1 - k, scope))

    return go(size, [])


def gen_terms(
    count: int, size: int, seed: int = 0, mode: str = "closed", p_lam: float = 0.45, p_loop: float = 0.7
) -> List[Term]:
    """``count`` terms whose sizes are drawn uniformly from ``1..size``."""
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    return [gen_term(rng, rng.randint(1, size), mode, p_lam, p_loop) for _ in range(count)]
