"""Machine-free reference reducers used as oracles for the machines.

Redexes are located by addresses (tuples over ``"l"``, ``"r"``, ``"λ"``).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

from .syntax import Address, App, Lam, Term, Var, alpha_key, subst, subterm_at, term_size

__all__ = [
    "FuelExhausted", "Reduced", "is_neutral", "is_normal", "is_redex",
    "redexes", "contract", "whnf_step", "leftmost_step", "external_redexes",
    "redex_level", "least_level_redexes", "normalize", "diamond_check",
    "external_reducts",
]


class FuelExhausted(RuntimeError):
    """The step budget ran out; says nothing about divergence."""

    def __init__(self, message: str = "fuel exhausted", last=None, steps: int = 0):
        super().__init__(message)
        self.last = last
        self.steps = steps


@dataclass(frozen=True)
class Reduced:
    next: Term
    at: Address


def is_redex(t) -> bool:
    return isinstance(t, App) and isinstance(t.fun, Lam)


def is_neutral(t: Term) -> bool:
    while isinstance(t, App):
        if not is_normal(t.arg):
            return False
        t = t.fun
    return isinstance(t, Var)


def is_normal(t: Term) -> bool:
    while isinstance(t, Lam):
        t = t.body
    return is_neutral(t)


def redexes(t: Term) -> List[Address]:
    """Addresses of all beta-redexes of ``t``, in left-to-right pre-order."""
    found = []
    stack: List[Tuple[Term, Address]] = [(t, ())]
    while stack:
        u, a = stack.pop()
        if isinstance(u, App):
            if isinstance(u.fun, Lam):
                found.append(a)
            stack.append((u.arg, a + ("r",)))
            stack.append((u.fun, a + ("l",)))
        elif isinstance(u, Lam):
            stack.append((u.body, a + ("λ",)))
    return found


def _replace_at(t: Term, a: Address, new: Term) -> Term:
    if not a:
        return new
    c, rest = a[0], a[1:]
    if c == "l":
        return App(_replace_at(t.fun, rest, new), t.arg)
    if c == "r":
        return App(t.fun, _replace_at(t.arg, rest, new))
    return Lam(t.binder, _replace_at(t.body, rest, new))


def contract(t: Term, a: Address) -> Term:
    r = subterm_at(t, a)
    if not is_redex(r):
        raise ValueError(f"no beta-redex at address {a!r}")
    return _replace_at(t, a, subst(r.fun.body, r.fun.binder, r.arg))


def _spine(t: Term) -> Tuple[Term, List[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, args[::-1]


def _step_at(t: Term, a: Optional[Address]) -> Optional[Reduced]:
    if a is None:
        return None
    return Reduced(contract(t, a), a)


def whnf_step(t: Term) -> Optional[Reduced]:
    """Contract the head redex under applicative contexts; None if there is none."""
    head, args = _spine(t)
    if isinstance(head, Lam) and args:
        return _step_at(t, ("l",) * (len(args) - 1))
    return None


def _leftmost_addr(t: Term) -> Optional[Address]:
    # L ::= N | λx.L ;  N ::= ⟨·⟩ | n L | N t
    prefix: Address = ()
    while isinstance(t, Lam):
        prefix += ("λ",)
        t = t.body
    head, args = _spine(t)
    if isinstance(head, Lam):
        return prefix + ("l",) * (len(args) - 1)
    for i, arg in enumerate(args):
        inner = _leftmost_addr(arg)
        if inner is not None:
            return prefix + ("l",) * (len(args) - 1 - i) + ("r",) + inner
    return None


def leftmost_step(t: Term) -> Optional[Reduced]:
    return _step_at(t, _leftmost_addr(t))


def external_redexes(t: Term) -> FrozenSet[Address]:
    """Redexes ``a`` such that ``t = B<redex>`` for an external context ``B`` hole at ``a``."""
    # B ::= λx1..xk.S ;  S ::= ⟨·⟩ t1..tn | x u1..um B t1..tn
    out = set()
    stack: List[Tuple[Term, Address]] = [(t, ())]
    while stack:
        u, prefix = stack.pop()
        while isinstance(u, Lam):
            prefix += ("λ",)
            u = u.body
        head, args = _spine(u)
        if isinstance(head, Lam):
            if args:
                out.add(prefix + ("l",) * (len(args) - 1))
            continue
        n = len(args)
        for i, arg in enumerate(args):
            stack.append((arg, prefix + ("l",) * (n - 1 - i) + ("r",)))
    return frozenset(out)


def redex_level(t: Term, a: Address) -> int:
    if not is_redex(subterm_at(t, a)):
        raise ValueError(f"no beta-redex at address {a!r}")
    return sum(1 for c in a if c == "r")


def least_level_redexes(t: Term) -> FrozenSet[Address]:
    found = redexes(t)
    if not found:
        return frozenset()
    levels = {a: a.count("r") for a in found}
    low = min(levels.values())
    return frozenset(a for a, lv in levels.items() if lv == low)


def _pick(choices, rng: random.Random) -> Address:
    ordered = sorted(choices)
    return ordered[rng.randrange(len(ordered))]


def normalize(
    t: Term, picker: str = "leftmost", fuel: int = 1000, seed: int = 0, max_size: Optional[int] = 5_000
) -> Tuple[Term, int]:
    """Reduce ``t`` to normal form with at most ``fuel`` beta-steps.

    ``picker`` is one of ``"leftmost"``, ``"external"``, ``"least-level"``;
    the latter two choose among their redexes with a seeded RNG.
    Raises :class:`FuelExhausted` when the budget runs out, or when an
    intermediate term grows past ``max_size`` nodes (``None`` disables it).
    """
    rng = random.Random(seed)
    steps = 0
    while True:
        if picker == "leftmost":
            a = _leftmost_addr(t)
        elif picker == "external":
            cands = external_redexes(t)
            a = _pick(cands, rng) if cands else None
        elif picker == "least-level":
            cands = least_level_redexes(t)
            a = _pick(cands, rng) if cands else None
        else:
            raise ValueError(f"unknown picker {picker!r}")
        if a is None:
            return t, steps
        if steps >= fuel:
            raise FuelExhausted(last=t, steps=steps)
        t = contract(t, a)
        steps += 1
        if max_size is not None and term_size(t, max_size) > max_size:
            raise FuelExhausted(last=t, steps=steps)


def external_reducts(t: Term, among=None) -> List[Term]:
    addrs = external_redexes(t) if among is None else among
    return [contract(t, a) for a in sorted(addrs)]


def diamond_check(t: Term, among=None) -> bool:
    """Brute-force the one-step diamond for the given external redexes of ``t``."""
    reducts = external_reducts(t, among)
    for i in range(len(reducts)):
        for j in range(i + 1, len(reducts)):
            u1, u2 = reducts[i], reducts[j]
            if alpha_key(u1) == alpha_key(u2):
                continue
            left = {alpha_key(r) for r in external_reducts(u1)}
            if not any(alpha_key(r) in left for r in external_reducts(u2)):
                return False
    return True
