"""Terms, named multi-contexts, substitution, fresh renaming and addresses.

Terms are immutable trees built from :class:`Var`, :class:`Lam` and
:class:`App`.  Multi-contexts reuse the same constructors plus
:class:`Hole`.  Bound names are taken literally (pre-terms); alpha
conversion only happens through :func:`subst` and :func:`rename_fresh`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

__all__ = [
    "Name", "HoleName", "Var", "Lam", "App", "Hole", "Term", "MultiCtx",
    "NameSupply", "ParseError", "parse", "parse_ctx", "pretty",
    "free_vars", "binders", "hole_names", "subst", "plug", "alpha_eq",
    "alpha_key", "plug_many", "rename_fresh", "is_well_named", "subterm_at",
    "format_address", "parse_address", "max_index", "term_size", "tidy",
]


@dataclass(frozen=True, slots=True, order=True)
class Name:
    base: str
    index: int = 0

    def __str__(self) -> str:
        return self.base if self.index == 0 else f"{self.base}#{self.index}"


@dataclass(frozen=True, slots=True, order=True)
class HoleName:
    id: int

    def __str__(self) -> str:
        return f"α{self.id}"


@dataclass(frozen=True, slots=True)
class Var:
    name: Name

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, slots=True)
class Lam:
    binder: Name
    body: "MultiCtx"

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, slots=True)
class App:
    fun: "MultiCtx"
    arg: "MultiCtx"

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, slots=True)
class Hole:
    name: HoleName

    def __str__(self) -> str:
        return pretty(self)


Term = Union[Var, Lam, App]
MultiCtx = Union[Var, Lam, App, Hole]
Address = Tuple[str, ...]


# --------------------------------------------------------------------------
# fresh names

@dataclass(frozen=True, slots=True)
class NameSupply:
    """Monotone counter shared by fresh variables and fresh hole names.

    Index 0 is reserved for unsuffixed names, so variables never receive it.
    """

    counter: int = 0

    @classmethod
    def above(cls, *terms: MultiCtx) -> "NameSupply":
        top = max((max_index(t) for t in terms), default=-1)
        return cls(top + 1)

    def fresh_name(self, base: str) -> Tuple[Name, "NameSupply"]:
        n = max(self.counter, 1)
        return Name(base, n), NameSupply(n + 1)

    def fresh_hole(self) -> Tuple[HoleName, "NameSupply"]:
        return HoleName(self.counter), NameSupply(self.counter + 1)

    def fresh_holes(self, n: int) -> Tuple[List[HoleName], "NameSupply"]:
        ids = [HoleName(self.counter + i) for i in range(n)]
        return ids, NameSupply(self.counter + n)


def max_index(t: MultiCtx) -> int:
    """Largest suffix index or hole id in ``t``; -1 when there is none."""
    best = -1
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            if u.name.index:
                best = max(best, u.name.index)
        elif isinstance(u, Lam):
            if u.binder.index:
                best = max(best, u.binder.index)
            stack.append(u.body)
        elif isinstance(u, App):
            stack.append(u.fun)
            stack.append(u.arg)
        else:
            best = max(best, u.name.id)
    return best


# --------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s+|--[^\n]*"
    r"|(?P<hole>⟨·⟩α(?P<hid>\d+))"
    r"|(?P<ident>[A-Za-z]+(?:#(?P<idx>\d+))?)"
    r"|(?P<sym>[\\λ.()])"
)


def _tokenize(text: str) -> List[Tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("hole"):
            tokens.append(("hole", HoleName(int(m.group("hid"))), pos))
        elif m.group("ident"):
            base = m.group("ident").split("#")[0]
            idx = int(m.group("idx")) if m.group("idx") else 0
            tokens.append(("ident", Name(base, idx), pos))
        elif m.group("sym"):
            sym = m.group("sym")
            tokens.append(("sym", "\\" if sym == "λ" else sym, pos))
        pos = m.end()
    tokens.append(("eof", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_holes: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_holes = allow_holes

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.advance()
        if kind != "sym" or val != value:
            raise ParseError(f"expected {value!r}", pos)

    def term(self) -> MultiCtx:
        kind, val, pos = self.peek()
        if kind == "sym" and val == "\\":
            return self.lam()
        head = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind in ("ident", "hole") or (kind == "sym" and val == "("):
                head = App(head, self.atom())
            elif kind == "sym" and val == "\\":
                # abstraction as last argument extends to the right
                return App(head, self.lam())
            else:
                return head

    def lam(self) -> MultiCtx:
        self.expect("\\")
        names = []
        while self.peek()[0] == "ident":
            names.append(self.advance()[1])
        if not names:
            raise ParseError("expected binder", self.peek()[2])
        self.expect(".")
        body = self.term()
        for name in reversed(names):
            body = Lam(name, body)
        return body

    def atom(self) -> MultiCtx:
        kind, val, pos = self.advance()
        if kind == "ident":
            return Var(val)
        if kind == "hole":
            if not self.allow_holes:
                raise ParseError("hole not allowed in a term", pos)
            return Hole(val)
        if kind == "sym" and val == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError("expected a term", pos)

    def done(self) -> None:
        kind, _, pos = self.peek()
        if kind != "eof":
            raise ParseError("trailing input", pos)


def parse(text: str) -> Term:
    """Parse concrete syntax such as ``(\\x. x) y`` into a term."""
    p = _Parser(text, allow_holes=False)
    t = p.term()
    p.done()
    return t


def parse_ctx(text: str) -> MultiCtx:
    """Like :func:`parse` but also accepts holes written ``⟨·⟩α3``."""
    p = _Parser(text, allow_holes=True)
    t = p.term()
    p.done()
    return t


# --------------------------------------------------------------------------
# printing

def pretty(
    t: MultiCtx,
    name: Callable[[Name], str] = str,
    hole: Callable[[HoleName], str] = lambda h: f"⟨·⟩{h}",
) -> str:
    """Render with minimal parentheses; ``parse(pretty(t)) == t``."""
    out: List[str] = []

    def go(u: MultiCtx, tail: bool) -> None:
        if isinstance(u, Var):
            out.append(name(u.name))
        elif isinstance(u, Hole):
            out.append(hole(u.name))
        elif isinstance(u, Lam):
            if not tail:
                out.append("(")
            out.append(f"\\{name(u.binder)}. ")
            go(u.body, True)
            if not tail:
                out.append(")")
        else:
            spine = []
            while isinstance(u, App):
                spine.append(u.arg)
                u = u.fun
            if isinstance(u, Lam):
                go(u, False)
            else:
                go(u, True)
            args = spine[::-1]
            for k, a in enumerate(args):
                out.append(" ")
                if isinstance(a, App):
                    out.append("(")
                    go(a, True)
                    out.append(")")
                else:
                    go(a, tail and k == len(args) - 1)

    go(t, True)
    return "".join(out)


# --------------------------------------------------------------------------
# names, substitution, alpha

def free_vars(t: MultiCtx) -> frozenset:
    acc: set = set()

    def go(u: MultiCtx, bound: frozenset) -> None:
        while True:
            if isinstance(u, Var):
                if u.name not in bound:
                    acc.add(u.name)
                return
            if isinstance(u, Lam):
                bound = bound | {u.binder}
                u = u.body
            elif isinstance(u, App):
                go(u.fun, bound)
                u = u.arg
            else:
                return

    go(t, frozenset())
    return frozenset(acc)


def binders(t: MultiCtx) -> Iterator[Name]:
    """Every binding occurrence of ``t``, with repetitions."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Lam):
            yield u.binder
            stack.append(u.body)
        elif isinstance(u, App):
            stack.append(u.arg)
            stack.append(u.fun)


def hole_names(t: MultiCtx) -> List[HoleName]:
    """Hole names of ``t`` left to right, with repetitions."""
    found = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Hole):
            found.append(u.name)
        elif isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, App):
            stack.append(u.arg)
            stack.append(u.fun)
    return found


def _rename_var(t: MultiCtx, old: Name, new: Name) -> MultiCtx:
    if isinstance(t, Var):
        return Var(new) if t.name == old else t
    if isinstance(t, Lam):
        if t.binder == old:
            return t
        return Lam(t.binder, _rename_var(t.body, old, new))
    if isinstance(t, App):
        return App(_rename_var(t.fun, old, new), _rename_var(t.arg, old, new))
    return t


def subst(t: MultiCtx, x: Name, u: MultiCtx, supply: Optional[NameSupply] = None) -> MultiCtx:
    """Capture-avoiding ``t{x:=u}``.

    A binder is renamed only when it would actually capture a free variable
    of ``u``; otherwise the result shares every untouched subtree with ``t``.
    """
    fv_u = free_vars(u)
    state = [supply]

    def fresh(base: str) -> Name:
        if state[0] is None:
            state[0] = NameSupply.above(t, u)
        n, state[0] = state[0].fresh_name(base)
        return n

    def go(s: MultiCtx) -> MultiCtx:
        if isinstance(s, Var):
            return u if s.name == x else s
        if isinstance(s, Lam):
            if s.binder == x:
                return s
            if s.binder in fv_u:
                if x not in free_vars(s.body):
                    return s
                y = fresh(s.binder.base)
                return Lam(y, go(_rename_var(s.body, s.binder, y)))
            body = go(s.body)
            return s if body is s.body else Lam(s.binder, body)
        if isinstance(s, App):
            f, a = go(s.fun), go(s.arg)
            if f is s.fun and a is s.arg:
                return s
            return App(f, a)
        return s

    return go(t)


def plug(c: MultiCtx, alpha: HoleName, filler: MultiCtx) -> MultiCtx:
    """Capture-allowing replacement of the hole ``alpha`` by ``filler``."""

    def go(s: MultiCtx) -> MultiCtx:
        if isinstance(s, Hole):
            return filler if s.name == alpha else s
        if isinstance(s, Lam):
            b = go(s.body)
            return s if b is s.body else Lam(s.binder, b)
        if isinstance(s, App):
            f, a = go(s.fun), go(s.arg)
            return s if (f is s.fun and a is s.arg) else App(f, a)
        return s

    return go(c)


def alpha_key(t: MultiCtx):
    """Hashable key equal for exactly the alpha-equivalent terms."""

    def go(s: MultiCtx, env: Dict[Name, int], depth: int):
        if isinstance(s, Var):
            if s.name in env:
                return ("b", depth - env[s.name])
            return ("f", s.name)
        if isinstance(s, Lam):
            inner = dict(env)
            inner[s.binder] = depth + 1
            return ("λ", go(s.body, inner, depth + 1))
        if isinstance(s, App):
            return ("@", go(s.fun, env, depth), go(s.arg, env, depth))
        return ("h", s.name)

    return go(t, {}, 0)


def alpha_eq(t: MultiCtx, u: MultiCtx) -> bool:
    return alpha_key(t) == alpha_key(u)


def rename_fresh(t: MultiCtx, supply: NameSupply) -> Tuple[MultiCtx, NameSupply]:
    """Rename every binder of ``t`` to a name drawn from ``supply``.

    Free variables are untouched.  The result is well-named.
    """
    state = [supply]

    def go(s: MultiCtx, env: Dict[Name, Name]) -> MultiCtx:
        if isinstance(s, Var):
            return Var(env[s.name]) if s.name in env else s
        if isinstance(s, Lam):
            y, state[0] = state[0].fresh_name(s.binder.base)
            inner = dict(env)
            inner[s.binder] = y
            return Lam(y, go(s.body, inner))
        if isinstance(s, App):
            return App(go(s.fun, env), go(s.arg, env))
        return s

    if not any(True for _ in binders(t)):
        return t, supply
    out = go(t, {})
    return out, state[0]


def tidy(t: MultiCtx) -> MultiCtx:
    """An alpha-equivalent copy whose binders use the smallest free index of their base.

    Binders never shadow an enclosing binder or a free variable, so the
    result prints without ambiguity.
    """
    taken = set(free_vars(t))

    def go(s: MultiCtx, env: Dict[Name, Name], used: FrozenSet[Name]) -> MultiCtx:
        if isinstance(s, Var):
            return Var(env[s.name]) if s.name in env else s
        if isinstance(s, Lam):
            k = 0
            while Name(s.binder.base, k) in used:
                k += 1
            y = Name(s.binder.base, k)
            return Lam(y, go(s.body, {**env, s.binder: y}, used | {y}))
        if isinstance(s, App):
            return App(go(s.fun, env, used), go(s.arg, env, used))
        return s

    return go(t, {}, frozenset(taken))


def is_well_named(t: MultiCtx) -> bool:
    seen = set()
    for b in binders(t):
        if b in seen:
            return False
        seen.add(b)
    return True


def term_size(t: MultiCtx, limit: Optional[int] = None) -> int:
    """Node count of ``t``; stops counting once ``limit`` is exceeded."""
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if limit is not None and n > limit:
            return n
        if isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, App):
            stack.append(u.fun)
            stack.append(u.arg)
    return n


# --------------------------------------------------------------------------
# addresses

def subterm_at(t: MultiCtx, a: Iterable[str]) -> Optional[MultiCtx]:
    """Sub-term at address ``a``, or ``None`` when the path does not fit."""
    for c in a:
        if c == "l" and isinstance(t, App):
            t = t.fun
        elif c == "r" and isinstance(t, App):
            t = t.arg
        elif c == "λ" and isinstance(t, Lam):
            t = t.body
        else:
            return None
    return t


def format_address(a: Address) -> str:
    return "/".join(a) if a else "ε"


def parse_address(text: str) -> Address:
    text = text.strip()
    if text in ("", "ε"):
        return ()
    parts = tuple(text.split("/"))
    for p in parts:
        if p not in ("l", "r", "λ"):
            raise ValueError(f"bad address letter {p!r}")
    return parts


def plug_many(c: MultiCtx, fillers: Dict[HoleName, MultiCtx]) -> MultiCtx:
    """Plug several holes at once (capture-allowing)."""
    if not fillers:
        return c

    def go(s: MultiCtx) -> MultiCtx:
        if isinstance(s, Hole):
            return fillers.get(s.name, s)
        if isinstance(s, Lam):
            b = go(s.body)
            return s if b is s.body else Lam(s.binder, b)
        if isinstance(s, App):
            f, a = go(s.fun), go(s.arg)
            return s if (f is s.fun and a is s.arg) else App(f, a)
        return s

    return go(c)
