"""Formulas: events, causal formulas, parser, printer and small constructions.

Concrete syntax::

    [X<-1, Y<-0](Z=1 & !W=0)      box
    <X<-1>(Z=1 | Z=0)             diamond
    !  &  |  ->                   connectives, tightest first; -> is right-associative
    X!=1                          sugar for !(X=1)
    true  false

Events are Boolean combinations of primitive events ``X=x``. Causal formulas are
Boolean combinations of boxes and diamonds whose bodies are events.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .core import Assignment, Intervention, Signature
from .errors import (
    CapExceeded,
    DisallowedIntervention,
    FormulaSyntaxError,
    OutOfRangeValue,
    UnknownVariable,
)

LEADSTO_CAP = 10**6


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bot:
    def __str__(self):
        return "false"


TRUE = Top()
FALSE = Bot()


@dataclass(frozen=True)
class Prim:
    var: str
    value: str

    def __str__(self):
        return f"{self.var}={self.value}"


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands; use conj()")

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands; use disj()")

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Box:
    intervention: Intervention
    event: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Diamond:
    intervention: Intervention
    event: "Formula"

    def __str__(self):
        return print_formula(self)


Formula = Union[Top, Bot, Prim, Not, And, Or, Implies, Box, Diamond]


# -- construction helpers ---------------------------------------------------

def conj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def neg(f: Formula) -> Formula:
    return Not(f)


def iff(a: Formula, b: Formula) -> Formula:
    return And((Implies(a, b), Implies(b, a)))


def box(bindings, event: Formula) -> Box:
    i = bindings if isinstance(bindings, Intervention) else Intervention.of(bindings)
    return Box(i, event)


def diamond(bindings, event: Formula) -> Diamond:
    i = bindings if isinstance(bindings, Intervention) else Intervention.of(bindings)
    return Diamond(i, event)


def is_event(f: Formula) -> bool:
    return not any(isinstance(g, (Box, Diamond)) for g in subformulas(f))


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk, descending into box and diamond bodies."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from subformulas(a)
    elif isinstance(f, Implies):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Box, Diamond)):
        yield from subformulas(f.event)


def interventions_in(f: Formula) -> list[Intervention]:
    seen: dict[Intervention, None] = {}
    for g in subformulas(f):
        if isinstance(g, (Box, Diamond)):
            seen.setdefault(g.intervention)
    return list(seen)


def mentioned_values(f: Formula, var: str) -> set[str]:
    """Values of ``var`` that occur in ``f``, in primitive events or interventions."""
    out = set()
    for g in subformulas(f):
        if isinstance(g, Prim) and g.var == var:
            out.add(g.value)
        elif isinstance(g, (Box, Diamond)) and g.intervention.binds(var):
            out.add(g.intervention.get(var))
    return out


@lru_cache(maxsize=1 << 16)
def normalize(f: Formula) -> Formula:
    """Rewrite diamonds as negated boxes and fold double negations and negated constants."""
    if isinstance(f, Diamond):
        return _fold_not(Box(f.intervention, normalize(Not(f.event))))
    if isinstance(f, Box):
        return Box(f.intervention, normalize(f.event))
    if isinstance(f, Not):
        return _fold_not(normalize(f.arg))
    if isinstance(f, And):
        return And(tuple(normalize(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(normalize(a) for a in f.args))
    if isinstance(f, Implies):
        return Implies(normalize(f.left), normalize(f.right))
    return f


def _fold_not(g: Formula) -> Formula:
    if isinstance(g, Not):
        return g.arg
    if isinstance(g, Top):
        return FALSE
    if isinstance(g, Bot):
        return TRUE
    return Not(g)


def same_formula(a: Formula, b: Formula) -> bool:
    return normalize(a) == normalize(b)


# -- validation -------------------------------------------------------------

def validate(f: Formula, sig: Signature, check_allowed: bool = True) -> None:
    """Raise if ``f`` mentions unknown variables, out-of-range values or disallowed interventions."""
    for g in subformulas(f):
        if isinstance(g, Prim):
            if g.var not in sig.endo_vars:
                raise UnknownVariable(g.var)
            if g.value not in sig.range(g.var):
                raise OutOfRangeValue(g.var, g.value)
        elif isinstance(g, (Box, Diamond)):
            sig.check_intervention(g.intervention)
            if check_allowed and not sig.is_allowed(g.intervention):
                raise DisallowedIntervention(g.intervention)


# -- lexer and parser -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(<-|->|!=|[\[\]<>(),!&|=])|([A-Za-z0-9_.]+))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # punctuation itself, "name" or "end"
    text: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(_Tok(m.group(1), m.group(1), start))
        else:
            toks.append(_Tok("name", m.group(2), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise FormulaSyntaxError(f"{msg}, found {found}", tok.pos, self.text)

    def take(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            self.fail(f"expected {kind!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def finish(self):
        if self.tok.kind != "end":
            self.fail("unexpected trailing input")

    # the same precedence ladder serves both layers; ``events`` selects the atoms
    def implies(self, events: bool) -> Formula:
        left = self.disj(events)
        if self.accept("->"):
            return Implies(left, self.implies(events))
        return left

    def disj(self, events: bool) -> Formula:
        items = [self.conj(events)]
        while self.accept("|"):
            items.append(self.conj(events))
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj(self, events: bool) -> Formula:
        items = [self.unary(events)]
        while self.accept("&"):
            items.append(self.unary(events))
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self, events: bool) -> Formula:
        if self.accept("!"):
            return Not(self.unary(events))
        return self.atom(events)

    def atom(self, events: bool) -> Formula:
        t = self.tok
        if t.kind == "name" and t.text in ("true", "false") and self.toks[self.i + 1].kind not in ("=", "!="):
            self.i += 1
            return TRUE if t.text == "true" else FALSE
        if self.accept("("):
            f = self.implies(events)
            self.take(")")
            return f
        if events:
            if t.kind != "name":
                self.fail("expected an event")
            self.i += 1
            if self.accept("="):
                return Prim(t.text, self.take("name").text)
            if self.accept("!="):
                return Not(Prim(t.text, self.take("name").text))
            self.fail(f"expected '=' after variable {t.text!r}")
        if self.accept("["):
            i = self.bindings("]")
            return Box(i, self.unary(True))
        if self.accept("<"):
            i = self.bindings(">")
            return Diamond(i, self.unary(True))
        if t.kind == "name":
            self.fail("primitive events must sit inside a box or diamond")
        self.fail("expected a formula")

    def bindings(self, close: str) -> Intervention:
        pairs = []
        if self.accept(close):
            return Intervention()
        while True:
            var = self.take("name")
            self.take("<-")
            val = self.take("name")
            if any(v == var.text for v, _ in pairs):
                raise FormulaSyntaxError(f"variable {var.text!r} bound twice", var.pos, self.text)
            pairs.append((var.text, val.text))
            if self.accept(close):
                return Intervention(tuple(pairs))
            self.take(",")


def parse_formula(text: str, sig: Signature | None = None, check_allowed: bool = True) -> Formula:
    p = _Parser(text)
    f = p.implies(events=False)
    p.finish()
    if sig is not None:
        validate(f, sig, check_allowed)
    return f


def parse_event(text: str, sig: Signature | None = None) -> Formula:
    p = _Parser(text)
    f = p.implies(events=True)
    p.finish()
    if sig is not None:
        validate(f, sig)
    return f


def parse_intervention(text: str, sig: Signature | None = None) -> Intervention:
    """Parse ``X<-1, Y<-0`` with or without surrounding brackets."""
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        body = f"[{body}]"
    p = _Parser(body)
    p.take("[")
    i = p.bindings("]")
    p.finish()
    if sig is not None:
        sig.check_intervention(i)
    return i


# -- printer ----------------------------------------------------------------

def _prec(f: Formula) -> int:
    if isinstance(f, Implies):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    if isinstance(f, Not) and not isinstance(f.arg, Prim):
        return 4
    return 5


def _wrap(f: Formula, need: int) -> str:
    s = print_formula(f)
    return f"({s})" if _prec(f) < need else s


def print_formula(f: Formula) -> str:
    """Canonical concrete syntax; ``parse_formula(print_formula(f)) == f``."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Prim):
        return f"{f.var}={f.value}"
    if isinstance(f, Not):
        if isinstance(f.arg, Prim):
            return f"{f.arg.var}!={f.arg.value}"
        return "!" + _wrap(f.arg, 4)
    if isinstance(f, And):
        return " & ".join(_wrap(a, 4) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a, 3) for a in f.args)
    if isinstance(f, Implies):
        return f"{_wrap(f.left, 2)} -> {_wrap(f.right, 1)}"
    if isinstance(f, Box):
        return f"[{f.intervention}]({print_formula(f.event)})"
    if isinstance(f, Diamond):
        return f"<{f.intervention}>({print_formula(f.event)})"
    raise TypeError(f"not a formula: {f!r}")


# -- JSON -------------------------------------------------------------------

def to_json(f: Formula) -> dict:
    if isinstance(f, Top):
        return {"kind": "true"}
    if isinstance(f, Bot):
        return {"kind": "false"}
    if isinstance(f, Prim):
        return {"kind": "prim", "var": f.var, "value": f.value}
    if isinstance(f, Not):
        return {"kind": "not", "arg": to_json(f.arg)}
    if isinstance(f, (And, Or)):
        return {"kind": "and" if isinstance(f, And) else "or", "args": [to_json(a) for a in f.args]}
    if isinstance(f, Implies):
        return {"kind": "implies", "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, (Box, Diamond)):
        return {"kind": "box" if isinstance(f, Box) else "diamond",
                "intervention": [list(b) for b in f.intervention.bindings],
                "event": to_json(f.event)}
    raise TypeError(f"not a formula: {f!r}")


def from_json(d: dict) -> Formula:
    kind = d["kind"]
    if kind == "true":
        return TRUE
    if kind == "false":
        return FALSE
    if kind == "prim":
        return Prim(d["var"], d["value"])
    if kind == "not":
        return Not(from_json(d["arg"]))
    if kind == "and":
        return And(tuple(from_json(a) for a in d["args"]))
    if kind == "or":
        return Or(tuple(from_json(a) for a in d["args"]))
    if kind == "implies":
        return Implies(from_json(d["left"]), from_json(d["right"]))
    if kind in ("box", "diamond"):
        i = Intervention(tuple(tuple(b) for b in d["intervention"]))
        cls = Box if kind == "box" else Diamond
        return cls(i, from_json(d["event"]))
    raise ValueError(f"unknown formula kind {kind!r}")


# -- derived constructions --------------------------------------------------

def characteristic_event(v: Assignment, sig: Signature | None = None) -> Formula:
    """Conjunction of ``X=v[X]`` over the endogenous variables."""
    vars = sig.endo_vars if sig is not None else v.vars
    return conj(Prim(x, v[x]) for x in vars)


def event_to_dnf(e: Formula) -> list[frozenset]:
    """Disjunctive normal form as a list of literal sets (``Prim`` or ``Not(Prim)``)."""
    def nnf(f: Formula, positive: bool):
        if isinstance(f, Top):
            return [frozenset()] if positive else []
        if isinstance(f, Bot):
            return [] if positive else [frozenset()]
        if isinstance(f, Prim):
            return [frozenset([f if positive else Not(f)])]
        if isinstance(f, Not):
            return nnf(f.arg, not positive)
        if isinstance(f, Implies):
            return nnf(Or((Not(f.left), f.right)), positive)
        if isinstance(f, (And, Or)):
            parts = [nnf(a, positive) for a in f.args]
            if isinstance(f, And) == positive:
                clauses = [frozenset()]
                for part in parts:
                    clauses = [c | d for c in clauses for d in part]
            else:
                clauses = [c for part in parts for c in part]
            return _prune(clauses)
        raise TypeError(f"not an event: {f!r}")

    return nnf(e, True)


def _prune(clauses: list[frozenset]) -> list[frozenset]:
    out = []
    seen = set()
    for c in clauses:
        if any(isinstance(l, Not) and l.arg in c for l in c):
            continue
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _subsets(vars: Sequence[str]) -> Iterator[tuple[str, ...]]:
    for k in range(len(vars) + 1):
        yield from itertools.combinations(vars, k)


def leadsto_formula(y: str, z: str, sig: Signature, cap: int = LEADSTO_CAP) -> Formula:
    """The formula saying that intervening on ``y`` can change the value of ``z``.

    Disjunction over ``X`` (subsets of V-{y}), ``x``, ``y'`` and ``z != z'`` of
    ``[X<-x](z) & [X<-x, y<-y'](z')``; disjuncts using disallowed interventions are dropped.
    """
    for v in (y, z):
        if v not in sig.endo_vars:
            raise UnknownVariable(v)
    others = [v for v in sig.endo_vars if v != y]
    zr = sig.range(z)
    if len(zr) < 2:
        return FALSE
    count = 0
    for subset in _subsets(others):
        n = 1
        for v in subset:
            n *= len(sig.range(v))
        count += n * len(sig.range(y)) * len(zr) * (len(zr) - 1)
    if count > cap:
        raise CapExceeded(count, cap, "leadsto disjuncts")
    disjuncts = []
    for subset in _subsets(others):
        for xs in itertools.product(*(sig.range(v) for v in subset)):
            base = Intervention(tuple(zip(subset, xs)))
            if not sig.is_allowed(base):
                continue
            for yv in sig.range(y):
                moved = base.compose(Intervention(((y, yv),)))
                if not sig.is_allowed(moved):
                    continue
                for zv in zr:
                    for zv2 in zr:
                        if zv != zv2:
                            disjuncts.append(And((Box(base, Prim(z, zv)), Box(moved, Prim(z, zv2)))))
    return disj(disjuncts)


# -- random generation ------------------------------------------------------

def random_event(sig: Signature, rng: random.Random, depth: int = 3) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.08:
            return TRUE
        if r < 0.16:
            return FALSE
        var = rng.choice(sig.endo_vars)
        return Prim(var, rng.choice(sig.range(var)))
    kind = rng.choice(("not", "and", "or", "implies"))
    if kind == "not":
        return Not(random_event(sig, rng, depth - 1))
    if kind == "implies":
        return Implies(random_event(sig, rng, depth - 1), random_event(sig, rng, depth - 1))
    n = rng.randint(2, 3)
    args = tuple(random_event(sig, rng, depth - 1) for _ in range(n))
    return And(args) if kind == "and" else Or(args)


def random_formula(sig: Signature, rng: random.Random, depth: int = 3) -> Formula:
    """A random causal formula whose interventions are all allowed in ``sig``."""
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.05:
            return TRUE
        if r < 0.1:
            return FALSE
        i = rng.choice(sig.allowed)
        cls = Box if rng.random() < 0.5 else Diamond
        return cls(i, random_event(sig, rng, 2))
    kind = rng.choice(("not", "and", "or", "implies"))
    if kind == "not":
        return Not(random_formula(sig, rng, depth - 1))
    if kind == "implies":
        return Implies(random_formula(sig, rng, depth - 1), random_formula(sig, rng, depth - 1))
    n = rng.randint(2, 3)
    args = tuple(random_formula(sig, rng, depth - 1) for _ in range(n))
    return And(args) if kind == "and" else Or(args)
