"""Propositional tautology checking and seeded tautology generation.

Two notions of atom are used. In event mode every primitive event ``X=x`` is an
independent proposition, so ``X=0 | X=1`` is not a tautology. In box mode each
box subformula (after diamonds are rewritten as negated boxes) is an atom.
"""

from __future__ import annotations

import random
from typing import Callable

from .errors import TooManyAtoms
from .lang import (
    And,
    Bot,
    Box,
    Diamond,
    Formula,
    Implies,
    Not,
    Or,
    Prim,
    Top,
    normalize,
)

MAX_ATOMS = 20
MAX_GENERATED_ATOMS = 12


def atoms(f: Formula, mode: str) -> list[Formula]:
    """Distinct atoms in first-occurrence order."""
    target = Prim if mode == "event" else Box
    if mode not in ("event", "box"):
        raise ValueError("mode must be 'event' or 'box'")
    g = normalize(f) if mode == "box" else f
    seen: dict[Formula, None] = {}

    def walk(h):
        if isinstance(h, target):
            seen.setdefault(h)
        elif isinstance(h, Not):
            walk(h.arg)
        elif isinstance(h, (And, Or)):
            for a in h.args:
                walk(a)
        elif isinstance(h, Implies):
            walk(h.left)
            walk(h.right)
        elif isinstance(h, (Box, Diamond)):
            raise ValueError("event-mode tautology check met a box or diamond")
        elif isinstance(h, Prim):
            raise ValueError("box-mode tautology check met a bare primitive event")

    walk(g)
    return list(seen)


def check_taut(f: Formula, mode: str = "event", limit: int = MAX_ATOMS) -> bool:
    """Truth-table check, evaluated bit-parallel over all rows at once."""
    found = atoms(f, mode)
    n = len(found)
    if n > limit:
        raise TooManyAtoms(n, limit)
    rows = 1 << n
    full = (1 << rows) - 1
    column = {}
    for k, a in enumerate(found):
        # row r gives atom k the value of bit k of r
        block = (1 << (1 << k)) - 1
        pattern = block << (1 << k)
        period = 1 << (k + 1)
        # repeat the pattern every ``period`` rows
        column[a] = pattern * (full // ((1 << period) - 1))
    g = normalize(f) if mode == "box" else f
    return _eval(g, column, full) == full


def _eval(f: Formula, column: dict, full: int) -> int:
    if f in column:
        return column[f]
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return full & ~_eval(f.arg, column, full)
    if isinstance(f, And):
        m = full
        for a in f.args:
            m &= _eval(a, column, full)
        return m
    if isinstance(f, Or):
        m = 0
        for a in f.args:
            m |= _eval(a, column, full)
        return m
    if isinstance(f, Implies):
        return (full & ~_eval(f.left, column, full)) | _eval(f.right, column, full)
    raise TypeError(f"unexpected node {f!r}")


# Each template takes three formulas and returns a propositional tautology.
TEMPLATES: list[Callable[[Formula, Formula, Formula], Formula]] = [
    lambda p, q, r: Implies(p, p),
    lambda p, q, r: Or((p, Not(p))),
    lambda p, q, r: Not(And((p, Not(p)))),
    lambda p, q, r: Implies(And((p, q)), p),
    lambda p, q, r: Implies(p, Or((p, q))),
    lambda p, q, r: Implies(p, Implies(q, p)),
    lambda p, q, r: Implies(Implies(p, q), Implies(Not(q), Not(p))),
    lambda p, q, r: Implies(And((Implies(p, q), Implies(q, r))), Implies(p, r)),
    lambda p, q, r: Or((Implies(p, q), Implies(q, p))),
    lambda p, q, r: Implies(Not(And((p, q))), Or((Not(p), Not(q)))),
    lambda p, q, r: Implies(And((p, Implies(p, q))), q),
    lambda p, q, r: Implies(Or((p, q)), Or((q, p))),
    lambda p, q, r: Implies(Not(Not(p)), p),
    lambda p, q, r: Implies(And((p, Or((q, r)))), Or((And((p, q)), And((p, r))))),
    lambda p, q, r: Implies(Implies(p, Implies(q, r)), Implies(Implies(p, q), Implies(p, r))),
]


def generate_tautologies(leaf: Callable[[random.Random], Formula], mode: str,
                         count: int, seed: int = 0,
                         max_atoms: int = MAX_GENERATED_ATOMS) -> list[Formula]:
    """``count`` distinct tautologies built by substituting random leaves into templates."""
    rng = random.Random(seed)
    out: list[Formula] = []
    seen = set()
    tries = 0
    while len(out) < count and tries < count * 50:
        tries += 1
        t = TEMPLATES[len(out) % len(TEMPLATES)] if tries <= len(TEMPLATES) else rng.choice(TEMPLATES)
        f = t(leaf(rng), leaf(rng), leaf(rng))
        if f in seen:
            continue
        try:
            if len(atoms(f, mode)) > max_atoms or not check_taut(f, mode):
                continue
        except TooManyAtoms:
            continue
        seen.add(f)
        out.append(f)
    return out

