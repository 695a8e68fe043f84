"""Structural equation models and generalized structural equation models.

A ``Gsem`` stores, for every context and every allowed intervention, the set of
outcomes as a bitmask over the signature's full endogenous assignments. A ``Sem``
stores one total lookup table per endogenous variable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .core import (
    NULL,
    Assignment,
    Intervention,
    Signature,
    cap_from_env,
)
from .errors import CapExceeded, SignatureMismatch, UnknownVariable

ContextRef = Assignment | Sequence[str] | int


def _ctx_index(sig: Signature, u: ContextRef) -> int:
    if isinstance(u, int):
        if not 0 <= u < sig.n_contexts:
            raise ValueError(f"context index {u} out of range")
        return u
    return sig.context_index(u)


@dataclass(frozen=True)
class Gsem:
    sig: Signature
    table: tuple[tuple[int, ...], ...]  # [context][allowed intervention] -> outcome mask

    def __post_init__(self):
        table = tuple(tuple(int(m) for m in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.sig.n_contexts:
            raise ValueError("outcome table needs one row per context")
        for c, row in enumerate(table):
            if len(row) != len(self.sig.allowed):
                raise ValueError("outcome table needs one entry per allowed intervention")
            for k, (i, mask) in enumerate(zip(self.sig.allowed, row)):
                if mask & ~self.sig.effective_mask(i):
                    raise ValueError(f"not effective: an outcome of [{i}] in context {c} "
                                     "disagrees with the intervention")

    @classmethod
    def from_outcomes(cls, sig: Signature,
                      outcomes: Mapping[tuple[ContextRef, Intervention], Iterable[Assignment]]) -> "Gsem":
        table = [[None] * len(sig.allowed) for _ in range(sig.n_contexts)]
        for (u, i), vs in outcomes.items():
            table[_ctx_index(sig, u)][sig.allowed_index(i)] = sig.assignments_to_mask(vs)
        for c, row in enumerate(table):
            for k, m in enumerate(row):
                if m is None:
                    raise ValueError(f"no outcome set for context {sig.contexts()[c]} "
                                     f"and [{sig.allowed[k]}]")
        return cls(sig, tuple(tuple(r) for r in table))

    def mask(self, u: ContextRef, i: Intervention) -> int:
        return self.table[_ctx_index(self.sig, u)][self.sig.allowed_index(i)]

    def outcomes(self, u: ContextRef, i: Intervention) -> frozenset[Assignment]:
        return self.sig.mask_to_assignments(self.mask(u, i))


@dataclass(frozen=True)
class Sem:
    """One total table per endogenous variable.

    The table for ``X`` is indexed by the values of ``equation_args(sig, X)`` (all
    exogenous variables, then the other endogenous ones) in lexicographic order.
    """

    sig: Signature
    tables: tuple[tuple[str, ...], ...]  # aligned with sig.endo_vars

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(tuple(t) for t in self.tables))
        if len(self.tables) != len(self.sig.endo_vars):
            raise ValueError("need one equation per endogenous variable")
        for x, t in zip(self.sig.endo_vars, self.tables):
            if len(t) != _domain_size(self.sig, x):
                raise ValueError(f"equation for {x!r} is not total")
            bad = [v for v in t if v not in self.sig.range(x)]
            if bad:
                raise ValueError(f"equation for {x!r} produces out-of-range value {bad[0]!r}")

    @classmethod
    def from_functions(cls, sig: Signature, funcs: Mapping[str, object]) -> "Sem":
        """Build from callables ``f(args: dict) -> value`` or constants."""
        tables = []
        for x in sig.endo_vars:
            f = funcs[x]
            args = equation_args(sig, x)
            rows = []
            for combo in itertools.product(*(sig.range(a) for a in args)):
                rows.append(str(f(dict(zip(args, combo))) if callable(f) else f))
            tables.append(tuple(rows))
        return cls(sig, tuple(tables))

    def table(self, x: str) -> tuple[str, ...]:
        try:
            return self.tables[self.sig.endo_vars.index(x)]
        except ValueError:
            raise UnknownVariable(x) from None


def equation_args(sig: Signature, x: str) -> tuple[str, ...]:
    return sig.exo_vars + tuple(v for v in sig.endo_vars if v != x)


def _domain_size(sig: Signature, x: str) -> int:
    n = 1
    for a in equation_args(sig, x):
        n *= len(sig.range(a))
    return n


def _row_index(sig: Signature, args: Sequence[str], values: Mapping[str, str]) -> int:
    idx = 0
    for a in args:
        r = sig.range(a)
        idx = idx * len(r) + r.index(values[a])
    return idx


def eval_equation(m: Sem, x: str, args: Mapping[str, str]) -> str:
    """Value of the equation for ``x`` at a complete argument assignment."""
    needed = equation_args(m.sig, x)
    missing = [a for a in needed if a not in args]
    if missing:
        raise ValueError(f"equation for {x!r} needs values for {missing}")
    for a in needed:
        m.sig.check_value(a, args[a])
    return m.table(x)[_row_index(m.sig, needed, args)]


def intervene_sem(m: Sem, i: Intervention) -> Sem:
    """Replace the equation of every intervened variable with a constant.

    Works for any intervention over the endogenous variables, allowed or not.
    """
    m.sig.check_intervention(i)
    tables = []
    for x, t in zip(m.sig.endo_vars, m.tables):
        tables.append((i.get(x),) * len(t) if i.binds(x) else t)
    return Sem(m.sig, tuple(tables))


def solve_sem(m: Sem, u: ContextRef, i: Intervention = NULL) -> frozenset[Assignment]:
    """Every endogenous assignment satisfying the intervened equations in context ``u``.

    Exhaustive; the result may be empty or contain several assignments.
    """
    sig = m.sig
    ctx = sig.contexts()[_ctx_index(sig, u)]
    mi = intervene_sem(m, i)
    out = []
    for v in sig.endo_assignments():
        values = dict(ctx.items())
        values.update(v.items())
        if all(eval_equation(mi, x, values) == v[x] for x in sig.endo_vars):
            out.append(v)
    return frozenset(out)


def _offsets(sig: Signature, x: str) -> tuple[list[int], list[int]]:
    """Row index of the table for ``x`` split as ctx_offset[c] + endo_offset[k]."""
    key = ("offsets", x)
    cache = sig._cache
    if key in cache:
        return cache[key]
    args = equation_args(sig, x)
    weights = {}
    w = 1
    for a in reversed(args):
        weights[a] = w
        w *= len(sig.range(a))
    ctx_off = []
    for vals in (c.values for c in sig.contexts()):
        ctx_off.append(sum(weights[a] * sig.range(a).index(val)
                           for a, val in zip(sig.exo_vars, vals)))
    endo_off = []
    for k in range(sig.space_size):
        vals = sig.endo_values(k)
        endo_off.append(sum(weights[a] * sig.range(a).index(val)
                            for a, val in zip(sig.endo_vars, vals) if a != x))
    cache[key] = (ctx_off, endo_off)
    return cache[key]


def equation_masks(m: Sem, c: int) -> list[int]:
    """For each endogenous variable, the assignments satisfying its equation in context ``c``."""
    sig = m.sig
    out = []
    for pos, (x, t) in enumerate(zip(sig.endo_vars, m.tables)):
        ctx_off, endo_off = _offsets(sig, x)
        base = ctx_off[c]
        mask = 0
        for k in range(sig.space_size):
            if t[base + endo_off[k]] == sig.endo_values(k)[pos]:
                mask |= 1 << k
        out.append(mask)
    return out


def sem_to_gsem(m: Sem, sig: Signature | None = None) -> Gsem:
    """The GSEM answering every allowed intervention with the SEM's solution set.

    ``sig`` may widen or narrow the allowed interventions; its variables and ranges
    must match the SEM's.
    """
    target = sig or m.sig
    if (target.exo, target.endo) != (m.sig.exo, m.sig.endo):
        raise SignatureMismatch("target signature has different variables or ranges")
    endo = target.endo_vars
    rows = []
    for c in range(target.n_contexts):
        eq = equation_masks(m, c)
        row = []
        for i in target.allowed:
            mask = target.effective_mask(i)
            for pos, x in enumerate(endo):
                if not i.binds(x):
                    mask &= eq[pos]
            row.append(mask)
        rows.append(tuple(row))
    return Gsem(target, tuple(rows))


def equivalent(m1: Gsem, m2: Gsem) -> bool:
    if m1.sig != m2.sig:
        raise SignatureMismatch("models are over different signatures")
    return m1.table == m2.table


def count_sems(sig: Signature) -> int:
    n = 1
    for x in sig.endo_vars:
        n *= len(sig.range(x)) ** _domain_size(sig, x)
    return n


def enumerate_sems(sig: Signature, cap: int | None = None) -> Iterator[Sem]:
    """Every SEM over ``sig`` in lexicographic order of the equation tables."""
    cap = cap_from_env() if cap is None else cap
    total = count_sems(sig)
    if total > cap:
        raise CapExceeded(total, cap, "SEMs")
    per_var = [itertools.product(sig.range(x), repeat=_domain_size(sig, x)) for x in sig.endo_vars]
    for tables in itertools.product(*(list(p) for p in per_var)):
        yield Sem(sig, tables)


def random_sem(sig: Signature, rng: random.Random) -> Sem:
    tables = []
    for x in sig.endo_vars:
        r = sig.range(x)
        tables.append(tuple(rng.choice(r) for _ in range(_domain_size(sig, x))))
    return Sem(sig, tuple(tables))


def random_acyclic_sem(sig: Signature, rng: random.Random) -> Sem:
    """A random SEM whose equations respect a random order (shared by all contexts)."""
    order = list(sig.endo_vars)
    rng.shuffle(order)
    rank = {x: k for k, x in enumerate(order)}
    tables = []
    for x in sig.endo_vars:
        args = equation_args(sig, x)
        earlier = [a for a in args if a in sig.exo_vars or rank[a] < rank[x]]
        lookup: dict[tuple, str] = {}
        rows = []
        for combo in itertools.product(*(sig.range(a) for a in args)):
            key = tuple(v for a, v in zip(args, combo) if a in earlier)
            if key not in lookup:
                lookup[key] = rng.choice(sig.range(x))
            rows.append(lookup[key])
        tables.append(tuple(rows))
    return Sem(sig, tuple(tables))


# -- GSEM enumeration -------------------------------------------------------

def _submasks(mask: int) -> list[int]:
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return sorted(out)


def cell_candidates(sig: Signature, i: Intervention, cls: Iterable[str] = ()) -> list[int]:
    """Outcome masks an effective model may give ``i``, honouring ge1/le1 in ``cls``."""
    cls = set(cls)
    eff = sig.effective_mask(i)
    if "le1" in cls:
        singles = [1 << k for k in range(eff.bit_length()) if eff >> k & 1]
        return singles if "ge1" in cls else [0] + singles
    out = []
    for m in _submasks(eff):
        n = bin(m).count("1")
        if "ge1" in cls and n == 0:
            continue
        if "le1" in cls and n > 1:
            continue
        out.append(m)
    return out


def _cell_count(size: int, cls) -> int:
    """Number of outcome sets for a cell with ``size`` effective assignments."""
    if "ge1" in cls and "le1" in cls:
        return size
    if "le1" in cls:
        return size + 1
    return 2 ** size - 1 if "ge1" in cls else 2 ** size


def count_gsems(sig: Signature, cls: Iterable[str] = ()) -> int:
    """Size of the raw search space (before coherence and acyclicity filtering)."""
    cls = set(cls)
    n = 1
    for i in sig.allowed:
        n *= _cell_count(bin(sig.effective_mask(i)).count("1"), cls) ** sig.n_contexts
    return n


def _draw_cell(eff: int, cls, rng: random.Random) -> int:
    """A uniformly random outcome set for one cell, drawn without listing the candidates."""
    bits = [1 << k for k in range(eff.bit_length()) if eff >> k & 1]
    if "le1" in cls:
        options = bits if "ge1" in cls else bits + [0]
        return rng.choice(options) if options else 0
    while True:
        mask = rng.getrandbits(eff.bit_length()) & eff
        if mask or "ge1" not in cls or not eff:
            return mask


def _forced_row(sig: Signature, cls, constraints, rng: random.Random) -> list[int] | None:
    """Draw cells in allowed order, adding the outcomes coherence forces from earlier cells."""
    row = []
    for k, i in enumerate(sig.allowed):
        mask = _draw_cell(sig.effective_mask(i), cls, rng)
        for sub, eff in constraints[k]:
            mask |= row[sub] & eff
        if "le1" in cls and bin(mask).count("1") > 1:
            return None
        row.append(mask)
    return row


def _coherence_constraints(sig: Signature) -> list[list[tuple[int, int]]]:
    """For each allowed J, the allowed strict sub-interventions I paired with J's effective mask."""
    out = []
    for j in sig.allowed:
        eff = sig.effective_mask(j)
        out.append([(k, eff) for k, i in enumerate(sig.allowed) if i != j and j.extends(i)])
    return out


def enumerate_gsems(sig: Signature, cls: Iterable[str] = (), cap: int | None = None) -> Iterator[Gsem]:
    """All effective GSEMs over ``sig`` that belong to the class ``cls``.

    The order is lexicographic in the (context, intervention) cells. Coherence is
    pruned during the search and acyclicity filtered at the leaves, which yields
    exactly the filtered product. ``cap`` bounds the raw search space; pass ``0``
    to disable the check.
    """
    from .properties import is_acyclic_acyc1

    cls = frozenset(cls)
    cap = cap_from_env() if cap is None else cap
    total = count_gsems(sig, cls)
    if cap and total > cap:
        raise CapExceeded(total, cap, "GSEMs")
    cands = [cell_candidates(sig, i, cls) for i in sig.allowed]
    constraints = _coherence_constraints(sig) if "coh" in cls else [[] for _ in sig.allowed]
    n_int = len(sig.allowed)
    n_cells = sig.n_contexts * n_int
    chosen = [0] * n_cells
    pos = [0] * n_cells

    def fits(cell: int, mask: int) -> bool:
        c, k = divmod(cell, n_int)
        base = c * n_int
        for sub, eff in constraints[k]:
            if chosen[base + sub] & eff & ~mask:
                return False
        return True

    cell = 0
    pos[0] = -1
    while cell >= 0:
        k = cell % n_int
        pos[cell] += 1
        options = cands[k]
        while pos[cell] < len(options) and not fits(cell, options[pos[cell]]):
            pos[cell] += 1
        if pos[cell] >= len(options):
            cell -= 1
            continue
        chosen[cell] = options[pos[cell]]
        if cell + 1 == n_cells:
            rows = tuple(tuple(chosen[c * n_int:(c + 1) * n_int]) for c in range(sig.n_contexts))
            g = Gsem(sig, rows)
            if "acyc" not in cls or is_acyclic_acyc1(g).holds:
                yield g
            continue
        cell += 1
        pos[cell] = -1


LISTED_CELL_LIMIT = 4096


def random_gsem(sig: Signature, rng: random.Random, cls: Iterable[str] = (),
                max_tries: int = 10_000) -> Gsem:
    """A random member of ``cls``: uniform per cell, then randomized backtracking for coherence.

    Cells with too many candidate sets are drawn directly and coherence is met by
    adding the outcomes it forces, so those models are not uniform over the class.

    Acyclicity is met by rejection; raises ``RuntimeError`` after ``max_tries`` misses.
    """
    from .properties import is_acyclic_acyc1

    cls = frozenset(cls)
    constraints = _coherence_constraints(sig) if "coh" in cls else [[] for _ in sig.allowed]
    small = all(_cell_count(bin(sig.effective_mask(i)).count("1"), cls) <= LISTED_CELL_LIMIT
                for i in sig.allowed)
    cands = [cell_candidates(sig, i, cls) for i in sig.allowed] if small else None
    for _ in range(max_tries):
        rows = []
        for _c in range(sig.n_contexts):
            if small:
                row = _random_row(cands, constraints, rng)
            else:
                row = _forced_row(sig, cls, constraints, rng)
            if row is None:
                break
            rows.append(tuple(row))
        else:
            g = Gsem(sig, tuple(rows))
            if "acyc" not in cls or is_acyclic_acyc1(g).holds:
                return g
    raise RuntimeError(f"no member of the class found after {max_tries} tries")


def _random_row(cands, constraints, rng: random.Random, budget: int = 10_000):
    n = len(cands)
    row = [0] * n
    orders = [None] * n
    pos = [0] * n
    k = 0
    orders[0] = rng.sample(cands[0], len(cands[0]))
    pos[0] = -1
    steps = 0
    while k >= 0:
        steps += 1
        if steps > budget:
            return None
        pos[k] += 1
        while pos[k] < len(orders[k]):
            mask = orders[k][pos[k]]
            if all(not (row[sub] & eff & ~mask) for sub, eff in constraints[k]):
                break
            pos[k] += 1
        if pos[k] >= len(orders[k]):
            k -= 1
            continue
        row[k] = orders[k][pos[k]]
        if k + 1 == n:
            return row
        k += 1
        orders[k] = rng.sample(cands[k], len(cands[k]))
        pos[k] = -1
    return None
