"""Model properties: coherence, the two acyclicity notions, outcome counts.

Every check returns a result object that is truthy when the property holds and
carries a witness when it does not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .core import Assignment, Intervention, Signature
from .model import Gsem, Sem, equation_args, _offsets

MAX_ORDER_VARS = 8


@dataclass(frozen=True)
class Result:
    holds: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class CoherenceWitness:
    context: Assignment
    base: Intervention
    extra: Intervention
    outcome: Assignment

    def __str__(self):
        return (f"in context {self.context}, {self.outcome} is an outcome of [{self.base}] "
                f"agreeing with [{self.extra}] but not an outcome of [{self.base.compose(self.extra)}]")


def is_coherent(m: Gsem) -> Result:
    """Outcomes of I that already agree with a further intervention survive it."""
    sig = m.sig
    for c, u in enumerate(sig.contexts()):
        row = m.table[c]
        for k, i in enumerate(sig.allowed):
            for kj, j in enumerate(sig.allowed):
                if kj == k or not j.extends(i):
                    continue
                lost = row[k] & sig.effective_mask(j) & ~row[kj]
                if lost:
                    first = (lost & -lost).bit_length() - 1
                    extra = Intervention(tuple(b for b in j.bindings if b not in i.bindings))
                    v = Assignment(sig.endo_vars, sig.endo_values(first))
                    return Result(False, CoherenceWitness(u, i, extra, v))
    return Result(True)


@dataclass(frozen=True)
class CountWitness:
    context: Assignment
    intervention: Intervention
    outcomes: frozenset

    def __str__(self):
        shown = ", ".join(sorted(str(v) for v in self.outcomes)) or "nothing"
        return f"[{self.intervention}] in context {self.context} has outcomes {{{shown}}}"


def _count_check(m: Gsem, ok) -> Result:
    sig = m.sig
    for c, u in enumerate(sig.contexts()):
        for k, i in enumerate(sig.allowed):
            if not ok(bin(m.table[c][k]).count("1")):
                return Result(False, CountWitness(u, i, sig.mask_to_assignments(m.table[c][k])))
    return Result(True)


def has_ge1(m: Gsem) -> Result:
    return _count_check(m, lambda n: n >= 1)


def has_le1(m: Gsem) -> Result:
    return _count_check(m, lambda n: n <= 1)


def count_outcomes_class(m: Gsem) -> dict[str, Result]:
    return {"ge1": has_ge1(m), "le1": has_le1(m)}


# -- acyclicity -------------------------------------------------------------

@dataclass(frozen=True)
class OrderViolation:
    """``var`` cannot follow ``before``: changing it moves the restriction to ``compared``."""

    context: Assignment
    before: tuple[str, ...]
    var: str
    base: Intervention
    value: str
    other_value: str
    compared: tuple[str, ...]
    restriction: frozenset
    other_restriction: frozenset

    def __str__(self):
        def fmt(s):
            return "{" + ", ".join("(" + ",".join(t) + ")" for t in sorted(s)) + "}"
        base = f"{self.base}; " if len(self.base) else ""
        return (f"context {self.context}, order {' < '.join(self.before + (self.var,))}: "
                f"[{base}{self.var}<-{self.value}] gives {fmt(self.restriction)} on "
                f"({','.join(self.compared)}) but [{base}{self.var}<-{self.other_value}] gives "
                f"{fmt(self.other_restriction)}")


@dataclass(frozen=True)
class AcyclicityResult:
    holds: bool
    orders: dict = field(default_factory=dict)  # context values -> order found
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.holds

    @property
    def witness(self):
        return self.violations


def _groups(sig: Signature, var: str) -> list[list[tuple[str, int]]]:
    """Allowed interventions binding ``var``, grouped by what they do to the other variables."""
    by_base: dict[Intervention, list[tuple[str, int]]] = {}
    for k, i in enumerate(sig.allowed):
        if i.binds(var):
            by_base.setdefault(i.without(var), []).append((i.get(var), k))
    return [g for g in by_base.values() if len(g) > 1]


def _projection(sig: Signature, mask: int, positions: tuple[int, ...]) -> frozenset:
    out = set()
    k = 0
    while mask:
        if mask & 1:
            vals = sig.endo_values(k)
            out.add(tuple(vals[p] for p in positions))
        mask >>= 1
        k += 1
    return frozenset(out)


def _acyclicity(m: Gsem, joint: bool) -> AcyclicityResult:
    sig = m.sig
    vars = sig.endo_vars
    n = len(vars)
    if n > MAX_ORDER_VARS:
        raise ValueError(f"order search is capped at {MAX_ORDER_VARS} endogenous variables")
    groups = {x: _groups(sig, x) for x in vars}
    orders = {}
    for c, u in enumerate(sig.contexts()):
        row = m.table[c]
        memo: dict[tuple[int, frozenset], OrderViolation | None] = {}

        def clash(x: int, compared: tuple[int, ...], before: tuple[str, ...]):
            for group in groups[vars[x]]:
                (v0, k0) = group[0]
                r0 = _projection(sig, row[k0], compared)
                for v1, k1 in group[1:]:
                    r1 = _projection(sig, row[k1], compared)
                    if r0 != r1:
                        base = sig.allowed[k0].without(vars[x])
                        return OrderViolation(u, before, vars[x], base, v0, v1,
                                              tuple(vars[p] for p in compared), r0, r1)
            return None

        def blocker(x: int, prefix: tuple[int, ...]):
            """Why ``x`` cannot come right after ``prefix`` (None when it can)."""
            key = (x, frozenset(prefix))
            if key not in memo:
                before = tuple(vars[p] for p in prefix)
                if joint:
                    memo[key] = clash(x, tuple(sorted(prefix)), before)
                else:
                    memo[key] = None
                    for p in sorted(prefix):
                        hit = clash(x, (p,), before)
                        if hit:
                            memo[key] = hit
                            break
            return memo[key]

        # DP over predecessor sets: reach[S] holds an order of S that works so far
        reach: dict[frozenset, tuple[int, ...]] = {frozenset(): ()}
        frontier = [frozenset()]
        for _ in range(n):
            nxt = []
            for s in frontier:
                prefix = reach[s]
                for x in range(n):
                    if x in s:
                        continue
                    t = s | {x}
                    if t in reach:
                        continue
                    if blocker(x, prefix) is None:
                        reach[t] = prefix + (x,)
                        nxt.append(t)
            frontier = nxt
        full = frozenset(range(n))
        if full not in reach:
            violations = []
            for s, prefix in reach.items():
                stuck = [blocker(x, prefix) for x in range(n) if x not in s]
                if all(stuck):
                    violations.extend(stuck)
            violations.sort(key=lambda v: (-len(v.before), v.before, v.var))
            return AcyclicityResult(False, orders, tuple(violations))
        orders[u.values] = tuple(vars[p] for p in reach[full])
    return AcyclicityResult(True, orders)


def is_acyclic_acyc1(m: Gsem) -> AcyclicityResult:
    """Per context, an order where intervening on X never moves the joint outcomes of earlier variables."""
    return _acyclicity(m, joint=True)


def is_acyclic_acyc2(m: Gsem) -> AcyclicityResult:
    """Like Acyc1 but comparing earlier variables one at a time."""
    return _acyclicity(m, joint=False)


def sem_dependencies(m: Sem, c: int) -> dict[str, set[str]]:
    """Endogenous variables each equation actually depends on in context ``c``."""
    sig = m.sig
    deps = {}
    for pos, x in enumerate(sig.endo_vars):
        table = m.tables[pos]
        ctx_off, endo_off = _offsets(sig, x)
        found = set()
        for y_pos, y in enumerate(sig.endo_vars):
            if y == x:
                continue
            for k in range(sig.space_size):
                vals = list(sig.endo_values(k))
                a = table[ctx_off[c] + endo_off[k]]
                for alt in sig.range(y):
                    if alt == vals[y_pos]:
                        continue
                    vals2 = list(vals)
                    vals2[y_pos] = alt
                    k2 = sig.endo_index(vals2)
                    if table[ctx_off[c] + endo_off[k2]] != a:
                        found.add(y)
                        break
                if y in found:
                    break
        deps[x] = found
    return deps


def is_acyclic_sem(m: Sem) -> AcyclicityResult:
    """Per context, an order in which each equation ignores every later variable."""
    sig = m.sig
    orders = {}
    for c, u in enumerate(sig.contexts()):
        deps = sem_dependencies(m, c)
        order: list[str] = []
        remaining = list(sig.endo_vars)
        while remaining:
            ready = [x for x in remaining if deps[x] <= set(order)]
            if not ready:
                cycle = tuple(sorted(remaining))
                return AcyclicityResult(False, orders, (("cycle", u, cycle,
                                                         {x: sorted(deps[x]) for x in cycle}),))
            order.append(ready[0])
            remaining.remove(ready[0])
        orders[u.values] = tuple(order)
    return AcyclicityResult(True, orders)


def classify(m: Gsem) -> dict[str, object]:
    return {
        "coh": is_coherent(m),
        "acyc": is_acyclic_acyc1(m),
        "ge1": has_ge1(m),
        "le1": has_le1(m),
    }


def in_class(m: Gsem, cls: Iterable[str]) -> bool:
    checks = {"coh": is_coherent, "acyc": is_acyclic_acyc1, "ge1": has_ge1, "le1": has_le1}
    return all(checks[p](m).holds for p in cls)
