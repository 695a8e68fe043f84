"""Slow reference implementations written straight from the definitions.

These use plain dicts and sets only, never the bitmask machinery, so agreement
with the library is evidence rather than a tautology.
"""

from __future__ import annotations

import itertools

from gsemkit.lang import And, Bot, Box, Diamond, Implies, Not, Or, Prim, Top


def full_assignments(sig):
    names = list(sig.endo_vars)
    return [dict(zip(names, combo)) for combo in itertools.product(*(sig.range(v) for v in names))]


def contexts(sig):
    names = list(sig.exo_vars)
    return [dict(zip(names, combo)) for combo in itertools.product(*(sig.range(v) for v in names))]


def sat_event(v: dict, e) -> bool:
    if isinstance(e, Top):
        return True
    if isinstance(e, Bot):
        return False
    if isinstance(e, Prim):
        return v[e.var] == e.value
    if isinstance(e, Not):
        return not sat_event(v, e.arg)
    if isinstance(e, And):
        return all(sat_event(v, a) for a in e.args)
    if isinstance(e, Or):
        return any(sat_event(v, a) for a in e.args)
    if isinstance(e, Implies):
        return (not sat_event(v, e.left)) or sat_event(v, e.right)
    raise TypeError(e)


def outcome_dicts(m, u_index: int, i) -> list[dict]:
    u = m.sig.contexts()[u_index]
    return [v.as_dict() for v in m.outcomes(u, i)]


def check(m, u_index: int, f) -> bool:
    """Satisfaction of a causal formula at a context, from the outcome sets."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Box):
        return all(sat_event(v, f.event) for v in outcome_dicts(m, u_index, f.intervention))
    if isinstance(f, Diamond):
        return any(sat_event(v, f.event) for v in outcome_dicts(m, u_index, f.intervention))
    if isinstance(f, Not):
        return not check(m, u_index, f.arg)
    if isinstance(f, And):
        return all(check(m, u_index, a) for a in f.args)
    if isinstance(f, Or):
        return any(check(m, u_index, a) for a in f.args)
    if isinstance(f, Implies):
        return (not check(m, u_index, f.left)) or check(m, u_index, f.right)
    raise TypeError(f)


def valid(m, f) -> bool:
    return all(check(m, c, f) for c in range(m.sig.n_contexts))


def sem_solutions(m, u: dict, fixed: dict) -> list[dict]:
    """Every full assignment where each non-intervened variable obeys its equation."""
    sig = m.sig
    out = []
    for v in full_assignments(sig):
        if any(v[x] != val for x, val in fixed.items()):
            continue
        env = {**u, **v}
        ok = True
        for x in sig.endo_vars:
            if x in fixed:
                continue
            args = [a for a in sig.exo_vars] + [y for y in sig.endo_vars if y != x]
            idx = 0
            for a in args:
                idx = idx * len(sig.range(a)) + sig.range(a).index(env[a])
            if m.table(x)[idx] != v[x]:
                ok = False
                break
        if ok:
            out.append(v)
    return out


def coherent(m) -> bool:
    """F(I) outcomes that agree with the extra bindings of J survive in F(J)."""
    sig = m.sig
    for c, u in enumerate(sig.contexts()):
        for i in sig.allowed:
            for j in sig.allowed:
                if j == i or not all(j.get(x) == val for x, val in i.bindings):
                    continue
                later = [v.as_dict() for v in m.outcomes(u, j)]
                for v in m.outcomes(u, i):
                    d = v.as_dict()
                    if all(d[x] == val for x, val in j.bindings) and d not in later:
                        return False
    return True


def _projection(outcomes, vars):
    return {tuple(o[x] for x in vars) for o in outcomes}


def acyclic(m, strong: bool) -> bool:
    """Search every ordering per context for one meeting the Acyc1 (strong) or Acyc2 condition.

    For the k-th variable X in the order and any I (allowed or not) not binding X such that
    I;X<-x and I;X<-x' are both allowed, the outcomes must agree on the variables
    earlier in the order: jointly (strong) or one variable at a time (weak).
    """
    from gsemkit.core import all_interventions
    sig = m.sig
    allowed = set(sig.allowed)
    bases = all_interventions(sig.endo_vars, sig.ranges)
    for u in sig.contexts():
        found = False
        for order in itertools.permutations(sig.endo_vars):
            ok = True
            for k, x in enumerate(order):
                before = order[:k]
                for i in bases:
                    if i.binds(x):
                        continue
                    outs = {}
                    for val in sig.range(x):
                        j = i.compose(type(i).of({x: val}))
                        if j in allowed:
                            outs[val] = [v.as_dict() for v in m.outcomes(u, j)]
                    vals = list(outs)
                    for a, b in itertools.combinations(vals, 2):
                        if strong:
                            if not before:
                                same = bool(outs[a]) == bool(outs[b])
                            else:
                                same = _projection(outs[a], before) == _projection(outs[b], before)
                        else:
                            same = all(_projection(outs[a], (y,)) == _projection(outs[b], (y,))
                                       for y in before)
                        if not same:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                found = True
                break
        if not found:
            return False
    return True


def all_gsems(sig):
    """Every effective GSEM over ``sig`` by product over per-cell subsets."""
    from gsemkit.model import Gsem
    cells = []
    for i in sig.allowed:
        fitting = [v for v in full_assignments(sig) if all(v[x] == val for x, val in i.bindings)]
        cells.append([frozenset(map(lambda d: tuple(sorted(d.items())), s))
                      for k in range(len(fitting) + 1)
                      for s in itertools.combinations(fitting, k)])
    per_context = list(itertools.product(*cells))
    for rows in itertools.product(per_context, repeat=sig.n_contexts):
        outcomes = {}
        for u, row in zip(sig.contexts(), rows):
            for i, cell in zip(sig.allowed, row):
                outcomes[(u, i)] = [_to_assignment(sig, dict(t)) for t in cell]
        yield Gsem.from_outcomes(sig, outcomes)


def _to_assignment(sig, d):
    from gsemkit.core import Assignment
    return Assignment(sig.endo_vars, tuple(d[x] for x in sig.endo_vars))


def gsem_equal(a, b) -> bool:
    sig = a.sig
    return all(a.outcomes(u, i) == b.outcomes(u, i) for u in sig.contexts() for i in sig.allowed)


def is_tautology(f, vars_of) -> bool:
    """Truth table over the atoms returned by ``vars_of``; atoms are independent."""
    atoms = sorted(set(vars_of(f)), key=repr)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        env = dict(zip(atoms, bits))
        if not _prop_eval(f, env):
            return False
    return True


def _prop_eval(f, env):
    if f in env:
        return env[f]
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not _prop_eval(f.arg, env)
    if isinstance(f, And):
        return all(_prop_eval(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(_prop_eval(a, env) for a in f.args)
    if isinstance(f, Implies):
        return (not _prop_eval(f.left, env)) or _prop_eval(f.right, env)
    raise KeyError(f)
