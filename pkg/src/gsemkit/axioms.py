"""Axiom schemas, axiom systems, instance enumeration and per-model soundness reports."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

from .core import (
    Assignment,
    Intervention,
    Signature,
    all_interventions,
    format_class,
    model_class,
)
from .errors import BadParams, GsemError, NotInLanguage
from .lang import (
    FALSE,
    TRUE,
    And,
    Box,
    Diamond,
    Formula,
    Implies,
    Not,
    Prim,
    characteristic_event,
    conj,
    disj,
    interventions_in,
    leadsto_formula,
    random_event,
    validate,
)
from .model import Gsem
from .semantics import ModelBatch
from .taut import check_taut, generate_tautologies


class SchemaId(str, Enum):
    D0 = "D0"
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D4 = "D4"
    D5 = "D5"
    D6 = "D6"
    D6plus = "D6plus"
    D7 = "D7"
    D8 = "D8"
    D9 = "D9"
    D10a = "D10a"
    D10b = "D10b"

    def __str__(self):
        return self.value


S = SchemaId


@dataclass(frozen=True)
class AxiomSystem:
    name: str
    schemas: frozenset
    rules: frozenset  # subset of {"MP", "D2plus"}
    sound_for: frozenset | None = None  # GSEM class; None means "SEMs"
    acyclic_sems: bool = False

    def __str__(self):
        return self.name


def AXplus() -> AxiomSystem:
    return AxiomSystem("AX+", frozenset({S.D0, S.D1, S.D2, S.D3, S.D4, S.D5, S.D7, S.D8, S.D9}),
                       frozenset({"MP"}))


def AXplus_rec() -> AxiomSystem:
    base = AXplus().schemas - {S.D5}
    return AxiomSystem("AX+rec", base | {S.D6, S.D10a, S.D10b}, frozenset({"MP"}),
                       acyclic_sems=True)


def AXplus_basic() -> AxiomSystem:
    return AxiomSystem("AX+basic", frozenset({S.D0, S.D1, S.D2, S.D4, S.D7, S.D8}),
                       frozenset({"MP"}), frozenset())


def AXplus_basic_rec() -> AxiomSystem:
    return AxiomSystem("AX+basic,rec", AXplus_basic().schemas | {S.D6plus},
                       frozenset({"MP"}), frozenset({"acyc"}))


def AXstar_basic() -> AxiomSystem:
    return AxiomSystem("AX*basic", AXplus_basic().schemas - {S.D2},
                       frozenset({"MP", "D2plus"}), frozenset())


_CLASS_SCHEMA = {"coh": S.D3, "acyc": S.D6plus, "ge1": S.D10a, "le1": S.D10b}


def AXstar_basic_A(cls: Iterable[str] | str) -> AxiomSystem:
    cls = model_class(cls)
    extra = {_CLASS_SCHEMA[p] for p in cls}
    return AxiomSystem(f"AX*basic[{format_class(cls)}]", AXstar_basic().schemas | extra,
                       frozenset({"MP", "D2plus"}), cls)


def system_by_name(name: str, cls: Iterable[str] | str | None = None) -> AxiomSystem:
    table = {
        "AX+": AXplus, "AXplus": AXplus,
        "AX+rec": AXplus_rec, "AXplus_rec": AXplus_rec,
        "AX+basic": AXplus_basic, "AXplus_basic": AXplus_basic,
        "AX+basic,rec": AXplus_basic_rec, "AXplus_basic_rec": AXplus_basic_rec,
        "AX*basic": AXstar_basic, "AXstar_basic": AXstar_basic,
    }
    if name.endswith("]") and "[" in name:
        # the printed name of a class-specific system, e.g. AX*basic[coh,acyc]
        name, _, inner = name[:-1].partition("[")
        cls = () if inner == "none" else inner
        if name in ("AX*basic", "AXstar_basic"):
            return AXstar_basic_A(cls)
    if name in ("AX*basic,A", "AXstar_basic_A") or (cls and name in ("AX*basic", "AXstar_basic")):
        return AXstar_basic_A(cls or ())
    if name not in table:
        raise ValueError(f"unknown axiom system {name!r}; choose from {sorted(table)}")
    return table[name]()


# -- instantiation ----------------------------------------------------------

def _need(params: Mapping, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise BadParams(f"missing parameters {missing}")
    return [params[k] for k in keys]


def _as_intervention(x) -> Intervention:
    if isinstance(x, Intervention):
        return x
    return Intervention.of(x)


def _check_var(sig: Signature, var: str, *values: str):
    if var not in sig.endo_vars:
        raise BadParams(f"{var!r} is not an endogenous variable")
    for v in values:
        if v not in sig.range(var):
            raise BadParams(f"{v!r} is not in the range of {var!r}")


def _check_event(sig: Signature, e: Formula):
    try:
        validate(e, sig)
    except GsemError as exc:
        raise BadParams(str(exc)) from None
    if not _is_event(e):
        raise BadParams("expected an event (no boxes or diamonds)")


def _is_event(f: Formula) -> bool:
    from .lang import is_event
    return is_event(f)


def _assign_event(pairs: Iterable[tuple[str, str]]) -> Formula:
    return conj(Prim(v, x) for v, x in pairs)


def affects_clause(sig: Signature, var: str, values: Sequence[str],
                   others: Sequence[str], other_values: Sequence[Sequence[str]],
                   bases: Sequence[Intervention], literal: bool = False) -> Formula:
    """``var`` moves the joint value of ``others`` under some base intervention.

    Default form: ``[I;var<-x](others != y) & <I;var<-x'>(others = y)``. With
    ``literal=True`` the second conjunct is the box ``[I;var<-x](others = y) &
    [I;var<-x'](others != y)`` instead. Disjuncts with disallowed interventions are dropped.
    """
    disjuncts = []
    for base in bases:
        for x in values:
            first = base.compose(Intervention(((var, x),)))
            if not sig.is_allowed(first):
                continue
            for x2 in values:
                second = base.compose(Intervention(((var, x2),)))
                if not sig.is_allowed(second):
                    continue
                for ys in itertools.product(*other_values):
                    target = _assign_event(zip(others, ys))
                    if literal:
                        d = And((Box(first, target), Box(second, Not(target))))
                    else:
                        d = And((Box(first, Not(target)), Diamond(second, target)))
                    if d not in disjuncts:
                        disjuncts.append(d)
    return disj(disjuncts)


def instantiate_d6plus(sig: Signature, vars: Sequence[str],
                       value_sets: Sequence[Sequence[str]] | None = None,
                       interventions: Sequence[Intervention] | None = None,
                       literal: bool = False) -> Formula:
    """Some variable among ``vars`` does not affect the others."""
    vars = list(vars)
    if not vars or len(set(vars)) != len(vars):
        raise BadParams("D6plus needs a non-empty list of distinct variables")
    for v in vars:
        _check_var(sig, v)
    if value_sets is None:
        value_sets = [sig.range(v) for v in vars]
    if len(value_sets) != len(vars):
        raise BadParams("one value set per variable")
    for v, vs in zip(vars, value_sets):
        if not vs:
            raise BadParams(f"empty value set for {v!r}")
        _check_var(sig, v, *vs)
    bases = list(sig.allowed) if interventions is None else [_as_intervention(i) for i in interventions]
    for b in bases:
        if not sig.is_allowed(b):
            raise NotInLanguage(f"base intervention [{b}] is not allowed")
    parts = []
    for k, v in enumerate(vars):
        others = vars[:k] + vars[k + 1:]
        other_sets = list(value_sets[:k]) + list(value_sets[k + 1:])
        parts.append(Not(affects_clause(sig, v, value_sets[k], others, other_sets, bases, literal)))
    return disj(parts)


def d6_finite_formula(sig: Signature, vars: Sequence[str]) -> Formula:
    """Finite-signature acyclicity formula over ``vars``, built directly from full ranges."""
    parts = []
    for v in vars:
        rest = [w for w in vars if w != v]
        moves = []
        for base in sig.allowed:
            for x, x2 in itertools.product(sig.range(v), repeat=2):
                a = base.compose(Intervention(((v, x),)))
                b = base.compose(Intervention(((v, x2),)))
                if not (sig.is_allowed(a) and sig.is_allowed(b)):
                    continue
                for ys in itertools.product(*(sig.range(w) for w in rest)):
                    target = conj(Prim(w, y) for w, y in zip(rest, ys))
                    d = And((Box(a, Not(target)), Diamond(b, target)))
                    if d not in moves:
                        moves.append(d)
        parts.append(Not(disj(moves)))
    return disj(parts)


def hd9_formula(sig: Signature, intervention: Intervention) -> Formula:
    """The alternative to D9: some outcome exists and the free variable is pinned."""
    free = [v for v in sig.endo_vars if not intervention.binds(v)]
    if len(free) != 1:
        raise BadParams("HD9 needs an intervention on all variables but one")
    x = free[0]
    return And((Diamond(intervention, TRUE), disj(Box(intervention, Prim(x, v)) for v in sig.range(x))))


def instantiate(schema: SchemaId | str, sig: Signature, params: Mapping) -> Formula:
    """The instance of ``schema`` for ``params``; raises NotInLanguage or BadParams."""
    schema = SchemaId(schema)
    f = _build(schema, sig, params)
    for i in interventions_in(f):
        try:
            sig.check_intervention(i)
        except GsemError as exc:
            raise BadParams(str(exc)) from None
        if not sig.is_allowed(i):
            raise NotInLanguage(f"{schema} instance uses [{i}], which is not allowed")
    return f


def _intervention_param(sig: Signature, params: Mapping) -> Intervention:
    (raw,) = _need(params, "intervention")
    i = _as_intervention(raw)
    try:
        sig.check_intervention(i)
    except GsemError as exc:
        raise BadParams(str(exc)) from None
    return i


def _build(schema: SchemaId, sig: Signature, p: Mapping) -> Formula:
    if schema is S.D0:
        (f,) = _need(p, "formula")
        try:
            validate(f, sig, check_allowed=False)
        except GsemError as exc:
            raise BadParams(str(exc)) from None
        if not check_taut(f, "box"):
            raise BadParams("D0 needs a propositional tautology over box atoms")
        return f
    if schema is S.D1:
        i = _intervention_param(sig, p)
        x, v, v2 = _need(p, "var", "value", "other")
        _check_var(sig, x, v, v2)
        if v == v2:
            raise BadParams("D1 needs two different values")
        return Box(i, Implies(Prim(x, v), Not(Prim(x, v2))))
    if schema is S.D2:
        i = _intervention_param(sig, p)
        (x,) = _need(p, "var")
        _check_var(sig, x)
        return Box(i, disj(Prim(x, v) for v in sig.range(x)))
    if schema is S.D3:
        i = _intervention_param(sig, p)
        w, wv, e = _need(p, "var", "value", "event")
        _check_var(sig, w, wv)
        _check_event(sig, e)
        moved = i.compose(Intervention(((w, wv),)))
        return Implies(Diamond(i, And((Prim(w, wv), e))), Diamond(moved, e))
    if schema is S.D4:
        i = _intervention_param(sig, p)
        return Box(i, _assign_event(i.bindings))
    if schema is S.D5:
        i = _intervention_param(sig, p)
        y, yv, w, wv, z = _need(p, "y_var", "y_value", "w_var", "w_value", "z")
        _check_var(sig, y, yv)
        _check_var(sig, w, wv)
        if y == w or i.binds(y) or i.binds(w):
            raise BadParams("D5 needs distinct Y and W outside the base intervention")
        z = z if isinstance(z, Assignment) else Assignment.of(z)
        rest = [v for v in sig.endo_vars if not i.binds(v) and v not in (y, w)]
        if sorted(z.vars) != sorted(rest):
            raise BadParams(f"D5 side condition: Z must be exactly {rest}")
        for v, val in z.items():
            _check_var(sig, v, val)
        zs = [(v, z[v]) for v in rest]
        with_y = i.compose(Intervention(((y, yv),)))
        with_w = i.compose(Intervention(((w, wv),)))
        left = And((Diamond(with_y, _assign_event([(w, wv)] + zs)),
                    Diamond(with_w, _assign_event([(y, yv)] + zs))))
        return Implies(left, Diamond(i, _assign_event([(w, wv), (y, yv)] + zs)))
    if schema is S.D6:
        (chain,) = _need(p, "chain")
        chain = list(chain)
        if len(chain) < 2 or len(set(chain)) != len(chain):
            raise BadParams("D6 needs a chain of at least two distinct variables")
        for v in chain:
            _check_var(sig, v)
        links = conj(leadsto_formula(a, b, sig) for a, b in zip(chain, chain[1:]))
        return Implies(links, Not(leadsto_formula(chain[-1], chain[0], sig)))
    if schema is S.D6plus:
        (vars,) = _need(p, "vars")
        return instantiate_d6plus(sig, vars, p.get("values"), p.get("interventions"),
                                  bool(p.get("literal", False)))
    if schema is S.D7:
        i = _intervention_param(sig, p)
        phi, psi = _need(p, "phi", "psi")
        _check_event(sig, phi)
        _check_event(sig, psi)
        return Implies(And((Box(i, phi), Box(i, Implies(phi, psi)))), Box(i, psi))
    if schema is S.D8:
        i = _intervention_param(sig, p)
        (e,) = _need(p, "event")
        _check_event(sig, e)
        if not check_taut(e, "event"):
            raise BadParams("D8 needs a propositional tautology over primitive events")
        return Box(i, e)
    if schema is S.D9:
        i = _intervention_param(sig, p)
        (e,) = _need(p, "event")
        _check_event(sig, e)
        if len([v for v in sig.endo_vars if not i.binds(v)]) != 1:
            raise BadParams("D9 side condition: the intervention must leave exactly one variable free")
        return And((Diamond(i, TRUE), Implies(Diamond(i, e), Box(i, e))))
    if schema is S.D10a:
        i = _intervention_param(sig, p)
        return Diamond(i, TRUE)
    if schema is S.D10b:
        i = _intervention_param(sig, p)
        (e,) = _need(p, "event")
        _check_event(sig, e)
        return Implies(Diamond(i, e), Box(i, e))
    raise BadParams(f"unknown schema {schema}")


# -- enumeration ------------------------------------------------------------

DEFAULT_BUDGET = 2000
MAX_CANDIDATE_INTERVENTIONS = 4096


@dataclass(frozen=True)
class Instance:
    schema: SchemaId
    params: Mapping = field(hash=False, compare=False)
    formula: Formula | None  # None when not in the language

    def __str__(self):
        from .lang import print_formula
        return f"{self.schema}: {print_formula(self.formula) if self.formula is not None else '<not in language>'}"


def event_pool(sig: Signature, size: int = 24, seed: int = 0) -> list[Formula]:
    """Events used for the event metavariables: constants, literals, characteristic events, random fill."""
    pool: list[Formula] = [TRUE, FALSE]
    for v in sig.endo_vars:
        for x in sig.range(v):
            pool.append(Prim(v, x))
    for v in sig.endo_vars:
        for x in sig.range(v):
            pool.append(Not(Prim(v, x)))
    if sig.space_size <= 16:
        for a in sig.endo_assignments():
            pool.append(characteristic_event(a, sig))
    rng = random.Random(seed)
    tries = 0
    while len(pool) < size and tries < size * 20:
        tries += 1
        e = random_event(sig, rng, 2)
        if e not in pool:
            pool.append(e)
    return pool


def _candidate_interventions(sig: Signature) -> list[Intervention]:
    n = 1
    for v in sig.endo_vars:
        n *= len(sig.range(v)) + 1
    if n > MAX_CANDIDATE_INTERVENTIONS:
        return list(sig.allowed)
    return sorted(all_interventions(sig.endo_vars, sig.ranges),
                  key=lambda i: (len(i), i.bindings))


def parameterizations(schema: SchemaId | str, sig: Signature, pool: Sequence[Formula] | None = None,
                      tautologies: int = 40, seed: int = 0) -> Iterator[dict]:
    """Parameter dicts for ``schema``, including ones that fall outside the language."""
    schema = SchemaId(schema)
    pool = event_pool(sig, seed=seed) if pool is None else list(pool)
    cands = _candidate_interventions(sig)
    vars = sig.endo_vars
    if schema is S.D0:
        leaves = [Box(i, e) for i in sig.allowed for e in pool[:12]]
        if not leaves:
            return
        for f in generate_tautologies(lambda r: leaves[r.randrange(len(leaves))], "box",
                                      tautologies, seed):
            yield {"formula": f}
    elif schema is S.D1:
        for i in cands:
            for x in vars:
                for v, v2 in itertools.permutations(sig.range(x), 2):
                    yield {"intervention": i, "var": x, "value": v, "other": v2}
    elif schema is S.D2:
        for i in cands:
            for x in vars:
                yield {"intervention": i, "var": x}
    elif schema is S.D3:
        for i in cands:
            for w in vars:
                for wv in sig.range(w):
                    for e in pool:
                        yield {"intervention": i, "var": w, "value": wv, "event": e}
    elif schema in (S.D4, S.D10a):
        for i in cands:
            yield {"intervention": i}
    elif schema is S.D5:
        for i in cands:
            free = [v for v in vars if not i.binds(v)]
            for y, w in itertools.permutations(free, 2):
                rest = [v for v in free if v not in (y, w)]
                for yv in sig.range(y):
                    for wv in sig.range(w):
                        for zs in itertools.product(*(sig.range(v) for v in rest)):
                            yield {"intervention": i, "y_var": y, "y_value": yv, "w_var": w,
                                   "w_value": wv, "z": Assignment(tuple(rest), zs)}
    elif schema is S.D6:
        for k in range(2, min(len(vars), 4) + 1):
            for chain in itertools.permutations(vars, k):
                yield {"chain": list(chain)}
    elif schema is S.D6plus:
        subsets = [list(c) for k in range(1, len(vars) + 1) for c in itertools.combinations(vars, k)]
        for c in subsets:
            yield {"vars": c}
        for c in subsets:
            for i in sig.allowed:
                yield {"vars": c, "interventions": [i]}
        for c in subsets:
            choices = [[tuple(s) for n in range(1, len(sig.range(v)) + 1)
                        for s in itertools.combinations(sig.range(v), n)] for v in c]
            for sets in itertools.product(*choices):
                yield {"vars": c, "values": [list(s) for s in sets]}
    elif schema is S.D7:
        for i in cands:
            for phi in pool:
                for psi in pool:
                    yield {"intervention": i, "phi": phi, "psi": psi}
    elif schema is S.D8:
        prims = [Prim(v, x) for v in vars for x in sig.range(v)]
        leaves = prims + [e for e in pool if e not in prims][:8]
        tauts = generate_tautologies(lambda r: leaves[r.randrange(len(leaves))], "event",
                                     tautologies, seed)
        for i in cands:
            for e in tauts:
                yield {"intervention": i, "event": e}
    elif schema in (S.D9, S.D10b):
        for i in cands:
            if schema is S.D9 and len(i) != len(vars) - 1:
                continue
            for e in pool:
                yield {"intervention": i, "event": e}


def schema_instances(schema: SchemaId | str, sig: Signature, budget: int | None = DEFAULT_BUDGET,
                     seed: int = 0, pool: Sequence[Formula] | None = None,
                     with_rejected: bool = False) -> list[Instance]:
    """Distinct instances of one schema; a seeded sample of ``budget`` when there are more.

    With ``with_rejected`` the parameterizations that leave the language come back as
    instances whose formula is None.
    """
    schema = SchemaId(schema)
    found: list[Instance] = []
    rejected: list[Instance] = []
    seen = set()
    for params in parameterizations(schema, sig, pool, seed=seed):
        try:
            f = instantiate(schema, sig, params)
        except NotInLanguage:
            rejected.append(Instance(schema, params, None))
            continue
        if f in seen:
            continue
        seen.add(f)
        found.append(Instance(schema, params, f))
    if budget is not None and len(found) > budget:
        rng = random.Random(seed)
        keep = sorted(rng.sample(range(len(found)), budget))
        found = [found[k] for k in keep]
    return found + rejected if with_rejected else found


def enumerate_instances(system: AxiomSystem, sig: Signature, budget: int | None = DEFAULT_BUDGET,
                        seed: int = 0) -> Iterator[Instance]:
    """In-language instances of every schema of ``system``, schema by schema."""
    for schema in sorted(system.schemas, key=lambda s: list(SchemaId).index(s)):
        yield from schema_instances(schema, sig, budget, seed)


# -- soundness report -------------------------------------------------------

@dataclass
class SchemaStats:
    instances: int = 0
    valid: int = 0
    violated: int = 0
    not_in_language: int = 0
    witnesses: list = field(default_factory=list)  # (formula, failing context)


@dataclass
class SoundnessReport:
    system: str
    per_schema: dict
    mp_checks: int = 0
    mp_failures: int = 0

    @property
    def violations(self) -> int:
        return sum(s.violated for s in self.per_schema.values()) + self.mp_failures

    def to_json(self) -> dict:
        from .lang import print_formula
        return {
            "system": self.system,
            "violations": self.violations,
            "schemas": {
                str(k): {"instances": s.instances, "valid": s.valid, "violated": s.violated,
                         "not_in_language": s.not_in_language,
                         "witnesses": [{"formula": print_formula(f), "context": str(u)}
                                       for f, u in s.witnesses]}
                for k, s in self.per_schema.items()},
            "mp_spot_checks": {"checked": self.mp_checks, "failed": self.mp_failures},
        }


def soundness_report(m: Gsem, system: AxiomSystem, budget: int | None = DEFAULT_BUDGET,
                     seed: int = 0, max_witnesses: int = 3) -> SoundnessReport:
    sig = m.sig
    batch = ModelBatch.from_models(sig, [m])
    per = {}
    valid_formulas: list[Formula] = []
    for schema in sorted(system.schemas, key=lambda s: list(SchemaId).index(s)):
        stats = SchemaStats()
        for inst in schema_instances(schema, sig, budget, seed, with_rejected=True):
            if inst.formula is None:
                stats.not_in_language += 1
                continue
            stats.instances += 1
            row = batch.check(inst.formula)[0]
            if row.all():
                stats.valid += 1
                if len(valid_formulas) < 200:
                    valid_formulas.append(inst.formula)
            else:
                stats.violated += 1
                if len(stats.witnesses) < max_witnesses:
                    u = sig.contexts()[int((~row).nonzero()[0][0])]
                    stats.witnesses.append((inst.formula, u))
        per[schema] = stats
    report = SoundnessReport(system.name, per)
    # modus ponens keeps validity in a single model: spot-check on valid antecedents
    rng = random.Random(seed)
    from .lang import random_formula
    if sig.allowed:
        for _ in range(min(50, len(valid_formulas))):
            phi = rng.choice(valid_formulas)
            psi = random_formula(sig, rng, 2)
            imp = Implies(phi, psi)
            if batch.valid(imp)[0]:
                report.mp_checks += 1
                if not batch.valid(psi)[0]:
                    report.mp_failures += 1
    return report
