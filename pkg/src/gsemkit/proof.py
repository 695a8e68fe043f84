"""Hilbert-style derivations: checking, text format, a builder and a curated corpus.

A derivation is a list of steps, each a formula with a justification: an axiom
instance (schema plus explicit parameters), a propositional tautology over box
atoms, modus ponens, or the D2+ rule. Formulas are compared after normalization
(diamonds as negated boxes, double negations folded).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence

from .axioms import AxiomSystem, SchemaId, instantiate, system_by_name
from .core import Assignment, Intervention, Signature
from .errors import BadStep, FormulaSyntaxError, GsemError, TooManyAtoms
from .lang import (
    TRUE,
    And,
    Box,
    Diamond,
    Formula,
    Implies,
    Not,
    Or,
    Prim,
    characteristic_event,
    conj,
    disj,
    iff,
    is_event,
    mentioned_values,
    normalize,
    parse_event,
    parse_formula,
    parse_intervention,
    print_formula,
    subformulas,
    validate,
)
from .taut import check_taut


@dataclass(frozen=True)
class Axiom:
    schema: SchemaId
    params: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class MP:
    premise: int
    implication: int


@dataclass(frozen=True)
class D2plus:
    premise: int
    var: str
    values: tuple[str, ...]
    intervention: Intervention
    phi: Formula
    psi: Formula


Justification = Axiom | Taut | MP | D2plus


@dataclass(frozen=True)
class Step:
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Derivation:
    system: AxiomSystem
    sig: Signature
    steps: tuple[Step, ...]
    name: str = ""

    @property
    def theorem(self) -> Formula | None:
        return self.steps[-1].formula if self.steps else None


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    theorem: Formula | None = None
    bad_step: int | None = None  # zero-based
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self):
        if self.accepted:
            return "ACCEPT"
        return f"REJECT step {self.bad_step + 1}: {self.reason}"


def d2plus_premise(var: str, values: Sequence[str], i: Intervention, phi: Formula, psi: Formula) -> Formula:
    return Implies(phi, conj(Box(i, Implies(psi, Not(Prim(var, x)))) for x in values))


def d2plus_conclusion(i: Intervention, phi: Formula, psi: Formula) -> Formula:
    return Implies(phi, Box(i, Not(psi)))


def _check_step(d: Derivation, k: int) -> None:
    step = d.steps[k]
    sig, system = d.sig, d.system
    j = step.justification
    try:
        validate(step.formula, sig)
    except GsemError as exc:
        raise BadStep(k, f"formula is not in the language: {exc}") from None
    target = normalize(step.formula)
    if isinstance(j, Axiom):
        schema = SchemaId(j.schema)
        if schema not in system.schemas:
            raise BadStep(k, f"{schema} is not an axiom of {system.name}")
        try:
            inst = instantiate(schema, sig, j.params)
        except GsemError as exc:
            raise BadStep(k, f"bad {schema} instance: {exc}") from None
        if normalize(inst) != target:
            raise BadStep(k, f"formula is not the {schema} instance for these parameters")
    elif isinstance(j, Taut):
        if SchemaId.D0 not in system.schemas:
            raise BadStep(k, f"D0 is not an axiom of {system.name}")
        try:
            ok = check_taut(step.formula, "box")
        except (TooManyAtoms, ValueError) as exc:
            raise BadStep(k, str(exc)) from None
        if not ok:
            raise BadStep(k, "not a propositional tautology over box atoms")
    elif isinstance(j, MP):
        if "MP" not in system.rules:
            raise BadStep(k, "modus ponens is not a rule of this system")
        for ref in (j.premise, j.implication):
            if not 0 <= ref < k:
                raise BadStep(k, f"modus ponens cites step {ref + 1}, which is not earlier")
        want = Implies(normalize(d.steps[j.premise].formula), target)
        if normalize(d.steps[j.implication].formula) != want:
            raise BadStep(k, f"step {j.implication + 1} is not step {j.premise + 1} -> this formula")
    elif isinstance(j, D2plus):
        if "D2plus" not in system.rules:
            raise BadStep(k, "D2+ is not a rule of this system")
        if not 0 <= j.premise < k:
            raise BadStep(k, f"D2+ cites step {j.premise + 1}, which is not earlier")
        if j.var not in sig.endo_vars:
            raise BadStep(k, f"{j.var!r} is not an endogenous variable")
        rng = sig.range(j.var)
        values = tuple(j.values)
        if not values or len(set(values)) != len(values) or not set(values) <= set(rng):
            raise BadStep(k, "D2+ value set must be distinct values from the range")
        if not is_event(j.psi) or _has_prim_outside(j.phi):
            raise BadStep(k, "D2+ needs psi an event and phi a causal formula")
        shown = mentioned_values(d2plus_conclusion(j.intervention, j.phi, Not(j.psi)), j.var)
        if not shown <= set(values):
            raise BadStep(k, f"D2+ value set misses mentioned values {sorted(shown - set(values))}")
        unmentioned = set(rng) - shown
        if unmentioned and not set(values) & unmentioned:
            raise BadStep(k, "D2+ value set needs one value not mentioned in the formula")
        premise = d2plus_premise(j.var, values, j.intervention, j.phi, j.psi)
        if normalize(d.steps[j.premise].formula) != normalize(premise):
            raise BadStep(k, f"step {j.premise + 1} is not the D2+ premise")
        if normalize(d2plus_conclusion(j.intervention, j.phi, j.psi)) != target:
            raise BadStep(k, "formula is not the D2+ conclusion")
    else:
        raise BadStep(k, f"unknown justification {j!r}")


def _has_prim_outside(f: Formula) -> bool:
    if isinstance(f, Prim):
        return True
    if isinstance(f, (Box, Diamond)):
        return False
    if isinstance(f, Not):
        return _has_prim_outside(f.arg)
    if isinstance(f, (And, Or)):
        return any(_has_prim_outside(a) for a in f.args)
    if isinstance(f, Implies):
        return _has_prim_outside(f.left) or _has_prim_outside(f.right)
    return False


def check_derivation(d: Derivation) -> Verdict:
    if not d.steps:
        return Verdict(False, None, 0, "empty derivation")
    for k in range(len(d.steps)):
        try:
            _check_step(d, k)
        except BadStep as exc:
            return Verdict(False, d.theorem, exc.index, exc.reason)
    return Verdict(True, d.theorem)


# -- builder ----------------------------------------------------------------

class Builder:
    """Appends steps, reusing an earlier step when the same formula is already proved.

    The built derivation ends at the most recently requested step, so its theorem is the
    last thing proved even when that formula was reused.
    """

    def __init__(self, system: AxiomSystem, sig: Signature, name: str = ""):
        self.system = system
        self.sig = sig
        self.name = name
        self.steps: list[Step] = []
        self.last = -1

    def add(self, formula: Formula, just: Justification) -> int:
        key = normalize(formula)
        for k, s in enumerate(self.steps):
            if normalize(s.formula) == key:
                self.last = k
                return k
        self.steps.append(Step(formula, just))
        self.last = len(self.steps) - 1
        return self.last

    def f(self, k: int) -> Formula:
        return self.steps[k].formula

    def axiom(self, schema: str, **params) -> int:
        return self.add(instantiate(schema, self.sig, params), Axiom(SchemaId(schema), params))

    def taut(self, formula: Formula) -> int:
        return self.add(formula, Taut())

    def mp(self, premise: int, implication: int, shown: Formula | None = None) -> int:
        imp = normalize(self.f(implication))
        if not isinstance(imp, Implies) or imp.left != normalize(self.f(premise)):
            raise ValueError("modus ponens does not apply")
        out = shown if shown is not None else self.f(implication).right
        return self.add(out, MP(premise, implication))

    def conj_intro(self, parts: Sequence[int]) -> int:
        """From steps a1..an derive a1 & ... & an."""
        forms = [self.f(k) for k in parts]
        goal = conj(forms)
        t = goal
        for a in reversed(forms):
            t = Implies(a, t)
        k = self.taut(t)
        for p in parts:
            k = self.mp(p, k)
        return k

    def box_mp(self, box_step: int, imp_step: int) -> int:
        """From [I]phi and [I](phi -> psi) derive [I]psi."""
        b, imp = self.f(box_step), self.f(imp_step)
        i, phi, psi = b.intervention, b.event, imp.event.right
        d7 = self.axiom("D7", intervention=i, phi=phi, psi=psi)
        both = self.conj_intro([box_step, imp_step])
        return self.mp(both, d7)

    def box_mono(self, box_step: int, psi: Formula) -> int:
        """From [I]phi derive [I]psi when phi -> psi is an event tautology."""
        b = self.f(box_step)
        d8 = self.axiom("D8", intervention=b.intervention, event=Implies(b.event, psi))
        return self.box_mp(box_step, d8)

    def box_and(self, a: int, b: int) -> int:
        """From [I]phi1 and [I]phi2 derive [I](phi1 & phi2)."""
        fa, fb = self.f(a), self.f(b)
        i = fa.intervention
        both = And((fa.event, fb.event))
        d8 = self.axiom("D8", intervention=i, event=Implies(fa.event, Implies(fb.event, both)))
        half = self.box_mp(a, d8)
        return self.box_mp(b, half)

    def build(self) -> Derivation:
        return Derivation(self.system, self.sig, tuple(self.steps[:self.last + 1]), self.name)


# -- curated derivations ----------------------------------------------------

def _binary_sig(*names: str) -> Signature:
    return Signature.build(endo={n: ("0", "1") for n in names})


def derived_d2_from_d2plus(sig: Signature, var: str, intervention: Intervention | None = None,
                           system: AxiomSystem | None = None) -> Derivation:
    """A derivation of the D2 instance for ``var`` that uses the D2+ rule instead of D2."""
    from .axioms import AXstar_basic

    system = system or AXstar_basic()
    if intervention is None:
        intervention = Intervention() if sig.is_allowed(Intervention()) else sig.allowed[0]
    i = intervention
    values = sig.range(var)
    psi = conj(Not(Prim(var, x)) for x in values)
    b = Builder(system, sig, f"d2-from-d2plus-{var}-range{len(values)}")
    # [I](psi -> X != x) for each x, collected under "true ->"
    parts = [b.axiom("D8", intervention=i, event=Implies(psi, Not(Prim(var, x)))) for x in values]
    goal = conj(b.f(k) for k in parts)
    t = Implies(TRUE, goal)
    for k in reversed(parts):
        t = Implies(b.f(k), t)
    k = b.taut(t)
    for p in parts:
        k = b.mp(p, k)
    rule = D2plus(k, var, tuple(values), i, TRUE, psi)
    concl = b.add(d2plus_conclusion(i, TRUE, psi), rule)
    box_not_psi = Box(i, Not(psi))
    strip = b.taut(Implies(b.f(concl), box_not_psi))
    got = b.mp(concl, strip)
    b.box_mono(got, disj(Prim(var, x) for x in values))
    return b.build()


def _and_distrib_forward(sig: Signature, i: Intervention, p1: Formula, p2: Formula) -> Derivation:
    from .axioms import AXplus_basic

    b = Builder(AXplus_basic(), sig, "box-and-forward")
    both = And((p1, p2))
    c = b.axiom("D8", intervention=i, event=Implies(p1, Implies(p2, both)))
    d7a = b.axiom("D7", intervention=i, phi=p1, psi=Implies(p2, both))
    d7b = b.axiom("D7", intervention=i, phi=p2, psi=both)
    A, B, E = Box(i, p1), Box(i, p2), Box(i, both)
    goal = Implies(And((A, B)), E)
    glue = b.taut(Implies(b.f(c), Implies(b.f(d7a), Implies(b.f(d7b), goal))))
    k = b.mp(c, glue)
    k = b.mp(d7a, k)
    b.mp(d7b, k)
    return b.build()


def _and_distrib_backward(sig: Signature, i: Intervention, p1: Formula, p2: Formula) -> Derivation:
    from .axioms import AXplus_basic

    b = Builder(AXplus_basic(), sig, "box-and-backward")
    both = And((p1, p2))
    e1 = b.axiom("D8", intervention=i, event=Implies(both, p1))
    r1 = b.axiom("D7", intervention=i, phi=both, psi=p1)
    e2 = b.axiom("D8", intervention=i, event=Implies(both, p2))
    r2 = b.axiom("D7", intervention=i, phi=both, psi=p2)
    E, A, B = Box(i, both), Box(i, p1), Box(i, p2)
    goal = Implies(E, And((A, B)))
    glue = b.taut(Implies(b.f(e1), Implies(b.f(r1), Implies(b.f(e2), Implies(b.f(r2), goal)))))
    k = glue
    for p in (e1, r1, e2, r2):
        k = b.mp(p, k)
    return b.build()


def _diamond_or(sig: Signature, i: Intervention, p1: Formula, p2: Formula) -> Derivation:
    from .axioms import AXplus_basic

    b = Builder(AXplus_basic(), sig, "diamond-or")
    either = Or((p1, p2))
    n1, n2, ne = Not(p1), Not(p2), Not(either)
    c = b.axiom("D8", intervention=i, event=Implies(n1, Implies(n2, ne)))
    d7a = b.axiom("D7", intervention=i, phi=n1, psi=Implies(n2, ne))
    d7b = b.axiom("D7", intervention=i, phi=n2, psi=ne)
    goal = Implies(Diamond(i, either), Or((Diamond(i, p1), Diamond(i, p2))))
    glue = b.taut(Implies(b.f(c), Implies(b.f(d7a), Implies(b.f(d7b), goal))))
    k = b.mp(c, glue)
    k = b.mp(d7a, k)
    b.mp(d7b, k)
    return b.build()


def _d4_variant(sig: Signature, i: Intervention, var: str) -> Derivation:
    from .axioms import AXplus_basic

    b = Builder(AXplus_basic(), sig, "d4-variant")
    d4 = b.axiom("D4", intervention=i)
    b.box_mono(d4, Prim(var, i.get(var)))
    return b.build()


def _characteristic_basis(sig: Signature, i: Intervention, rho: Formula) -> Derivation:
    """[I]rho <-> [I] of the conjunction of not(V=v) over the assignments falsifying rho."""
    from .axioms import AXplus_basic
    from .semantics import sat_event

    b = Builder(AXplus_basic(), sig, "characteristic-basis")
    chi = conj(Not(characteristic_event(v, sig)) for v in sig.endo_assignments()
               if not sat_event(v, rho))
    facts = []
    for x in sig.endo_vars:
        facts.append(b.axiom("D2", intervention=i, var=x))
        for v1 in sig.range(x):
            for v2 in sig.range(x):
                if v1 != v2:
                    facts.append(b.axiom("D1", intervention=i, var=x, value=v1, other=v2))
    acc = facts[0]
    for k in facts[1:]:
        acc = b.box_and(acc, k)
    constraint = b.f(acc).event
    eq = b.axiom("D8", intervention=i, event=Implies(constraint, iff(rho, chi)))
    both_ways = b.box_mp(acc, eq)
    fwd = b.box_mono(both_ways, Implies(rho, chi))
    bwd = b.box_mono(both_ways, Implies(chi, rho))
    r1 = b.axiom("D7", intervention=i, phi=rho, psi=chi)
    r2 = b.axiom("D7", intervention=i, phi=chi, psi=rho)
    R, Sx = Box(i, rho), Box(i, chi)
    goal = And((Implies(R, Sx), Implies(Sx, R)))
    glue = b.taut(Implies(b.f(fwd), Implies(b.f(bwd), Implies(b.f(r1), Implies(b.f(r2), goal)))))
    k = glue
    for p in (fwd, bwd, r1, r2):
        k = b.mp(p, k)
    return b.build()


def curated_corpus() -> list[Derivation]:
    one = _binary_sig("X")
    two = _binary_sig("X", "Y")
    wx = _binary_sig("W", "X")
    tern = Signature.build(endo={"X": ("0", "1", "2")})
    from .axioms import AXplus_basic

    d4 = Builder(AXplus_basic(), one, "d4")
    d4.axiom("D4", intervention=Intervention.of({"X": "1"}))
    i = Intervention.of({"X": "1"})
    return [
        d4.build(),
        _and_distrib_forward(two, i, Prim("Y", "0"), Or((Prim("X", "1"), Prim("Y", "1")))),
        _and_distrib_backward(two, i, Prim("Y", "0"), Or((Prim("X", "1"), Prim("Y", "1")))),
        _diamond_or(two, Intervention(), Prim("X", "0"), Prim("Y", "1")),
        _d4_variant(wx, Intervention.of({"W": "0", "X": "1"}), "X"),
        derived_d2_from_d2plus(one, "X"),
        derived_d2_from_d2plus(tern, "X"),
        _characteristic_basis(two, Intervention(), Or((Prim("X", "0"), Prim("Y", "1")))),
    ]


# -- text format ------------------------------------------------------------

def _fmt_value(v) -> str:
    if isinstance(v, Intervention):
        return f"[{v}]"
    if isinstance(v, Assignment):
        return "[" + ", ".join(f"{a}<-{b}" for a, b in v.items()) + "]"
    if isinstance(v, (list, tuple)):
        return "{" + ",".join(_fmt_value(x) for x in v) + "}"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, str):
        return v
    return f"({print_formula(v)})"


def format_derivation(d: Derivation) -> str:
    lines = [f"system {d.system.name}"]
    for k, s in enumerate(d.steps, 1):
        j = s.justification
        if isinstance(j, Axiom):
            params = " ".join(f"{key}={_fmt_value(val)}" for key, val in j.params.items())
            just = f"axiom {SchemaId(j.schema).value} {params}".rstrip()
        elif isinstance(j, Taut):
            just = "taut"
        elif isinstance(j, MP):
            just = f"mp {j.premise + 1} {j.implication + 1}"
        else:
            just = (f"d2plus {j.premise + 1} var={j.var} values={_fmt_value(list(j.values))} "
                    f"intervention=[{j.intervention}] phi=({print_formula(j.phi)}) "
                    f"psi=({print_formula(j.psi)})")
        lines.append(f"{k}. {print_formula(s.formula)} ; {just}")
    return "\n".join(lines) + "\n"


def _split_top(text: str) -> list[str]:
    """Split on whitespace outside brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return out


def _split_list(body: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in body:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


_FORMULA_KEYS = {"formula", "phi"}


def _parse_value(key: str, raw: str, sig: Signature):
    raw = raw.strip()
    if raw.startswith("["):
        i = parse_intervention(raw)
        return i
    if raw.startswith("{"):
        return [_parse_value(key, part, sig) for part in _split_list(raw[1:-1])]
    if raw.startswith("("):
        if key in _FORMULA_KEYS:
            try:
                return parse_formula(raw, sig, check_allowed=False)
            except (FormulaSyntaxError, GsemError):
                pass
        return parse_event(raw)
    if raw in ("yes", "no"):
        return raw == "yes"
    return raw


def parse_derivation(text: str, sig: Signature, system: AxiomSystem | None = None) -> Derivation:
    steps = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("system "):
            parts = line.split(None, 2)
            system = system_by_name(parts[1], parts[2] if len(parts) > 2 else None)
            continue
        num, _, rest = line.partition(".")
        if not num.strip().isdigit() or ";" not in rest:
            raise ValueError(f"line {lineno}: expected 'N. formula ; justification'")
        if int(num) != len(steps) + 1:
            raise ValueError(f"line {lineno}: step numbered {num}, expected {len(steps) + 1}")
        ftext, _, jtext = rest.rpartition(";")
        formula = parse_formula(ftext.strip(), sig, check_allowed=False)
        words = _split_top(jtext.strip())
        if not words:
            raise ValueError(f"line {lineno}: missing justification")
        kind = words[0].lower()
        if kind == "taut":
            just: Justification = Taut()
        elif kind == "mp":
            just = MP(int(words[1]) - 1, int(words[2]) - 1)
        elif kind == "axiom":
            schema = SchemaId(words[1])
            params = {}
            for w in words[2:]:
                key, _, raw = w.partition("=")
                params[key] = _parse_value(key, raw, sig)
            if "z" in params and isinstance(params["z"], Intervention):
                params["z"] = Assignment.of(params["z"].bindings)
            if "interventions" in params:
                params["interventions"] = [x if isinstance(x, Intervention) else parse_intervention(x)
                                           for x in params["interventions"]]
            just = Axiom(schema, params)
        elif kind == "d2plus":
            kv = dict(w.partition("=")[::2] for w in words[2:])
            just = D2plus(int(words[1]) - 1, kv["var"],
                          tuple(_parse_value("values", kv["values"], sig)),
                          parse_intervention(kv["intervention"]),
                          _parse_value("phi", kv["phi"], sig),
                          parse_event(kv["psi"]))
        else:
            raise ValueError(f"line {lineno}: unknown justification {kind!r}")
        steps.append(Step(formula, just))
    if system is None:
        raise ValueError("no 'system' line and no system given")
    return Derivation(system, sig, tuple(steps))


# -- mutations --------------------------------------------------------------

def _replace_at(f: Formula, target_index: int, fn) -> Formula:
    """Apply ``fn`` to the ``target_index``-th subformula in pre-order."""
    counter = [0]

    def go(g):
        idx = counter[0]
        counter[0] += 1
        if idx == target_index:
            return fn(g)
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(tuple(go(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a) for a in g.args))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, Box):
            return Box(g.intervention, go(g.event))
        if isinstance(g, Diamond):
            return Diamond(g.intervention, go(g.event))
        return g

    return go(f)


def _mutate_formula(f: Formula, sig: Signature, rng: random.Random) -> Formula | None:
    nodes = list(subformulas(f))
    k = rng.randrange(len(nodes))
    node = nodes[k]
    options = []
    if isinstance(node, Prim):
        others = [x for x in sig.range(node.var) if x != node.value]
        if others:
            options.append(lambda g: Prim(g.var, rng.choice(others)))
        other_vars = [v for v in sig.endo_vars if v != node.var]
        if other_vars:
            def swap_var(g):
                v = rng.choice(other_vars)
                return Prim(v, rng.choice(sig.range(v)))
            options.append(swap_var)
    if isinstance(node, (Box, Diamond)):
        alts = [i for i in sig.allowed if i != node.intervention]
        if alts:
            options.append(lambda g: type(g)(rng.choice(alts), g.event))
        options.append(lambda g: (Diamond if isinstance(g, Box) else Box)(g.intervention, g.event))
    if isinstance(node, (And, Or)):
        options.append(lambda g: (Or if isinstance(g, And) else And)(g.args))
        if len(node.args) > 2:
            options.append(lambda g: type(g)(g.args[1:]))
    if isinstance(node, Implies):
        options.append(lambda g: Implies(g.right, g.left))
        options.append(lambda g: And((g.left, g.right)))
    if isinstance(node, Not):
        options.append(lambda g: g.arg)
    options.append(lambda g: Not(g))
    g = _replace_at(f, k, rng.choice(options))
    return g


def mutate(d: Derivation, rng: random.Random) -> tuple[str, Derivation]:
    """One random single-step change, described in words."""
    steps = list(d.steps)
    k = rng.randrange(len(steps))
    step = steps[k]
    j = step.justification
    kinds = ["formula", "formula", "delete", "justification"]
    kind = rng.choice(kinds)
    if kind == "delete" and len(steps) > 1:
        del steps[k]
        return f"delete step {k + 1}", replace(d, steps=tuple(steps))
    if kind == "justification":
        if isinstance(j, MP):
            ref = rng.randrange(max(k, 1))
            if rng.random() < 0.5:
                new = MP(ref, j.implication)
            else:
                new = MP(j.premise, ref)
            if new == j:
                new = MP(j.implication, j.premise)
        elif isinstance(j, Axiom):
            choice = rng.random()
            if choice < 0.4:
                schemas = [s for s in d.system.schemas if s != SchemaId(j.schema)]
                new = Axiom(rng.choice(schemas), j.params)
            elif choice < 0.7:
                new = Taut()
            else:
                params = dict(j.params)
                if "intervention" in params:
                    alts = [i for i in d.sig.allowed if i != params["intervention"]]
                    if alts:
                        params["intervention"] = rng.choice(alts)
                new = Axiom(j.schema, params)
        elif isinstance(j, Taut):
            new = MP(rng.randrange(max(k, 1)), rng.randrange(max(k, 1)))
        else:
            vals = list(j.values)
            if len(vals) > 1 and rng.random() < 0.5:
                vals.pop(rng.randrange(len(vals)))
                new = replace(j, values=tuple(vals))
            else:
                new = Taut()
        steps[k] = Step(step.formula, new)
        return f"change justification of step {k + 1}", replace(d, steps=tuple(steps))
    for _ in range(20):
        g = _mutate_formula(step.formula, d.sig, rng)
        if g is not None and normalize(g) != normalize(step.formula):
            steps[k] = Step(g, j)
            return f"change formula of step {k + 1}", replace(d, steps=tuple(steps))
    steps[k] = Step(Not(step.formula), j)
    return f"negate step {k + 1}", replace(d, steps=tuple(steps))


def mutations(d: Derivation, count: int, seed: int = 0) -> Iterator[tuple[str, Derivation]]:
    rng = random.Random(seed)
    for _ in range(count):
        yield mutate(d, rng)
