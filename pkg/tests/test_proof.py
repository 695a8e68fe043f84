import random
from dataclasses import replace

import pytest

from gsemkit.axioms import AXplus_basic, AXstar_basic, AXstar_basic_A, SchemaId
from gsemkit.core import Intervention, Signature
from gsemkit.decide import validity
from gsemkit.lang import TRUE, And, Box, Implies, Not, Prim, conj, normalize, parse_formula
from gsemkit.model import random_gsem
from gsemkit.proof import (D2plus, Axiom, Builder, MP, Step, check_derivation, curated_corpus,
                           d2plus_conclusion, derived_d2_from_d2plus, format_derivation, mutations,
                           parse_derivation)
from helpers import binary_signature
import oracles

CORPUS = curated_corpus()
IDS = [d.name for d in CORPUS]


@pytest.mark.parametrize("d", CORPUS, ids=IDS)
def test_corpus_accepts(d):
    v = check_derivation(d)
    assert v, str(v)
    assert str(v) == "ACCEPT"
    assert v.theorem == d.theorem


@pytest.mark.parametrize("d", CORPUS, ids=IDS)
def test_text_round_trip(d):
    text = format_derivation(d)
    assert text.startswith(f"system {d.system.name}\n")
    again = parse_derivation(text, d.sig)
    assert again.steps == d.steps
    assert again.system.schemas == d.system.schemas
    assert check_derivation(again)


def test_round_trip_with_class_system():
    sig = binary_signature("X")
    d = derived_d2_from_d2plus(sig, "X", system=AXstar_basic_A("coh,acyc"))
    text = format_derivation(d)
    assert text.splitlines()[0] == "system AX*basic[coh,acyc]"
    again = parse_derivation(text, sig)
    assert again.system.schemas == d.system.schemas and again.system.rules == d.system.rules
    assert check_derivation(again)


@pytest.mark.parametrize("d", CORPUS, ids=IDS)
def test_theorems_are_valid_over_all_gsems(d):
    # every system in the corpus is for the unrestricted class
    assert validity(d.theorem, d.sig).status == "VALID"
    rng = random.Random(0)
    for _ in range(100):
        assert oracles.valid(random_gsem(d.sig, rng), d.theorem)


@pytest.mark.parametrize("d", CORPUS, ids=IDS)
def test_mutations_are_rejected(d):
    original = normalize(d.theorem)
    n = 0
    for desc, m in mutations(d, 120, seed=7):
        n += 1
        v = check_derivation(m)
        if v:
            # a mutant may only pass by proving something else, and that must still be valid
            assert normalize(m.theorem) != original, desc
            assert validity(m.theorem, m.sig).status == "VALID", desc
    assert n >= 100


def test_d2plus_steps_are_valid_at_class_level():
    for d in CORPUS:
        for k, s in enumerate(d.steps):
            if isinstance(s.justification, D2plus):
                assert validity(d.steps[s.justification.premise].formula, d.sig).status == "VALID"
                assert validity(s.formula, d.sig).status == "VALID", (d.name, k)


def _contradiction_d2plus(values):
    """D2+ over a ternary X with psi = (X=0 & !X=0), so the values 1 and 2 are never mentioned."""
    sig = Signature.build(endo={"X": ("0", "1", "2")})
    i = Intervention()
    psi = And((Prim("X", "0"), Not(Prim("X", "0"))))
    b = Builder(AXstar_basic(), sig, "d2plus-side")
    parts = [b.axiom("D8", intervention=i, event=Implies(psi, Not(Prim("X", x)))) for x in values]
    goal = conj(b.f(k) for k in parts)
    t = Implies(TRUE, goal)
    for k in reversed(parts):
        t = Implies(b.f(k), t)
    k = b.taut(t)
    for p in parts:
        k = b.mp(p, k)
    b.add(d2plus_conclusion(i, TRUE, psi), D2plus(k, "X", tuple(values), i, TRUE, psi))
    return b.build()


def test_d2plus_side_conditions():
    assert check_derivation(_contradiction_d2plus(("0", "1")))
    assert check_derivation(_contradiction_d2plus(("0", "2")))
    v = check_derivation(_contradiction_d2plus(("0",)))
    assert not v and "not mentioned" in v.reason
    v = check_derivation(_contradiction_d2plus(("1",)))
    assert not v and "misses mentioned values" in v.reason


def test_d2plus_dropping_a_value_is_rejected():
    d = CORPUS[6]  # range-3 derivation: every value is mentioned
    k = next(n for n, s in enumerate(d.steps) if isinstance(s.justification, D2plus))
    j = d.steps[k].justification
    steps = list(d.steps)
    steps[k] = Step(steps[k].formula, replace(j, values=j.values[:-1]))
    v = check_derivation(replace(d, steps=tuple(steps)))
    assert not v and v.bad_step == k


def test_d2plus_not_in_plus_systems():
    d = derived_d2_from_d2plus(binary_signature("X"), "X", system=AXplus_basic())
    v = check_derivation(d)
    assert not v and "D2+ is not a rule" in v.reason


def test_derived_d2_range_one():
    sig = Signature.build(endo={"X": ("0",)})
    d = derived_d2_from_d2plus(sig, "X")
    assert check_derivation(d)
    assert normalize(d.theorem) == normalize(parse_formula("[](X=0)", sig))


def test_altered_d7_intervention_is_rejected_at_that_step():
    d = CORPUS[1]
    k = next(n for n, s in enumerate(d.steps)
             if isinstance(s.justification, Axiom) and s.justification.schema == SchemaId.D7)
    j = d.steps[k].justification
    params = dict(j.params, intervention=Intervention.of({"Y": "0"}))
    steps = list(d.steps)
    steps[k] = Step(steps[k].formula, Axiom(j.schema, params))
    v = check_derivation(replace(d, steps=tuple(steps)))
    assert not v and v.bad_step == k
    assert str(v).startswith(f"REJECT step {k + 1}:")


def test_reject_reasons():
    sig = binary_signature("X")
    i = Intervention.of({"X": "1"})
    b = Builder(AXplus_basic(), sig)
    b.axiom("D4", intervention=i)
    d = b.build()
    bad = replace(d, steps=(Step(Box(i, Prim("X", "0")), d.steps[0].justification),))
    assert "not the D4 instance" in check_derivation(bad).reason
    fwd = replace(d, steps=d.steps + (Step(Prim("X", "1"), MP(0, 3)),))
    assert "not earlier" in check_derivation(fwd).reason
    d3 = replace(d, steps=(Step(d.steps[0].formula, Axiom(SchemaId.D3, {})),))
    assert "not an axiom" in check_derivation(d3).reason
    assert not check_derivation(replace(d, steps=()))


def test_builder_reuses_steps_and_checks_mp():
    sig = binary_signature("X")
    b = Builder(AXplus_basic(), sig)
    i = Intervention.of({"X": "1"})
    a = b.axiom("D4", intervention=i)
    assert b.axiom("D4", intervention=i) == a
    t = b.taut(Implies(b.f(a), b.f(a)))
    assert b.mp(a, t) == a
    with pytest.raises(ValueError):
        b.mp(t, a)
    assert check_derivation(b.build())


@pytest.mark.parametrize("text", [
    "1. [](X=0) ; taut\n",
    "system AX+basic\n2. [](X=0) ; taut\n",
    "system AX+basic\n1. [](X=0) taut\n",
    "system AX+basic\n1. [](X=0) ; guess\n",
])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_derivation(text, binary_signature("X"))


def test_parse_comments_and_system_override():
    text = "# tiny proof\nsystem AX+basic\n1. [X<-1](X=1) ; axiom D4 intervention=[X<-1]  # D4\n"
    sig = binary_signature("X")
    assert check_derivation(parse_derivation(text, sig))
    d = parse_derivation(text.replace("system AX+basic\n", ""), sig, system=AXplus_basic())
    assert check_derivation(d)
