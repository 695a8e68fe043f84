import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsemkit.core import all_classes
from gsemkit.decide import (count_satisfying_sems, satisfiable, sem_satisfiable, sem_validity,
                            validity)
from gsemkit.examples import SHELL_FORMULA, SHELL_FORMULA_STRICT
from gsemkit.lang import Not, parse_formula, random_formula
from gsemkit.model import count_gsems, equivalent
from gsemkit.semantics import check
from helpers import binary_signature
import oracles


def test_effectiveness_is_valid(sig1):
    assert validity(parse_formula("[X<-1](X=1)", sig1), sig1).status == "VALID"


def test_some_outcome_depends_on_class(sig1):
    f = parse_formula("<>true", sig1)
    v = validity(f, sig1, ())
    assert v.status == "INVALID"
    assert not check(v.model, v.context, f)
    assert validity(f, sig1, ("ge1",)).status == "VALID"


def test_shell_formula_pins_down_the_shell_game(shell):
    sig = shell.sig
    f = parse_formula(SHELL_FORMULA, sig)
    v = satisfiable(f, sig, ("ge1", "le1"))
    assert v.status == "SAT"
    assert equivalent(v.model, shell)
    # with exactly one outcome per cell the formula has no other model
    assert count_gsems(sig, ("ge1", "le1")) == 16
    assert validity(Not(f), sig, ("coh", "ge1", "le1")).status == "INVALID"


def test_unsatisfiable_and_trivial(sig1):
    assert satisfiable(parse_formula("[](X=0) & <>(X=1)", sig1), sig1).status == "UNSAT"
    v = satisfiable(parse_formula("true", sig1), sig1)
    assert v.status == "SAT" and v.examined == 1


def test_sem_mode(sig1):
    v = sem_validity(parse_formula("[X<-0](X=1)", sig1), sig1)
    assert v.status == "INVALID" and v.sem is not None
    assert sem_validity(parse_formula("[X<-0](X=0)", sig1), sig1).status == "VALID"
    assert sem_satisfiable(parse_formula("[](X=1)", sig1), sig1).status == "SAT"


def test_shell_formula_over_sems(shell):
    sig = shell.sig
    hits, total = count_satisfying_sems(parse_formula(SHELL_FORMULA, sig), sig)
    assert (hits, total) == (256, 4096)
    assert count_satisfying_sems(parse_formula(SHELL_FORMULA_STRICT, sig), sig) == (0, 4096)
    assert sem_validity(parse_formula("!(" + SHELL_FORMULA_STRICT + ")", sig), sig).status == "VALID"


def test_cap_exceeded(sig2):
    f = parse_formula("true", sig2)
    v = validity(f, sig2, cap=100)
    assert v.status == "CAP-EXCEEDED" and v.label == "CAP-EXCEEDED(65536)"
    assert sem_validity(f, sig2, cap=10).label == "CAP-EXCEEDED(16)"


def test_cap_from_environment(sig2, monkeypatch):
    monkeypatch.setenv("GSEMKIT_CAP", "10")
    assert sem_validity(parse_formula("true", sig2), sig2).label == "CAP-EXCEEDED(16)"


def test_sampled_label(sig3):
    f = parse_formula("[X<-1](X=1)", sig3)
    v = validity(f, sig3, sample=50, seed=1)
    assert v.status == "VALID" and v.sampled and v.label == "VALID (SAMPLED)"
    v = satisfiable(parse_formula("<>true", sig3), sig3, sample=50, seed=1)
    assert v.label == "SAT (SAMPLED)"


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from(all_classes()))
def test_validity_is_dual_to_satisfiability(seed, cls):
    sig = binary_signature("X")
    f = random_formula(sig, random.Random(seed), 3)
    valid = validity(f, sig, cls)
    refuted = satisfiable(Not(f), sig, cls)
    assert (valid.status == "VALID") == (refuted.status == "UNSAT")
    if valid.status == "INVALID":
        assert not check(valid.model, valid.context, f)
        assert check(refuted.model, refuted.context, Not(f))


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_validity_is_monotone_in_the_class(seed):
    sig = binary_signature("X")
    f = random_formula(sig, random.Random(seed), 3)
    verdicts = {cls: validity(f, sig, cls).status == "VALID" for cls in all_classes()}
    for small in all_classes():
        for big in all_classes():
            if set(big) <= set(small) and verdicts[big]:
                assert verdicts[small], (big, small)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_validity_agrees_with_oracle(seed):
    sig = binary_signature("X")
    f = random_formula(sig, random.Random(seed), 3)
    expected = all(oracles.valid(m, f) for m in oracles.all_gsems(sig))
    assert (validity(f, sig).status == "VALID") == expected


def test_unknown_class_rejected(sig1):
    with pytest.raises(ValueError):
        validity(parse_formula("true", sig1), sig1, ("nope",))
