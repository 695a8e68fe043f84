"""End-to-end acceptance checks, one PASS/FAIL line per criterion.

Each test prints its line before asserting, so the line shows up in the log
whether or not the criterion holds. Run with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import random
import time

import numpy as np
import pytest

from gsemkit.axioms import (AXplus, AXstar_basic_A, enumerate_instances, event_pool, hd9_formula,
                            instantiate, schema_instances, soundness_report)
from gsemkit.core import Intervention, Signature, all_classes, format_class
from gsemkit.decide import count_satisfying_sems, sem_validity, validity
from gsemkit.examples import SHELL_FORMULA, SHELL_FORMULA_STRICT, shell_game, switching_values
from gsemkit.lang import Not, parse_formula, print_formula, random_formula
from gsemkit.model import (Gsem, enumerate_gsems, enumerate_sems, equivalent, random_acyclic_sem,
                           random_gsem, random_sem, sem_to_gsem)
from gsemkit.proof import check_derivation, curated_corpus, mutations
from gsemkit.properties import (has_ge1, has_le1, in_class, is_acyclic_acyc1, is_acyclic_acyc2,
                                is_coherent)
from gsemkit.semantics import ModelBatch, check, l_equivalent
from helpers import binary_signature

FULL = ("coh", "acyc", "ge1", "le1")


@pytest.fixture
def report(capsys):
    def emit(label: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_shell_game(report):
    start = time.perf_counter()
    m = shell_game()
    sig = m.sig
    phi = parse_formula(SHELL_FORMULA, sig)
    sat = check(m, sig.contexts()[0], phi)
    sound = soundness_report(m, AXplus())
    unreachable = {k.value for k, s in sound.per_schema.items() if s.instances == 0 and s.not_in_language}
    verdict = sem_validity(Not(phi), sig)
    hits, total = count_satisfying_sems(phi, sig)
    # reported alongside, never substituted: the same claim with outcomes required
    strict = sem_validity(Not(parse_formula(SHELL_FORMULA_STRICT, sig)), sig)
    elapsed = time.perf_counter() - start
    ok = (sat and sound.violations == 0 and {"D5", "D9"} <= unreachable
          and verdict.status == "VALID" and elapsed < 5)
    report("criterion 1 shell game", ok,
           f"(a) satisfied={sat}; (b) violations={sound.violations}, not in language: "
           f"{sorted(unreachable)}; (c) not phi over all {total} SEMs: {verdict.label}, "
           f"{hits} SEMs satisfy phi [strengthened phi': {strict.label}]; {elapsed:.2f}s")


def test_criterion_2_switching_values(report):
    start = time.perf_counter()
    m = switching_values()
    r1, r2 = is_acyclic_acyc1(m), is_acyclic_acyc2(m)
    witness = next((v for v in r1.violations if v.compared == ("A", "B")), None)
    elapsed = time.perf_counter() - start
    ok = (not r1.holds and r2.holds and witness is not None
          and witness.restriction == {("0", "0"), ("1", "1")}
          and witness.other_restriction == {("0", "1"), ("1", "0")} and elapsed < 1)
    report("criterion 2 switching values", ok,
           f"Acyc1={r1.holds}, Acyc2={r2.holds}, witness: {witness}; {elapsed:.3f}s")


def test_criterion_3_acyc_conditions_on_sems(report):
    start = time.perf_counter()
    checked = exceptions = 0
    for names in (("X",), ("X", "Y")):
        for sem in enumerate_sems(binary_signature(*names)):
            g = sem_to_gsem(sem)
            checked += 1
            exceptions += is_acyclic_acyc1(g).holds != is_acyclic_acyc2(g).holds
    sig3 = binary_signature("X", "Y", "Z")
    rng = random.Random(3)
    acyclic = 0
    for _ in range(1000):
        g = sem_to_gsem(random_sem(sig3, rng))
        a1 = is_acyclic_acyc1(g).holds
        checked += 1
        acyclic += a1
        exceptions += a1 != is_acyclic_acyc2(g).holds
    elapsed = time.perf_counter() - start
    report("criterion 3 Acyc1 <=> Acyc2 on SEMs", exceptions == 0 and elapsed < 60,
           f"{checked} SEMs ({acyclic} of the random 3-variable ones acyclic), "
           f"{exceptions} exceptions; {elapsed:.1f}s")


def _violations(sig: Signature, models, system) -> tuple[int, int]:
    if not models:
        return 0, 0
    batch = ModelBatch.from_models(sig, models)
    bad = n = 0
    for inst in enumerate_instances(system, sig):
        n += 1
        bad += int((~batch.valid(inst.formula)).sum())
    return bad, n


def test_criterion_4_soundness_per_class(report):
    sig1, sig2 = binary_signature("X"), binary_signature("X", "Y")
    rng = random.Random(4)
    total_bad = models_checked = 0
    parts = []
    for cls in all_classes():
        system = AXstar_basic_A(cls)
        exhaustive = list(enumerate_gsems(sig1, cls))
        sampled = [random_gsem(sig2, rng, cls) for _ in range(500)]
        assert all(in_class(g, cls) for g in sampled[:50])
        b1, _ = _violations(sig1, exhaustive, system)
        b2, _ = _violations(sig2, sampled, system)
        total_bad += b1 + b2
        models_checked += len(exhaustive) + len(sampled)
        parts.append(f"{format_class(cls)}:{b1 + b2}")
    report("criterion 4 soundness of AX*basic,A", total_bad == 0,
           f"16 classes, {models_checked} models, violations {total_bad} ({' '.join(parts)})")


def test_criterion_5_class_capture(report):
    sig = binary_signature("X")
    models = list(enumerate_gsems(sig))
    batch = ModelBatch.from_models(sig, models)
    props = {"D3": is_coherent, "D10a": has_ge1, "D10b": has_le1, "D6plus": is_acyclic_acyc1}
    mismatches = {}
    for schema, prop in props.items():
        holds = np.ones(len(models), dtype=bool)
        for inst in schema_instances(schema, sig, budget=None):
            holds &= batch.valid(inst.formula)
        mismatches[schema] = sum(bool(holds[k]) != prop(g).holds for k, g in enumerate(models))
    report("criterion 5 class capture", len(models) == 16 and not any(mismatches.values()),
           f"{len(models)} models, mismatches {mismatches}")


def _perturb(g: Gsem, rng: random.Random) -> Gsem:
    """Same model, or one cell redrawn among its effective outcome sets."""
    if rng.random() < 0.5:
        return Gsem(g.sig, g.table)
    rows = [list(r) for r in g.table]
    c = rng.randrange(len(rows))
    k = rng.randrange(len(rows[c]))
    eff = g.sig.effective_mask(g.sig.allowed[k])
    rows[c][k] = rng.randrange(eff + 1) & eff
    return Gsem(g.sig, tuple(tuple(r) for r in rows))


def test_criterion_6_l_equivalence(report):
    sig1 = binary_signature("X")
    models = list(enumerate_gsems(sig1))
    pairs = list(itertools.product(models, repeat=2))
    sig2 = binary_signature("X", "Y")
    rng = random.Random(6)
    for _ in range(200):
        pairs.append((random_gsem(sig2, rng), random_gsem(sig2, rng)))
    for _ in range(200):
        g = random_gsem(sig2, rng)
        pairs.append((g, _perturb(g, rng)))
    mismatches = sum(l_equivalent(a, b) != equivalent(a, b) for a, b in pairs)
    same = sum(equivalent(a, b) for a, b in pairs)
    report("criterion 6 L-equivalence <=> equivalence", mismatches == 0,
           f"{len(pairs)} pairs ({same} equivalent), {mismatches} mismatches")


def test_criterion_7_d5_shadow(report):
    sig = binary_signature("X", "Y", "Z")
    rng = random.Random(7)
    # the raw search space is far above the cap, so enumerate without it and stop at a limit
    limit = 3000
    enumerated = list(itertools.islice(enumerate_gsems(sig, FULL, cap=0), limit))
    complete = "the whole class" if len(enumerated) < limit else "a capped prefix"
    sampled = [random_gsem(sig, rng, FULL) for _ in range(500)]
    from_sems = [sem_to_gsem(random_acyclic_sem(sig, rng)) for _ in range(500)]
    models = enumerated + sampled + from_sems
    in_full = all(in_class(g, FULL) for g in models[::25])
    insts = schema_instances("D5", sig, budget=None)
    batch = ModelBatch.from_models(sig, models)
    bad = sum(int((~batch.valid(inst.formula)).sum()) for inst in insts)
    report("criterion 7 D5 in the full class", bad == 0 and in_full and len(insts) > 0,
           f"{len(models)} models ({len(enumerated)} enumerated, {complete}; {len(sampled)} sampled, "
           f"{len(from_sems)} from acyclic SEMs), {len(insts)} D5 instances, {bad} violations")


def test_criterion_8_hd9_vs_d9(report):
    rng = random.Random(8)
    sig2 = binary_signature("X", "Y")
    universes = [list(enumerate_gsems(binary_signature("X"))),
                 [random_gsem(sig2, rng) for _ in range(500)]]
    mismatches = compared = 0
    for models in universes:
        sig = models[0].sig
        pool = event_pool(sig)
        batch = ModelBatch.from_models(sig, models)
        for i in sig.allowed:
            if len(i) != len(sig.endo_vars) - 1:
                continue
            hd9 = batch.check(hd9_formula(sig, i))
            d9 = np.ones_like(hd9)
            for e in pool:
                d9 &= batch.check(instantiate("D9", sig, {"intervention": i, "event": e}))
            mismatches += int((hd9 != d9).sum())
            compared += hd9.size
    report("criterion 8 HD9 <=> D9", mismatches == 0,
           f"{compared} (model, context, intervention) cases, {mismatches} mismatches")


def test_criterion_9_proof_checker(report):
    corpus = curated_corpus()
    rejected_all = accepted_corpus = 0
    sneaky = invalid = 0
    names = {d.name for d in corpus}
    for d in corpus:
        accepted_corpus += bool(check_derivation(d))
        theorem = d.theorem
        ok = True
        for _desc, m in mutations(d, 100, seed=9):
            if check_derivation(m):
                if m.theorem == theorem:
                    sneaky += 1
                    ok = False
                elif validity(m.theorem, m.sig, m.system.sound_for).status != "VALID":
                    invalid += 1
        rejected_all += ok
        if validity(theorem, d.sig, d.system.sound_for).status != "VALID":
            invalid += 1
    has_required = any(n.startswith("d2-from-d2plus") for n in names) and \
        any(n.startswith("box-and") for n in names)
    ok = (len(corpus) >= 6 and has_required and accepted_corpus == len(corpus)
          and sneaky == 0 and invalid == 0)
    report("criterion 9 proof checker", ok,
           f"{accepted_corpus}/{len(corpus)} ACCEPT, 100 mutations each: {sneaky} accepted with "
           f"the same theorem, {invalid} accepted theorems not valid")


def test_criterion_10_parser_round_trip(report):
    sig = Signature.build(exo={"U": ("u0", "u1")},
                          endo={"X": ("0", "1"), "Y": ("a", "b", "c"), "Z": ("0", "1")},
                          allowed=[Intervention(), Intervention.of({"X": "1"}),
                                   Intervention.of({"Y": "c", "Z": "0"})])
    failures = 0
    for seed in range(1000):
        f = random_formula(sig, random.Random(seed), 4)
        failures += parse_formula(print_formula(f), sig) != f
    report("criterion 10 parser round trip", failures == 0, f"1000 formulas, {failures} failures")
