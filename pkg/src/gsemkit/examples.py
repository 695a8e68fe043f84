"""Bundled example models and the pipelines the ``examples`` subcommand runs."""

from __future__ import annotations

from importlib import resources

from .axioms import AXplus, soundness_report
from .decide import count_satisfying_sems, sem_validity
from .formats import format_signature, load_model
from .lang import Not, parse_formula, print_formula
from .model import Gsem
from .properties import is_acyclic_acyc1, is_acyclic_acyc2
from .proof import check_derivation, curated_corpus, format_derivation
from .semantics import check

BUNDLED = ("shell_game.model", "shell_game.sig", "switching_values.model", "cyclic_pair.model")

SHELL_FORMULA = "[S1<-1](S1=1 & S2=1 & Z=1) & [S2<-1](S1=1 & S2=1 & Z=0)"
SHELL_FORMULA_STRICT = SHELL_FORMULA + " & <S1<-1>(true) & <S2<-1>(true)"


def read_bundled(name: str) -> str:
    return resources.files("gsemkit").joinpath("data", name).read_text()


def shell_game() -> Gsem:
    return load_model(read_bundled("shell_game.model"))


def switching_values() -> Gsem:
    return load_model(read_bundled("switching_values.model"))


def run_shell_game() -> tuple[list[str], bool]:
    """The three conclusions about the shell game, plus the strict variant."""
    m = shell_game()
    sig = m.sig
    phi = parse_formula(SHELL_FORMULA, sig)
    u = sig.contexts()[0]
    lines = []
    holds = check(m, u, phi)
    lines.append(f"1. M_shell at {u} satisfies {print_formula(phi)}: {'yes' if holds else 'no'}")
    report = soundness_report(m, AXplus())
    nil = ", ".join(f"{k}={s.not_in_language}" for k, s in report.per_schema.items()
                    if s.instances == 0 and s.not_in_language)
    checked = sum(s.instances for s in report.per_schema.values())
    lines.append(f"2. AX+ instances checked in M_shell: {checked}, violations: {report.violations}; "
                 f"schemas with no instance in the language: {nil}")
    verdict = sem_validity(Not(phi), sig)
    hits, total = count_satisfying_sems(phi, sig)
    line = f"3. not phi over all {total} SEMs: {verdict.label}"
    if verdict.status == "INVALID":
        empty = all(not verdict.model.outcomes(verdict.context, i) for i in sig.allowed)
        line += (f" ({hits} SEMs satisfy phi; first countermodel has "
                 f"{'no outcomes for either intervention' if empty else 'outcomes'})")
    lines.append(line)
    strict = parse_formula(SHELL_FORMULA_STRICT, sig)
    strict_verdict = sem_validity(Not(strict), sig)
    lines.append(f"   with outcomes required ({print_formula(strict)}): "
                 f"not phi' over SEMs {strict_verdict.label}; M_shell satisfies phi': "
                 f"{'yes' if check(m, u, strict) else 'no'}")
    ok = holds and report.violations == 0 and verdict.status == "VALID"
    return lines, ok


def run_switching_values() -> tuple[list[str], bool]:
    m = switching_values()
    r1 = is_acyclic_acyc1(m)
    r2 = is_acyclic_acyc2(m)
    lines = [f"Acyc1: {'holds' if r1 else 'fails'}", f"Acyc2: {'holds' if r2 else 'fails'}"]
    if r2:
        order = next(iter(r2.orders.values()))
        lines.append(f"Acyc2 order: {' < '.join(order)}")
    for v in r1.violations:
        lines.append(f"Acyc1 blocked: {v}")
    return lines, (not r1.holds) and r2.holds


def run_derivations() -> tuple[list[str], bool]:
    lines = []
    ok = True
    for d in curated_corpus():
        v = check_derivation(d)
        ok &= v.accepted
        lines.append(f"{d.name} ({d.system.name}, {len(d.steps)} steps): {v} {print_formula(d.theorem)}")
    return lines, ok


def derivation_files() -> dict[str, tuple[str, str]]:
    """Name -> (signature text, derivation text) for each curated derivation."""
    out = {}
    for d in curated_corpus():
        out[d.name] = (format_signature(d.sig), format_derivation(d))
    return out
