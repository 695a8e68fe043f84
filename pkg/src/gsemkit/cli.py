"""``gsem-kit`` command line.

Exit codes: 0 affirmative (VALID, SAT, ACCEPT, all properties hold), 1 negative,
2 usage or parse errors, 3 when an enumeration cap is exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import examples
from .axioms import DEFAULT_BUDGET, soundness_report, system_by_name
from .core import Signature, cap_from_env, model_class
from .decide import satisfiable, sem_satisfiable, sem_validity, validity
from .errors import CapExceeded, FormulaSyntaxError, GsemError
from .formats import format_gsem, load_model, parse_model, parse_signature
from .lang import from_json, parse_formula, parse_intervention, print_formula, to_json
from .model import Sem, solve_sem
from .properties import classify, is_acyclic_acyc2, is_acyclic_sem
from .proof import check_derivation, parse_derivation
from .semantics import check as check_formula
from .semantics import valid_in_model

OK, NEGATIVE, USAGE, CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, text_lines, payload) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _signature_from(path: str) -> Signature:
    """A signature file, or the signature of a model file."""
    text = _read(path)
    try:
        return parse_signature(text)
    except GsemError:
        return parse_model(text).sig


def _formulas(args, sig: Signature | None) -> list:
    texts = list(args.formula or [])
    if getattr(args, "formula_file", None):
        texts += [ln.strip() for ln in _read(args.formula_file).splitlines()
                  if ln.strip() and not ln.lstrip().startswith("#")]
    if not texts:
        raise UsageError("give at least one --formula or --formula-file")
    return [parse_formula(t, sig) for t in texts]


def _context(sig: Signature, name: str | None):
    contexts = sig.contexts()
    if name is None:
        if len(contexts) != 1:
            raise UsageError("the signature has several contexts; pick one with --context")
        return contexts[0]
    parts = tuple(p.strip() for p in name.strip("()").split(",")) if name else ()
    for u in contexts:
        if u.values == parts:
            return u
    raise UsageError(f"{name!r} is not a context; contexts are "
                     + ", ".join("(" + ",".join(u.values) + ")" for u in contexts))


def _assignment_json(v) -> dict:
    return dict(v.items())


# -- subcommands ------------------------------------------------------------

def cmd_parse(args) -> int:
    sig = _signature_from(args.signature) if args.signature else None
    if args.from_json:
        raw = json.loads(_read(args.from_json))
        fs = [from_json(d) for d in (raw if isinstance(raw, list) else [raw])]
    else:
        fs = _formulas(args, sig)
    _emit(args, [print_formula(f) for f in fs], [to_json(f) for f in fs])
    return OK


def cmd_solve(args) -> int:
    text = _read(args.model)
    m = parse_model(text)
    sig = m.sig
    u = _context(sig, args.context)
    i = parse_intervention(args.intervene or "", sig)
    if isinstance(m, Sem):
        outs = solve_sem(m, u, i)
    else:
        outs = m.outcomes(u, i)
    outs = sorted(outs, key=sig.endo_index)
    _emit(args, [str(v) for v in outs], [_assignment_json(v) for v in outs])
    return OK if outs else NEGATIVE


def cmd_check(args) -> int:
    m = load_model(_read(args.model))
    sig = m.sig
    fs = _formulas(args, sig)
    lines, payload, all_hold = [], [], True
    for f in fs:
        if args.all_contexts:
            holds, failing = valid_in_model(m, f)
            scope = "all contexts"
        else:
            u = _context(sig, args.context)
            holds = check_formula(m, u, f)
            failing = None if holds else u
            scope = f"context {u}"
        all_hold &= holds
        line = f"{'TRUE' if holds else 'FALSE'} in {scope}: {print_formula(f)}"
        entry = {"formula": print_formula(f), "holds": holds}
        if failing is not None and args.witness:
            line += f"\n  fails in context {failing}"
            entry["failing_context"] = _assignment_json(failing)
        lines.append(line)
        payload.append(entry)
    _emit(args, lines, payload)
    return OK if all_hold else NEGATIVE


def cmd_classify(args) -> int:
    raw = parse_model(_read(args.model))
    m = load_model(_read(args.model)) if isinstance(raw, Sem) else raw
    wanted = model_class(args.cls) if args.cls else ("coh", "acyc", "ge1", "le1")
    results = classify(m)
    lines, payload = [], {}
    for p in wanted:
        r = results[p]
        lines.append(f"{p:5} {'yes' if r.holds else 'no'}")
        entry = {"holds": r.holds}
        if not r.holds:
            ws = r.witness if isinstance(r.witness, tuple) else (r.witness,)
            for w in ws:
                lines.append(f"      {w}")
            entry["witness"] = [str(w) for w in ws]
        payload[p] = entry
    if "acyc" in wanted:
        r2 = is_acyclic_acyc2(m)
        lines.append(f"acyc2 {'yes' if r2.holds else 'no'}")
        payload["acyc2"] = {"holds": r2.holds}
    if isinstance(raw, Sem):
        rs = is_acyclic_sem(raw)
        lines.append(f"sem-acyclic {'yes' if rs.holds else 'no'}")
        payload["sem_acyclic"] = {"holds": rs.holds}
    _emit(args, lines, payload)
    return OK if all(results[p].holds for p in wanted) else NEGATIVE


def cmd_axioms(args) -> int:
    m = load_model(_read(args.model))
    try:
        system = system_by_name(args.system, args.cls)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = soundness_report(m, system, args.budget, args.seed)
    lines = [f"{system.name}: {report.violations} violation(s)",
             f"{'schema':8} {'instances':>9} {'valid':>6} {'violated':>8} {'not-in-language':>15}"]
    for k, s in report.per_schema.items():
        lines.append(f"{str(k):8} {s.instances:9} {s.valid:6} {s.violated:8} {s.not_in_language:15}")
        for f, u in s.witnesses:
            lines.append(f"  violated in context {u}: {print_formula(f)}")
    if report.mp_checks:
        lines.append(f"MP spot checks: {report.mp_checks}, failures: {report.mp_failures}")
    _emit(args, lines, report.to_json())
    return OK if report.violations == 0 else NEGATIVE


def cmd_prove(args) -> int:
    sig = _signature_from(args.model_signature)
    system = system_by_name(args.system, args.cls) if args.system else None
    try:
        d = parse_derivation(_read(args.derivation), sig, system)
    except ValueError as exc:
        if isinstance(exc, GsemError):
            raise
        raise UsageError(str(exc)) from None
    if d.system is None:
        raise UsageError("the derivation names no axiom system; add a 'system' line or --system")
    v = check_derivation(d)
    theorem = print_formula(v.theorem) if v.accepted else None
    line = f"ACCEPT {theorem}" if v.accepted else str(v)
    payload = {"accepted": v.accepted, "theorem": theorem,
               "bad_step": None if v.accepted else v.bad_step + 1, "reason": v.reason or None}
    _emit(args, [line], payload)
    return OK if v.accepted else NEGATIVE


def cmd_decide(args) -> int:
    sig = _signature_from(args.signature)
    fs = _formulas(args, sig)
    if len(fs) != 1:
        raise UsageError("decide takes exactly one formula")
    f = fs[0]
    cap = args.cap if args.cap is not None else cap_from_env()
    if args.mode == "sem":
        if args.cls:
            raise UsageError("--class applies to --mode gsem only")
        fn = sem_satisfiable if args.sat else sem_validity
        v = fn(f, sig, cap=cap, sample=args.sample, seed=args.seed)
    else:
        fn = satisfiable if args.sat else validity
        v = fn(f, sig, model_class(args.cls or ()), cap=cap, sample=args.sample, seed=args.seed)
    lines = [v.label]
    payload = {"verdict": v.status, "sampled": v.sampled, "examined": v.examined}
    if v.status == "CAP-EXCEEDED":
        payload["count"] = v.cap_count
    if v.model is not None:
        model_text = format_gsem(v.model)
        lines.append(f"context {v.context}")
        payload["context"] = _assignment_json(v.context)
        payload["model"] = model_text
        if args.out:
            Path(args.out).write_text(model_text)
            lines.append(f"model written to {args.out}")
        else:
            lines.append(model_text.rstrip("\n"))
    _emit(args, lines, payload)
    if v.status == "CAP-EXCEEDED":
        return CAP
    return OK if v.status in ("VALID", "SAT") else NEGATIVE


def cmd_examples(args) -> int:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    if args.name == "shell-game":
        if args.out:
            for name in ("shell_game.sig", "shell_game.model"):
                (out / name).write_text(examples.read_bundled(name))
        lines, ok = examples.run_shell_game()
    elif args.name == "switching-values":
        if args.out:
            (out / "switching_values.model").write_text(examples.read_bundled("switching_values.model"))
        lines, ok = examples.run_switching_values()
    else:
        if args.out:
            for name, (sig_text, der_text) in examples.derivation_files().items():
                (out / f"{name}.sig").write_text(sig_text)
                (out / f"{name}.proof").write_text(der_text)
        lines, ok = examples.run_derivations()
    _emit(args, lines, {"lines": lines, "ok": ok})
    return OK if ok else NEGATIVE


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="gsem-kit", description="Causal models with generalized outcomes.")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_args(sp):
        sp.add_argument("--formula", action="append", help="formula text (repeatable)")
        sp.add_argument("--formula-file", help="file with one formula per line")

    sp = sub.add_parser("parse", parents=[common], help="parse and pretty-print formulas")
    formula_args(sp)
    sp.add_argument("--signature", help="signature or model file to validate against")
    sp.add_argument("--from-json", help="read formulas from a JSON AST file instead")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("solve", parents=[common], help="outcomes of an intervention")
    sp.add_argument("--model", required=True)
    sp.add_argument("--context")
    sp.add_argument("--intervene", default="")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check", parents=[common], help="satisfaction of formulas in a model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--context")
    formula_args(sp)
    sp.add_argument("--all-contexts", action="store_true", help="check validity in the model")
    sp.add_argument("--witness", action="store_true", help="print a falsifying context")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("classify", parents=[common], help="model class membership")
    sp.add_argument("--model", required=True)
    sp.add_argument("--class", dest="cls", default="")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("axioms", parents=[common], help="soundness report for an axiom system")
    sp.add_argument("--model", required=True)
    sp.add_argument("--system", default="AX+")
    sp.add_argument("--class", dest="cls", default="")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_axioms)

    sp = sub.add_parser("prove", parents=[common], help="check a derivation")
    sp.add_argument("--model-signature", required=True)
    sp.add_argument("--derivation", required=True)
    sp.add_argument("--system", help="override the derivation's system line")
    sp.add_argument("--class", dest="cls", default="")
    sp.set_defaults(func=cmd_prove)

    sp = sub.add_parser("decide", parents=[common], help="validity or satisfiability by enumeration")
    sp.add_argument("--signature", required=True)
    sp.add_argument("--class", dest="cls", default="")
    formula_args(sp)
    sp.add_argument("--mode", choices=("gsem", "sem"), default="gsem")
    sp.add_argument("--sat", action="store_true", help="decide satisfiability instead of validity")
    sp.add_argument("--sample", type=int, help="check N random models instead of all")
    sp.add_argument("--cap", type=int, help="enumeration cap (default: GSEMKIT_CAP or 10^7)")
    sp.add_argument("--out", help="write the countermodel or witness model here")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("examples", parents=[common], help="run a bundled example")
    sp.add_argument("name", choices=("shell-game", "switching-values", "derivations"))
    sp.add_argument("--out", help="also write the example files into this directory")
    sp.set_defaults(func=cmd_examples)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except FormulaSyntaxError as exc:
        print(f"gsem-kit: syntax error: {exc}", file=sys.stderr)
        if exc.text:
            print(exc.pointer(), file=sys.stderr)
        return USAGE
    except CapExceeded as exc:
        print(f"CAP-EXCEEDED({exc.count})")
        return CAP
    except (UsageError, GsemError, json.JSONDecodeError) as exc:
        print(f"gsem-kit: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
