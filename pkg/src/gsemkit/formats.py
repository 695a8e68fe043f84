"""Text formats for signatures, models and derivations' signatures.

Signature lines::

    exo U : {u0, u1}
    endo X : {0, 1}
    allow []
    allow [X<-1, Y<-0]
    allow all            # every intervention, null included

A model file is a signature followed by one ``gsem`` or ``sem`` block::

    gsem {
      outcome (u0) [S1<-1] = { (S1=1, S2=1, Z=1) }
    }
    sem {
      eq Z(U, S1, S2) = { (u0,0,0)->0, (u0,*,1)->1, ... }
    }

``*`` in an equation row matches every value. Comments start with ``#``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .core import Assignment, Intervention, Signature, all_interventions
from .errors import ModelFormatError
from .model import Gsem, Sem, equation_args, sem_to_gsem

_TOKEN = re.compile(r"(<-|->|[{}()\[\],:=*])|([A-Za-z0-9_.]+)")


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    is_name: bool


def _lex(text: str) -> list[_Tok]:
    toks = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(line, pos)
            if not m:
                raise ModelFormatError(f"line {lineno}: unexpected character {line[pos]!r}")
            toks.append(_Tok(m.group(0), lineno, m.group(2) is not None))
            pos = m.end()
    return toks


class _Reader:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def fail(self, msg: str):
        t = self.peek()
        where = f"line {t.line}" if t else "end of file"
        raise ModelFormatError(f"{where}: {msg}")

    def take(self, text: str | None = None) -> _Tok:
        t = self.peek()
        if t is None:
            self.fail(f"expected {text!r}" if text else "unexpected end of file")
        if text is not None and t.text != text:
            self.fail(f"expected {text!r}, found {t.text!r}")
        if text is None and not t.is_name:
            self.fail(f"expected a name, found {t.text!r}")
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.text == text:
            self.i += 1
            return True
        return False

    def name_list(self, open_: str, close: str) -> list[str]:
        self.take(open_)
        out = []
        if self.accept(close):
            return out
        while True:
            out.append(self.take().text)
            if self.accept(close):
                return out
            self.take(",")

    def row(self) -> list[str]:
        """A parenthesised equation row; ``*`` is allowed as a value."""
        self.take("(")
        out = []
        if self.accept(")"):
            return out
        while True:
            out.append("*" if self.accept("*") else self.take().text)
            if self.accept(")"):
                return out
            self.take(",")

    def bindings(self) -> Intervention:
        self.take("[")
        pairs = []
        if self.accept("]"):
            return Intervention()
        while True:
            v = self.take().text
            self.take("<-")
            pairs.append((v, self.take().text))
            if self.accept("]"):
                break
            self.take(",")
        try:
            return Intervention(tuple(pairs))
        except ValueError as exc:
            self.fail(str(exc))


def _read_signature(r: _Reader) -> Signature:
    exo, endo, allowed, allow_all = [], [], [], False
    while True:
        t = r.peek()
        if t is None or t.text not in ("exo", "endo", "allow"):
            break
        r.take()
        if t.text in ("exo", "endo"):
            name = r.take().text
            r.take(":")
            values = r.name_list("{", "}")
            (exo if t.text == "exo" else endo).append((name, tuple(values)))
        elif r.accept("all"):
            allow_all = True
        else:
            allowed.append(r.bindings())
    if not endo:
        r.fail("a signature needs at least one endogenous variable")
    if allow_all:
        ranges = dict(endo)
        allowed.extend(all_interventions([v for v, _ in endo], ranges))
    try:
        return Signature(tuple(exo), tuple(endo), tuple(allowed))
    except Exception as exc:
        raise ModelFormatError(f"bad signature: {exc}") from None


def parse_signature(text: str) -> Signature:
    r = _Reader(text)
    sig = _read_signature(r)
    if r.peek() is not None:
        r.fail(f"unexpected {r.peek().text!r} after the signature")
    return sig


def format_signature(sig: Signature) -> str:
    lines = [f"exo {v} : {{{', '.join(r)}}}" for v, r in sig.exo]
    lines += [f"endo {v} : {{{', '.join(r)}}}" for v, r in sig.endo]
    universal = set(all_interventions(sig.endo_vars, sig.ranges))
    if set(sig.allowed) == universal:
        lines.append("allow all")
    else:
        lines += [f"allow [{i}]" for i in sig.allowed]
    return "\n".join(lines) + "\n"


def _read_gsem(r: _Reader, sig: Signature) -> Gsem:
    r.take("{")
    table: dict[tuple[int, int], int] = {}
    while not r.accept("}"):
        r.take("outcome")
        ctx = tuple(r.name_list("(", ")"))
        try:
            c = sig.context_index(ctx)
        except ValueError:
            r.fail(f"{ctx} is not a context of the signature")
        i = r.bindings()
        if not sig.is_allowed(i):
            r.fail(f"[{i}] is not an allowed intervention")
        k = sig.allowed_index(i)
        r.take("=")
        r.take("{")
        mask = 0
        while not r.accept("}"):
            r.take("(")
            pairs = {}
            while True:
                v = r.take().text
                r.take("=")
                pairs[v] = r.take().text
                if r.accept(")"):
                    break
                r.take(",")
            if set(pairs) != set(sig.endo_vars):
                r.fail(f"outcome must assign exactly {list(sig.endo_vars)}")
            for v, val in pairs.items():
                if val not in sig.range(v):
                    r.fail(f"{val!r} is not in the range of {v!r}")
            try:
                mask |= 1 << sig.endo_index(Assignment.of(pairs))
            except ValueError as exc:
                r.fail(str(exc))
            r.accept(",")
        if (c, k) in table:
            r.fail(f"outcome for {ctx} [{i}] given twice")
        table[(c, k)] = mask
    rows = []
    for c, u in enumerate(sig.contexts()):
        row = []
        for k, i in enumerate(sig.allowed):
            if (c, k) not in table:
                raise ModelFormatError(f"missing outcome for context {u} and [{i}]")
            row.append(table[(c, k)])
        rows.append(tuple(row))
    try:
        return Gsem(sig, tuple(rows))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def _read_sem(r: _Reader, sig: Signature) -> Sem:
    r.take("{")
    tables: dict[str, list] = {}
    while not r.accept("}"):
        r.take("eq")
        x = r.take().text
        if x not in sig.endo_vars:
            r.fail(f"{x!r} is not an endogenous variable")
        if x in tables:
            r.fail(f"equation for {x!r} given twice")
        expected = equation_args(sig, x)
        header = r.name_list("(", ")") if r.peek() and r.peek().text == "(" else []
        r.take("=")
        rows: list[str | None] = [None] * _product(sig, expected)
        if r.peek() is not None and r.peek().is_name:
            value = r.take().text
            rows = [value] * len(rows)
        else:
            if sorted(header) != sorted(expected):
                r.fail(f"equation for {x!r} must list arguments {list(expected)}")
            r.take("{")
            while not r.accept("}"):
                vals = r.row()
                r.take("->")
                out = r.take().text
                if len(vals) != len(header):
                    r.fail(f"row for {x!r} needs {len(header)} values")
                given = dict(zip(header, vals))
                choices = [sig.range(a) if given[a] == "*" else (given[a],) for a in expected]
                for a, ch in zip(expected, choices):
                    if ch[0] not in sig.range(a):
                        r.fail(f"{ch[0]!r} is not in the range of {a!r}")
                for combo in itertools.product(*choices):
                    idx = 0
                    for a, val in zip(expected, combo):
                        idx = idx * len(sig.range(a)) + sig.range(a).index(val)
                    if rows[idx] is not None and rows[idx] != out:
                        r.fail(f"conflicting rows for {x!r} at {combo}")
                    rows[idx] = out
                r.accept(",")
        if any(v is None for v in rows):
            first = next(k for k, v in enumerate(rows) if v is None)
            combo = list(itertools.product(*(sig.range(a) for a in expected)))[first]
            raise ModelFormatError(f"equation for {x!r} is not total; no row for {combo}")
        tables[x] = rows
    missing = [x for x in sig.endo_vars if x not in tables]
    if missing:
        raise ModelFormatError(f"no equation for {missing}")
    try:
        return Sem(sig, tuple(tuple(tables[x]) for x in sig.endo_vars))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def _product(sig: Signature, args) -> int:
    n = 1
    for a in args:
        n *= len(sig.range(a))
    return n


def parse_model(text: str) -> Gsem | Sem:
    """The model as written: a ``Gsem`` or a ``Sem``."""
    r = _Reader(text)
    sig = _read_signature(r)
    t = r.peek()
    if t is None:
        raise ModelFormatError("expected a gsem or sem block after the signature")
    r.take()
    if t.text == "gsem":
        m = _read_gsem(r, sig)
    elif t.text == "sem":
        m = _read_sem(r, sig)
    else:
        raise ModelFormatError(f"line {t.line}: expected 'gsem' or 'sem', found {t.text!r}")
    if r.peek() is not None:
        r.fail(f"unexpected {r.peek().text!r} after the model")
    return m


def load_model(text: str) -> Gsem:
    """Parse a model file; SEM blocks are converted to their GSEM."""
    m = parse_model(text)
    return sem_to_gsem(m) if isinstance(m, Sem) else m


def format_gsem(m: Gsem) -> str:
    sig = m.sig
    lines = [format_signature(sig).rstrip("\n"), "gsem {"]
    for c, u in enumerate(sig.contexts()):
        for k, i in enumerate(sig.allowed):
            outs = sorted(sig.mask_to_assignments(m.table[c][k]), key=sig.endo_index)
            body = ", ".join(str(v) for v in outs)
            lines.append(f"  outcome ({', '.join(u.values)}) [{i}] = {{ {body} }}"
                         if body else f"  outcome ({', '.join(u.values)}) [{i}] = {{ }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_sem(m: Sem) -> str:
    sig = m.sig
    lines = [format_signature(sig).rstrip("\n"), "sem {"]
    for x, table in zip(sig.endo_vars, m.tables):
        args = equation_args(sig, x)
        rows = []
        for combo, out in zip(itertools.product(*(sig.range(a) for a in args)), table):
            rows.append(f"({','.join(combo)})->{out}")
        lines.append(f"  eq {x}({', '.join(args)}) = {{ {', '.join(rows)} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"
