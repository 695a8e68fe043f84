"""Brute-force validity and satisfiability over finite model classes."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import Assignment, Signature, cap_from_env, model_class
from .errors import CapExceeded
from .lang import Formula, validate
from .model import Gsem, Sem, enumerate_gsems, enumerate_sems, random_gsem, random_sem, sem_to_gsem
from .semantics import ModelBatch

CHUNK = 4096


@dataclass(frozen=True)
class Verdict:
    status: str  # VALID, INVALID, SAT, UNSAT, CAP-EXCEEDED
    model: Gsem | None = None
    context: Assignment | None = None
    examined: int = 0
    sampled: bool = False
    sem: Sem | None = None
    cap_count: int | None = None

    @property
    def label(self) -> str:
        if self.status == "CAP-EXCEEDED":
            return f"CAP-EXCEEDED({self.cap_count})"
        return f"{self.status} (SAMPLED)" if self.sampled else self.status

    def __str__(self):
        return self.label


def _chunks(it: Iterable, size: int) -> Iterator[list]:
    it = iter(it)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def _search(f: Formula, sig: Signature, models: Iterable, want_all: bool,
            to_gsem=lambda m: m) -> tuple[object | None, Assignment | None, int]:
    """Scan models for a context where ``f`` fails (want_all) or holds (not want_all)."""
    seen = 0
    for block in _chunks(models, CHUNK):
        gsems = [to_gsem(m) for m in block]
        res = ModelBatch.from_models(sig, gsems).check(f)
        hit = ~res if want_all else res
        rows = hit.any(axis=1).nonzero()[0]
        if len(rows):
            k = int(rows[0])
            c = int(hit[k].nonzero()[0][0])
            return block[k], sig.contexts()[c], seen + k + 1
        seen += len(block)
    return None, None, seen


def _gsem_stream(sig: Signature, cls, cap: int | None, sample: int | None, seed: int):
    if sample is not None:
        rng = random.Random(seed)
        return (random_gsem(sig, rng, cls) for _ in range(sample))
    return enumerate_gsems(sig, cls, cap)


def validity(f: Formula, sig: Signature, cls: Iterable[str] | str = (), cap: int | None = None,
             sample: int | None = None, seed: int = 0) -> Verdict:
    """VALID when ``f`` holds at every context of every GSEM in the class."""
    cls = model_class(cls)
    validate(f, sig)
    try:
        stream = _gsem_stream(sig, cls, cap, sample, seed)
        m, u, n = _search(f, sig, stream, want_all=True)
    except CapExceeded as exc:
        return Verdict("CAP-EXCEEDED", cap_count=exc.count)
    if m is not None:
        return Verdict("INVALID", m, u, n, sample is not None)
    return Verdict("VALID", examined=n, sampled=sample is not None)


def satisfiable(f: Formula, sig: Signature, cls: Iterable[str] | str = (), cap: int | None = None,
                sample: int | None = None, seed: int = 0) -> Verdict:
    cls = model_class(cls)
    validate(f, sig)
    try:
        stream = _gsem_stream(sig, cls, cap, sample, seed)
        m, u, n = _search(f, sig, stream, want_all=False)
    except CapExceeded as exc:
        return Verdict("CAP-EXCEEDED", cap_count=exc.count)
    if m is not None:
        return Verdict("SAT", m, u, n, sample is not None)
    return Verdict("UNSAT", examined=n, sampled=sample is not None)


def _sem_stream(sig: Signature, cap: int | None, sample: int | None, seed: int):
    if sample is not None:
        rng = random.Random(seed)
        return (random_sem(sig, rng) for _ in range(sample))
    return enumerate_sems(sig, cap_from_env() if cap is None else cap)


def sem_validity(f: Formula, sig: Signature, cap: int | None = None,
                 sample: int | None = None, seed: int = 0) -> Verdict:
    """VALID when ``f`` holds in every SEM over ``sig`` (answering the allowed interventions)."""
    validate(f, sig)
    try:
        s, u, n = _search(f, sig, _sem_stream(sig, cap, sample, seed), want_all=True,
                          to_gsem=lambda m: sem_to_gsem(m))
    except CapExceeded as exc:
        return Verdict("CAP-EXCEEDED", cap_count=exc.count)
    if s is not None:
        return Verdict("INVALID", sem_to_gsem(s), u, n, sample is not None, sem=s)
    return Verdict("VALID", examined=n, sampled=sample is not None)


def sem_satisfiable(f: Formula, sig: Signature, cap: int | None = None,
                    sample: int | None = None, seed: int = 0) -> Verdict:
    validate(f, sig)
    try:
        s, u, n = _search(f, sig, _sem_stream(sig, cap, sample, seed), want_all=False,
                          to_gsem=lambda m: sem_to_gsem(m))
    except CapExceeded as exc:
        return Verdict("CAP-EXCEEDED", cap_count=exc.count)
    if s is not None:
        return Verdict("SAT", sem_to_gsem(s), u, n, sample is not None, sem=s)
    return Verdict("UNSAT", examined=n, sampled=sample is not None)


def count_satisfying_sems(f: Formula, sig: Signature, cap: int | None = None) -> tuple[int, int]:
    """How many SEMs over ``sig`` satisfy ``f`` at some context, out of how many."""
    validate(f, sig)
    hits = total = 0
    for block in _chunks(enumerate_sems(sig, cap_from_env() if cap is None else cap), CHUNK):
        res = ModelBatch.from_models(sig, [sem_to_gsem(s) for s in block]).check(f)
        hits += int(res.any(axis=1).sum())
        total += len(block)
    return hits, total
