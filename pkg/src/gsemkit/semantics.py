"""Truth of events and causal formulas.

``check`` evaluates one formula in one model and context. ``ModelBatch`` evaluates a
formula over many models at once with numpy, which the brute-force deciders and
the soundness harness rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import Assignment, Signature
from .errors import SignatureMismatch
from .lang import (
    And,
    Bot,
    Box,
    Diamond,
    Formula,
    Implies,
    Not,
    Or,
    Prim,
    Top,
    characteristic_event,
    validate,
)
from .model import ContextRef, Gsem, _ctx_index


def sat_event(v: Assignment, e: Formula) -> bool:
    """Whether the full assignment ``v`` satisfies the event ``e``."""
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
        return not sat_event(v, e.left) or sat_event(v, e.right)
    raise TypeError(f"not an event: {e!r}")


@lru_cache(maxsize=1 << 16)
def event_mask(sig: Signature, e: Formula) -> int:
    """Bitmask of the full endogenous assignments satisfying ``e``."""
    full = sig.full_mask
    if isinstance(e, Top):
        return full
    if isinstance(e, Bot):
        return 0
    if isinstance(e, Prim):
        return sig.prim_mask(e.var, e.value)
    if isinstance(e, Not):
        return full & ~event_mask(sig, e.arg)
    if isinstance(e, And):
        m = full
        for a in e.args:
            m &= event_mask(sig, a)
        return m
    if isinstance(e, Or):
        m = 0
        for a in e.args:
            m |= event_mask(sig, a)
        return m
    if isinstance(e, Implies):
        return (full & ~event_mask(sig, e.left)) | event_mask(sig, e.right)
    raise TypeError(f"not an event: {e!r}")


def _check_row(sig: Signature, row: tuple[int, ...], f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Box):
        out = row[sig.allowed_index(f.intervention)]
        return out & ~event_mask(sig, f.event) == 0
    if isinstance(f, Diamond):
        out = row[sig.allowed_index(f.intervention)]
        return out & event_mask(sig, f.event) != 0
    if isinstance(f, Not):
        return not _check_row(sig, row, f.arg)
    if isinstance(f, And):
        return all(_check_row(sig, row, a) for a in f.args)
    if isinstance(f, Or):
        return any(_check_row(sig, row, a) for a in f.args)
    if isinstance(f, Implies):
        return not _check_row(sig, row, f.left) or _check_row(sig, row, f.right)
    if isinstance(f, Prim):
        raise TypeError("a primitive event needs a box or diamond around it")
    raise TypeError(f"not a formula: {f!r}")


def check(m: Gsem, u: ContextRef, f: Formula) -> bool:
    """``(M, u) |= f``. Boxes hold vacuously when there are no outcomes."""
    validate(f, m.sig)
    return _check_row(m.sig, m.table[_ctx_index(m.sig, u)], f)


def valid_in_model(m: Gsem, f: Formula) -> tuple[bool, Assignment | None]:
    """Whether ``f`` holds in every context, with the first failing context if not."""
    validate(f, m.sig)
    for c, u in enumerate(m.sig.contexts()):
        if not _check_row(m.sig, m.table[c], f):
            return False, u
    return True, None


def l_equivalent(m1: Gsem, m2: Gsem) -> bool:
    """Agreement on ``<I>(V=v)`` for every allowed I, context and full assignment v."""
    if m1.sig != m2.sig:
        raise SignatureMismatch("models are over different signatures")
    sig = m1.sig
    for i in sig.allowed:
        for v in sig.endo_assignments():
            f = Diamond(i, characteristic_event(v, sig))
            for c in range(sig.n_contexts):
                if _check_row(sig, m1.table[c], f) != _check_row(sig, m2.table[c], f):
                    return False
    return True


@dataclass
class ModelBatch:
    """Many models over one signature, stacked as an array of outcome masks."""

    sig: Signature
    tables: np.ndarray  # shape (models, contexts, allowed interventions)

    @classmethod
    def from_models(cls, sig: Signature, models: Sequence[Gsem]) -> "ModelBatch":
        dtype = np.int64 if sig.space_size <= 62 else object
        arr = np.array([m.table for m in models], dtype=dtype)
        if len(models) == 0:
            arr = np.zeros((0, sig.n_contexts, len(sig.allowed)), dtype=dtype)
        return cls(sig, arr.reshape(len(models), sig.n_contexts, len(sig.allowed)))

    def __len__(self) -> int:
        return self.tables.shape[0]

    def model(self, k: int) -> Gsem:
        return Gsem(self.sig, tuple(tuple(int(x) for x in row) for row in self.tables[k]))

    def check(self, f: Formula) -> np.ndarray:
        """Boolean array of shape (models, contexts)."""
        validate(f, self.sig)
        return self._eval(f)

    def valid(self, f: Formula) -> np.ndarray:
        """Boolean array over models: does ``f`` hold in every context?"""
        return self.check(f).all(axis=1)

    def _const(self, value: int):
        if self.tables.dtype == object:
            return value
        return np.int64(value)

    def _eval(self, f: Formula) -> np.ndarray:
        shape = self.tables.shape[:2]
        if isinstance(f, Top):
            return np.ones(shape, dtype=bool)
        if isinstance(f, Bot):
            return np.zeros(shape, dtype=bool)
        if isinstance(f, (Box, Diamond)):
            col = self.tables[:, :, self.sig.allowed_index(f.intervention)]
            ext = event_mask(self.sig, f.event)
            if isinstance(f, Box):
                bad = self._const(self.sig.full_mask & ~ext)
                return (col & bad) == 0
            return (col & self._const(ext)) != 0
        if isinstance(f, Not):
            return ~self._eval(f.arg)
        if isinstance(f, And):
            out = self._eval(f.args[0])
            for a in f.args[1:]:
                out = out & self._eval(a)
            return out
        if isinstance(f, Or):
            out = self._eval(f.args[0])
            for a in f.args[1:]:
                out = out | self._eval(a)
            return out
        if isinstance(f, Implies):
            return ~self._eval(f.left) | self._eval(f.right)
        raise TypeError(f"not a causal formula: {f!r}")
