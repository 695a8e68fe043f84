"""Signatures, interventions and assignments.

Values are opaque string tokens. A signature fixes the exogenous and endogenous
variables, their finite ranges, and the interventions a model has to answer for.
Full endogenous assignments are indexed in lexicographic order so that a set of
outcomes can be stored as an integer bitmask.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DisallowedIntervention,
    OutOfRangeValue,
    SignatureError,
    UnknownVariable,
)

PROPERTIES = ("coh", "acyc", "ge1", "le1")
DEFAULT_CAP = 10**7


def cap_from_env(default: int = DEFAULT_CAP) -> int:
    raw = os.environ.get("GSEMKIT_CAP")
    if raw is None or not raw.strip():
        return default
    return int(raw)


@dataclass(frozen=True)
class Intervention:
    """A finite set of bindings ``X <- x``, kept sorted by variable name."""

    bindings: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted((str(v), str(x)) for v, x in self.bindings))
        names = [v for v, _ in ordered]
        if len(set(names)) != len(names):
            raise ValueError(f"variable bound twice in intervention: {ordered}")
        object.__setattr__(self, "bindings", ordered)

    @classmethod
    def of(cls, bindings: Mapping[str, str] | Iterable[tuple[str, str]] = ()) -> "Intervention":
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        return cls(tuple(items))

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.bindings)

    def as_dict(self) -> dict[str, str]:
        return dict(self.bindings)

    def get(self, var: str, default: str | None = None) -> str | None:
        for v, x in self.bindings:
            if v == var:
                return x
        return default

    def binds(self, var: str) -> bool:
        return any(v == var for v, _ in self.bindings)

    def without(self, var: str) -> "Intervention":
        return Intervention(tuple(b for b in self.bindings if b[0] != var))

    def compose(self, other: "Intervention") -> "Intervention":
        """``self ; other``: bindings of ``other`` win on shared variables."""
        merged = dict(self.bindings)
        merged.update(other.bindings)
        return Intervention.of(merged)

    def extends(self, other: "Intervention") -> bool:
        """True when every binding of ``other`` also appears here."""
        return set(other.bindings) <= set(self.bindings)

    def is_null(self) -> bool:
        return not self.bindings

    def __len__(self) -> int:
        return len(self.bindings)

    def __str__(self) -> str:
        return ", ".join(f"{v}<-{x}" for v, x in self.bindings)


NULL = Intervention()


def compose_interventions(first: Intervention, second: Intervention,
                          sig: "Signature | None" = None) -> Intervention:
    if sig is not None:
        sig.check_intervention(first)
        sig.check_intervention(second)
    return first.compose(second)


@dataclass(frozen=True)
class Assignment:
    """Values for an ordered tuple of variables."""

    vars: tuple[str, ...]
    values: tuple[str, ...]

    def __post_init__(self):
        if len(self.vars) != len(self.values):
            raise ValueError("vars and values differ in length")

    @classmethod
    def of(cls, pairs: Mapping[str, str] | Iterable[tuple[str, str]]) -> "Assignment":
        items = list(pairs.items() if isinstance(pairs, Mapping) else pairs)
        return cls(tuple(v for v, _ in items), tuple(str(x) for _, x in items))

    def __getitem__(self, var: str) -> str:
        try:
            return self.values[self.vars.index(var)]
        except ValueError:
            raise UnknownVariable(var) from None

    def __contains__(self, var: str) -> bool:
        return var in self.vars

    def items(self) -> Iterator[tuple[str, str]]:
        return iter(zip(self.vars, self.values))

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.vars, self.values))

    def __len__(self) -> int:
        return len(self.vars)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{v}={x}" for v, x in self.items()) + ")"


def restrict(assignment: Assignment, vars: Iterable[str]) -> Assignment:
    """Keep only ``vars``, in the assignment's own order."""
    wanted = set(vars)
    missing = wanted - set(assignment.vars)
    if missing:
        raise UnknownVariable(sorted(missing)[0])
    keep = [i for i, v in enumerate(assignment.vars) if v in wanted]
    return Assignment(tuple(assignment.vars[i] for i in keep),
                      tuple(assignment.values[i] for i in keep))


def enumerate_assignments(vars: Sequence[str],
                          ranges: Mapping[str, Sequence[str]]) -> Iterator[Assignment]:
    """All assignments over ``vars`` in lexicographic (range-declaration) order."""
    vars = tuple(vars)
    for combo in itertools.product(*(ranges[v] for v in vars)):
        yield Assignment(vars, tuple(combo))


def all_interventions(vars: Sequence[str],
                      ranges: Mapping[str, Sequence[str]]) -> list[Intervention]:
    """Every intervention over subsets of ``vars``, null included."""
    out = []
    for k in range(len(vars) + 1):
        for subset in itertools.combinations(vars, k):
            for combo in itertools.product(*(ranges[v] for v in subset)):
                out.append(Intervention(tuple(zip(subset, combo))))
    return out


def _intervention_key(sig_order: Mapping[str, int], ranges, i: Intervention):
    return (len(i), tuple((sig_order[v], ranges[v].index(x)) for v, x in i.bindings))


@dataclass(frozen=True)
class Signature:
    exo: tuple[tuple[str, tuple[str, ...]], ...]
    endo: tuple[tuple[str, tuple[str, ...]], ...]
    allowed: tuple[Intervention, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False,
                         compare=False, hash=False)

    def __post_init__(self):
        exo = tuple((str(v), tuple(str(x) for x in r)) for v, r in self.exo)
        endo = tuple((str(v), tuple(str(x) for x in r)) for v, r in self.endo)
        names = [v for v, _ in exo + endo]
        if len(set(names)) != len(names):
            raise SignatureError("variable names must be distinct across U and V")
        for v, r in exo + endo:
            if not r:
                raise SignatureError(f"range of {v!r} is empty")
            if len(set(r)) != len(r):
                raise SignatureError(f"range of {v!r} repeats a value")
        object.__setattr__(self, "exo", exo)
        object.__setattr__(self, "endo", endo)
        ranges = dict(exo + endo)
        order = {v: i for i, (v, _) in enumerate(endo)}
        allowed = set()
        for i in self.allowed:
            for v, x in i.bindings:
                if v not in order:
                    raise UnknownVariable(v)
                if x not in ranges[v]:
                    raise OutOfRangeValue(v, x)
            allowed.add(i)
        canon = tuple(sorted(allowed, key=lambda i: _intervention_key(order, ranges, i)))
        object.__setattr__(self, "allowed", canon)
        self._build_tables(ranges)

    @classmethod
    def build(cls, endo: Mapping[str, Sequence[str]],
              exo: Mapping[str, Sequence[str]] | None = None,
              allowed: Iterable[Intervention | Mapping[str, str]] | str = "all") -> "Signature":
        """Convenience constructor. ``allowed="all"`` gives the universal signature."""
        exo = dict(exo or {})
        endo_t = tuple((v, tuple(r)) for v, r in endo.items())
        if isinstance(allowed, str):
            if allowed != "all":
                raise ValueError("allowed must be an iterable or 'all'")
            allowed_list = all_interventions(list(endo), endo)
        else:
            allowed_list = [a if isinstance(a, Intervention) else Intervention.of(a)
                            for a in allowed]
        return cls(tuple((v, tuple(r)) for v, r in exo.items()), endo_t, tuple(allowed_list))

    def with_allowed(self, allowed: Iterable[Intervention]) -> "Signature":
        return Signature(self.exo, self.endo, tuple(allowed))

    def universal(self) -> "Signature":
        return self.with_allowed(all_interventions(self.endo_vars, self.ranges))

    def _build_tables(self, ranges):
        c = self._cache
        c["ranges"] = ranges
        c["exo_vars"] = tuple(v for v, _ in self.exo)
        c["endo_vars"] = tuple(v for v, _ in self.endo)
        space = [tuple(combo) for combo in itertools.product(*(r for _, r in self.endo))]
        c["space"] = space
        c["space_index"] = {vals: k for k, vals in enumerate(space)}
        c["contexts"] = [tuple(combo) for combo in itertools.product(*(r for _, r in self.exo))]
        c["context_index"] = {vals: k for k, vals in enumerate(c["contexts"])}
        c["allowed_index"] = {i: k for k, i in enumerate(self.allowed)}
        prim = {}
        for pos, (v, r) in enumerate(self.endo):
            for x in r:
                m = 0
                for k, vals in enumerate(space):
                    if vals[pos] == x:
                        m |= 1 << k
                prim[(v, x)] = m
        c["prim"] = prim
        c["full"] = (1 << len(space)) - 1

    # -- basic accessors -------------------------------------------------

    @property
    def ranges(self) -> dict[str, tuple[str, ...]]:
        return self._cache["ranges"]

    @property
    def exo_vars(self) -> tuple[str, ...]:
        return self._cache["exo_vars"]

    @property
    def endo_vars(self) -> tuple[str, ...]:
        return self._cache["endo_vars"]

    def range(self, var: str) -> tuple[str, ...]:
        try:
            return self.ranges[var]
        except KeyError:
            raise UnknownVariable(var) from None

    def is_endo(self, var: str) -> bool:
        return var in self.ranges and var in self.endo_vars

    def check_value(self, var: str, value: str) -> None:
        if value not in self.range(var):
            raise OutOfRangeValue(var, value)

    def check_intervention(self, i: Intervention) -> None:
        for v, x in i.bindings:
            if v not in self.endo_vars:
                raise UnknownVariable(v)
            self.check_value(v, x)

    def is_allowed(self, i: Intervention) -> bool:
        return i in self._cache["allowed_index"]

    def allowed_index(self, i: Intervention) -> int:
        try:
            return self._cache["allowed_index"][i]
        except KeyError:
            self.check_intervention(i)
            raise DisallowedIntervention(i) from None

    # -- assignment spaces ----------------------------------------------

    @property
    def space_size(self) -> int:
        return len(self._cache["space"])

    @property
    def full_mask(self) -> int:
        return self._cache["full"]

    def endo_assignments(self) -> list[Assignment]:
        vars = self.endo_vars
        return [Assignment(vars, vals) for vals in self._cache["space"]]

    def endo_values(self, k: int) -> tuple[str, ...]:
        return self._cache["space"][k]

    def endo_index(self, v: Assignment | Sequence[str]) -> int:
        if isinstance(v, Assignment):
            vals = v.values if v.vars == self.endo_vars else tuple(v[x] for x in self.endo_vars)
        else:
            vals = tuple(v)
        try:
            return self._cache["space_index"][vals]
        except KeyError:
            raise ValueError(f"not a full endogenous assignment: {vals}") from None

    def contexts(self) -> list[Assignment]:
        vars = self.exo_vars
        return [Assignment(vars, vals) for vals in self._cache["contexts"]]

    @property
    def n_contexts(self) -> int:
        return len(self._cache["contexts"])

    def context_index(self, u: Assignment | Sequence[str]) -> int:
        vals = u.values if isinstance(u, Assignment) else tuple(u)
        try:
            return self._cache["context_index"][tuple(vals)]
        except KeyError:
            raise ValueError(f"not a context of this signature: {vals}") from None

    # -- bitmask helpers -------------------------------------------------

    def prim_mask(self, var: str, value: str) -> int:
        try:
            return self._cache["prim"][(var, value)]
        except KeyError:
            if var not in self.endo_vars:
                raise UnknownVariable(var) from None
            raise OutOfRangeValue(var, value) from None

    def effective_mask(self, i: Intervention) -> int:
        """Assignments that agree with every binding of ``i``."""
        m = self.full_mask
        for v, x in i.bindings:
            m &= self.prim_mask(v, x)
        return m

    def mask_to_assignments(self, mask: int) -> frozenset[Assignment]:
        vars = self.endo_vars
        space = self._cache["space"]
        return frozenset(Assignment(vars, space[k]) for k in range(len(space)) if mask >> k & 1)

    def assignments_to_mask(self, assignments: Iterable[Assignment]) -> int:
        m = 0
        for a in assignments:
            m |= 1 << self.endo_index(a)
        return m


def model_class(props: str | Iterable[str] | None) -> frozenset[str]:
    """Parse ``"coh,acyc"`` (or an iterable) into a class of model properties."""
    if props is None:
        return frozenset()
    if isinstance(props, str):
        parts = [p.strip() for p in props.replace("+", ",").split(",")]
    else:
        parts = list(props)
    parts = [p for p in parts if p and p not in ("none", "all-gsems")]
    unknown = [p for p in parts if p not in PROPERTIES]
    if unknown:
        raise ValueError(f"unknown model properties: {unknown}; expected a subset of {PROPERTIES}")
    return frozenset(parts)


def all_classes() -> list[frozenset[str]]:
    """The sixteen subsets of {coh, acyc, ge1, le1}."""
    return [frozenset(c) for k in range(5) for c in itertools.combinations(PROPERTIES, k)]


def format_class(cls: Iterable[str]) -> str:
    names = [p for p in PROPERTIES if p in set(cls)]
    return ",".join(names) if names else "none"
