"""One-step generalization and refinement operators, and script replay.

Generalizations: :func:`relax_rel`, :func:`merge`, :func:`add_dep`.
Refinements: :func:`tighten_rel`, :func:`split`, :func:`remove_dep`.
Every operator validates its arguments before doing anything and returns a
normalized property set.
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BreaksMonotonicity,
    BreaksTermination,
    EffectInCauses,
    EmptyCauses,
    EmptyEffects,
    NameCollision,
    NotARefinement,
    NotARelaxation,
    OutOfRange,
    ReliaMisError,
    SameComponent,
    ScriptError,
    UndeclaredComponent,
)
from .props import (
    SYS,
    Dependency,
    PropertySet,
    _fmt,
    _names,
    check_name,
    monotonicity_violations,
    normalize,
    require_concrete,
    to_probability,
)


def _prob(r) -> Fraction:
    try:
        return to_probability(r)
    except ValueError as exc:
        raise OutOfRange(str(exc)) from None


def _need(p: PropertySet, *names: str) -> None:
    for c in names:
        if c not in p.components:
            raise UndeclaredComponent(f"unknown component {c!r}")


def _effect_order(effects: Iterable[str]) -> list:
    effects = set(effects)
    return sorted(effects - {SYS}) + ([SYS] if SYS in effects else [])


def _check_dep_args(p: PropertySet, causes, effects):
    causes = frozenset(_names(causes))
    effects = _effect_order(_names(effects))
    if not causes:
        raise EmptyCauses("a dependency needs at least one cause")
    if not effects:
        raise EmptyEffects("at least one effect is required")
    _need(p, *causes)
    _need(p, *(e for e in effects if e != SYS))
    clash = causes.intersection(effects)
    if clash:
        raise EffectInCauses(f"{sorted(clash)} appear both as cause and effect")
    return causes, effects


# -- reliability bounds -------------------------------------------------------

def relax_rel(p: PropertySet, c: str, r) -> PropertySet:
    require_concrete(p)
    r = _prob(r)
    _need(p, c)
    if not r < p.bound(c):
        raise NotARelaxation(f"{_fmt(r)} is not below R({c}) = {_fmt(p.bound(c))}")
    rel = p.rel
    rel[c] = r
    return normalize(p.replace(rel=rel))


def tighten_rel(p: PropertySet, c: str, r) -> PropertySet:
    require_concrete(p)
    r = _prob(r)
    _need(p, c)
    if not r > p.bound(c):
        raise NotARefinement(f"{_fmt(r)} is not above R({c}) = {_fmt(p.bound(c))}")
    rel = p.rel
    rel[c] = r
    return normalize(p.replace(rel=rel))


# -- merge / split ------------------------------------------------------------

def merge(p: PropertySet, c1: str, c2: str, cm: str) -> PropertySet:
    """Collapse ``c1`` and ``c2`` into ``cm``, keeping the weaker bound."""
    require_concrete(p)
    _need(p, c1, c2)
    if c1 == c2:
        raise SameComponent(f"cannot merge {c1} with itself")
    check_name(cm)
    rest = p.components - {c1, c2}
    if cm in rest:
        raise NameCollision(f"{cm} already names another component")

    def m(s: frozenset) -> frozenset:
        if c1 in s or c2 in s:
            return (s - {c1, c2}) | {cm}
        return s

    rel = {c: p.bound(c) for c in rest}
    rel[cm] = min(p.bound(c1), p.bound(c2))
    deps = [Dependency(m(d.causes), m(d.effects), d.system_fails) for d in p.deps]
    return normalize(PropertySet(rest | {cm}, tuple(sorted(rel.items())), frozenset(deps)))


def split(p: PropertySet, cm: str, c1: str, c2: str) -> PropertySet:
    """Replace ``cm`` by ``c1`` and ``c2``, each fully dependent on the other."""
    require_concrete(p)
    _need(p, cm)
    check_name(c1)
    check_name(c2)
    if c1 == c2:
        raise NameCollision(f"split needs two distinct names, got {c1} twice")
    rest = p.components - {cm}
    taken = sorted({c1, c2} & rest)
    if taken:
        raise NameCollision(f"{taken} already name other components")
    p = normalize(p)

    deps = []
    for d in p.deps:
        if cm in d.causes:
            base = d.causes - {cm}
            deps.append(Dependency(base | {c1, c2}, d.effects, d.system_fails))
            deps.append(Dependency(base | {c1}, d.effects | {c2}, d.system_fails))
            deps.append(Dependency(base | {c2}, d.effects | {c1}, d.system_fails))
        elif cm in d.effects:
            base = d.effects - {cm}
            for extra in ({c1, c2}, {c1}, {c2}):
                deps.append(Dependency(d.causes, base | extra, d.system_fails))
        else:
            deps.append(d)
    rel = {c: p.bound(c) for c in rest}
    rel[c1] = rel[c2] = p.bound(cm)
    return normalize(
        PropertySet(rest | {c1, c2}, tuple(sorted(rel.items())), frozenset(deps))
    )


# -- dependencies -------------------------------------------------------------

def _add_one(deps: frozenset, causes: frozenset, e: str) -> frozenset:
    to_sys = e == SYS
    out = []
    for d in deps:
        if causes <= d.causes:
            if to_sys:
                d = Dependency(d.causes, d.effects, True)
            else:
                d = Dependency(d.causes - {e}, d.effects | {e}, d.system_fails)
        out.append(d)
    below = [d for d in deps if d.causes <= causes]
    u = frozenset().union(*(d.effects for d in below))
    u_sys = any(d.system_fails for d in below)
    if to_sys:
        out.append(Dependency(causes, u, True))
    else:
        out.append(Dependency(causes, u | {e}, u_sys))
    return frozenset(out)


def add_dep(p: PropertySet, causes, effects) -> PropertySet:
    """Declare that the failure of ``causes`` also fails each of ``effects``.

    Several effects are added one at a time in canonical order (components
    sorted, ``sys`` last).  Existing dependencies whose causes include
    ``causes`` pick up the new effect so that Monotonicity is kept.
    """
    require_concrete(p)
    causes, effects = _check_dep_args(p, causes, effects)
    p = normalize(p)
    deps = p.deps
    for e in effects:
        deps = normalize(p.replace(deps=_add_one(deps, causes, e))).deps
    return p.replace(deps=deps)


def remove_dep(p: PropertySet, causes, effects) -> PropertySet:
    """Declare ``effects`` independent of every subset of ``causes``.

    Raises :class:`BreaksTermination` or :class:`BreaksMonotonicity` rather
    than return an ill-formed result.
    """
    require_concrete(p)
    causes, effects = _check_dep_args(p, causes, effects)
    p = normalize(p)
    deps = p.deps
    for e in effects:
        out = []
        for d in deps:
            if d.causes <= causes:
                if e == SYS:
                    d = Dependency(d.causes, d.effects, False)
                else:
                    d = Dependency(d.causes, d.effects - {e}, d.system_fails)
            out.append(d)
        deps = frozenset(out)
    q = normalize(p.replace(deps=deps))
    if not any(d.system_fails for d in q.deps):
        raise BreaksTermination("no remaining dependency fails the system")
    bad = monotonicity_violations(q.deps)
    if bad:
        raise BreaksMonotonicity(bad[0].message)
    return q


# -- operator values and scripts ----------------------------------------------

def _set_arg(names) -> str:
    return ",".join(_effect_order(names))


@dataclass(frozen=True)
class RelaxRel:
    c: str
    r: Fraction
    name = "relax_rel"
    generalizes = True

    def apply(self, p):
        return relax_rel(p, self.c, self.r)

    def args(self):
        return [self.c, _fmt(self.r)]


@dataclass(frozen=True)
class TightenRel:
    c: str
    r: Fraction
    name = "tighten_rel"
    generalizes = False

    def apply(self, p):
        return tighten_rel(p, self.c, self.r)

    def args(self):
        return [self.c, _fmt(self.r)]


@dataclass(frozen=True)
class Merge:
    c1: str
    c2: str
    cm: str
    name = "merge"
    generalizes = True

    def apply(self, p):
        return merge(p, self.c1, self.c2, self.cm)

    def args(self):
        return [self.c1, self.c2, self.cm]


@dataclass(frozen=True)
class Split:
    cm: str
    c1: str
    c2: str
    name = "split"
    generalizes = False

    def apply(self, p):
        return split(p, self.cm, self.c1, self.c2)

    def args(self):
        return [self.cm, self.c1, self.c2]


@dataclass(frozen=True)
class AddDep:
    causes: frozenset
    effects: frozenset
    name = "add_dep"
    generalizes = True

    def apply(self, p):
        return add_dep(p, self.causes, self.effects)

    def args(self):
        return [_set_arg(self.causes), _set_arg(self.effects)]


@dataclass(frozen=True)
class RemoveDep:
    causes: frozenset
    effects: frozenset
    name = "remove_dep"
    generalizes = False

    def apply(self, p):
        return remove_dep(p, self.causes, self.effects)

    def args(self):
        return [_set_arg(self.causes), _set_arg(self.effects)]


ModelOp = RelaxRel | TightenRel | Merge | Split | AddDep | RemoveDep

OP_TYPES = {cls.name: cls for cls in (RelaxRel, TightenRel, Merge, Split, AddDep, RemoveDep)}


def make_op(name: str, *args) -> ModelOp:
    """Build an operator from its name and textual or native arguments."""
    try:
        cls = OP_TYPES[name]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}") from None
    arity = 2 if cls in (RelaxRel, TightenRel, AddDep, RemoveDep) else 3
    if len(args) != arity:
        raise ValueError(f"{name} takes {arity} arguments, got {len(args)}")
    if cls in (RelaxRel, TightenRel):
        return cls(check_name(args[0]), _prob(args[1]))
    if cls in (AddDep, RemoveDep):
        return cls(frozenset(_names(args[0])), frozenset(_names(args[1])))
    return cls(*(check_name(a) for a in args))


def parse_op(line: str) -> ModelOp:
    """Parse ``"split c1 c1 c2"`` or ``"remove_dep c1 c2,sys"``."""
    parts = shlex.split(line)
    if not parts:
        raise ValueError("empty operator line")
    return make_op(parts[0], *parts[1:])


def format_op(op: ModelOp) -> str:
    return " ".join([op.name, *op.args()])


def apply_script(script: Sequence[ModelOp], p: PropertySet) -> PropertySet:
    """Left fold of ``script`` over ``p``; an empty script returns ``p``."""
    require_concrete(p)
    for i, op in enumerate(script):
        try:
            p = op.apply(p)
        except ReliaMisError as exc:
            raise ScriptError(i, format_op(op), exc) from exc
    return p
