"""Property sets: per-component reliability bounds plus failure dependencies.

A property set is the triple ``(C, R, D)``.  ``C`` is a set of component
names, ``R`` maps each component to a lower bound on its reliability and
``D`` is a set of dependencies ``causes -> effects``.  The system itself is
never a component; a dependency that fails the system carries
``system_fails=True`` instead.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .errors import ReliaMisError, UndeclaredComponent

SYS = "sys"

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def check_name(name: str) -> str:
    if not isinstance(name, str) or not _NAME_RE.match(name) or name == SYS:
        raise ValueError(f"invalid component name {name!r}")
    return name


def to_probability(value) -> Fraction:
    """Convert ``value`` to an exact rational in [0, 1].

    Floats go through their shortest decimal repr, so ``0.9`` becomes
    ``9/10`` rather than the nearest binary fraction.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a probability: {value!r}")
    if isinstance(value, Fraction):
        prob = value
    elif isinstance(value, float):
        prob = Fraction(repr(value))
    elif isinstance(value, (int, Decimal)):
        prob = Fraction(value)
    elif isinstance(value, str):
        try:
            prob = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a probability: {value!r}") from None
    else:
        raise ValueError(f"not a probability: {value!r}")
    if not 0 <= prob <= 1:
        raise ValueError(f"probability out of range [0, 1]: {value}")
    return prob


@dataclass(frozen=True)
class Dependency:
    """``causes -> effects``: the failure of all causes fails the effects."""

    causes: frozenset
    effects: frozenset = frozenset()
    system_fails: bool = False

    @classmethod
    def of(cls, causes: Iterable[str] | str, effects: Iterable[str] | str = ()) -> "Dependency":
        """Build a dependency from name lists; ``"sys"`` among effects sets the flag.

        Strings are split on whitespace and commas, so
        ``Dependency.of("c1", "c2 sys")`` is accepted.
        """
        causes = _names(causes)
        effects = _names(effects)
        return cls(frozenset(causes), frozenset(e for e in effects if e != SYS), SYS in effects)

    @property
    def effect_labels(self) -> tuple:
        """Effects in canonical order, ``sys`` last."""
        return tuple(sorted(self.effects)) + ((SYS,) if self.system_fails else ())

    def sort_key(self):
        return (len(self.causes), tuple(sorted(self.causes)))

    def __str__(self):
        return "{%s} -> {%s}" % (", ".join(sorted(self.causes)), ", ".join(self.effect_labels))


def _names(value) -> list:
    if isinstance(value, str):
        return [s for s in re.split(r"[\s,]+", value) if s]
    return list(value)


@dataclass(frozen=True)
class PropertySet:
    """Immutable ``(C, R, D)`` triple, or the overdetermined bottom element."""

    components: frozenset
    bounds: tuple = ()  # sorted (name, Fraction) pairs
    deps: frozenset = frozenset()
    bottom_flag: bool = False
    _rel: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_rel", dict(self.bounds))

    @classmethod
    def make(
        cls,
        components: Iterable[str],
        rel: Mapping[str, object] | object,
        deps: Iterable[Dependency] = (),
    ) -> "PropertySet":
        """Validate and build a property set.

        ``rel`` is either a mapping from component to bound or a single value
        shared by every component.  Dependencies are stored as given; call
        :func:`normalize` for the canonical form.
        """
        comps = frozenset(check_name(c) for c in components)
        if not comps:
            raise ValueError("a property set needs at least one component")
        if isinstance(rel, Mapping):
            if set(rel) != comps:
                raise ValueError("reliability bounds must be given for exactly the components")
            bounds = {c: to_probability(v) for c, v in rel.items()}
        else:
            r = to_probability(rel)
            bounds = {c: r for c in comps}
        deps = frozenset(deps)
        for d in deps:
            missing = (d.causes | d.effects) - comps
            if missing:
                raise UndeclaredComponent(f"dependency {d} mentions undeclared {sorted(missing)}")
        return cls(comps, tuple(sorted(bounds.items())), deps)

    @property
    def rel(self) -> dict:
        return dict(self._rel)

    def bound(self, c: str) -> Fraction:
        try:
            return self._rel[c]
        except KeyError:
            raise UndeclaredComponent(f"unknown component {c!r}") from None

    def replace(self, *, components=None, rel=None, deps=None) -> "PropertySet":
        comps = self.components if components is None else frozenset(components)
        bounds = self._rel if rel is None else rel
        return PropertySet(
            comps,
            tuple(sorted(bounds.items())),
            self.deps if deps is None else frozenset(deps),
        )

    def sorted_components(self) -> list:
        return sorted(self.components)

    def sorted_deps(self) -> list:
        return sorted(self.deps, key=Dependency.sort_key)

    def __str__(self):
        if self.bottom_flag:
            return "BOTTOM"
        comps = ", ".join(f"{c}={_fmt(self._rel[c])}" for c in self.sorted_components())
        deps = ", ".join(str(d) for d in self.sorted_deps())
        return f"C: {comps}; D: {deps}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


BOTTOM = PropertySet(frozenset(), (), frozenset(), True)


def require_concrete(p: PropertySet) -> None:
    from .errors import BottomNotConcrete

    if p.bottom_flag:
        raise BottomNotConcrete("the bottom element has no concrete representation")


# -- equivalences -------------------------------------------------------------
# Each rewrite is exposed separately so that confluence can be tested by
# applying them in arbitrary order.

def strip_tautology(d: Dependency) -> Dependency:
    """``c..1 -> c..2`` is the same as ``c..1 -> ..2``."""
    if d.causes & d.effects:
        return Dependency(d.causes, d.effects - d.causes, d.system_fails)
    return d


def is_inaction(d: Dependency) -> bool:
    return not d.causes


def union_pair(a: Dependency, b: Dependency) -> Dependency:
    assert a.causes == b.causes
    return Dependency(a.causes, a.effects | b.effects, a.system_fails or b.system_fails)


def normalize_deps(deps: Iterable[Dependency]) -> frozenset:
    merged: dict = {}
    for d in deps:
        if is_inaction(d):
            continue
        d = strip_tautology(d)
        prev = merged.get(d.causes)
        merged[d.causes] = d if prev is None else union_pair(prev, d)
    return frozenset(merged.values())


def normalize(p: PropertySet) -> PropertySet:
    """Canonical form under the Tautology, Union and Inaction equivalences."""
    if p.bottom_flag:
        return p
    for d in p.deps:
        missing = (d.causes | d.effects) - p.components
        if missing:
            raise UndeclaredComponent(f"dependency {d} mentions undeclared {sorted(missing)}")
    return PropertySet(p.components, p.bounds, normalize_deps(p.deps))


def props_equal(p: PropertySet, q: PropertySet) -> bool:
    if p.bottom_flag or q.bottom_flag:
        return p.bottom_flag and q.bottom_flag
    return normalize(p) == normalize(q)


# -- well-formedness ----------------------------------------------------------

class Violation(NamedTuple):
    rule: str
    subject: str
    message: str


@dataclass(frozen=True)
class WfReport:
    initiality_ok: bool
    termination_ok: bool
    monotonicity_ok: bool
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return (
            self.initiality_ok
            and self.termination_ok
            and self.monotonicity_ok
            and not self.violations
        )

    def __bool__(self):
        return self.ok


def monotonicity_violations(deps: Iterable[Dependency]) -> list:
    """Pairs ``a``, ``b`` in ``deps`` with ``a.causes <= b.causes`` whose effects shrink.

    ``a``'s effects must survive in ``b`` unless they are among ``b``'s extra
    causes.  The system flag counts as an effect.
    """
    deps = sorted(deps, key=Dependency.sort_key)
    out = []
    for a in deps:
        for b in deps:
            if a is b or not a.causes <= b.causes:
                continue
            lost = a.effects - (b.causes - a.causes) - b.effects
            lost_sys = a.system_fails and not b.system_fails
            if lost or lost_sys:
                names = sorted(lost) + ([SYS] if lost_sys else [])
                out.append(
                    Violation(
                        "monotonicity",
                        f"{a} / {b}",
                        f"{', '.join(names)} fail(s) under {a} but not under {b}",
                    )
                )
    return out


def check_well_formed(p: PropertySet) -> WfReport:
    """Report Initiality, Termination and Monotonicity violations (never raises for them)."""
    require_concrete(p)
    q = normalize(p)
    violations = []
    sole = {next(iter(d.causes)) for d in q.deps if len(d.causes) == 1}
    for c in q.sorted_components():
        if c not in sole:
            violations.append(
                Violation("initiality", c, f"no dependency has {c} as its sole cause")
            )
    initiality_ok = not violations
    termination_ok = any(d.system_fails for d in q.deps)
    if not termination_ok:
        violations.append(
            Violation("termination", "-", "no dependency fails the system")
        )
    mono = monotonicity_violations(q.deps)
    violations.extend(mono)
    return WfReport(initiality_ok, termination_ok, not mono, tuple(violations))
