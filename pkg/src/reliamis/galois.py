"""Abstraction of property sets into MIS models and concretization back.

``abstract_model`` (alpha) builds the Markov chain a property set
describes; ``concretize_props`` (gamma) reads the dependencies a chain
implies.  They form a Galois connection: ``p`` is at most as general as
``gamma(alpha(p))`` and ``alpha(gamma(m))`` is at most as general as ``m``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidModel, NotWellFormed
from .mis import FAILED, MisModel, Move, require_valid, state_order_key
from .props import (
    Dependency,
    PropertySet,
    check_well_formed,
    normalize,
    props_equal,
    require_concrete,
    union_pair,
)


class UnreachableFailureWarning(UserWarning):
    pass


def _applicable(deps, component: str, failed: frozenset):
    """Union of the maximal dependencies that fire when ``component`` fails after ``failed``.

    Candidates have ``component`` among their causes and every other cause
    already failed.  Returns ``(effects, system_fails)``, or ``None`` when
    there is no candidate.
    """
    cands = [d for d in deps if component in d.causes and d.causes - {component} <= failed]
    if not cands:
        return None
    top = [d for d in cands if not any(d.causes < e.causes for e in cands)]
    effects = frozenset().union(*(d.effects for d in top))
    return effects, any(d.system_fails for d in top)


def _explore(deps, names):
    """Failure moves reachable from the all-functional state, keyed by (component, source)."""
    start = frozenset()
    seen = {start}
    frontier = [start]
    moves = {}
    while frontier:
        failed = frontier.pop()
        for c in names:
            if c in failed:
                continue
            effects, sys_fails = _applicable(deps, c, failed)
            landing = failed | {c} | effects
            target = FAILED if sys_fails else landing
            moves[(c, failed)] = Move(c, failed, target, landing)
            if target is not FAILED and target not in seen:
                seen.add(target)
                frontier.append(target)
    return moves, seen


def abstract_model(p: PropertySet) -> MisModel:
    """The MIS model described by a well-formed property set.

    Starting from the all-functional state, every functional component
    either survives (probability ``R(c)``) or fails together with the
    effects of the applicable dependency.  A dependency that fails the
    system sends the chain to the single ``FAILED`` state.
    """
    require_concrete(p)
    report = check_well_formed(p)
    if not report.ok:
        raise NotWellFormed("; ".join(v.message for v in report.violations))
    p = normalize(p)
    names = p.sorted_components()
    moves, seen = _explore(p.deps, names)

    states = sorted(seen, key=lambda s: state_order_key(s, names)) + [FAILED]
    index = {s: i for i, s in enumerate(states)}
    k = len(states)
    tpms = []
    for c in names:
        pc = p.bound(c)
        rows = []
        for s in states:
            row = [Fraction(0)] * k
            mv = moves.get((c, s))
            if mv is None:
                row[index[s]] = Fraction(1)
            else:
                row[index[s]] = pc
                row[index[mv.target]] += 1 - pc
            rows.append(tuple(row))
        tpms.append(tuple(rows))
    if not any(m.target is FAILED for m in moves.values()):
        warnings.warn("no reachable transition fails the system", UnreachableFailureWarning, stacklevel=2)
    comps = tuple((c, p.bound(c)) for c in names)
    return MisModel(comps, tuple(states), tuple(tpms), frozenset(moves.values()))


def concretize_props(m: MisModel) -> PropertySet:
    """The dependencies a model implies, one component per TPM.

    Each component's failure from the initial state gives its sole-cause
    dependency.  Deeper failures are visited in canonical state order; when
    what a failure does differs from what the dependencies found so far
    predict, a dependency on the full failed set is added.
    """
    require_valid(m)
    m = m.canonical()
    names = m.names
    start = m.states[0]
    deps = {}

    def must_move(c, s) -> Move:
        mv = m.move(c, s)
        if mv is None:
            raise InvalidModel(f"cannot tell what the failure of {c} in {m.label(s)} leads to")
        return mv

    for c in names:
        mv = must_move(c, start)
        deps[frozenset({c})] = Dependency(
            frozenset({c}), mv.landing - {c}, mv.target is FAILED
        )
    for s in m.functional_states()[1:]:
        for c in names:
            if c in s:
                continue
            mv = must_move(c, s)
            f = mv.landing - s - {c}
            f_sys = mv.target is FAILED
            effects, sys_fails = _applicable(deps.values(), c, s)
            if (effects - s, sys_fails) != (f, f_sys):
                causes = s | {c}
                dep = Dependency(causes, f, f_sys)
                deps[causes] = union_pair(deps[causes], dep) if causes in deps else dep
    comps = dict(m.components)
    return normalize(
        PropertySet(frozenset(names), tuple(sorted(comps.items())), frozenset(deps.values()))
    )


def behaviour_key(p: PropertySet):
    """Hashable key shared by property sets that abstract to the same chain over the same bounds.

    The chain is represented by its failure moves (with landing sets).

    Ill-formed sets have no chain; their key is the literal canonical form.
    """
    if p.bottom_flag:
        return ("bottom",)
    p = normalize(p)
    if not check_well_formed(p).ok:
        return ("literal", p)
    # bounds plus moves determine every matrix entry, so the matrices
    # themselves need not be built or hashed
    moves, _ = _explore(p.deps, p.sorted_components())
    return ("model", p.components, p.bounds, frozenset(moves.values()))


def equivalent(p: PropertySet, q: PropertySet) -> bool:
    """True when ``p`` and ``q`` describe the same failure behaviour.

    Literal equality implies equivalence.  The converse fails for
    dependencies that can never fire, such as ``{c1, c2} -> {sys}`` next to
    ``{c1} -> {c2, sys}``.
    """
    return behaviour_key(p) == behaviour_key(q)


# -- round trips --------------------------------------------------------------

@dataclass(frozen=True)
class RoundTripReport:
    direction: str  # "props-first" or "model-first"
    holds: bool
    lhs: str
    rhs: str
    relation_checked: str
    witness: tuple = ()


def check_roundtrip_props(p: PropertySet, depth: int = 3) -> RoundTripReport:
    """Check that ``p`` is at most as general as ``gamma(alpha(p))``."""
    from .order import Relation, generalizes

    q = concretize_props(abstract_model(p))
    lhs, rhs = str(normalize(p)), str(q)
    if props_equal(p, q):
        return RoundTripReport("props-first", True, lhs, rhs, "equal")
    verdict = generalizes(p, q, depth)
    holds = verdict.relation in (Relation.EQUAL, Relation.LEQ_WITNESSED)
    if verdict.relation is Relation.EQUAL:
        how = "equivalent (same chain)"
    elif verdict.relation is Relation.LEQ_WITNESSED:
        how = f"p <= gamma(alpha(p)) witnessed in {len(verdict.witness)} step(s)"
    else:
        how = f"no witness within depth {verdict.depth_searched}"
    return RoundTripReport("props-first", holds, lhs, rhs, how, verdict.witness or ())


def check_roundtrip_model(m: MisModel, depth: int = 3) -> RoundTripReport:
    """Check that ``alpha(gamma(m))`` is at most as general as ``m``.

    Models are compared structurally first.  Otherwise the model order is
    taken to be the one induced through gamma.
    """
    from .order import Relation, generalizes

    require_valid(m)
    gm = concretize_props(m)
    report = check_well_formed(gm)
    if not report.ok:
        # no chain can be drawn from gamma(m), so there is nothing to compare
        why = "; ".join(v.message for v in report.violations)
        return RoundTripReport("model-first", False, "-", _model_summary(m.canonical()), f"gamma(m) is ill-formed: {why}")
    back = abstract_model(gm)
    a, b = back.canonical(), m.canonical()
    lhs, rhs = _model_summary(a), _model_summary(b)
    if a == b:
        return RoundTripReport("model-first", True, lhs, rhs, "equal")
    verdict = generalizes(concretize_props(back), gm, depth)
    holds = verdict.relation in (Relation.EQUAL, Relation.LEQ_WITNESSED)
    return RoundTripReport(
        "model-first",
        holds,
        lhs,
        rhs,
        f"gamma(alpha(gamma(m))) <= gamma(m): {verdict.relation.value}",
        verdict.witness or (),
    )


def _model_summary(m: MisModel) -> str:
    parts = []
    for mv in sorted(m.moves, key=lambda x: (state_order_key(x.source, m.names), x.component)):
        parts.append(f"{m.label(mv.source)}-{mv.component}->{m.label(mv.target)}")
    return " ".join(parts)
