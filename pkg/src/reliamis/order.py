"""The specificity order on property sets.

``p <= q`` holds when a finite sequence of generalizations turns ``p`` into
``q``.  The move space is infinite (any lower bound can be relaxed to), so
:func:`generalizes` searches a finite, goal-directed part of it and returns
a replayable witness or an explicitly inconclusive verdict.

The order lives on well-formed property sets: an operator application with
an ill-formed result is never a step of a witness.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DepthZero, ReliaMisError, UniverseTooLarge, UnsupportedOperation
from .ops import AddDep, Merge, RelaxRel, apply_script
from .props import BOTTOM, SYS, Dependency, PropertySet, check_well_formed, normalize, props_equal

MAX_COVER_COMPONENTS = 3


def top(name: str = "c") -> PropertySet:
    """One component, no reliability constraint, its failure fails the system."""
    return normalize(PropertySet.make([name], 0, [Dependency.of([name], [SYS])]))


def bottom() -> PropertySet:
    return BOTTOM


def meet(p, q):
    raise UnsupportedOperation("meets of property sets are not defined")


def join(p, q):
    raise UnsupportedOperation("joins of property sets are not defined")


class Relation(enum.Enum):
    EQUAL = "equal"
    LEQ_WITNESSED = "leq-witnessed"
    NOT_LEQ_WITHIN_BOUND = "not-leq-within-bound"


@dataclass(frozen=True)
class OrderVerdict:
    relation: Relation
    witness: tuple | None
    depth_searched: int

    @property
    def holds(self) -> bool:
        return self.relation is not Relation.NOT_LEQ_WITHIN_BOUND


def _keyfunc(literal: bool):
    if literal:
        return lambda p: normalize(p)
    from .galois import behaviour_key

    return behaviour_key


def _cause_candidates(p: PropertySet, q: PropertySet) -> list:
    comps = p.sorted_components()
    if len(comps) <= 4:
        sets = [frozenset(s) for k in range(1, len(comps) + 1) for s in combinations(comps, k)]
    else:
        sets = {d.causes for d in p.deps} | {d.causes for d in q.deps if d.causes <= p.components}
    return sorted(set(sets), key=lambda s: (len(s), sorted(s)))


def search_moves(p: PropertySet, q: PropertySet, names=None, bounds=None) -> list:
    """Candidate generalization steps from ``p`` toward ``q``, in canonical order.

    Merges use the smaller of the two names or any name from ``names``
    (default: the names of ``q``); relaxations only go to values in
    ``bounds`` (default: the bounds of ``q``).
    """
    comps = p.sorted_components()
    names = sorted(q.components if names is None else names)
    bounds = sorted(set(q.rel.values()) if bounds is None else bounds)
    moves = []
    for a, b in combinations(comps, 2):
        rest = p.components - {a, b}
        for cm in sorted({a} | {n for n in names if n not in rest}):
            moves.append(Merge(a, b, cm))
    for causes in _cause_candidates(p, q):
        for e in [c for c in comps if c not in causes] + [SYS]:
            moves.append(AddDep(causes, frozenset({e})))
    for c in comps:
        for r in bounds:
            if r < p.bound(c):
                moves.append(RelaxRel(c, Fraction(r)))
    return moves


def generalizes(p: PropertySet, q: PropertySet, depth: int = 3, *, literal: bool = False) -> OrderVerdict:
    """Decide ``p <= q`` by breadth-first search over generalization scripts.

    Targets are matched up to equivalent behaviour (same components, bounds
    and abstracted chain); ``literal=True`` demands equal canonical forms
    instead.  The shortest witness is returned, ties broken by the canonical
    move order.  ``NOT_LEQ_WITHIN_BOUND`` is inconclusive, not a refutation.
    """
    if depth < 1:
        raise DepthZero("search depth must be positive")
    if p.bottom_flag:
        # bottom is below everything by definition; there is nothing to replay
        return OrderVerdict(Relation.EQUAL if q.bottom_flag else Relation.LEQ_WITNESSED, (), 0)
    if q.bottom_flag:
        return OrderVerdict(Relation.NOT_LEQ_WITHIN_BOUND, None, 0)
    key = _keyfunc(literal)
    start, goal = normalize(p), normalize(q)
    goal_key = key(goal)
    if props_equal(start, goal) or key(start) == goal_key:
        return OrderVerdict(Relation.EQUAL, None, 0)
    seen = {key(start)}
    frontier = [(start, ())]
    for level in range(1, depth + 1):
        nxt = []
        for node, script in frontier:
            for op in search_moves(node, goal):
                try:
                    child = op.apply(node)
                except ReliaMisError:
                    continue
                if not check_well_formed(child).ok:
                    continue
                k = key(child)
                if k in seen:
                    continue
                seen.add(k)
                path = script + (op,)
                if k == goal_key:
                    return OrderVerdict(Relation.LEQ_WITNESSED, path, level)
                if len(child.components) >= len(goal.components):
                    nxt.append((child, path))
        frontier = nxt
        if not frontier:
            break
    return OrderVerdict(Relation.NOT_LEQ_WITHIN_BOUND, None, depth)


def replay_reaches(verdict: OrderVerdict, p: PropertySet, q: PropertySet, *, literal: bool = False) -> bool:
    """Replay a witness and check that it lands on ``q``."""
    if verdict.relation is not Relation.LEQ_WITNESSED:
        return False
    if p.bottom_flag:
        return True
    key = _keyfunc(literal)
    return key(apply_script(verdict.witness, p)) == key(q)


# -- covers -------------------------------------------------------------------

def _up_closure(q: PropertySet, names, grid, key):
    """Every property set reachable from ``q`` by generalization inside the universe."""
    start = normalize(q)
    nodes = {key(start): start}
    edges = {}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        k = key(node)
        out = edges.setdefault(k, set())
        for op in _universe_moves(node, names, grid):
            try:
                child = op.apply(node)
            except ReliaMisError:
                continue
            if not check_well_formed(child).ok:
                continue
            ck = key(child)
            out.add(ck)
            if ck not in nodes:
                nodes[ck] = child
                queue.append(child)
    return nodes, edges


def _universe_moves(p: PropertySet, names, grid):
    comps = p.sorted_components()
    moves = []
    for a, b in combinations(comps, 2):
        rest = p.components - {a, b}
        for cm in sorted(n for n in names if n not in rest):
            moves.append(Merge(a, b, cm))
    for k in range(1, len(comps) + 1):
        for causes in combinations(comps, k):
            for e in [c for c in comps if c not in causes] + [SYS]:
                moves.append(AddDep(frozenset(causes), frozenset({e})))
    for c in comps:
        for r in grid:
            if r < p.bound(c):
                moves.append(RelaxRel(c, r))
    return moves


def strictly_between(p: PropertySet, q: PropertySet, grid=(), *, literal: bool = False) -> list:
    """Property sets ``x`` of the bounded universe with ``q < x < p``.

    The universe uses the component names of ``p`` and ``q`` and bounds from
    ``grid`` together with those of ``p`` and ``q``; inside it the order is
    computed exactly from the full generalization graph.
    """
    names = sorted(p.components | q.components)
    if len(names) > MAX_COVER_COMPONENTS:
        raise UniverseTooLarge(
            f"{len(names)} component names; at most {MAX_COVER_COMPONENTS} are supported"
        )
    grid = sorted({Fraction(g) for g in grid} | set(p.rel.values()) | set(q.rel.values()))
    key = _keyfunc(literal)
    nodes, edges = _up_closure(q, names, grid, key)
    pk, qk = key(normalize(p)), key(normalize(q))
    if pk not in nodes:
        return []
    reverse = {}
    for src, dsts in edges.items():
        for d in dsts:
            reverse.setdefault(d, set()).add(src)
    below_p = {pk}
    queue = deque([pk])
    while queue:
        for src in reverse.get(queue.popleft(), ()):
            if src not in below_p:
                below_p.add(src)
                queue.append(src)
    return [nodes[k] for k in nodes if k in below_p and k not in (pk, qk)]


def covers_check(p: PropertySet, r, grid=(), *, literal: bool = False) -> bool:
    """True when ``p`` covers ``r(p)``: nothing lies strictly between them."""
    if r.generalizes:
        raise ValueError(f"{r.name} is a generalization, not a refinement")
    if len(p.components) > MAX_COVER_COMPONENTS:
        raise UniverseTooLarge(f"covers_check is limited to {MAX_COVER_COMPONENTS} components")
    q = r.apply(p)
    return not strictly_between(p, q, grid, literal=literal)
