"""Worked example systems shared by the tests and demos.

``p`` is the shared component reliability bound; pass a ``Fraction`` or a
decimal string to keep arithmetic exact.
"""
from fractions import Fraction

from .ops import apply_script, make_op
from .order import top
from .props import Dependency, PropertySet, normalize

D = Dependency.of

DEFAULT_P = Fraction(9, 10)


def _sys(comps, deps, p):
    return normalize(PropertySet.make(comps, p, deps))


def coupled_parallel(p=DEFAULT_P):
    """Two lines in parallel where either failure overloads the other."""
    return _sys(["c1", "c2"], [D("c1", "c2 sys"), D("c2", "c1 sys")], p)


def independent_parallel(p=DEFAULT_P):
    return _sys(["c1", "c2"], [D("c1", ""), D("c2", ""), D("c1 c2", "sys")], p)


def series(p=DEFAULT_P):
    return _sys(["c1", "c2"], [D("c1", "sys"), D("c2", "sys")], p)


def three_independent(p=DEFAULT_P):
    return _sys(
        ["c1", "c2", "c3"],
        [D("c1", ""), D("c2", ""), D("c3", ""), D("c1 c2 c3", "sys")],
        p,
    )


def two_of_three(p=DEFAULT_P):
    """The 2-of-3 system exactly as written out at the end of the walkthrough."""
    return _sys(
        ["c1", "c2", "c3"],
        [
            D("c1", ""),
            D("c2", ""),
            D("c3", ""),
            D("c1 c2", "sys"),
            D("c1 c3", "c2 sys"),
            D("c2 c3", "c1 sys"),
        ],
        p,
    )


def walkthrough_script(p=DEFAULT_P):
    """Operator sequence taking the top element to the 2-of-3 system."""
    return [
        make_op("tighten_rel", "c1", p),
        make_op("split", "c1", "c1", "c2"),
        make_op("remove_dep", "c1", "c2,sys"),
        make_op("split", "c2", "c2", "c3"),
        make_op("remove_dep", "c2", "c1,c3,sys"),
        make_op("remove_dep", "c3", "c1,c2,sys"),
    ]


def walkthrough(p=DEFAULT_P):
    """``[s1, ..., s6]`` obtained by replaying :func:`walkthrough_script` from top."""
    state = top("c1")
    out = []
    for op in walkthrough_script(p):
        state = apply_script([op], state)
        out.append(state)
    return out


def paper_systems(p=DEFAULT_P) -> dict:
    """Every named, well-formed example system."""
    s = walkthrough(p)
    systems = {
        "coupled_parallel": coupled_parallel(p),
        "independent_parallel": independent_parallel(p),
        "series": series(p),
        "three_independent": three_independent(p),
        "two_of_three": two_of_three(p),
    }
    systems.update({f"s{i + 1}": si for i, si in enumerate(s)})
    return systems
