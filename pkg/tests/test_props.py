import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reliamis import BOTTOM, Dependency, PropertySet, check_well_formed, normalize, props_equal
from reliamis.corpus import coupled_parallel, independent_parallel, series
from reliamis.errors import UndeclaredComponent
from reliamis.order import top
from reliamis.props import (
    SYS,
    check_name,
    is_inaction,
    strip_tautology,
    to_probability,
    union_pair,
)
from wfgen import wf_props

D = Dependency.of


def make(comps, deps, rel=Fraction(9, 10)):
    return PropertySet.make(comps, rel, deps)


# -- the three rewrite rules ---------------------------------------------------

def test_tautology_drops_causes_from_effects():
    p = normalize(make(["c1", "c2"], [D("c1", "c1 c2")]))
    assert p.deps == {D("c1", "c2")}


def test_union_merges_same_causes():
    p = normalize(make(["c1", "c2"], [D("c1", "c2"), D("c1", "sys")]))
    assert p.deps == {D("c1", "c2 sys")}


def test_inaction_drops_empty_causes():
    p = normalize(make(["c1"], [Dependency(frozenset(), frozenset({"c1"}))]))
    assert p.deps == frozenset()


def test_normalize_rejects_undeclared():
    with pytest.raises(UndeclaredComponent):
        normalize(make(["c1"], [D("c1", "c9")]))


def test_normalize_keeps_components_and_bounds():
    p = make(["b", "a"], [D("a", "a b"), D("a", "sys")], {"a": "0.3", "b": "0.7"})
    q = normalize(p)
    assert q.components == p.components and q.rel == p.rel


def _rewrite_randomly(deps, rng):
    """Apply the three rules one redex at a time in a random order until nothing changes."""
    deps = list(deps)
    while True:
        redexes = []
        for i, d in enumerate(deps):
            if is_inaction(d):
                redexes.append(("inaction", i))
            elif strip_tautology(d) != d:
                redexes.append(("tautology", i))
        for i in range(len(deps)):
            for j in range(i + 1, len(deps)):
                if deps[i].causes == deps[j].causes:
                    redexes.append(("union", i, j))
        if not redexes:
            return frozenset(deps)
        kind, *at = rng.choice(redexes)
        if kind == "inaction":
            del deps[at[0]]
        elif kind == "tautology":
            deps[at[0]] = strip_tautology(deps[at[0]])
        else:
            i, j = at
            merged = union_pair(deps[i], deps[j])
            deps = [d for k, d in enumerate(deps) if k not in (i, j)] + [merged]


@st.composite
def raw_dep_lists(draw):
    names = ["a", "b", "c", "d"]
    sets = st.frozensets(st.sampled_from(names), max_size=4)
    deps = draw(st.lists(st.builds(Dependency, sets, sets, st.booleans()), max_size=8))
    return names, deps


@given(raw_dep_lists(), st.integers(0, 10**6))
@settings(max_examples=300, deadline=None)
def test_rewrite_order_does_not_matter(case, seed):
    names, deps = case
    p = normalize(PropertySet.make(names, 0, deps))
    assert _rewrite_randomly(deps, random.Random(seed)) == p.deps


@given(raw_dep_lists())
@settings(max_examples=200, deadline=None)
def test_normalize_idempotent(case):
    names, deps = case
    p = normalize(PropertySet.make(names, 0, deps))
    assert normalize(p) == p


@given(raw_dep_lists())
@settings(max_examples=200, deadline=None)
def test_normalize_preserves_wf_verdict(case):
    names, deps = case
    p = PropertySet.make(names, 0, deps)
    a, b = check_well_formed(p), check_well_formed(normalize(p))
    assert (a.initiality_ok, a.termination_ok, a.monotonicity_ok) == (
        b.initiality_ok,
        b.termination_ok,
        b.monotonicity_ok,
    )


@given(wf_props())
@settings(max_examples=100, deadline=None)
def test_generated_sets_are_canonical(p):
    assert normalize(p) == p


# -- well-formedness -----------------------------------------------------------

@pytest.mark.parametrize("p", [coupled_parallel(), independent_parallel(), series(), top()])
def test_worked_systems_are_well_formed(p):
    assert check_well_formed(p).ok


def test_monotonicity_violation_names_the_lost_effect():
    p = make(["c1", "c2", "c3"], [D("c1", "c2 sys"), D("c2", "sys"), D("c3", "sys"), D("c1 c3", "")])
    report = check_well_formed(p)
    assert not report.monotonicity_ok
    assert any(v.rule == "monotonicity" and "c2" in v.message for v in report.violations)


def test_initiality_violation_for_missing_sole_cause():
    report = check_well_formed(make(["c1", "c2"], [D("c1", "sys")]))
    assert not report.initiality_ok
    assert [v.subject for v in report.violations if v.rule == "initiality"] == ["c2"]


def test_termination_violation():
    report = check_well_formed(make(["c1"], [D("c1", "")]))
    assert not report.termination_ok and report.initiality_ok


def test_system_flag_counts_for_monotonicity():
    # {c1, c2} would let the system recover after {c1} already failed it
    report = check_well_formed(make(["c1", "c2"], [D("c1", "sys"), D("c2", "sys"), D("c1 c2", "")]))
    assert not report.monotonicity_ok
    assert any("sys" in v.message for v in report.violations)


# -- equality ------------------------------------------------------------------

def test_props_equal_cases():
    p = make(["c1", "c2"], [D("c1", "c1 c2"), D("c1", "sys"), D("c2", "c1 sys")])
    assert props_equal(p, normalize(p))
    assert not props_equal(series(), coupled_parallel())
    assert not props_equal(BOTTOM, top())
    assert props_equal(BOTTOM, BOTTOM)


def test_bounds_matter_for_equality():
    assert not props_equal(series(Fraction(9, 10)), series(Fraction(8, 10)))


# -- small pieces --------------------------------------------------------------

@pytest.mark.parametrize("bad", ["", "1c", "a-b", SYS, "c 1"])
def test_bad_names(bad):
    with pytest.raises(ValueError):
        check_name(bad)


def test_decimal_text_is_exact():
    assert to_probability("0.1") == Fraction(1, 10)
    assert to_probability(0.1) == Fraction(1, 10)
    assert to_probability("1/3") == Fraction(1, 3)
    with pytest.raises(ValueError):
        to_probability("1.5")


def test_dependency_rendering():
    assert str(D("c2 c1", "sys c3")) == "{c1, c2} -> {c3, sys}"
