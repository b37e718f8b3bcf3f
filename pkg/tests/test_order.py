from fractions import Fraction

import pytest

from reliamis import (
    AddDep,
    PropertySet,
    RemoveDep,
    Split,
    TightenRel,
    add_dep,
    apply_script,
    check_well_formed,
    evaluate_reliability,
    generalizes,
    normalize,
    props_equal,
    relax_rel,
)
from reliamis.corpus import coupled_parallel, paper_systems, series, three_independent, walkthrough
from reliamis.errors import BottomNotConcrete, DepthZero, UniverseTooLarge, UnsupportedOperation
from reliamis.galois import abstract_model, equivalent
from reliamis.order import (
    Relation,
    bottom,
    covers_check,
    join,
    meet,
    replay_reaches,
    strictly_between,
    top,
)
from reliamis.ops import merge, split
from reliamis.props import SYS, Dependency

S1, S2, S3, S4, S5, S6 = walkthrough()
CORPUS = paper_systems()


def _top_for(p):
    return top(next(iter(p.components))) if len(p.components) == 1 else top()


def test_top_shape():
    t = top()
    assert t.components == {"c"}
    assert t.bound("c") == 0
    assert t.deps == {Dependency.of("c", "sys")}
    assert check_well_formed(t).ok


def test_bottom_sentinel():
    assert props_equal(bottom(), bottom())
    assert generalizes(bottom(), S4).relation is Relation.LEQ_WITNESSED
    assert generalizes(bottom(), bottom()).relation is Relation.EQUAL
    assert not generalizes(S4, bottom()).holds
    with pytest.raises(BottomNotConcrete):
        abstract_model(bottom())
    with pytest.raises(BottomNotConcrete):
        split(bottom(), "c", "a", "b")


def test_meet_and_join_are_unsupported():
    with pytest.raises(UnsupportedOperation):
        meet(S1, S2)
    with pytest.raises(UnsupportedOperation):
        join(S1, S2)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_everything_generalizes_to_top(name):
    p = CORPUS[name]
    limit = len(p.components) + 1
    v = generalizes(p, _top_for(p), limit)
    assert v.relation is Relation.LEQ_WITNESSED
    assert len(v.witness) <= limit
    assert replay_reaches(v, p, _top_for(p))
    # the component count never grows along a generalization
    sizes = [len(p.components)]
    state = p
    for op in v.witness:
        state = op.apply(state)
        sizes.append(len(state.components))
    assert sizes == sorted(sizes, reverse=True)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_reflexive(name):
    assert generalizes(CORPUS[name], CORPUS[name], 1).relation is Relation.EQUAL


def test_depth_zero_rejected():
    with pytest.raises(DepthZero):
        generalizes(S1, S2, 0)


def test_s6_below_s4_by_two_additions():
    v = generalizes(S6, S4, 2)
    assert v.relation is Relation.LEQ_WITNESSED
    assert v.witness == (AddDep(frozenset({"c2"}), frozenset({"c1"})), AddDep(frozenset({"c3"}), frozenset({"c1"})))
    assert replay_reaches(v, S6, S4)


def test_s6_below_s4_needs_behavioural_matching():
    # Adding dependencies back can never recreate {c1, c2, c3} -> {sys},
    # which never fires, so the literal reading has no witness.
    assert not generalizes(S6, S4, 3, literal=True).holds
    reached = apply_script(generalizes(S6, S4, 2).witness, S6)
    assert not props_equal(reached, S4) and equivalent(reached, S4)


def test_s1_is_not_below_s2():
    v = generalizes(S1, S2, 3)
    assert v.relation is Relation.NOT_LEQ_WITHIN_BOUND
    assert v.depth_searched == 3 and v.witness is None


def test_s2_below_coupled_parallel_literally():
    v = generalizes(S2, coupled_parallel(), 2, literal=True)
    assert [type(op) for op in v.witness] == [AddDep]


def test_transitivity_by_composing_witnesses():
    a = generalizes(S6, S4, 3)
    b = generalizes(S4, top(), 4)
    assert a.holds and b.holds
    composed = a.witness + b.witness
    assert equivalent(apply_script(composed, S6), top())
    assert generalizes(S6, top(), 5).holds


def test_antisymmetry_on_witnessed_pairs():
    names = sorted(CORPUS)
    for x in names:
        for y in names:
            if x == y:
                continue
            p, q = CORPUS[x], CORPUS[y]
            if generalizes(p, q, 2).relation is Relation.LEQ_WITNESSED:
                back = generalizes(q, p, 2)
                assert back.relation is not Relation.LEQ_WITNESSED, (x, y)


def test_generalizing_never_raises_reliability_requirements():
    # every witness step is a generalization, so the abstracted reliability
    # at the bounds can only go down or stay (more failures, weaker bounds)
    v = generalizes(S6, S4, 2)
    values = [evaluate_reliability(abstract_model(p)).value for p in (S6, S4)]
    assert values[1] <= values[0]


# -- covers -------------------------------------------------------------------

def test_split_of_s1_is_covered():
    assert covers_check(S1, Split("c1", "c1", "c2"))


def test_split_cover_fails_literally():
    # s2 -> coupled parallel -> s1 is a literal chain strictly between
    assert not covers_check(S1, Split("c1", "c1", "c2"), literal=True)
    between = strictly_between(S1, S2, literal=True)
    assert any(props_equal(x, coupled_parallel()) for x in between)


def test_split_with_unequal_bounds_is_not_a_cover():
    p = PropertySet.make(["c1", "c2"], {"c1": 1, "c2": "0.5"}, coupled_parallel().deps)
    q = split(p, "c1", "c1", "c3")
    assert not covers_check(p, Split("c1", "c1", "c3"))
    # relax the new half down to c2's bound, then fold it into c2
    middle = relax_rel(q, "c3", Fraction(1, 2))
    assert check_well_formed(middle).ok
    assert equivalent(merge(middle, "c2", "c3", "c2"), p)


def test_split_with_equal_bounds_is_not_always_a_cover():
    D = Dependency.of
    p = PropertySet.make(["c1", "c2"], "0.5", [D("c1", "c2 sys"), D("c2", "c1")])
    q = split(p, "c2", "c2", "c3")
    assert not covers_check(p, Split("c2", "c2", "c3"))
    middle = add_dep(q, {"c3"}, {SYS})
    assert check_well_formed(middle).ok and not equivalent(middle, q)
    assert equivalent(merge(middle, "c1", "c3", "c1"), p)


def test_tighten_without_grid_point_in_between_is_covered():
    assert covers_check(S1, TightenRel("c1", Fraction(95, 100)), grid=[Fraction(1, 2)])


def test_tighten_with_grid_point_in_between_is_not_covered():
    assert not covers_check(S1, TightenRel("c1", Fraction(1)), grid=[Fraction(95, 100)])


def test_two_effect_removal_is_not_a_cover():
    # removing {c2, sys} at once is two single-effect removals; removing only
    # c2 from {c1}'s effects leaves a set strictly in between
    r = RemoveDep(frozenset({"c1"}), frozenset({"c2", SYS}))
    assert not covers_check(S2, r)
    middle = RemoveDep(frozenset({"c1"}), frozenset({"c2"})).apply(S2)
    assert any(equivalent(x, middle) for x in strictly_between(S2, r.apply(S2)))


def test_cover_guard():
    four = split(three_independent(), "c3", "c3", "c4")
    with pytest.raises(UniverseTooLarge):
        covers_check(four, TightenRel("c1", Fraction(1)))
    with pytest.raises(ValueError):
        covers_check(series(), AddDep(frozenset({"c1"}), frozenset({"c2"})))


def test_merge_of_split_restores_for_corpus():
    for name, p in CORPUS.items():
        c = min(p.components)
        assert merge(split(p, c, c, "z"), c, "z", c) == p, name
