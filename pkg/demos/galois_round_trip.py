"""Abstract property sets into chains and read them back.

Shows a clean round trip, one that only keeps behaviour, and one that
breaks because the system-failing dependency can never fire.
"""
import warnings

from reliamis import abstract_model, check_roundtrip_props, concretize_props
from reliamis.corpus import coupled_parallel, walkthrough
from reliamis.galois import UnreachableFailureWarning, equivalent
from reliamis.props import Dependency, PropertySet

D = Dependency.of


def report(name, p):
    back = concretize_props(abstract_model(p))
    rep = check_roundtrip_props(p)
    print(f"{name}")
    print(f"  p               {p}")
    print(f"  gamma(alpha(p)) {back}")
    print(f"  same chain: {equivalent(p, back)}; {'holds' if rep.holds else 'FAILS'} ({rep.relation_checked})\n")


report("coupled parallel", coupled_parallel())

# s4 carries {c1, c2, c3} -> {sys}, which never fires; gamma drops it
report("s4", walkthrough()[3])

never = PropertySet.make(["c1", "c2"], "0.9", [D("c1", "c2"), D("c2", "c1"), D("c1 c2", "sys")])
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", UnreachableFailureWarning)
    report("failure never reachable", never)
for w in caught:
    print("warning:", w.message)
