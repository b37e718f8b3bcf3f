"""Derive a 2-of-3 system from the most general one-component system.

Run with ``python3 demos/walkthrough.py``.  Each step applies one operator,
prints the dependencies, and evaluates the abstracted chain at p = 0.9.
"""
from fractions import Fraction

from reliamis import abstract_model, apply_script, evaluate_reliability, format_op
from reliamis.corpus import walkthrough_script
from reliamis.io import export_dot
from reliamis.order import generalizes, top


def show(p):
    for c in p.sorted_components():
        print(f"    R({c}) >= {p.bound(c)}")
    for d in p.sorted_deps():
        print(f"    {d}")


def main():
    p = Fraction(9, 10)
    state = top("c1")
    print("start:")
    show(state)
    states = []
    for i, op in enumerate(walkthrough_script(p), 1):
        state = apply_script([op], state)
        states.append(state)
        r = evaluate_reliability(abstract_model(state))
        print(f"\ns{i} = {format_op(op)}")
        show(state)
        print(f"  R(sys) = {r}")

    # the last system sits below s4: adding two dependencies back recovers it
    v = generalizes(states[5], states[3], 2)
    print("\ns6 <= s4:", v.relation.value, [format_op(op) for op in v.witness])

    print("\nDOT for the final chain:\n")
    print(export_dot(abstract_model(state)))


if __name__ == "__main__":
    main()
