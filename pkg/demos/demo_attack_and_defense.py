#!/usr/bin/env python3
"""Walk through the nonce-handshake story: the honest run, the
parallel-session attack, and the guardian's interference.

    python demos/demo_attack_and_defense.py
"""

from guardsim.protocols.iso_sc27 import wire
from guardsim.scenario import evaluate
from guardsim.terms import render


def show(title, wiring, seed=5, attack=True):
    result = wiring.simulator(seed=seed).run()
    print(f"== {title} ==")
    print(result.trace.render())
    outcome = evaluate(result, wiring.victim, attack)
    print(f"-> {outcome.classification}"
          f" (false negatives: {outcome.false_negatives})")
    print()
    return result


def main():
    print("Three runs of the same three-message handshake:\n")

    show("honest run", wire(guardian=False, attack=None), attack=False)

    show("parallel-session attack, no guardian",
         wire(guardian=False, attack="classic"))

    result = show("same attack, guardian on A's side",
                  wire(guardian=True, attack="classic"))

    g = result.guardian
    print("What the guardian saw, step by step:")
    print(f"{'dataset':<42} {'id':>3} {'crit':>5} {'inv':>4}")
    for row in g.module_log:
        terms = ", ".join(render(t) for t in row.dataset)
        cell = lambda v: "-" if v is None else str(v)
        print(f"{{{terms}}}".ljust(42)
              + f" {cell(row.ident):>3} {cell(row.crit):>5} {cell(row.inv):>4}")
    print()
    print("The reflected nonce was already in the dataset: the invariant")
    print("fired, the oracle got poisoned with a fake, and A was told to")
    print("abort once both sessions had played out.")


if __name__ == "__main__":
    main()
