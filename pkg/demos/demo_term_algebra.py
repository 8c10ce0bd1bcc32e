#!/usr/bin/env python3
"""The message algebra underneath everything: what an eavesdropper can
derive from what it has seen.

    python demos/demo_term_algebra.py
"""

from guardsim.knowledge import KnowledgeSet, analyze, derivable
from guardsim.terms import (Atom, Nonce, Pair, SymEnc, SymKey, comm_enc,
                            inverse_key, render)


def check(ks, goal, note):
    verdict = "derivable" if derivable(ks, goal) else "not derivable"
    have = ", ".join(sorted(render(t) for t in ks.items))
    print(f"  {{{have}}}  |-  {render(goal)}: {verdict}   ({note})")


def main():
    k = SymKey(value=1, label="k")
    m = Atom(value=2, label="m")
    na, nb = Nonce(value=3, label="N_A"), Nonce(value=4, label="N_B")
    ka, kb = SymKey(value=5, label="K_A"), SymKey(value=6, label="K_B")

    print("Analysis and synthesis:")
    check(KnowledgeSet([SymEnc(m, k), k]), m, "decryption with the key")
    check(KnowledgeSet([SymEnc(m, k)]), m, "no key, no plaintext")
    check(KnowledgeSet([Pair(na, nb)]), nb, "projection")
    check(KnowledgeSet([m, k]), SymEnc(Pair(m, m), k), "composition + encryption")

    print("\nCommutative layering (the three-pass protocol's core):")
    double = comm_enc(m, [ka, kb])
    check(KnowledgeSet([double, inverse_key(ka)]), comm_enc(m, [kb]),
          "peel one layer, keep the other")
    check(KnowledgeSet([double]), m, "both layers intact: opaque")

    print("\nThe analysis fixpoint never forgets and never invents:")
    ks = KnowledgeSet([SymEnc(Pair(na, nb), k), k])
    closed = analyze(ks)
    print("  before:", sorted(render(t) for t in ks.items))
    print("  after: ", sorted(render(t) for t in closed.items))


if __name__ == "__main__":
    main()
