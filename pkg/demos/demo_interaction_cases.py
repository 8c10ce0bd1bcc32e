#!/usr/bin/env python3
"""Two rivals attacking the same initiator: what each believes about the
other decides who wins, whether both starve, or whether neither can tell.

    python demos/demo_interaction_cases.py
"""

from guardsim.cases import CASE_TABLE, enumerate_interaction_cases

BELIEFS = {
    1: "each believes the other honest",
    2: "each knows the other is an attacker",
    3: "each is unaware of the other",
    4: "the second believes the first honest",
    5: "the second knows the first is dishonest",
    6: "the second is unsure about the first",
}


def main():
    results = enumerate_interaction_cases("iso-sc-27", seed=0)
    for case in sorted(CASE_TABLE):
        r = results[case]
        print(f"case {case}: {BELIEFS[case]}")
        print(f"  trace {r.trace_name}, outcome: {r.result}"
              + (f" ({r.dominant} dominates)" if r.dominant else ""))
        for line in r.trace.lines():
            print("    " + line)
        for who, what in sorted(r.detail.items()):
            print(f"    {who}: {what}")
        print()


if __name__ == "__main__":
    main()
