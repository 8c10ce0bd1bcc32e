"""Exhaustive enumeration of replay-family attack functions.

The family: at each opportunity the attacker either erases the pending
message on the watched channel, injects a previously spied term at a
target (masquerading as its peer), or waits.  Choice sequences are
explored exhaustively up to a visible-trace bound; each leaf is a full
deterministic run whose outcome is classified.  The suite asserts that a
guardian in topological advantage never lets a deceiving run finish
undetected (zero false negatives over the whole family)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .agents import AttackerAgent
from .knowledge import KnowledgeSet
from .network import Envelope, Erase, Inject, Slot
from .scenario import evaluate
from .simulator import BudgetExceeded
from .terms import Term, wire_view


@dataclass
class EnumerationReport:
    runs: int
    false_negatives: int
    fn_witnesses: List[Tuple[Tuple, str]] = field(default_factory=list)
    deceptions_detected: int = 0


class ScriptedAttacker(AttackerAgent):
    """Attacker driven by an explicit choice sequence.

    Choices: ("erase", i) erase the i-th pending visible envelope;
    ("inject", j, receiver) inject the j-th distinct spied term at the
    receiver, masquerading as its configured peer; ("wait",).  When the
    script runs out the attacker goes quiet and the first untaken option
    menu is recorded as the frontier."""

    def __init__(self, name: str, interest, masks: Dict[str, str],
                 choices: Sequence[Tuple], knowledge=None,
                 max_inject_terms: int = 6):
        super().__init__(name=name, interest=interest, function=None,
                         variant="proceed", knowledge=knowledge)
        self.masks = dict(masks)            # receiver -> claimed identity
        self.choices = list(choices)
        self.cursor = 0
        self.frontier: Optional[List[Tuple]] = None
        self.spied_terms: List[Term] = []
        self._spied_keys: Set[object] = set()
        self.next_session = 2
        self.session_of: Dict[object, int] = {}
        self.max_inject_terms = max_inject_terms

    def spy(self, env: Envelope, direction: str) -> None:
        super().spy(env, direction)
        key = wire_view(env.body)
        if key not in self._spied_keys:
            self._spied_keys.add(key)
            self.spied_terms.append(env.body)

    def options(self, pending, seen) -> List[Tuple]:
        opts: List[Tuple] = []
        visible = [seq for seq in sorted(pending)
                   if seq in seen and not pending[seq].injected]
        for i in range(len(visible)):
            opts.append(("erase", i))
        for j in range(min(len(self.spied_terms), self.max_inject_terms)):
            for receiver in sorted(self.masks):
                opts.append(("inject", j, receiver))
        return opts

    def scripted_action(self, pending, seen):
        opts = self.options(pending, seen)
        if self.cursor >= len(self.choices):
            # accumulate every option that becomes available once the
            # script has run out: each is a candidate next move
            if opts:
                if self.frontier is None:
                    self.frontier = []
                for o in opts:
                    if o not in self.frontier:
                        self.frontier.append(o)
            return None
        choice = self.choices[self.cursor]
        if choice not in opts:
            return None  # hold until the scripted move becomes possible
        self.cursor += 1
        if choice[0] == "erase":
            visible = [seq for seq in sorted(pending)
                       if seq in seen and not pending[seq].injected]
            return Erase(actor=self.name, target_seq=visible[choice[1]],
                         rank=1, own_step=True)
        _, j, receiver = choice
        term = self.spied_terms[j]
        key = (wire_view(term), receiver)
        if key not in self.session_of:
            self.session_of[key] = self.next_session
            self.next_session += 1
        return Inject(actor=self.name, claimed=self.masks[receiver],
                      body=term, receiver=receiver,
                      slot=Slot(self.session_of[key], 1), rank=1)

    # the scripted attacker replaces the attack-function machinery
    def rival_target(self, pending, seen):
        return None

    def own_step_action(self, pending, seen, rivals_seeing):
        return self.scripted_action(pending, seen)


def _run_with_choices(case, kind: str, choices: Sequence[Tuple],
                      seed: int, max_visible: int):
    wiring = case.wire(kind=kind, guardian=True,
                       attack=case.attack_names[0], seed=seed)
    masks = _masks_for(case)
    scripted = ScriptedAttacker(
        name="E", interest=list(wiring.attackers[0].interest),
        masks=masks, choices=choices,
        knowledge=KnowledgeSet(list(wiring.attackers[0].knowledge.items)))
    wiring.attackers = [scripted]
    sim = wiring.simulator(seed=seed, max_rounds=max(10 * max_visible, 80))
    try:
        result = sim.run()
    except BudgetExceeded:
        return None, scripted, wiring.victim
    return result, scripted, wiring.victim


def _masks_for(case) -> Dict[str, str]:
    if case.name == "otway-rees":
        return {"A": "B", "B": "S"}
    return {case.defended_agent: "B" if case.defended_agent == "A" else "A"}


def enumerate_attacks(case, kind: str, max_choices: int = 8,
                      seed: int = 0,
                      max_visible: int = 8) -> EnumerationReport:
    """Depth-first search over attacker choice sequences; every leaf is a
    complete run judged for an undetected deception."""
    report = EnumerationReport(runs=0, false_negatives=0)
    stack: List[Tuple[Tuple, ...]] = [()]
    explored: Set[Tuple] = set()
    while stack:
        prefix = stack.pop()
        if prefix in explored:
            continue
        explored.add(prefix)
        out = _run_with_choices(case, kind, prefix, seed, max_visible)
        result, scripted, victim = out
        if result is None:
            continue
        report.runs += 1
        outcome = evaluate(result, victim, True, case.success_extra)
        if outcome.false_negatives > 0:
            report.false_negatives += 1
            report.fn_witnesses.append((prefix, outcome.classification))
        elif outcome.interference_count > 0:
            report.deceptions_detected += 1
        if len(prefix) < max_choices and scripted.frontier:
            if len(result.trace.steps) <= max_visible:
                for option in scripted.frontier:
                    stack.append(prefix + (option,))
    return report
