"""ISO-SC 27 nonce handshake.

    (1) A -> B : N_A
    (2) B -> A : {|N_A, N_B|}K_AB
    (3) A -> B : N_B

Nothing in message (2) ties it to B, so a parallel-session reflection
lets an attacker use A as an oracle against herself.  The guardian sits
on A's side, records her outgoing messages and controls her incoming
ones; a critical message (first-message form) already present in the
dataset is a replay, the fake-nonce interference poisons the oracle and
A's flag is raised once both sessions have been played out.
"""

from __future__ import annotations

from ..agents import (AttackerAgent, AttackFunction, EraseStep, ExpectStep,
                      HonestAgent, InjectStep, PBind, PConst, PRef, PSymEnc,
                      RoleScript, SendStep, TConst, TFresh, TRef, TSymEnc,
                      plist, tlist)
from ..guardian import (Distinguisher, FakeSpec, Guardian, GuardianFilter,
                        InterferencePlan, InvariantSpec, Modify,
                        RaiseAbortFlag)
from ..knowledge import KnowledgeSet
from ..network import Slot
from ..terms import AgentId, SymKey
from ..topology import base_topology
from . import register
from .base import CaseStudy, Wiring

KEY_AB = SymKey(value=1001, label="K_AB")


def initiator_script(peer: str, key: SymKey = KEY_AB) -> RoleScript:
    return RoleScript(name="iso-init", steps=(
        SendStep(receiver=peer, body=TFresh("na", "nonce", "N_{agent}"), msg=1),
        ExpectStep(PSymEnc(plist(PRef("na"), PBind("nb", "nonce")),
                           PConst(key)), msg=2),
        SendStep(receiver=peer, body=TRef("nb"), msg=3),
    ))


def responder_script(peer: str, key: SymKey = KEY_AB) -> RoleScript:
    return RoleScript(name="iso-resp", steps=(
        ExpectStep(PBind("n", "nonce"), msg=1),
        SendStep(receiver=peer,
                 body=TSymEnc(tlist(TRef("n"),
                                    TFresh("n2", "nonce", "N_{agent}")),
                              TConst(key)), msg=2),
        ExpectStep(PRef("n2"), msg=3),
    ))


def classic_attack(victim: str = "A", mask: str = "B",
                   slots=((2, 1, 0), (1, 2, 0), (2, 3, 0))) -> AttackFunction:
    """The parallel-session reflection, step-indexed: erase then reflect
    each of the victim's messages.  `slots` places the three injections
    (session, msg, primes)."""
    s1, s2, s3 = (Slot(*s) for s in slots)
    return AttackFunction(name="iso-reflection", steps=(
        EraseStep(pattern=PBind("x1", "nonce"), from_agent=victim,
                  to_agent=mask, bind="n1"),
        InjectStep(body=TRef("n1"), claimed=mask, receiver=victim, slot=s1),
        EraseStep(pattern=PBind("x2", "symenc"), from_agent=victim,
                  to_agent=mask, bind="ct"),
        InjectStep(body=TRef("ct"), claimed=mask, receiver=victim, slot=s2),
        EraseStep(pattern=PBind("x3", "nonce"), from_agent=victim,
                  to_agent=mask, bind="n2"),
        InjectStep(body=TRef("n2"), claimed=mask, receiver=victim, slot=s3),
    ))


def make_attacker(name: str = "E", variant: str = "proceed",
                  awareness=None, slots=((2, 1, 0), (1, 2, 0), (2, 3, 0)),
                  seed_knowledge=()) -> AttackerAgent:
    ks = KnowledgeSet([AgentId("A"), AgentId("B"), *seed_knowledge])
    return AttackerAgent(name=name, interest=["A"],
                         function=classic_attack(slots=slots),
                         filters=("inflow", "outflow"), variant=variant,
                         awareness=awareness, knowledge=ks)


def make_guardian() -> Guardian:
    ident = Distinguisher("iso-id", rules=(
        PBind("x", "nonce"),
        PSymEnc(PBind("p", "any"), PBind("k", "any")),
    ))
    crit = Distinguisher("iso-crit", rules=(PBind("x", "nonce"),))
    plan = InterferencePlan(responses=(
        Modify(fake=FakeSpec(label="N_fake", kind="nonce"), mask="claimed"),
        RaiseAbortFlag(target="A", label="2.2", style="raise",
                       mode="deferred"),
    ))
    return Guardian(name="G",
                    filters=(GuardianFilter("outflow", "A", control=False),
                             GuardianFilter("inflow", "A", control=True)),
                    ident=ident, crit=crit,
                    invariant=InvariantSpec("replay-equality"), plan=plan)


def wire(kind=None, guardian=True, attack="classic", seed=0,
         nonce_bits=64) -> Wiring:
    kind = kind or "A"
    g = make_guardian() if guardian else None
    attackers = [make_attacker()] if attack else []
    topo = base_topology(kind, honest=("A", "B"),
                         attackers=[a.name for a in attackers] or ("E",),
                         guardian="G" if guardian else None)
    a = HonestAgent("A", responder_scripts=[responder_script("B")])
    b = HonestAgent("B", responder_scripts=[responder_script("A")])
    return Wiring(topology=topo, honest=[a, b], attackers=attackers,
                  guardian=g,
                  initiators=[("A", initiator_script("B"), 1)], victim="A")


CASE = register(CaseStudy(
    name="iso-sc-27",
    defended_agent="A",
    defense_class="Total",
    viable_topologies=("A",),
    failure_topologies=("B",),
    two_agent=True,
    attack_names=("classic",),
    fp_conditions=("role-reversal restart reusing a nonce already in the "
                   "guardian dataset (probability |D_G|/2^k)",),
    fn_conditions=(),
    message_count=3,
    wire=wire,
    attack_function_of=lambda name: classic_attack(),
    monitored_slots=(("A", "B"),),
))
