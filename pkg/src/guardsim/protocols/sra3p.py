"""Shamir-Rivest-Adleman three-pass protocol (commutative encryption).

    (1) A -> B : {M}[K_A]
    (2) B -> A : {M}[K_A,K_B]
    (3) A -> B : {M}[K_B]

Reflecting message (1) back at A as if it were (2) makes her strip her
own layer and ship the secret in the clear.  The guardian records A's
outgoing traffic; an incoming message identical to something already in
the dataset is the reflection, so the fake substitution leaves the
attacker with a wrong secret and A gets aborted.
"""

from __future__ import annotations

from ..agents import (AttackerAgent, AttackFunction, EraseStep, ExpectStep,
                      HonestAgent, InjectStep, PBind, RoleScript, SendStep,
                      TCommEnc, TCommStrip, TConst, TFresh, TRef)
from ..guardian import (Distinguisher, FakeSpec, Guardian, GuardianFilter,
                        InterferencePlan, InvariantSpec, Modify,
                        RaiseAbortFlag, SendFake)
from ..knowledge import KnowledgeSet, derivable
from ..network import Slot
from ..terms import AgentId, SymKey
from ..topology import base_topology
from . import register
from .base import CaseStudy, Wiring

KEY_A = SymKey(value=2001, label="K_A")
KEY_B = SymKey(value=2002, label="K_B")


def initiator_script(peer: str) -> RoleScript:
    return RoleScript(name="sra3p-init", steps=(
        SendStep(receiver=peer,
                 body=TCommEnc(TFresh("m", "atom", "M"), (TConst(KEY_A),)),
                 msg=1),
        ExpectStep(PBind("x", "any"), msg=2),
        SendStep(receiver=peer, body=TCommStrip("x", TConst(KEY_A)), msg=3),
    ))


def responder_script(peer: str) -> RoleScript:
    return RoleScript(name="sra3p-resp", steps=(
        ExpectStep(PBind("y", "commenc"), msg=1),
        SendStep(receiver=peer, body=TCommEnc(TRef("y"), (TConst(KEY_B),)),
                 msg=2),
        ExpectStep(PBind("z", "any"), msg=3),
    ))


def classic_attack() -> AttackFunction:
    return AttackFunction(name="sra3p-reflection", steps=(
        EraseStep(pattern=PBind("x1", "commenc"), from_agent="A",
                  to_agent="B", bind="c1"),
        InjectStep(body=TRef("c1"), claimed="B", receiver="A",
                   slot=Slot(1, 2)),
        EraseStep(pattern=PBind("x2", "any"), from_agent="A", to_agent="B",
                  bind="secret"),
    ))


def make_guardian() -> Guardian:
    ident = Distinguisher("sra3p-id", rules=(
        PBind("x", "commenc"), PBind("y", "leaf")))
    crit = Distinguisher("sra3p-crit", rules=(PBind("x", "commenc"),))
    plan = InterferencePlan(responses=(
        Modify(fake=FakeSpec(label="M_fake", kind="atom", binding="fake1"),
               mask="A"),
        SendFake(mask="A", receiver="B", template=None,
                 fake=FakeSpec(label="M'_fake", kind="atom", binding="fake2"),
                 label="3"),
        RaiseAbortFlag(target="A", label="3", style="abort",
                       mode="after_plan"),
    ))
    return Guardian(name="G",
                    filters=(GuardianFilter("outflow", "A", control=False),
                             GuardianFilter("inflow", "A", control=True)),
                    ident=ident, crit=crit,
                    invariant=InvariantSpec("replay-equality"), plan=plan)


def secret_leaked(result) -> bool:
    """The attack succeeds when the attacker can derive A's secret."""
    for agent in result.honest.values():
        if agent.name != "A":
            continue
        for sess in agent.sessions.values():
            m = sess.bindings.get("m")
            if m is not None:
                for att in result.attackers:
                    if derivable(att.knowledge, m):
                        return True
    return False


def wire(kind=None, guardian=True, attack="classic", seed=0,
         nonce_bits=64) -> Wiring:
    kind = kind or "A"
    g = make_guardian() if guardian else None
    attackers = []
    if attack:
        ks = KnowledgeSet([AgentId("A"), AgentId("B")])
        attackers = [AttackerAgent("E", interest=["A"],
                                   function=classic_attack(),
                                   variant="proceed", knowledge=ks)]
    topo = base_topology(kind, honest=("A", "B"), attackers=("E",),
                         guardian="G" if guardian else None)
    a = HonestAgent("A", responder_scripts=[])
    b = HonestAgent("B", responder_scripts=[responder_script("A")])
    return Wiring(topology=topo, honest=[a, b], attackers=attackers,
                  guardian=g,
                  initiators=[("A", initiator_script("B"), 1)], victim="A")


CASE = register(CaseStudy(
    name="sra3p",
    defended_agent="A",
    defense_class="Total",
    viable_topologies=("A",),
    failure_topologies=("B",),
    two_agent=True,
    attack_names=("classic",),
    fp_conditions=("an agent opens a run toward A with a layered message "
                   "already present in the guardian dataset",),
    fn_conditions=(),
    message_count=3,
    wire=wire,
    attack_function_of=lambda name: classic_attack(),
    monitored_slots=(("A", "B"),),
    success_extra=secret_leaked,
))
