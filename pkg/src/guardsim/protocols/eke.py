"""Encrypted Key Exchange (password-encrypted ephemeral keys).

    (1) A -> B : {|K_A|}P
    (2) B -> A : {|{R}K_A|}P
    (3) A -> B : {|N_A|}R
    (4) B -> A : {|N_A,N_B|}R
    (5) A -> B : {|N_B|}R

The whole handshake reflects: an attacker without P can bounce every
message back at A in a parallel session.  The guardian records A's
outgoing session-key traffic and controls her incoming messages: a
nonce-challenge ciphertext she herself emitted coming back at her is the
reflection; the fake substitution breaks the oracle and both sessions
are allowed to finish before the abort flag goes up.
"""

from __future__ import annotations

from ..agents import (AttackerAgent, AttackFunction, EraseStep, ExpectStep,
                      HonestAgent, InjectStep, PAsymEnc, PBind, PConst,
                      PPair, PRef, PSymEnc, RoleScript, SendStep, TAsymEnc,
                      TConst, TDecryptPayload, TFresh, TRef, TSymEnc, tlist)
from ..guardian import (Distinguisher, FakeSpec, Guardian, GuardianFilter,
                        InterferencePlan, InvariantSpec, Modify,
                        RaiseAbortFlag)
from ..knowledge import KnowledgeSet
from ..network import Slot
from ..terms import AgentId, Password
from ..topology import base_topology
from . import register
from .base import CaseStudy, Wiring

PASSWORD = Password(value=5001, label="P")


def initiator_script(peer: str) -> RoleScript:
    return RoleScript(name="eke-init", steps=(
        SendStep(receiver=peer,
                 body=TSymEnc(TFresh("ka", "asymkey", "K_{agent}"),
                              TConst(PASSWORD)), msg=1),
        ExpectStep(PSymEnc(PAsymEnc(PBind("r", "key"), PRef("ka")),
                           PConst(PASSWORD)), msg=2),
        SendStep(receiver=peer,
                 body=TSymEnc(TFresh("na", "nonce", "N_{agent}"), TRef("r")),
                 msg=3),
        ExpectStep(PSymEnc(PPair(PRef("na"), PBind("nb", "nonce")),
                           PRef("r")), msg=4),
        SendStep(receiver=peer, body=TSymEnc(TRef("nb"), TRef("r")), msg=5),
    ))


def responder_script(peer: str) -> RoleScript:
    return RoleScript(name="eke-resp", steps=(
        ExpectStep(PSymEnc(PBind("ka", "pubkey"), PConst(PASSWORD)), msg=1),
        SendStep(receiver=peer,
                 body=TSymEnc(TAsymEnc(TFresh("r", "symkey", "R"),
                                       TRef("ka")), TConst(PASSWORD)),
                 msg=2),
        ExpectStep(PBind("x", "any"), msg=3),
        SendStep(receiver=peer,
                 body=TSymEnc(tlist(TDecryptPayload("x", TRef("r")),
                                    TFresh("nb", "nonce", "N_B")),
                              TRef("r")), msg=4),
        ExpectStep(PSymEnc(PRef("nb"), PRef("r")), msg=5),
    ))


def classic_attack() -> AttackFunction:
    """Reflect all five messages into a parallel session."""
    steps = []
    slots = [Slot(2, 1), Slot(1, 2), Slot(2, 3), Slot(1, 4), Slot(2, 5)]
    for i, slot in enumerate(slots, start=1):
        steps.append(EraseStep(pattern=PBind(f"x{i}", "symenc"),
                               from_agent="A", to_agent="B", bind=f"c{i}"))
        steps.append(InjectStep(body=TRef(f"c{i}"), claimed="B",
                                receiver="A", slot=slot))
    return AttackFunction(name="eke-reflection", steps=tuple(steps))


def make_guardian() -> Guardian:
    ident = Distinguisher("eke-id", rules=(
        PSymEnc(PBind("p", "any"), PBind("k", "any")),))
    crit = Distinguisher("eke-crit", rules=(
        PSymEnc(PBind("n", "nonce"), PBind("k", "any")),))
    plan = InterferencePlan(responses=(
        Modify(fake=FakeSpec(label="M_fake", kind="atom", binding="fake1"),
               mask="A"),
        RaiseAbortFlag(target="A", label="1.5", style="abort",
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
    attackers = []
    if attack:
        ks = KnowledgeSet([AgentId("A"), AgentId("B")])
        attackers = [AttackerAgent("E", interest=["A"],
                                   function=classic_attack(),
                                   variant="proceed", knowledge=ks)]
    topo = base_topology(kind, honest=("A", "B"), attackers=("E",),
                         guardian="G" if guardian else None)
    a = HonestAgent("A", responder_scripts=[responder_script("B")])
    b = HonestAgent("B", responder_scripts=[responder_script("A")])
    return Wiring(topology=topo, honest=[a, b], attackers=attackers,
                  guardian=g,
                  initiators=[("A", initiator_script("B"), 1)], victim="A")


CASE = register(CaseStudy(
    name="eke",
    defended_agent="A",
    defense_class="Total",
    viable_topologies=("A",),
    failure_topologies=("B",),
    two_agent=True,
    attack_names=("classic",),
    fp_conditions=("a benign challenge ciphertext colliding with one "
                   "already recorded under the same session key",),
    fn_conditions=(),
    message_count=5,
    wire=wire,
    attack_function_of=lambda name: classic_attack(),
    monitored_slots=(("A", "B"),),
))
