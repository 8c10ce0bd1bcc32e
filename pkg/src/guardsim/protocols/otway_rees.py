"""Otway-Rees key distribution.

    (1) A -> B : I,A,B,{|N_A,I,A,B|}K_AS
    (2) B -> S : I,A,B,{|N_A,I,A,B|}K_AS,{|N_B,I,A,B|}K_BS
    (3) S -> B : I,{|N_A,K_AB|}K_AS,{|N_B,K_AB|}K_BS
    (4) B -> A : I,{|N_A,K_AB|}K_AS

A type flaw: the ciphertext from (1) parses as a (4)-ciphertext whose
"key" is the triple I,A,B.  The attacker replays it (directly, or via B
by masquerading as the server), so the guardian watches what A emits in
(1)-form and controls her incoming (4)s for reused ciphertext
components.
"""

from __future__ import annotations

from ..agents import (AttackerAgent, AttackFunction, EraseStep, ExpectStep,
                      HonestAgent, InjectStep, PBind, PConst, PPair, PRef,
                      PSymEnc, RoleScript, SendStep, TConst, TFresh,
                      TRef, TSymEnc, plist, tlist)
from ..guardian import (Distinguisher, FakeSpec, Guardian, GuardianFilter,
                        InterferencePlan, InvariantSpec, Modify,
                        RaiseAbortFlag)
from ..knowledge import KnowledgeSet
from ..network import Slot
from ..terms import AgentId, SymEnc, SymKey
from ..topology import base_topology
from . import register
from .base import CaseStudy, Wiring

KEY_AS = SymKey(value=4001, label="K_AS")
KEY_BS = SymKey(value=4002, label="K_BS")
A_ID, B_ID = AgentId("A"), AgentId("B")


def initiator_script(peer: str) -> RoleScript:
    return RoleScript(name="otway-init", steps=(
        SendStep(receiver=peer,
                 body=tlist(TFresh("i", "atom", "I"), TConst(A_ID),
                            TConst(B_ID),
                            TSymEnc(tlist(TFresh("na", "nonce", "N_{agent}"),
                                          TRef("i"), TConst(A_ID),
                                          TConst(B_ID)),
                                    TConst(KEY_AS))), msg=1),
        ExpectStep(plist(PRef("i"),
                         PSymEnc(PPair(PRef("na"), PBind("kab", "any")),
                                 PConst(KEY_AS))), msg=4),
    ))


def b_responder_script() -> RoleScript:
    return RoleScript(name="otway-b", steps=(
        ExpectStep(plist(PBind("i", "nonce"), PBind("a", "agent"),
                         PBind("b", "agent"), PBind("cta", "symenc")), msg=1),
        SendStep(receiver="S",
                 body=tlist(TRef("i"), TRef("a"), TRef("b"), TRef("cta"),
                            TSymEnc(tlist(TFresh("nb", "nonce", "N_{agent}"),
                                          TRef("i"), TRef("a"), TRef("b")),
                                    TConst(KEY_BS))), msg=2),
        ExpectStep(plist(PRef("i"), PBind("ctx", "symenc"),
                         PSymEnc(PPair(PRef("nb"), PBind("kab", "any")),
                                 PConst(KEY_BS))), msg=3),
        SendStep(receiver=TRef("a"), body=tlist(TRef("i"), TRef("ctx")),
                 msg=4),
    ))


def server_script() -> RoleScript:
    return RoleScript(name="otway-server", steps=(
        ExpectStep(plist(PBind("i", "nonce"), PBind("a", "agent"),
                         PBind("b", "agent"),
                         PSymEnc(plist(PBind("na", "nonce"), PRef("i"),
                                       PRef("a"), PRef("b")), PConst(KEY_AS)),
                         PSymEnc(plist(PBind("nb", "nonce"), PRef("i"),
                                       PRef("a"), PRef("b")), PConst(KEY_BS))),
                   msg=2),
        SendStep(receiver=TRef("b"),
                 body=tlist(TRef("i"),
                            TSymEnc(tlist(TRef("na"),
                                          TFresh("kab", "symkey", "K_AB")),
                                    TConst(KEY_AS)),
                            TSymEnc(tlist(TRef("nb"), TRef("kab")),
                                    TConst(KEY_BS))), msg=3),
    ))


def attack_trace_1() -> AttackFunction:
    """Suppress (1), replay its ciphertext straight back as (4)."""
    return AttackFunction(name="otway-type-flaw-direct", steps=(
        EraseStep(pattern=plist(PBind("i1", "nonce"), PBind("a1", "agent"),
                                PBind("b1", "agent"), PBind("ct1", "symenc")),
                  from_agent="A", to_agent="B", bind="m1"),
        InjectStep(body=tlist(TRef("i1"), TRef("ct1")), claimed="B",
                   receiver="A", slot=Slot(1, 4)),
    ))


def attack_trace_2() -> AttackFunction:
    """Masquerade as the server: echo B's request material back as (3)."""
    return AttackFunction(name="otway-type-flaw-via-b", steps=(
        EraseStep(pattern=plist(PBind("i2", "nonce"), PBind("a2", "agent"),
                                PBind("b2", "agent"), PBind("cta", "symenc"),
                                PBind("ctb", "symenc")),
                  from_agent="B", to_agent="S", bind="m2"),
        InjectStep(body=tlist(TRef("i2"), TRef("cta"), TRef("ctb")),
                   claimed="S", receiver="B", slot=Slot(1, 3)),
    ))


ATTACKS = {"trace-1": attack_trace_1, "trace-2": attack_trace_2}


def key_compromised(result) -> bool:
    """A's accepted session key must be a proper fresh key; anything else
    (the type-flawed agent triple, or attacker-derivable material) is a
    compromise even when the last hop came from an honest peer."""
    from ..knowledge import derivable
    a = result.honest.get("A")
    if a is None:
        return False
    for sess in a.sessions.values():
        if sess.status != "complete":
            continue
        kab = sess.bindings.get("kab")
        if kab is None:
            continue
        if not isinstance(kab, SymKey):
            return True
        if any(derivable(att.knowledge, kab) for att in result.attackers):
            return True
    return False


def make_guardian() -> Guardian:
    ident = Distinguisher("otway-id", rules=(
        plist(PBind("i", "nonce"), PBind("a", "agent"), PBind("b", "agent"),
              PBind("ct", "symenc")),
        plist(PBind("i", "nonce"), PBind("ct", "symenc")),
    ))
    crit = Distinguisher("otway-crit", rules=(
        plist(PBind("i", "nonce"), PBind("ct", "symenc")),))
    plan = InterferencePlan(
        trigger_pattern=plist(PBind("i", "nonce"), PBind("ct", "symenc")),
        responses=(
            Modify(fake=FakeSpec(label="M_fake", kind="atom",
                                 binding="fake1"),
                   mask="A",
                   template=tlist(TRef("i"), TRef("fake1"))),
            RaiseAbortFlag(target="A", label="4_1", style="abort",
                           mode="after_plan"),
        ))
    return Guardian(name="G",
                    filters=(GuardianFilter("outflow", "A", control=False),
                             GuardianFilter("inflow", "A", control=True)),
                    ident=ident, crit=crit,
                    invariant=InvariantSpec("replay-equality",
                                            params={"component": True}),
                    plan=plan)


def wire(kind=None, guardian=True, attack="trace-1", seed=0,
         nonce_bits=64) -> Wiring:
    kind = kind or "C"
    if attack == "classic":
        attack = "trace-1"
    g = make_guardian() if guardian else None
    attackers = []
    if attack:
        ks = KnowledgeSet([AgentId("A"), AgentId("B"), AgentId("S")])
        attackers = [AttackerAgent("E", interest=["A", "B", "S"],
                                   function=ATTACKS[attack](),
                                   variant="proceed", knowledge=ks)]
    topo = base_topology(kind, honest=("A", "B", "S"), attackers=("E",),
                         guardian="G" if guardian else None)
    a = HonestAgent("A")
    b = HonestAgent("B", responder_scripts=[b_responder_script()])
    s = HonestAgent("S", responder_scripts=[server_script()])
    return Wiring(topology=topo, honest=[a, b, s], attackers=attackers,
                  guardian=g,
                  initiators=[("A", initiator_script("B"), 1)], victim="A")


def _invert_direct(out):
    """Recover the suppressed (1) from the replayed (4): the ciphertext is
    verbatim and the cleartext agent names are public."""
    from ..terms import pair, pair_items
    items = pair_items(out)
    return pair(items[0], A_ID, B_ID, items[1])


def _inverse_sample():
    from ..terms import Nonce, Pair, pair
    i0 = Nonce(value=901, label="I")
    ct0 = SymEnc(pair(Nonce(value=902, label="N_A"), i0, A_ID, B_ID), KEY_AS)
    m0 = pair(i0, A_ID, B_ID, ct0)
    out0 = pair(i0, ct0)
    return m0, out0


CASE = register(CaseStudy(
    name="otway-rees",
    defended_agent="A",
    defense_class="Total",
    viable_topologies=("C", "E"),
    failure_topologies=(),
    conditional_topologies={
        "D": "defends A only against the server-masquerade variant",
        "F": "defends A only against the server-masquerade variant"},
    two_agent=False,
    attack_names=("trace-1", "trace-2"),
    fp_conditions=("the server mints a session key whose bits equal the "
                   "encoded I,A,B triple",),
    fn_conditions=(),
    message_count=4,
    wire=wire,
    attack_function_of=lambda name: ATTACKS[name](),
    monitored_slots=(("A", "B"),),
    success_extra=key_compromised,
    inverse_table={2: _invert_direct},
    inverse_samples={2: _inverse_sample()},
))
