"""Andrew Secure RPC handshake.

    (1) A -> B : A,{|N_A|}K_AB
    (2) B -> A : {|N_A+1,N_B|}K_AB
    (3) A -> B : {|N_B+1|}K_AB
    (4) B -> A : {|K'_AB,N'_B|}K_AB

Message (4) carries nothing tying it to this run, so replaying (2) as
(4) plants a predictable "session key" N_A+1.  The guardian controls A's
incoming traffic; a ciphertext repeated verbatim is the replay.  Replays
of messages from before the guardian existed are invisible to it --
that is the documented false-negative window that makes this defense
partial.
"""

from __future__ import annotations

from ..agents import (AttackerAgent, AttackFunction, EraseStep, ExpectStep,
                      HonestAgent, InjectStep, ObserveStep, PBind, PConst,
                      PRef, PSucc, PSymEnc, RoleScript, SendStep, TConst,
                      TFresh, TRef, TSucc, TSymEnc, plist, tlist)
from ..guardian import (Distinguisher, FakeSpec, Guardian, GuardianFilter,
                        InterferencePlan, InvariantSpec, Modify,
                        RaiseAbortFlag)
from ..knowledge import KnowledgeSet
from ..network import Slot
from ..terms import AgentId, Nonce, Pair, Succ, SymEnc, SymKey, Term
from ..topology import base_topology
from . import register
from .base import CaseStudy, Wiring

KEY_AB = SymKey(value=3001, label="K_AB")


def initiator_script(peer: str, pinned_nonce: Term = None) -> RoleScript:
    first = TConst(pinned_nonce) if pinned_nonce is not None else \
        TFresh("na", "nonce", "N_{agent}")
    na_pat = PConst(pinned_nonce) if pinned_nonce is not None else PRef("na")
    return RoleScript(name="andrew-init", steps=(
        SendStep(receiver=peer,
                 body=tlist(TConst(AgentId("A")), TSymEnc(first, TConst(KEY_AB))),
                 msg=1),
        ExpectStep(PSymEnc(plist(PSucc(na_pat, 1), PBind("nb", "nonce")),
                           PConst(KEY_AB)), msg=2),
        SendStep(receiver=peer,
                 body=TSymEnc(TSucc(TRef("nb"), 1), TConst(KEY_AB)), msg=3),
        ExpectStep(PSymEnc(plist(PBind("kab2", "any"), PBind("nb2", "nonce")),
                           PConst(KEY_AB)), msg=4),
    ))


def responder_script(peer: str, pinned=None) -> RoleScript:
    """pinned, for collision studies: (nb_term, key_value, nb2_value)."""
    if pinned:
        nb, key_val, nb2_val = pinned
        nb_t = TConst(nb)
        nb_pat = PConst(nb)
        key_t = TConst(SymKey(value=key_val, label="K'_AB"))
        nb2_t = TConst(Nonce(value=nb2_val, label="N'_B"))
    else:
        nb_t = TFresh("nb", "nonce", "N_{agent}")
        nb_pat = PRef("nb")
        key_t = TFresh("k2", "symkey", "K'_AB")
        nb2_t = TFresh("nb2", "nonce", "N_{agent}")
    return RoleScript(name="andrew-resp", steps=(
        ExpectStep(plist(PBind("aid", "agent"),
                         PSymEnc(PBind("n", "nonce"), PConst(KEY_AB))), msg=1),
        SendStep(receiver=peer,
                 body=TSymEnc(tlist(TSucc(TRef("n"), 1), nb_t),
                              TConst(KEY_AB)), msg=2),
        ExpectStep(PSymEnc(PSucc(nb_pat, 1), PConst(KEY_AB)), msg=3),
        SendStep(receiver=peer,
                 body=TSymEnc(tlist(key_t, nb2_t), TConst(KEY_AB)), msg=4),
    ))


def classic_attack() -> AttackFunction:
    """Attack trace 1: watch (2), suppress (3), replay (2) as (4)."""
    return AttackFunction(name="andrew-replay", steps=(
        ObserveStep(bind="ct2", pattern=PSymEnc(PBind("p", "any"),
                                                PConst(KEY_AB)),
                    from_agent="B", to_agent="A"),
        EraseStep(pattern=PBind("x", "symenc"), from_agent="A",
                  to_agent="B", bind="ct3"),
        InjectStep(body=TRef("ct2"), claimed="B", receiver="A",
                   slot=Slot(1, 4)),
    ))


def old_message_attack(old_ct: Term) -> AttackFunction:
    """Attack trace 2: replay a (4)-shaped ciphertext from an earlier
    epoch, unknown to the guardian."""
    return AttackFunction(name="andrew-old-replay", steps=(
        EraseStep(pattern=PBind("x", "symenc"), from_agent="A",
                  to_agent="B", bind="ct3"),
        InjectStep(body=TConst(old_ct), claimed="B", receiver="A",
                   slot=Slot(1, 4)),
    ))


def old_round_ciphertext(na_value: int = 77001, nb_value: int = 77002) -> Term:
    return SymEnc(Pair(Succ(Nonce(value=na_value, label="N_A^old"), 1),
                       Nonce(value=nb_value, label="N_B^old")), KEY_AB)


def make_guardian() -> Guardian:
    ident = Distinguisher("andrew-id", rules=(
        PSymEnc(PBind("p", "any"), PBind("k", "any")),))
    crit = Distinguisher("andrew-crit", rules=(
        PSymEnc(plist(PBind("a", "any"), PBind("b", "any")),
                PBind("k", "any")),))
    plan = InterferencePlan(responses=(
        Modify(fake=FakeSpec(label="M_fake", kind="atom", binding="fake1"),
               mask="A"),
        RaiseAbortFlag(target="A", label="4_1", style="abort",
                       mode="after_plan"),
    ))
    return Guardian(name="G",
                    filters=(GuardianFilter("inflow", "A", control=True),),
                    ident=ident, crit=crit,
                    invariant=InvariantSpec("replay-equality"), plan=plan)


def wire(kind=None, guardian=True, attack="classic", seed=0,
         nonce_bits=64) -> Wiring:
    kind = kind or "A"
    g = make_guardian() if guardian else None
    attackers = []
    if attack == "classic":
        fn = classic_attack()
        seed_terms = []
    elif attack == "old-replay":
        fn = old_message_attack(old_round_ciphertext())
        seed_terms = [old_round_ciphertext()]
    elif attack:
        raise KeyError(f"unknown andrew attack {attack!r}")
    if attack:
        ks = KnowledgeSet([AgentId("A"), AgentId("B"), *seed_terms])
        attackers = [AttackerAgent("E", interest=["A"], function=fn,
                                   variant="proceed", knowledge=ks)]
    topo = base_topology(kind, honest=("A", "B"), attackers=("E",),
                         guardian="G" if guardian else None)
    a = HonestAgent("A")
    b = HonestAgent("B", responder_scripts=[responder_script("A")])
    return Wiring(topology=topo, honest=[a, b], attackers=attackers,
                  guardian=g,
                  initiators=[("A", initiator_script("B"), 1)], victim="A")


CASE = register(CaseStudy(
    name="andrew-rpc",
    defended_agent="A",
    defense_class="Partial",
    viable_topologies=("A",),
    failure_topologies=("B",),
    two_agent=True,
    attack_names=("classic", "old-replay"),
    fp_conditions=(
        "a rerun reusing both old nonces reproduces message (2) verbatim",
        "a fresh message (4) whose key collides with N_A+1 and whose nonce "
        "repeats N_B",
    ),
    fn_conditions=(
        "a replay of a message (4) from before the guardian's dataset "
        "existed passes the invariant once",
    ),
    message_count=4,
    wire=wire,
    attack_function_of=lambda name: (classic_attack() if name == "classic"
                                     else old_message_attack(
                                         old_round_ciphertext())),
    monitored_slots=(("A", "B"),),
    registered=("classic",),
))
