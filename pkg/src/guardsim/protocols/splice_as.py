"""SPLICE/AS authentication with a key-distribution server.

    (1) A  -> AS : A,B,N_1
    (2) AS -> A  : AS,{AS,A,N_1,B,K_B}K_AS^-1
    (3) A  -> B  : A,B,{A,T,L,{N_2}K_B}K_A^-1
    (4) B  -> AS : B,A,N_3
    (5) AS -> B  : AS,{AS,B,N_3,A,K_A}K_AS^-1
    (6) B  -> A  : B,A,{B,N_2+1}K_A

The attacker re-signs A's challenge as his own, so B answers him and the
reply is re-encrypted for A.  The guardian proxies the server: a key
request about someone other than the agent who was just contacted is the
signature of that splice, and the windowed check bounds how far back
"just contacted" reaches.
"""

from __future__ import annotations

from ..agents import (AttackerAgent, AttackFunction, EraseStep, ExpectStep,
                      HonestAgent, InjectStep, ObserveStep, PAsymEnc, PBind,
                      PConst, PRef, PSucc, RoleScript, SendStep,
                      TAsymEnc, TConst, TFresh, TKeyLookup, TRef, TSucc,
                      plist, tlist)
from ..guardian import (Distinguisher, FakeSpec, Guardian, GuardianFilter,
                        InterferencePlan, Intercept, InvariantSpec,
                        ForwardCaptured, RaiseAbortFlag, SendFake)
from ..knowledge import KnowledgeSet
from ..network import Slot
from ..terms import AgentId, AsymKey, Lifetime, Timestamp
from ..topology import base_topology
from . import register
from .base import CaseStudy, Wiring

K_AS_PUB = AsymKey(pair_id=6001, private=False, label="K_AS")
K_AS_PRIV = AsymKey(pair_id=6001, private=True, label="K_AS")
K_A_PUB = AsymKey(pair_id=6002, private=False, label="K_A")
K_A_PRIV = AsymKey(pair_id=6002, private=True, label="K_A")
K_B_PUB = AsymKey(pair_id=6003, private=False, label="K_B")
K_B_PRIV = AsymKey(pair_id=6003, private=True, label="K_B")
K_E_PUB = AsymKey(pair_id=6004, private=False, label="K_E")
K_E_PRIV = AsymKey(pair_id=6004, private=True, label="K_E")
T0 = Timestamp(value=0, label="T")
L0 = Lifetime(value=0, label="L")
AID = {name: AgentId(name) for name in ("A", "B", "E", "AS")}

DIRECTORY = {"key_A": K_A_PUB, "key_B": K_B_PUB, "key_E": K_E_PUB}


def initiator_script(peer: str = "B") -> RoleScript:
    return RoleScript(name="splice-init", steps=(
        SendStep(receiver="AS",
                 body=tlist(TConst(AID["A"]), TConst(AID[peer]),
                            TFresh("n1", "nonce", "N_1")), msg=1),
        ExpectStep(plist(PConst(AID["AS"]),
                         PAsymEnc(plist(PConst(AID["AS"]), PConst(AID["A"]),
                                        PRef("n1"), PConst(AID[peer]),
                                        PBind("kb", "pubkey")),
                                  PConst(K_AS_PRIV))), msg=2),
        SendStep(receiver=peer,
                 body=tlist(TConst(AID["A"]), TConst(AID[peer]),
                            TAsymEnc(tlist(TConst(AID["A"]), TConst(T0),
                                           TConst(L0),
                                           TAsymEnc(TFresh("n2", "nonce",
                                                           "N_2"),
                                                    TRef("kb"))),
                                     TConst(K_A_PRIV))), msg=3),
        ExpectStep(plist(PConst(AID[peer]), PConst(AID["A"]),
                         PAsymEnc(plist(PConst(AID[peer]),
                                        PSucc(PRef("n2"), 1)),
                                  PConst(K_A_PUB))), msg=6),
    ))


def b_responder_script() -> RoleScript:
    return RoleScript(name="splice-b", steps=(
        ExpectStep(plist(PBind("x", "agent"), PConst(AID["B"]),
                         PAsymEnc(plist(PRef("x"), PBind("t", "any"),
                                        PBind("l", "any"),
                                        PAsymEnc(PBind("n2", "nonce"),
                                                 PConst(K_B_PUB))),
                                  PBind("sigkey", "any"))), msg=3),
        SendStep(receiver="AS",
                 body=tlist(TConst(AID["B"]), TRef("x"),
                            TFresh("n3", "nonce", "N_3")), msg=4),
        ExpectStep(plist(PConst(AID["AS"]),
                         PAsymEnc(plist(PConst(AID["AS"]), PConst(AID["B"]),
                                        PRef("n3"), PRef("x"),
                                        PBind("kx", "pubkey")),
                                  PConst(K_AS_PRIV))), msg=5),
        SendStep(receiver=TRef("x"),
                 body=tlist(TConst(AID["B"]), TRef("x"),
                            TAsymEnc(tlist(TConst(AID["B"]),
                                           TSucc(TRef("n2"), 1)),
                                     TRef("kx"))), msg=6),
    ))


def server_script() -> RoleScript:
    return RoleScript(name="splice-server",
                      initial_bindings=dict(DIRECTORY),
                      steps=(
        ExpectStep(plist(PBind("p", "agent"), PBind("q", "agent"),
                         PBind("n", "nonce")), msg=1),
        SendStep(receiver=TRef("p"),
                 body=tlist(TConst(AID["AS"]),
                            TAsymEnc(tlist(TConst(AID["AS"]), TRef("p"),
                                           TRef("n"), TRef("q"),
                                           TKeyLookup("q")),
                                     TConst(K_AS_PRIV))),
                 relative=True),
    ))


def classic_attack() -> AttackFunction:
    """Capture A's signed challenge, re-sign it as E, let B talk to the
    server about E, then re-target B's answer at A."""
    return AttackFunction(name="splice-resign", steps=(
        EraseStep(pattern=plist(PBind("a1", "agent"), PBind("b1", "agent"),
                                PAsymEnc(plist(PBind("a2", "agent"),
                                               PBind("t1", "any"),
                                               PBind("l1", "any"),
                                               PBind("ctn", "any")),
                                         PBind("ks", "any"))),
                  from_agent="A", to_agent="B", bind="m3"),
        InjectStep(body=tlist(TConst(AID["E"]), TConst(AID["B"]),
                              TAsymEnc(tlist(TConst(AID["E"]), TRef("t1"),
                                             TRef("l1"), TRef("ctn")),
                                       TConst(K_E_PRIV))),
                   claimed="E", receiver="B", slot=Slot(1, 3, 0, 1)),
        ObserveStep(bind="m6",
                    pattern=plist(PConst(AID["B"]), PConst(AID["E"]),
                                  PAsymEnc(plist(PConst(AID["B"]),
                                                 PBind("n2p", "any")),
                                           PConst(K_E_PUB))),
                    to_agent="E"),
        InjectStep(body=tlist(TConst(AID["B"]), TConst(AID["A"]),
                              TAsymEnc(tlist(TConst(AID["B"]), TRef("n2p")),
                                       TConst(K_A_PUB))),
                   claimed="E", receiver="A", slot=Slot(1, 6, 0, 1)),
    ))


def make_guardian(window: int = 16) -> Guardian:
    request = plist(PBind("p", "agent"), PBind("q", "agent"),
                    PBind("n", "nonce"))
    ident = Distinguisher("splice-id", rules=(request,))
    crit = Distinguisher("splice-crit", rules=(request,))
    plan = InterferencePlan(
        trigger_pattern=request,
        responses=(
            Intercept(),
            SendFake(mask="E", receiver="A",
                     template=tlist(TConst(AID["B"]), TConst(AID["A"]),
                                    TAsymEnc(tlist(TConst(AID["B"]),
                                                   TRef("fake1")),
                                             TConst(K_A_PUB))),
                     fake=FakeSpec(label="N_fake", kind="nonce",
                                   binding="fake1"),
                     label="5"),
            ForwardCaptured(mask="AS", receiver="AS", label="6"),
            RaiseAbortFlag(target="A", label="6", style="abort",
                           mode="after_plan"),
        ))
    return Guardian(name="G",
                    filters=(GuardianFilter("inflow", "AS", control=True),),
                    ident=ident, crit=crit,
                    invariant=InvariantSpec("cross-request-mismatch",
                                            params={"request_pattern": request}),
                    plan=plan, window=window)


def deceived_by_retarget(result) -> bool:
    """A completes believing B answered although the final hop was an
    attacker injection (masqueraded or sent under the attacker's own
    name)."""
    a = result.honest.get("A")
    if a is None:
        return False
    attacker_names = {att.name for att in result.attackers}
    for sess in a.sessions.values():
        if sess.status == "complete" and any(
                c.env.injected and c.env.true_sender in attacker_names
                for c in sess.consumed):
            return True
    return False


def wire(kind=None, guardian=True, attack="classic", seed=0,
         nonce_bits=64, window: int = 16) -> Wiring:
    kind = kind or "C"
    g = make_guardian(window=window) if guardian else None
    attackers = []
    if attack:
        ks = KnowledgeSet([AgentId("A"), AgentId("B"), AgentId("AS"),
                           AgentId("E"), K_E_PRIV, K_E_PUB, K_A_PUB,
                           K_B_PUB, K_AS_PUB])
        attackers = [AttackerAgent("E", interest=["A", "B", "AS", "E"],
                                   function=classic_attack(),
                                   variant="proceed", knowledge=ks)]
    topo = base_topology(kind, honest=("A", "B", "AS"), attackers=("E",),
                         guardian="G" if guardian else None)
    a = HonestAgent("A")
    b = HonestAgent("B", responder_scripts=[b_responder_script()])
    s = HonestAgent("AS", responder_scripts=[server_script()])
    return Wiring(topology=topo, honest=[a, b, s], attackers=attackers,
                  guardian=g,
                  initiators=[("A", initiator_script("B"), 1)], victim="A")


def _invert_resign(out):
    """Map the re-signed challenge back to A's original: the inner
    encrypted challenge survives verbatim; identities and T,L are
    public.  Recognition, not forgery: the map names the original term."""
    from ..terms import AsymEnc, pair, pair_items
    items = pair_items(out)
    inner = pair_items(items[2].payload)
    return pair(AID["A"], AID["B"],
                AsymEnc(pair(AID["A"], inner[1], inner[2], inner[3]),
                        K_A_PRIV))


def _invert_retarget(out):
    """Map the re-encrypted reply back to B's answer toward the attacker."""
    from ..terms import AsymEnc, pair, pair_items
    items = pair_items(out)
    inner = pair_items(items[2].payload)
    return pair(AID["B"], AID["E"],
                AsymEnc(pair(AID["B"], inner[1]), K_E_PUB))


def _inverse_samples():
    from ..terms import AsymEnc, Nonce, pair, succ
    n2 = Nonce(value=911, label="N_2")
    ctn = AsymEnc(n2, K_B_PUB)
    m3 = pair(AID["A"], AID["B"],
              AsymEnc(pair(AID["A"], T0, L0, ctn), K_A_PRIV))
    out3 = pair(AID["E"], AID["B"],
                AsymEnc(pair(AID["E"], T0, L0, ctn), K_E_PRIV))
    n2p = succ(n2, 1)
    m6 = pair(AID["B"], AID["E"], AsymEnc(pair(AID["B"], n2p), K_E_PUB))
    out6 = pair(AID["B"], AID["A"], AsymEnc(pair(AID["B"], n2p), K_A_PUB))
    return {2: (m3, out3), 4: (m6, out6)}


CASE = register(CaseStudy(
    name="splice-as",
    defended_agent="A",
    defense_class="Total",
    viable_topologies=("C",),
    failure_topologies=("E", "F"),
    conditional_topologies={"D": "can still raise A's abort flag"},
    two_agent=False,
    attack_names=("classic",),
    fp_conditions=("two agents contact B concurrently, so B's second key "
                   "request names someone other than the recorded peer",),
    fn_conditions=(),
    boundary_fn_notes=(
        "a key request arriving after the recorded contact has slid out "
        "of the temporal window",
        "the guardian's fake nonce collides with N_2+1",
    ),
    message_count=6,
    wire=wire,
    attack_function_of=lambda name: classic_attack(),
    monitored_slots=(("A", "AS"), ("B", "AS")),
    success_extra=deceived_by_retarget,
    inverse_table={2: _invert_resign, 4: _invert_retarget},
    inverse_samples=_inverse_samples(),
))
