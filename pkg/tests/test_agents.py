"""Spy rules, sender resolution, attack-function stepping and patterns."""

import pytest

from guardsim.agents import (PBind, PPair, PRef, PSucc, match,
                             reinterpret, plist)
from guardsim.network import Envelope, Slot, true_sender
from guardsim.protocols.iso_sc27 import classic_attack, make_attacker
from guardsim.terms import (AgentId, Atom, Nonce, Pair, Succ, SymEnc,
                            SymKey, succ)

K = SymKey(value=1, label="K_AB")
NA = Nonce(value=10, label="N_A")
NB = Nonce(value=11, label="N_B")


def make_env(claimed, body, receiver, true=None, injected=False, seq=1):
    return Envelope(seq=seq, claimed_sender=claimed, body=body,
                    receiver=receiver, true_sender=true or claimed,
                    slot=Slot(1, 1), injected=injected)


def test_true_sender_resolution():
    assert true_sender("B", "E", injected=True) == "E"
    assert true_sender("A", "A", injected=False) == "A"
    assert true_sender("A", "G", injected=True) == "G"


def test_inflow_spy_records_body_and_true_sender():
    e = make_attacker("E")
    env = make_env("B", SymEnc(Pair(NA, NB), K), "A", true="B")
    e.spy(env, "inflow")
    assert SymEnc(Pair(NA, NB), K) in e.knowledge
    assert AgentId("B") in e.knowledge


def test_inflow_spy_reveals_masquerading_rival():
    e = make_attacker("E", awareness={"E_2": "unsure"})
    env = make_env("B", NA, "A", true="E_2", injected=True)
    e.spy(env, "inflow")
    assert AgentId("E_2") in e.knowledge
    assert e.awareness["E_2"] == "dishonest"
    assert "E" in env.hesitated_by


def test_outflow_spy_records_body_and_receiver():
    e = make_attacker("E")
    env = make_env("A", NA, "B")
    e.spy(env, "outflow")
    assert NA in e.knowledge
    assert AgentId("B") in e.knowledge


def test_attack_step_table_rows():
    e = make_attacker("E")
    assert e.attack_step(NA, 1) == ("Erase", None)
    e.bindings["n1"] = NA
    kind, out = e.attack_step(NA, 2)
    assert kind == "Injection" and out == NA
    ct = SymEnc(Pair(NA, NB), K)
    assert e.attack_step(ct, 3) == ("Erase", None)
    e.bindings["ct"] = ct
    kind, out = e.attack_step(ct, 4)
    assert kind == "Injection" and out == ct
    assert e.attack_step(SymEnc(NA, K), 1) is None  # pattern mismatch


def test_steps_consumed_in_order():
    fn = classic_attack()
    kinds = [type(s).__name__ for s in fn.steps]
    assert kinds == ["EraseStep", "InjectStep"] * 3


def test_pattern_wire_level_value_checks():
    # a back-reference compares bits: a colliding key passes a nonce check
    bound = {"na": NA}
    assert match(PRef("na"), SymKey(value=10), bound) is not None
    assert match(PSucc(PRef("na"), 1), Nonce(value=11), bound) is not None
    assert match(PSucc(PRef("na"), 1), succ(NA, 1), bound) is not None
    assert match(PSucc(PRef("na"), 1), Nonce(value=12), bound) is None


def test_ppair_does_not_flatten():
    triple = Pair(NA, Pair(NB, Atom(value=5, label="x")))
    got = match(PPair(PBind("head", "nonce"), PBind("rest", "any")),
                triple, {})
    assert got is not None
    assert got["rest"] == Pair(NB, Atom(value=5))
    assert match(plist(PBind("a", "any"), PBind("b", "any")), triple, {}) is None


def test_reinterpret_names_junk_decryptions():
    fake = Atom(value=77, label="M_fake")
    out = reinterpret(fake)
    assert isinstance(out, Nonce)
    assert out.label == "N_fake"
    assert out.value == 77
