"""Term construction, normalization, equality and rendering."""

import pytest

from guardsim.terms import (AgentId, AsymEnc, AsymKey, Atom, Nonce,
                            Pair, Password, Succ, SymEnc, SymKey,
                            TermError, comm_enc, comm_strip, inverse_key,
                            pair, pair_items, render, subterms, succ,
                            wire_eq, wire_view)

K = SymKey(value=1, label="K_AB")
NA = Nonce(value=10, label="N_A")
NB = Nonce(value=11, label="N_B")


def test_structural_equality_ignores_labels():
    assert Nonce(value=10, label="N_A") == Nonce(value=10, label="whatever")
    assert Nonce(value=10) != Nonce(value=11)
    assert SymKey(value=10) != Nonce(value=10)  # kinds stay distinct


def test_comm_enc_empty_keys_is_payload():
    assert comm_enc(NA, []) == NA


def test_comm_enc_merges_layers_commutatively():
    ka, kb = SymKey(value=2, label="K_A"), SymKey(value=3, label="K_B")
    nested = comm_enc(comm_enc(NA, [ka]), [kb])
    flat = comm_enc(NA, [kb, ka])
    assert nested == flat
    assert comm_strip(nested, ka) == comm_enc(NA, [kb])


def test_succ_normalization():
    assert succ(succ(NA, 2), 3) == succ(NA, 5)
    assert succ(NA, 0) == NA
    assert isinstance(succ(NA, 1), Succ)


def test_pair_chain_flattening():
    chain = pair(NA, NB, AgentId("A"))
    assert pair_items(chain) == [NA, NB, AgentId("A")]


def test_inverse_key():
    assert inverse_key(K) == K
    assert inverse_key(Password(value=5, label="P")) == Password(value=5)
    pub = AsymKey(pair_id=7, private=False, label="K_A")
    assert inverse_key(pub) == AsymKey(pair_id=7, private=True)
    assert inverse_key(inverse_key(pub)) == pub
    with pytest.raises(TermError):
        inverse_key(Pair(NA, NB))


def test_rendering_canonical_forms():
    assert render(SymEnc(pair(NA, NB), K)) == "{|N_A,N_B|}K_AB"
    assert render(AsymEnc(NA, AsymKey(pair_id=7, private=True, label="K_A"))) \
        == "{N_A}K_A^-1"
    ka, kb = SymKey(value=2, label="K_A"), SymKey(value=3, label="K_B")
    assert render(comm_enc(Atom(value=9, label="M"), [ka, kb])) == "{M}[K_A,K_B]"
    assert render(succ(NA, 1)) == "N_A+1"
    assert render(pair(AgentId("A"), AgentId("B"), NA)) == "A,B,N_A"


def test_rendering_left_nested_pairs_parenthesized():
    t = Pair(Pair(NA, NB), AgentId("A"))
    assert render(t) == "(N_A,N_B),A"


def test_wire_equality_collapses_leaf_kinds():
    # same bits, different symbolic kind: indistinguishable on the wire
    assert wire_eq(SymKey(value=11), succ(NA, 1))
    assert wire_eq(Nonce(value=11), NB)
    assert not wire_eq(NA, NB)
    assert not wire_eq(Pair(NA, NB), NA)
    # structure is preserved
    assert not wire_eq(SymEnc(NA, K), AsymEnc(NA, K))


def test_subterms_and_wire_view_stability():
    t = SymEnc(pair(NA, NB), K)
    subs = list(subterms(t))
    assert NA in subs and K in subs and t in subs
    assert wire_view(t) == wire_view(SymEnc(Pair(NA, NB), K))
