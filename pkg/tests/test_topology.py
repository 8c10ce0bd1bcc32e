"""Base topologies and the visibility function."""

import pytest

from guardsim.network import Envelope, Slot, can_see
from guardsim.terms import Nonce
from guardsim.topology import ConfigError, base_topology, shared_channel_topology

N = Nonce(value=1, label="N_A")


def env(claimed, receiver, true=None, injected=False, resilient=False):
    return Envelope(seq=1, claimed_sender=claimed, body=N, receiver=receiver,
                    true_sender=true or claimed, slot=Slot(1, 1),
                    injected=injected, resilient=resilient)


def test_kind_a_guardian_sees_all_of_a_traffic():
    topo = base_topology("A", honest=("A", "B"))
    assert can_see(topo, env("A", "B"), "G")
    assert can_see(topo, env("A", "B"), "E")
    # injected toward A from E crosses G
    assert can_see(topo, env("B", "A", true="E", injected=True), "G")


def test_kind_b_attacker_excludes_guardian():
    topo = base_topology("B", honest=("A", "B"))
    # E adjacent to A: his forgeries toward A never reach G's tap
    assert not can_see(topo, env("B", "A", true="E", injected=True), "G")
    assert can_see(topo, env("A", "B"), "G")  # honest traffic still crosses


def test_resilient_link_invisible():
    topo = base_topology("A", honest=("A", "B"))
    assert not can_see(topo, env("G", "A", resilient=True), "E")


def test_unknown_observer_rejected():
    topo = base_topology("A", honest=("A", "B"))
    with pytest.raises(ConfigError):
        can_see(topo, env("A", "B"), "Z")


def test_three_agent_kinds_station_layout():
    topo_c = base_topology("C")
    assert topo_c.guards_path("G", "A", "B")
    assert topo_c.guards_path("G", "A", "S")
    assert topo_c.guards_path("G", "B", "S")
    assert topo_c.guards_injection("G", "E", "A")
    assert not topo_c.guards_injection("G", "E", "B")

    topo_d = base_topology("D")
    assert topo_d.guards_injection("G", "E", "B")
    assert not topo_d.guards_injection("G", "E", "A")
    assert topo_d.sees_first("G", "S", "A")

    topo_e = base_topology("E")
    assert not topo_e.sees_first("G", "S", "A")  # E shades the server leg

    topo_f = base_topology("F")
    assert not topo_f.guards_path("G", "A", "S")


def test_co_located_rivals_see_each_others_injections():
    topo = shared_channel_topology(("A", "B"), ("E_1", "E_2"))
    forged = env("B", "A", true="E_1", injected=True)
    assert can_see(topo, forged, "E_2")
    forged2 = env("B", "A", true="E_2", injected=True)
    assert can_see(topo, forged2, "E_1")


def test_ordered_stations_shade_far_side():
    # kind A: E injecting toward B never crosses G (G sits on A's side)
    topo = base_topology("A", honest=("A", "B"))
    assert not can_see(topo, env("A", "B", true="E", injected=True), "G")
