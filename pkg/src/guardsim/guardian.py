"""The benign dishonest agent: identification/control modules, attack
invariants, interference plans and the topological predicates.

The guardian spies like an attacker but defends: the Identification
module labels protocol messages in its dataset, the Control module runs
a criticality distinguisher and, on critical messages, an attack
invariant over the previously labelled dataset (optionally restricted to
a sliding window of recent revisions).  A hit triggers the interference
plan: modify the message in transit, stop it, send fakes, and raise the
defended agent's abort flag over the resilient channel.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .agents import (AttackFunction, EraseStep, InjectStep, ObserveStep,
                     match, TRef)
from .network import Envelope, Slot
from .terms import (Atom, Nonce, Term, render, wire_eq, wire_view,
                    subterms, SymEnc, AsymEnc, CommEnc)
from .topology import Topology


@dataclass
class Distinguisher:
    """Deterministic structural classifier: 1 iff any rule pattern
    matches.  An optional seeded error model flips results for FP/FN
    sensitivity experiments."""
    name: str
    rules: Sequence[object]
    fp_rate: float = 0.0
    fn_rate: float = 0.0
    rng: Optional[random.Random] = None

    def __call__(self, m: Term) -> int:
        hit = any(match(rule, m, {}) is not None for rule in self.rules)
        if self.rng is not None:
            if hit and self.fn_rate and self.rng.random() < self.fn_rate:
                return 0
            if not hit and self.fp_rate and self.rng.random() < self.fp_rate:
                return 1
        return 1 if hit else 0


@dataclass
class StoreEntry:
    term: Term
    labels: Set[str]
    first_rev: int
    last_rev: int
    sources: Set[Tuple[str, str]] = field(default_factory=set)


class GuardianStore:
    """D_G with 'P' / 'critical' label subsets; deduplicates by wire
    equality (the guardian compares bitstrings) and tracks revisions for
    the temporal window."""

    def __init__(self):
        self.entries: Dict[object, StoreEntry] = {}
        self.revision = 0

    def add(self, term: Term, labels: Set[str],
            source: Optional[Tuple[str, str]] = None) -> StoreEntry:
        self.revision += 1
        key = wire_view(term)
        entry = self.entries.get(key)
        if entry is None:
            entry = StoreEntry(term=term, labels=set(labels),
                               first_rev=self.revision,
                               last_rev=self.revision)
            self.entries[key] = entry
        else:
            entry.labels |= labels
            entry.last_rev = self.revision
        if source:
            entry.sources.add(source)
        return entry

    def snapshot(self) -> List[StoreEntry]:
        return [StoreEntry(e.term, set(e.labels), e.first_rev, e.last_rev,
                           set(e.sources))
                for e in self.entries.values()]

    def labeled_terms(self, label: str = "P") -> List[Term]:
        return [e.term for e in self.entries.values() if label in e.labels]


def _enc_components(term: Term) -> List[Term]:
    return [t for t in subterms(term)
            if isinstance(t, (SymEnc, AsymEnc, CommEnc))]


@dataclass
class InvariantSpec:
    """Named attack invariant Inv(m, i), evaluated read-only over the
    labelled dataset restricted to revisions before the current message
    (and inside the window when one is configured)."""
    name: str
    params: Dict[str, object] = field(default_factory=dict)

    def evaluate(self, m: Term, snapshot: List[StoreEntry],
                 delta_c: Distinguisher, window: Optional[int],
                 current_rev: int) -> int:
        visible = [e for e in snapshot if "P" in e.labels]
        if window is not None:
            visible = [e for e in visible if e.last_rev > current_rev - window]
        if self.name == "replay-equality":
            component = bool(self.params.get("component"))
            for e in visible:
                if not component:
                    if delta_c(e.term) == 1 and wire_eq(e.term, m):
                        return 1
                else:
                    m_parts = _enc_components(m) or [m]
                    prior = {wire_view(c) for c in _enc_components(e.term)}
                    prior.add(wire_view(e.term))
                    if any(wire_view(p) in prior for p in m_parts):
                        return 1
            return 0
        if self.name == "windowed-freshness":
            # An inbound critical message is an attack unless it was part
            # of something the watched source emitted within the window.
            source = self.params.get("source")
            for e in visible:
                if source and source not in e.sources:
                    continue
                parts = {wire_view(c) for c in _enc_components(e.term)}
                parts.add(wire_view(e.term))
                m_parts = _enc_components(m) or [m]
                if all(wire_view(p) in parts for p in m_parts):
                    return 0
            return 1
        if self.name == "cross-request-mismatch":
            req = self.params["request_pattern"]    # binds p, q
            got = match(req, m, {})
            if got is None:
                return 0
            p, q = got["p"], got["q"]
            for e in visible:
                prior = match(req, e.term, {})
                if prior is None or wire_eq(e.term, m):
                    continue
                # someone (prior p) asked about current requester p ...
                if prior["q"] == p and prior["p"] != q:
                    return 1
            return 0
        raise ValueError(f"unknown invariant {self.name!r}")


@dataclass
class FakeSpec:
    label: str = "N_fake"
    kind: str = "nonce"       # nonce | atom
    binding: str = "fake"


@dataclass
class Modify:
    """Replace the captured message in transit with a fake."""
    fake: FakeSpec = field(default_factory=FakeSpec)
    mask: str = "claimed"     # claimed sender, or an explicit identity
    template: Optional[object] = None   # defaults to the bare fake value


@dataclass
class StopMessage:
    """Take the message off the wire and say so in the trace."""


@dataclass
class Intercept:
    """Take the message off the wire silently (hold for forwarding)."""


@dataclass
class SendFake:
    mask: str
    receiver: str             # agent name, or "trigger_receiver"
    template: object          # may reference trigger bindings and fakes
    label: Optional[str] = None
    fake: Optional[FakeSpec] = None


@dataclass
class ForwardCaptured:
    """Re-send the captured body onward (delayed forward)."""
    mask: str
    receiver: str
    label: Optional[str] = None


@dataclass
class RaiseAbortFlag:
    target: str
    label: str
    style: str = "abort"      # "abort" -> "X aborts", "raise" -> flag text
    mode: str = "after_plan"  # or "deferred" (fires at quiescence)


@dataclass
class InterferencePlan:
    responses: Sequence[object]
    trigger_pattern: Optional[object] = None   # binds names from the capture


@dataclass
class GuardianFilter:
    direction: str            # "inflow" | "outflow"
    target: str
    control: bool = False


@dataclass
class ModuleLogRow:
    seq: Optional[int]
    ident: Optional[int]
    crit: Optional[int]
    inv: Optional[int]
    dataset: Tuple[Term, ...]


class Guardian:
    """Runtime guardian bound to one simulation."""

    def __init__(self, name: str, filters: Sequence[GuardianFilter],
                 ident: Distinguisher, crit: Distinguisher,
                 invariant: InvariantSpec, plan: InterferencePlan,
                 window: Optional[int] = None,
                 rng: Optional[random.Random] = None,
                 fake_bits: int = 64):
        self.name = name
        self.filters = list(filters)
        self.ident = ident
        self.crit = crit
        self.invariant = invariant
        self.plan = plan
        self.window = window
        self.rng = rng or random.Random(0)
        self.fake_bits = fake_bits
        # False when the topology hides the legs this invariant judges
        # by: the guardian then cannot characterize attacks and forwards.
        self.invariant_operative = True
        self.store = GuardianStore()
        self.module_log: List[ModuleLogRow] = []
        self.ident_fsm_log: List[str] = []
        self.control_fsm_log: List[str] = []
        self.pending: List[object] = []      # queued concrete actions
        self.deferred_abort: Optional[Tuple[RaiseAbortFlag, Dict]] = None
        self.interference_count = 0
        self.fake_value_override: Optional[int] = None
        self.plan_envelopes: List[int] = []  # seqs of own injected fakes

    # -- spy path --

    def matching_filters(self, env: Envelope) -> List[GuardianFilter]:
        out = []
        for f in self.filters:
            if f.direction == "inflow" and env.receiver == f.target:
                out.append(f)
            elif f.direction == "outflow" and env.true_sender == f.target:
                out.append(f)
        return out

    def process(self, env: Envelope) -> bool:
        """Run the modules on a spied envelope; True iff interference was
        queued for it."""
        filters = self.matching_filters(env)
        if not filters:
            return False
        m = env.body
        snapshot = self.store.snapshot()
        current_rev = self.store.revision + 1
        ident_val = self.ident(m)
        self.ident_fsm_log.extend(
            ["delta", "lambda" if ident_val else "phi", "delta"])
        labels = {"P"} if ident_val else set()
        direction = filters[0].direction
        self.store.add(m, labels, source=(direction, filters[0].target))

        crit_val = None
        inv_val = None
        fired = False
        if any(f.control for f in filters) and ident_val:
            crit_val = self.crit(m)
            self.control_fsm_log.append("delta")
            if crit_val:
                self.control_fsm_log.append("iota")
                self.store.entries[wire_view(m)].labels.add("critical")
                inv_val = self.invariant.evaluate(
                    m, snapshot, self.crit, self.window,
                    current_rev) if self.invariant_operative else 0
                if inv_val:
                    self.control_fsm_log.append("rho")
                    self._queue_plan(env)
                    fired = True
                else:
                    self.control_fsm_log.append("phi")
            else:
                self.control_fsm_log.append("phi")
            self.control_fsm_log.append("delta")
        self.module_log.append(ModuleLogRow(
            seq=env.seq, ident=ident_val, crit=crit_val, inv=inv_val,
            dataset=tuple(self.store.labeled_terms("P"))))
        return fired

    def record_own(self, term: Term, seq: int) -> None:
        """Own fakes enter D_G labelled, with no module run."""
        self.store.add(term, {"P"}, source=("own", self.name))
        self.module_log.append(ModuleLogRow(
            seq=seq, ident=None, crit=None, inv=None,
            dataset=tuple(self.store.labeled_terms("P"))))

    # -- interference --

    def mint_fake(self, spec: FakeSpec) -> Term:
        taken = {wire_view(e.term) for e in self.store.entries.values()}
        while True:
            if self.fake_value_override is not None:
                value = self.fake_value_override
                self.fake_value_override = None
            else:
                value = self.rng.getrandbits(self.fake_bits)
            term = (Nonce(value=value, width=self.fake_bits, label=spec.label)
                    if spec.kind == "nonce"
                    else Atom(value=value, label=spec.label))
            if wire_view(term) not in taken:
                return term

    def _queue_plan(self, env: Envelope) -> None:
        """Expand the interference plan into atomic queue items bound to
        the captured envelope."""
        self.interference_count += 1
        bindings: Dict[str, Term] = {"captured": env.body}
        if self.plan.trigger_pattern is not None:
            got = match(self.plan.trigger_pattern, env.body, {})
            if got is None:
                raise ValueError(
                    f"interference plan pattern does not match {render(env.body)}")
            bindings.update(got)
        for resp in self.plan.responses:
            if isinstance(resp, Modify):
                mask = env.claimed_sender if resp.mask == "claimed" else resp.mask
                sub_slot = Slot(env.slot.session, env.slot.msg,
                                env.slot.primes, env.slot.sub + 1)
                self.pending.append(("capture", {"env": env}))
                self.pending.append(("inject", {
                    "mask": mask, "receiver": env.receiver, "slot": sub_slot,
                    "template": resp.template, "fakes": (resp.fake,),
                    "bindings": bindings}))
            elif isinstance(resp, StopMessage):
                self.pending.append(("capture", {"env": env, "stop": True}))
            elif isinstance(resp, Intercept):
                self.pending.append(("capture", {"env": env}))
            elif isinstance(resp, SendFake):
                receiver = (env.receiver if resp.receiver == "trigger_receiver"
                            else resp.receiver)
                self.pending.append(("inject", {
                    "mask": resp.mask, "receiver": receiver,
                    "slot": parse_label_slot(resp.label, env.slot),
                    "template": resp.template,
                    "fakes": (resp.fake,) if resp.fake else (),
                    "bindings": bindings}))
            elif isinstance(resp, ForwardCaptured):
                self.pending.append(("inject", {
                    "mask": resp.mask, "receiver": resp.receiver,
                    "slot": parse_label_slot(resp.label, env.slot),
                    "template": TRef("captured"), "fakes": (),
                    "bindings": bindings}))
            elif isinstance(resp, RaiseAbortFlag):
                if resp.mode == "deferred":
                    self.deferred_abort = (resp, {"env": env})
                else:
                    self.pending.append(("abort", resp))
            else:
                raise ValueError(f"unknown interference response {resp!r}")


def parse_label_slot(label: Optional[str], parent: Slot) -> Slot:
    """A response label like '5' or '4_1' becomes a Slot; None derives the
    parent slot's next subscript."""
    if label is None:
        return Slot(parent.session, parent.msg, parent.primes, parent.sub + 1)
    body, _, sub = label.partition("_")
    session, _, msg = body.rpartition(".")
    return Slot(int(session) if session else parent.session, int(msg),
                0, int(sub) if sub else 0)


# -- topological predicates -------------------------------------------------

def topological_advantage(topology: Topology, guardian: str, defended: str,
                          monitored_slots: Sequence[Tuple[str, str]],
                          attackers: Sequence[str]) -> bool:
    """True iff the guardian sees every monitored protocol leg and every
    forgery an attacker can aim at the defended agent.

    `monitored_slots` are the (sender, receiver) legs the guardian's
    invariant depends on; the masquerade clauses reduce to: all injection
    paths toward the defended agent cross the guardian."""
    if defended not in topology.vertices:
        raise ValueError(f"defended agent {defended!r} not in topology")
    for p, q in monitored_slots:
        if not topology.guards_path(guardian, p, q):
            return False
    for e in attackers:
        if not topology.can_reach(e, defended):
            continue
        if not topology.guards_injection(guardian, e, defended):
            return False
    return True


def verify_inverse(attack: AttackFunction,
                   inverse_table: Optional[Dict[int, Callable[[Term], Term]]] = None,
                   samples: Optional[Dict[int, Tuple[Term, Term]]] = None):
    """Mechanical Theorem-1 checklist over the attack table: every
    injection step must have a known inverse recovering the original.

    Replay injections (body is a direct reference to a captured message)
    are self-inverse.  Returns True / False / "unknown"."""
    inverse_table = inverse_table or {}
    captured = set()
    ok = True
    for idx, step in enumerate(attack.steps, start=1):
        if isinstance(step, (EraseStep, ObserveStep)) and step.bind:
            captured.add(step.bind)
        if isinstance(step, InjectStep):
            if isinstance(step.body, TRef) and step.body.name in captured:
                continue  # identity inverse: f^-1(f(m,s),s) = m
            fn = inverse_table.get(idx)
            if fn is None:
                return "unknown"
            if samples and idx in samples:
                m, out = samples[idx]
                ok = ok and fn(out) == m
    return ok


def is_defense_mechanism(topology: Topology, guardian: str, defended: str,
                         monitored_slots: Sequence[Tuple[str, str]],
                         attackers: Sequence[str], attack: AttackFunction,
                         inverse_table=None, samples=None):
    """Theorem 1 reading: topological advantage plus an invertible attack
    function make the guardian a defense mechanism.  Returns True, False
    or "inverse unknown"."""
    inv = verify_inverse(attack, inverse_table, samples)
    if inv == "unknown":
        return "inverse unknown"
    if not inv:
        return False
    return topological_advantage(topology, guardian, defended,
                                 monitored_slots, attackers)
