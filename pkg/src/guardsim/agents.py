"""Protocol role machines and attackers.

Honest agents run scripted roles: alternating expect/send steps over a
small pattern and template language.  They accept any well-typed body
matching the expected pattern -- that looseness is what lets an attacker
use an agent as an oracle in parallel-session attacks, and type flaws are
modelled as loose bindings.

Attackers spy a selection of the traffic (inflow/outflow filters per
target), run a step-indexed attack function, may masquerade, and react
to rival attackers according to their awareness of them: a naive rival
is shadowed (identical intents merge), a known-dishonest rival's forged
traffic is taken off the wire, an uncertain rival gets one free move.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .knowledge import KnowledgeSet
from .network import Envelope, Erase, Inject, Send, Slot
from .terms import (AgentId, Atom, AsymEnc, AsymKey, CommEnc, Nonce,
                    Pair, Succ, SymEnc, SymKey, Term, comm_enc, comm_strip,
                    inverse_key, pair, pair_items, succ, wire_eq,
                    KEY_TYPES, LEAF_TYPES)


# -- patterns ---------------------------------------------------------------

KIND_CHECKS: Dict[str, Callable[[Term], bool]] = {
    "any": lambda t: True,
    "nonce": lambda t: isinstance(t, (Nonce, Atom)),
    "key": lambda t: isinstance(t, KEY_TYPES),
    "pubkey": lambda t: isinstance(t, AsymKey) and not t.private,
    "agent": lambda t: isinstance(t, AgentId),
    "leaf": lambda t: isinstance(t, LEAF_TYPES),
    "symenc": lambda t: isinstance(t, SymEnc),
    "commenc": lambda t: isinstance(t, CommEnc),
}


@dataclass(frozen=True)
class PConst:
    term: Term


@dataclass(frozen=True)
class PRef:
    name: str


@dataclass(frozen=True)
class PBind:
    name: str
    kind: str = "any"


@dataclass(frozen=True)
class PList:
    items: Tuple[object, ...]


@dataclass(frozen=True)
class PPair:
    """One exact Pair node: left/right without chain flattening (how an
    agent misparses a longer message -- the type-flaw hook)."""
    left: object
    right: object


@dataclass(frozen=True)
class PSymEnc:
    payload: object
    key: object


@dataclass(frozen=True)
class PAsymEnc:
    payload: object
    key: object


@dataclass(frozen=True)
class PCommEnc:
    payload: object
    keys: Tuple[object, ...]


@dataclass(frozen=True)
class PSucc:
    base: object
    offset: int


def plist(*items) -> PList:
    return PList(tuple(items))


def match(pattern, term: Term, bindings: Dict[str, Term]) -> Optional[Dict[str, Term]]:
    """Match `term` against `pattern`, extending a copy of `bindings`;
    None on mismatch.  Value comparisons (constants, back-references,
    successor checks) are wire-level -- agents compare received bits, so
    a colliding value passes even if its symbolic kind differs."""
    if isinstance(pattern, PConst):
        return dict(bindings) if wire_eq(term, pattern.term) else None
    if isinstance(pattern, PRef):
        bound = bindings.get(pattern.name)
        return dict(bindings) if bound is not None and wire_eq(term, bound) \
            else None
    if isinstance(pattern, PBind):
        if not KIND_CHECKS[pattern.kind](term):
            return None
        out = dict(bindings)
        out[pattern.name] = term
        return out
    if isinstance(pattern, PList):
        items = pair_items(term)
        if len(items) != len(pattern.items):
            return None
        out = dict(bindings)
        for pat, sub in zip(pattern.items, items):
            nxt = match(pat, sub, out)
            if nxt is None:
                return None
            out = nxt
        return out
    if isinstance(pattern, PPair):
        if not isinstance(term, Pair):
            return None
        out = match(pattern.left, term.left, bindings)
        if out is None:
            return None
        return match(pattern.right, term.right, out)
    if isinstance(pattern, PSymEnc):
        if not isinstance(term, SymEnc):
            return None
        out = match(pattern.key, term.key, bindings)
        if out is None:
            return None
        return match(pattern.payload, term.payload, out)
    if isinstance(pattern, PAsymEnc):
        if not isinstance(term, AsymEnc):
            return None
        out = match(pattern.key, term.key, bindings)
        if out is None:
            return None
        return match(pattern.payload, term.payload, out)
    if isinstance(pattern, PCommEnc):
        if not isinstance(term, CommEnc) or len(term.keys) != len(pattern.keys):
            return None
        out = bindings
        for pat, k in zip(pattern.keys, term.keys):
            out = match(pat, k, out)
            if out is None:
                return None
        return match(pattern.payload, term.payload, out)
    if isinstance(pattern, PSucc):
        if isinstance(term, Succ) and term.offset == pattern.offset:
            return match(pattern.base, term.base, bindings)
        # wire fallback: a bare value equal to base+offset passes the
        # increment check (bits are bits)
        expected = None
        if isinstance(pattern.base, PRef):
            expected = bindings.get(pattern.base.name)
        elif isinstance(pattern.base, PConst):
            expected = pattern.base.term
        if expected is not None and wire_eq(term, succ(expected, pattern.offset)):
            return dict(bindings)
        return None
    raise TypeError(f"not a pattern: {pattern!r}")


# -- templates --------------------------------------------------------------

@dataclass(frozen=True)
class TConst:
    term: Term


@dataclass(frozen=True)
class TRef:
    name: str


@dataclass(frozen=True)
class TFresh:
    """A fresh value minted at instantiation time.

    `label` may contain {agent}; a repeated label for the same scenario
    gains prime marks (N_A, N'_A, ...)."""
    binding: str
    kind: str = "nonce"       # nonce | symkey | asymkey | atom
    label: str = "N_{agent}"


@dataclass(frozen=True)
class TList:
    items: Tuple[object, ...]


@dataclass(frozen=True)
class TSymEnc:
    payload: object
    key: object


@dataclass(frozen=True)
class TAsymEnc:
    payload: object
    key: object


@dataclass(frozen=True)
class TCommEnc:
    payload: object
    keys: Tuple[object, ...]


@dataclass(frozen=True)
class TSucc:
    base: object
    offset: int


@dataclass(frozen=True)
class TCommStrip:
    """Remove this agent's commutative layer from a bound term; a body
    without such a layer is passed through reinterpreted (type-tolerant)."""
    source: str
    key: object


@dataclass(frozen=True)
class TDecryptPayload:
    """Loose decryption: if the bound term is an encryption under `key`
    (or its inverse), the payload; otherwise the raw bits reinterpreted
    as a fresh-looking value (renders M_fake -> N_fake)."""
    source: str
    key: object


@dataclass(frozen=True)
class TKeyLookup:
    """Directory lookup: the term bound as key_<agent-name> in the
    script's initial bindings (trusted parties hold key tables)."""
    agent_ref: str


def tlist(*items) -> TList:
    return TList(tuple(items))


def reinterpret(term: Term) -> Term:
    """View a term's bits as a nonce (junk decryption / type flaw)."""
    if isinstance(term, (Nonce, Atom)):
        label = term.label
        new_label = "N" + label[1:] if label.startswith("M") else label + "*"
        return Nonce(value=term.value, label=new_label)
    return Nonce(value=abs(hash(term)) % (1 << 62), label="junk")


class FreshMint:
    """Deterministic fresh-value source with scenario-unique labels."""

    def __init__(self, rng):
        self.rng = rng
        self._used_labels: Dict[str, int] = {}

    def label_for(self, template: str, agent: str) -> str:
        base = template.replace("{agent}", agent)
        n = self._used_labels.get(base, 0)
        self._used_labels[base] = n + 1
        if n == 0:
            return base
        head, sep, tail = base.partition("_")
        return head + "'" * n + sep + tail

    def mint(self, spec: TFresh, agent: str, nonce_bits: int) -> Term:
        label = self.label_for(spec.label, agent)
        value = self.rng.getrandbits(max(nonce_bits, 8))
        if spec.kind == "nonce":
            return Nonce(value=value, width=nonce_bits, label=label)
        if spec.kind == "symkey":
            return SymKey(value=value, label=label)
        if spec.kind == "asymkey":
            return AsymKey(pair_id=value, private=False, label=label)
        if spec.kind == "atom":
            return Atom(value=value, label=label)
        raise ValueError(f"unknown fresh kind {spec.kind!r}")


def instantiate(template, bindings: Dict[str, Term], mint: FreshMint,
                agent: str, nonce_bits: int) -> Term:
    if isinstance(template, TConst):
        return template.term
    if isinstance(template, TRef):
        return bindings[template.name]
    if isinstance(template, TFresh):
        value = mint.mint(template, agent, nonce_bits)
        bindings[template.binding] = value
        return value
    if isinstance(template, TList):
        items = [instantiate(t, bindings, mint, agent, nonce_bits)
                 for t in template.items]
        return pair(*items) if len(items) > 1 else items[0]
    if isinstance(template, TSymEnc):
        key = instantiate(template.key, bindings, mint, agent, nonce_bits)
        payload = instantiate(template.payload, bindings, mint, agent, nonce_bits)
        return SymEnc(payload, key)
    if isinstance(template, TAsymEnc):
        key = instantiate(template.key, bindings, mint, agent, nonce_bits)
        payload = instantiate(template.payload, bindings, mint, agent, nonce_bits)
        return AsymEnc(payload, key)
    if isinstance(template, TCommEnc):
        keys = [instantiate(k, bindings, mint, agent, nonce_bits)
                for k in template.keys]
        payload = instantiate(template.payload, bindings, mint, agent, nonce_bits)
        return comm_enc(payload, keys)
    if isinstance(template, TSucc):
        return succ(instantiate(template.base, bindings, mint, agent,
                                nonce_bits), template.offset)
    if isinstance(template, TCommStrip):
        source = bindings[template.source]
        key = instantiate(template.key, bindings, mint, agent, nonce_bits)
        if isinstance(source, CommEnc) and key in source.keys:
            return comm_strip(source, key)
        return reinterpret(source)
    if isinstance(template, TDecryptPayload):
        source = bindings[template.source]
        key = instantiate(template.key, bindings, mint, agent, nonce_bits)
        if isinstance(source, (SymEnc, AsymEnc)):
            if source.key == key:
                return source.payload
            if isinstance(source.key, KEY_TYPES) and \
                    inverse_key(source.key) == key:
                return source.payload
        return reinterpret(source)
    if isinstance(template, TKeyLookup):
        owner = bindings[template.agent_ref]
        name = owner.name if isinstance(owner, AgentId) else str(owner)
        return bindings[f"key_{name}"]
    raise TypeError(f"not a template: {template!r}")


# -- role scripts -----------------------------------------------------------

@dataclass(frozen=True)
class ExpectStep:
    pattern: object
    msg: int


@dataclass(frozen=True)
class SendStep:
    receiver: object          # str constant or TRef to a bound AgentId
    body: object              # template
    msg: int = 0
    relative: bool = False    # msg = last consumed message number + 1


@dataclass(frozen=True)
class RoleScript:
    name: str
    steps: Tuple[object, ...]
    initial_bindings: Dict[str, Term] = field(default_factory=dict)

    def first_expect(self):
        if self.steps and isinstance(self.steps[0], ExpectStep):
            return self.steps[0]
        return None


@dataclass
class Consumed:
    """An envelope accepted into a session at a given protocol step."""
    env: Envelope
    msg: int


@dataclass
class Session:
    key: int                  # agent-local ordinal
    net_session: int          # protocol session label on the wire
    script: RoleScript
    bindings: Dict[str, Term]
    pc: int = 0
    status: str = "active"    # active | complete | aborted
    consumed: List[Consumed] = field(default_factory=list)
    last_msg: int = 0

    def current(self):
        if self.pc < len(self.script.steps):
            return self.script.steps[self.pc]
        return None


class HonestAgent:
    """Follows its role scripts; never inspects envelope identities."""

    def __init__(self, name: str, knowledge: Optional[KnowledgeSet] = None,
                 responder_scripts: Sequence[RoleScript] = ()):
        self.name = name
        self.knowledge = knowledge or KnowledgeSet()
        self.responder_scripts = list(responder_scripts)
        self.sessions: Dict[int, Session] = {}
        self.flags: Dict[str, bool] = {}
        self._send_cache: Dict[Tuple[int, int], Tuple[Term, str]] = {}

    def _new_key(self) -> int:
        return max(self.sessions, default=0) + 1

    def start_session(self, net_session: int, script: RoleScript) -> Session:
        sess = Session(key=self._new_key(), net_session=net_session,
                       script=script, bindings=dict(script.initial_bindings))
        self.sessions[sess.key] = sess
        return sess

    def set_flag(self, flag: str) -> None:
        self.flags[flag] = True
        if flag == "abort":
            for sess in self.sessions.values():
                if sess.status == "active":
                    sess.status = "aborted"

    def deliver(self, env: Envelope) -> None:
        """Consume a delivered body: advance a waiting session, or open a
        responder session; silently ignore non-matching bodies.  A replay
        of a body already consumed under the same session label never
        opens a second session."""
        self.knowledge.add(env.body)
        for key in sorted(self.sessions):
            sess = self.sessions[key]
            step = sess.current()
            if sess.status != "active" or not isinstance(step, ExpectStep):
                continue
            bound = match(step.pattern, env.body, sess.bindings)
            if bound is not None:
                sess.bindings = bound
                sess.pc += 1
                sess.last_msg = step.msg
                sess.consumed.append(Consumed(env, step.msg))
                if sess.current() is None:
                    sess.status = "complete"
                return
        if self.flags.get("abort"):
            return
        for sess in self.sessions.values():
            if sess.net_session == env.slot.session and \
                    any(wire_eq(c.env.body, env.body) for c in sess.consumed):
                return
        for script in self.responder_scripts:
            first = script.first_expect()
            if first is None:
                continue
            bound = match(first.pattern, env.body, dict(script.initial_bindings))
            if bound is not None:
                sess = Session(key=self._new_key(),
                               net_session=env.slot.session, script=script,
                               bindings=bound, pc=1,
                               last_msg=env.slot.msg or first.msg)
                sess.consumed.append(Consumed(env, first.msg))
                self.sessions[sess.key] = sess
                if sess.current() is None:
                    sess.status = "complete"
                return

    def poll(self, mint: FreshMint, nonce_bits: int) -> Optional[Send]:
        """Propose the next pending send. Fresh values are minted once and
        cached so a proposal that loses arbitration re-proposes unchanged;
        the program counter only advances in commit_send."""
        if self.flags.get("abort"):
            return None
        for key in sorted(self.sessions):
            sess = self.sessions[key]
            step = sess.current()
            if sess.status != "active" or not isinstance(step, SendStep):
                continue
            cache_key = (key, sess.pc)
            if cache_key not in self._send_cache:
                receiver = step.receiver
                if isinstance(receiver, TRef):
                    bound = sess.bindings[receiver.name]
                    receiver = bound.name if isinstance(bound, AgentId) else str(bound)
                body = instantiate(step.body, sess.bindings, mint, self.name,
                                   nonce_bits)
                self._send_cache[cache_key] = (body, receiver)
            body, receiver = self._send_cache[cache_key]
            msg = sess.last_msg + 1 if step.relative else step.msg
            return Send(sender=self.name, body=body, receiver=receiver,
                        slot=Slot(session=sess.net_session, msg=msg),
                        session_key=key)
        return None

    def commit_send(self, key: int) -> None:
        sess = self.sessions[key]
        self._send_cache.pop((key, sess.pc), None)
        step = sess.current()
        if isinstance(step, SendStep):
            sess.last_msg = sess.last_msg + 1 if step.relative else step.msg
        sess.pc += 1
        if sess.current() is None:
            sess.status = "complete"

    def deceived_sessions(self) -> List[Session]:
        out = []
        for sess in self.sessions.values():
            if sess.status != "complete":
                continue
            if any(c.env.injected and c.env.true_sender != c.env.claimed_sender
                   for c in sess.consumed):
                out.append(sess)
        return out


# -- attackers --------------------------------------------------------------

@dataclass(frozen=True)
class ObserveStep:
    """Passive capture: bind a spied/received message, no network action."""
    bind: str
    pattern: object
    from_agent: Optional[str] = None   # perceived (claimed) sender filter
    to_agent: Optional[str] = None


@dataclass(frozen=True)
class EraseStep:
    pattern: object
    from_agent: str                    # perceived (claimed) sender
    to_agent: Optional[str] = None
    bind: Optional[str] = None


@dataclass(frozen=True)
class InjectStep:
    body: object                       # template over captured bindings
    claimed: str
    receiver: str
    slot: Slot


@dataclass(frozen=True)
class AttackFunction:
    """Step-indexed attack strategy; steps are consumed in order.

    Each network-active step maps a spied/known message to Erase or
    Injection whose output is protocol-acceptable (or empty)."""
    name: str
    steps: Tuple[object, ...]


class AttackerAgent:
    """Dolev-Yao attacker with spy filters and a scripted attack function.

    variant:
      proceed  - runs the function, shadows identical rival moves
      divert   - additionally takes known-dishonest rivals' forgeries
                 off the wire (the interference game)
      abort-on-rival - withdraws entirely once a rival is confirmed
    """

    def __init__(self, name: str, interest: Sequence[str],
                 function: Optional[AttackFunction] = None,
                 filters: Sequence[str] = ("inflow", "outflow"),
                 variant: str = "proceed",
                 awareness: Optional[Dict[str, str]] = None,
                 knowledge: Optional[KnowledgeSet] = None):
        self.name = name
        self.interest = set(interest)
        self.function = function
        self.filters = set(filters)
        self.variant = variant
        self.awareness = dict(awareness or {})
        self.knowledge = knowledge or KnowledgeSet()
        self.bindings: Dict[str, Term] = {}
        self.step_ptr = 0
        self.engaged = False
        self.withdrawn = False
        self.hesitated_once = False
        self.ordinal = 0               # registration order, set by the runner
        self.seen: Set[int] = set()    # envelope seqs this attacker spied

    # -- knowledge / spying --

    def spy(self, env: Envelope, direction: str) -> None:
        """Apply the inflow/outflow spy rule: record the body, plus the
        true sender (inflow) or the receiver (outflow)."""
        additions = [env.body]
        if direction == "inflow":
            additions.append(AgentId(env.true_sender))
        else:
            additions.append(AgentId(env.receiver))
        self.knowledge.add(*additions)
        self._note_rival(env)
        self._observe(env)

    def receive(self, env: Envelope) -> None:
        self.knowledge.add(env.body)
        self._observe(env, received=True)

    def _note_rival(self, env: Envelope) -> None:
        if not env.injected or env.true_sender == self.name:
            return
        rival = env.true_sender
        if env.claimed_sender != rival:
            # A witnessed masquerade settles an unsure opinion, but the
            # envelope that revealed it gets a free pass (hesitation).
            if self.awareness.get(rival) == "unsure":
                self.awareness[rival] = "dishonest"
                env.hesitated_by.add(self.name)
                self.hesitated_once = True
            if self.variant == "abort-on-rival" and \
                    self.awareness.get(rival) == "dishonest":
                self.withdrawn = True

    def _observe(self, env: Envelope, received: bool = False) -> None:
        while not self.withdrawn and self.function is not None:
            step = self.current_step()
            if not isinstance(step, ObserveStep):
                break
            if step.from_agent and env.claimed_sender != step.from_agent:
                break
            if step.to_agent and env.receiver != step.to_agent:
                break
            bound = match(step.pattern, env.body, self.bindings)
            if bound is None:
                break
            self.bindings = bound
            self.bindings[step.bind] = env.body
            self.step_ptr += 1

    def current_step(self):
        if self.function and self.step_ptr < len(self.function.steps):
            return self.function.steps[self.step_ptr]
        return None

    def consume_step(self) -> None:
        self.step_ptr += 1

    def note_slot_filled(self, env: Envelope) -> None:
        """A delivered envelope filled a protocol slot; an inject step
        aimed at that slot is moot (vigilant attackers track this)."""
        step = self.current_step()
        if isinstance(step, InjectStep) and self.variant == "divert" \
                and (env.slot.session, env.slot.msg) == \
                    (step.slot.session, step.slot.msg):
            self.consume_step()

    # -- action selection --

    def rank(self) -> int:
        return 0 if (self.variant == "divert" and self.engaged) else 1

    def holding(self, pending: Dict[int, Envelope]) -> bool:
        """While an envelope this attacker hesitated on is still in
        flight, he only watches."""
        return any(self.name in env.hesitated_by
                   for env in pending.values())

    def rival_target(self, pending: Dict[int, Envelope],
                     seen: Set[int]) -> Optional[Envelope]:
        """A known-dishonest rival's forged envelope visible to me."""
        if self.variant != "divert":
            return None
        for seq in sorted(pending):
            env = pending[seq]
            if seq not in seen or not env.injected:
                continue
            if env.true_sender == self.name:
                continue
            if self.name in env.hesitated_by:
                continue
            if self.awareness.get(env.true_sender) == "dishonest":
                return env
        return None

    def own_step_action(self, pending: Dict[int, Envelope], seen: Set[int],
                        rivals_seeing: Callable[[Envelope], Set[str]]):
        """Proposal (or internal consumption) for the current attack step.

        Returns an Erase/Inject proposal, or ("defer", env) when a
        vigilant unengaged attacker leaves the erase to an earlier-placed
        rival, or None."""
        step = self.current_step()
        if step is None or self.withdrawn:
            return None
        if isinstance(step, EraseStep):
            for seq in sorted(pending):
                env = pending[seq]
                if seq not in seen:
                    continue
                if env.claimed_sender != step.from_agent:
                    continue
                if step.to_agent and env.receiver != step.to_agent:
                    continue
                if match(step.pattern, env.body, self.bindings) is None:
                    continue
                if self.variant == "divert" and not self.engaged:
                    suspect = {r for r, a in self.awareness.items()
                               if a in ("dishonest", "unsure")}
                    if suspect & rivals_seeing(env):
                        return ("defer", env)
                return Erase(actor=self.name, target_seq=seq,
                             rank=self.rank(), own_step=True)
            return None
        if isinstance(step, InjectStep):
            if self.variant != "divert":
                for seq in sorted(pending):
                    env = pending[seq]
                    if seq in seen and env.claimed_sender == step.claimed \
                            and env.receiver == step.receiver \
                            and wire_eq(env.body, self._render_body(step)):
                        env.sender_credits.add(self.name)
                        self.consume_step()
                        return None
            body = self._render_body(step)
            return Inject(actor=self.name, claimed=step.claimed, body=body,
                          receiver=step.receiver, slot=step.slot,
                          rank=self.rank())
        return None

    def _render_body(self, step: InjectStep) -> Term:
        return instantiate(step.body, self.bindings, _NullMint(), self.name, 64)

    def attack_step(self, spied: Term, s: int):
        """The attack function at step s applied to a spied message:
        the proposal it yields, or None on pattern mismatch."""
        if not self.function or s < 1 or s > len(self.function.steps):
            return None
        step = self.function.steps[s - 1]
        if isinstance(step, EraseStep):
            if match(step.pattern, spied, self.bindings) is None:
                return None
            return ("Erase", None)
        if isinstance(step, InjectStep):
            body = instantiate(step.body, dict(self.bindings, m=spied),
                               _NullMint(), self.name, 64)
            return ("Injection", body)
        return None


class _NullMint:
    """Attack templates never mint fresh honest values."""

    def mint(self, spec, agent, nonce_bits):
        raise ValueError("attack functions cannot mint fresh protocol values")
