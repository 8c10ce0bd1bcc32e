"""Symbolic message terms.

Terms are immutable values: atoms, agent names, nonces, keys, pairs,
encryptions, numeric successors and timestamps.  Equality is structural
(constructor tree plus leaf values); rendering labels never participate
in equality, so two distinct fresh values that happen to share a wire
value compare equal -- that collision is exactly what the false-positive
analysis measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Tuple, Union


class TermError(Exception):
    """Raised for malformed term constructions (e.g. inverting a non-key)."""


@dataclass(frozen=True)
class Atom:
    """Opaque protocol constant or attacker-forged blob."""
    value: int
    label: str = field(default="m", compare=False)

    def __repr__(self):
        return f"Atom({self.label}#{self.value})"


@dataclass(frozen=True)
class AgentId:
    name: str

    def __repr__(self):
        return f"AgentId({self.name})"


@dataclass(frozen=True)
class Nonce:
    value: int
    width: int = 64
    label: str = field(default="N", compare=False)

    def __repr__(self):
        return f"Nonce({self.label}#{self.value})"


@dataclass(frozen=True)
class SymKey:
    """Symmetric key; its own inverse."""
    value: int
    label: str = field(default="K", compare=False)

    def __repr__(self):
        return f"SymKey({self.label}#{self.value})"


@dataclass(frozen=True)
class AsymKey:
    """One half of an asymmetric pair; inverse flips polarity."""
    pair_id: int
    private: bool = False
    label: str = field(default="K", compare=False)

    def __repr__(self):
        inv = "^-1" if self.private else ""
        return f"AsymKey({self.label}{inv}#{self.pair_id})"


@dataclass(frozen=True)
class Password:
    value: int
    label: str = field(default="P", compare=False)

    def __repr__(self):
        return f"Password({self.label}#{self.value})"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class SymEnc:
    payload: "Term"
    key: "Term"


@dataclass(frozen=True)
class AsymEnc:
    payload: "Term"
    key: "Term"


@dataclass(frozen=True)
class CommEnc:
    """Commutative encryption: an unordered multiset of key layers."""
    payload: "Term"
    keys: Tuple["Term", ...]  # canonically sorted; never empty


@dataclass(frozen=True)
class Succ:
    """base + offset on the wire; offset > 0, base never itself a Succ."""
    base: "Term"
    offset: int


@dataclass(frozen=True)
class Timestamp:
    value: int
    label: str = field(default="T", compare=False)


@dataclass(frozen=True)
class Lifetime:
    value: int
    label: str = field(default="L", compare=False)


Term = Union[Atom, AgentId, Nonce, SymKey, AsymKey, Password, Pair,
             SymEnc, AsymEnc, CommEnc, Succ, Timestamp, Lifetime]

LEAF_TYPES = (Atom, AgentId, Nonce, SymKey, AsymKey, Password, Timestamp, Lifetime)
KEY_TYPES = (SymKey, AsymKey, Password)


def _term_sort_key(t: Term):
    return (type(t).__name__, repr(wire_view(t)))


def comm_enc(payload: Term, keys) -> Term:
    """Build a CommEnc, merging nested layers; an empty key set is the payload."""
    key_list = list(keys)
    if isinstance(payload, CommEnc):
        key_list.extend(payload.keys)
        payload = payload.payload
    if not key_list:
        return payload
    return CommEnc(payload, tuple(sorted(key_list, key=_term_sort_key)))


def comm_strip(term: Term, key: Term) -> Term:
    """Remove one layer of `key` from a CommEnc; error if absent."""
    if not isinstance(term, CommEnc) or key not in term.keys:
        raise TermError(f"cannot strip {key!r} from {term!r}")
    keys = list(term.keys)
    keys.remove(key)
    return comm_enc(term.payload, keys)


def succ(base: Term, offset: int) -> Term:
    """Normalised successor: Succ(Succ(t,a),b) = Succ(t,a+b); Succ(t,0) = t."""
    if isinstance(base, Succ):
        offset += base.offset
        base = base.base
    if offset == 0:
        return base
    return Succ(base, offset)


def pair(*items: Term) -> Term:
    """Right-nested pair chain from two or more terms."""
    if len(items) < 2:
        raise TermError("pair needs at least two items")
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Pair(item, result)
    return result


def pair_items(t: Term) -> list:
    """Flatten a right-nested pair chain."""
    items = []
    while isinstance(t, Pair):
        items.append(t.left)
        t = t.right
    items.append(t)
    return items


def inverse_key(key: Term) -> Term:
    """Inverse of an encryption key: symmetric keys and passwords are
    self-inverse, asymmetric keys flip polarity."""
    if isinstance(key, (SymKey, Password)):
        return key
    if isinstance(key, AsymKey):
        return AsymKey(key.pair_id, not key.private, key.label)
    raise TermError(f"not a key: {key!r}")


def subterms(t: Term) -> Iterator[Term]:
    """All subterms including t itself (pre-order)."""
    yield t
    if isinstance(t, Pair):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, (SymEnc, AsymEnc)):
        yield from subterms(t.payload)
        yield from subterms(t.key)
    elif isinstance(t, CommEnc):
        yield from subterms(t.payload)
        for k in t.keys:
            yield from subterms(k)
    elif isinstance(t, Succ):
        yield from subterms(t.base)


def depth(t: Term) -> int:
    if isinstance(t, Pair):
        return 1 + max(depth(t.left), depth(t.right))
    if isinstance(t, (SymEnc, AsymEnc)):
        return 1 + max(depth(t.payload), depth(t.key))
    if isinstance(t, CommEnc):
        return 1 + max([depth(t.payload)] + [depth(k) for k in t.keys])
    if isinstance(t, Succ):
        return 1 + depth(t.base)
    return 0


def wire_view(t: Term):
    """Canonical wire encoding of a term.

    Leaf kinds collapse to their numeric value (on the wire a nonce and a
    key of equal value are the same bitstring); a Succ over a leaf folds
    into the value.  Structure (pairing, encryption layers) is preserved.
    """
    if isinstance(t, (Nonce, SymKey, Password, Atom, Timestamp, Lifetime)):
        return ("leaf", t.value)
    if isinstance(t, AgentId):
        return ("agent", t.name)
    if isinstance(t, AsymKey):
        return ("akey", t.pair_id, t.private)
    if isinstance(t, Succ):
        base = wire_view(t.base)
        if base[0] == "leaf":
            return ("leaf", base[1] + t.offset)
        return ("succ", base, t.offset)
    if isinstance(t, Pair):
        return ("pair", wire_view(t.left), wire_view(t.right))
    if isinstance(t, SymEnc):
        return ("senc", wire_view(t.payload), wire_view(t.key))
    if isinstance(t, AsymEnc):
        return ("aenc", wire_view(t.payload), wire_view(t.key))
    if isinstance(t, CommEnc):
        return ("cenc", wire_view(t.payload),
                tuple(sorted(wire_view(k) for k in t.keys)))
    raise TermError(f"not a term: {t!r}")


def wire_eq(a: Term, b: Term) -> bool:
    """Equality as observed on the wire (what a spying agent compares)."""
    return wire_view(a) == wire_view(b)


# -- canonical textual rendering -------------------------------------------
#
# {|m|}k  symmetric encryption      {m}k   asymmetric / password
# {m}[k1,k2] commutative            a,b    pair chains (flattened)
# N+i     successor
# Left-nested pairs get parentheses so the flattening stays unambiguous.

def render_key(k: Term) -> str:
    if isinstance(k, AsymKey):
        return k.label + ("^-1" if k.private else "")
    if isinstance(k, (SymKey, Password, Nonce, Atom)):
        return k.label
    return render(k)


def render(t: Term) -> str:
    if isinstance(t, (Atom, Nonce, SymKey, Password, Timestamp, Lifetime)):
        return t.label
    if isinstance(t, AgentId):
        return t.name
    if isinstance(t, AsymKey):
        return render_key(t)
    if isinstance(t, Succ):
        return f"{render(t.base)}+{t.offset}"
    if isinstance(t, Pair):
        parts = []
        for item in pair_items(t):
            if isinstance(item, Pair):  # left-nested: keep parens
                parts.append(f"({render(item)})")
            else:
                parts.append(render(item))
        return ",".join(parts)
    if isinstance(t, SymEnc):
        return "{|" + render(t.payload) + "|}" + render_key(t.key)
    if isinstance(t, AsymEnc):
        return "{" + render(t.payload) + "}" + render_key(t.key)
    if isinstance(t, CommEnc):
        keys = ",".join(render_key(k) for k in t.keys)
        return "{" + render(t.payload) + "}[" + keys + "]"
    raise TermError(f"not a term: {t!r}")
