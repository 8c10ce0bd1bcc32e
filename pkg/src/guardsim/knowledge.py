"""Agent knowledge stores and message derivability.

A KnowledgeSet is a revisioned, monotonically growing set of terms; a
rollback restores a prior revision exactly.  `analyze` computes the
decomposition fixpoint (projection, decryption, commutative peeling,
successor stripping); `derivable` answers synthesis queries top-down so
the infinite forward closure is never enumerated.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Set, Tuple

from .terms import (AsymEnc, CommEnc, Pair, Succ, SymEnc, Term,
                    comm_strip, inverse_key, KEY_TYPES)


class KnowledgeSet:
    """Indexed knowledge store. Additions are logged so any prior revision
    can be restored (rollback); reads never mutate."""

    def __init__(self, items: Iterable[Term] = ()):
        self._items: Set[Term] = set()
        self._log: List[Tuple[Term, ...]] = []
        initial = tuple(dict.fromkeys(items))
        if initial:
            self._commit(initial)

    def _commit(self, added: Tuple[Term, ...]) -> None:
        self._items.update(added)
        self._log.append(added)

    @property
    def revision(self) -> int:
        return len(self._log)

    @property
    def items(self) -> frozenset:
        return frozenset(self._items)

    def __contains__(self, t: Term) -> bool:
        return t in self._items

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def add(self, *terms: Term) -> int:
        """Record one confirmed addition (one revision step); returns the
        new revision. Adding only already-known terms still advances the
        revision: the agent confirmed an action."""
        self._commit(tuple(dict.fromkeys(terms)))
        return self.revision

    def restore(self, revision: int) -> None:
        """Roll back to a prior revision, forgetting everything since."""
        if revision < 0 or revision > len(self._log):
            raise ValueError(f"unknown revision {revision}")
        del self._log[revision:]
        self._items = set()
        for added in self._log:
            self._items.update(added)

    def snapshot(self) -> frozenset:
        return frozenset(self._items)


def analyze_terms(items: Iterable[Term]) -> frozenset:
    """Decomposition fixpoint of a term set.

    Pairs are projected, encryptions whose inverse key is available are
    opened, commutative layers with known inverses are peeled, successors
    are stripped (the offset is public arithmetic).  Terminates: every
    added term is a strict subterm or a key-multiset reduction.
    """
    known: Set[Term] = set(items)
    frontier = list(known)
    while frontier:
        new: List[Term] = []
        for t in known:
            if isinstance(t, Pair):
                for part in (t.left, t.right):
                    if part not in known:
                        new.append(part)
            elif isinstance(t, (SymEnc, AsymEnc)):
                if isinstance(t.key, KEY_TYPES) and inverse_key(t.key) in known:
                    if t.payload not in known:
                        new.append(t.payload)
            elif isinstance(t, CommEnc):
                for k in set(t.keys):
                    if isinstance(k, KEY_TYPES) and inverse_key(k) in known:
                        reduced = comm_strip(t, k)
                        if reduced not in known:
                            new.append(reduced)
            elif isinstance(t, Succ):
                if t.base not in known:
                    new.append(t.base)
        if not new:
            break
        known.update(new)
        frontier = new
    return frozenset(known)


def analyze(ks: KnowledgeSet) -> KnowledgeSet:
    """Analysis fixpoint as a new KnowledgeSet (idempotent)."""
    return KnowledgeSet(sorted(analyze_terms(ks.items),
                               key=lambda t: repr(t)))


def derivable(ks: KnowledgeSet, goal: Term,
              explain: Optional[list] = None) -> bool:
    """True iff `goal` is in the closure of ks under composition,
    encryption, projection, decryption and commutative layering/peeling.

    Synthesis is goal-directed: the goal is decomposed, never the
    infinite forward closure enumerated. When `explain` is given, the
    applied rule steps are appended to it (for derivation replay).
    """
    analyzed = analyze_terms(ks.items)
    memo = {}

    def synth(t: Term) -> bool:
        if t in memo:
            return memo[t]
        memo[t] = False  # cycle guard
        result = False
        trace_entry = None
        if t in analyzed:
            result = True
            trace_entry = ("known", t)
        elif isinstance(t, Pair):
            result = synth(t.left) and synth(t.right)
            trace_entry = ("compose", t)
        elif isinstance(t, (SymEnc, AsymEnc)):
            result = synth(t.payload) and synth(t.key)
            trace_entry = ("encrypt", t)
        elif isinstance(t, CommEnc):
            result = synth(t.payload) and all(synth(k) for k in t.keys)
            trace_entry = ("comm-encrypt", t)
            if not result:
                # Peel toward the goal: find a known superset-layered form.
                for c in analyzed:
                    if (isinstance(c, CommEnc) and c.payload == t.payload
                            and set(t.keys) <= set(c.keys)):
                        extra = list(c.keys)
                        for k in t.keys:
                            extra.remove(k)
                        if all(synth(inverse_key(k)) for k in extra
                               if isinstance(k, KEY_TYPES)):
                            result = all(isinstance(k, KEY_TYPES) for k in extra)
                            trace_entry = ("comm-peel", c, t)
                            if result:
                                break
        elif isinstance(t, Succ):
            result = synth(t.base)
            trace_entry = ("succ", t)
        memo[t] = result
        if result and explain is not None and trace_entry is not None:
            explain.append(trace_entry)
        return result

    return synth(goal)
