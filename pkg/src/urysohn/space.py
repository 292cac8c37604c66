"""The tuple universe: interned nodes, their recursive distance, and the
permissible nodes that form the countable Urysohn space over dyadics.

A node ``n(a_0: α_0, ..., a_{l-1}: α_{l-1})`` has an age ``n`` and a list of
(predecessor, distance) entries whose predecessors are strictly younger.
Nodes are hash-consed in a :class:`Store`, so a node id identifies the
structure and shared substructure is computed once.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .dyadic import ZERO, Dyadic

NodeId = int
# A permissible node id, regarded up to zero distance.
QuotPoint = int
Entry = tuple[NodeId, Dyadic]
EncodingItem = Union[int, Dyadic]

EMPTY: NodeId = 0


class AgeViolation(ValueError):
    """A predecessor is not strictly younger than the node being built."""


class MalformedEncoding(ValueError):
    def __init__(self, position: int, message: str):
        super().__init__(f"at position {position}: {message}")
        self.position = position


class HypothesisViolated(ValueError):
    """The inputs do not satisfy the premise of a bound being checked."""


class NotPermissible(ValueError):
    """A node that must stand for a point of the space fails permissibility."""


@dataclass(frozen=True)
class TupleNode:
    age: int
    entries: tuple[Entry, ...]

    def __len__(self) -> int:
        return len(self.entries)


class Store:
    """Append-only table of interned nodes with memoized distances.

    Id 0 is always the empty node of age 0.
    """

    def __init__(self) -> None:
        empty = TupleNode(0, ())
        self._nodes: list[TupleNode] = [empty]
        self._ids: dict[TupleNode, NodeId] = {empty: EMPTY}
        self._dist: dict[tuple[NodeId, NodeId], Dyadic] = {}
        self._perm: dict[NodeId, bool] = {EMPTY: True}
        self._retract: dict[NodeId, NodeId] = {}
        self._memos: dict[str, dict] = {}

    # --- table access ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[NodeId]:
        return iter(range(len(self._nodes)))

    def node(self, a: NodeId) -> TupleNode:
        return self._nodes[a]

    def age(self, a: NodeId) -> int:
        return self._nodes[a].age

    def entries(self, a: NodeId) -> tuple[Entry, ...]:
        return self._nodes[a].entries

    def memo(self, name: str) -> dict:
        """A named cache that lives as long as the store (used by derived operations)."""
        return self._memos.setdefault(name, {})

    def intern(self, age: int, entries: Iterable[tuple[NodeId, Union[Dyadic, int]]]) -> NodeId:
        """Return the id of the node ``age(entries)``, creating it if needed."""
        if age < 0:
            raise AgeViolation(f"negative age {age}")
        frozen = []
        for pred, alpha in entries:
            if not 0 <= pred < len(self._nodes):
                raise KeyError(f"unknown node id {pred}")
            if self._nodes[pred].age >= age:
                raise AgeViolation(
                    f"predecessor {pred} has age {self._nodes[pred].age}, not below {age}"
                )
            frozen.append((pred, Dyadic.of(alpha)))
        node = TupleNode(age, tuple(frozen))
        found = self._ids.get(node)
        if found is not None:
            return found
        self._nodes.append(node)
        return self._ids.setdefault(node, len(self._nodes) - 1)

    def make(self, entries: Iterable[tuple[NodeId, Union[Dyadic, int]]] = (), age: int | None = None) -> NodeId:
        """Intern a node whose age defaults to one more than its oldest predecessor."""
        entries = list(entries)
        if age is None:
            age = 1 + max((self._nodes[p].age for p, _ in entries), default=0)
        return self.intern(age, entries)

    def hereditary(self, a: NodeId) -> list[NodeId]:
        """All nodes reachable from ``a`` (including ``a``), predecessors first."""
        seen: set[NodeId] = set()
        order: list[NodeId] = []
        stack = [(a, False)]
        while stack:
            x, done = stack.pop()
            if done:
                order.append(x)
                continue
            if x in seen:
                continue
            seen.add(x)
            stack.append((x, True))
            for p, _ in self._nodes[x].entries:
                if p not in seen:
                    stack.append((p, False))
        return order

    # --- metric -------------------------------------------------------------

    def distance(self, a: NodeId, b: NodeId) -> Dyadic:
        """Supremum of ``d(a_i, b) dis α_i`` and ``d(a, b_j) dis β_j``; zero when both are empty."""
        if a > b:
            a, b = b, a
        key = (a, b)
        found = self._dist.get(key)
        if found is not None:
            return found
        if a == b and self._perm.get(a):
            # Permissible nodes are at distance zero from themselves.
            result = ZERO
        else:
            result = ZERO
            for p, alpha in self._nodes[a].entries:
                v = self.distance(p, b).dis(alpha)
                if v > result:
                    result = v
            for q, beta in self._nodes[b].entries:
                v = self.distance(a, q).dis(beta)
                if v > result:
                    result = v
        self._dist[key] = result
        return result

    def norm(self, a: NodeId) -> Dyadic:
        return self.distance(a, EMPTY)

    def quot_eq(self, a: QuotPoint, b: QuotPoint) -> bool:
        return not self.distance(a, b)

    def is_permissible(self, a: NodeId) -> bool:
        """Whether every entry pair satisfies ``d(a_i, a_j) dis α_i <= α_j``, hereditarily."""
        found = self._perm.get(a)
        if found is not None:
            return found
        for x in self.hereditary(a):
            if x not in self._perm:
                self._perm[x] = self._check_local(x)
        return self._perm[a]

    def _check_local(self, a: NodeId) -> bool:
        entries = self._nodes[a].entries
        if not all(self._perm[p] for p, _ in entries):
            return False
        for i, (p, alpha) in enumerate(entries):
            for q, beta in entries[i + 1:]:
                d = self.distance(p, q)
                if d.dis(alpha) > beta or d.dis(beta) > alpha:
                    return False
        return True

    def require_point(self, a: NodeId) -> QuotPoint:
        if not self.is_permissible(a):
            raise NotPermissible(f"node {a} ({self.format_encoding(a)}) is not permissible")
        return a

    def retract(self, a: NodeId) -> NodeId:
        """Map a node to a permissible node of the same age and length.

        Each predecessor is retracted first and then re-attached at its
        actual distance from ``a``. Permissible nodes are fixed.
        """
        found = self._retract.get(a)
        if found is not None:
            return found
        for x in self.hereditary(a):
            if x in self._retract:
                continue
            node = self._nodes[x]
            preds = [self._retract[p] for p, _ in node.entries]
            r = self.intern(node.age, [(p, self.distance(x, p)) for p in preds])
            self._retract[x] = r
        return self._retract[a]

    def perturbation_bound_check(self, a: NodeId, b: NodeId, eps, eps2) -> bool:
        """Check ``d(a, b) <= eps + eps2`` for entry-wise close permissible tuples.

        The premise (same length, ``α_i dis β_i <= eps`` and
        ``d(a_i, b_i) <= eps2`` for every i, both permissible) is verified
        first and :class:`HypothesisViolated` is raised when it fails.
        """
        eps, eps2 = Dyadic.of(eps), Dyadic.of(eps2)
        ea, eb = self._nodes[a].entries, self._nodes[b].entries
        if len(ea) != len(eb):
            raise HypothesisViolated(f"lengths differ: {len(ea)} and {len(eb)}")
        if not (self.is_permissible(a) and self.is_permissible(b)):
            raise HypothesisViolated("both tuples must be permissible")
        for i, ((p, alpha), (q, beta)) in enumerate(zip(ea, eb)):
            if alpha.dis(beta) > eps:
                raise HypothesisViolated(f"entry {i}: {alpha} and {beta} differ by more than {eps}")
            if self.distance(p, q) > eps2:
                raise HypothesisViolated(f"entry {i}: predecessors are farther apart than {eps2}")
        return self.distance(a, b) <= eps + eps2

    # --- encoding -----------------------------------------------------------

    def encode(self, a: NodeId) -> tuple[EncodingItem, ...]:
        """Flatten to ``(n, α_0, enc(a_0), n, α_1, enc(a_1), n, ..., n)``; the empty node is ``(n)``."""
        out: list[EncodingItem] = []
        self._encode_into(a, out)
        return tuple(out)

    def _encode_into(self, a: NodeId, out: list) -> None:
        node = self._nodes[a]
        out.append(node.age)
        for p, alpha in node.entries:
            out.append(alpha)
            self._encode_into(p, out)
            out.append(node.age)

    def decode(self, seq: Sequence[EncodingItem]) -> NodeId:
        """Inverse of :meth:`encode`; raises :class:`MalformedEncoding` at the first bad position."""
        seq = list(seq)

        def age_at(pos: int, bound: int | None) -> int:
            if pos >= len(seq):
                raise MalformedEncoding(pos, "sequence ends where an age is expected")
            item = seq[pos]
            if not isinstance(item, int) or isinstance(item, bool) or item < 0:
                raise MalformedEncoding(pos, f"expected an age, found {item!r}")
            if bound is not None and item >= bound:
                raise MalformedEncoding(pos, f"inner age {item} is not below {bound}")
            return item

        def parse(pos: int, bound: int | None) -> tuple[NodeId, int]:
            n = age_at(pos, bound)
            pos += 1
            entries = []
            while pos < len(seq) and isinstance(seq[pos], Dyadic):
                alpha = seq[pos]
                child, pos = parse(pos + 1, n)
                if pos >= len(seq) or seq[pos] != n or isinstance(seq[pos], Dyadic):
                    found = seq[pos] if pos < len(seq) else "end of sequence"
                    raise MalformedEncoding(pos, f"expected closing age {n}, found {found}")
                pos += 1
                entries.append((child, alpha))
            return self.intern(n, entries), pos

        if not seq:
            raise MalformedEncoding(0, "empty sequence")
        node, end = parse(0, None)
        if end != len(seq):
            raise MalformedEncoding(end, f"unexpected trailing item {seq[end]!r}")
        return node

    def format_encoding(self, a: NodeId) -> str:
        return format_sequence(self.encode(a))

    def parse_encoding(self, text: str) -> NodeId:
        return self.decode(parse_sequence(text))


_INT = re.compile(r"\d+\Z")


def format_sequence(seq: Sequence[EncodingItem]) -> str:
    return "(" + ", ".join(str(x) for x in seq) + ")"


def parse_sequence(text: str) -> list[EncodingItem]:
    """Tokenize ``(1, 3/2^1, 0, 1)``. Ages are bare integers; distances carry ``/2^k``."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise MalformedEncoding(0, "encoding must be enclosed in parentheses")
    body = body[1:-1].strip()
    if not body:
        raise MalformedEncoding(0, "empty sequence")
    items: list[EncodingItem] = []
    for pos, token in enumerate(t.strip() for t in body.split(",")):
        if "/" in token:
            try:
                items.append(Dyadic.parse(token))
            except ValueError:
                raise MalformedEncoding(pos, f"bad dyadic literal {token!r}") from None
        elif _INT.match(token):
            items.append(int(token))
        else:
            raise MalformedEncoding(pos, f"bad token {token!r}")
    return items


def random_dyadic(rng: random.Random, max_mantissa: int = 8, max_exponent: int = 2) -> Dyadic:
    return Dyadic(rng.randrange(0, max_mantissa + 1), rng.randrange(0, max_exponent + 1))


def random_node(
    store: Store,
    rng: random.Random,
    max_age: int = 3,
    max_len: int = 2,
    age: int | None = None,
) -> NodeId:
    """A random, usually non-permissible, node of age at most ``max_age``."""
    if age is None:
        age = rng.randrange(0, max_age + 1)
    if age == 0:
        return EMPTY
    entries = []
    for _ in range(rng.randrange(0, max_len + 1)):
        pred = random_node(store, rng, max_len=max_len, age=rng.randrange(0, age))
        entries.append((pred, random_dyadic(rng)))
    return store.intern(age, entries)


def random_permissible(store: Store, rng: random.Random, max_age: int = 3, max_len: int = 2) -> NodeId:
    """Retract a random node; every permissible node is reachable this way."""
    return store.retract(random_node(store, rng, max_age=max_age, max_len=max_len))


def reference_distance(store: Store, a: NodeId, b: NodeId) -> Dyadic:
    """Distance by plain structural recursion, with no memo table and no shortcuts.

    Exponential in the depth; meant as an oracle for small nodes only.
    """
    node_a, node_b = store.node(a), store.node(b)
    values = [reference_distance(store, p, b).dis(alpha) for p, alpha in node_a.entries]
    values += [reference_distance(store, a, q).dis(beta) for q, beta in node_b.entries]
    return max(values, default=ZERO)
