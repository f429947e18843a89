"""Finite posets and order-theoretic enumeration helpers.

Everything here is exact and deterministic: elements are hashable labels,
orders are stored as explicit relation tables, and every enumeration walks
candidates in a fixed canonical order.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator


def canon_key(x):
    """Deterministic sort key for the element values used in this package.

    Handles strings, numbers, tuples and (frozen)sets, nesting freely.
    Sets are keyed by the sorted tuple of their members' keys, so the
    resulting order is stable across runs and hash seeds.
    """
    if isinstance(x, (set, frozenset)):
        return (2, tuple(sorted(canon_key(e) for e in x)))
    if isinstance(x, tuple):
        return (1, tuple(canon_key(e) for e in x))
    return (0, repr(x))


def canon_sorted(xs: Iterable) -> list:
    return sorted(xs, key=canon_key)


class FinPoset:
    """A finite partial order over hashable element labels.

    Constructed from a generating relation; the reflexive-transitive
    closure is taken and antisymmetry is validated.
    """

    def __init__(self, elements: Iterable[Hashable], le: Iterable[tuple] = ()):
        elems = list(elements)
        if len(set(elems)) != len(elems):
            raise ValueError("duplicate poset elements")
        if not elems:
            raise ValueError("poset must be nonempty")
        self._elements = tuple(canon_sorted(elems))
        eset = set(self._elements)
        up = {x: {x} for x in self._elements}
        for a, b in le:
            if a not in eset or b not in eset:
                raise ValueError(f"relation mentions unknown element {a!r} <= {b!r}")
            up[a].add(b)
        changed = True
        while changed:
            changed = False
            for x in self._elements:
                extra = set()
                for y in up[x]:
                    extra |= up[y]
                if not extra <= up[x]:
                    up[x] |= extra
                    changed = True
        for x in self._elements:
            for y in up[x]:
                if x != y and x in up[y]:
                    raise ValueError(f"order is not antisymmetric: {x!r} and {y!r}")
        self._up = {x: frozenset(s) for x, s in up.items()}
        down: dict = {x: set() for x in self._elements}
        for x in self._elements:
            for y in self._up[x]:
                down[y].add(x)
        self._down = {x: frozenset(s) for x, s in down.items()}

    @property
    def elements(self) -> tuple:
        return self._elements

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __contains__(self, x):
        return x in self._up

    def __eq__(self, other):
        if not isinstance(other, FinPoset):
            return NotImplemented
        return self._elements == other._elements and self._up == other._up

    def __hash__(self):
        return hash((self._elements, tuple(self._up[x] for x in self._elements)))

    def leq(self, a, b) -> bool:
        if a not in self._up or b not in self._up:
            raise ValueError(f"element not in poset: {a!r} or {b!r}")
        return b in self._up[a]

    def up(self, x) -> frozenset:
        """All y with x <= y."""
        return self._up[x]

    def down(self, x) -> frozenset:
        """All y with y <= x."""
        return self._down[x]

    def comparable_pairs(self) -> list[tuple]:
        """All pairs (a, b) with a <= b, including the diagonal."""
        return [(a, b) for a in self._elements for b in canon_sorted(self._up[a])]

    def covers(self) -> list[tuple]:
        """The Hasse diagram edges (a, b): a < b with nothing in between."""
        out = []
        for a in self._elements:
            for b in canon_sorted(self._up[a]):
                if a == b:
                    continue
                between = [c for c in self._up[a] if c != a and c != b and b in self._up[c]]
                if not between:
                    out.append((a, b))
        return out

    def maximal_of(self, subset: Iterable) -> list:
        sub = set(subset)
        return canon_sorted(x for x in sub if all(not (x != y and y in self._up[x]) for y in sub))

    def top_of(self, subset: Iterable):
        """The maximum of a subset, or None if there is none."""
        maxes = self.maximal_of(subset)
        if len(maxes) == 1 and all(maxes[0] in self._up[x] for x in subset):
            return maxes[0]
        return None

    def bottom(self):
        """The least element, or None."""
        mins = [x for x in self._elements if self._down[x] == frozenset({x})]
        if len(mins) == 1 and all(x in self._up[mins[0]] for x in self._elements):
            return mins[0]
        return None

    def is_directed(self, subset: Iterable) -> bool:
        sub = list(subset)
        for a in sub:
            for b in sub:
                if not any((a in self._down[c]) and (b in self._down[c]) for c in sub):
                    return False
        return True

    def linear_extension(self) -> list:
        """Elements listed so that smaller ones come first; canonical ties."""
        remaining = set(self._elements)
        out = []
        while remaining:
            ready = canon_sorted(x for x in remaining if self._down[x] & remaining <= {x})
            out.extend(ready)
            remaining -= set(ready)
        return out

    def restrict(self, subset: Iterable) -> "FinPoset":
        sub = set(subset)
        return FinPoset(sub, [(a, b) for a in sub for b in sub if self.leq(a, b)])


def downsets(elements: Iterable, leq) -> Iterator[frozenset]:
    """All down-closed subsets of a finite order, smallest-first per branch.

    `leq(a, b)` must be a decidable partial order on `elements`.
    """
    elems = canon_sorted(elements)
    below = {x: frozenset(y for y in elems if y != x and leq(y, x)) for x in elems}
    # decide membership in an order where all predecessors come first
    todo = []
    placed = set()
    while len(todo) < len(elems):
        for x in elems:
            if x not in placed and below[x] <= placed:
                todo.append(x)
                placed.add(x)

    n = len(todo)

    def rec(i: int, current: set):
        if i == n:
            yield frozenset(current)
            return
        x = todo[i]
        yield from rec(i + 1, current)
        if below[x] <= current:
            current.add(x)
            yield from rec(i + 1, current)
            current.remove(x)

    yield from rec(0, set())


def upsets(elements: Iterable, leq) -> Iterator[frozenset]:
    """All up-closed subsets, as complements of the down-closed ones."""
    elems = frozenset(elements)
    for d in downsets(elements, leq):
        yield elems - d


class PosetIdeal:
    """A nonempty, down-closed, up-directed subset of a finite poset."""

    def __init__(self, poset: FinPoset, members: Iterable, *, check: bool = True):
        self.poset = poset
        self.members = frozenset(members)
        if check:
            self._validate()
        self._top = poset.top_of(self.members)

    def _validate(self):
        if not self.members:
            raise ValueError("ideal must be nonempty")
        for x in self.members:
            if x not in self.poset:
                raise ValueError(f"ideal member {x!r} not in poset")
            if not self.poset.down(x) <= self.members:
                raise ValueError(f"ideal not down-closed at {x!r}")
        if not self.poset.is_directed(self.members):
            raise ValueError("ideal not directed")

    @property
    def top(self):
        """A finite directed set always has a maximum."""
        return self._top

    def __contains__(self, x):
        return x in self.members

    def __iter__(self):
        return iter(canon_sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        if not isinstance(other, PosetIdeal):
            return NotImplemented
        return self.poset == other.poset and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return "PosetIdeal({%s})" % ", ".join(repr(x) for x in canon_sorted(self.members))


def ideals(poset: FinPoset) -> tuple[PosetIdeal, ...]:
    """All ideals of a finite poset, in canonical order.

    Enumerated honestly as the nonempty directed down-sets; for a finite
    poset these are exactly the principal down-sets, which makes a handy
    cross-check in the tests.
    """
    found = []
    for d in downsets(poset.elements, poset.leq):
        if d and poset.is_directed(d):
            found.append(PosetIdeal(poset, d, check=False))
    return tuple(sorted(found, key=lambda i: canon_key(i.members)))


def principal_ideal(poset: FinPoset, x) -> PosetIdeal:
    return PosetIdeal(poset, poset.down(x), check=False)


def monotone_maps(source: FinPoset, target: FinPoset) -> Iterator[dict]:
    """All monotone maps between two finite posets, deterministically."""
    order = source.linear_extension()

    def rec(i: int, assign: dict):
        if i == len(order):
            yield dict(assign)
            return
        x = order[i]
        lower = [y for y in order[:i] if source.leq(y, x)]
        for v in target.elements:
            if all(target.leq(assign[y], v) for y in lower):
                assign[x] = v
                yield from rec(i + 1, assign)
                del assign[x]

    yield from rec(0, {})
