"""Context diagrams built from partitions of a finite outcome set.

A commutative subalgebra of a diagonal algebra is the block algebra of a
partition: the functions constant on its blocks.  Coarser partitions give
smaller subalgebras, so the context poset is the partition lattice with
the one-block partition at the bottom.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraHom, FinCommAlgebra, characters
from .bundle import ContextDiagram, InvalidDiagram
from .order import FinPoset, canon_key, canon_sorted
from .reports import Report, SchemaError


class BohrifyError(Exception):
    pass


class TooLarge(BohrifyError):
    pass


class InconsistentOrder(BohrifyError):
    pass


MAX_BASE = 5  # Bell(5) = 52 contexts; beyond that full enumeration drags


def block_label(block: Iterable[str]) -> str:
    return "+".join(sorted(block))


class Partition:
    """A partition of a finite base set into nonempty disjoint blocks."""

    def __init__(self, base: Iterable[str], blocks: Iterable[Iterable[str]]):
        self.base = frozenset(base)
        self.blocks = frozenset(frozenset(b) for b in blocks)
        if not self.base:
            raise BohrifyError("base set must be nonempty")
        if any(not b for b in self.blocks):
            raise BohrifyError("blocks must be nonempty")
        union = set()
        total = 0
        for b in self.blocks:
            union |= b
            total += len(b)
        if union != self.base or total != len(self.base):
            raise BohrifyError("blocks must be disjoint and cover the base set")

    @property
    def name(self) -> str:
        return "/".join(sorted(block_label(b) for b in self.blocks))

    def block_of(self, x: str) -> frozenset:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)

    def refines(self, other: "Partition") -> bool:
        """Every block of self lies inside a block of other."""
        if self.base != other.base:
            raise BohrifyError("partitions over different base sets")
        return all(any(b <= c for c in other.blocks) for b in self.blocks)

    def algebra(self, prefix: str = "") -> FinCommAlgebra:
        return FinCommAlgebra([block_label(b) for b in self.blocks],
                              name=(prefix + self.name))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.base == other.base and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.base, self.blocks))

    def __repr__(self):
        return f"Partition({self.name})"


def one_block(base: Iterable[str]) -> Partition:
    base = list(base)
    return Partition(base, [base])


def discrete(base: Iterable[str]) -> Partition:
    base = list(base)
    return Partition(base, [[x] for x in base])


def set_partitions(base: Sequence[str]) -> list[Partition]:
    """All partitions of a finite set, generated deterministically."""
    items = sorted(base)
    if not items:
        raise BohrifyError("base set must be nonempty")

    def rec(rest, blocks):
        if not rest:
            yield [list(b) for b in blocks]
            return
        x, rest = rest[0], rest[1:]
        for i in range(len(blocks)):
            blocks[i].append(x)
            yield from rec(rest, blocks)
            blocks[i].pop()
        blocks.append([x])
        yield from rec(rest, blocks)
        blocks.pop()

    parts = [Partition(items, bs) for bs in rec(items, [])]
    return sorted(parts, key=lambda p: canon_key(p.blocks))


def coarsening_hom(coarse: Partition, fine: Partition, prefix: str = "") -> AlgebraHom:
    """The inclusion of block algebras along a refinement fine -> coarse."""
    if not fine.refines(coarse):
        raise BohrifyError(f"{fine.name} does not refine {coarse.name}")
    omap = {}
    for b in fine.blocks:
        target = next(c for c in coarse.blocks if b <= c)
        omap[block_label(b)] = block_label(target)
    return AlgebraHom(coarse.algebra(prefix), fine.algebra(prefix), omap)


class BohrDiagram:
    """A context diagram whose contexts are partitions of one base set."""

    def __init__(self, diagram: ContextDiagram, base: frozenset, partitions: Mapping[str, Partition]):
        self.diagram = diagram
        self.base = base
        self.partitions = dict(partitions)

    def __repr__(self):
        return f"BohrDiagram(base={sorted(self.base)}, contexts={len(self.partitions)})"


def _diagram_of_partitions(parts: Sequence[Partition], order_pairs=None) -> BohrDiagram:
    parts = sorted(set(parts), key=lambda p: canon_key(p.blocks))
    names = {}
    for p in parts:
        names[p.name] = p
    if order_pairs is None:
        le = [(p.name, q.name) for p in parts for q in parts if q.refines(p)]
    else:
        le = []
        for p, q in order_pairs:
            if not q.refines(p):
                raise InconsistentOrder(f"{q.name} does not refine {p.name}")
            le.append((p.name, q.name))
        bottom = one_block(sorted(parts[0].base))
        le.extend((bottom.name, p.name) for p in parts)
    poset = FinPoset(names, le)
    algebras = {name: part.algebra(prefix="") for name, part in names.items()}
    incl = {}
    for cname, dname in poset.comparable_pairs():
        if cname != dname:
            incl[(cname, dname)] = coarsening_hom(names[cname], names[dname])
    diagram = ContextDiagram(poset, algebras, incl)
    return BohrDiagram(diagram, parts[0].base, names)


def full_context_poset(n: int) -> BohrDiagram:
    """All partitions of an n-element base set, ordered by coarsening."""
    if not (1 <= n <= MAX_BASE):
        raise TooLarge(f"base size must be between 1 and {MAX_BASE}")
    base = [str(i + 1) for i in range(n)]
    return _diagram_of_partitions(set_partitions(base))


def user_contexts(partitions: Iterable[Partition], order=None) -> BohrDiagram:
    """A diagram over a declared family of partitions of one base set.

    Duplicates are dropped and the one-block bottom context is inserted if
    missing.  Without a declared order the full refinement order is used;
    a declared order must be refinement-consistent and is closed under the
    bottom context.
    """
    parts = list(partitions)
    if not parts:
        raise BohrifyError("need at least one partition")
    base = parts[0].base
    if len(base) > 6:
        raise TooLarge("base set too large for exact enumeration")
    for p in parts:
        if p.base != base:
            raise BohrifyError("partitions must share one base set")
    bottom = one_block(sorted(base))
    if bottom not in parts:
        parts.append(bottom)
    return _diagram_of_partitions(parts, order_pairs=order)


def bohr_from_json(doc: Mapping) -> BohrDiagram:
    """Build from `{"bohr": {"n": 3}}` or an explicit base-and-contexts form."""
    spec = doc.get("bohr")
    if not isinstance(spec, Mapping):
        raise SchemaError("bohr", "missing or not an object")
    if "n" in spec:
        n = spec["n"]
        if not isinstance(n, int):
            raise SchemaError("bohr.n", "must be an integer")
        try:
            return full_context_poset(n)
        except TooLarge as e:
            raise SchemaError("bohr.n", str(e)) from None
    base = spec.get("base")
    if not isinstance(base, list) or not all(isinstance(x, str) for x in base):
        raise SchemaError("bohr.base", "must be a list of labels")
    ctxs = spec.get("contexts")
    if not isinstance(ctxs, list):
        raise SchemaError("bohr.contexts", "must be a list of partitions")
    parts = []
    for i, blocks in enumerate(ctxs):
        if not isinstance(blocks, list):
            raise SchemaError(f"bohr.contexts[{i}]", "must be a list of blocks")
        try:
            parts.append(Partition(base, blocks))
        except BohrifyError as e:
            raise SchemaError(f"bohr.contexts[{i}]", str(e)) from None
    try:
        return user_contexts(parts)
    except BohrifyError as e:
        raise SchemaError("bohr.contexts", str(e)) from None


def check_componentwise_cstar(diagram: ContextDiagram, sample_entries=(-1, 0, 1)) -> Report:
    """Check a diagram fibre by fibre, the way functor-category models work.

    Each fibre must satisfy the *-algebra laws on a finite sample and each
    inclusion must be a unital *-homomorphism preserving positivity, which
    for these encodings comes down to a total surjective outcome map.
    """
    from .algebra import GaussRat, is_positive, selfadjoint_sample

    violations = []
    for c in diagram.poset.elements:
        alg = diagram.algebra(c)
        sample = selfadjoint_sample(alg, sample_entries) if alg.dim <= 3 else [
            alg.unit(), alg.zero(), -alg.unit(),
            *(alg.indicator([o], on=1, off=-1) for o in alg.outcomes),
        ]
        i_elt = alg.element([GaussRat(0, 1)] * alg.dim)
        mixed = [a + i_elt.scale(k) for a in sample[:4] for k in (0, 1)]
        unit = alg.unit()
        for a in mixed:
            if a * unit != a or unit * a != a:
                violations.append(f"{c!r}: unit law fails at {a!r}")
            if a.star().star() != a:
                violations.append(f"{c!r}: involution not involutive at {a!r}")
        for a in mixed[:4]:
            for b in mixed[:4]:
                if a * b != b * a:
                    violations.append(f"{c!r}: not commutative at {a!r}, {b!r}")
                if (a * b).star() != b.star() * a.star():
                    violations.append(f"{c!r}: involution not anti-multiplicative")
                if (a + b).star() != a.star() + b.star():
                    violations.append(f"{c!r}: involution not additive")
        for a in sample:
            if not is_positive(a * a):
                violations.append(f"{c!r}: square not positive at {a!r}")
    for cpair in diagram.poset.comparable_pairs():
        c, d = cpair
        if c == d:
            continue
        h = diagram.hom(c, d)
        src, tgt = diagram.algebra(c), diagram.algebra(d)
        dom = set(h.outcome_map)
        img = set(h.outcome_map.values())
        if dom != set(tgt.outcomes) or img != set(src.outcomes):
            violations.append(f"NotUnitalInclusion at {c!r} <= {d!r}: outcome map not a surjection onto the source outcomes")
            continue
        if h.apply(src.unit()) != tgt.unit():
            violations.append(f"{c!r} <= {d!r}: unit not preserved")
        sample = selfadjoint_sample(src, sample_entries) if src.dim <= 3 else [
            src.unit(), src.zero(), *(src.indicator([o], on=1, off=-1) for o in src.outcomes)]
        for a in sample:
            for b in sample[:5]:
                if h.apply(a + b) != h.apply(a) + h.apply(b):
                    violations.append(f"{c!r} <= {d!r}: addition not preserved")
                if h.apply(a * b) != h.apply(a) * h.apply(b):
                    violations.append(f"{c!r} <= {d!r}: multiplication not preserved")
            if h.apply(a.star()) != h.apply(a).star():
                violations.append(f"{c!r} <= {d!r}: star not preserved")
            if is_positive(a) and not is_positive(h.apply(a)):
                violations.append(f"{c!r} <= {d!r}: positivity not preserved at {a!r}")
    return Report(
        name="componentwise algebra-and-inclusion audit",
        passed=not violations,
        violations=tuple(violations),
        details={"contexts": len(diagram.poset)},
    )
