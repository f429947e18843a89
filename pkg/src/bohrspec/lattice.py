"""Finite bounded distributive lattices.

Free lattices on named generators (via antichain normal forms),
presentations by generators and relations (via congruence closure),
and the lattice of strict-positivity supports of a finite algebra.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import (
    AlgebraHom,
    AlgElement,
    FinCommAlgebra,
    NotSelfAdjoint,
)
from .order import FinPoset, canon_key, canon_sorted, downsets, upsets
from .reports import Report


class LatticeError(Exception):
    pass


class UnknownGenerator(LatticeError):
    pass


class TooManyGenerators(LatticeError):
    pass


class MismatchedLattice(LatticeError):
    pass


# ---------------------------------------------------------------------------
# Expressions


class LatExpr:
    """Abstract syntax for bounded-lattice expressions over named generators."""

    __slots__ = ()

    def __and__(self, other):
        return Meet(self, _as_expr(other))

    def __or__(self, other):
        return Join(self, _as_expr(other))

    def gen_names(self) -> tuple[str, ...]:
        """Generator names in order of first occurrence."""
        seen: list[str] = []

        def walk(e):
            if isinstance(e, Gen):
                if e.name not in seen:
                    seen.append(e.name)
            elif isinstance(e, (Meet, Join)):
                walk(e.left)
                walk(e.right)

        walk(self)
        return tuple(seen)


class Top(LatExpr):
    __slots__ = ()

    def __repr__(self):
        return "T"

    def __eq__(self, other):
        return isinstance(other, Top)

    def __hash__(self):
        return hash("T")


class Bot(LatExpr):
    __slots__ = ()

    def __repr__(self):
        return "F"

    def __eq__(self, other):
        return isinstance(other, Bot)

    def __hash__(self):
        return hash("F")


class Gen(LatExpr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("Gen is immutable")

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, Gen) and other.name == self.name

    def __hash__(self):
        return hash(("Gen", self.name))


class Meet(LatExpr):
    __slots__ = ("left", "right")

    def __init__(self, left: LatExpr, right: LatExpr):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __setattr__(self, name, value):
        raise AttributeError("Meet is immutable")

    def __repr__(self):
        return f"({self.left!r} & {self.right!r})"

    def __eq__(self, other):
        return isinstance(other, Meet) and (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash(("Meet", self.left, self.right))


class Join(LatExpr):
    __slots__ = ("left", "right")

    def __init__(self, left: LatExpr, right: LatExpr):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __setattr__(self, name, value):
        raise AttributeError("Join is immutable")

    def __repr__(self):
        return f"({self.left!r} v {self.right!r})"

    def __eq__(self, other):
        return isinstance(other, Join) and (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash(("Join", self.left, self.right))


TOP = Top()
BOT = Bot()


def _as_expr(x) -> LatExpr:
    if isinstance(x, LatExpr):
        return x
    if isinstance(x, str):
        return Gen(x)
    raise TypeError(f"not a lattice expression: {x!r}")


def eval_expr(expr: LatExpr, env: Mapping[str, object], lattice: "DLattice"):
    """Evaluate an expression in a lattice under a generator assignment."""
    if isinstance(expr, Top):
        return lattice.top
    if isinstance(expr, Bot):
        return lattice.bottom
    if isinstance(expr, Gen):
        if expr.name not in env:
            raise UnknownGenerator(expr.name)
        return env[expr.name]
    if isinstance(expr, Meet):
        return lattice.meet(eval_expr(expr.left, env, lattice), eval_expr(expr.right, env, lattice))
    if isinstance(expr, Join):
        return lattice.join(eval_expr(expr.left, env, lattice), eval_expr(expr.right, env, lattice))
    raise TypeError(f"not a lattice expression: {expr!r}")


# ---------------------------------------------------------------------------
# Query grammar:  expr := 'T' | 'F' | name | expr '&' expr | expr 'v' expr
#                         | '(' expr ')'
# with '&' binding tighter than 'v'; 'expr <= expr' allowed at top level only.


class ParseError(LatticeError):
    pass


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()&":
            tokens.append(c)
            i += 1
        elif text.startswith("<=", i):
            tokens.append("<=")
            i += 2
        elif c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"unexpected character {c!r} at position {i}")
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def parse_expr(self) -> LatExpr:
        left = self.parse_term()
        while self.peek() == "v":
            self.next()
            left = Join(left, self.parse_term())
        return left

    def parse_term(self) -> LatExpr:
        left = self.parse_atom()
        while self.peek() == "&":
            self.next()
            left = Meet(left, self.parse_atom())
        return left

    def parse_atom(self) -> LatExpr:
        tok = self.next()
        if tok == "(":
            inner = self.parse_expr()
            if self.next() != ")":
                raise ParseError("expected ')'")
            return inner
        if tok == "T":
            return TOP
        if tok == "F":
            return BOT
        if tok in ("v", "&", ")", "<="):
            raise ParseError(f"unexpected token {tok!r}")
        return Gen(tok)


def parse_expr(text: str) -> LatExpr:
    p = _Parser(_tokenize(text))
    expr = p.parse_expr()
    if p.peek() is not None:
        raise ParseError(f"trailing input at token {p.peek()!r}")
    return expr


def parse_query(text: str) -> tuple[LatExpr, LatExpr | None]:
    """Parse `expr` or `expr <= expr` (the comparison only at top level)."""
    p = _Parser(_tokenize(text))
    left = p.parse_expr()
    if p.peek() == "<=":
        p.next()
        right = p.parse_expr()
        if p.peek() is not None:
            raise ParseError(f"trailing input at token {p.peek()!r}")
        return left, right
    if p.peek() is not None:
        raise ParseError(f"trailing input at token {p.peek()!r}")
    return left, None


# ---------------------------------------------------------------------------
# Normal forms in the free bounded distributive lattice.
#
# An element is an irredundant join of meets of generators, stored as an
# antichain of meet-sets: a frozenset of frozensets of generator names in
# which no meet-set contains another.  Bottom is the empty antichain and
# top is {{}} (the empty meet).

NormalForm = frozenset


def nf_bot() -> NormalForm:
    return frozenset()


def nf_top() -> NormalForm:
    return frozenset({frozenset()})


def nf_gen(name: str) -> NormalForm:
    return frozenset({frozenset({name})})


def _minimize(sets: Iterable[frozenset]) -> NormalForm:
    pool = set(sets)
    keep = {s for s in pool if not any(t < s for t in pool)}
    return frozenset(keep)


def nf_join(a: NormalForm, b: NormalForm) -> NormalForm:
    return _minimize(a | b)


def nf_meet(a: NormalForm, b: NormalForm) -> NormalForm:
    return _minimize({s | t for s in a for t in b})


def nf_leq(a: NormalForm, b: NormalForm) -> bool:
    # each meet-set of a must lie below some meet-set of b (fewer conjuncts
    # denote a larger element, so "below" means containing it)
    return all(any(t <= s for t in b) for s in a)


def normalize(expr: LatExpr, generators: Iterable[str]) -> NormalForm:
    """Canonical form; two expressions agree iff they are equal freely."""
    gens = set(generators)
    for name in expr.gen_names():
        if name not in gens:
            raise UnknownGenerator(name)

    def walk(e) -> NormalForm:
        if isinstance(e, Top):
            return nf_top()
        if isinstance(e, Bot):
            return nf_bot()
        if isinstance(e, Gen):
            return nf_gen(e.name)
        if isinstance(e, Meet):
            return nf_meet(walk(e.left), walk(e.right))
        if isinstance(e, Join):
            return nf_join(walk(e.left), walk(e.right))
        raise TypeError(f"not a lattice expression: {e!r}")

    return walk(expr)


# ---------------------------------------------------------------------------
# Concrete finite lattices


class DLattice:
    """A finite bounded distributive lattice with decidable order.

    Element values are arbitrary hashables; they are kept in canonical
    order, and meets/joins are tabulated at construction.
    """

    def __init__(self, elements: Iterable, leq: Callable, meet: Callable,
                 join: Callable, *, check: bool = True, name: str = ""):
        self.name = name
        self._elements = tuple(canon_sorted(elements))
        if not self._elements:
            raise LatticeError("lattice must be nonempty")
        if len(set(self._elements)) != len(self._elements):
            raise LatticeError("duplicate lattice elements")
        self._index = {x: i for i, x in enumerate(self._elements)}
        n = len(self._elements)
        self._leq = [[False] * n for _ in range(n)]
        for i, a in enumerate(self._elements):
            for j, b in enumerate(self._elements):
                self._leq[i][j] = bool(leq(a, b))
        self._meet = [[0] * n for _ in range(n)]
        self._join = [[0] * n for _ in range(n)]
        for i, a in enumerate(self._elements):
            for j, b in enumerate(self._elements):
                m = meet(a, b)
                v = join(a, b)
                if m not in self._index or v not in self._index:
                    raise LatticeError("meet/join left the element set")
                self._meet[i][j] = self._index[m]
                self._join[i][j] = self._index[v]
        bots = [i for i in range(n) if all(self._leq[i][j] for j in range(n))]
        tops = [i for i in range(n) if all(self._leq[j][i] for j in range(n))]
        if len(bots) != 1 or len(tops) != 1:
            raise LatticeError("lattice must be bounded")
        self._bot = bots[0]
        self._top = tops[0]
        self._cache: dict = {}
        if check:
            self._check()

    @classmethod
    def from_leq(cls, elements: Iterable, leq: Callable, *, check: bool = True,
                 name: str = "") -> "DLattice":
        """Build from the order alone, computing meets and joins as glb/lub."""
        elems = tuple(canon_sorted(elements))

        def glb(a, b):
            cands = [c for c in elems if leq(c, a) and leq(c, b)]
            best = [c for c in cands if all(leq(d, c) for d in cands)]
            if len(best) != 1:
                raise LatticeError(f"no meet for {a!r}, {b!r}")
            return best[0]

        def lub(a, b):
            cands = [c for c in elems if leq(a, c) and leq(b, c)]
            best = [c for c in cands if all(leq(c, d) for d in cands)]
            if len(best) != 1:
                raise LatticeError(f"no join for {a!r}, {b!r}")
            return best[0]

        return cls(elems, leq, glb, lub, check=check, name=name)

    def _check(self):
        n = len(self._elements)
        for i in range(n):
            if not self._leq[i][i]:
                raise LatticeError("order not reflexive")
            for j in range(n):
                if self._leq[i][j] and self._leq[j][i] and i != j:
                    raise LatticeError("order not antisymmetric")
                m, v = self._meet[i][j], self._join[i][j]
                if m != self._meet[j][i] or v != self._join[j][i]:
                    raise LatticeError("meet/join not commutative")
                if not (self._leq[m][i] and self._leq[m][j]):
                    raise LatticeError("meet not a lower bound")
                if not (self._leq[i][v] and self._leq[j][v]):
                    raise LatticeError("join not an upper bound")
                for k in range(n):
                    if self._leq[k][i] and self._leq[k][j] and not self._leq[k][m]:
                        raise LatticeError("meet not greatest lower bound")
                    if self._leq[i][k] and self._leq[j][k] and not self._leq[v][k]:
                        raise LatticeError("join not least upper bound")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    lhs = self._meet[i][self._join[j][k]]
                    rhs = self._join[self._meet[i][j]][self._meet[i][k]]
                    if lhs != rhs:
                        raise LatticeError("lattice not distributive")

    # -- element-level API ---------------------------------------------------

    @property
    def elements(self) -> tuple:
        return self._elements

    @property
    def top(self):
        return self._elements[self._top]

    @property
    def bottom(self):
        return self._elements[self._bot]

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __contains__(self, x):
        return x in self._index

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"element not in lattice: {x!r}") from None

    def leq(self, a, b) -> bool:
        return self._leq[self.index(a)][self.index(b)]

    def meet(self, a, b):
        return self._elements[self._meet[self.index(a)][self.index(b)]]

    def join(self, a, b):
        return self._elements[self._join[self.index(a)][self.index(b)]]

    def meet_all(self, xs: Iterable):
        out = self._top
        for x in xs:
            out = self._meet[out][self.index(x)]
        return self._elements[out]

    def join_all(self, xs: Iterable):
        out = self._bot
        for x in xs:
            out = self._join[out][self.index(x)]
        return self._elements[out]

    def down_of(self, a) -> tuple:
        i = self.index(a)
        return tuple(x for j, x in enumerate(self._elements) if self._leq[j][i])

    def up_of(self, a) -> tuple:
        i = self.index(a)
        return tuple(x for j, x in enumerate(self._elements) if self._leq[i][j])

    def __repr__(self):
        label = self.name or "DLattice"
        return f"<{label}: {len(self._elements)} elements>"


def powerset_lattice(universe: Iterable[str], name: str = "") -> DLattice:
    """The Boolean lattice of all subsets of a finite set."""
    base = tuple(sorted(universe))
    subsets = []
    for d in downsets(base, lambda a, b: a == b):
        subsets.append(frozenset(d))
    return DLattice(
        subsets,
        lambda a, b: a <= b,
        lambda a, b: a & b,
        lambda a, b: a | b,
        check=False,
        name=name or "2^" + str(len(base)),
    )


def downset_lattice(poset: FinPoset, name: str = "") -> DLattice:
    """The distributive lattice of down-closed subsets of a finite poset."""
    elems = [frozenset(d) for d in downsets(poset.elements, poset.leq)]
    return DLattice(
        elems,
        lambda a, b: a <= b,
        lambda a, b: a & b,
        lambda a, b: a | b,
        check=False,
        name=name or f"Dn({len(poset)})",
    )


def chain_lattice(n: int) -> DLattice:
    """The n-element chain 0 < 1 < ... < n-1."""
    if n < 1:
        raise LatticeError("chain must be nonempty")
    return DLattice(
        range(n),
        lambda a, b: a <= b,
        min,
        max,
        check=False,
        name=f"chain{n}",
    )


# ---------------------------------------------------------------------------
# Free lattices and presentations

MAX_FREE_GENERATORS = 6


def free_distributive_lattice(generators: Sequence[str]) -> tuple[DLattice, dict]:
    """The free bounded distributive lattice on named generators.

    Elements are antichain normal forms; the size is the Dedekind number
    of the generator count, so more than MAX_FREE_GENERATORS is refused.
    """
    gens = tuple(generators)
    if len(set(gens)) != len(gens):
        raise LatticeError("duplicate generators")
    if len(gens) > MAX_FREE_GENERATORS:
        raise TooManyGenerators(f"{len(gens)} generators; the free lattice would be astronomically large")
    subsets = [frozenset(s) for s in downsets(gens, lambda a, b: a == b)]
    # antichains of the subset order, read off as minimal members of up-sets
    antichains = []
    for u in upsets(subsets, lambda a, b: a <= b):
        minimal = frozenset(s for s in u if not any(t < s for t in u))
        antichains.append(minimal)
    lattice = DLattice(
        antichains,
        nf_leq,
        nf_meet,
        nf_join,
        check=False,
        name=f"Free({','.join(gens)})",
    )
    genmap = {g: nf_gen(g) for g in gens}
    return lattice, genmap


class Presentation:
    """Generators plus equational relations between lattice expressions."""

    def __init__(self, generators: Sequence[str], relations: Iterable[tuple[LatExpr, LatExpr]] = ()):
        self.generators = tuple(generators)
        self.relations = tuple((_as_expr(l), _as_expr(r)) for l, r in relations)
        gens = set(self.generators)
        for l, r in self.relations:
            for name in l.gen_names() + r.gen_names():
                if name not in gens:
                    raise UnknownGenerator(name)

    @classmethod
    def from_json(cls, doc: Mapping) -> "Presentation":
        gens = doc.get("generators")
        rels = doc.get("relations", [])
        if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
            raise LatticeError("presentation 'generators' must be a list of names")
        pairs = []
        for i, pair in enumerate(rels):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise LatticeError(f"relation #{i} must be a pair of expressions")
            pairs.append((parse_expr(pair[0]), parse_expr(pair[1])))
        return cls(gens, pairs)


class PresentedLattice:
    """A quotient of a free lattice, with the universal quotient map."""

    def __init__(self, presentation: Presentation, lattice: DLattice,
                 class_of: Mapping[NormalForm, frozenset]):
        self.presentation = presentation
        self.lattice = lattice
        self._class_of = dict(class_of)

    def quotient(self, expr: LatExpr) -> frozenset:
        """Map an expression to its congruence class in the quotient."""
        nf = normalize(expr, self.presentation.generators)
        return self._class_of[nf]

    def holds(self, left: LatExpr, right: LatExpr | None = None) -> bool:
        """Decide `left = right` (or `left <= right` when comparing)."""
        if right is None:
            raise LatticeError("need two expressions to compare")
        return self.lattice.leq(self.quotient(left), self.quotient(right))


def _congruence_closure(free: DLattice, seed_pairs: list[tuple[int, int]]) -> list[int]:
    """Smallest lattice congruence containing the seed pairs (union-find)."""
    n = len(free.elements)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    work = list(seed_pairs)
    while work:
        i, j = work.pop()
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        if ri > rj:
            ri, rj = rj, ri
        parent[rj] = ri
        for k in range(n):
            work.append((free._meet[ri][k], free._meet[rj][k]))
            work.append((free._join[ri][k], free._join[rj][k]))
    return [find(i) for i in range(n)]


def present(p: Presentation) -> PresentedLattice:
    """Quotient the free bounded distributive lattice by the relations.

    The result is universal: the quotient map identifies exactly the pairs
    forced by the congruence the relations generate.
    """
    free, genmap = free_distributive_lattice(p.generators)
    env = dict(genmap)
    seeds = []
    for l, r in p.relations:
        li = free.index(normalize(l, p.generators))
        ri = free.index(normalize(r, p.generators))
        seeds.append((li, ri))
    roots = _congruence_closure(free, seeds)
    classes: dict[int, set] = {}
    for i, root in enumerate(roots):
        classes.setdefault(root, set()).add(free.elements[i])
    class_elems = {root: frozenset(members) for root, members in classes.items()}
    class_of = {free.elements[i]: class_elems[roots[i]] for i in range(len(free.elements))}
    reps = {c: free.elements[min(free.index(m) for m in c)] for c in class_elems.values()}

    def q_leq(a, b):
        return roots[free.index(free.meet(reps[a], reps[b]))] == roots[free.index(reps[a])]

    def q_meet(a, b):
        return class_of[free.elements[roots[free.index(free.meet(reps[a], reps[b]))]]]

    def q_join(a, b):
        return class_of[free.elements[roots[free.index(free.join(reps[a], reps[b]))]]]

    lattice = DLattice(
        set(class_elems.values()),
        q_leq,
        q_meet,
        q_join,
        check=False,
        name=f"Presented({','.join(p.generators)})",
    )
    return PresentedLattice(p, lattice, class_of)


# ---------------------------------------------------------------------------
# The support lattice of a finite commutative algebra

_LA_CACHE: dict[FinCommAlgebra, tuple[DLattice, Callable]] = {}


def support(a: AlgElement) -> frozenset:
    """The set of outcomes where a self-adjoint element is strictly positive."""
    if not a.is_self_adjoint:
        raise NotSelfAdjoint(repr(a))
    return frozenset(o for o in a.parent.outcomes if a.value(o).re > 0)


def build_LA(algebra: FinCommAlgebra) -> tuple[DLattice, Callable[[AlgElement], frozenset]]:
    """The lattice generated by the strict-positivity supports of self-adjoints.

    For a full finite function algebra the supports generate the whole
    powerset of the outcome set: the indicator of each singleton (one on
    the outcome, minus one elsewhere) has exactly that singleton as its
    support, which the construction verifies.
    """
    if algebra in _LA_CACHE:
        return _LA_CACHE[algebra]
    for o in algebra.outcomes:
        probe = algebra.indicator([o], on=1, off=-1)
        if support(probe) != frozenset({o}):
            raise LatticeError(f"support generation failed at outcome {o!r}")
    lattice = powerset_lattice(algebra.outcomes, name=f"L({algebra.name})")
    _LA_CACHE[algebra] = (lattice, support)
    return lattice, support


def check_LA_axioms(lattice: DLattice, gen_map: Callable, algebra: FinCommAlgebra,
                    sample: Iterable[AlgElement]) -> Report:
    """Audit the support lattice against the defining inequalities.

    Over all pairs from the sample this checks disjointness of an element
    and its negation, collapse of nonpositive elements, subadditivity,
    the unit law, and the product law.
    """
    sample = list(sample)
    bot = lattice.bottom
    top = lattice.top
    violations = []

    def note(msg):
        violations.append(msg)

    if gen_map(algebra.unit()) != top:
        note("unit: D(1) != top")
    for a in sample:
        da, dna = gen_map(a), gen_map(-a)
        if lattice.meet(da, dna) != bot:
            note(f"disjointness: D(a) & D(-a) != bot for a={a!r}")
        if all(v.re <= 0 for v in a.values.values()) and da != bot:
            note(f"nonpositive: D(a) != bot for a={a!r} <= 0")
        for b in sample:
            db, dnb = gen_map(b), gen_map(-b)
            if not lattice.leq(gen_map(a + b), lattice.join(da, db)):
                note(f"subadditivity fails for a={a!r}, b={b!r}")
            lhs = gen_map(a * b)
            rhs = lattice.join(lattice.meet(da, db), lattice.meet(dna, dnb))
            if lhs != rhs:
                note(f"product law fails for a={a!r}, b={b!r}")
    return Report(
        name=f"support-lattice axioms for {algebra.name}",
        passed=not violations,
        violations=tuple(violations),
        details={"sample_size": len(sample)},
    )


class LatticeHom:
    """A map between finite lattices preserving top, bottom, meet and join."""

    def __init__(self, source: DLattice, target: DLattice, mapping: Mapping,
                 *, check: bool = True):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if check:
            self._validate()

    def _validate(self):
        if set(self.mapping) != set(self.source.elements):
            raise MismatchedLattice("mapping must be total on the source")
        for v in self.mapping.values():
            if v not in self.target:
                raise MismatchedLattice(f"image {v!r} not in target lattice")
        if self.mapping[self.source.top] != self.target.top:
            raise MismatchedLattice("top not preserved")
        if self.mapping[self.source.bottom] != self.target.bottom:
            raise MismatchedLattice("bottom not preserved")
        for a in self.source.elements:
            for b in self.source.elements:
                if self.mapping[self.source.meet(a, b)] != self.target.meet(self.mapping[a], self.mapping[b]):
                    raise MismatchedLattice(f"meet not preserved at {a!r}, {b!r}")
                if self.mapping[self.source.join(a, b)] != self.target.join(self.mapping[a], self.mapping[b]):
                    raise MismatchedLattice(f"join not preserved at {a!r}, {b!r}")

    def __call__(self, x):
        if x not in self.mapping:
            raise MismatchedLattice(f"element not in source lattice: {x!r}")
        return self.mapping[x]

    @classmethod
    def identity(cls, lattice: DLattice) -> "LatticeHom":
        return cls(lattice, lattice, {x: x for x in lattice.elements}, check=False)

    def compose(self, inner: "LatticeHom") -> "LatticeHom":
        if inner.target is not self.source and inner.target.elements != self.source.elements:
            raise MismatchedLattice("homs not composable")
        return LatticeHom(inner.source, self.target,
                          {x: self(inner(x)) for x in inner.source.elements}, check=False)

    def __eq__(self, other):
        if not isinstance(other, LatticeHom):
            return NotImplemented
        return (self.source.elements == other.source.elements
                and self.target.elements == other.target.elements
                and self.mapping == other.mapping)

    def __repr__(self):
        return f"LatticeHom({self.source!r} -> {self.target!r})"


def induced_hom(h: AlgebraHom) -> LatticeHom:
    """The lattice map taking the support of a to the support of its image.

    On the powerset realizations this is inverse image along the outcome
    map, which preserves all the structure.
    """
    src_lat, _ = build_LA(h.source)
    tgt_lat, _ = build_LA(h.target)
    mapping = {}
    for s in src_lat.elements:
        mapping[s] = frozenset(o for o in h.target.outcomes if h.outcome_map[o] in s)
    return LatticeHom(src_lat, tgt_lat, mapping, check=False)
