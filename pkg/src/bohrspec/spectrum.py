"""Point-free spectrum machinery on a finite distributive lattice.

The well-inside relation, normality, regular prime filters (the points),
rounded ideals (the opens), the bijection with regular ideals, and the
finite check that the rounded ideals really are the opens of the point set.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraHom, AlgElement, FinCommAlgebra, NotSelfAdjoint
from .lattice import DLattice, LatExpr, build_LA, eval_expr, induced_hom
from .order import canon_key, canon_sorted, downsets, upsets
from .reports import Report


class SpectrumError(Exception):
    pass


class ElementNotInLattice(SpectrumError):
    pass


class NotNormal(SpectrumError):
    pass


class NotWellInside(SpectrumError):
    pass


class SearchExhausted(SpectrumError):
    pass


def _require(lattice: DLattice, *xs):
    for x in xs:
        if x not in lattice:
            raise ElementNotInLattice(repr(x))


def well_inside(lattice: DLattice, a1, a):
    """A witness y with a v y = top and a1 & y = bottom, or None.

    Witnesses are searched in the lattice's canonical element order, so the
    first hit is reproducible.
    """
    _require(lattice, a1, a)
    for y in lattice.elements:
        if lattice.join(a, y) == lattice.top and lattice.meet(a1, y) == lattice.bottom:
            return y
    return None


def well_inside_pairs(lattice: DLattice) -> dict:
    """All well-inside pairs (a1, a) with their first witnesses, cached."""
    if "wi_pairs" not in lattice._cache:
        pairs = {}
        for a1 in lattice.elements:
            for a in lattice.elements:
                y = well_inside(lattice, a1, a)
                if y is not None:
                    pairs[(a1, a)] = y
        lattice._cache["wi_pairs"] = pairs
    return lattice._cache["wi_pairs"]


def is_well_inside(lattice: DLattice, a1, a) -> bool:
    _require(lattice, a1, a)
    return (a1, a) in well_inside_pairs(lattice)


def wi_below(lattice: DLattice, a) -> tuple:
    """All a1 well inside a, in canonical order."""
    _require(lattice, a)
    pairs = well_inside_pairs(lattice)
    return tuple(a1 for a1 in lattice.elements if (a1, a) in pairs)


def wi_closure(lattice: DLattice, members: Iterable) -> frozenset:
    """Everything well inside some member of the given set."""
    pairs = well_inside_pairs(lattice)
    ms = set(members)
    return frozenset(a1 for a1 in lattice.elements if any((a1, a) in pairs for a in ms))


def is_normal(lattice: DLattice):
    """Whether every cover a v b = top refines to a disjoint pair under it.

    Returns (True, None) or (False, (a, b)) with a failing cover.
    """
    if "normal" not in lattice._cache:
        result = (True, None)
        for a in lattice.elements:
            for b in lattice.elements:
                if lattice.join(a, b) != lattice.top:
                    continue
                found = False
                for y in lattice.elements:
                    if lattice.join(a, y) != lattice.top:
                        continue
                    for x in lattice.elements:
                        if lattice.join(x, b) == lattice.top and lattice.meet(x, y) == lattice.bottom:
                            found = True
                            break
                    if found:
                        break
                if not found:
                    result = (False, (a, b))
                    break
            if not result[0]:
                break
        lattice._cache["normal"] = result
    return lattice._cache["normal"]


def interpolate(lattice: DLattice, a1, a):
    """Some a2 with a1 well inside a2 well inside a (normal lattices only)."""
    ok, witness = is_normal(lattice)
    if not ok:
        raise NotNormal(f"counterexample cover {witness!r}")
    if not is_well_inside(lattice, a1, a):
        raise NotWellInside(f"{a1!r} not well inside {a!r}")
    pairs = well_inside_pairs(lattice)
    for a2 in lattice.elements:
        if (a1, a2) in pairs and (a2, a) in pairs:
            return a2
    raise SpectrumError("interpolation failed on a normal lattice")  # unreachable


class PrimeFilter:
    """An up-closed, meet-closed, proper subset that splits joins."""

    def __init__(self, lattice: DLattice, members: Iterable, *, check: bool = True):
        self.lattice = lattice
        self.members = frozenset(members)
        if check:
            self._validate()

    def _validate(self):
        L, m = self.lattice, self.members
        _require(L, *m)
        if L.top not in m:
            raise SpectrumError("filter must contain top")
        if L.bottom in m:
            raise SpectrumError("prime filter must not contain bottom")
        for a in m:
            for b in L.up_of(a):
                if b not in m:
                    raise SpectrumError(f"not up-closed at {a!r}")
            for b in m:
                if L.meet(a, b) not in m:
                    raise SpectrumError(f"not meet-closed at {a!r}, {b!r}")
        for a in L.elements:
            for b in L.elements:
                if L.join(a, b) in m and a not in m and b not in m:
                    raise SpectrumError(f"not prime at {a!r} v {b!r}")

    def __contains__(self, x):
        return x in self.members

    def __iter__(self):
        return iter(canon_sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        if not isinstance(other, PrimeFilter):
            return NotImplemented
        return self.lattice is other.lattice and self.members == other.members

    def __hash__(self):
        return hash((id(self.lattice), self.members))

    def __repr__(self):
        return "PrimeFilter({%s})" % ", ".join(repr(x) for x in canon_sorted(self.members))


class RoundedIdeal:
    """A lattice ideal equal to its own well-inside closure."""

    def __init__(self, lattice: DLattice, members: Iterable, *, check: bool = True):
        self.lattice = lattice
        self.members = frozenset(members)
        if check:
            self._validate()

    def _validate(self):
        L, m = self.lattice, self.members
        _require(L, *m)
        if L.bottom not in m:
            raise SpectrumError("ideal must contain bottom")
        for a in m:
            for b in L.down_of(a):
                if b not in m:
                    raise SpectrumError(f"not down-closed at {a!r}")
            for b in m:
                if L.join(a, b) not in m:
                    raise SpectrumError(f"not join-closed at {a!r}, {b!r}")
        if m != wi_closure(L, m):
            raise SpectrumError("ideal not rounded")

    def __contains__(self, x):
        return x in self.members

    def __iter__(self):
        return iter(canon_sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        if not isinstance(other, RoundedIdeal):
            return NotImplemented
        return self.lattice is other.lattice and self.members == other.members

    def __hash__(self):
        return hash((id(self.lattice), self.members))

    def __repr__(self):
        return "RoundedIdeal({%s})" % ", ".join(repr(x) for x in canon_sorted(self.members))


def _filter_candidates(lattice: DLattice):
    """All up-sets that are filters: nonempty, proper-ready, meet-closed."""
    for u in upsets(lattice.elements, lattice.leq):
        if not u or lattice.top not in u:
            continue
        ok = True
        for a in u:
            for b in u:
                if lattice.meet(a, b) not in u:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield u


def regular_prime_filters(lattice: DLattice) -> tuple[PrimeFilter, ...]:
    """The points: prime filters closed under shrinking along well-inside.

    Enumerated by filtering all up-sets of the lattice.
    """
    if "rspec" not in lattice._cache:
        pairs = well_inside_pairs(lattice)
        found = []
        for u in _filter_candidates(lattice):
            if lattice.bottom in u:
                continue
            prime = True
            for a in lattice.elements:
                for b in lattice.elements:
                    if lattice.join(a, b) in u and a not in u and b not in u:
                        prime = False
                        break
                if not prime:
                    break
            if not prime:
                continue
            regular = all(any((a1, a) in pairs for a1 in u) for a in u)
            if regular:
                found.append(PrimeFilter(lattice, u, check=False))
        lattice._cache["rspec"] = tuple(sorted(found, key=lambda f: canon_key(f.members)))
    return lattice._cache["rspec"]


def lattice_ideals(lattice: DLattice) -> tuple[frozenset, ...]:
    """All ideals (down-closed, join-closed, containing bottom), canonically."""
    if "ideals" not in lattice._cache:
        out = []
        for d in downsets(lattice.elements, lattice.leq):
            if lattice.bottom not in d:
                continue
            ok = True
            for a in d:
                for b in d:
                    if lattice.join(a, b) not in d:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(frozenset(d))
        lattice._cache["ideals"] = tuple(sorted(out, key=canon_key))
    return lattice._cache["ideals"]


def rounded_ideals(lattice: DLattice) -> tuple[RoundedIdeal, ...]:
    """The opens: ideals equal to their own well-inside closure."""
    if "ridl" not in lattice._cache:
        found = []
        for d in lattice_ideals(lattice):
            if d == wi_closure(lattice, d):
                found.append(RoundedIdeal(lattice, d, check=False))
        lattice._cache["ridl"] = tuple(sorted(found, key=lambda i: canon_key(i.members)))
    return lattice._cache["ridl"]


def regular_ideals(lattice: DLattice) -> tuple[frozenset, ...]:
    """Ideals J such that whenever everything well inside a lies in J, a does."""
    out = []
    for d in lattice_ideals(lattice):
        if all(a in d for a in lattice.elements if set(wi_below(lattice, a)) <= d):
            out.append(d)
    return tuple(sorted(out, key=canon_key))


class RegularRoundedBijection:
    """The mutually inverse maps between regular ideals and rounded ideals."""

    def __init__(self, lattice: DLattice, regular: tuple, rounded: tuple,
                 down_of: dict, reg_of: dict):
        self.lattice = lattice
        self.regular = regular
        self.rounded = rounded
        self.down_of = down_of   # regular ideal J -> its well-inside closure
        self.reg_of = reg_of     # rounded ideal I -> {a : everything well inside a is in I}


def regular_rounded_bijection(lattice: DLattice) -> RegularRoundedBijection:
    """Match regular ideals with rounded ideals and verify the round trips."""
    ok, witness = is_normal(lattice)
    if not ok:
        raise NotNormal(f"counterexample cover {witness!r}")
    regs = regular_ideals(lattice)
    rnds = tuple(i.members for i in rounded_ideals(lattice))
    down_of = {}
    for j in regs:
        image = wi_closure(lattice, j)
        if image not in rnds:
            raise SpectrumError(f"well-inside closure of a regular ideal escaped the rounded ideals: {j!r}")
        down_of[j] = image
    reg_of = {}
    for i in rnds:
        image = frozenset(a for a in lattice.elements if set(wi_below(lattice, a)) <= i)
        if image not in regs:
            raise SpectrumError(f"regularization of a rounded ideal escaped the regular ideals: {i!r}")
        reg_of[i] = image
    for j in regs:
        if reg_of[down_of[j]] != j:
            raise SpectrumError(f"round trip failed on regular ideal {j!r}")
    for i in rnds:
        if down_of[reg_of[i]] != i:
            raise SpectrumError(f"round trip failed on rounded ideal {i!r}")
    if len(regs) != len(rnds):
        raise SpectrumError("regular and rounded ideal counts differ")
    return RegularRoundedBijection(lattice, regs, rnds, down_of, reg_of)


def check_ridl_is_opens(lattice: DLattice) -> Report:
    """Realize the rounded ideals as the opens of the finite point space.

    Builds the space whose points are the regular prime filters and whose
    opens are the extents of rounded ideals (the points they meet); checks
    that the extent map is injective and its image is a topology of the
    right size.
    """
    ok, witness = is_normal(lattice)
    if not ok:
        raise NotNormal(f"counterexample cover {witness!r}")
    points = regular_prime_filters(lattice)
    rnds = rounded_ideals(lattice)
    violations = []
    extents = {}
    for i in rnds:
        ext = frozenset(k for k, x in enumerate(points) if i.members & x.members)
        if ext in extents.values():
            clash = [k for k, v in extents.items() if v == ext]
            violations.append(f"extent not injective: {i!r} collides with rounded ideal #{clash[0]}")
        extents[i.members] = ext
    image = set(extents.values())
    allpts = frozenset(range(len(points)))
    if frozenset() not in image:
        violations.append("empty open missing")
    if allpts not in image:
        violations.append("full open missing")
    for u in image:
        for v in image:
            if u | v not in image:
                violations.append(f"image not union-closed at {sorted(u)}, {sorted(v)}")
            if u & v not in image:
                violations.append(f"image not intersection-closed at {sorted(u)}, {sorted(v)}")
    if len(image) != len(rnds):
        violations.append(f"{len(image)} opens vs {len(rnds)} rounded ideals")
    return Report(
        name=f"rounded ideals are the opens of the point space of {lattice.name or 'lattice'}",
        passed=not violations,
        violations=tuple(violations),
        details={"points": len(points), "opens": len(image)},
    )


# ---------------------------------------------------------------------------
# Shrinking lemmas in the support lattice of an algebra

SHRINK_DEPTH = 64


def _bind_args(phi: LatExpr, args) -> dict[str, AlgElement]:
    names = phi.gen_names()
    if isinstance(args, Mapping):
        env = dict(args)
    else:
        seq = list(args)
        if len(seq) != len(names):
            raise ValueError(f"expression uses {len(names)} generators, got {len(seq)} arguments")
        env = dict(zip(names, seq))
    for name in names:
        if name not in env:
            raise ValueError(f"no argument bound to generator {name!r}")
        if not env[name].is_self_adjoint:
            raise NotSelfAdjoint(repr(env[name]))
    return env


def shrink_witness(algebra: FinCommAlgebra, v, phi: LatExpr, args,
                   max_depth: int = SHRINK_DEPTH) -> Fraction:
    """A positive rational r with v below phi evaluated at the arguments
    shifted down by r.

    Requires v well inside the unshifted value.  Searches r = 1/2, 1/4, ...
    descending and returns the first (largest) grid value that works; with
    rational data some power of one half always does, else the search
    reports exhaustion.
    """
    lattice, supp = build_LA(algebra)
    _require(lattice, v)
    env = _bind_args(phi, args)
    unit = algebra.unit()
    value = eval_expr(phi, {k: supp(a) for k, a in env.items()}, lattice)
    if not is_well_inside(lattice, v, value):
        raise NotWellInside(f"{v!r} not well inside {value!r}")
    for m in range(1, max_depth + 1):
        r = Fraction(1, 2 ** m)
        shifted = {k: supp(a - unit.scale(r)) for k, a in env.items()}
        if lattice.leq(v, eval_expr(phi, shifted, lattice)):
            return r
    raise SearchExhausted(f"no shift of the form 1/2^m with m <= {max_depth} works")


def push_well_inside(h: AlgebraHom, u, v):
    """Given v well inside the image of u, shrink u on the source side.

    Returns u1 well inside u with v below the image of u1.  Works by
    writing u as the support of an indicator and shrinking the indicator.
    """
    src_lat, src_supp = build_LA(h.source)
    tgt_lat, tgt_supp = build_LA(h.target)
    _require(src_lat, u)
    _require(tgt_lat, v)
    lf = induced_hom(h)
    if not is_well_inside(tgt_lat, v, lf(u)):
        raise NotWellInside(f"{v!r} not well inside the image of {u!r}")
    a_u = h.source.indicator(u, on=1, off=-1)
    from .lattice import Gen

    g = Gen("u")
    r = shrink_witness(h.target, v, g, {"u": h.apply(a_u)})
    u1 = src_supp(a_u - h.source.unit().scale(r))
    if not is_well_inside(src_lat, u1, u) or not tgt_lat.leq(v, lf(u1)):
        raise SpectrumError("shrink produced an invalid witness")  # unreachable
    return u1
