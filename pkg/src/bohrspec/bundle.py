"""Diagrams of algebras over a finite poset of contexts and their spectra.

The total spectrum of such a diagram is a bundle over the ideals of the
context poset.  Its points pair a poset ideal with a compatible family of
regular prime filters; its opens are monotone families of rounded ideals;
and the fibrewise maps between rounded ideals make the bundle an
opfibration, which is checked here at finite scale.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping

from .algebra import AlgebraHom, FinCommAlgebra
from .lattice import DLattice, LatticeHom, build_LA, induced_hom
from .order import (
    FinPoset,
    PosetIdeal,
    canon_key,
    canon_sorted,
    ideals,
    monotone_maps,
    principal_ideal,
)
from .reports import Report, SchemaError
from .spectrum import (
    PrimeFilter,
    RoundedIdeal,
    lattice_ideals,
    regular_prime_filters,
    rounded_ideals,
    well_inside_pairs,
    wi_closure,
)


class BundleError(Exception):
    pass


class InvalidDiagram(BundleError):
    pass


class DiagramMismatch(BundleError):
    pass


class NotMonotone(BundleError):
    pass


class NotComparable(BundleError):
    pass


class ContextDiagram:
    """A functor from a finite poset of contexts to finite algebras.

    Each order pair carries a unital inclusion; identities are implicit and
    missing composites are filled in (and cross-checked) by composition.
    """

    def __init__(self, poset: FinPoset, algebras: Mapping, inclusions: Mapping,
                 *, check: bool = True):
        self.poset = poset
        self.algebras = dict(algebras)
        if set(self.algebras) != set(poset.elements):
            raise InvalidDiagram("algebras must be assigned to exactly the poset elements")
        homs: dict = {}
        for c in poset.elements:
            homs[(c, c)] = AlgebraHom.identity(self.algebras[c])
        for (c, d), h in inclusions.items():
            if not poset.leq(c, d):
                raise InvalidDiagram(f"inclusion given for non-comparable pair {c!r} <= {d!r}")
            if check and (h.source != self.algebras[c] or h.target != self.algebras[d]):
                raise InvalidDiagram(f"inclusion endpoints mismatch at {c!r} <= {d!r}")
            if (c, d) in homs and homs[(c, d)] != h:
                raise InvalidDiagram(f"conflicting inclusions at {c!r} <= {d!r}")
            homs[(c, d)] = h
        changed = True
        while changed:
            changed = False
            for (a, b1) in list(homs):
                for (b2, c) in list(homs):
                    if b1 != b2 or a == b1 == c:
                        continue
                    comp = homs[(b2, c)].compose(homs[(a, b1)])
                    if (a, c) in homs:
                        if check and homs[(a, c)] != comp:
                            raise InvalidDiagram(f"composite inclusions disagree along {a!r} <= {b1!r} <= {c!r}")
                    else:
                        homs[(a, c)] = comp
                        changed = True
        if check:
            for a, b in poset.comparable_pairs():
                if (a, b) not in homs:
                    raise InvalidDiagram(f"no inclusion reachable for {a!r} <= {b!r}")
        self._homs = homs
        self._lat_homs: dict = {}
        self._cache: dict = {}

    def algebra(self, c) -> FinCommAlgebra:
        return self.algebras[c]

    def lattice(self, c) -> DLattice:
        return build_LA(self.algebras[c])[0]

    def supp(self, c) -> Callable:
        return build_LA(self.algebras[c])[1]

    def hom(self, c, d) -> AlgebraHom:
        if (c, d) not in self._homs:
            raise NotComparable(f"{c!r} <= {d!r} does not hold")
        return self._homs[(c, d)]

    def lat_hom(self, c, d) -> LatticeHom:
        if (c, d) not in self._lat_homs:
            self._lat_homs[(c, d)] = induced_hom(self.hom(c, d))
        return self._lat_homs[(c, d)]

    def restrict(self, subset: Iterable) -> "ContextDiagram":
        sub = set(subset)
        poset = self.poset.restrict(sub)
        algebras = {c: self.algebras[c] for c in sub}
        incl = {(c, d): h for (c, d), h in self._homs.items() if c in sub and d in sub and c != d}
        return ContextDiagram(poset, algebras, incl, check=False)

    def __eq__(self, other):
        if not isinstance(other, ContextDiagram):
            return NotImplemented
        return (self.poset == other.poset and self.algebras == other.algebras
                and self._homs == other._homs)

    def __hash__(self):
        return hash((self.poset, tuple(sorted(self.algebras.items(), key=lambda kv: canon_key(kv[0])))))

    def __repr__(self):
        return f"ContextDiagram({len(self.poset)} contexts)"


def diagram_from_json(doc: Mapping) -> ContextDiagram:
    """Load a diagram from its JSON form, with path-labelled schema errors."""
    if not isinstance(doc, Mapping):
        raise SchemaError("", "document must be an object")
    poset_doc = doc.get("poset")
    if not isinstance(poset_doc, Mapping):
        raise SchemaError("poset", "missing or not an object")
    elements = poset_doc.get("elements")
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise SchemaError("poset.elements", "must be a list of strings")
    le = poset_doc.get("le", [])
    if not isinstance(le, list):
        raise SchemaError("poset.le", "must be a list of pairs")
    pairs = []
    for i, pair in enumerate(le):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise SchemaError(f"poset.le[{i}]", "must be a pair of element names")
        if pair[0] not in elements or pair[1] not in elements:
            raise SchemaError(f"poset.le[{i}]", f"unknown element in {pair!r}")
        pairs.append((pair[0], pair[1]))
    try:
        poset = FinPoset(elements, pairs)
    except ValueError as e:
        raise SchemaError("poset.le", str(e)) from None
    algebras_doc = doc.get("algebras")
    if not isinstance(algebras_doc, Mapping):
        raise SchemaError("algebras", "missing or not an object")
    algebras = {}
    for name in elements:
        spec = algebras_doc.get(name)
        if not isinstance(spec, Mapping):
            raise SchemaError(f"algebras.{name}", "missing or not an object")
        outs = spec.get("outcomes")
        if not isinstance(outs, list) or not outs or not all(isinstance(o, str) for o in outs):
            raise SchemaError(f"algebras.{name}.outcomes", "must be a nonempty list of strings")
        try:
            algebras[name] = FinCommAlgebra(outs, name=name)
        except ValueError as e:
            raise SchemaError(f"algebras.{name}.outcomes", str(e)) from None
    extra = set(algebras_doc) - set(elements)
    if extra:
        raise SchemaError(f"algebras.{sorted(extra)[0]}", "algebra for unknown context")
    incl_doc = doc.get("inclusions", {})
    if not isinstance(incl_doc, Mapping):
        raise SchemaError("inclusions", "must be an object")
    inclusions = {}
    for key, spec in incl_doc.items():
        if "<=" not in key:
            raise SchemaError(f"inclusions.{key}", "key must look like 'C<=D'")
        cname, dname = key.split("<=", 1)
        if cname not in elements or dname not in elements:
            raise SchemaError(f"inclusions.{key}", "unknown context name")
        if not isinstance(spec, Mapping) or not isinstance(spec.get("outcome_map"), Mapping):
            raise SchemaError(f"inclusions.{key}.outcome_map", "missing or not an object")
        omap = spec["outcome_map"]
        try:
            inclusions[(cname, dname)] = AlgebraHom(algebras[cname], algebras[dname], omap)
        except Exception as e:
            raise SchemaError(f"inclusions.{key}.outcome_map", str(e)) from None
    try:
        return ContextDiagram(poset, algebras, inclusions)
    except InvalidDiagram as e:
        raise SchemaError("inclusions", str(e)) from None


# ---------------------------------------------------------------------------
# Points


class SpectrumPoint:
    """A poset ideal together with a compatible family of spectrum points."""

    def __init__(self, diagram: ContextDiagram, ideal: PosetIdeal,
                 filters: Mapping, *, check: bool = True):
        self.diagram = diagram
        self.ideal = ideal
        self.filters = dict(filters)
        if check:
            self._validate()
        self._key = (
            canon_key(self.ideal.members),
            tuple((canon_key(c), canon_key(self.filters[c].members))
                  for c in canon_sorted(self.filters)),
        )

    def _validate(self):
        if set(self.filters) != self.ideal.members:
            raise InvalidDiagram("filters must be indexed by exactly the ideal members")
        for c, x in self.filters.items():
            if x not in regular_prime_filters(self.diagram.lattice(c)):
                raise InvalidDiagram(f"filter at {c!r} is not a regular prime filter")
        for c in self.ideal.members:
            for d in self.ideal.members:
                if c != d and self.diagram.poset.leq(c, d):
                    lh = self.diagram.lat_hom(c, d)
                    for a in self.diagram.lattice(c).elements:
                        if (a in self.filters[c].members) != (lh(a) in self.filters[d].members):
                            raise InvalidDiagram(f"incompatible filters along {c!r} <= {d!r} at {a!r}")

    def filter_at(self, c) -> PrimeFilter:
        return self.filters[c]

    def in_subbasic(self, c, a) -> bool:
        """Whether the point lies in the subbasic open named by (c, a)."""
        return c in self.ideal.members and a in self.filters[c].members

    def __eq__(self, other):
        if not isinstance(other, SpectrumPoint):
            return NotImplemented
        return (self.diagram == other.diagram and self.ideal.members == other.ideal.members
                and {c: x.members for c, x in self.filters.items()}
                == {c: x.members for c, x in other.filters.items()})

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        parts = ", ".join(f"{c!r}: {sorted(map(canon_key, x.members))!r}" for c, x in sorted(
            self.filters.items(), key=lambda kv: canon_key(kv[0])))
        return f"SpectrumPoint(ideal={canon_sorted(self.ideal.members)!r})"


def _compatible(diagram: ContextDiagram, c, d, xc: frozenset, xd: frozenset) -> bool:
    """Filter compatibility along c <= d: membership matches across the hom."""
    lh = diagram.lat_hom(c, d)
    return all((a in xc) == (lh(a) in xd) for a in diagram.lattice(c).elements)


def external_points_over(diagram: ContextDiagram, ideal: PosetIdeal) -> tuple[SpectrumPoint, ...]:
    """All points over one ideal, by compatibility-pruned enumeration."""
    ctxs = canon_sorted(ideal.members)
    choices = {c: regular_prime_filters(diagram.lattice(c)) for c in ctxs}
    out = []

    def rec(i: int, assign: dict):
        if i == len(ctxs):
            out.append(SpectrumPoint(diagram, ideal, dict(assign), check=False))
            return
        c = ctxs[i]
        for x in choices[c]:
            ok = True
            for c2, x2 in assign.items():
                if diagram.poset.leq(c2, c) and not _compatible(diagram, c2, c, x2.members, x.members):
                    ok = False
                    break
                if diagram.poset.leq(c, c2) and not _compatible(diagram, c, c2, x.members, x2.members):
                    ok = False
                    break
            if ok:
                assign[c] = x
                rec(i + 1, assign)
                del assign[c]

    rec(0, {})
    return tuple(sorted(out, key=lambda p: p._key))


def external_points(diagram: ContextDiagram) -> tuple[SpectrumPoint, ...]:
    """All points of the total spectrum, in canonical order."""
    if "points" not in diagram._cache:
        out = []
        for ideal in ideals(diagram.poset):
            out.extend(external_points_over(diagram, ideal))
        diagram._cache["points"] = tuple(sorted(out, key=lambda p: p._key))
    return diagram._cache["points"]


def external_points_via_top(diagram: ContextDiagram, ideal: PosetIdeal) -> tuple[SpectrumPoint, ...]:
    """The colimit shortcut: a finite directed ideal has a top, and a point
    over the ideal is determined by a filter there, restricted inward."""
    top = ideal.top
    if top is None:
        raise InvalidDiagram("finite directed ideal must have a top")
    out = []
    for x in regular_prime_filters(diagram.lattice(top)):
        filters = {}
        for c in ideal.members:
            lh = diagram.lat_hom(c, top)
            members = frozenset(a for a in diagram.lattice(c).elements if lh(a) in x.members)
            filters[c] = PrimeFilter(diagram.lattice(c), members, check=False)
        out.append(SpectrumPoint(diagram, ideal, filters, check=True))
    return tuple(sorted(out, key=lambda p: p._key))


def check_colimit_shortcut(diagram: ContextDiagram) -> Report:
    """Direct enumeration and the top-filter shortcut agree, ideal by ideal."""
    violations = []
    counts = {}
    for ideal in ideals(diagram.poset):
        direct = external_points_over(diagram, ideal)
        shortcut = external_points_via_top(diagram, ideal)
        key = ",".join(str(c) for c in canon_sorted(ideal.members))
        counts[key] = len(direct)
        if direct != shortcut:
            violations.append(f"ideal {key}: direct {len(direct)} points vs shortcut {len(shortcut)}")
    return Report(
        name="per-ideal point enumeration matches the colimit shortcut",
        passed=not violations,
        violations=tuple(violations),
        details={"per_ideal": counts},
    )


# ---------------------------------------------------------------------------
# Opens


class ExternalOpen:
    """A monotone family assigning a rounded ideal to every context."""

    def __init__(self, diagram: ContextDiagram, family: Mapping, *, check: bool = True):
        self.diagram = diagram
        self.family = {c: frozenset(v) for c, v in family.items()}
        if check:
            self._validate()
        self._key = tuple((canon_key(c), canon_key(self.family[c]))
                          for c in canon_sorted(self.family))

    def _validate(self):
        if set(self.family) != set(self.diagram.poset.elements):
            raise InvalidDiagram("family must be indexed by all contexts")
        for c, members in self.family.items():
            RoundedIdeal(self.diagram.lattice(c), members)
        for c, d in self.diagram.poset.comparable_pairs():
            if c == d:
                continue
            lh = self.diagram.lat_hom(c, d)
            if not {lh(a) for a in self.family[c]} <= self.family[d]:
                raise InvalidDiagram(f"family not monotone along {c!r} <= {d!r}")

    def at(self, c) -> frozenset:
        return self.family[c]

    def leq(self, other: "ExternalOpen") -> bool:
        return all(self.family[c] <= other.family[c] for c in self.family)

    def __eq__(self, other):
        if not isinstance(other, ExternalOpen):
            return NotImplemented
        return self.diagram == other.diagram and self.family == other.family

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"ExternalOpen({self._key!r})"


def external_opens(diagram: ContextDiagram) -> tuple[ExternalOpen, ...]:
    """All opens of the total spectrum: monotone rounded-ideal families."""
    if "opens" not in diagram._cache:
        ctxs = list(diagram.poset.linear_extension())
        choices = {c: [i.members for i in rounded_ideals(diagram.lattice(c))] for c in ctxs}
        out = []

        def rec(i: int, assign: dict):
            if i == len(ctxs):
                out.append(ExternalOpen(diagram, dict(assign), check=False))
                return
            c = ctxs[i]
            for u in choices[c]:
                ok = True
                for c2, u2 in assign.items():
                    if diagram.poset.leq(c2, c):
                        lh = diagram.lat_hom(c2, c)
                        if not {lh(a) for a in u2} <= u:
                            ok = False
                            break
                    if diagram.poset.leq(c, c2):
                        lh = diagram.lat_hom(c, c2)
                        if not {lh(a) for a in u} <= u2:
                            ok = False
                            break
                if ok:
                    assign[c] = u
                    rec(i + 1, assign)
                    del assign[c]

        rec(0, {})
        diagram._cache["opens"] = tuple(sorted(out, key=lambda u: u._key))
    return diagram._cache["opens"]


def bottom_open(diagram: ContextDiagram) -> ExternalOpen:
    return ExternalOpen(diagram, {c: frozenset({diagram.lattice(c).bottom})
                                  for c in diagram.poset.elements}, check=False)


def top_open(diagram: ContextDiagram) -> ExternalOpen:
    return ExternalOpen(diagram, {c: frozenset(diagram.lattice(c).elements)
                                  for c in diagram.poset.elements}, check=False)


def open_join(u: ExternalOpen, v: ExternalOpen) -> ExternalOpen:
    """Componentwise join of rounded ideals; stays valid as computed."""
    if u.diagram != v.diagram:
        raise DiagramMismatch("opens of different diagrams")
    diagram = u.diagram
    family = {}
    for c in diagram.poset.elements:
        lat = diagram.lattice(c)
        m = lat.join(lat.join_all(u.at(c)), lat.join_all(v.at(c)))
        family[c] = frozenset(lat.down_of(m))
    return ExternalOpen(diagram, family)


def open_meet(u: ExternalOpen, v: ExternalOpen) -> ExternalOpen:
    """The largest valid open below both.

    Componentwise intersection can break roundedness in general fibres, so
    intersect, then iterate re-rounding and monotonicity repair to a
    fixpoint.  In Boolean fibres the repair is the identity.
    """
    if u.diagram != v.diagram:
        raise DiagramMismatch("opens of different diagrams")
    diagram = u.diagram
    family = {c: u.at(c) & v.at(c) for c in diagram.poset.elements}
    changed = True
    while changed:
        changed = False
        for c in diagram.poset.elements:
            rounded = wi_closure(diagram.lattice(c), family[c])
            if rounded != family[c]:
                family[c] = rounded
                changed = True
        for c, d in diagram.poset.comparable_pairs():
            if c == d:
                continue
            lh = diagram.lat_hom(c, d)
            kept = frozenset(a for a in family[c] if lh(a) in family[d])
            if kept != family[c]:
                family[c] = kept
                changed = True
    return ExternalOpen(diagram, family)


def evaluate(point: SpectrumPoint, u: ExternalOpen) -> bool:
    """Whether the point lies in the open: some fibre ideal meets the filter."""
    if point.diagram != u.diagram:
        raise DiagramMismatch("point and open from different diagrams")
    return any(u.at(c) & point.filters[c].members for c in point.ideal.members)


def subbasic_opens(diagram: ContextDiagram) -> list[tuple]:
    """The (context, lattice element) pairs naming the subbasic opens."""
    out = []
    for c in diagram.poset.elements:
        for a in diagram.lattice(c).elements:
            out.append((c, a))
    return out


# ---------------------------------------------------------------------------
# Points of the Sierpinski exponential (one per open of each fibre ideal)


class SierPoint:
    """An ideal of contexts with a matched family of fibre lattice ideals."""

    def __init__(self, diagram: ContextDiagram, ideal: PosetIdeal,
                 family: Mapping, *, check: bool = True):
        self.diagram = diagram
        self.ideal = ideal
        self.family = {c: frozenset(v) for c, v in family.items()}
        if check:
            self._validate()
        self._key = (
            canon_key(self.ideal.members),
            tuple((canon_key(c), canon_key(self.family[c])) for c in canon_sorted(self.family)),
        )

    def _validate(self):
        if set(self.family) != self.ideal.members:
            raise InvalidDiagram("family must be indexed by exactly the ideal members")
        for c, members in self.family.items():
            if members not in lattice_ideals(self.diagram.lattice(c)):
                raise InvalidDiagram(f"family member at {c!r} is not a lattice ideal")
        for c in self.ideal.members:
            for d in self.ideal.members:
                if c != d and self.diagram.poset.leq(c, d):
                    lh = self.diagram.lat_hom(c, d)
                    for a in self.diagram.lattice(c).elements:
                        if (a in self.family[c]) != (lh(a) in self.family[d]):
                            raise InvalidDiagram(f"family incompatible along {c!r} <= {d!r}")
        if not self._rounded_across():
            raise InvalidDiagram("family not rounded across the ideal")

    def _rounded_across(self) -> bool:
        for c in self.ideal.members:
            for a in self.family[c]:
                ok = False
                for d in self.ideal.members:
                    if not self.diagram.poset.leq(c, d):
                        continue
                    lh = self.diagram.lat_hom(c, d)
                    wi = well_inside_pairs(self.diagram.lattice(d))
                    if any((lh(a), b) in wi for b in self.family[d]):
                        ok = True
                        break
                if not ok:
                    return False
        return True

    def pairs(self) -> frozenset:
        """The point as a set of (context, lattice element) pairs."""
        return frozenset((c, a) for c in self.ideal.members for a in self.family[c])

    def trace_at_top(self) -> frozenset:
        return self.family[self.ideal.top]

    def __eq__(self, other):
        if not isinstance(other, SierPoint):
            return NotImplemented
        return (self.diagram == other.diagram and self.ideal.members == other.ideal.members
                and self.family == other.family)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"SierPoint(ideal={canon_sorted(self.ideal.members)!r})"


def sier_points_over(diagram: ContextDiagram, ideal: PosetIdeal) -> tuple[SierPoint, ...]:
    """All families over one ideal satisfying the four point conditions."""
    ctxs = canon_sorted(ideal.members)
    choices = {c: lattice_ideals(diagram.lattice(c)) for c in ctxs}
    out = []

    def compatible(c, d, uc, ud):
        lh = diagram.lat_hom(c, d)
        return all((a in uc) == (lh(a) in ud) for a in diagram.lattice(c).elements)

    def rec(i: int, assign: dict):
        if i == len(ctxs):
            candidate = SierPoint(diagram, ideal, dict(assign), check=False)
            if candidate._rounded_across():
                out.append(candidate)
            return
        c = ctxs[i]
        for u in choices[c]:
            ok = True
            for c2, u2 in assign.items():
                if diagram.poset.leq(c2, c) and not compatible(c2, c, u2, u):
                    ok = False
                    break
                if diagram.poset.leq(c, c2) and not compatible(c, c2, u, u2):
                    ok = False
                    break
            if ok:
                assign[c] = u
                rec(i + 1, assign)
                del assign[c]

    rec(0, {})
    return tuple(sorted(out, key=lambda p: p._key))


def sier_points(diagram: ContextDiagram) -> tuple[SierPoint, ...]:
    if "sier" not in diagram._cache:
        out = []
        for ideal in ideals(diagram.poset):
            out.extend(sier_points_over(diagram, ideal))
        diagram._cache["sier"] = tuple(sorted(out, key=lambda p: p._key))
    return diagram._cache["sier"]


def sier_points_via_top(diagram: ContextDiagram, ideal: PosetIdeal) -> tuple[SierPoint, ...]:
    """Over a principal ideal the families are the rounded ideals at the top."""
    top = ideal.top
    out = []
    for i in rounded_ideals(diagram.lattice(top)):
        family = {}
        for c in ideal.members:
            lh = diagram.lat_hom(c, top)
            family[c] = frozenset(a for a in diagram.lattice(c).elements if lh(a) in i.members)
        out.append(SierPoint(diagram, ideal, family, check=True))
    return tuple(sorted(out, key=lambda p: p._key))


# ---------------------------------------------------------------------------
# The internal frame as a copresheaf of restricted-diagram opens


class OpensCopresheaf:
    """Context by context, the opens of the diagram above that context."""

    def __init__(self, diagram: ContextDiagram):
        self.diagram = diagram
        self._restricted = {}
        self._values = {}
        for c in diagram.poset.elements:
            sub = diagram.restrict(diagram.poset.up(c))
            self._restricted[c] = sub
            self._values[c] = external_opens(sub)

    def value(self, c) -> tuple[ExternalOpen, ...]:
        return self._values[c]

    def restricted_diagram(self, c) -> ContextDiagram:
        return self._restricted[c]

    def restrict(self, c, d, u: ExternalOpen) -> ExternalOpen:
        """The copresheaf action along c <= d: forget the components below d."""
        if not self.diagram.poset.leq(c, d):
            raise NotComparable(f"{c!r} <= {d!r} does not hold")
        if u.diagram != self._restricted[c]:
            raise DiagramMismatch("open does not live over the source context")
        keep = self.diagram.poset.up(d)
        return ExternalOpen(self._restricted[d], {e: u.at(e) for e in keep}, check=False)


def internal_frame(diagram: ContextDiagram) -> OpensCopresheaf:
    """The copresheaf of opens; at a bottom context it recovers all opens."""
    frame = OpensCopresheaf(diagram)
    bottom = diagram.poset.bottom()
    if bottom is not None:
        whole = {u._key for u in external_opens(diagram)}
        at_bottom = {tuple((canon_key(c), canon_key(u.at(c))) for c in canon_sorted(u.family))
                     for u in frame.value(bottom)}
        if whole != at_bottom:
            raise InvalidDiagram("opens over the bottom context disagree with the diagram's opens")
    return frame


# ---------------------------------------------------------------------------
# Pullback along a monotone map of base posets


class MonotoneMap:
    """A monotone map between finite posets."""

    def __init__(self, source: FinPoset, target: FinPoset, mapping: Mapping):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if set(self.mapping) != set(source.elements):
            raise NotMonotone("mapping must be total on the source poset")
        for v in self.mapping.values():
            if v not in target:
                raise NotMonotone(f"image {v!r} not in target poset")
        for a in source.elements:
            for b in source.elements:
                if source.leq(a, b) and not target.leq(self.mapping[a], self.mapping[b]):
                    raise NotMonotone(f"order not preserved at {a!r} <= {b!r}")

    def __call__(self, x):
        return self.mapping[x]


def pullback(diagram: ContextDiagram, f: MonotoneMap) -> ContextDiagram:
    """Reindex the diagram along a monotone map into its context poset."""
    if f.target != diagram.poset:
        raise NotMonotone("map must land in the diagram's context poset")
    algebras = {q: diagram.algebra(f(q)) for q in f.source.elements}
    incl = {}
    for q1, q2 in f.source.comparable_pairs():
        if q1 != q2:
            incl[(q1, q2)] = diagram.hom(f(q1), f(q2))
    return ContextDiagram(f.source, algebras, incl, check=False)


def check_pullback_geometricity(diagram: ContextDiagram, f: MonotoneMap) -> Report:
    """Points of the pulled-back diagram match the fibre description.

    Both sides are enumerated: on one side the points of the reindexed
    diagram, on the other the pairs of a source ideal with a point of the
    original diagram over the down-closure of its image.  The bijection
    must also commute with evaluation against every open.
    """
    pulled = pullback(diagram, f)
    lhs = external_points(pulled)
    rhs_index: dict = {}
    for j in ideals(f.source):
        img_ideal = PosetIdeal(diagram.poset, diagram.poset.down(f(j.top)), check=False)
        for pt in external_points_over(diagram, img_ideal):
            rhs_index[(j.members, pt._key)] = pt
    violations = []
    seen = set()
    matched = {}
    for p in lhs:
        j = p.ideal
        top_q = j.top
        c_top = f(top_q)
        img_ideal = PosetIdeal(diagram.poset, diagram.poset.down(c_top), check=False)
        filters = {}
        for c in img_ideal.members:
            lh = diagram.lat_hom(c, c_top)
            xt = p.filters[top_q].members
            members = frozenset(a for a in diagram.lattice(c).elements if lh(a) in xt)
            filters[c] = PrimeFilter(diagram.lattice(c), members, check=False)
        try:
            q_pt = SpectrumPoint(diagram, img_ideal, filters, check=True)
        except InvalidDiagram as e:
            violations.append(f"image of point over {canon_sorted(j.members)!r} invalid: {e}")
            continue
        key = (j.members, q_pt._key)
        if key not in rhs_index:
            violations.append(f"image of a pulled-back point missing on the fibre side: {key!r}")
            continue
        if key in seen:
            violations.append(f"bijection not injective at {key!r}")
        seen.add(key)
        matched[p] = q_pt
    for key in rhs_index:
        if key not in seen:
            violations.append(f"fibre-side pair not hit: {key!r}")
    if not violations:
        for u in external_opens(diagram):
            pulled_family = {q: u.at(f(q)) for q in f.source.elements}
            u_f = ExternalOpen(pulled, pulled_family, check=False)
            for p, q_pt in matched.items():
                if evaluate(p, u_f) != evaluate(q_pt, u):
                    violations.append(
                        f"evaluation not natural at point {p!r} and open {u._key!r}")
    return Report(
        name="pullback points match the fibre description",
        passed=not violations,
        violations=tuple(violations[:10]),
        details={"pullback_points": len(lhs), "fibre_pairs": len(rhs_index)},
    )


# ---------------------------------------------------------------------------
# Fibre maps and the opfibration property


def fibre_map(diagram: ContextDiagram, c, d) -> Callable[[frozenset], frozenset]:
    """The covariant map on fibre opens: push forward, then round down.

    Sends a rounded ideal to everything well inside the image of one of
    its members.
    """
    if not diagram.poset.leq(c, d):
        raise NotComparable(f"{c!r} <= {d!r} does not hold")
    lh = diagram.lat_hom(c, d)
    target = diagram.lattice(d)

    def push(members: frozenset) -> frozenset:
        return wi_closure(target, {lh(a) for a in members})

    return push


def check_opfibration_specialization(diagram: ContextDiagram) -> Report:
    """Order the exponential's points two ways and compare.

    Once via containment of subbasic opens (the specialization order of
    the finite bundle space), once via base-ideal inclusion plus the fibre
    map criterion; any mismatch is a violation.
    """
    pts = sier_points(diagram)
    violations = []
    for p1 in pts:
        for p2 in pts:
            spatial = p1.pairs() <= p2.pairs()
            if p1.ideal.members <= p2.ideal.members:
                push = fibre_map(diagram, p1.ideal.top, p2.ideal.top)
                fibrewise = push(p1.trace_at_top()) <= p2.trace_at_top()
            else:
                fibrewise = False
            if spatial != fibrewise:
                violations.append(
                    f"order mismatch: subbasic {spatial} vs fibrewise {fibrewise} "
                    f"for {p1!r} vs {p2!r}")
    return Report(
        name="specialization order agrees with the fibre-map criterion",
        passed=not violations,
        violations=tuple(violations[:10]),
        details={"points": len(pts)},
    )
