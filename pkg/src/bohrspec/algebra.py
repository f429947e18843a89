"""Exact finite-dimensional commutative *-algebras over the Gaussian rationals.

An algebra is represented by its finite outcome set; its elements are the
functions from outcomes to Gaussian rationals with pointwise operations.
All arithmetic is exact (`fractions.Fraction`), never floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union


class AlgebraError(Exception):
    pass


class MismatchedParent(AlgebraError):
    """Raised when two elements of different algebras are combined."""


class NotSelfAdjoint(AlgebraError):
    """Raised when an operation requires a self-adjoint element."""


class NotSurjective(AlgebraError):
    """Raised when an outcome map fails to be total and surjective."""


Rational = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class GaussRat:
    """A Gaussian rational a + bi with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def of(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        return cls(_frac(x))

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        other = GaussRat.of(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussRat.of(other)
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.of(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussRat.of(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussRat(other)
        if not isinstance(other, GaussRat):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


class FinCommAlgebra:
    """The algebra of Gaussian-rational functions on a finite outcome set.

    Outcomes are string labels, kept sorted lexicographically so that every
    enumeration downstream is deterministic.
    """

    __slots__ = ("outcomes", "name")

    def __init__(self, outcomes: Iterable[str], name: str = ""):
        outs = tuple(sorted(outcomes))
        if not outs:
            raise ValueError("algebra must have at least one outcome")
        if len(set(outs)) != len(outs):
            raise ValueError("duplicate outcome labels")
        if not all(isinstance(o, str) for o in outs):
            raise TypeError("outcome labels must be strings")
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "name", name or "Q[i]^" + str(len(outs)))

    def __setattr__(self, name, value):
        raise AttributeError("FinCommAlgebra is immutable")

    @property
    def dim(self) -> int:
        return len(self.outcomes)

    def element(self, values) -> "AlgElement":
        """Build an element from a mapping outcome -> value or a sequence."""
        if isinstance(values, Mapping):
            missing = set(self.outcomes) - set(values)
            extra = set(values) - set(self.outcomes)
            if missing or extra:
                raise ValueError(f"values must be defined on exactly the outcome set; missing={sorted(missing)} extra={sorted(extra)}")
            vals = tuple(GaussRat.of(values[o]) for o in self.outcomes)
        else:
            seq = tuple(values)
            if len(seq) != len(self.outcomes):
                raise ValueError("value sequence length must match outcome count")
            vals = tuple(GaussRat.of(v) for v in seq)
        return AlgElement(self, vals)

    def unit(self) -> "AlgElement":
        return self.element([1] * self.dim)

    def zero(self) -> "AlgElement":
        return self.element([0] * self.dim)

    def indicator(self, where: Iterable[str], on=1, off=0) -> "AlgElement":
        """The element taking `on` inside `where` and `off` elsewhere."""
        w = set(where)
        if not w <= set(self.outcomes):
            raise ValueError("indicator support must be a subset of the outcomes")
        return self.element({o: (on if o in w else off) for o in self.outcomes})

    def __eq__(self, other):
        if not isinstance(other, FinCommAlgebra):
            return NotImplemented
        return self.outcomes == other.outcomes and self.name == other.name

    def __hash__(self):
        return hash((self.outcomes, self.name))

    def __repr__(self):
        return f"FinCommAlgebra({self.name}, outcomes={list(self.outcomes)})"


class AlgElement:
    """A function from the parent algebra's outcomes to Gaussian rationals."""

    __slots__ = ("parent", "_vals")

    def __init__(self, parent: FinCommAlgebra, vals: tuple):
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "_vals", vals)

    def __setattr__(self, name, value):
        raise AttributeError("AlgElement is immutable")

    def value(self, outcome: str) -> GaussRat:
        return self._vals[self.parent.outcomes.index(outcome)]

    @property
    def values(self) -> dict:
        return {o: v for o, v in zip(self.parent.outcomes, self._vals)}

    @property
    def is_self_adjoint(self) -> bool:
        return all(v.is_real for v in self._vals)

    def star(self) -> "AlgElement":
        return AlgElement(self.parent, tuple(v.conjugate() for v in self._vals))

    def _binop(self, other, op):
        if not isinstance(other, AlgElement):
            raise TypeError("expected an AlgElement")
        if other.parent != self.parent:
            raise MismatchedParent(f"elements of {self.parent.name} and {other.parent.name}")
        return AlgElement(self.parent, tuple(op(a, b) for a, b in zip(self._vals, other._vals)))

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __neg__(self):
        return AlgElement(self.parent, tuple(-v for v in self._vals))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            return self.scale(other)
        return self._binop(other, lambda a, b: a * b)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "AlgElement":
        c = GaussRat.of(c)
        return AlgElement(self.parent, tuple(c * v for v in self._vals))

    def __eq__(self, other):
        if not isinstance(other, AlgElement):
            return NotImplemented
        return self.parent == other.parent and self._vals == other._vals

    def __hash__(self):
        return hash((self.parent, self._vals))

    def __repr__(self):
        return "(" + ", ".join(repr(v) for v in self._vals) + ")"


def is_positive(a: AlgElement) -> bool:
    """Membership in the positive cone: every coordinate a nonnegative rational.

    For a full finite function algebra this coordinatewise cone coincides
    with the cone generated by squares; the tests confirm the identity with
    a depth-bounded closure oracle.
    """
    if not a.is_self_adjoint:
        raise NotSelfAdjoint(repr(a))
    return all(v.re >= 0 for v in a._vals)


def leq(a: AlgElement, b: AlgElement) -> bool:
    """The cone preorder a <= b, i.e. b - a is positive."""
    return is_positive(b - a)


def archimedean_bound(a: AlgElement) -> int:
    """The least integer r with a <= r * unit."""
    if not a.is_self_adjoint:
        raise NotSelfAdjoint(repr(a))
    return max(math.ceil(v.re) for v in a._vals)


class Character:
    """Evaluation of elements at one outcome; a *-homomorphism to the scalars."""

    __slots__ = ("algebra", "outcome")

    def __init__(self, algebra: FinCommAlgebra, outcome: str):
        if outcome not in algebra.outcomes:
            raise ValueError(f"unknown outcome {outcome!r}")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "outcome", outcome)

    def __setattr__(self, name, value):
        raise AttributeError("Character is immutable")

    def __call__(self, a: AlgElement) -> GaussRat:
        if a.parent != self.algebra:
            raise MismatchedParent(f"element of {a.parent.name} under character of {self.algebra.name}")
        return a.value(self.outcome)

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        return self.algebra == other.algebra and self.outcome == other.outcome

    def __hash__(self):
        return hash((self.algebra, self.outcome))

    def __repr__(self):
        return f"Character({self.algebra.name} at {self.outcome!r})"


def characters(algebra: FinCommAlgebra) -> tuple[Character, ...]:
    """All characters, one per outcome, in outcome order."""
    return tuple(Character(algebra, o) for o in algebra.outcomes)


class AlgebraHom:
    """A unital injective *-homomorphism source -> target.

    Dually encoded: a total surjective map from target outcomes to source
    outcomes; the element map is precomposition with it.
    """

    __slots__ = ("source", "target", "outcome_map")

    def __init__(self, source: FinCommAlgebra, target: FinCommAlgebra,
                 outcome_map: Mapping[str, str], *, check: bool = True):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "outcome_map", dict(outcome_map))
        if check:
            self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraHom is immutable")

    def _validate(self):
        dom = set(self.outcome_map)
        if dom != set(self.target.outcomes):
            raise NotSurjective(f"outcome map must be total on the target outcomes; got domain {sorted(dom)}")
        img = set(self.outcome_map.values())
        if not img <= set(self.source.outcomes):
            raise NotSurjective(f"outcome map image {sorted(img)} not within source outcomes")
        if img != set(self.source.outcomes):
            raise NotSurjective(f"outcome map not surjective onto {list(self.source.outcomes)}")

    @classmethod
    def identity(cls, algebra: FinCommAlgebra) -> "AlgebraHom":
        return cls(algebra, algebra, {o: o for o in algebra.outcomes})

    def apply(self, a: AlgElement) -> AlgElement:
        if a.parent != self.source:
            raise MismatchedParent(f"element of {a.parent.name}, hom from {self.source.name}")
        return self.target.element({o: a.value(self.outcome_map[o]) for o in self.target.outcomes})

    __call__ = apply

    def compose(self, inner: "AlgebraHom") -> "AlgebraHom":
        """self o inner, defined when inner.target == self.source."""
        if inner.target != self.source:
            raise MismatchedParent("homs not composable")
        omap = {o: inner.outcome_map[self.outcome_map[o]] for o in self.target.outcomes}
        return AlgebraHom(inner.source, self.target, omap)

    def __eq__(self, other):
        if not isinstance(other, AlgebraHom):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.outcome_map == other.outcome_map)

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.outcome_map.items()))))

    def __repr__(self):
        return f"AlgebraHom({self.source.name} -> {self.target.name})"


def hom_apply(h: AlgebraHom, a: AlgElement) -> AlgElement:
    return h.apply(a)


def selfadjoint_sample(algebra: FinCommAlgebra, entries=(-1, 0, 1)) -> list[AlgElement]:
    """All self-adjoint elements with coordinates drawn from `entries`."""
    import itertools

    vals = [GaussRat.of(e) for e in entries]
    if not all(v.is_real for v in vals):
        raise NotSelfAdjoint("sample entries must be rational")
    out = []
    for combo in itertools.product(vals, repeat=algebra.dim):
        out.append(AlgElement(algebra, tuple(combo)))
    return out
