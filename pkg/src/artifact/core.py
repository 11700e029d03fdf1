"""Exact scalars, Z/2-graded spaces, linear maps, bilinear forms, complexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from . import linalg

# Fraction already keeps lowest terms with a positive denominator.
Rational = Fraction


class AlgebraError(ValueError):
    """Raised when an input violates a structural precondition."""


def rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise AlgebraError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise AlgebraError(f"not a rational: {value!r}") from None
        if d == 0:
            raise AlgebraError(f"zero denominator: {value!r}")
        return Fraction(n, d)
    raise AlgebraError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GradedSpace:
    """Finite basis with a parity (0 even, 1 odd) per generator."""

    names: Tuple[str, ...]
    parities: Tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.parities):
            raise AlgebraError("names and parities differ in length")
        if len(set(self.names)) != len(self.names):
            raise AlgebraError("generator names must be unique")
        if any(p not in (0, 1) for p in self.parities):
            raise AlgebraError("parities must be 0 or 1")

    @classmethod
    def of(cls, *gens: Tuple[str, int]) -> "GradedSpace":
        return cls(tuple(n for n, _ in gens), tuple(p for _, p in gens))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def signature(self) -> Tuple[int, int]:
        odd = sum(self.parities)
        return (self.dim - odd, odd)

    def parity(self, i: int) -> int:
        return self.parities[i]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def direct_sum(self, other: "GradedSpace") -> "GradedSpace":
        return GradedSpace(self.names + other.names, self.parities + other.parities)

    def __repr__(self) -> str:
        l, n = self.signature
        return f"GradedSpace({l}|{n}: {', '.join(self.names)})"


def parity_reverse(space: GradedSpace, decorate: str = "Π") -> GradedSpace:
    """ΠW: same basis, decorated names, flipped parities.

    Reversing a space whose names already carry the decoration strips it, so
    the operation is an involution.
    """
    names = []
    for n in space.names:
        names.append(n[len(decorate):] if decorate and n.startswith(decorate) else decorate + n)
    return GradedSpace(tuple(names), tuple(1 - p for p in space.parities))


@dataclass(frozen=True)
class LinearMap:
    """Sparse matrix ``entries[(target, source)]`` between graded spaces."""

    source: GradedSpace
    target: GradedSpace
    entries: Mapping[Tuple[int, int], Fraction]
    parity: int = 0

    def __post_init__(self):
        clean = {}
        for (t, s), v in self.entries.items():
            v = rational(v)
            if not v:
                continue
            if not (0 <= t < self.target.dim and 0 <= s < self.source.dim):
                raise AlgebraError(f"entry {(t, s)} out of range")
            if (self.target.parity(t) + self.source.parity(s)) % 2 != self.parity:
                raise AlgebraError(f"entry {(t, s)} breaks parity {self.parity}")
            clean[(t, s)] = v
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, parity: int = 0) -> "LinearMap":
        return cls(source, target, {}, parity)

    @classmethod
    def identity(cls, space: GradedSpace) -> "LinearMap":
        return cls(space, space, {(i, i): Fraction(1) for i in range(space.dim)}, 0)

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, vec: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for (t, s), v in self.entries.items():
            c = vec.get(s)
            if c:
                out[t] = out.get(t, 0) + v * c
        return {k: v for k, v in out.items() if v}

    def column(self, s: int) -> Dict[int, Fraction]:
        return {t: v for (t, ss), v in self.entries.items() if ss == s}

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if other.target != self.source:
            raise AlgebraError("maps are not composable")
        out: Dict[Tuple[int, int], Fraction] = {}
        by_row: Dict[int, list] = {}
        for (t, s), v in other.entries.items():
            by_row.setdefault(t, []).append((s, v))
        for (t, k), v in self.entries.items():
            for s, w in by_row.get(k, ()):
                out[(t, s)] = out.get((t, s), 0) + v * w
        return LinearMap(other.source, self.target, out, (self.parity + other.parity) % 2)

    def _check_same_shape(self, other: "LinearMap") -> None:
        if (self.source, self.target, self.parity) != (other.source, other.target, other.parity):
            raise AlgebraError("maps have different shapes or parities")

    def __add__(self, other: "LinearMap") -> "LinearMap":
        self._check_same_shape(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return LinearMap(self.source, self.target, out, self.parity)

    def __neg__(self) -> "LinearMap":
        return LinearMap(self.source, self.target, {k: -v for k, v in self.entries.items()}, self.parity)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return self + (-other)

    def scale(self, c) -> "LinearMap":
        c = rational(c)
        return LinearMap(self.source, self.target, {k: c * v for k, v in self.entries.items()}, self.parity)

    def rank(self) -> int:
        return linalg.rank(self.column(s) for s in range(self.source.dim))


def supertrace(f: LinearMap) -> Fraction:
    """Even diagonal sum minus odd diagonal sum."""
    if not f.is_endomorphism:
        raise AlgebraError("supertrace needs an endomorphism")
    if f.parity:
        raise AlgebraError("supertrace needs an even map")
    total = Fraction(0)
    for (t, s), v in f.entries.items():
        if t == s:
            total += -v if f.source.parity(t) else v
    return total


@dataclass(frozen=True)
class BilinearForm:
    """Graded-symmetric form: ``entry(u, v) = (-1)^{|u||v|} entry(v, u)``.

    Entries may be given on one side only; the other side is filled in by
    symmetry.  Conflicting entries are rejected.
    """

    space: GradedSpace
    entries: Mapping[Tuple[int, int], Fraction]
    parity: int = 0

    def __post_init__(self):
        full: Dict[Tuple[int, int], Fraction] = {}
        par = self.space.parity
        for (u, v), c in self.entries.items():
            c = rational(c)
            if not c:
                continue
            if (par(u) + par(v)) % 2 != self.parity:
                raise AlgebraError(f"pairing entry {(u, v)} breaks parity {self.parity}")
            mirrored = -c if par(u) * par(v) else c
            for key, val in (((u, v), c), ((v, u), mirrored)):
                if key in full and full[key] != val:
                    raise AlgebraError(f"pairing entry {key} is not graded-symmetric")
                full[key] = val
        object.__setattr__(self, "entries", dict(sorted(full.items())))

    def __call__(self, u: int, v: int) -> Fraction:
        return self.entries.get((u, v), Fraction(0))

    def pair(self, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Fraction:
        return sum((ca * cb * self(u, v) for u, ca in a.items() for v, cb in b.items()), Fraction(0))

    def rank(self) -> int:
        return form_dual(self).rank

    @property
    def nondegenerate(self) -> bool:
        return self.rank() == self.space.dim


def dual_space(space: GradedSpace) -> GradedSpace:
    return GradedSpace(tuple(n + "*" for n in space.names), space.parities)


@dataclass(frozen=True)
class FormDual:
    map: LinearMap
    rank: int
    injective: bool
    bijective: bool


def form_dual(form: BilinearForm) -> FormDual:
    """The map ``u -> <u, ->`` from V to V*, with its rank."""
    dual = dual_space(form.space)
    entries = {(v, u): c for (u, v), c in form.entries.items()}
    m = LinearMap(form.space, dual, entries, form.parity)
    r = m.rank()
    inj = r == form.space.dim
    return FormDual(m, r, inj, inj)


@dataclass(frozen=True)
class Complex:
    """A graded space with an odd square-zero differential, optionally a form."""

    space: GradedSpace
    differential: LinearMap
    form: Optional[BilinearForm] = None

    def __post_init__(self):
        d = self.differential
        if d.source != self.space or d.target != self.space:
            raise AlgebraError("differential must be an endomorphism of the space")
        if d.parity != 1:
            raise AlgebraError("differential must be odd")
        if not (d @ d).is_zero():
            raise AlgebraError("differential does not square to zero")
        if self.form is not None and not form_compatible(self.form, d):
            raise AlgebraError("form is not compatible with the differential")

    @classmethod
    def trivial(cls, space: GradedSpace, form: Optional[BilinearForm] = None) -> "Complex":
        return cls(space, LinearMap.zero(space, space, 1), form)


def form_compatible(form: BilinearForm, d: LinearMap) -> bool:
    """``<du, v> + (-1)^{|u|} <u, dv> = 0`` on all basis pairs."""
    n = form.space.dim
    cols = [d.column(s) for s in range(n)]
    for u in range(n):
        for v in range(n):
            lhs = sum((c * form(t, v) for t, c in cols[u].items()), Fraction(0))
            rhs = sum((c * form(u, t) for t, c in cols[v].items()), Fraction(0))
            if lhs + (-rhs if form.space.parity(u) else rhs):
                return False
    return True
