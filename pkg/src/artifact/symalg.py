"""The free graded-commutative algebra on a graded space, truncated by weight.

Monomials are sorted tuples of generator indices; even generators may
repeat, odd ones may not.  The weight of a monomial is its length.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .core import AlgebraError, GradedSpace, format_rational, rational

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, Fraction]


def monomial_parity(parities: Sequence[int], mono: Monomial) -> int:
    return sum(parities[i] for i in mono) % 2


def normalize(space: GradedSpace, word: Sequence[int]) -> Optional[Tuple[int, Monomial]]:
    """Sort a word of generators into canonical order with its Koszul sign.

    Returns ``None`` when an odd generator occurs twice (the word is zero).
    """
    for i in word:
        if not 0 <= i < space.dim:
            raise AlgebraError(f"unknown generator index {i}")
    return _normalize(space.parities, tuple(word))


@lru_cache(maxsize=None)
def _normalize(parities: Tuple[int, ...], word: Tuple[int, ...]) -> Optional[Tuple[int, Monomial]]:
    odd = [i for i in word if parities[i]]
    if len(set(odd)) != len(odd):
        return None
    inversions = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(word))


@lru_cache(maxsize=None)
def mono_mul(parities: Tuple[int, ...], a: Monomial, b: Monomial) -> Optional[Tuple[int, Monomial]]:
    """Product of two canonical monomials as ``(sign, monomial)`` or None."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    odd_a = [i for i in a if parities[i]]
    sign = 1
    if odd_a:
        seen = set(odd_a)
        for j in b:
            if parities[j]:
                if j in seen:
                    return None
                if sum(1 for i in odd_a if i > j) % 2:
                    sign = -sign
    return sign, tuple(sorted(a + b))


class TruncatedPolynomial:
    """An element of Ŝ W known exactly in weights ``<= cutoff``.

    ``min_weight`` is a declared lower bound on the weight of every term,
    so membership in Ŝ_{≥n} W survives even when low terms cancel.
    """

    __slots__ = ("space", "cutoff", "terms", "min_weight")

    def __init__(self, space: GradedSpace, cutoff: int, terms: Mapping[Monomial, object] = (),
                 min_weight: Optional[int] = None, *, _trusted: bool = False):
        if cutoff < 0:
            raise AlgebraError("cutoff must be non-negative")
        if _trusted:
            clean = dict(terms)
        else:
            clean = {}
            for mono, c in dict(terms).items():
                res = normalize(space, mono)
                c = rational(c)
                if res is None or not c or len(mono) > cutoff:
                    continue
                sign, canon = res
                clean[canon] = clean.get(canon, 0) + sign * c
            clean = {m: c for m, c in clean.items() if c}
        lowest = min((len(m) for m in clean), default=None)
        if min_weight is None:
            min_weight = lowest if lowest is not None else 0
        elif lowest is not None and lowest < min_weight:
            raise AlgebraError(f"term of weight {lowest} below min_weight {min_weight}")
        self.space = space
        self.cutoff = cutoff
        self.terms = clean
        self.min_weight = min_weight

    # construction helpers
    @classmethod
    def zero(cls, space: GradedSpace, cutoff: int, min_weight: int = 0) -> "TruncatedPolynomial":
        return cls(space, cutoff, {}, min_weight, _trusted=True)

    @classmethod
    def constant(cls, space: GradedSpace, cutoff: int, c=1) -> "TruncatedPolynomial":
        return cls(space, cutoff, {(): c})

    @classmethod
    def generator(cls, space: GradedSpace, i: int, cutoff: int, c=1) -> "TruncatedPolynomial":
        return cls(space, cutoff, {(i,): c})

    @classmethod
    def _make(cls, space, cutoff, terms, min_weight=0) -> "TruncatedPolynomial":
        terms = {m: c for m, c in terms.items() if c and len(m) <= cutoff}
        lowest = min((len(m) for m in terms), default=min_weight)
        return cls(space, cutoff, terms, min(max(min_weight, 0), lowest), _trusted=True)

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def weights(self) -> List[int]:
        return sorted({len(m) for m in self.terms})

    def max_weight(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def parity(self) -> Optional[int]:
        """Common parity of all terms; 0 for the zero polynomial, None if mixed."""
        pars = {monomial_parity(self.space.parities, m) for m in self.terms}
        if not pars:
            return 0
        return pars.pop() if len(pars) == 1 else None

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    # arithmetic
    def _check(self, other: "TruncatedPolynomial") -> None:
        if not isinstance(other, TruncatedPolynomial):
            raise TypeError(f"expected TruncatedPolynomial, got {type(other).__name__}")
        if other.space != self.space:
            raise AlgebraError("polynomials live on different spaces")

    def __add__(self, other: "TruncatedPolynomial") -> "TruncatedPolynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TruncatedPolynomial._make(self.space, min(self.cutoff, other.cutoff), out,
                                         min(self.min_weight, other.min_weight))

    def __neg__(self) -> "TruncatedPolynomial":
        return TruncatedPolynomial(self.space, self.cutoff, {m: -c for m, c in self.terms.items()},
                                   self.min_weight, _trusted=True)

    def __sub__(self, other: "TruncatedPolynomial") -> "TruncatedPolynomial":
        return self + (-other)

    def scale(self, c) -> "TruncatedPolynomial":
        c = rational(c)
        if not c:
            return TruncatedPolynomial.zero(self.space, self.cutoff, self.min_weight)
        return TruncatedPolynomial(self.space, self.cutoff, {m: c * v for m, v in self.terms.items()},
                                   self.min_weight, _trusted=True)

    def __rmul__(self, c) -> "TruncatedPolynomial":
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, TruncatedPolynomial):
            return multiply(self, other)
        return self.scale(other)

    def truncate(self, cutoff: int) -> "TruncatedPolynomial":
        cutoff = min(cutoff, self.cutoff)
        return TruncatedPolynomial._make(self.space, cutoff, self.terms, self.min_weight)

    def with_cutoff(self, cutoff: int) -> "TruncatedPolynomial":
        """Reinterpret as exact up to ``cutoff`` (used for genuine polynomials)."""
        return TruncatedPolynomial._make(self.space, cutoff, self.terms, self.min_weight)

    def weight_component(self, w: int) -> "TruncatedPolynomial":
        return weight_component(self, w)

    # comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        return (self.space == other.space and self.cutoff == other.cutoff
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.space, self.cutoff, frozenset(self.terms.items())))

    def agrees_with(self, other: "TruncatedPolynomial") -> bool:
        """Equal in every weight where both are exact."""
        return (self - other).is_zero()

    # display
    def monomial_str(self, mono: Monomial) -> str:
        parts = []
        i = 0
        while i < len(mono):
            j = i
            while j < len(mono) and mono[j] == mono[i]:
                j += 1
            name = self.space.names[mono[i]]
            parts.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return "*".join(parts) if parts else "1"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[mono]
            body = self.monomial_str(mono)
            if body == "1":
                text = format_rational(abs(c))
            elif abs(c) == 1:
                text = body
            else:
                text = f"{format_rational(abs(c))}*{body}"
            out.append(("- " if c < 0 else "+ ") + text)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self) -> str:
        return f"TruncatedPolynomial({self}, cutoff={self.cutoff})"


def multiply(p: TruncatedPolynomial, q: TruncatedPolynomial) -> TruncatedPolynomial:
    """Graded-commutative product; exact up to the smaller cutoff."""
    p._check(q)
    cutoff = min(p.cutoff, q.cutoff)
    par = p.space.parities
    out: Terms = {}
    for a, ca in p.terms.items():
        room = cutoff - len(a)
        if room < 0:
            continue
        for b, cb in q.terms.items():
            if len(b) > room:
                continue
            res = mono_mul(par, a, b)
            if res is None:
                continue
            sign, m = res
            out[m] = out.get(m, 0) + (ca * cb if sign > 0 else -ca * cb)
    return TruncatedPolynomial._make(p.space, cutoff, out, p.min_weight + q.min_weight)


def weight_component(p: TruncatedPolynomial, w: int) -> TruncatedPolynomial:
    if w < 0:
        raise AlgebraError("weight must be non-negative")
    if w > p.cutoff:
        raise AlgebraError(f"weight {w} is beyond the truncation {p.cutoff}")
    return TruncatedPolynomial(p.space, p.cutoff, {m: c for m, c in p.terms.items() if len(m) == w},
                               w, _trusted=True)


def monomial_basis(space: GradedSpace, weight: int) -> List[Monomial]:
    """Canonical monomials of one weight in graded-lexicographic order."""
    return list(_basis(space.parities, weight))


@lru_cache(maxsize=None)
def _basis(parities: Tuple[int, ...], weight: int) -> Tuple[Monomial, ...]:
    out = []
    for combo in combinations_with_replacement(range(len(parities)), weight):
        odd = [i for i in combo if parities[i]]
        if len(set(odd)) == len(odd):
            out.append(combo)
    return tuple(out)


def basis_up_to(space: GradedSpace, lo: int, hi: int) -> List[Monomial]:
    out: List[Monomial] = []
    for w in range(lo, hi + 1):
        out.extend(_basis(space.parities, w))
    return out


def embed(p: TruncatedPolynomial, target: GradedSpace, index_map: Sequence[int],
          cutoff: Optional[int] = None) -> TruncatedPolynomial:
    """Push ``p`` along an injective parity-preserving map of generators."""
    for i, j in enumerate(index_map):
        if p.space.parity(i) != target.parity(j):
            raise AlgebraError("embedding must preserve parities")
    terms: Terms = {}
    for mono, c in p.terms.items():
        res = _normalize(target.parities, tuple(index_map[i] for i in mono))
        if res is None:
            continue
        sign, m = res
        terms[m] = terms.get(m, 0) + sign * c
    return TruncatedPolynomial._make(target, p.cutoff if cutoff is None else cutoff, terms, p.min_weight)


def substitute(p: TruncatedPolynomial, images: Sequence[TruncatedPolynomial]) -> TruncatedPolynomial:
    """Algebra map sending generator i to ``images[i]`` (parity-preserving)."""
    if len(images) != p.space.dim:
        raise AlgebraError("need one image per generator")
    target = images[0].space if images else p.space
    cutoff = min([p.cutoff] + [q.cutoff for q in images])
    total = TruncatedPolynomial.zero(target, cutoff)
    one = TruncatedPolynomial.constant(target, cutoff)
    for mono, c in p.terms.items():
        acc = one
        for i in mono:
            acc = multiply(acc, images[i])
        total = total + acc.scale(c)
    return total


def random_polynomial(rng, space: GradedSpace, cutoff: int, *, weights: Iterable[int],
                      parity: Optional[int] = None, density: float = 0.5,
                      max_terms: int = 6, coeff_range: int = 3) -> TruncatedPolynomial:
    """Sparse random polynomial with small integer coefficients."""
    terms: Terms = {}
    pool = [m for w in weights if w <= cutoff for m in _basis(space.parities, w)
            if parity is None or monomial_parity(space.parities, m) == parity]
    if pool:
        rng.shuffle(pool)
        for m in pool[:max_terms]:
            if rng.random() < density:
                c = rng.randint(-coeff_range, coeff_range)
                if c:
                    terms[m] = Fraction(c)
    return TruncatedPolynomial._make(space, cutoff, terms, min((w for w in weights), default=0))
