"""Formal vector fields on Ŝ W: evaluation, bracket, divergence, and the
dictionary between homogeneous derivations and graded-symmetric maps.

A derivation ξ is stored by its values ``ξ(x_i)`` on the generators.
Partial derivatives act from the left, so ``∂_{θ2}(θ1 θ2) = -θ1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import AlgebraError, GradedSpace, rational
from .symalg import (Monomial, Terms, TruncatedPolynomial, _normalize, mono_mul,
                     monomial_basis, monomial_parity)


class Derivation:
    """ξ = Σ_i ξ(x_i) ∂_{x_i}, homogeneous of the given parity."""

    __slots__ = ("space", "values", "parity", "min_weight", "cutoff")

    def __init__(self, space: GradedSpace, values: Sequence[TruncatedPolynomial], parity: int,
                 min_weight: Optional[int] = None):
        if len(values) != space.dim:
            raise AlgebraError("need one value per generator")
        if parity not in (0, 1):
            raise AlgebraError("parity must be 0 or 1")
        cutoff = min((v.cutoff for v in values), default=0)
        vals = []
        for i, v in enumerate(values):
            if v.space != space:
                raise AlgebraError("value lives on the wrong space")
            expected = (space.parity(i) + parity) % 2
            for mono in v.terms:
                if monomial_parity(space.parities, mono) != expected:
                    raise AlgebraError(f"value on {space.names[i]} has the wrong parity")
            vals.append(v if v.cutoff == cutoff else v.truncate(cutoff))
        declared = min((v.min_weight for v in vals), default=0)
        if min_weight is None:
            min_weight = min((v.min_weight for v in vals if not v.is_zero()), default=declared)
        for v in vals:
            if v.terms and min(len(m) for m in v.terms) < min_weight:
                raise AlgebraError(f"value has a term below min_weight {min_weight}")
        self.space = space
        self.values = tuple(vals)
        self.parity = parity
        self.min_weight = min_weight
        self.cutoff = cutoff

    # constructors
    @classmethod
    def zero(cls, space: GradedSpace, cutoff: int, parity: int = 0, min_weight: int = 0) -> "Derivation":
        return cls(space, [TruncatedPolynomial.zero(space, cutoff)] * space.dim, parity, min_weight)

    @classmethod
    def from_terms(cls, space: GradedSpace, cutoff: int, parity: int,
                   values: Mapping[int, Mapping[Monomial, object]],
                   min_weight: Optional[int] = None) -> "Derivation":
        vals = [TruncatedPolynomial(space, cutoff, values.get(i, {})) for i in range(space.dim)]
        return cls(space, vals, parity, min_weight)

    @classmethod
    def partial(cls, space: GradedSpace, i: int, cutoff: int) -> "Derivation":
        return cls.from_terms(space, cutoff, space.parity(i), {i: {(): 1}}, 0)

    @classmethod
    def linear(cls, space: GradedSpace, matrix: Mapping[Tuple[int, int], object], parity: int,
               cutoff: int) -> "Derivation":
        """``x_k -> Σ_j matrix[(k, j)] x_j``."""
        vals: Dict[int, Dict[Monomial, object]] = {}
        for (k, j), c in matrix.items():
            vals.setdefault(k, {})[(j,)] = c
        return cls.from_terms(space, cutoff, parity, vals, 1)

    # arithmetic
    def _check(self, other: "Derivation") -> None:
        if not isinstance(other, Derivation):
            raise TypeError(f"expected Derivation, got {type(other).__name__}")
        if other.space != self.space:
            raise AlgebraError("derivations live on different spaces")

    def __add__(self, other: "Derivation") -> "Derivation":
        self._check(other)
        if other.parity != self.parity and not (other.is_zero() or self.is_zero()):
            raise AlgebraError("cannot add derivations of different parity")
        parity = self.parity if not self.is_zero() else other.parity
        return Derivation(self.space, [a + b for a, b in zip(self.values, other.values)], parity,
                          min(self.min_weight, other.min_weight))

    def __neg__(self) -> "Derivation":
        return Derivation(self.space, [-v for v in self.values], self.parity, self.min_weight)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + (-other)

    def scale(self, c) -> "Derivation":
        return Derivation(self.space, [v.scale(c) for v in self.values], self.parity, self.min_weight)

    def __rmul__(self, c) -> "Derivation":
        return self.scale(c)

    def truncate(self, cutoff: int) -> "Derivation":
        return Derivation(self.space, [v.truncate(cutoff) for v in self.values], self.parity, self.min_weight)

    def with_cutoff(self, cutoff: int) -> "Derivation":
        return Derivation(self.space, [v.with_cutoff(cutoff) for v in self.values], self.parity,
                          self.min_weight)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def weights(self) -> List[int]:
        return sorted({w for v in self.values for w in v.weights()})

    def max_weight(self) -> int:
        return max((v.max_weight() for v in self.values), default=-1)

    def weight_component(self, n: int) -> "Derivation":
        return Derivation(self.space, [v.weight_component(n) for v in self.values], self.parity, n)

    def __call__(self, p: TruncatedPolynomial) -> TruncatedPolynomial:
        return evaluate(self, p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return (self.space == other.space and self.values == other.values
                and (self.parity == other.parity or self.is_zero()))

    def __hash__(self):
        return hash((self.space, self.values))

    def agrees_with(self, other: "Derivation") -> bool:
        return all(a.agrees_with(b) for a, b in zip(self.values, other.values))

    def __str__(self) -> str:
        parts = []
        for name, v in zip(self.space.names, self.values):
            if not v.is_zero():
                parts.append(f"({v})∂_{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Derivation({self}, parity={self.parity}, cutoff={self.cutoff})"


def _eval_cutoff(xi: Derivation, p: TruncatedPolynomial) -> int:
    a, b = xi.min_weight, max(p.min_weight, 1)
    return max(0, min(p.cutoff + a - 1, xi.cutoff + b - 1, max(p.cutoff, xi.cutoff)))


def _eval_terms(xi: Derivation, terms: Mapping[Monomial, Fraction], cutoff: int) -> Terms:
    par = xi.space.parities
    out: Terms = {}
    for mono, c in terms.items():
        prefix_parity = 0
        for j, gen in enumerate(mono):
            value = xi.values[gen].terms
            if value:
                left, right = mono[:j], mono[j + 1:]
                coeff = -c if (xi.parity and prefix_parity) else c
                base_len = len(left) + len(right)
                for vm, vc in value.items():
                    if base_len + len(vm) > cutoff:
                        continue
                    r1 = mono_mul(par, left, vm)
                    if r1 is None:
                        continue
                    r2 = mono_mul(par, r1[1], right)
                    if r2 is None:
                        continue
                    m = r2[1]
                    val = coeff * vc if r1[0] * r2[0] > 0 else -coeff * vc
                    out[m] = out.get(m, 0) + val
            prefix_parity ^= par[gen]
    return out


def evaluate(xi: Derivation, p: TruncatedPolynomial) -> TruncatedPolynomial:
    """Apply ξ to p by the graded Leibniz rule.

    The result is exact up to its reported cutoff: a value of weight ≥ a
    shifts weights by ``a - 1``, and both operands' truncations are honoured.
    """
    if p.space != xi.space:
        raise AlgebraError("derivation and polynomial live on different spaces")
    cutoff = _eval_cutoff(xi, p)
    out = _eval_terms(xi, p.terms, cutoff)
    return TruncatedPolynomial._make(p.space, cutoff, out, max(0, p.min_weight + xi.min_weight - 1))


def bracket(xi: Derivation, eta: Derivation) -> Derivation:
    """[ξ, η] = ξ∘η - (-1)^{|ξ||η|} η∘ξ."""
    xi._check(eta)
    sign = -1 if xi.parity * eta.parity else 1
    vals = []
    for i in range(xi.space.dim):
        a = evaluate(xi, eta.values[i])
        b = evaluate(eta, xi.values[i])
        vals.append(a - b if sign > 0 else a + b)
    cutoff = min(v.cutoff for v in vals) if vals else min(xi.cutoff, eta.cutoff)
    vals = [v.truncate(cutoff) for v in vals]
    mw = max(0, xi.min_weight + eta.min_weight - 1)
    return Derivation(xi.space, vals, (xi.parity + eta.parity) % 2, mw)


def compose_on(xi: Derivation, eta: Derivation, p: TruncatedPolynomial) -> TruncatedPolynomial:
    return evaluate(xi, evaluate(eta, p))


def partial_terms(space: GradedSpace, i: int, terms: Mapping[Monomial, Fraction]) -> Terms:
    """Left partial derivative ∂_{x_i} on a term dictionary."""
    par = space.parities
    pi = par[i]
    out: Terms = {}
    for mono, c in terms.items():
        prefix_parity = 0
        for j, gen in enumerate(mono):
            if gen == i:
                m = mono[:j] + mono[j + 1:]
                val = -c if (pi and prefix_parity) else c
                out[m] = out.get(m, 0) + val
            prefix_parity ^= par[gen]
    return {m: c for m, c in out.items() if c}


def partial(p: TruncatedPolynomial, i: int) -> TruncatedPolynomial:
    return TruncatedPolynomial._make(p.space, max(p.cutoff - 1, 0), partial_terms(p.space, i, p.terms),
                                     max(p.min_weight - 1, 0))


def divergence(xi: Derivation) -> TruncatedPolynomial:
    """∇ξ = Σ_i (-1)^{|f_i||x_i|} ∂_{x_i} f_i with f_i = ξ(x_i)."""
    space = xi.space
    out: Terms = {}
    for i, f in enumerate(xi.values):
        pi = space.parity(i)
        sign = -1 if (pi and (pi + xi.parity) % 2) else 1
        for m, c in partial_terms(space, i, f.terms).items():
            out[m] = out.get(m, 0) + sign * c
    return TruncatedPolynomial._make(space, max(xi.cutoff - 1, 0), out, max(xi.min_weight - 1, 0))


# ---------------------------------------------------------------------------
# multilinear dictionary


def _multiplicity_factor(mono: Monomial) -> int:
    out = 1
    i = 0
    while i < len(mono):
        j = i
        while j < len(mono) and mono[j] == mono[i]:
            j += 1
        out *= factorial(j - i)
        i = j
    return out


def polarize(p: TruncatedPolynomial, word: Sequence[int]) -> Fraction:
    """The symmetric form of p on inputs ``u_{w1}, ..., u_{wn}``.

    Defined as ``∂_{wn} ⋯ ∂_{w1} p`` evaluated at zero (the first input is
    differentiated first), which sums over all orderings with Koszul signs.
    """
    res = _normalize(p.space.parities, tuple(word))
    if res is None:
        return Fraction(0)
    sign, mono = res
    return sign * p.coefficient(mono) * _multiplicity_factor(mono)


def depolarize(space: GradedSpace, cutoff: int, values: Mapping[Monomial, object]) -> TruncatedPolynomial:
    """Inverse of :func:`polarize`; keys are canonical multisets."""
    return TruncatedPolynomial(space, cutoff, {m: rational(c) / _multiplicity_factor(m)
                                               for m, c in values.items()})


@dataclass(frozen=True)
class SymMultiMap:
    """A graded-symmetric n-ary map on the dual basis ``u_i`` of the generators.

    ``entries`` is keyed by canonical input multisets and holds the
    coefficients of the output on each ``u_k``.  Inputs in any other order
    are obtained by the Koszul rule.
    """

    space: GradedSpace
    arity: int
    entries: Mapping[Monomial, Mapping[int, Fraction]]
    parity: int

    def __call__(self, *inputs: int) -> Dict[int, Fraction]:
        if len(inputs) != self.arity:
            raise AlgebraError(f"expected {self.arity} inputs, got {len(inputs)}")
        res = _normalize(self.space.parities, tuple(inputs))
        if res is None:
            return {}
        sign, key = res
        return {k: sign * c for k, c in self.entries.get(key, {}).items()}

    def is_zero(self) -> bool:
        return not any(self.entries.values())


def to_multilinear(xi: Derivation, n: int) -> SymMultiMap:
    """ξ̃(u_1, ..., u_n) = Σ_k (polarization of ξ(x_k)) u_k, no 1/n! factor."""
    if n < 0:
        raise AlgebraError("arity must be non-negative")
    entries: Dict[Monomial, Dict[int, Fraction]] = {}
    for k, f in enumerate(xi.values):
        for mono, c in f.terms.items():
            if len(mono) != n:
                raise AlgebraError(f"derivation is not homogeneous of weight {n}")
            entries.setdefault(mono, {})[k] = c * _multiplicity_factor(mono)
    return SymMultiMap(xi.space, n, entries, xi.parity)


def from_multilinear(F: SymMultiMap, cutoff: Optional[int] = None) -> Derivation:
    cutoff = F.arity if cutoff is None else cutoff
    if cutoff < F.arity:
        raise AlgebraError("cutoff below the arity")
    vals: Dict[int, Dict[Monomial, Fraction]] = {}
    for mono, out in F.entries.items():
        fac = _multiplicity_factor(mono)
        for k, c in out.items():
            vals.setdefault(k, {})[mono] = Fraction(c) / fac
    return Derivation.from_terms(F.space, cutoff, F.parity, vals, F.arity)


def supertrace_of_slot(F: SymMultiMap, fixed: Sequence[int]) -> Fraction:
    """Supertrace of ``x -> F(fixed..., x)`` on the dual basis."""
    if F.arity < 1 or len(fixed) != F.arity - 1:
        raise AlgebraError("need arity - 1 fixed inputs")
    total = Fraction(0)
    for j in range(F.space.dim):
        c = F(*fixed, j).get(j, 0)
        total += -c if F.space.parity(j) else c
    return total


def random_derivation(rng, space: GradedSpace, cutoff: int, parity: int, *, weights: Sequence[int],
                      max_terms: int = 3, density: float = 0.6) -> Derivation:
    from .symalg import random_polynomial

    vals = [random_polynomial(rng, space, cutoff, weights=weights, parity=(space.parity(i) + parity) % 2,
                              max_terms=max_terms, density=density)
            for i in range(space.dim)]
    return Derivation(space, vals, parity, min(weights))
