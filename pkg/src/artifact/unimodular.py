"""Unimodular L∞ structures: the semidirect dgla Der_{≥2} ⋉ ΠŜ_{≥1}, the
trace obstruction [∇m], and the strictness classification of V.

An element of the semidirect algebra is a pair (ξ, Πf).  The derivations act
on the second factor without a sign, ``ξ · Πf = Πξ(f)``, and the external
differential sends ξ to ``(0, ½(-1)^{|ξ|+1} Π∇ξ)``.  On odd ξ, the only case
entering the MC equation, this is ``½Π∇ξ``, and the MC equation for (m, Πf)
unpacks to ``d(f) + ½∇m + m(f) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from . import linalg
from .core import AlgebraError, GradedSpace
from .derivations import Derivation, bracket, divergence, evaluate
from .linfty import (CeComplex, LInftyStructure, SolveResult, ce_assemble, ce_solve,
                     differential_derivation, generator_space)
from .symalg import Monomial, TruncatedPolynomial, monomial_basis, monomial_parity

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SemidirectElement:
    """(ξ, Πf) with ξ ∈ Der_{≥2}(Ŝ W) and f ∈ Ŝ_{≥1} W; parity |ξ| = |f| + 1."""

    xi: Derivation
    f: TruncatedPolynomial

    def __post_init__(self):
        if self.xi.space != self.f.space:
            raise AlgebraError("ξ and f live on different spaces")
        if not self.xi.is_zero() and self.xi.min_weight < 2:
            raise AlgebraError("ξ must lie in Der_{≥2}")
        if not self.f.is_zero():
            if self.f.min_weight < 1:
                raise AlgebraError("f must lie in Ŝ_{≥1}")
            pf = self.f.parity()
            if pf is None:
                raise AlgebraError("f must be homogeneous")
            if not self.xi.is_zero() and (pf + 1) % 2 != self.xi.parity:
                raise AlgebraError("ξ and Πf have different parities")

    @property
    def space(self) -> GradedSpace:
        return self.xi.space

    @property
    def parity(self) -> int:
        if not self.xi.is_zero():
            return self.xi.parity
        pf = self.f.parity()
        return self.xi.parity if pf is None else (pf + 1) % 2

    @classmethod
    def of(cls, xi: Derivation, f: Optional[TruncatedPolynomial] = None) -> "SemidirectElement":
        if f is None:
            f = TruncatedPolynomial.zero(xi.space, xi.cutoff, 1)
        return cls(xi, f)

    @classmethod
    def zero(cls, space: GradedSpace, cutoff: int, parity: int = 0) -> "SemidirectElement":
        return cls(Derivation.zero(space, cutoff, parity, 2), TruncatedPolynomial.zero(space, cutoff, 1))

    def __add__(self, other: "SemidirectElement") -> "SemidirectElement":
        return SemidirectElement(self.xi + other.xi, self.f + other.f)

    def __sub__(self, other: "SemidirectElement") -> "SemidirectElement":
        return SemidirectElement(self.xi - other.xi, self.f - other.f)

    def scale(self, c) -> "SemidirectElement":
        return SemidirectElement(self.xi.scale(c), self.f.scale(c))

    def is_zero(self) -> bool:
        return self.xi.is_zero() and self.f.is_zero()


def _with_parity(xi: Derivation, parity: int) -> Derivation:
    return xi if not xi.is_zero() else Derivation(xi.space, xi.values, parity, xi.min_weight)


def semidirect_bracket(a: SemidirectElement, b: SemidirectElement) -> SemidirectElement:
    """``[(ξ,Πf), (η,Πg)] = ([ξ,η], Π(ξ(g) - (-1)^{(|f|+1)|η|} η(f)))``."""
    pa, pb = a.parity, b.parity
    xi = bracket(_with_parity(a.xi, pa), _with_parity(b.xi, pb))
    left = evaluate(a.xi, b.f)
    right = evaluate(b.xi, a.f)
    f = left - right if not (pa * pb) else left + right
    return SemidirectElement(xi, f)


def internal_differential(a: SemidirectElement, delta: Derivation) -> SemidirectElement:
    """The differential induced by the linear odd derivation δ (from d on V)."""
    xi = bracket(delta, _with_parity(a.xi, a.parity))
    return SemidirectElement(Derivation(xi.space, xi.values, xi.parity, max(a.xi.min_weight, 2)),
                             evaluate(delta, a.f))


def external_differential(xi: Derivation) -> SemidirectElement:
    """d_e(ξ) = (0, ½(-1)^{|ξ|+1} Π∇ξ); equal to ½Π∇ξ for odd ξ."""
    if not xi.is_zero() and xi.min_weight < 2:
        raise AlgebraError("external differential is defined on Der_{≥2}")
    div = divergence(xi).scale(HALF if xi.parity else -HALF)
    div = TruncatedPolynomial._make(div.space, div.cutoff, div.terms, 1)
    zero = Derivation.zero(xi.space, div.cutoff, 1 - xi.parity, 2)
    return SemidirectElement(zero, div)


def total_differential(a: SemidirectElement, delta: Derivation) -> SemidirectElement:
    """(d + d_e)(ξ, Πf)."""
    return internal_differential(a, delta) + _truncate(external_differential(a.xi), a.f.cutoff)


def _truncate(a: SemidirectElement, cutoff: int) -> SemidirectElement:
    return SemidirectElement(a.xi, a.f.truncate(cutoff))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnimodularStructure:
    base: LInftyStructure
    f: TruncatedPolynomial

    def __post_init__(self):
        if self.f.space != self.base.generators:
            raise AlgebraError("f must live on Ŝ ΠV*")
        if not self.f.is_zero():
            if self.f.parity() != 0:
                raise AlgebraError("f must be even")
            if self.f.min_weight < 1:
                raise AlgebraError("f must lie in Ŝ_{≥1}")

    @property
    def strict(self) -> bool:
        return self.f.is_zero()


@dataclass(frozen=True)
class UnimodularReport:
    residual: TruncatedPolynomial
    strict: bool

    @property
    def accepted(self) -> bool:
        return self.residual.is_zero()

    @property
    def by_weight(self) -> Dict[int, TruncatedPolynomial]:
        return {w: self.residual.weight_component(w) for w in self.residual.weights()}


def unimodular_residual(s: LInftyStructure, f: TruncatedPolynomial) -> TruncatedPolynomial:
    """d(f) + ½∇m + m(f)."""
    f = f.truncate(s.cutoff)
    return evaluate(s.delta, f) + s.divergence().scale(HALF) + evaluate(s.m, f)


def check_unimodular(u: UnimodularStructure) -> UnimodularReport:
    return UnimodularReport(unimodular_residual(u.base, u.f), u.strict)


@dataclass(frozen=True)
class ObstructionReport:
    """Whether [∇m] vanishes in H_CE, decided in the quotient by weights > N.

    A nonzero ``witness`` is a rigorous certificate (a solution would survive
    truncation).  ``vanishes`` is exact up to weight ``exact_to``; ``lift``
    is then an even f with ``d(f) + ½∇m + m(f) = 0`` up to that weight.
    """

    vanishes: bool
    witness: Optional[TruncatedPolynomial]
    lift: Optional[TruncatedPolynomial]
    exact_to: int
    reliable_weight: int


def obstruction_class(s: LInftyStructure, ce: Optional[CeComplex] = None) -> ObstructionReport:
    ce = ce or ce_assemble(s)
    div = s.divergence()
    if div.truncate(ce.cutoff).is_zero():
        return ObstructionReport(True, None, TruncatedPolynomial.zero(s.generators, ce.cutoff, 1),
                                 ce.cutoff, ce.reliable_weight)
    # closedness of ∇m is automatic for an MC element; ce_solve checks it
    res: SolveResult = ce_solve(ce, div, min_weight=1)
    if not res.solvable:
        return ObstructionReport(False, res.class_representative, None, res.exact_to, ce.reliable_weight)
    lift = res.solution.scale(-HALF)
    lift = TruncatedPolynomial._make(lift.space, lift.cutoff, lift.terms, 1)
    return ObstructionReport(True, None, lift, res.exact_to, ce.reliable_weight)


@dataclass(frozen=True)
class LiftSpace:
    """All lifts up to weight N: ``particular + span(kernel)``."""

    particular: Optional[TruncatedPolynomial]
    kernel: List[TruncatedPolynomial]
    witness: Optional[TruncatedPolynomial]


def unimodular_lifts(s: LInftyStructure, ce: Optional[CeComplex] = None) -> LiftSpace:
    ce = ce or ce_assemble(s)
    report = obstruction_class(s, ce)
    par = ce.space.parities
    cols = [j for j, mono in enumerate(ce.basis) if len(mono) >= 1 and monomial_parity(par, mono) == 0]
    kernel = []
    for combo in linalg.kernel([ce.columns[j] for j in cols]):
        kernel.append(ce.polynomial({cols[i]: c for i, c in combo.items()}))
    return LiftSpace(report.lift, kernel, report.witness)


# ---------------------------------------------------------------------------
# Lie algebras


def ad_traces(s: LInftyStructure) -> List[Fraction]:
    """Supertrace of ad(v) on V for each basis vector v, read off the quadratic part."""
    from .linfty import structure_to_brackets

    space = s.space
    brackets = structure_to_brackets(s)

    def value(a: int, b: int) -> Dict[int, Fraction]:
        if a <= b:
            return brackets.get((a, b), {})
        sign = 1 if space.parity(a) * space.parity(b) else -1
        return {k: sign * c for k, c in brackets.get((b, a), {}).items()}

    out = []
    for a in range(space.dim):
        total = Fraction(0)
        for k in range(space.dim):
            c = value(a, k).get(k, 0)
            total += -c if space.parity(k) else c
        out.append(total)
    return out


def lie_unimodular(s: LInftyStructure) -> bool:
    """True iff every ad(v) is supertraceless (requires s purely quadratic)."""
    if any(w != 2 for w in s.m.weights()):
        raise AlgebraError("expected a graded Lie algebra (purely quadratic m)")
    return all(t == 0 for t in ad_traces(s))


# ---------------------------------------------------------------------------
# strictness classification


@dataclass(frozen=True)
class DimensionReport:
    """Image of ∇: Der_{≥2}(Ŝ ΠV*) -> Ŝ_{≥1} ΠV*, checked in weights ``1..N-1``.

    ``cokernel`` lists, per weight, a basis of a complement of the image.
    """

    space: GradedSpace
    checked_to: int
    cokernel: Dict[int, List[TruncatedPolynomial]]

    @property
    def surjective(self) -> bool:
        return not self.cokernel

    @property
    def kind(self) -> str:
        return "surjective" if self.surjective else "exceptional"


def classify_dimension(space: GradedSpace, cutoff: int = 6) -> DimensionReport:
    gens = generator_space(space)
    n = gens.dim
    cokernel: Dict[int, List[TruncatedPolynomial]] = {}
    for w in range(1, cutoff):
        target = monomial_basis(gens, w)
        if not target:
            continue
        index = {m: i for i, m in enumerate(target)}
        ech = linalg.Echelon()
        for mono in monomial_basis(gens, w + 1):
            for k in range(n):
                for parity in (0, 1):
                    if (monomial_parity(gens.parities, mono) + gens.parity(k)) % 2 != parity:
                        continue
                    xi = Derivation.from_terms(gens, w + 1, parity, {k: {mono: 1}})
                    div = divergence(xi)
                    ech.insert({index[m]: c for m, c in div.terms.items()})
        if ech.rank < len(target):
            missing = []
            for i, mono in enumerate(target):
                if ech.insert({i: Fraction(1)}):
                    missing.append(TruncatedPolynomial(gens, cutoff, {mono: 1}))
            cokernel[w] = missing
    return DimensionReport(space, cutoff - 1, cokernel)
