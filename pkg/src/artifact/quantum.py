"""Quantum L∞ structures on odd symplectic spaces.

A quantum structure is a series ``S = S_0 + h S_1 + h² S_2 + ...`` of even
functions on Ŝ ΠU* solving ``(d + hΔ)S + ½{S, S} = 0``.  A monomial of word
length n in S_g has weight 2g + n; only weights ``> 2`` are allowed and only
weights ``<= W`` are stored, so S_g is a polynomial truncated at ``W - 2g``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .core import AlgebraError, GradedSpace, LinearMap
from .derivations import Derivation, evaluate
from .doubles import ConstantBracket, bracket_field, laplacian_via_divergence, poisson
from .linfty import (CeComplex, CyclicData, LInftyStructure, bracket_from_form, ce_solve,
                     differential_derivation, generator_space, operator_complex)
from .symalg import TruncatedPolynomial, basis_up_to, monomial_parity
from .unimodular import UnimodularStructure

HALF = Fraction(1, 2)


def _min_length(genus: int) -> int:
    return max(0, 3 - 2 * genus)


@dataclass(frozen=True)
class QuantumStructure:
    """Components S_0..S_G on Ŝ ΠU* with an odd constant bracket and d on U."""

    base: GradedSpace
    bracket: ConstantBracket
    differential: LinearMap
    components: Tuple[TruncatedPolynomial, ...]
    weight: int

    def __post_init__(self):
        gens = generator_space(self.base)
        if self.bracket.space != gens:
            raise AlgebraError("bracket must live on Ŝ ΠU*")
        if self.bracket.kind != "odd":
            raise AlgebraError("a quantum structure needs an odd bracket")
        fixed = []
        for g, S in enumerate(self.components):
            if S.space != gens:
                raise AlgebraError(f"S_{g} lives on the wrong space")
            top = self.weight - 2 * g
            if top < 0:
                raise AlgebraError(f"S_{g} lies entirely above the weight cutoff")
            for mono in S.terms:
                n = len(mono)
                if 2 * g + n <= 2:
                    raise AlgebraError(f"S_{g} has a term of weight {2 * g + n} <= 2")
                if monomial_parity(gens.parities, mono):
                    raise AlgebraError(f"S_{g} is not even")
            if S.cutoff < top:
                raise AlgebraError(f"S_{g} is only known up to length {S.cutoff}, need {top}")
            fixed.append(S.truncate(top))
        object.__setattr__(self, "components", tuple(fixed))

    @property
    def space(self) -> GradedSpace:
        return self.bracket.space

    @property
    def genus(self) -> int:
        return len(self.components) - 1

    @property
    def delta(self) -> Derivation:
        return differential_derivation(self.differential, self.weight)

    def component(self, g: int) -> TruncatedPolynomial:
        if g < len(self.components):
            return self.components[g]
        return TruncatedPolynomial.zero(self.space, max(self.weight - 2 * g, 0), _min_length(g))

    def laplacian(self, p: TruncatedPolynomial) -> TruncatedPolynomial:
        return laplacian_via_divergence(self.bracket, p)

    def genus_zero_structure(self) -> LInftyStructure:
        X = bracket_field(self.components[0], self.bracket) if self.components else None
        if X is None or X.is_zero():
            X = Derivation.zero(self.space, max(self.weight - 1, 2), 1, 2)
        return LInftyStructure(self.base, X, self.differential, check=False)

    def unimodular_pair(self) -> UnimodularStructure:
        """(X_{S_0}, S_1)."""
        s = self.genus_zero_structure()
        f = self.component(1).with_cutoff(s.cutoff).truncate(s.cutoff) if self.genus >= 1 else \
            TruncatedPolynomial.zero(self.space, s.cutoff, 1)
        f = TruncatedPolynomial._make(f.space, f.cutoff, f.terms, 1)
        return UnimodularStructure(s, f)


@dataclass(frozen=True)
class QmeReport:
    """Residual of the genus-g part, split by total weight 2g + n."""

    residuals: Dict[int, TruncatedPolynomial]

    @property
    def accepted(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    @property
    def by_bidegree(self) -> Dict[Tuple[int, int], TruncatedPolynomial]:
        out = {}
        for g, r in self.residuals.items():
            for n in r.weights():
                out[(g, 2 * g + n)] = r.weight_component(n)
        return out


def genus_residual(q: QuantumStructure, g: int) -> TruncatedPolynomial:
    """d S_g + Δ S_{g-1} + ½ Σ_{i+j=g} {S_i, S_j}, exact up to length W - 2g."""
    top = q.weight - 2 * g
    out = evaluate(q.delta, q.component(g)).truncate(top)
    if g >= 1:
        out = out + q.laplacian(q.component(g - 1)).truncate(top)
    for i in range(g + 1):
        term = poisson(q.bracket, q.component(i), q.component(g - i))
        out = out + term.truncate(top).scale(HALF)
    return out.truncate(top)


def check_qme(q: QuantumStructure) -> QmeReport:
    return QmeReport({g: genus_residual(q, g) for g in range(q.genus + 1)})


# ---------------------------------------------------------------------------
# classical data


def hamiltonian_of_structure(m: Derivation, c: CyclicData) -> TruncatedPolynomial:
    """The even h with ``{h, -} = m`` and no constant term.

    Raises if the form is degenerate or m is not Hamiltonian (not cyclic).
    """
    if c.parity != 1:
        raise AlgebraError("expected an odd form")
    B = bracket_from_form(c)
    if m.space != B.space:
        raise AlgebraError("m does not live on Ŝ ΠV*")
    N = m.cutoff
    if m.is_zero():
        return TruncatedPolynomial.zero(B.space, N + 1, 1)
    lo = max(m.min_weight, 1) + 1
    gens = B.space
    monos = [mono for mono in basis_up_to(gens, lo, N + 1) if not monomial_parity(gens.parities, mono)]
    columns = []
    for mono in monos:
        X = bracket_field(TruncatedPolynomial(gens, N + 1, {mono: 1}, _trusted=True), B)
        columns.append({(k, t): v for k, val in enumerate(X.values) for t, v in val.terms.items()})
    rhs = {(k, t): v for k, val in enumerate(m.values) for t, v in val.terms.items()}
    combo = linalg.solve(columns, rhs)
    if combo is None:
        raise AlgebraError("m is not a Hamiltonian vector field for this form (not cyclic)")
    h = TruncatedPolynomial(gens, N + 1, {monos[j]: v for j, v in combo.items()})
    return h


def classical_residual(B: ConstantBracket, delta: Derivation, S0: TruncatedPolynomial) -> TruncatedPolynomial:
    """d S_0 + ½{S_0, S_0}."""
    top = S0.cutoff
    return evaluate(delta, S0).truncate(top) + poisson(B, S0, S0).truncate(top).scale(HALF)


# ---------------------------------------------------------------------------
# order-by-order lifting


@dataclass(frozen=True)
class Obstruction:
    genus: int
    witness: TruncatedPolynomial


@dataclass(frozen=True)
class LiftResult:
    """Greedy lift ``S_1..S_g``; stops at the first obstructed genus.

    ``freedom[g]`` is the dimension of the affine space of choices for S_g
    given the lower components.
    """

    structure: QuantumStructure
    obstruction: Optional[Obstruction]
    freedom: Dict[int, int] = field(default_factory=dict)

    @property
    def lifted(self) -> bool:
        return self.obstruction is None

    @property
    def components(self) -> Tuple[TruncatedPolynomial, ...]:
        return self.structure.components


def quantum_lift(base: GradedSpace, B: ConstantBracket, differential: LinearMap, S0: TruncatedPolynomial,
                 genus: int, weight: int) -> LiftResult:
    gens = generator_space(base)
    S0 = S0.truncate(weight) if S0.cutoff >= weight else S0
    if S0.cutoff < weight:
        raise AlgebraError(f"S_0 is only known up to weight {S0.cutoff}")
    delta = differential_derivation(differential, weight)
    if not classical_residual(B, delta, S0).is_zero():
        raise AlgebraError("S_0 does not satisfy the classical master equation")
    comps = [S0]
    q = QuantumStructure(base, B, differential, tuple(comps), weight)
    X0 = bracket_field(S0, B) if not S0.is_zero() else Derivation.zero(gens, weight, 1, 1)
    operator = delta + Derivation(gens, X0.values, 1, 1).with_cutoff(max(X0.cutoff, weight))
    operator = Derivation(gens, operator.values, 1, 1)
    freedom: Dict[int, int] = {}
    for g in range(1, genus + 1):
        top = weight - 2 * g
        if top < 0:
            break
        rhs = q.laplacian(q.component(g - 1)).truncate(top)
        for i in range(1, g):
            rhs = rhs + poisson(B, q.component(i), q.component(g - i)).truncate(top).scale(HALF)
        rhs = rhs.truncate(top).scale(-1)
        ce = operator_complex(operator.truncate(top) if top <= operator.cutoff else operator, top)
        lo = _min_length(g)
        res = ce_solve(ce, rhs, min_weight=lo)
        if not res.solvable:
            return LiftResult(q, Obstruction(g, res.class_representative), freedom)
        freedom[g] = _freedom(ce, lo)
        Sg = TruncatedPolynomial._make(gens, top, res.solution.terms, lo)
        comps.append(Sg)
        q = QuantumStructure(base, B, differential, tuple(comps), weight)
    return LiftResult(q, None, freedom)


def _freedom(ce: CeComplex, lo: int) -> int:
    par = ce.space.parities
    cols = [j for j, mono in enumerate(ce.basis) if len(mono) >= lo and not monomial_parity(par, mono)]
    return len(cols) - linalg.rank(ce.columns[j] for j in cols)


def quantum_lift_structure(s: LInftyStructure, c: CyclicData, genus: int, weight: int) -> LiftResult:
    """Lift the cyclic structure (s, c) with c odd and nondegenerate."""
    if s.cutoff + 1 < weight:
        raise AlgebraError(f"structure is only known up to weight {s.cutoff}; need {weight - 1}")
    S0 = hamiltonian_of_structure(s.m, c)
    return quantum_lift(s.space, bracket_from_form(c), s.differential, S0, genus, weight)
