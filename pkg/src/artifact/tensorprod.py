"""Finite-dimensional cdgas, a small Frobenius catalog, and tensor products
A ⊗ V of L∞ structures.

The generators of Ŝ Π(A⊗V)* are indexed ``α·dim V + i`` for basis vectors
a_α of A and generators x_i of Ŝ ΠV*; such a generator has parity
``|a_α| + |x_i|``.  A multilinear map F on ΠV becomes

    Ψ_A(F)(a_1 u_1, ..., a_n u_n) = ε (a_1 ⋯ a_n) F(u_1, ..., u_n),
    ε = (-1)^{Σ_{k<l} |u_k||a_l| + |F| Σ_k |a_k|},

and a multilinear function f becomes ``Ψ'_A(f) = ε Str(a_1 ⋯ a_n) f`` with
the same sign, where Str is the supertrace of multiplication.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import AlgebraError, BilinearForm, GradedSpace, LinearMap, rational, supertrace
from .derivations import Derivation, SymMultiMap, depolarize, from_multilinear, polarize, to_multilinear
from .linfty import CyclicData, LInftyStructure, generator_space, split_linear
from .symalg import TruncatedPolynomial, _basis

Vec = Dict[int, Fraction]


def max_dim() -> int:
    """Cap on dim(A ⊗ V), from LINFTY_MAX_DIM (default 64)."""
    raw = os.environ.get("LINFTY_MAX_DIM", "64")
    try:
        value = int(raw)
    except ValueError:
        raise AlgebraError(f"LINFTY_MAX_DIM must be an integer, got {raw!r}")
    if value < 1:
        raise AlgebraError("LINFTY_MAX_DIM must be positive")
    return value


@dataclass(frozen=True)
class Cdga:
    """Graded-commutative associative algebra with odd differential.

    ``product`` maps basis pairs to vectors and may be given on one side
    only; the other side is filled by graded commutativity.
    """

    space: GradedSpace
    product: Mapping[Tuple[int, int], Mapping[int, Fraction]]
    differential: Optional[LinearMap] = None
    unit: Optional[int] = None
    pairing: Optional[BilinearForm] = None

    def __post_init__(self):
        sp = self.space
        full: Dict[Tuple[int, int], Vec] = {}
        for (a, b), out in self.product.items():
            vec = {c: rational(v) for c, v in out.items() if rational(v)}
            for c in vec:
                if (sp.parity(a) + sp.parity(b) + sp.parity(c)) % 2:
                    raise AlgebraError(f"product {(a, b)} breaks parity")
            sign = -1 if sp.parity(a) * sp.parity(b) else 1
            for key, val in (((a, b), vec), ((b, a), {c: sign * v for c, v in vec.items()})):
                if key in full and full[key] != val:
                    raise AlgebraError(f"product on {key} is not graded-commutative")
                full[key] = val
        object.__setattr__(self, "product", {k: v for k, v in sorted(full.items()) if v})
        d = self.differential
        if d is None:
            d = LinearMap.zero(sp, sp, 1)
            object.__setattr__(self, "differential", d)
        elif d.source != sp or d.target != sp or d.parity != 1:
            raise AlgebraError("differential must be an odd endomorphism")
        if self.pairing is not None and self.pairing.space != sp:
            raise AlgebraError("pairing lives on a different space")
        self._check()

    @property
    def dim(self) -> int:
        return self.space.dim

    def mul(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, c in self.product.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return {k: v for k, v in out.items() if v}

    def basis(self, i: int) -> Vec:
        return {i: Fraction(1)}

    def multiplication(self, a: int) -> LinearMap:
        entries = {}
        for b in range(self.dim):
            for c, v in self.product.get((a, b), {}).items():
                entries[(c, b)] = v
        return LinearMap(self.space, self.space, entries, self.space.parity(a))

    def _check(self) -> None:
        n = self.dim
        e = self.basis
        for a in range(n):
            for b in range(n):
                ab = self.mul(e(a), e(b))
                for c in range(n):
                    if self.mul(ab, e(c)) != self.mul(e(a), self.mul(e(b), e(c))):
                        raise AlgebraError(f"product is not associative on {(a, b, c)}")
                d = self.differential
                lhs = d.apply(ab)
                rhs = self.mul(d.column(a), e(b))
                sign = -1 if self.space.parity(a) else 1
                for k, v in self.mul(e(a), d.column(b)).items():
                    rhs[k] = rhs.get(k, 0) + sign * v
                if lhs != {k: v for k, v in rhs.items() if v}:
                    raise AlgebraError(f"differential is not a derivation on {(a, b)}")
        if self.unit is not None:
            for a in range(n):
                if self.mul(e(self.unit), e(a)) != e(a):
                    raise AlgebraError("unit is not a unit")
        if self.pairing is not None:
            P = self.pairing
            for a in range(n):
                for b in range(n):
                    ab = self.mul(e(a), e(b))
                    for c in range(n):
                        if P.pair(ab, e(c)) != P.pair(e(a), self.mul(e(b), e(c))):
                            raise AlgebraError(f"pairing is not invariant on {(a, b, c)}")

    def basis_trace(self, i: int) -> Fraction:
        """Supertrace of multiplication by a basis vector (zero when odd)."""
        if self.space.parity(i):
            return Fraction(0)
        return supertrace(self.multiplication(i))

    def trace(self, a: Vec) -> Fraction:
        return sum((c * self.basis_trace(i) for i, c in a.items()), Fraction(0))

    @property
    def euler_characteristic(self) -> int:
        even, odd = self.space.signature
        return even - odd


def cdga_unimodular(A: Cdga) -> bool:
    return all(A.basis_trace(a) == 0 for a in range(A.dim))


def idempotent_criterion(A: Cdga, idempotents: Sequence[Mapping[int, object]]) -> bool:
    """Unimodularity via a complete set of orthogonal idempotents: every e_i A
    must have superdimension zero."""
    es = [{k: rational(v) for k, v in e.items() if rational(v)} for e in idempotents]
    total: Vec = {}
    for i, e in enumerate(es):
        for j, f in enumerate(es):
            prod = A.mul(e, f)
            if prod != (e if i == j else {}):
                raise AlgebraError("idempotents are not orthogonal idempotents")
        for k, v in e.items():
            total[k] = total.get(k, 0) + v
    if A.unit is None or {k: v for k, v in total.items() if v} != A.basis(A.unit):
        raise AlgebraError("idempotents do not sum to the unit")
    for e in es:
        M = LinearMap(A.space, A.space, {}, 0)
        for i, c in e.items():
            M = M + A.multiplication(i).scale(c)
        # e acts as a projection onto eA, so its supertrace is sdim(eA)
        if supertrace(M) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# catalog


def _frobenius(names, parities, product, pairing, pairing_parity) -> Cdga:
    sp = GradedSpace(tuple(names), tuple(parities))
    return Cdga(sp, product, unit=0, pairing=BilinearForm(sp, pairing, pairing_parity))


def _catalog() -> Dict[str, Cdga]:
    return {
        "k": _frobenius(["1"], [0], {(0, 0): {0: 1}}, {(0, 0): 1}, 0),
        "H_S1": _frobenius(["1", "θ"], [0, 1], {(0, 0): {0: 1}, (0, 1): {1: 1}}, {(0, 1): 1}, 1),
        "H_S2": _frobenius(["1", "w"], [0, 0], {(0, 0): {0: 1}, (0, 1): {1: 1}}, {(0, 1): 1}, 0),
        "H_S3": _frobenius(["1", "v"], [0, 1], {(0, 0): {0: 1}, (0, 1): {1: 1}}, {(0, 1): 1}, 1),
        "H_T2": _frobenius(["1", "a", "b", "ab"], [0, 1, 1, 0],
                           {(0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 1},
                            (1, 2): {3: 1}},
                           {(0, 3): 1, (1, 2): 1}, 0),
    }


FROBENIUS_NAMES = ("k", "H_S1", "H_S2", "H_S3", "H_T2")


@lru_cache(maxsize=None)
def frobenius(name: str) -> Cdga:
    try:
        return _catalog()[name]
    except KeyError:
        raise AlgebraError(f"unknown Frobenius algebra {name!r}; known: {', '.join(FROBENIUS_NAMES)}")


# ---------------------------------------------------------------------------
# tensor products


def tensor_space(A: Cdga, V: GradedSpace) -> GradedSpace:
    n = A.dim * V.dim
    if n > max_dim():
        raise AlgebraError(f"dim(A⊗V) = {n} exceeds LINFTY_MAX_DIM = {max_dim()}")
    names, pars = [], []
    for a, pa in zip(A.space.names, A.space.parities):
        for v, pv in zip(V.names, V.parities):
            names.append(f"{a}⊗{v}")
            pars.append((pa + pv) % 2)
    return GradedSpace(tuple(names), tuple(pars))


def _ordered_product(A: Cdga, alphas: Sequence[int]) -> Vec:
    out: Vec = {A.unit: Fraction(1)} if A.unit is not None else None
    for a in alphas:
        out = A.basis(a) if out is None else A.mul(out, A.basis(a))
        if not out:
            return {}
    return out or {}


def _tensor_sign(u_par: Sequence[int], a_par: Sequence[int], outer: int) -> int:
    e = outer * sum(a_par)
    for k in range(len(u_par)):
        if u_par[k]:
            e += sum(a_par[k + 1:])
    return -1 if e % 2 else 1


def psi(A: Cdga, xi: Derivation, target: Optional[GradedSpace] = None) -> Derivation:
    """Ψ_A on a derivation of Ŝ ΠV* (homogeneous components handled separately)."""
    gens = xi.space
    dimv = gens.dim
    tgt = target or _tensor_generators(A, gens)
    apar = A.space.parities
    out = Derivation.zero(tgt, xi.cutoff, xi.parity, max(xi.min_weight, 0))
    for n in xi.weights():
        F = to_multilinear(xi.weight_component(n), n)
        entries: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
        for key in _basis(tgt.parities, n):
            alphas = [g // dimv for g in key]
            js = [g % dimv for g in key]
            val = F(*js)
            if not val:
                continue
            prod = _ordered_product(A, alphas)
            if not prod:
                continue
            sign = _tensor_sign([gens.parity(j) for j in js], [apar[a] for a in alphas], xi.parity)
            row = {}
            for gamma, cg in prod.items():
                for k, ck in val.items():
                    row[gamma * dimv + k] = row.get(gamma * dimv + k, 0) + sign * cg * ck
            row = {k: v for k, v in row.items() if v}
            if row:
                entries[key] = row
        out = out + from_multilinear(SymMultiMap(tgt, n, entries, xi.parity), xi.cutoff)
    return Derivation(tgt, out.values, xi.parity, xi.min_weight)


def psi_prime(A: Cdga, f: TruncatedPolynomial, target: Optional[GradedSpace] = None) -> TruncatedPolynomial:
    """Ψ'_A: ``f̃(a_1 u_1, ...) -> ε Str(a_1 ⋯ a_n) f̃(u_1, ...)``."""
    gens = f.space
    dimv = gens.dim
    tgt = target or _tensor_generators(A, gens)
    apar = A.space.parities
    pf = f.parity() or 0
    values: Dict[Tuple[int, ...], Fraction] = {}
    for n in f.weights():
        for key in _basis(tgt.parities, n):
            alphas = [g // dimv for g in key]
            js = [g % dimv for g in key]
            val = polarize(f, js)
            if not val:
                continue
            prod = _ordered_product(A, alphas)
            tr = A.trace(prod)
            if not tr:
                continue
            sign = _tensor_sign([gens.parity(j) for j in js], [apar[a] for a in alphas], pf)
            values[key] = sign * tr * val
    out = depolarize(tgt, f.cutoff, values)
    return TruncatedPolynomial._make(tgt, f.cutoff, out.terms, f.min_weight)


def _tensor_generators(A: Cdga, gens: GradedSpace) -> GradedSpace:
    """Generators of Ŝ Π(A⊗V)* from those of Ŝ ΠV*."""
    n = A.dim * gens.dim
    if n > max_dim():
        raise AlgebraError(f"dim(A⊗V) = {n} exceeds LINFTY_MAX_DIM = {max_dim()}")
    names, pars = [], []
    for a, pa in zip(A.space.names, A.space.parities):
        for v, pv in zip(gens.names, gens.parities):
            names.append(f"{a}⊗{v}")
            pars.append((pa + pv) % 2)
    return GradedSpace(tuple(names), tuple(pars))


def algebra_differential(A: Cdga, gens: GradedSpace, tgt: GradedSpace, cutoff: int) -> Derivation:
    """The linear derivation induced by d_A on Ŝ Π(A⊗V)*: a u -> (d_A a) u."""
    dimv = gens.dim
    vals: Dict[int, Dict[Tuple[int, ...], Fraction]] = {}
    for (beta, alpha), c in A.differential.entries.items():
        for i in range(dimv):
            vals.setdefault(beta * dimv + i, {})[(alpha * dimv + i,)] = c
    return Derivation.from_terms(tgt, cutoff, 1, vals, 1)


def tensor_linfty(A: Cdga, s: LInftyStructure, check: bool = True) -> LInftyStructure:
    U = tensor_space(A, s.space)
    tgt = generator_space(U)
    linear = psi(A, s.delta, tgt) + algebra_differential(A, s.generators, tgt, s.cutoff)
    d, _ = split_linear(U, Derivation(tgt, linear.values, 1, 1))
    m = psi(A, s.m, tgt)
    return LInftyStructure(U, m, d, s.cutoff, check=check)


def tensor_pairing(A: Cdga, c: CyclicData) -> CyclicData:
    """``(a⊗v, b⊗u) = (-1)^{|v||b|} [a, b] <v, u>``."""
    if A.pairing is None:
        raise AlgebraError("the algebra has no pairing")
    U = tensor_space(A, c.space)
    dimv = c.space.dim
    entries = {}
    for (a, b), x in A.pairing.entries.items():
        for (v, u), y in c.form.entries.items():
            sign = -1 if (c.space.parity(v) * A.space.parity(b)) else 1
            entries[(a * dimv + v, b * dimv + u)] = sign * x * y
    return CyclicData(BilinearForm(U, entries, (A.pairing.parity + c.parity) % 2))
