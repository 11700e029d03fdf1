"""L∞ structures as odd derivations of Ŝ ΠV*, cyclicity, and the
Chevalley–Eilenberg complex with exact cocycle solving.

For a graded space V the function algebra Ŝ ΠV* has one generator per
basis vector of V, named ``v'`` and of parity ``|v| + 1``.  The same index
labels the dual basis vector ``u_v`` of ΠV on which the multilinear maps
act.  An n-ary bracket ℓ_n on V enters as

    m̃_n(Πv_1, ..., Πv_n) = -(-1)^{Σ_i (n-i)|v_i|} Π ℓ_n(v_1, ..., v_n),

so for a Lie algebra the map ``u -> m̃_2(Πx, u)`` is ``-Π ad(x) Π``, whose
supertrace on ΠV is the ordinary trace of ad(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .core import AlgebraError, BilinearForm, Complex, GradedSpace, LinearMap, rational
from .derivations import (Derivation, SymMultiMap, bracket, divergence, evaluate, from_multilinear,
                          partial_terms, polarize, to_multilinear)
from .symalg import (Monomial, Terms, TruncatedPolynomial, _basis, _normalize, basis_up_to,
                     monomial_parity)


@lru_cache(maxsize=None)
def generator_space(space: GradedSpace) -> GradedSpace:
    """Generators of Ŝ ΠV*: names decorated with a prime, parities flipped."""
    return GradedSpace(tuple(n + "'" for n in space.names), tuple(1 - p for p in space.parities))


def decalage_sign(parities: Sequence[int]) -> int:
    n = len(parities)
    e = sum((n - 1 - i) * p for i, p in enumerate(parities))
    return 1 if e % 2 else -1


def differential_derivation(d: LinearMap, cutoff: int) -> Derivation:
    """The linear derivation of Ŝ ΠV* induced by d: ``x_k -> Σ_j d[k, j] x_j``."""
    gens = generator_space(d.source)
    return Derivation.linear(gens, d.entries, 1, cutoff)


class LInftyStructure:
    """(V, d) together with an odd m ∈ Der_{≥2}(Ŝ ΠV*), known up to ``cutoff``."""

    def __init__(self, space: GradedSpace, m: Derivation, differential: Optional[LinearMap] = None,
                 cutoff: Optional[int] = None, check: bool = True):
        gens = generator_space(space)
        if m.space != gens:
            raise AlgebraError("m must be a derivation of Ŝ ΠV*")
        if differential is None:
            differential = LinearMap.zero(space, space, 1)
        if differential.source != space or differential.target != space:
            raise AlgebraError("differential must be an endomorphism of V")
        self.complex = Complex(space, differential)
        if not m.is_zero() and m.parity != 1:
            raise AlgebraError("an L∞ structure must be odd")
        if not m.is_zero() and m.min_weight < 2:
            raise AlgebraError("an L∞ structure must lie in Der_{≥2}")
        self.cutoff = m.cutoff if cutoff is None else cutoff
        self.m = Derivation(gens, [v.with_cutoff(self.cutoff) if v.cutoff < self.cutoff else v.truncate(self.cutoff)
                                   for v in m.values], 1, max(m.min_weight, 2))
        self.space = space
        self.generators = gens
        self.delta = differential_derivation(differential, self.cutoff)
        if check:
            report = check_mc(self.m, self.complex, self.cutoff)
            if not report.accepted:
                raise AlgebraError(f"MC equation fails in weights {report.failing_weights}")

    @property
    def differential(self) -> LinearMap:
        return self.complex.differential

    @property
    def total(self) -> Derivation:
        """d + m as a single odd derivation (the CE differential)."""
        return self.delta + Derivation(self.generators, self.m.values, 1, 1)

    @property
    def top_arity(self) -> int:
        return max(self.m.max_weight(), 1)

    @property
    def reliable_weight(self) -> int:
        return self.cutoff - (self.top_arity - 1)

    def brackets(self, n: int) -> SymMultiMap:
        return to_multilinear(self.m.weight_component(n), n)

    def divergence(self) -> TruncatedPolynomial:
        return divergence(self.m)

    def with_cutoff(self, cutoff: int) -> "LInftyStructure":
        return LInftyStructure(self.space, self.m.with_cutoff(cutoff), self.differential, cutoff, check=False)

    def __repr__(self) -> str:
        return f"LInftyStructure({self.space!r}, m={self.m})"


def structure_from_brackets(space: GradedSpace,
                            brackets: Mapping[Tuple[int, ...], Mapping[int, object]],
                            differential: Optional[LinearMap] = None, cutoff: int = 6,
                            check: bool = True) -> LInftyStructure:
    """Build m from brackets ℓ_n(v_{i1}, ..., v_{in}) = Σ c_k v_k on V.

    Each unordered input multiset may be given once, in any order.
    """
    gens = generator_space(space)
    par_v = space.parities
    by_arity: Dict[int, Dict[Monomial, Dict[int, Fraction]]] = {}
    seen = set()
    for inputs, out in brackets.items():
        n = len(inputs)
        if n < 2:
            raise AlgebraError("brackets must have arity at least 2; use the differential for arity 1")
        res = _normalize(gens.parities, tuple(inputs))
        if res is None:
            continue
        sign, key = res
        if key in seen:
            raise AlgebraError(f"inputs {inputs} given twice")
        seen.add(key)
        eps = decalage_sign([par_v[i] for i in inputs]) * sign
        for k, c in out.items():
            c = rational(c)
            if (sum(par_v[i] for i in inputs) + n + par_v[k]) % 2:
                raise AlgebraError(f"bracket on {inputs} has the wrong parity for output {k}")
            slot = by_arity.setdefault(n, {}).setdefault(key, {})
            slot[k] = slot.get(k, 0) + eps * c
    m = Derivation.zero(gens, cutoff, 1, 2)
    for n, entries in by_arity.items():
        if n > cutoff:
            continue
        m = m + from_multilinear(SymMultiMap(gens, n, entries, 1), cutoff)
    return LInftyStructure(space, m, differential, cutoff, check=check)


def structure_to_brackets(s: LInftyStructure) -> Dict[Tuple[int, ...], Dict[int, Fraction]]:
    """Inverse of :func:`structure_from_brackets` on canonical input order."""
    out: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
    par_v = s.space.parities
    for n in s.m.weights():
        F = s.brackets(n)
        for key, vals in F.entries.items():
            eps = decalage_sign([par_v[i] for i in key])
            row = {k: eps * c for k, c in vals.items() if c}
            if row:
                out[key] = row
    return dict(sorted(out.items()))


def lie_algebra(names: Sequence[str], structure: Mapping[Tuple[str, str], Mapping[str, object]],
                cutoff: int = 6) -> LInftyStructure:
    """An ordinary (purely even) Lie algebra from ``{(a, b): {c: coeff}}``."""
    space = GradedSpace(tuple(names), (0,) * len(names))
    brackets = {(space.index(a), space.index(b)): {space.index(c): v for c, v in out.items()}
                for (a, b), out in structure.items()}
    return structure_from_brackets(space, brackets, cutoff=cutoff)


# ---------------------------------------------------------------------------
# Maurer–Cartan check


@dataclass(frozen=True)
class MCReport:
    residual: Derivation
    by_weight: Dict[int, Derivation]
    exact_to: int

    @property
    def accepted(self) -> bool:
        return self.residual.is_zero()

    @property
    def failing_weights(self) -> List[int]:
        return sorted(w for w, r in self.by_weight.items() if not r.is_zero())


def mc_residual(m: Derivation, delta: Derivation) -> Derivation:
    """[δ, m] + ½[m, m]."""
    return bracket(delta, m) + bracket(m, m).scale(Fraction(1, 2))


def check_mc(m: Derivation, complex: Complex, cutoff: Optional[int] = None) -> MCReport:
    if not m.is_zero():
        if m.parity != 1:
            raise AlgebraError("m must be odd")
        if m.min_weight < 2:
            raise AlgebraError("m must lie in Der_{≥2}")
    if cutoff is not None:
        m = m.truncate(cutoff)
    delta = differential_derivation(complex.differential, m.cutoff)
    res = mc_residual(m, delta)
    by_weight = {w: res.weight_component(w) for w in res.weights()}
    return MCReport(res, by_weight, res.cutoff)


# ---------------------------------------------------------------------------
# cyclicity


@dataclass(frozen=True)
class CyclicData:
    """A (possibly degenerate) graded-symmetric form on V.

    ``omega`` is the induced constant form on ΠV in generator indices:
    ``omega[k, j] = (-1)^{|v_k|(|v_j|+1)} <v_k, v_j>``, which is the form itself
    when it is even and ``(-1)^{|v_k|} <v_k, v_j>`` when it is odd.
    """

    form: BilinearForm

    @property
    def space(self) -> GradedSpace:
        return self.form.space

    @property
    def parity(self) -> int:
        return self.form.parity

    @property
    def omega(self) -> Dict[Tuple[int, int], Fraction]:
        par = self.form.space.parity
        return {(k, j): (-c if par(k) * (par(j) + 1) % 2 else c) for (k, j), c in self.form.entries.items()}

    @property
    def nondegenerate(self) -> bool:
        return self.form.nondegenerate


@dataclass(frozen=True)
class CyclicReport:
    cyclic: bool
    violation: Optional[Tuple[Tuple[int, ...], Tuple[int, ...], Fraction, Fraction]] = None


def _cyclic_tensor(form_parity: int, maps: Mapping[int, SymMultiMap], omega_rows, gens: GradedSpace,
                   word: Sequence[int]) -> Fraction:
    n = len(word) - 1
    F = maps.get(n)
    if F is None:
        return Fraction(0)
    last = word[-1]
    total = Fraction(0)
    for k, c in F(*word[:-1]).items():
        w = omega_rows.get(k, {}).get(last)
        if w:
            total += c * w
    # moving the last input past ω costs a sign only for an even form
    return -total if (not form_parity and gens.parity(last)) else total


def check_cyclic(s: LInftyStructure, c: CyclicData) -> CyclicReport:
    """Graded S_{n+1}-symmetry of ``ω(m̃_n(u_1..u_n), u_{n+1})`` for every arity.

    The linear part d is included as arity one.
    """
    if c.space != s.space:
        raise AlgebraError("form lives on a different space")
    gens = s.generators
    omega_rows: Dict[int, Dict[int, Fraction]] = {}
    for (k, j), w in c.omega.items():
        omega_rows.setdefault(k, {})[j] = w
    maps: Dict[int, SymMultiMap] = {}
    total = s.total
    for n in total.weights():
        maps[n] = to_multilinear(total.weight_component(n), n)
    par = gens.parities
    for n, F in maps.items():
        # the first n slots are already symmetric; the last letter may repeat one of them
        for key in _basis(par, n):
            for last in range(gens.dim):
                word = key + (last,)
                base = _cyclic_tensor(c.parity, maps, omega_rows, gens, word)
                for r in range(1, n + 1):
                    rotated = word[r:] + word[:r]
                    head = sum(par[i] for i in word[:r])
                    tail = sum(par[i] for i in word[r:])
                    sign = -1 if head * tail % 2 else 1
                    val = _cyclic_tensor(c.parity, maps, omega_rows, gens, rotated)
                    if sign * val != base:
                        return CyclicReport(False, (tuple(word), tuple(rotated), base, sign * val))
    return CyclicReport(True)


def bracket_from_form(c: CyclicData):
    """The constant bracket on Ŝ ΠV* inverse to ω, for a nondegenerate form.

    An even form gives an even Poisson bracket with ``Pᵀ ω = 1``; an odd
    form gives an antibracket with ``Pᵀ ω = diag((-1)^{|x_j|})``.  With these
    choices every Hamiltonian field ``{h, -}`` preserves ω.
    """
    from .doubles import ConstantBracket

    n = c.space.dim
    inv = linalg.inverse(c.omega, n)
    if inv is None:
        raise AlgebraError("the form is degenerate")
    gens = generator_space(c.space)
    pairing = {}
    for (y, z), v in inv.items():
        pairing[(z, y)] = -v if (c.parity and gens.parity(z)) else v
    return ConstantBracket(gens, pairing, "odd" if c.parity else "even")


def lie_derivative_residual(s: LInftyStructure, c: CyclicData) -> List[TruncatedPolynomial]:
    """Closedness defects of the 1-form ι_m ω; all zero iff L_m ω = 0.

    With ``α_j = (-1)^{|m||x_j|} Σ_k m(x_k) ω[k, j]`` the defects are
    ``∂_i α_j - (-1)^{|x_i||x_j|} ∂_j α_i``.
    """
    if c.space != s.space:
        raise AlgebraError("form lives on a different space")
    gens = s.generators
    total = s.total
    n = gens.dim
    alpha: List[Terms] = [dict() for _ in range(n)]
    for (k, j), w in c.omega.items():
        sign = -1 if gens.parity(j) else 1
        for mono, coef in total.values[k].terms.items():
            alpha[j][mono] = alpha[j].get(mono, 0) + sign * w * coef
    out = []
    for i in range(n):
        for j in range(i, n):
            a = partial_terms(gens, i, alpha[j])
            b = partial_terms(gens, j, alpha[i])
            sign = -1 if gens.parity(i) * gens.parity(j) else 1
            diff = dict(a)
            for mono, v in b.items():
                diff[mono] = diff.get(mono, 0) - sign * v
            out.append(TruncatedPolynomial._make(gens, max(total.cutoff - 1, 0), diff))
    return out


def preserves_form(s: LInftyStructure, c: CyclicData) -> bool:
    return all(p.is_zero() for p in lie_derivative_residual(s, c))


# ---------------------------------------------------------------------------
# Chevalley–Eilenberg complex


@dataclass
class CeComplex:
    """Matrix of an odd derivation D (typically d + m) on the monomial basis
    of its function algebra in weights ``<= cutoff``.

    ``columns[j]`` is the image of ``basis[j]`` keyed by row index.  This is
    the quotient complex by Ŝ_{>cutoff}, which is a subcomplex because D does
    not lower weight.  ``reliable_weight`` marks the weights whose images
    stay below the cutoff.
    """

    space: GradedSpace
    operator: Derivation
    basis: List[Monomial]
    index: Dict[Monomial, int]
    columns: List[Dict[int, Fraction]]
    cutoff: int
    reliable_weight: int
    _echelons: Dict[Tuple[int, int], linalg.Echelon] = field(default_factory=dict, repr=False)

    def vector(self, p: TruncatedPolynomial) -> Dict[int, Fraction]:
        if p.space != self.space:
            raise AlgebraError("polynomial is not on the complex's generators")
        return {self.index[mono]: c for mono, c in p.terms.items() if len(mono) <= self.cutoff}

    def polynomial(self, vec: Mapping[int, Fraction]) -> TruncatedPolynomial:
        return TruncatedPolynomial(self.space, self.cutoff, {self.basis[i]: c for i, c in vec.items()})

    def apply(self, p: TruncatedPolynomial) -> TruncatedPolynomial:
        return self.polynomial(linalg.apply_columns(self.columns, self.vector(p)))

    def squares_to_zero(self) -> bool:
        return not any(linalg.apply_columns(self.columns, col) for col in self.columns)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def echelon(self, parity: int, min_weight: int) -> linalg.Echelon:
        """Image of the columns of one parity and weight ``>= min_weight``."""
        key = (parity, min_weight)
        if key not in self._echelons:
            ech = linalg.Echelon()
            par = self.space.parities
            for j, mono in enumerate(self.basis):
                if len(mono) >= min_weight and monomial_parity(par, mono) == parity:
                    ech.insert(self.columns[j], j)
            self._echelons[key] = ech
        return self._echelons[key]


def operator_complex(D: Derivation, cutoff: int, reliable_weight: Optional[int] = None) -> CeComplex:
    if not D.is_zero() and D.min_weight < 1:
        raise AlgebraError("the operator must not lower weight")
    if cutoff > D.cutoff:
        raise AlgebraError(f"operator is only known up to weight {D.cutoff}")
    space = D.space
    basis = basis_up_to(space, 0, cutoff)
    index = {m: i for i, m in enumerate(basis)}
    columns = []
    for mono in basis:
        img = evaluate(D, TruncatedPolynomial(space, cutoff, {mono: 1}, _trusted=True))
        columns.append({index[m]: c for m, c in img.terms.items() if len(m) <= cutoff})
    top = max(D.max_weight(), 1)
    if reliable_weight is None:
        reliable_weight = cutoff - (top - 1)
    return CeComplex(space, D, basis, index, columns, cutoff, reliable_weight)


def ce_assemble(s: LInftyStructure, cutoff: Optional[int] = None) -> CeComplex:
    """The Chevalley–Eilenberg complex (Ŝ ΠV*, d + m) truncated at ``cutoff``."""
    cutoff = s.cutoff if cutoff is None else cutoff
    return operator_complex(s.total, cutoff, cutoff - (s.top_arity - 1))


class NotClosedError(AlgebraError):
    def __init__(self, witness: TruncatedPolynomial):
        super().__init__(f"cochain is not closed: (d+m)c = {witness}")
        self.witness = witness


@dataclass(frozen=True)
class SolveResult:
    """Outcome of solving (d + m) h = c in the truncated complex.

    ``solution`` is set when a preimage exists up to ``exact_to``; otherwise
    ``class_representative`` is the canonical reduction of c modulo the
    image, which is nonzero and certifies that no solution exists.
    """

    solution: Optional[TruncatedPolynomial]
    class_representative: Optional[TruncatedPolynomial]
    exact_to: int
    kernel_dimension: int = 0

    @property
    def solvable(self) -> bool:
        return self.solution is not None


def ce_solve(ce: CeComplex, c: TruncatedPolynomial, min_weight: int = 1) -> SolveResult:
    """Find h in Ŝ_{≥min_weight} with (d + m) h = c, or certify there is none."""
    cvec = ce.vector(c.truncate(ce.cutoff))
    dc = linalg.apply_columns(ce.columns, cvec)
    if dc:
        raise NotClosedError(ce.polynomial(dc))
    if not cvec:
        return SolveResult(TruncatedPolynomial.zero(ce.space, ce.cutoff), None, ce.cutoff)
    pc = c.parity()
    if pc is None:
        raise AlgebraError("cochain must have homogeneous parity")
    ech = ce.echelon(1 - pc, min_weight)
    rem, combo = ech.residual(cvec)
    if rem:
        return SolveResult(None, ce.polynomial(rem), ce.cutoff)
    h = TruncatedPolynomial(ce.space, ce.cutoff, {ce.basis[j]: v for j, v in combo.items()})
    return SolveResult(h, None, ce.cutoff)


@dataclass(frozen=True)
class CohomologyReport:
    """Dimensions of H of the quotient complex Ŝ ΠV* / Ŝ_{>cutoff}.

    ``by_weight`` is filled only when d + m is homogeneous (raises weight by
    a fixed amount), in which case the complex splits by weight.
    """

    even: int
    odd: int
    by_weight: Optional[Dict[int, Tuple[int, int]]]
    reliable_weight: int


def ce_cohomology(ce: CeComplex) -> CohomologyReport:
    par = ce.space.parities
    total = ce.operator
    shifts = {w - 1 for w in total.weights()}
    dims = {}
    groups: Dict[Tuple, List[int]] = {}
    homogeneous = len(shifts) <= 1
    for j, mono in enumerate(ce.basis):
        key = (len(mono) if homogeneous else None, monomial_parity(par, mono))
        groups.setdefault(key, []).append(j)
    ranks = {key: linalg.rank(ce.columns[j] for j in cols) for key, cols in groups.items()}
    shift = next(iter(shifts)) if shifts else 0
    result: Dict[Tuple, int] = {}
    for (w, p), cols in groups.items():
        kernel = len(cols) - ranks[(w, p)]
        src = (w - shift, 1 - p) if homogeneous else (None, 1 - p)
        image = ranks.get(src, 0)
        result[(w, p)] = kernel - image
    even = sum(v for (w, p), v in result.items() if p == 0)
    odd = sum(v for (w, p), v in result.items() if p == 1)
    by_weight = None
    if homogeneous:
        by_weight = {}
        for (w, p), v in result.items():
            e, o = by_weight.get(w, (0, 0))
            by_weight[w] = (e + v, o) if p == 0 else (e, o + v)
        by_weight = dict(sorted(by_weight.items()))
    return CohomologyReport(even, odd, by_weight, ce.reliable_weight)


# ---------------------------------------------------------------------------
# doubles of a structure


def form_from_bracket(B, space: GradedSpace) -> CyclicData:
    """Inverse of :func:`bracket_from_form`: the form on V whose bracket is B."""
    gens = generator_space(space)
    if B.space.parities != gens.parities:
        raise AlgebraError("bracket does not live on Ŝ ΠV*")
    n = space.dim
    q = {}
    for (z, y), v in B.pairing.items():
        q[(y, z)] = -v if (B.parity and gens.parity(z)) else v
    omega = linalg.inverse(q, n)
    if omega is None:
        raise AlgebraError("the bracket is degenerate")
    par = space.parity
    entries = {(k, j): (-v if par(k) * (par(j) + 1) % 2 else v) for (k, j), v in omega.items()}
    return CyclicData(BilinearForm(space, entries, B.parity))


def transport(p: TruncatedPolynomial, target: GradedSpace) -> TruncatedPolynomial:
    """Relabel generators by position (same parities, new names)."""
    if p.space.parities != target.parities:
        raise AlgebraError("spaces have different parities")
    return TruncatedPolynomial(target, p.cutoff, p.terms, p.min_weight, _trusted=True)


def transport_derivation(xi: Derivation, target: GradedSpace) -> Derivation:
    return Derivation(target, [transport(v, target) for v in xi.values], xi.parity, xi.min_weight)


def split_linear(space: GradedSpace, X: Derivation) -> Tuple[LinearMap, Derivation]:
    """Split an odd derivation of Ŝ ΠV* (weights >= 1) into d on V and m."""
    gens = X.space
    entries = {}
    higher = []
    for k, v in enumerate(X.values):
        for mono, c in v.terms.items():
            if len(mono) == 1:
                entries[(k, mono[0])] = c
            elif len(mono) < 1:
                raise AlgebraError("derivation has a constant term")
        higher.append(TruncatedPolynomial._make(gens, v.cutoff, {m: c for m, c in v.terms.items() if len(m) >= 2}, 2))
    return LinearMap(space, space, entries, 1), Derivation(gens, higher, 1, 2)


@dataclass(frozen=True)
class DoubledStructure:
    """The L∞ structure on V ⊕ ΠV* (odd) or V ⊕ V* (even) from a double.

    ``hamiltonian`` is D(d + m) on the double's generators and ``structure``
    is the field ``{H, -}``, relabelled onto Ŝ Π(V ⊕ ...)*.
    """

    base: LInftyStructure
    kind: str
    hamiltonian: TruncatedPolynomial
    structure: LInftyStructure
    cyclic: CyclicData

    @property
    def space(self) -> GradedSpace:
        return self.structure.space


def double_structure(s: LInftyStructure, kind: str = "odd") -> DoubledStructure:
    from .doubles import DoubleSpace, bracket_field, double_even, double_odd

    V = s.space
    ds = DoubleSpace(s.generators, kind)
    if kind == "odd":
        partners = GradedSpace(tuple("Π" + n + "*" for n in V.names), tuple(1 - p for p in V.parities))
        H = double_odd(s.total, ds)
    else:
        partners = GradedSpace(tuple(n + "*" for n in V.names), V.parities)
        H = double_even(s.total, ds)
    U = V.direct_sum(partners)
    # {H, -} restricts to d + m on the original generators for both kinds
    X = bracket_field(H, ds.bracket)
    gens_u = generator_space(U)
    d_u, m_u = split_linear(U, transport_derivation(X, gens_u))
    structure = LInftyStructure(U, m_u, d_u, s.cutoff)
    B_u = type(ds.bracket)(gens_u, ds.bracket.pairing, kind)
    return DoubledStructure(s, kind, H, structure, form_from_bracket(B_u, U))
