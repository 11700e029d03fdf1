"""Constant Poisson brackets, Hamiltonian fields, the odd Laplacian, and the
even/odd doubling maps Der(Ŝ V*) -> Ŝ(V* ⊕ V) and Ŝ(V* ⊕ ΠV).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Optional, Tuple

from .core import AlgebraError, GradedSpace, rational
from .derivations import Derivation, divergence, partial_terms
from .symalg import Terms, TruncatedPolynomial, embed, mono_mul, monomial_parity


@dataclass(frozen=True)
class ConstantBracket:
    """A bracket on Ŝ W fixed by constant values on pairs of generators.

    ``kind="odd"`` gives an antibracket {,} with ``{f,g} = (-1)^{|f||g|}{g,f}``;
    ``kind="even"`` gives a Poisson bracket with ``(f,g) = -(-1)^{|f||g|}(g,f)``.
    Values may be supplied on one side only; the other is filled by symmetry.
    """

    space: GradedSpace
    pairing: Mapping[Tuple[int, int], Fraction]
    kind: str = "odd"

    def __post_init__(self):
        if self.kind not in ("odd", "even"):
            raise AlgebraError("kind must be 'odd' or 'even'")
        par = self.space.parity
        shift = self.parity
        full: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), c in self.pairing.items():
            c = rational(c)
            if not c:
                continue
            if (par(i) + par(j) + shift) % 2:
                raise AlgebraError(f"bracket value on {(i, j)} has the wrong parity")
            mirror = c if shift else -c
            if par(i) * par(j):
                mirror = -mirror
            for key, val in (((i, j), c), ((j, i), mirror)):
                if key in full and full[key] != val:
                    raise AlgebraError(f"bracket value on {key} breaks the symmetry")
                full[key] = val
        object.__setattr__(self, "pairing", dict(sorted(full.items())))
        rows: Dict[int, Dict[int, Fraction]] = {}
        for (i, j), c in full.items():
            rows.setdefault(i, {})[j] = c
        object.__setattr__(self, "_rows", rows)

    @property
    def parity(self) -> int:
        return 1 if self.kind == "odd" else 0

    def swap_sign(self, pf: int, pg: int) -> int:
        s = -1 if pf * pg else 1
        return s if self.kind == "odd" else -s

    def __call__(self, f: TruncatedPolynomial, g: TruncatedPolynomial) -> TruncatedPolynomial:
        return poisson(self, f, g)


def _split_parity(p: TruncatedPolynomial) -> Dict[int, Terms]:
    out: Dict[int, Terms] = {}
    for m, c in p.terms.items():
        out.setdefault(monomial_parity(p.space.parities, m), {})[m] = c
    return out


def poisson(B: ConstantBracket, f: TruncatedPolynomial, g: TruncatedPolynomial) -> TruncatedPolynomial:
    """Biderivation extension of the generator values.

    Uses ``{f, g} = Σ_y s(f, y) (Σ_z P(y, z) ∂_z f) ∂_y g`` where ``s`` is the
    symmetry sign moving f past the generator y.
    """
    if f.space != B.space or g.space != B.space:
        raise AlgebraError("polynomials do not live on the bracket's space")
    space = B.space
    par = space.parities
    cutoff = max(0, min(f.cutoff - 1 + max(g.min_weight - 1, 0), g.cutoff - 1 + max(f.min_weight - 1, 0)))
    dg = {y: partial_terms(space, y, g.terms) for y in range(space.dim)}
    out: Terms = {}
    for pf, fterms in _split_parity(f).items():
        df = {z: partial_terms(space, z, fterms) for z in range(space.dim)}
        for y, row in B._rows.items():
            if not dg[y]:
                continue
            left: Terms = {}
            for z, c in row.items():
                for m, v in df[z].items():
                    left[m] = left.get(m, 0) + c * v
            s = B.swap_sign(pf, par[y])
            for a, ca in left.items():
                if not ca:
                    continue
                for b, cb in dg[y].items():
                    if len(a) + len(b) > cutoff:
                        continue
                    res = mono_mul(par, a, b)
                    if res is None:
                        continue
                    out[res[1]] = out.get(res[1], 0) + s * res[0] * ca * cb
    mw = max(0, f.min_weight + g.min_weight - 2)
    return TruncatedPolynomial._make(space, cutoff, out, mw)


def bracket_field(h: TruncatedPolynomial, B: ConstantBracket) -> Derivation:
    """The derivation ``g -> [h, g]`` for homogeneous h."""
    ph = h.parity()
    if ph is None:
        raise AlgebraError("Hamiltonian must have homogeneous parity")
    vals = [poisson(B, h, TruncatedPolynomial.generator(B.space, k, h.cutoff)) for k in range(B.space.dim)]
    cutoff = min(v.cutoff for v in vals) if vals else h.cutoff
    vals = [v.truncate(cutoff) for v in vals]
    return Derivation(B.space, vals, (ph + B.parity) % 2, max(0, h.min_weight - 1))


def hamiltonian_field(h: TruncatedPolynomial, B: ConstantBracket) -> Derivation:
    """X_h(g) = (-1)^{|h|} [h, g]; its parity is |h| plus the bracket parity."""
    field = bracket_field(h, B)
    return field.scale(-1) if h.parity() else field


@dataclass(frozen=True)
class DoubleSpace:
    """Generators [x_1..x_n, partners]; partner of i sits at i + n.

    Even double: partners x_i* with parity |x_i| and ``(x_i*, x_j) = δ_ij``.
    Odd double: partners Πx_i* with parity |x_i|+1 and ``{Πx_i*, x_j} = δ_ij``.
    """

    base: GradedSpace
    kind: str

    def __post_init__(self):
        if self.kind not in ("odd", "even"):
            raise AlgebraError("kind must be 'odd' or 'even'")

    @property
    def space(self) -> GradedSpace:
        return _double_space(self.base, self.kind)

    @property
    def dim(self) -> int:
        return self.base.dim

    def partner(self, i: int) -> int:
        return i + self.base.dim

    @property
    def bracket(self) -> ConstantBracket:
        return _double_bracket(self.base, self.kind)

    def embed(self, p: TruncatedPolynomial, cutoff: Optional[int] = None) -> TruncatedPolynomial:
        if p.space != self.base:
            raise AlgebraError("polynomial is not on the base space")
        return embed(p, self.space, list(range(self.base.dim)), cutoff)


@lru_cache(maxsize=None)
def _double_space(base: GradedSpace, kind: str) -> GradedSpace:
    if kind == "even":
        names = tuple(n + "*" for n in base.names)
        pars = base.parities
    else:
        names = tuple("Π" + n + "*" for n in base.names)
        pars = tuple(1 - p for p in base.parities)
    return GradedSpace(base.names + names, base.parities + pars)


@lru_cache(maxsize=None)
def _double_bracket(base: GradedSpace, kind: str) -> ConstantBracket:
    n = base.dim
    return ConstantBracket(_double_space(base, kind), {(n + i, i): 1 for i in range(n)}, kind)


def _require(ds: DoubleSpace, kind: str, *polys: TruncatedPolynomial) -> None:
    if ds.kind != kind:
        raise AlgebraError(f"expected an {kind} double")
    for p in polys:
        if p.space != ds.space:
            raise AlgebraError("polynomial is not on the double's space")


def even_bracket(ds: DoubleSpace, f: TruncatedPolynomial, g: TruncatedPolynomial) -> TruncatedPolynomial:
    _require(ds, "even", f, g)
    return poisson(ds.bracket, f, g)


def odd_bracket(ds: DoubleSpace, f: TruncatedPolynomial, g: TruncatedPolynomial) -> TruncatedPolynomial:
    _require(ds, "odd", f, g)
    return poisson(ds.bracket, f, g)


def laplacian(ds: DoubleSpace, g: TruncatedPolynomial) -> TruncatedPolynomial:
    """Δg = Σ_i ∂_{x_i} ∂_{Πx_i*} g."""
    _require(ds, "odd", g)
    space = ds.space
    out: Terms = {}
    for i in range(ds.dim):
        inner = partial_terms(space, ds.partner(i), g.terms)
        for m, c in partial_terms(space, i, inner).items():
            out[m] = out.get(m, 0) + c
    return TruncatedPolynomial._make(space, max(g.cutoff - 2, 0), out, max(g.min_weight - 2, 0))


def laplacian_via_divergence(B: ConstantBracket, g: TruncatedPolynomial) -> TruncatedPolynomial:
    """Δg = ½ ∇({g, -}); for even g this is ½ ∇(X_g)."""
    if B.kind != "odd":
        raise AlgebraError("the Laplacian needs an odd bracket")
    out: Optional[TruncatedPolynomial] = None
    for part in _split_parity(g).values():
        piece = TruncatedPolynomial._make(g.space, g.cutoff, part, g.min_weight)
        term = divergence(bracket_field(piece, B)).scale(Fraction(1, 2))
        out = term if out is None else out + term
    if out is None:
        return TruncatedPolynomial.zero(g.space, max(g.cutoff - 2, 0))
    return out


def _double(xi: Derivation, ds: DoubleSpace, odd: bool) -> TruncatedPolynomial:
    if xi.space != ds.base:
        raise AlgebraError("derivation is not on the double's base space")
    space = ds.space
    par = space.parities
    cutoff = xi.cutoff + 1
    out: Terms = {}
    for i, f in enumerate(xi.values):
        if f.is_zero():
            continue
        pf = (xi.space.parity(i) + xi.parity) % 2
        sign = -1 if (odd and pf) else 1
        for mono, c in f.terms.items():
            res = mono_mul(par, mono, (ds.partner(i),))
            if res is None:
                continue
            out[res[1]] = out.get(res[1], 0) + sign * res[0] * c
    return TruncatedPolynomial._make(space, cutoff, out, xi.min_weight + 1)


def double_even(xi: Derivation, ds: Optional[DoubleSpace] = None) -> TruncatedPolynomial:
    """D_ev(Σ f_i ∂_{x_i}) = Σ f_i x_i*."""
    ds = ds or DoubleSpace(xi.space, "even")
    if ds.kind != "even":
        raise AlgebraError("expected an even double")
    return _double(xi, ds, odd=False)


def double_odd(xi: Derivation, ds: Optional[DoubleSpace] = None) -> TruncatedPolynomial:
    """D_od(Σ f_i ∂_{x_i}) = Σ (-1)^{|f_i|} f_i Πx_i*."""
    ds = ds or DoubleSpace(xi.space, "odd")
    if ds.kind != "odd":
        raise AlgebraError("expected an odd double")
    return _double(xi, ds, odd=True)
