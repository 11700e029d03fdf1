"""Gauge theory in nilpotent dglas: BCH product, gauge action, twisting,
and validation/repair of strong deformation retractions.

Two kinds of dgla are supported through the same small interface:
:class:`DglaPresentation` (finite-dimensional, structure constants) and
:class:`DerivationDgla` (Der_{≥2}(Ŝ W) with ``d = [δ, -]``, nilpotent modulo
the weight cutoff).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .core import AlgebraError, BilinearForm, Complex, GradedSpace, LinearMap, rational
from .derivations import Derivation, bracket as der_bracket

Vec = Dict[int, Fraction]


# ---------------------------------------------------------------------------
# finite-dimensional presentations


@dataclass(frozen=True)
class DglaPresentation:
    """A finite-dimensional dgla from structure constants ``[e_i, e_j] = Σ c_k e_k``.

    Brackets may be given on one side; the mirror is filled by graded
    antisymmetry.  Jacobi, Leibniz and d² = 0 are checked on construction.
    """

    space: GradedSpace
    differential: LinearMap
    structure: Mapping[Tuple[int, int], Mapping[int, Fraction]]

    def __post_init__(self):
        sp = self.space
        full: Dict[Tuple[int, int], Vec] = {}
        for (i, j), out in self.structure.items():
            vec = {k: rational(v) for k, v in out.items() if rational(v)}
            for k in vec:
                if (sp.parity(i) + sp.parity(j) + sp.parity(k)) % 2:
                    raise AlgebraError(f"bracket {(i, j)} breaks parity")
            sign = 1 if sp.parity(i) * sp.parity(j) else -1
            for key, val in (((i, j), vec), ((j, i), {k: sign * v for k, v in vec.items()})):
                if key in full and full[key] != val:
                    raise AlgebraError(f"bracket on {key} is not graded-antisymmetric")
                full[key] = val
        object.__setattr__(self, "structure", {k: v for k, v in sorted(full.items()) if v})
        Complex(sp, self.differential)
        self._check()

    @classmethod
    def from_names(cls, gens: Sequence[Tuple[str, int]], brackets: Mapping[Tuple[str, str], Mapping[str, object]],
                   differential: Optional[Mapping[str, Mapping[str, object]]] = None) -> "DglaPresentation":
        sp = GradedSpace.of(*gens)
        st = {(sp.index(a), sp.index(b)): {sp.index(c): v for c, v in out.items()}
              for (a, b), out in brackets.items()}
        entries = {}
        for src, out in (differential or {}).items():
            for tgt, v in out.items():
                entries[(sp.index(tgt), sp.index(src))] = rational(v)
        return cls(sp, LinearMap(sp, sp, entries, 1), st)

    # element operations
    def bracket(self, x: Vec, y: Vec) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.structure.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v}

    def d(self, x: Vec) -> Vec:
        return self.differential.apply(x)

    def add(self, x: Vec, y: Vec) -> Vec:
        out = dict(x)
        linalg.axpy(out, Fraction(1), y)
        return out

    def scale(self, x: Vec, c) -> Vec:
        c = rational(c)
        return {k: c * v for k, v in x.items() if c * v}

    def zero(self, parity: int = 0) -> Vec:
        return {}

    def is_zero(self, x: Vec) -> bool:
        return not x

    def parity_of(self, x: Vec) -> Optional[int]:
        ps = {self.space.parity(i) for i in x}
        return ps.pop() if len(ps) == 1 else (None if ps else 0)

    def basis(self, i: int) -> Vec:
        return {i: Fraction(1)}

    def _check(self) -> None:
        n = self.space.dim
        e = self.basis
        par = self.space.parity
        for a in range(n):
            for b in range(n):
                ab = self.bracket(e(a), e(b))
                lhs = self.d(ab)
                rhs = self.add(self.bracket(self.d(e(a)), e(b)),
                               self.scale(self.bracket(e(a), self.d(e(b))), -1 if par(a) else 1))
                if lhs != rhs:
                    raise AlgebraError(f"d is not a derivation on {(a, b)}")
                for c in range(n):
                    left = self.bracket(e(a), self.bracket(e(b), e(c)))
                    right = self.add(self.bracket(ab, e(c)),
                                     self.scale(self.bracket(e(b), self.bracket(e(a), e(c))),
                                                -1 if par(a) * par(b) else 1))
                    if left != right:
                        raise AlgebraError(f"Jacobi fails on {(a, b, c)}")

    def nilpotency_index(self) -> Optional[int]:
        """Smallest k with g^k = 0 in the lower central series (g^1 = g), or None."""
        n = self.space.dim
        current = [self.basis(i) for i in range(n)]
        for k in range(1, n + 2):
            if not current:
                return k
            nxt = linalg.Echelon()
            for x in current:
                for i in range(n):
                    nxt.insert(self.bracket(self.basis(i), x))
            current = list(nxt.rows)
        return None

    def adjoint(self, x: Vec) -> LinearMap:
        par = self.parity_of(x)
        entries = {}
        for j in range(self.space.dim):
            for k, v in self.bracket(x, self.basis(j)).items():
                entries[(k, j)] = v
        return LinearMap(self.space, self.space, entries, par or 0)

    def cohomology(self) -> Tuple[int, int]:
        """(even, odd) dimensions of H(g, d)."""
        dims = []
        d = self.differential
        for p in (0, 1):
            cols = [j for j in range(self.space.dim) if self.space.parity(j) == p]
            src = [j for j in range(self.space.dim) if self.space.parity(j) != p]
            kernel = len(cols) - linalg.rank(d.column(j) for j in cols)
            image = linalg.rank(d.column(j) for j in src)
            dims.append(kernel - image)
        return dims[0], dims[1]


class DerivationDgla:
    """Der_{≥2}(Ŝ W) with differential ``[δ, -]``; elements are Derivations."""

    def __init__(self, space: GradedSpace, delta: Optional[Derivation], cutoff: int):
        self.space = space
        self.cutoff = cutoff
        if delta is None:
            delta = Derivation.zero(space, cutoff, 1, 1)
        if not delta.is_zero() and (delta.parity != 1 or delta.max_weight() != 1):
            raise AlgebraError("δ must be an odd linear derivation")
        if not der_bracket(delta, delta).is_zero():
            raise AlgebraError("δ does not square to zero")
        self.delta = delta.with_cutoff(cutoff) if delta.cutoff < cutoff else delta.truncate(cutoff)

    def _fix(self, x: Derivation) -> Derivation:
        if x.space != self.space:
            raise AlgebraError("element lives on the wrong space")
        if not x.is_zero() and x.min_weight < 2:
            raise AlgebraError("element must lie in Der_{≥2}")
        x = x.truncate(self.cutoff) if x.cutoff > self.cutoff else x
        return Derivation(self.space, x.values, x.parity, 2)

    def bracket(self, x: Derivation, y: Derivation) -> Derivation:
        out = der_bracket(self._fix(x), self._fix(y))
        return Derivation(self.space, out.values, out.parity, 2)

    def d(self, x: Derivation) -> Derivation:
        out = der_bracket(self.delta, self._fix(x))
        return Derivation(self.space, out.values, out.parity, 2)

    def add(self, x: Derivation, y: Derivation) -> Derivation:
        return self._fix(x) + self._fix(y)

    def scale(self, x: Derivation, c) -> Derivation:
        return x.scale(c)

    def zero(self, parity: int = 0) -> Derivation:
        return Derivation.zero(self.space, self.cutoff, parity, 2)

    def is_zero(self, x: Derivation) -> bool:
        return x.is_zero()

    def parity_of(self, x: Derivation) -> Optional[int]:
        return x.parity

    def nilpotency_index(self) -> Optional[int]:
        # each bracket with Der_{≥2} raises weight, so cutoff brackets vanish
        return self.cutoff + 1


# ---------------------------------------------------------------------------
# MC, gauge, BCH


def mc_residual(g, xi):
    """dξ + ½[ξ, ξ]."""
    return g.add(g.d(xi), g.scale(g.bracket(xi, xi), Fraction(1, 2)))


def is_mc(g, xi) -> bool:
    return g.is_zero(mc_residual(g, xi))


def _series_limit(g) -> int:
    k = g.nilpotency_index()
    if k is None:
        raise AlgebraError("dgla is not nilpotent; the series would not terminate")
    return k


def gauge_apply(g, y, xi, check: bool = True):
    """e^y · ξ = ξ + Σ_{n≥1} (1/n!) ad(y)^{n-1}(ad(y)ξ - dy)."""
    if g.parity_of(y) not in (0, None) and not g.is_zero(y):
        raise AlgebraError("gauge parameter must be even")
    if check and not is_mc(g, xi):
        raise AlgebraError("ξ is not a Maurer–Cartan element")
    term = g.add(g.bracket(y, xi), g.scale(g.d(y), -1))
    out = xi
    limit = _series_limit(g)
    n = 1
    while not g.is_zero(term):
        if n > limit + 1:
            raise AlgebraError("gauge series did not terminate within the nilpotency bound")
        out = g.add(out, g.scale(term, Fraction(1, factorial(n))))
        term = g.bracket(y, term)
        n += 1
    return out


def twist(g: DglaPresentation, xi: Vec) -> DglaPresentation:
    """The dgla with the same bracket and differential d + ad(ξ)."""
    if xi and g.parity_of(xi) != 1:
        raise AlgebraError("ξ must be odd")
    d = g.differential + g.adjoint(xi) if xi else g.differential
    if not (d @ d).is_zero():
        raise AlgebraError("(d^ξ)² ≠ 0: ξ is not Maurer–Cartan")
    return DglaPresentation(g.space, d, g.structure)


def twisted_differential(g, xi, y):
    """d^ξ y = dy + [ξ, y]."""
    return g.add(g.d(y), g.bracket(xi, y))


def stabilizes(g, xi, y) -> bool:
    """True when y is a d^ξ-cycle, which makes e^y fix ξ."""
    return g.is_zero(twisted_differential(g, xi, y))


def star_action(g, xi, y, eta):
    """``e^y ⋆ η = e^y · (η + ξ) - ξ`` on MC(g^ξ)."""
    moved = gauge_apply(g, y, g.add(eta, xi))
    return g.add(moved, g.scale(xi, -1))


# free Lie words for BCH

Word = Tuple[int, ...]


def _mul_words(a: Dict[Word, Fraction], b: Dict[Word, Fraction], cap: int) -> Dict[Word, Fraction]:
    out: Dict[Word, Fraction] = {}
    for u, x in a.items():
        for v, y in b.items():
            if len(u) + len(v) <= cap:
                w = u + v
                out[w] = out.get(w, 0) + x * y
    return {w: c for w, c in out.items() if c}


def _exp_words(a: Dict[Word, Fraction], cap: int) -> Dict[Word, Fraction]:
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for n in range(1, cap + 1):
        power = _mul_words(power, a, cap)
        for w, c in power.items():
            out[w] = out.get(w, 0) + c / factorial(n)
    return {w: c for w, c in out.items() if c}


def _log_words(a: Dict[Word, Fraction], cap: int) -> Dict[Word, Fraction]:
    z = {w: c for w, c in a.items() if w}
    if a.get((), 0) != 1:
        raise AlgebraError("log needs constant term 1")
    out: Dict[Word, Fraction] = {}
    power = {(): Fraction(1)}
    for n in range(1, cap + 1):
        power = _mul_words(power, z, cap)
        for w, c in power.items():
            out[w] = out.get(w, 0) + Fraction((-1) ** (n + 1), n) * c
    return {w: c for w, c in out.items() if c}


def bch_series(cap: int) -> Dict[Word, Fraction]:
    """log(e^X e^Y) in the free associative algebra on X=0, Y=1, up to length cap."""
    ex = _exp_words({(0,): Fraction(1)}, cap)
    ey = _exp_words({(1,): Fraction(1)}, cap)
    return _log_words(_mul_words(ex, ey, cap), cap)


def bch_lie_terms(cap: int) -> Dict[Word, Fraction]:
    """BCH as right-nested commutators ``[w1, [w2, ..., w_n]]`` (Dynkin projection)."""
    out: Dict[Word, Fraction] = {}
    for w, c in bch_series(cap).items():
        out[w] = out.get(w, 0) + c / len(w)
    return {w: c for w, c in out.items() if c}


def bch(g, x, y, cap: Optional[int] = None):
    """x • y with e^x e^y = e^{x•y}, exact in a nilpotent dgla."""
    for z in (x, y):
        if not g.is_zero(z) and g.parity_of(z) != 0:
            raise AlgebraError("BCH is taken of even elements")
    limit = _series_limit(g)
    cap = limit if cap is None else cap
    if cap < limit:
        raise AlgebraError(f"cap {cap} is below the nilpotency bound {limit}")
    letters = (x, y)
    out = g.add(x, y)
    for w, c in bch_lie_terms(cap).items():
        if len(w) == 1:
            continue
        val = letters[w[-1]]
        for i in reversed(w[:-1]):
            if g.is_zero(val):
                break
            val = g.bracket(letters[i], val)
        if not g.is_zero(val):
            out = g.add(out, g.scale(val, c))
    return out


# ---------------------------------------------------------------------------
# strong deformation retractions


@dataclass(frozen=True)
class SdrData:
    """Maps i: B -> V, p: V -> B (even) and s: V -> V (odd) between complexes."""

    big: Complex
    small: Complex
    i: LinearMap
    p: LinearMap
    s: LinearMap

    def __post_init__(self):
        V, B = self.big.space, self.small.space
        if (self.i.source, self.i.target, self.i.parity) != (B, V, 0):
            raise AlgebraError("i must be an even map B -> V")
        if (self.p.source, self.p.target, self.p.parity) != (V, B, 0):
            raise AlgebraError("p must be an even map V -> B")
        if (self.s.source, self.s.target, self.s.parity) != (V, V, 1):
            raise AlgebraError("s must be an odd map V -> V")
        if (self.big.form is None) != (self.small.form is None):
            raise AlgebraError("forms must be given on both complexes or neither")

    @property
    def has_forms(self) -> bool:
        return self.big.form is not None


SDR_CONDITIONS = {
    1: "d i = i d and d p = p d",
    2: "p i = id",
    3: "d s + s d = id - i p",
    4: "s i = 0 and p s = 0",
    5: "s s = 0",
    6: "<i x, i y> = <x, y>",
    7: "ker p is orthogonal to im i",
    8: "<s x, y> = (-1)^{|x|} <x, s y>",
}


def _eq(a: LinearMap, b: LinearMap) -> bool:
    return (a - b).is_zero()


def _form_checks(t: SdrData) -> Dict[int, bool]:
    V, B = t.big.space, t.small.space
    fv, fb = t.big.form, t.small.form
    out = {}
    out[6] = all(fv.pair(t.i.column(x), t.i.column(y)) == fb(x, y) for x in range(B.dim) for y in range(B.dim))
    kernel = linalg.kernel([t.p.column(j) for j in range(V.dim)])
    ok = True
    for k in kernel:
        for y in range(B.dim):
            iy = t.i.column(y)
            if fv.pair(k, iy) or fv.pair(iy, k):
                ok = False
    out[7] = ok
    ok = True
    for x in range(V.dim):
        for y in range(V.dim):
            lhs = fv.pair(t.s.column(x), {y: Fraction(1)})
            rhs = fv.pair({x: Fraction(1)}, t.s.column(y))
            if lhs != (-rhs if V.parity(x) else rhs):
                ok = False
    out[8] = ok
    return out


def sdr_check(t: SdrData) -> Dict[int, bool]:
    """Each numbered condition evaluated exactly; 6-8 only when forms are present."""
    dV, dB = t.big.differential, t.small.differential
    idV, idB = LinearMap.identity(t.big.space), LinearMap.identity(t.small.space)
    out = {
        1: _eq(dV @ t.i, t.i @ dB) and _eq(dB @ t.p, t.p @ dV),
        2: _eq(t.p @ t.i, idB),
        3: _eq(dV @ t.s + t.s @ dV, idV - t.i @ t.p),
        4: (t.s @ t.i).is_zero() and (t.p @ t.s).is_zero(),
        5: (t.s @ t.s).is_zero(),
    }
    if t.has_forms:
        out.update(_form_checks(t))
    return out


def is_sdr(t: SdrData) -> bool:
    return all(sdr_check(t).values())


def sdr_repair(t: SdrData) -> SdrData:
    """Impose the side conditions: s -> (ds+sd)s(ds+sd), then s -> s d s."""
    report = sdr_check(t)
    needed = [1, 2, 3] + ([6, 7, 8] if t.has_forms else [])
    failed = [k for k in needed if not report[k]]
    if failed:
        raise AlgebraError(f"cannot repair: conditions {failed} fail")
    d = t.big.differential
    s = t.s
    if not report[4]:
        h = d @ s + s @ d
        s = h @ s @ h
    if not (s @ s).is_zero():
        s = s @ d @ s
    return SdrData(t.big, t.small, t.i, t.p, s)


def form_adjoint(form: BilinearForm, f: LinearMap) -> LinearMap:
    """f* with ``<f* x, y> = (-1)^{|x||f|} <x, f y>``; needs a nondegenerate form."""
    V = form.space
    if f.source != V or f.target != V:
        raise AlgebraError("adjoint is taken of an endomorphism")
    n = V.dim
    gram = {(a, b): form(a, b) for a in range(n) for b in range(n) if form(a, b)}
    inv = linalg.inverse(gram, n)
    if inv is None:
        raise AlgebraError("form is degenerate")
    entries = {}
    for x in range(n):
        sign = -1 if V.parity(x) * f.parity else 1
        row = {y: sign * form.pair({x: Fraction(1)}, f.column(y)) for y in range(n)}
        # a_t solves Σ_t a_t G[t, y] = row[y]
        for t in range(n):
            val = sum((row[y] * inv.get((y, t), 0) for y in range(n)), Fraction(0))
            if val:
                entries[(t, x)] = val
    return LinearMap(V, V, entries, f.parity)
