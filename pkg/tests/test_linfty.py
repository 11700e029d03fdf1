import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given

from artifact.core import AlgebraError, BilinearForm, GradedSpace, LinearMap
from artifact.derivations import Derivation, from_multilinear, to_multilinear
from artifact.linfty import (CyclicData, LInftyStructure, NotClosedError, ce_assemble, ce_cohomology, ce_solve,
                             check_cyclic, check_mc, double_structure, generator_space, lie_algebra,
                             preserves_form, structure_from_brackets, structure_to_brackets)
from artifact.symalg import TruncatedPolynomial, random_polynomial

from conftest import graded_spaces, seeds

AFFINE = {("x", "y"): {"y": 1}}
SL2 = {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}


def jacobi_defect(dim, table):
    """Brute-force Jacobiator of an even bracket given by table[(a, b)] = {c: coeff}."""
    def br(u, v):
        out = {}
        for a, x in u.items():
            for b, y in v.items():
                if (a, b) in table:
                    row, s = table[(a, b)], 1
                elif (b, a) in table:
                    row, s = table[(b, a)], -1
                else:
                    continue
                for c, z in row.items():
                    out[c] = out.get(c, 0) + s * x * y * z
        return {k: v for k, v in out.items() if v}

    worst = {}
    for a, b, c in itertools.combinations(range(dim), 3):
        u, v, w = {a: 1}, {b: 1}, {c: 1}
        total = {}
        for p, q, r in ((u, v, w), (v, w, u), (w, u, v)):
            for k, val in br(p, br(q, r)).items():
                total[k] = total.get(k, 0) + val
        total = {k: v for k, v in total.items() if v}
        if total:
            worst[(a, b, c)] = total
    return worst


def test_check_mc_examples():
    ab = lie_algebra(["x", "y"], {})
    assert check_mc(ab.m, ab.complex).accepted
    aff = lie_algebra(["x", "y"], AFFINE)
    assert jacobi_defect(2, {(0, 1): {1: 1}}) == {}
    assert check_mc(aff.m, aff.complex).accepted


def test_check_mc_rejects_broken_jacobi():
    # every antisymmetric bracket in dimension 2 is Lie, so break it in dimension 3
    table = {(0, 1): {1: 1}, (0, 2): {2: 1}, (1, 2): {0: 1}}
    assert jacobi_defect(3, table) != {}
    V = GradedSpace.of(("x", 0), ("y", 0), ("z", 0))
    s = structure_from_brackets(V, table, check=False)
    report = check_mc(s.m, s.complex)
    assert not report.accepted
    assert report.failing_weights == [3]
    with pytest.raises(AlgebraError):
        structure_from_brackets(V, table)


def test_check_mc_preconditions():
    ab = lie_algebra(["x", "y"], {})
    gens = ab.generators
    even = Derivation.from_terms(gens, 6, 0, {0: {(0,): 1}})
    with pytest.raises(AlgebraError):
        check_mc(even, ab.complex)
    linear = Derivation.from_terms(gens, 6, 1, {0: {(0, 1): 1}}, 1)
    with pytest.raises(AlgebraError):
        check_mc(Derivation.from_terms(gens, 6, 1, {0: {(): 1}}), ab.complex)
    assert linear.min_weight == 1


def test_brackets_round_trip():
    V = GradedSpace.of(("a", 0), ("b", 1), ("c", 1))
    table = {(0, 1): {1: 1}, (0, 2): {2: 1}}
    s = structure_from_brackets(V, table)
    assert structure_to_brackets(s) == {k: {i: Fraction(c) for i, c in v.items()} for k, v in table.items()}


def central_structure(rng, V, cutoff=6):
    """m valued in a central block and depending only on the rest; always MC."""
    gens = generator_space(V)
    central = {k for k in range(V.dim) if rng.random() < 0.5} or {0}
    rest = [k for k in range(V.dim) if k not in central]
    vals = []
    for k in range(V.dim):
        if k in central and rest:
            p = random_polynomial(rng, gens, cutoff, weights=(2, 3), parity=(gens.parity(k) + 1) % 2, max_terms=3)
            p = TruncatedPolynomial(gens, cutoff, {m: c for m, c in p.terms.items() if set(m) <= set(rest)})
        else:
            p = TruncatedPolynomial.zero(gens, cutoff)
        vals.append(p)
    return LInftyStructure(V, Derivation(gens, vals, 1, 2), cutoff=cutoff)


@given(graded_spaces(), seeds)
def test_multilinear_round_trip_preserves_mc(V, seed):
    s = central_structure(random.Random(seed), V)
    m = Derivation.zero(s.generators, 6, 1, 2)
    for n in s.m.weights():
        m = m + from_multilinear(to_multilinear(s.m.weight_component(n), n), 6)
    assert check_mc(m, s.complex).accepted
    assert m.agrees_with(s.m)


@given(graded_spaces(), seeds)
def test_ce_complex_squares_to_zero(V, seed):
    s = central_structure(random.Random(seed), V)
    assert ce_assemble(s).squares_to_zero()


def test_ce_examples():
    ab = lie_algebra(["x", "y"], {})
    assert ce_assemble(ab).is_zero()
    aff = lie_algebra(["x", "y"], AFFINE)
    ce = ce_assemble(aff)
    gens = aff.generators
    xp, yp = (TruncatedPolynomial.generator(gens, i, 6) for i in range(2))
    assert ce.apply(xp).is_zero()
    assert (0, 1) in ce.apply(yp).terms
    assert ce.squares_to_zero()


def test_ce_solve_examples():
    aff = lie_algebra(["x", "y"], AFFINE)
    ce = ce_assemble(aff)
    gens = aff.generators
    zero = ce_solve(ce, TruncatedPolynomial.zero(gens, 6))
    assert zero.solvable and zero.solution.is_zero()
    xp = TruncatedPolynomial.generator(gens, 0, 6)
    res = ce_solve(ce, xp)
    assert not res.solvable and not res.class_representative.is_zero()
    yp = TruncatedPolynomial.generator(gens, 1, 6)
    with pytest.raises(NotClosedError):
        ce_solve(ce, yp)
    ab = lie_algebra(["x", "y"], {})
    assert not ce_solve(ce_assemble(ab), TruncatedPolynomial.generator(ab.generators, 1, 6)).solvable


def test_ce_solve_finds_preimages():
    aff = lie_algebra(["x", "y"], AFFINE)
    ce = ce_assemble(aff)
    yp = TruncatedPolynomial.generator(aff.generators, 1, 6)
    target = ce.apply(yp)
    res = ce_solve(ce, target)
    assert res.solvable and ce.apply(res.solution) == target.truncate(6)


def test_affine_line_cohomology():
    rep = ce_cohomology(ce_assemble(lie_algebra(["x", "y"], AFFINE)))
    # H of the 2-dim non-abelian Lie algebra: 1, 1, 0
    assert rep.by_weight[0] == (1, 0)
    assert rep.by_weight[1] == (0, 1)
    assert rep.by_weight[2] == (0, 0)


def even_form(V, entries):
    return CyclicData(BilinearForm(V, entries, 0))


def test_cyclic_examples():
    aff = lie_algebra(["x", "y"], AFFINE)
    bad = check_cyclic(aff, even_form(aff.space, {(0, 0): 1, (1, 1): 1}))
    assert not bad.cyclic and bad.violation is not None
    ab = lie_algebra(["x", "y"], {})
    assert check_cyclic(ab, even_form(ab.space, {(0, 1): 1})).cyclic
    sl2 = lie_algebra(["h", "e", "f"], SL2)
    killing = even_form(sl2.space, {(0, 0): 8, (1, 2): 4})
    assert check_cyclic(sl2, killing).cyclic
    for s in (aff, sl2):
        d = double_structure(s, "odd")
        assert check_cyclic(d.structure, d.cyclic).cyclic


def test_cyclicity_routes_agree_on_fixtures():
    aff = lie_algebra(["x", "y"], AFFINE)
    sl2 = lie_algebra(["h", "e", "f"], SL2)
    heis = lie_algebra(["x", "y", "z"], {("x", "y"): {"z": 1}})
    cases = [
        (aff, even_form(aff.space, {(0, 0): 1, (1, 1): 1})),
        (aff, even_form(aff.space, {(0, 1): 1})),
        (sl2, even_form(sl2.space, {(0, 0): 8, (1, 2): 4})),
        (sl2, even_form(sl2.space, {(0, 0): 1, (1, 1): 1, (2, 2): 1})),
        (heis, even_form(heis.space, {(0, 0): 1, (1, 1): 1, (2, 2): 1})),
    ]
    for kind in ("odd", "even"):
        for s in (aff, sl2, heis):
            d = double_structure(s, kind)
            cases.append((d.structure, d.cyclic))
    verdicts = [(check_cyclic(s, c).cyclic, preserves_form(s, c)) for s, c in cases]
    assert all(a == b for a, b in verdicts)
    assert {a for a, _ in verdicts} == {True, False}


@given(seeds)
def test_cyclicity_routes_agree_on_random_forms(seed):
    rng = random.Random(seed)
    sl2 = lie_algebra(["h", "e", "f"], SL2)
    while True:
        entries = {(i, j): rng.randint(-2, 2) for i in range(3) for j in range(i, 3)}
        c = even_form(sl2.space, entries)
        if c.nondegenerate:
            break
    assert check_cyclic(sl2, c).cyclic == preserves_form(sl2, c)
