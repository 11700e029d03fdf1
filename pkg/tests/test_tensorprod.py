import random

import pytest
from hypothesis import given, strategies as st

from artifact.acceptance import abelian, affine_line, heisenberg
from artifact.core import AlgebraError, BilinearForm, GradedSpace
from artifact.derivations import bracket, divergence, evaluate, random_derivation
from artifact.linfty import (CyclicData, check_cyclic, check_mc, double_structure, generator_space,
                             structure_to_brackets)
from artifact.symalg import random_polynomial
from artifact.tensorprod import (FROBENIUS_NAMES, Cdga, cdga_unimodular, frobenius, idempotent_criterion, psi,
                                 psi_prime, tensor_linfty, tensor_pairing)
from artifact.unimodular import obstruction_class

from conftest import seeds


def test_catalog_dimensions_and_euler_characteristics():
    expected = {"k": ((1, 0), 1), "H_S1": ((1, 1), 0), "H_S2": ((2, 0), 2), "H_S3": ((1, 1), 0),
                "H_T2": ((2, 2), 0)}
    for name in FROBENIUS_NAMES:
        A = frobenius(name)
        assert (A.space.signature, A.euler_characteristic) == expected[name]
        assert A.pairing.nondegenerate
    with pytest.raises(AlgebraError):
        frobenius("H_S7")


def test_cdga_unimodular_examples():
    assert cdga_unimodular(frobenius("H_S1"))
    assert cdga_unimodular(frobenius("H_S3"))
    assert cdga_unimodular(frobenius("H_T2"))
    assert not cdga_unimodular(frobenius("H_S2"))
    assert not cdga_unimodular(frobenius("k"))


def split_algebra():
    """k × Λ(θ): idempotents e1 = (1,0), e2 = (0,1)."""
    sp = GradedSpace.of(("e1", 0), ("e2", 0), ("θ", 1))
    return Cdga(sp, {(0, 0): {0: 1}, (1, 1): {1: 1}, (1, 2): {2: 1}})


def test_idempotent_criterion_agrees():
    for name in FROBENIUS_NAMES:
        A = frobenius(name)
        assert idempotent_criterion(A, [{0: 1}]) == cdga_unimodular(A)
    B = split_algebra()
    B = Cdga(B.space, B.product, unit=None)
    # e1 A = k has superdimension 1
    assert not cdga_unimodular(B)
    unital = Cdga(GradedSpace.of(("1", 0), ("e", 0), ("θ", 1)),
                  {(0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (1, 1): {1: 1}, (1, 2): {2: 1}}, unit=0)
    idem = [{1: 1}, {0: 1, 1: -1}]
    assert idempotent_criterion(unital, idem) == cdga_unimodular(unital) is False
    with pytest.raises(AlgebraError):
        idempotent_criterion(unital, [{1: 1}])


def test_cdga_rejects_bad_products():
    sp = GradedSpace.of(("a", 1), ("b", 0))
    with pytest.raises(AlgebraError):
        Cdga(sp, {(0, 1): {1: 1}})
    sp2 = GradedSpace.of(("x", 0), ("y", 0))
    with pytest.raises(AlgebraError):
        Cdga(sp2, {(0, 1): {0: 1}, (1, 0): {1: 1}})


def test_unit_algebra_reproduces_the_structure():
    for make in (affine_line, heisenberg):
        s = make()
        t = tensor_linfty(frobenius("k"), s)
        assert structure_to_brackets(t) == structure_to_brackets(s)


def test_exterior_algebra_gives_square_zero_extension():
    s = affine_line()
    t = tensor_linfty(frobenius("H_S1"), s)
    # basis order: 1⊗x, 1⊗y, θ⊗x, θ⊗y
    br = structure_to_brackets(t)
    assert br[(0, 1)] == {1: 1}
    assert set(br) == {(0, 1), (0, 3), (1, 2)}
    assert {abs(c) for row in br.values() for c in row.values()} == {1}
    assert set(br[(0, 3)]) == {3} and set(br[(1, 2)]) == {3}
    assert check_mc(t.m, t.complex).accepted


def test_tensor_with_sphere_is_mc():
    t = tensor_linfty(frobenius("H_S2"), affine_line(), check=False)
    assert check_mc(t.m, t.complex).accepted


def test_tensor_pairing_examples():
    d = double_structure(affine_line(4), "odd")
    S2 = frobenius("H_S2")
    c = tensor_pairing(S2, d.cyclic)
    assert c.parity == 1 and c.nondegenerate
    assert tensor_pairing(frobenius("H_S1"), d.cyclic).parity == 0
    t = tensor_linfty(S2, d.structure)
    assert check_cyclic(t, c).cyclic
    degenerate = Cdga(S2.space, S2.product, unit=0, pairing=BilinearForm(S2.space, {}, 0))
    assert not tensor_pairing(degenerate, d.cyclic).nondegenerate
    with pytest.raises(AlgebraError):
        tensor_pairing(Cdga(S2.space, S2.product, unit=0), d.cyclic)


def test_psi_prime_vanishes_for_unimodular_algebras():
    rng = random.Random(7)
    gens = heisenberg().generators
    for name in ("H_S1", "H_S3", "H_T2"):
        for _ in range(5):
            f = random_polynomial(rng, gens, 4, weights=(1, 2, 3, 4), max_terms=6)
            assert psi_prime(frobenius(name), f).is_zero()
    f = random_polynomial(rng, gens, 4, weights=(1, 2), max_terms=4)
    assert psi_prime(frobenius("k"), f).terms == f.terms


V_SPACES = [GradedSpace.of(("x", 0), ("y", 0)), GradedSpace.of(("a", 0), ("b", 1))]


@given(seeds, st.sampled_from(FROBENIUS_NAMES), st.sampled_from(V_SPACES))
def test_psi_respects_brackets(seed, name, V):
    rng = random.Random(seed)
    A = frobenius(name)
    W = generator_space(V)
    xi = random_derivation(rng, W, 4, rng.randint(0, 1), weights=(1, 2), max_terms=2)
    eta = random_derivation(rng, W, 4, rng.randint(0, 1), weights=(1, 2), max_terms=2)
    assert bracket(psi(A, xi), psi(A, eta)).agrees_with(psi(A, bracket(xi, eta)))


@given(seeds, st.sampled_from(FROBENIUS_NAMES), st.sampled_from(V_SPACES))
def test_psi_pair_intertwines_action_and_divergence(seed, name, V):
    rng = random.Random(seed)
    A = frobenius(name)
    W = generator_space(V)
    xi = random_derivation(rng, W, 4, rng.randint(0, 1), weights=(2, 3), max_terms=2)
    f = random_polynomial(rng, W, 4, weights=(1, 2), parity=rng.randint(0, 1), max_terms=3)
    assert evaluate(psi(A, xi), psi_prime(A, f)).agrees_with(psi_prime(A, evaluate(xi, f)))
    assert divergence(psi(A, xi)).agrees_with(psi_prime(A, divergence(xi)))


GRID_A = ("k", "H_S1", "H_S2")
GRID_V = {"abelian": abelian, "heisenberg": heisenberg, "affine": affine_line}


@pytest.mark.parametrize("a_name", GRID_A)
@pytest.mark.parametrize("v_name", list(GRID_V))
def test_tensor_unimodularity_grid(a_name, v_name):
    A = frobenius(a_name)
    s = GRID_V[v_name](5)
    t = tensor_linfty(A, s)
    strict = t.divergence().is_zero()
    assert strict == (cdga_unimodular(A) or s.divergence().is_zero())
    lift = obstruction_class(t).vanishes
    assert lift == (cdga_unimodular(A) or obstruction_class(s).vanishes)


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("LINFTY_MAX_DIM", "3")
    with pytest.raises(AlgebraError):
        tensor_linfty(frobenius("H_S2"), affine_line())
    monkeypatch.setenv("LINFTY_MAX_DIM", "many")
    with pytest.raises(AlgebraError):
        tensor_linfty(frobenius("H_S2"), affine_line())
