import random

import pytest
from hypothesis import given

from artifact.acceptance import abelian, affine_line, heisenberg, sl2, super_action
from artifact.core import AlgebraError
from artifact.derivations import Derivation, evaluate
from artifact.doubles import bracket_field, laplacian_via_divergence
from artifact.linfty import bracket_from_form, ce_assemble, check_mc, double_structure, transport
from artifact.quantum import (QuantumStructure, check_qme, hamiltonian_of_structure, quantum_lift,
                              quantum_lift_structure)
from artifact.symalg import TruncatedPolynomial, random_polynomial
from artifact.unimodular import check_unimodular, obstruction_class

from conftest import nonstrict, seeds


def odd_double(make, cutoff=6):
    return double_structure(make(cutoff), "odd")


def qs(d, comps, weight=6):
    return QuantumStructure(d.space, bracket_from_form(d.cyclic), d.structure.differential, tuple(comps), weight)


def test_zero_structure_is_quantum():
    d = odd_double(abelian)
    gens = d.structure.generators
    q = qs(d, [TruncatedPolynomial.zero(gens, 6, 3)])
    assert check_qme(q).accepted
    res = quantum_lift_structure(d.structure, d.cyclic, 2, 6)
    assert res.lifted and all(S.is_zero() for S in res.components)


def test_constant_lift_when_laplacian_vanishes():
    d = odd_double(heisenberg)
    S0 = hamiltonian_of_structure(d.structure.m, d.cyclic)
    assert laplacian_via_divergence(bracket_from_form(d.cyclic), S0).is_zero()
    assert check_qme(qs(d, [S0])).accepted
    zero1 = TruncatedPolynomial.zero(S0.space, 4, 1)
    assert check_qme(qs(d, [S0, zero1])).accepted


def test_unimodular_pair_gives_genus_one_lift():
    s = nonstrict()
    f = obstruction_class(s).lift
    d = double_structure(s, "odd")
    gens = d.structure.generators
    S0 = hamiltonian_of_structure(d.structure.m, d.cyclic)
    S1 = TruncatedPolynomial(gens, 4, {m: 2 * c for m, c in f.truncate(4).terms.items()}, 1)
    assert check_qme(qs(d, [S0, S1])).accepted
    wrong = TruncatedPolynomial(gens, 4, f.truncate(4).terms, 1)
    assert not check_qme(qs(d, [S0, wrong])).accepted


def test_lift_examples():
    heis = odd_double(heisenberg)
    good = quantum_lift_structure(heis.structure, heis.cyclic, 2, 6)
    assert good.lifted and good.structure.genus == 2
    assert check_qme(good.structure).accepted
    aff = odd_double(affine_line)
    bad = quantum_lift_structure(aff.structure, aff.cyclic, 2, 6)
    assert bad.obstruction.genus == 1 and not bad.obstruction.witness.is_zero()


def test_quantum_lift_iff_unimodular_on_fixtures():
    for make in (abelian, heisenberg, affine_line, sl2, super_action, nonstrict):
        s = make()
        d = double_structure(s, "odd")
        res = quantum_lift_structure(d.structure, d.cyclic, 1, 6)
        assert res.lifted == obstruction_class(s).vanishes, make.__name__


def test_order_one_extraction():
    for make in (heisenberg, nonstrict, abelian):
        d = double_structure(make(), "odd")
        res = quantum_lift_structure(d.structure, d.cyclic, 1, 6)
        q = res.structure
        s0 = q.genus_zero_structure()
        assert check_mc(s0.m, s0.complex).accepted
        assert check_unimodular(q.unimodular_pair()).accepted


def test_laplacian_of_classical_solution_is_closed():
    for make in (heisenberg, affine_line, sl2, super_action):
        d = odd_double(make)
        B = bracket_from_form(d.cyclic)
        S0 = hamiltonian_of_structure(d.structure.m, d.cyclic)
        ce = ce_assemble(d.structure, 4)
        lap = laplacian_via_divergence(B, S0).truncate(4)
        assert ce.apply(lap).truncate(ce.reliable_weight).is_zero()


@given(seeds)
def test_d_and_laplacian_anticommute(seed):
    rng = random.Random(seed)
    d = double_structure(nonstrict(), "odd")
    B = bracket_from_form(d.cyclic)
    delta = d.structure.delta
    p = random_polynomial(rng, d.structure.generators, 6, weights=(1, 2, 3, 4), max_terms=6)
    lhs = evaluate(delta, laplacian_via_divergence(B, p)) + laplacian_via_divergence(B, evaluate(delta, p))
    assert lhs.is_zero()


def test_weight_constraint_is_enforced():
    d = odd_double(heisenberg)
    gens = d.structure.generators
    quad = TruncatedPolynomial(gens, 6, {(0, 3): 1})
    with pytest.raises(AlgebraError):
        qs(d, [quad])
    const = TruncatedPolynomial(gens, 4, {(): 1})
    zero0 = TruncatedPolynomial.zero(gens, 6, 3)
    with pytest.raises(AlgebraError):
        qs(d, [zero0, const])


def test_lift_rejects_non_classical_start():
    from artifact.quantum import classical_residual

    d = odd_double(abelian)
    gens = d.structure.generators
    B = bracket_from_form(d.cyclic)
    # x'y'Πx*' and Πx*'²Πy*' each solve the master equation, their sum does not
    bad = TruncatedPolynomial(gens, 6, {(0, 1, 2): 1, (2, 2, 3): 1})
    assert not classical_residual(B, d.structure.delta, bad).is_zero()
    with pytest.raises(AlgebraError):
        quantum_lift(d.space, B, d.structure.differential, bad, 1, 6)


def test_hamiltonian_examples():
    d = odd_double(affine_line)
    gens = d.structure.generators
    assert hamiltonian_of_structure(Derivation.zero(gens, 6, 1, 2), d.cyclic).is_zero()
    S0 = hamiltonian_of_structure(d.structure.m, d.cyclic)
    # the Hamiltonian agrees with the odd double of m, minus the quadratic part coming from d
    H = transport(d.hamiltonian, gens)
    H_higher = TruncatedPolynomial(gens, H.cutoff, {m: c for m, c in H.terms.items() if len(m) >= 3})
    assert S0.agrees_with(H_higher)


@given(seeds)
def test_hamiltonian_round_trip(seed):
    rng = random.Random(seed)
    d = odd_double(heisenberg)
    B = bracket_from_form(d.cyclic)
    gens = d.structure.generators
    h = random_polynomial(rng, gens, 6, weights=(3,), parity=0, max_terms=4)
    X = bracket_field(h, B)
    if X.is_zero():
        return
    back = hamiltonian_of_structure(Derivation(gens, X.values, 1, 2), d.cyclic)
    assert back.agrees_with(h)


def test_non_hamiltonian_field_is_rejected():
    d = odd_double(affine_line)
    gens = d.structure.generators
    m = Derivation.from_terms(gens, 6, 1, {0: {(0, 1): 1}})
    with pytest.raises(AlgebraError):
        hamiltonian_of_structure(m, d.cyclic)
