import random
from fractions import Fraction

import pytest
from hypothesis import given

from artifact.core import AlgebraError, GradedSpace
from artifact.derivations import (Derivation, bracket, divergence, evaluate, from_multilinear, partial,
                                  random_derivation, supertrace_of_slot, to_multilinear)
from artifact.linfty import lie_algebra
from artifact.symalg import TruncatedPolynomial, multiply, random_polynomial, substitute

from conftest import graded_spaces, seeds

T = GradedSpace.of(("t", 0))
TH = GradedSpace.of(("a", 1), ("b", 1))


def P(space, terms, cutoff=6):
    return TruncatedPolynomial(space, cutoff, terms)


def test_evaluate_examples():
    dx = Derivation.partial(T, 0, 6)
    assert evaluate(dx, P(T, {(0, 0): 1})) == P(T, {(0,): 2}, 5)
    euler = Derivation.linear(T, {(0, 0): 1}, 0, 6)
    assert evaluate(euler, P(T, {(0, 0, 0): 1})) == P(T, {(0, 0, 0): 3})
    ab = P(TH, {(0, 1): 1})
    assert evaluate(Derivation.partial(TH, 0, 6), ab).terms == {(1,): 1}
    assert evaluate(Derivation.partial(TH, 1, 6), ab).terms == {(0,): -1}
    with pytest.raises(AlgebraError):
        evaluate(dx, ab)


def _leibniz_oracle(xi, p):
    """ξ(p) = Σ_i ξ(x_i) · ∂_i p for ξ = Σ ξ(x_i) ∂_i."""
    out = TruncatedPolynomial.zero(p.space, p.cutoff)
    for i, v in enumerate(xi.values):
        out = out + multiply(v, partial(p, i))
    return out


@given(graded_spaces(), seeds)
def test_evaluate_matches_leibniz_oracle(V, seed):
    rng = random.Random(seed)
    xi = random_derivation(rng, V, 6, rng.randint(0, 1), weights=(0, 1, 2))
    p = random_polynomial(rng, V, 6, weights=(1, 2, 3), max_terms=4)
    assert evaluate(xi, p).agrees_with(_leibniz_oracle(xi, p))


def test_bracket_examples():
    dx = Derivation.partial(T, 0, 6)
    euler = Derivation.linear(T, {(0, 0): 1}, 0, 6)
    assert bracket(dx, euler).agrees_with(dx)
    rng = random.Random(1)
    xi = random_derivation(rng, TH, 6, 0, weights=(1, 2))
    assert bracket(xi, xi).is_zero()


def test_bracket_min_weight_adds():
    rng = random.Random(2)
    V = GradedSpace.of(("x", 0), ("s", 1))
    xi = random_derivation(rng, V, 6, 1, weights=(2,))
    eta = random_derivation(rng, V, 6, 0, weights=(3,))
    assert bracket(xi, eta).min_weight == 4


@given(graded_spaces(), seeds)
def test_graded_jacobi(V, seed):
    rng = random.Random(seed)
    a, b, c = (random_derivation(rng, V, 6, rng.randint(0, 1), weights=(1, 2)) for _ in range(3))

    def s(x, y):
        return -1 if x.parity * y.parity else 1

    lhs = bracket(a, bracket(b, c))
    rhs = bracket(bracket(a, b), c) + bracket(b, bracket(a, c)).scale(s(a, b))
    assert (lhs - rhs).is_zero()


def test_divergence_examples():
    x2dx = Derivation.from_terms(T, 6, 0, {0: {(0, 0): 1}})
    assert divergence(x2dx) == P(T, {(0,): 2}, 5)
    theta = GradedSpace.of(("θ", 1))
    assert divergence(Derivation.linear(theta, {(0, 0): 1}, 0, 6)).terms == {(): -1}
    # traceless odd linear differential on 1|1: d(a) = s
    V = GradedSpace.of(("x", 0), ("s", 1))
    d = Derivation.linear(V, {(1, 0): 1}, 1, 6)
    assert divergence(d).is_zero()


@given(graded_spaces(), seeds)
def test_divergence_commutator(V, seed):
    rng = random.Random(seed)
    xi = random_derivation(rng, V, 6, rng.randint(0, 1), weights=(1, 2, 3))
    eta = random_derivation(rng, V, 6, rng.randint(0, 1), weights=(1, 2, 3))
    sign = -1 if xi.parity * eta.parity else 1
    lhs = divergence(bracket(xi, eta))
    rhs = evaluate(xi, divergence(eta)) - evaluate(eta, divergence(xi)).scale(sign)
    assert lhs.agrees_with(rhs)


def _invertible_block(rng, V):
    """A random invertible parity-preserving change of generators and its inverse."""
    from artifact import linalg

    while True:
        A = {}
        for k in range(V.dim):
            for j in range(V.dim):
                if V.parity(k) == V.parity(j):
                    A[(k, j)] = Fraction(rng.randint(-2, 2)) + (1 if k == j else 0)
        inv = linalg.inverse(A, V.dim)
        if inv is not None:
            return A, inv


def _images(V, A, cutoff):
    return [TruncatedPolynomial(V, cutoff, {(j,): A.get((k, j), 0) for j in range(V.dim)}) for k in range(V.dim)]


@given(graded_spaces(), seeds)
def test_divergence_is_basis_independent(V, seed):
    rng = random.Random(seed)
    xi = random_derivation(rng, V, 6, rng.randint(0, 1), weights=(1, 2))
    A, Ainv = _invertible_block(rng, V)
    phi, phinv = _images(V, A, 6), _images(V, Ainv, 6)
    # the conjugate φ ξ φ⁻¹ on generators
    conj = Derivation(V, [substitute(evaluate(xi, q), phi) for q in phinv], xi.parity)
    assert divergence(conj).agrees_with(substitute(divergence(xi), phi))


def test_multilinear_factorials():
    for n, fac in [(2, 2), (3, 6)]:
        xi = Derivation.from_terms(T, 6, 0, {0: {(0,) * n: 1}})
        assert to_multilinear(xi, n)(*([0] * n)) == {0: fac}
    assert to_multilinear(Derivation.zero(T, 6), 2).is_zero()


def test_multilinear_rejects_inhomogeneous():
    xi = Derivation.from_terms(T, 6, 0, {0: {(0,): 1, (0, 0): 1}})
    with pytest.raises(AlgebraError):
        to_multilinear(xi, 2)


def test_affine_line_trace_of_slots():
    s = lie_algebra(["x", "y"], {("x", "y"): {"y": 1}})
    m2 = to_multilinear(s.m.weight_component(2), 2)
    assert from_multilinear(m2, s.m.cutoff).agrees_with(s.m.weight_component(2))
    assert abs(m2(0, 1).get(1, 0)) == 1
    # generators of Ŝ ΠV* are odd, so the supertrace flips sign relative to ad
    assert abs(supertrace_of_slot(m2, [0])) == 1
    assert supertrace_of_slot(m2, [1]) == 0
    ab = lie_algebra(["x", "y"], {})
    assert supertrace_of_slot(to_multilinear(ab.m.weight_component(2), 2), [0]) == 0


@given(graded_spaces(), seeds)
def test_multilinear_round_trip(V, seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    xi = random_derivation(rng, V, 6, rng.randint(0, 1), weights=(n,))
    F = to_multilinear(xi, n)
    assert from_multilinear(F, 6).agrees_with(xi)
    assert to_multilinear(from_multilinear(F, 6), n) == F


@given(graded_spaces(), seeds)
def test_slot_trace_is_symmetrized_divergence(V, seed):
    """Tr(x -> ξ̃(v, x)) equals the polarized divergence at v."""
    from artifact.derivations import polarize

    rng = random.Random(seed)
    xi = random_derivation(rng, V, 6, 0, weights=(2,))
    F = to_multilinear(xi, 2)
    div = divergence(xi)
    for v in range(V.dim):
        assert supertrace_of_slot(F, [v]) == polarize(div, (v,))
