import random
from fractions import Fraction

import pytest
from hypothesis import given

from artifact.core import AlgebraError, GradedSpace
from artifact.symalg import (TruncatedPolynomial, monomial_basis, multiply, normalize, random_polynomial,
                             substitute, weight_component)

from conftest import graded_spaces, seeds

X = GradedSpace.of(("x", 0), ("y", 0), ("s", 1), ("t", 1))


def koszul_oracle(parities, word):
    """Bubble sort, one sign per swap of two odd letters."""
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if parities[w[j]] and parities[w[j + 1]]:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    for a, b in zip(w, w[1:]):
        if a == b and parities[a]:
            return None
    return sign, tuple(w)


def test_normalize_examples():
    assert normalize(X, (2, 2)) is None
    assert normalize(X, (1, 0)) == (1, (0, 1))
    assert normalize(X, (3, 2)) == (-1, (2, 3))
    with pytest.raises(AlgebraError):
        normalize(X, (7,))


@given(graded_spaces(max_even=3, max_odd=3), seeds)
def test_normalize_matches_bubble_sort(V, seed):
    rng = random.Random(seed)
    word = tuple(rng.randrange(V.dim) for _ in range(rng.randint(0, 5)))
    assert normalize(V, word) == koszul_oracle(V.parities, word)
    res = normalize(V, word)
    if res is not None:
        assert normalize(V, res[1]) == (1, res[1])


def poly(terms, cutoff=6):
    return TruncatedPolynomial(X, cutoff, terms)


def test_multiply_examples():
    p = poly({(0,): 2, (2, 3): Fraction(1, 2), (): 1})
    assert multiply(TruncatedPolynomial.constant(X, 6), p) == p
    assert multiply(poly({(0,): 1}), poly({(0,): 1})) == poly({(0, 0): 1})
    s, t = poly({(2,): 1}), poly({(3,): 1})
    assert multiply(s, t) == poly({(2, 3): 1})
    assert multiply(t, s) == poly({(2, 3): -1})
    assert multiply(s, s).is_zero()


def test_multiply_truncates_to_smaller_cutoff():
    p = TruncatedPolynomial(X, 2, {(0,): 1})
    q = TruncatedPolynomial(X, 5, {(0, 1): 1, (1,): 1})
    r = multiply(p, q)
    assert r.cutoff == 2
    assert r == TruncatedPolynomial(X, 2, {(0, 1): 1})
    with pytest.raises(AlgebraError):
        multiply(p, TruncatedPolynomial(GradedSpace.of(("z", 0)), 3, {}))


def _oracle_product(V, p, q, cutoff):
    out = {}
    for a, x in p.terms.items():
        for b, y in q.terms.items():
            res = koszul_oracle(V.parities, a + b)
            if res is not None and len(a) + len(b) <= cutoff:
                out[res[1]] = out.get(res[1], 0) + res[0] * x * y
    return TruncatedPolynomial(V, cutoff, out)


@given(graded_spaces(max_even=3, max_odd=3), seeds)
def test_products_against_oracle(V, seed):
    rng = random.Random(seed)
    p, q, r = (random_polynomial(rng, V, 6, weights=range(0, 4), max_terms=5) for _ in range(3))
    assert multiply(p, q) == _oracle_product(V, p, q, 6)
    assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))


@given(graded_spaces(max_even=3, max_odd=3), seeds)
def test_graded_commutativity_and_min_weight(V, seed):
    rng = random.Random(seed)
    pp, pq = rng.randint(0, 1), rng.randint(0, 1)
    p = random_polynomial(rng, V, 6, weights=(1, 2), parity=pp, max_terms=4)
    q = random_polynomial(rng, V, 6, weights=(2, 3), parity=pq, max_terms=4)
    sign = -1 if pp * pq else 1
    assert multiply(p, q) == multiply(q, p).scale(sign)
    assert multiply(p, q).min_weight >= p.min_weight + q.min_weight


def test_weight_component_examples():
    V = GradedSpace.of(("x", 0))
    p = TruncatedPolynomial(V, 4, {(): 1, (0,): 1, (0, 0): 1})
    assert weight_component(p, 1) == TruncatedPolynomial(V, 4, {(0,): 1})
    total = TruncatedPolynomial.zero(V, 4)
    for w in range(5):
        total = total + weight_component(p, w)
    assert total == p
    st = TruncatedPolynomial(X, 4, {(2, 3): 1})
    assert weight_component(st, 1).is_zero()
    with pytest.raises(AlgebraError):
        weight_component(p, 5)


def test_monomial_basis_counts():
    # weight-w monomials in 2 even and 2 odd letters: Σ_k C(2,k) * (w-k+1)
    from math import comb

    for w in range(5):
        expected = sum(comb(2, k) * (w - k + 1) for k in range(0, min(2, w) + 1))
        assert len(monomial_basis(X, w)) == expected
    assert monomial_basis(X, 2)[:3] == [(0, 0), (0, 1), (0, 2)]


def test_min_weight_is_enforced():
    with pytest.raises(AlgebraError):
        TruncatedPolynomial(X, 4, {(0,): 1}, min_weight=2)


def test_substitute_is_an_algebra_map():
    rng = random.Random(4)
    images = [random_polynomial(rng, X, 5, weights=(1, 2), parity=X.parity(i), max_terms=3) for i in range(4)]
    p = random_polynomial(rng, X, 5, weights=(1, 2), max_terms=4)
    q = random_polynomial(rng, X, 5, weights=(1, 2), max_terms=4)
    assert substitute(multiply(p, q), images) == multiply(substitute(p, images), substitute(q, images))
