import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from artifact.core import GradedSpace

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graded_spaces(draw, max_even=2, max_odd=2, min_dim=1):
    even = draw(st.integers(0, max_even))
    odd = draw(st.integers(0 if even >= min_dim else min_dim - even, max_odd))
    gens = [(f"e{i}", 0) for i in range(even)] + [(f"o{i}", 1) for i in range(odd)]
    return GradedSpace.of(*gens)


seeds = st.integers(0, 2**32 - 1)
small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@pytest.fixture
def rng():
    return random.Random(12345)


def nonstrict(cutoff=6):
    """V = u ⊕ w with δ(w') = u' and m = u'w' ∂_{w'}: ∇m = ±u' is exact but nonzero."""
    from artifact.core import LinearMap
    from artifact.derivations import Derivation
    from artifact.linfty import LInftyStructure, generator_space

    V = GradedSpace.of(("u", 0), ("w", 1))
    m = Derivation.from_terms(generator_space(V), cutoff, 1, {1: {(0, 1): 1}})
    return LInftyStructure(V, m, LinearMap(V, V, {(1, 0): 1}, 1))
