"""Property-based checks of the structural invariants."""

from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from bracketlab.jets import Jet1, poisson_jet, Jet2
from bracketlab.liepoly import LiePoly, bracket
from bracketlab.lyndon import is_lyndon, lyndon_words

WORDS = lyndon_words(4)


@st.composite
def lie_polys(draw, max_degree=8):
    terms = {}
    for w in WORDS:
        if draw(st.booleans()):
            num = draw(st.integers(min_value=-6, max_value=6))
            den = draw(st.integers(min_value=1, max_value=4))
            terms[w] = Fraction(num, den)
    return LiePoly(terms, max_degree)


@given(lie_polys(), lie_polys())
@settings(max_examples=60, deadline=None)
def test_bracket_antisymmetric(a, b):
    assert bracket(a, b) == -bracket(b, a)


@given(lie_polys(), lie_polys(), lie_polys())
@settings(max_examples=40, deadline=None)
def test_jacobi_identity(a, b, c):
    md = 12
    a, b, c = a.truncated(md), b.truncated(md), c.truncated(md)
    total = (
        bracket(bracket(a, b, md), c, md)
        + bracket(bracket(b, c, md), a, md)
        + bracket(bracket(c, a, md), b, md)
    )
    assert total.is_zero()


@given(st.text(alphabet="FG", min_size=1, max_size=10))
@settings(max_examples=200, deadline=None)
def test_lyndon_membership_matches_rotation_test(word):
    rotation_ok = all(word < word[i:] + word[:i] for i in range(1, len(word)))
    assert is_lyndon(word) == rotation_ok
    if rotation_ok and len(word) <= 9:
        assert word in lyndon_words(len(word))


@given(
    st.lists(st.floats(-2, 2), min_size=5, max_size=5),
    st.lists(st.floats(-2, 2), min_size=5, max_size=5),
)
@settings(max_examples=50, deadline=None)
def test_jet1_product_rule(da, db):
    x = np.array([0.7])
    a = Jet1.from_derivatives([np.full(1, v) for v in da], 4)
    b = Jet1.from_derivatives([np.full(1, v) for v in db], 4)
    prod = a * b
    # Leibniz at first order, general Leibniz at second
    assert np.allclose(prod.derivative(1), da[1] * db[0] + da[0] * db[1], atol=1e-12)
    assert np.allclose(
        prod.derivative(2), da[2] * db[0] + 2 * da[1] * db[1] + da[0] * db[2], atol=1e-12
    )


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
@settings(max_examples=50, deadline=None)
def test_poisson_jet_bilinear_antisymmetric(s1, s2, x, y):
    jp = Jet2.variable_p(np.array([x]), 2)
    jq = Jet2.variable_q(np.array([y]), 2)
    from bracketlab.jets import jet_sin

    F = jet_sin(jp).scale(s1)
    G = jet_sin(jq).scale(s2) + jet_sin(jp + jq)
    ab = poisson_jet(F, G)
    ba = poisson_jet(G, F)
    assert np.allclose(ab.value, -ba.value, atol=1e-14)
