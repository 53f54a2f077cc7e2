import random
from fractions import Fraction

import pytest

from polynomial import (
    AlphabetMismatchError,
    ExponentOverflowError,
    MissingAssignmentError,
    NotDivisibleError,
    Poly,
    UnknownVariableError,
    VarAlphabet,
    monomials_of_degree,
)
from symanzik import diagram_alphabet, w_polynomial


@pytest.fixture
def alphabet():
    return VarAlphabet.for_diagram(2, 1)


def var(alphabet, name):
    return Poly.var(alphabet, name)


def test_alphabet_names(alphabet):
    assert alphabet.names == ("a1", "a2", "s1", "z1", "z2")
    assert alphabet.index("s1") == 2
    assert alphabet.z(1) == 4
    with pytest.raises(UnknownVariableError):
        alphabet.index("q7")


def test_monomials_are_grlex_ordered():
    assert monomials_of_degree(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert monomials_of_degree(3, 0) == [(0, 0, 0)]
    assert monomials_of_degree(3, -1) == []


def test_arithmetic(alphabet):
    a1, a2 = var(alphabet, "a1"), var(alphabet, "a2")
    u = a1 + a2
    assert (u * u) == a1 * a1 + a2 * a2 + a1 * a2 * 2
    assert (u - u).is_zero()
    assert u.power(3) == u * u * u
    assert (u * Fraction(1, 2)).coefficient((1, 0, 0, 0, 0)) == Fraction(1, 2)
    assert 1 - a1 == -(a1 - 1)


def test_alphabet_mismatch(alphabet):
    other = VarAlphabet(2)
    with pytest.raises(AlphabetMismatchError):
        Poly.var(alphabet, 0) + Poly.var(other, 0)


def test_bubble_q_render_and_value(bubble):
    alphabet = diagram_alphabet(bubble)
    a1, a2 = var(alphabet, "a1"), var(alphabet, "a2")
    s1, z1, z2 = var(alphabet, "s1"), var(alphabet, "z1"), var(alphabet, "z2")
    q = s1 * a1 * a2 - (a1 + a2) * (a1 * z1 + a2 * z2)
    point = {"a1": Fraction(1, 2), "a2": Fraction(1, 2), "s1": -1, "z1": 1, "z2": 1}
    assert q.evaluate(point) == Fraction(-5, 4)
    assert (a1 + a2).evaluate({"a1": 1, "a2": 1}) == 2
    assert q.is_homogeneous("alpha") == 2
    assert q.is_homogeneous("sz") == 1
    assert q.render() == "-a1^2*z1 + a1*a2*s1 - a1*a2*z1 - a1*a2*z2 - a2^2*z2"


def test_render_fractions(alphabet):
    p = var(alphabet, "a1").scale(Fraction(-1, 2)) + 3
    assert p.render() == "-1/2*a1 + 3"
    assert Poly.zero(alphabet).render() == "0"


def test_derivative_and_division(alphabet):
    a1, a2 = var(alphabet, "a1"), var(alphabet, "a2")
    w = a1 * a2
    assert w.partial_derivative("a1") == a2
    assert w.divisible_by_var("a1")
    assert not (a1 + a2).divisible_by_var("a1")
    assert w.divide_by_var("a2") == a1
    with pytest.raises(NotDivisibleError):
        (a1 + a2).divide_by_var("a1")


def test_box_w_divisibility(box):
    w = w_polynomial(box, ["1", "2"])
    assert not w.divisible_by_var("a3")
    assert w.divisible_by_var("a2")


def test_substitute(alphabet):
    a1, a2, s1 = var(alphabet, "a1"), var(alphabet, "a2"), var(alphabet, "s1")
    p = a1 * a1 + s1 * a2
    assert p.substitute({"a1": a2, "a2": a1, "s1": 2}) == a2 * a2 + a1 * 2
    assert p.substitute({"a1": 0}, partial=True) == s1 * a2
    with pytest.raises(MissingAssignmentError):
        p.substitute({"a1": 1})
    with pytest.raises(MissingAssignmentError):
        p.evaluate({"a1": 1, "a2": 1})


def test_coefficients_in(alphabet):
    a1, s1, z1 = var(alphabet, "a1"), var(alphabet, "s1"), var(alphabet, "z1")
    p = a1 * s1 + a1 * z1 * 2 + s1
    split = p.coefficients_in("alpha")
    assert split[(1, 0)] == s1 + z1 * 2
    assert split[(0, 0)] == s1


def test_primitive(alphabet):
    p = var(alphabet, "a1").scale(Fraction(-2, 3)) + var(alphabet, "a2").scale(Fraction(4, 3))
    content, prim = p.primitive()
    assert content == Fraction(-2, 3)
    assert prim == var(alphabet, "a1") - var(alphabet, "a2") * 2


def test_exponent_overflow(alphabet):
    a1 = var(alphabet, "a1")
    with pytest.raises(ExponentOverflowError):
        a1.power(200) * a1.power(100)


def test_json_round_trip(alphabet):
    p = var(alphabet, "a1").scale(Fraction(7, 3)) * var(alphabet, "z2") - 1
    data = p.to_json()
    assert data[0] == {"coeff": "7/3", "exponents": [1, 0, 0, 0, 1]}
    assert Poly.from_json(alphabet, data) == p


@pytest.mark.parametrize(
    "data",
    [
        "a1",
        [{"coeff": "1/1"}],
        [{"coeff": "1/1", "exponents": [1, 0]}],
        [{"coeff": "1/1", "exponents": [1, 0, 0, 0, 0]}, {"coeff": "2/1", "exponents": [1, 0, 0, 0, 0]}],
    ],
)
def test_from_json_rejects(alphabet, data):
    with pytest.raises(ValueError):
        Poly.from_json(alphabet, data)


def random_poly(alphabet, rng, terms=4, degree=3):
    p = Poly.zero(alphabet)
    for _ in range(terms):
        exps = [rng.randint(0, degree) for _ in range(alphabet.size)]
        c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
        p = p + Poly.monomial(alphabet, exps, c)
    return p


@pytest.mark.parametrize("seed", range(5))
def test_ring_axioms(alphabet, seed):
    rng = random.Random(seed)
    p, q, r = (random_poly(alphabet, rng) for _ in range(3))
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == Poly.zero(alphabet)
    assert p * Poly.one(alphabet) == p


@pytest.mark.parametrize("seed", range(5))
def test_partial_derivative_rules(alphabet, seed):
    rng = random.Random(100 + seed)
    p, q = random_poly(alphabet, rng), random_poly(alphabet, rng)
    c = Fraction(rng.randint(1, 9), rng.randint(1, 9))
    for v in alphabet.names:
        dp, dq = p.partial_derivative(v), q.partial_derivative(v)
        assert (p + q.scale(c)).partial_derivative(v) == dp + dq.scale(c)
        assert (p * q).partial_derivative(v) == dp * q + p * dq


@pytest.mark.parametrize("seed", range(5))
def test_divide_by_var_inverts_multiplication(alphabet, seed):
    rng = random.Random(200 + seed)
    p = random_poly(alphabet, rng)
    for v in alphabet.names:
        shifted = p.multiply_by_var(v)
        assert shifted.divisible_by_var(v)
        assert shifted.divide_by_var(v).multiply_by_var(v) == shifted
        if p.divisible_by_var(v):
            assert p.divide_by_var(v) * var(alphabet, v) == p
