import math
from dataclasses import replace
from functools import partial

import pytest

from errors import CertificationError, FormatError, PoleError, RegimeError
from pde import (
    DiffOperator,
    OperatorPair,
    derive_general,
    prefactor,
    theorem1_system,
    theorem2_system,
)
from polynomial import Poly
from symanzik import ParametricIntegral
from verify import (
    EuclideanPoint,
    NumericConfig,
    certificate_hash,
    certify,
    evaluate_derivative,
    evaluate_integral,
    finite_difference,
    numeric_residual,
    pole_free_check,
    verify_pairs,
)

BUBBLE_POINT = EuclideanPoint.of(["-1"], ["1", "1"])
TRIANGLE_POINT = EuclideanPoint.of(["-1", "-1", "-1"], ["1", "1", "1"])


def bubble_closed_form():
    """F at s = -1, z = (1, 1): minus the integral of 1/(1 + x - x^2) over [0, 1]."""
    return -4 / math.sqrt(5) * math.atanh(1 / math.sqrt(5))


def with_tail(pair, tail):
    return replace(pair, tail=tail)


def test_certify_rejects_plain_invariant_derivative(bubble_integral):
    integral = bubble_integral
    ds1 = DiffOperator.derivative(integral.alphabet, (1, 0, 0))
    pair = OperatorPair(
        principal=ds1,
        tail=DiffOperator.zero(integral.alphabet),
        c_p=prefactor(integral.k, 1),
        c_p_minus_1=prefactor(integral.k, 0),
        label="ds1",
    )
    with pytest.raises(CertificationError, match="outside the Jacobian ideal") as info:
        certify(integral, pair)
    assert info.value.label == "ds1"
    assert info.value.residual == integral.W[0]


def test_certify_reports_tampered_tail(bubble_integral):
    integral = bubble_integral
    pair = theorem1_system(integral)[0]
    dz1 = DiffOperator.derivative(integral.alphabet, (0, 1, 0))
    tampered = with_tail(pair, pair.tail + dz1)
    with pytest.raises(CertificationError, match="tail does not match") as info:
        certify(integral, tampered)
    a1 = Poly.var(integral.alphabet, "a1")
    assert info.value.residual == -(a1 * integral.U)
    assert "thm1 line 1" in str(info.value)


def test_certify_without_search_uses_witness(bubble_integral):
    integral = bubble_integral
    pair = theorem1_system(integral)[0]
    dz1 = DiffOperator.derivative(integral.alphabet, (0, 1, 0))
    with pytest.raises(CertificationError, match="does not re-expand"):
        certify(integral, with_tail(pair, pair.tail + dz1), search=False)
    bare = replace(pair, certificate=None)
    with pytest.raises(CertificationError, match="no certificate"):
        certify(integral, bare, search=False)
    assert certify(integral, bare).is_valid()


def test_certify_rejects_wrong_tail_order(bubble_integral):
    integral = bubble_integral
    pair = theorem1_system(integral)[0]
    wrong = with_tail(pair, pair.principal)
    with pytest.raises(CertificationError, match="tail has order 2"):
        certify(integral, wrong)


def test_certificate_hash_is_stable(bubble_integral):
    first, second = theorem1_system(bubble_integral)
    h = certificate_hash(certify(bubble_integral, first))
    assert len(h) == 64
    assert h == certificate_hash(certify(bubble_integral, first))
    assert h != certificate_hash(certify(bubble_integral, second))


def test_point_resolution(bubble_integral):
    point = BUBBLE_POINT.resolve(bubble_integral)
    assert point.coordinates() == (-1, 1, 1)
    assert point.to_json() == {"s": ["-1"], "z": ["1", "1"]}
    assert EuclideanPoint.of([0.5], [1, 1]).s[0] == 0.5
    with pytest.raises(FormatError, match="^s:"):
        EuclideanPoint.of([], [1, 1]).resolve(bubble_integral)
    with pytest.raises(FormatError, match="^z:"):
        EuclideanPoint.of([-1], [1]).resolve(bubble_integral)


@pytest.mark.parametrize(
    "s, z, expected",
    [
        (["-1"], ["1", "1"], True),
        (["4"], ["1", "1"], False),
        (["0"], ["0", "0"], False),
        (["1/2"], ["1", "1"], True),
    ],
)
def test_pole_free_check(bubble_integral, s, z, expected):
    assert pole_free_check(bubble_integral, EuclideanPoint.of(s, z)) is expected


def test_numeric_config_validation():
    with pytest.raises(ValueError):
        NumericConfig(BUBBLE_POINT, nodes=1)
    with pytest.raises(ValueError):
        NumericConfig(BUBBLE_POINT, fd_step=0.0)
    with pytest.raises(ValueError):
        NumericConfig(BUBBLE_POINT, richardson_levels=0)


def test_bubble_matches_closed_form(bubble_integral):
    value, error = evaluate_integral(bubble_integral, NumericConfig(BUBBLE_POINT))
    assert value == pytest.approx(bubble_closed_form(), abs=1e-8)
    assert error < 1e-8


def test_triangle_converges(triangle_integral):
    cfg = NumericConfig(TRIANGLE_POINT)
    value, error = evaluate_integral(triangle_integral, cfg)
    assert error < 1e-8
    assert evaluate_derivative(triangle_integral, (0,) * 6, cfg) == pytest.approx(value)


def test_pole_raises(bubble_integral):
    cfg = NumericConfig(EuclideanPoint.of(["4"], ["1", "1"]))
    with pytest.raises(PoleError):
        evaluate_integral(bubble_integral, cfg)


def test_tree_is_outside_regime(single_edge):
    integral = ParametricIntegral(single_edge)
    with pytest.raises(RegimeError):
        evaluate_integral(integral, NumericConfig(EuclideanPoint.of(["-1"], ["1"])))


@pytest.mark.parametrize("index", [(1, 0, 0), (0, 1, 0), (0, 1, 1), (2, 0, 0)])
def test_finite_difference_matches_direct(bubble_integral, index):
    cfg = NumericConfig(BUBBLE_POINT)
    fd = finite_difference(bubble_integral, index, cfg)
    direct = evaluate_derivative(bubble_integral, index, cfg)
    assert fd == pytest.approx(direct, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("method", ["fd", "direct"])
def test_theorem1_numeric_residual(bubble_integral, method):
    cfg = NumericConfig(BUBBLE_POINT)
    for pair in theorem1_system(bubble_integral):
        assert numeric_residual(bubble_integral, pair, cfg, method) <= 1e-4


@pytest.mark.parametrize(
    "system",
    [theorem2_system, partial(derive_general, order=2, coeff_degree=1)],
    ids=["thm2", "derive"],
)
def test_certified_pairs_have_small_residual(bubble_integral, system):
    cfg = NumericConfig(BUBBLE_POINT)
    pairs = system(bubble_integral)
    assert pairs
    for pair in pairs:
        assert numeric_residual(bubble_integral, pair, cfg) <= 1e-4, pair.label


def test_residual_shrinks_with_refinement(bubble_integral):
    pair = theorem1_system(bubble_integral)[0]
    schedule = [(4, 0.1), (8, 0.02), (32, 0.002)]
    residuals = [
        numeric_residual(
            bubble_integral,
            pair,
            NumericConfig(BUBBLE_POINT, nodes=nodes, fd_step=step, richardson_levels=1),
        )
        for nodes, step in schedule
    ]
    assert residuals[0] > residuals[1] > residuals[2]


def test_flipped_tail_has_large_residual(bubble_integral):
    cfg = NumericConfig(BUBBLE_POINT)
    pair = theorem1_system(bubble_integral)[0]
    flipped = with_tail(pair, -pair.tail)
    assert numeric_residual(bubble_integral, flipped, cfg) >= 0.1


def test_triangle_numeric_residual(triangle_integral):
    cfg = NumericConfig(TRIANGLE_POINT)
    pair = theorem1_system(triangle_integral)[0]
    assert numeric_residual(triangle_integral, pair, cfg) <= 1e-3


def test_numeric_residual_rejects_unknown_method(bubble_integral):
    pair = theorem1_system(bubble_integral)[0]
    with pytest.raises(ValueError):
        numeric_residual(bubble_integral, pair, NumericConfig(BUBBLE_POINT), "spline")


def test_verify_pairs_collects_failures(bubble_integral):
    integral = bubble_integral
    good, other = theorem1_system(integral)
    dz1 = DiffOperator.derivative(integral.alphabet, (0, 1, 0))
    bad = with_tail(other, other.tail + dz1)
    results = verify_pairs(integral, [good, bad], NumericConfig(BUBBLE_POINT))
    assert results[0].ok
    assert results[0].numeric_residual <= 1e-4
    assert not results[1].ok
    assert results[1].certificate_hash is None
    assert results[1].residual
    assert results[1].to_json()["status"] == "failed"


def test_verify_pairs_flags_numeric_failure(bubble_integral):
    pair = theorem1_system(bubble_integral)[0]
    cfg = NumericConfig(BUBBLE_POINT)
    [result] = verify_pairs(bubble_integral, [pair], cfg, tolerance=-1.0)
    assert not result.ok
    assert result.certificate_hash is not None
    assert "exceeds" in result.message
