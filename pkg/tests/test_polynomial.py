import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly
from numpy.testing import assert_allclose

from polynomial import (ComplexPoly, DiskPosition, backward_residual, count_in_disk, eval_with_derivative,
                        find_roots, find_roots_batch, format_complex, match_roots, parse_complex)
from utils.errors import DegreeMismatch, InvalidParams, ZeroPolynomial


def test_text_format():
    P = ComplexPoly.from_text('0, -1, 1')
    assert_allclose(P.coeffs, [0, -1, 1])
    assert P.degree == 2
    assert format_complex(1 + 2.5j) == '1.0+2.5i'
    assert parse_complex('0.5-2i') == 0.5 - 2j
    assert ComplexPoly.from_text(P.to_text()) == P


def test_bad_coefficient():
    with pytest.raises(InvalidParams):
        ComplexPoly.from_text('1,abc')


def test_trailing_zeros_are_trimmed():
    P = ComplexPoly([1, 2, 0, 0])
    assert P.degree == 1
    assert ComplexPoly([0, 0]).is_zero


def test_arithmetic():
    P = ComplexPoly([1, 1])
    assert P * P == ComplexPoly([1, 2, 1])
    assert (P - 1) == ComplexPoly([0, 1])
    assert P.shift(2) == ComplexPoly([0, 0, 1, 1])
    assert P.derivative() == ComplexPoly([1])
    assert P(2.0) == 3


def test_simple_roots(config):
    P = ComplexPoly(npoly.polyfromroots([0.5, 2.0, 0.3j]))
    roots = find_roots(P, config)
    assert_allclose([r.location for r in roots], [0.3j, 0.5, 2.0], atol=1e-12)
    assert [r.position for r in roots] == [DiskPosition.INSIDE, DiskPosition.INSIDE, DiskPosition.OUTSIDE]
    assert roots.inside == 2
    assert not roots.on_circle
    assert all(r.residual <= config.root_residual_tol for r in roots)


def test_root_on_circle(config):
    roots = find_roots(ComplexPoly([-1, 1]), config)
    assert roots.on_circle
    assert roots.at(DiskPosition.ON_CIRCLE)[0].location == 1


def test_double_root_is_clustered(config):
    # (z - 1/2)^2 (z + 2)
    roots = find_roots(ComplexPoly([0.5, -1.75, 1, 1]), config)
    assert roots.degree == 3
    assert [r.multiplicity for r in roots] == [2, 1]
    assert abs(roots.roots[0].location - 0.5) < 1e-7


def test_degenerate_polynomials(config):
    with pytest.raises(ZeroPolynomial):
        find_roots(ComplexPoly([0]), config)
    assert len(find_roots(ComplexPoly([3]), config)) == 0


def test_count_in_disk(config):
    P = ComplexPoly(npoly.polyfromroots([0.1, -0.2j, 3, 4j]))
    assert count_in_disk(P, config) == (2, False)


def test_backward_residual():
    coeffs = np.array([2, -3, 1], dtype=complex)
    assert backward_residual(coeffs, 1.0) == 0
    assert backward_residual(coeffs, 0.0) == pytest.approx(2 / 6)


def test_batch_rows_are_independent(config):
    rng = np.random.default_rng(7)
    rows = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    together, ok = find_roots_batch(rows, config)
    alone, _ = find_roots_batch(rows[:1], config)
    assert ok.all()
    assert np.array_equal(together[0], alone[0])


def test_match_roots():
    a = np.array([1, 2j, -3])
    pairing = match_roots(a, a[[2, 0, 1]] + 1e-3)
    assert not pairing.approximate
    assert sorted(i for i, _, _ in pairing.pairs) == [0, 1, 2]
    assert pairing.max_distance == pytest.approx(1e-3)
    with pytest.raises(DegreeMismatch):
        match_roots(a, a[:2])


def test_match_roots_greedy_for_high_degree():
    rng = np.random.default_rng(3)
    a = rng.normal(size=15) + 1j * rng.normal(size=15)
    pairing = match_roots(a, a[rng.permutation(15)])
    assert pairing.approximate
    assert pairing.total_distance == 0


def test_eval_with_derivative():
    P = ComplexPoly.from_text('1,2,3')
    assert eval_with_derivative(P, 2) == (17, 14)
    assert eval_with_derivative(ComplexPoly.from_text('1i,2'), 0.5) == (1 + 1j, 2)


@pytest.mark.parametrize('degree', [3, 8, 14, 20])
def test_roots_rebuild_the_polynomial(degree, config):
    rng = np.random.default_rng(degree)
    P = ComplexPoly(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1))
    rebuilt = npoly.polyfromroots(find_roots(P, config).expanded())
    monic = P.coeffs / P.coeffs[-1]
    assert np.max(np.abs(rebuilt - monic)) / np.max(np.abs(monic)) < 1e-8


def test_count_in_disk_of_a_product(config):
    rng = np.random.default_rng(11)
    for _ in range(10):
        P = ComplexPoly(rng.normal(size=4) + 1j * rng.normal(size=4))
        Q = ComplexPoly(rng.normal(size=5) + 1j * rng.normal(size=5))
        inside_p, on_p = count_in_disk(P, config)
        inside_q, on_q = count_in_disk(Q, config)
        assert count_in_disk(P * Q, config) == (inside_p + inside_q, on_p or on_q)


def test_derivative_matches_central_difference():
    rng = np.random.default_rng(5)
    h = 1e-6
    for _ in range(50):
        degree = int(rng.integers(1, 11))
        P = ComplexPoly(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1))
        z = 2 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        _, derivative = eval_with_derivative(P, z)
        central = (eval_with_derivative(P, z + h)[0] - eval_with_derivative(P, z - h)[0]) / (2 * h)
        scale = np.sum(np.abs(P.derivative().coeffs) * abs(z) ** np.arange(degree))
        assert abs(derivative - central) <= 1e-6 * max(abs(derivative), scale)
