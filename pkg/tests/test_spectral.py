import numpy as np
import pytest
from numpy.testing import assert_allclose

from report import build_report
from spectral import (KIND_CODES, Branch, EigenCertificate, HarmonicSymbol, Hyponormality,
                      NotEigenvalue, PointKind, classify_batch, classify_point, curve_distance,
                      enumerate_lambda, essential_membership, eigen_test, f_lambda,
                      hyponormal_screen, invertible, range_inclusion_check, recover_n, weyl_report,
                      winding)
from utils import log
from utils.errors import InvalidParams, PreconditionViolated, UnsupportedDegree

ZBAR = HarmonicSymbol.from_text('0')


def test_f_lambda_constant_term():
    s = HarmonicSymbol.from_text('1,2,3')
    F = f_lambda(s, 0.5)
    assert F.coeffs[0] == 1
    assert F.degree == s.degree + 1
    assert_allclose(F.coeffs, [1, 0.5, 2, 3])


def test_symbol_json():
    s = HarmonicSymbol.from_text('0.5+1i,-2', 'demo')
    again = HarmonicSymbol.from_json(s.to_json())
    assert again.p == s.p
    assert again.label == 'demo'


def test_winding_of_zbar(config):
    assert winding(ZBAR, 0.5, config) == (-1, False)
    assert winding(ZBAR, 0, config) == (-1, False)
    assert winding(ZBAR, 2, config) == (0, False)
    assert essential_membership(ZBAR, 1, config)


@pytest.mark.parametrize('lam, kind', [
    (0, PointKind.EIGEN_REGION_INDEX_POSITIVE),
    (0.3 + 0.3j, PointKind.EIGEN_REGION_INDEX_POSITIVE),
    (3, PointKind.RESOLVENT),
    (1, PointKind.ESSENTIAL),
])
def test_classify_zbar(lam, kind, config):
    assert classify_point(ZBAR, lam, config=config).kind is kind


def test_recover_n():
    assert recover_n(1.5) == 1
    assert recover_n(4 / 3) == 2
    assert recover_n(2.0) == 0
    assert recover_n(5.0) == 0


def test_eigen_test_certifies_zero(construction, config):
    cert = eigen_test(construction.symbol, 0, config)
    assert isinstance(cert, EigenCertificate)
    assert cert.branch is Branch.SIMPLE_ZEROS
    assert cert.winding == 0
    assert len(cert.zeros) == 1
    assert cert.zeros[0].n == 1
    assert abs(cert.zeros[0].z - construction.alpha) < 1e-8


def test_eigen_test_no_zeros(config):
    cert = eigen_test(ZBAR, 0.5, config)
    assert cert.branch is Branch.NO_ZEROS
    assert cert.winding == -1


def test_eigen_test_rejects(config):
    s = HarmonicSymbol.from_text('0,-1,1')
    result = eigen_test(s, 0, config)
    assert isinstance(result, NotEigenvalue)
    assert result.reason == 'zero fails the eigenvalue condition'
    with pytest.raises(PreconditionViolated):
        eigen_test(ZBAR, 1, config)


def test_enumerate_zbar(config):
    enumeration = enumerate_lambda(ZBAR, 10, config)
    assert enumeration.certificates == ()
    assert enumeration.complete


def test_enumerate_finds_zero(construction_symbol, config):
    enumeration = enumerate_lambda(construction_symbol, 20, config)
    assert any(abs(lam) < 1e-9 for lam in enumeration.lambdas)
    assert all(c.winding == 0 for c in enumeration.certificates)
    assert enumeration.to_json(with_candidates=True)['candidates']


def test_enumerate_quadratic_is_empty(config):
    enumeration = enumerate_lambda(HarmonicSymbol.from_text('0.3,-1,1'), 50, config)
    assert enumeration.certificates == ()


def test_enumerate_records_spans(config):
    with log.LogCollector() as collector:
        enumerate_lambda(ZBAR, 5, config)
    assert any(key.startswith('dur_') for key in collector.logs)


def test_invertible(construction_symbol, config):
    quadratic = invertible(HarmonicSymbol.from_text('0,-1,1'), config)
    assert quadratic.verdict
    assert quadratic.clause == 'quadratic'
    assert not invertible(ZBAR, config).verdict
    result = invertible(construction_symbol, config)
    assert not result.verdict
    assert result.clause == 'eigen_condition'
    assert result.witness == 'eigenvalue condition satisfied at n = 1'


def test_hyponormal_screen(config):
    assert hyponormal_screen(HarmonicSymbol.from_text('0,0.3'), config=config).verdict \
        is Hyponormality.NOT_HYPONORMAL
    assert hyponormal_screen(HarmonicSymbol.from_text('0,2'), config=config).verdict \
        is Hyponormality.INCONCLUSIVE
    with pytest.raises(InvalidParams):
        hyponormal_screen(ZBAR, samples=8, config=config)


def test_curve_distance(config):
    assert curve_distance(ZBAR, 0.5, config) == pytest.approx(0.5, abs=1e-9)
    assert curve_distance(ZBAR, 3j, config) == pytest.approx(2.0, abs=1e-9)


def test_classify_batch_matches_points(config):
    s = HarmonicSymbol.from_text('0,-1,1')
    lams = np.array([0, 5, -3j, 0.2 + 0.1j, 1.5 - 0.5j])
    batch = classify_batch(s, lams, config)
    expected = [KIND_CODES[classify_point(s, lam, config=config).kind] for lam in lams]
    assert batch.codes.tolist() == expected


def test_conjugation_symmetry(config):
    s = HarmonicSymbol.from_text('0,0.5,0.3')
    lams = np.array([0.2 + 0.4j, -0.7 + 0.1j, 1.1 + 0.9j, 0.05 + 0.6j])
    assert classify_batch(s, lams, config).codes.tolist() == \
        classify_batch(s, lams.conj(), config).codes.tolist()


def test_weyl_zbar(config):
    report = weyl_report(ZBAR, 10, config)
    assert report.holds
    assert report.pi00 == ()
    assert report.winding_regions.get(-1, 0) > 0


def test_weyl_construction(construction_symbol, config):
    report = weyl_report(construction_symbol, 20, config)
    assert report.holds
    assert any(abs(z) < 1e-9 for z in report.pi00)


def test_range_inclusion_linear(config):
    s = HarmonicSymbol.from_text('0,0.5')
    report = build_report(s, 10, config)
    check = range_inclusion_check(s, report, config=config)
    assert check.holds
    assert check.reverse_holds
    assert report.verdicts['range_inclusion']['holds']


def test_range_inclusion_degree_limit(construction_symbol, config):
    with pytest.raises(UnsupportedDegree):
        range_inclusion_check(construction_symbol, None, config=config)


@pytest.mark.parametrize('offset, lam', [(0.25 + 0.5j, 0.25 + 0.5j), (0, 50), (0, 0)])
def test_translation_covariance(construction_symbol, offset, lam, config):
    s = HarmonicSymbol(construction_symbol.p + offset)
    direct = eigen_test(s, lam, config)
    shifted = eigen_test(s.shifted(lam), 0, config)
    assert type(direct) is type(shifted)
    if isinstance(direct, NotEigenvalue):
        assert direct.reason == shifted.reason
        return
    assert direct.branch is shifted.branch
    assert direct.winding == shifted.winding
    assert len(direct.zeros) == len(shifted.zeros)
    for a, b in zip(direct.zeros, shifted.zeros):
        assert a.n == b.n
        assert abs(a.z - b.z) < 1e-12
        assert abs(a.zero_residual - b.zero_residual) < 1e-12
        assert abs(a.condition_residual - b.condition_residual) < 1e-12


@pytest.mark.parametrize('text', ['0,-1,1', '0'])
def test_range_inclusion(text, config):
    s = HarmonicSymbol.from_text(text)
    check = range_inclusion_check(s, build_report(s, 10, config), config=config)
    assert check.holds
    assert check.worst_distance <= config.range_tol
    if s.degree <= 1:
        assert check.reverse_holds
