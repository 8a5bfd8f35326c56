import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly
from numpy.polynomial.legendre import leggauss
from numpy.testing import assert_allclose

from matrix import (SeriesVerdict, build_section, growth_ratio, radial_shift_section,
                    radial_weights, radial_weyl_summary, residual, section_eigenvalues,
                    series_coefficients, series_eigenvector)
from spectral import HarmonicSymbol, PointKind, classify_point
from utils.errors import InvalidParams, SizeMismatch

ZBAR = HarmonicSymbol.from_text('0')


def test_section_entries():
    s = HarmonicSymbol.from_text('0.5,0.25')
    section = build_section(s, 6)
    assert section.entry(0, 1) == pytest.approx(np.sqrt(1 / 2))
    assert section.entry(2, 3) == pytest.approx(np.sqrt(3 / 4))
    assert section.entry(2, 2) == pytest.approx(0.5)
    assert section.entry(1, 0) == pytest.approx(0.25 * np.sqrt(1 / 2))
    assert section.entry(4, 3) == pytest.approx(0.25 * np.sqrt(4 / 5))
    assert section.entry(3, 0) == 0
    dense = section.to_dense()
    assert dense.shape == (6, 6)
    assert dense[4, 3] == section.entry(4, 3)


def test_section_size():
    with pytest.raises(InvalidParams):
        build_section(ZBAR, 1)


def test_kernel_series_closed_form():
    c, log_scale = series_coefficients(ZBAR, 0.3, 50)
    j = np.arange(51)
    assert log_scale == 0
    assert_allclose(c, (j + 1) * 0.3 ** j, rtol=1e-12)


def test_kernel_series_oracle(config):
    v = series_eigenvector(ZBAR, 0.3, 400, config)
    assert v.verdict is SeriesVerdict.DECAYING
    assert residual(build_section(ZBAR, 200), v) < 1e-8


def test_construction_residual(construction_symbol, config):
    v = series_eigenvector(construction_symbol, 0, 400, config)
    assert residual(build_section(construction_symbol, 200), v) < 1e-6


def test_resolvent_series_grows(construction_symbol, config):
    assert classify_point(construction_symbol, 50, config=config).kind is PointKind.RESOLVENT
    assert series_eigenvector(construction_symbol, 50, 400, config).verdict is SeriesVerdict.GROWING


def test_residual_needs_long_series(construction_symbol, config):
    v = series_eigenvector(construction_symbol, 0, 100, config)
    with pytest.raises(SizeMismatch):
        residual(build_section(construction_symbol, 200), v)


def test_series_length(config):
    with pytest.raises(InvalidParams):
        series_eigenvector(ZBAR, 0.3, 10, config)


def test_growth_ratio_edges():
    assert growth_ratio(np.zeros(200)) == 0
    c = np.zeros(200)
    c[-1] = 1
    assert growth_ratio(c) == np.inf
    assert growth_ratio(2.0 ** np.arange(200)) == pytest.approx(2.0)


def test_radial_shift():
    n = np.arange(1, 101)
    expected = np.sqrt(n * (n + 1)) * 0.5 ** (2 * n) / (2 * n + 1)
    assert np.max(np.abs(radial_weights(0.5, 101) - expected)) < 1e-12
    section = radial_shift_section(0.5, 101)
    assert section.triangular
    assert np.all(section_eigenvalues(section) == 0)
    with pytest.raises(InvalidParams):
        radial_shift_section(1.5, 10)


def test_radial_weyl_failure():
    summary = radial_weyl_summary(0.5)
    assert not summary.holds
    assert summary.spectrum == summary.omega == summary.pi00 == (0j,)


def test_section_eigenvalues_sorted():
    values = section_eigenvalues(build_section(HarmonicSymbol.from_text('0,-1,1'), 30))
    assert len(values) == 30
    keys = list(zip(values.real, values.imag))
    assert keys == sorted(keys)


def test_section_entries_match_quadrature():
    # Gauss-Legendre in r, trapezoid in theta: exact for these polynomial integrands
    x, w = leggauss(20)
    r, wr = (x + 1) / 2, w / 2
    theta = 2 * np.pi * np.arange(64) / 64
    z = r[:, None] * np.exp(1j * theta)[None, :]
    n = np.arange(12)
    basis = np.sqrt(n + 1)[:, None, None] * z[None] ** n[:, None, None]
    weight = (wr * r)[:, None] * (2 * np.pi / 64) / np.pi
    rng = np.random.default_rng(3)
    for degree in range(5):
        s = HarmonicSymbol.from_coeffs(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1))
        quadrature = np.einsum('rt,irt,jrt->ji', s.phi(z) * weight, basis, basis.conj())
        assert_allclose(build_section(s, 12).to_dense(), quadrature, rtol=0, atol=1e-8)


def test_series_solves_the_differential_equation():
    s = HarmonicSymbol.from_text('0.2,0.5,0.3')
    lam, M = 0.1 + 0.2j, 80
    c, log_scale = series_coefficients(s, lam, M)
    assert log_scale == 0
    q = (s.p - lam).coeffs
    k = len(q) - 1
    # (1 + z q) f' = -(2 q + z p') f
    lhs = npoly.polymul(npoly.polyadd([1], npoly.polymulx(q)), npoly.polyder(c))
    rhs = -npoly.polymul(npoly.polyadd(2 * q, npoly.polymulx(npoly.polyder(s.p.coeffs))), c)
    J = M - k - 1
    assert_allclose(lhs[:J], rhs[:J], rtol=0, atol=1e-12 * np.max(np.abs(lhs[:J])))


@pytest.mark.parametrize('N', [8, 64, 101])
def test_radial_summary_follows_the_section(N):
    summary = radial_weyl_summary(0.5, N)
    assert summary.spectrum == summary.omega == summary.pi00 == (0j,)
    assert not summary.holds
    assert '1-dimensional kernel' in summary.note
