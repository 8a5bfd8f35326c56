"""Embedded acceptance suite behind `main.py selftest`.

Every criterion runs at full size with the configured seed and returns
(passed, detail). The suite collects all results before failing, so one
report shows every broken criterion.
"""
import numpy as np
import pandas as pd

from constructions import (build_counterexample, isolated_points, sweep, tail_threshold,
                           verify_construction)
from matrix import (SeriesVerdict, build_section, radial_shift_section, radial_weyl_summary,
                    residual, section_eigenvalues, series_coefficients, series_eigenvector)
from polynomial import find_roots
from raster import RasterCode, rasterize
from render import render
from report import build_report
from spectral import (HarmonicSymbol, Hyponormality, PointKind, classify_point, curve_bbox,
                      curve_distance, delta_arg_winding, enumerate_lambda, f_lambda,
                      hyponormal_screen, invertible, weyl_report)
from utils import log
from utils.config import resolve_config
from utils.errors import ValidationFailed
from utils.utils import Timer

RANDOM_QUADRATICS = 200
WINDING_PAIRS = 1000
QUADRATIC_MODULUS = 2.0
BOUNDARY_EXCEPTIONS = 0.005
FIXED_ARG_SAMPLES = 4096


def random_coeffs(rng, degree, modulus):
    radius = modulus * np.sqrt(rng.uniform(0, 1, degree + 1))
    return radius * np.exp(2j * np.pi * rng.uniform(0, 1, degree + 1))


def random_quadratics(config):
    rng = np.random.default_rng(config.seed)
    return [HarmonicSymbol.from_coeffs(random_coeffs(rng, 2, QUADRATIC_MODULUS), f'quadratic #{i}')
            for i in range(RANDOM_QUADRATICS)]


def construction_identities(config):
    frame = sweep(range(3, 11), range(1, 6), config)
    ok = (frame['|beta|'] > 1).all() and (frame['|alpha|'] < 1).all() \
        and (frame['eigen_condition_residual'] < 1e-10).all()
    params = build_counterexample(3, 1, config)
    z = params.alpha
    value = z * z * params.p.derivative()(z)
    ok = ok and abs(value - 1.5) < 1e-10
    return bool(ok), f'{len(frame)} (k, n) pairs; worst residual {frame["eigen_condition_residual"].max():.2e}'


def isolated_certification(config):
    params = build_counterexample(3, 1, config)
    certificate = verify_construction(params, config)
    zero = certificate.certificate.zeros[0]
    result = isolated_points(params, n_max=200, config=config)
    ok = certificate.passed and zero.n == 1 and result.gap_radius > 0 and result.complete
    return bool(ok), f'gap radius {result.gap_radius:.3e}, |Lambda| = {len(result.lambda_set)}, ' \
                     f'complete = {result.complete}'


def limit_closed_forms(config):
    worst = 0.0
    for k in range(3, 11):
        cert = verify_construction(build_counterexample(k, 1, config), config)
        worst = max(worst, next(c.residual for c in cert.checks if c.name == 'factorization'))
    enumeration = enumerate_lambda(build_counterexample(3, 1, config).symbol, 200, config)
    n_detect = tail_threshold(enumeration)
    tail = [c for c in enumeration.candidates if c.n > n_detect]
    ok = worst < 1e-9 and n_detect < enumeration.n_max and all(c.inside >= 2 for c in tail)
    return bool(ok), f'factorization residual {worst:.2e}; N_detect = {n_detect}, {len(tail)} tail candidates'


def quadratic_emptiness(config):
    nonempty = 0
    for s in random_quadratics(config):
        report = build_report(s, 50, config)
        if report.lambda_set or report.weyl.pi00:
            nonempty += 1
    return nonempty == 0, f'{nonempty} of {RANDOM_QUADRATICS} quadratics have isolated eigenvalues'


def invertibility_vectors(config):
    quadratic = invertible(HarmonicSymbol.from_text('0,-1,1'), config)
    coanalytic = invertible(HarmonicSymbol.from_text('0'), config)
    construction = invertible(build_counterexample(3, 1, config).symbol, config)
    ok = quadratic.verdict and not coanalytic.verdict and not construction.verdict \
        and construction.clause == 'eigen_condition' and construction.n == 1
    return bool(ok), f'z^2 - z: {quadratic.verdict}; 0: {coanalytic.verdict}; ' \
                     f'(3,1): {construction.verdict} ({construction.witness})'


def coanalytic_sanity(config):
    s = HarmonicSymbol.from_text('0')
    grid = rasterize(s, bbox=(-2, 2, -2, 2), resolution=(256, 256), config=config)
    rows, cols = np.indices(grid.cells.shape)
    dx, _ = grid.pixel_size
    modulus = np.abs((-2 + (cols + 0.5) * dx) + 1j * (2 - (rows + 0.5) * dx))
    band = np.hypot(dx, dx)
    inner, outer = modulus < 1 - band, modulus > 1 + band
    wrong = np.sum(inner & (grid.cells != RasterCode.EIGEN_REGION)) + \
        np.sum(outer & (grid.cells != RasterCode.RESOLVENT))
    boundary = np.sum(~inner & ~outer)
    c, log_scale = series_coefficients(s, 0.3, 50)
    j = np.arange(51)
    series_ok = log_scale == 0 and np.allclose(c, (j + 1) * 0.3 ** j, rtol=1e-12, atol=0)
    ok = wrong <= BOUNDARY_EXCEPTIONS * boundary and series_ok
    return bool(ok), f'{wrong} misclassified pixels ({boundary} boundary pixels); closed form {series_ok}'


def oracle_residuals(config):
    s = build_counterexample(3, 1, config).symbol
    construction = residual(build_section(s, 200), series_eigenvector(s, 0, 400, config))
    coanalytic = HarmonicSymbol.from_text('0')
    kernel = residual(build_section(coanalytic, 200), series_eigenvector(coanalytic, 0.3, 400, config))
    resolvent = 50.0
    kind = classify_point(s, resolvent, config=config).kind
    verdict = series_eigenvector(s, resolvent, 400, config).verdict
    ok = construction < 1e-6 and kernel < 1e-8 and kind is PointKind.RESOLVENT \
        and verdict is SeriesVerdict.GROWING
    return bool(ok), f'(3,1) residual {construction:.2e}; p = 0 residual {kernel:.2e}; ' \
                     f'lambda = {resolvent:g} is {kind.value} with {verdict.value} series'


def radial_shift(config):
    r, N = 0.5, 101
    section = radial_shift_section(r, N)
    n = np.arange(1, N)
    expected = np.sqrt(n * (n + 1)) * 0.5 ** (2 * n) / (2 * n + 1)
    weights_ok = np.max(np.abs(section.diagonals[1] - expected)) < 1e-12
    nilpotent = np.all(section_eigenvalues(section) == 0)
    summary = radial_weyl_summary(r)
    ok = weights_ok and nilpotent and not summary.holds
    return bool(ok), f'weights {weights_ok}; eigenvalues all zero {nilpotent}; Weyl holds {summary.holds}'


def weyl_verdicts(config):
    construction = weyl_report(build_counterexample(3, 1, config).symbol, config=config)
    coanalytic = weyl_report(HarmonicSymbol.from_text('0'), config=config)
    failures = sum(not weyl_report(s, 50, config).holds for s in random_quadratics(config))
    ok = construction.holds and any(abs(z) <= config.dedup_tol for z in construction.pi00) \
        and coanalytic.holds and not coanalytic.pi00 and failures == 0
    return bool(ok), f'(3,1) pi00 = {len(construction.pi00)} point(s); p = 0 pi00 empty; ' \
                     f'{failures} quadratic failures'


def _arg_samples(s, distance, config):
    """Samples keeping every chord of the curve shorter than the distance to lambda."""
    m = np.arange(len(s.p.coeffs))
    lipschitz = 1 + np.sum(m * np.abs(s.p.coeffs))
    needed = int(np.ceil(2 * np.pi * lipschitz / distance))
    return max(config.arg_samples, 1 << (needed - 1).bit_length())


def winding_cross_check(config):
    rng = np.random.default_rng(config.seed)
    mismatches = fixed_mismatches = checked = 0
    while checked < WINDING_PAIRS:
        degree = int(rng.integers(1, 6))
        s = HarmonicSymbol.from_coeffs(random_coeffs(rng, degree, 1.0))
        re_min, re_max, im_min, im_max = curve_bbox(s, config.curve_samples)
        lam = complex(rng.uniform(re_min, re_max), rng.uniform(im_min, im_max))
        distance = curve_distance(s, lam, config)
        if distance <= 1e-3:
            continue
        checked += 1
        w = find_roots(f_lambda(s, lam), config).inside - 1
        if delta_arg_winding(s, lam, _arg_samples(s, distance, config)) != w:
            mismatches += 1
        if delta_arg_winding(s, lam, FIXED_ARG_SAMPLES) != w:
            fixed_mismatches += 1
    return mismatches == 0, f'{mismatches} mismatches in {checked} pairs; ' \
                            f'{fixed_mismatches} at a fixed {FIXED_ARG_SAMPLES} samples'


def hyponormality(config):
    small = hyponormal_screen(HarmonicSymbol.from_text('0,0.3'), config=config)
    large = hyponormal_screen(HarmonicSymbol.from_text('0,2'), config=config)
    ok = small.verdict is Hyponormality.NOT_HYPONORMAL and large.verdict is Hyponormality.INCONCLUSIVE
    return bool(ok), f'0.3z: {small.verdict.value}; 2z: {large.verdict.value}'


def determinism(config):
    s = build_counterexample(3, 1, config).symbol
    outputs = []
    for workers in (1, 2, 1):
        run = resolve_config(dict(config, workers=workers))
        grid = rasterize(s, resolution=(64, 64), n_max=50, config=run)
        outputs.append(render(grid, 'pgm', run) + render(grid, 'json', run))
    same = all(out == outputs[0] for out in outputs)
    return same, f'raster bytes identical across worker counts 1, 2, 1: {same}'


CRITERIA = [
    ('construction_identities', construction_identities),
    ('isolated_certification', isolated_certification),
    ('limit_closed_forms', limit_closed_forms),
    ('quadratic_emptiness', quadratic_emptiness),
    ('invertibility_vectors', invertibility_vectors),
    ('coanalytic_sanity', coanalytic_sanity),
    ('oracle_residuals', oracle_residuals),
    ('radial_shift', radial_shift),
    ('weyl_verdicts', weyl_verdicts),
    ('winding_cross_check', winding_cross_check),
    ('hyponormality', hyponormality),
    ('determinism', determinism),
]


@log.enter('selftest')
def run_selftest(config=None, only=None):
    """Run the criteria (all, or those named in `only`) and return a DataFrame of results."""
    config = resolve_config(config)
    rows = []
    for index, (name, criterion) in enumerate(CRITERIA, 1):
        if only and name not in only and str(index) not in only:
            continue
        timer = Timer()
        try:
            passed, detail = criterion(config)
        except ValidationFailed as e:
            passed, detail = False, f'{type(e).__name__}: {e}'
        log.info(f'[{index:2d}] {name}: {"pass" if passed else "FAIL"} ({timer.time():.1f}s) {detail}')
        rows.append({'criterion': index, 'name': name, 'passed': bool(passed), 'detail': detail})
    return pd.DataFrame(rows, columns=['criterion', 'name', 'passed', 'detail'])


def check(results):
    failed = results[~results['passed']]
    if len(failed):
        raise ValidationFailed('selftest failed: ' + ', '.join(failed['name']))
    return results
