"""Symbols whose spectrum has isolated points.

For k >= 3 and n >= 1 take

    beta = (1 - (1/(n+1))^{1/k} e^{i pi/k})^{-1/(k+1)},  alpha = -beta^{-k},
    p(z) = ((z - alpha)(z + beta)^k - 1) / z,

so that 1 + z p(z) = (z - alpha)(z + beta)^k. Then alpha is the only zero of
F_0 in the disk and alpha^2 p'(alpha) = (n+2)/(n+1): lambda = 0 is an
eigenvalue of index zero, hence an isolated point of the spectrum.
"""
from dataclasses import dataclass
from functools import partial
from typing import NamedTuple

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as npoly

from polynomial import ComplexPoly, backward_residual, find_roots_batch, match_roots
from spectral import (Branch, EigenCertificate, HarmonicSymbol, PointKind, classify_point,
                      curve_distance, eigen_test, enumerate_lambda, winding, zero_condition_poly)
from utils import log
from utils.config import resolve_config
from utils.errors import InvalidParams, ValidationFailed
from utils.utils import ResidualMeter, complex_pair, parallel_map

IDENTITY_TOL = 1e-10
LIMIT_TOL = 1e-9
DOUBLE_ZERO_TOL = 1e-8
MODULUS_CEILING = 49 / 50
FACTORIZATION_POINTS = 100
RING_POINTS = 16


@dataclass(frozen=True)
class ConstructionParams:
    k: int
    n: int
    beta: complex
    alpha: complex
    p: ComplexPoly
    z_inf: complex = None
    w_inf: complex = None
    lambda_inf: complex = None
    mu_inf: complex = None

    @property
    def c_k(self):
        return 1 / (2 * self.k * abs(self.beta) ** self.k)

    @property
    def symbol(self):
        return HarmonicSymbol(self.p, f'construction k={self.k} n={self.n}')

    @property
    def target(self):
        return (self.n + 2) / (self.n + 1)

    def to_json(self):
        return {
            'k': self.k,
            'n': self.n,
            'beta': complex_pair(self.beta),
            'alpha': complex_pair(self.alpha),
            'z_inf': complex_pair(self.z_inf),
            'w_inf': complex_pair(self.w_inf),
            'lambda_inf': complex_pair(self.lambda_inf),
            'mu_inf': complex_pair(self.mu_inf),
            'c_k': self.c_k,
            'symbol': self.symbol.to_json(),
        }


class LimitRoots(NamedTuple):
    z_inf: complex
    w_inf: complex
    lambda_inf: complex
    mu_inf: complex


def branch_beta(k, n):
    """Principal-branch beta; |beta| > 1 for every k >= 3, n >= 1."""
    base = 1 - (1 / (n + 1)) ** (1 / k) * np.exp(1j * np.pi / k)
    return complex(np.exp(-np.log(base) / (k + 1)))


def _product_coeffs(alpha, beta, k):
    return npoly.polymul([-alpha, 1], npoly.polypow([beta, 1], k))


def eigen_condition_residual(params):
    z = params.alpha
    return abs(z * z * params.p.derivative()(z) - params.target)


def pivotal_residual(params):
    """(1 + alpha/beta)^k = -1/(n+1), relative."""
    value = (1 + params.alpha / params.beta) ** params.k
    return abs(value + 1 / (params.n + 1)) * (params.n + 1)


def build_counterexample(k, n, config=None):
    if k < 3 or n < 1:
        raise InvalidParams(f'constructions need k >= 3 and n >= 1, got k={k}, n={n}')
    beta = branch_beta(k, n)
    alpha = -beta ** (-k)
    full = _product_coeffs(alpha, beta, k)
    # constant term of (z - alpha)(z + beta)^k is -alpha beta^k = 1
    if abs(full[0] - 1) > 1e-12:
        raise ValidationFailed(f'constant term of (z - alpha)(z + beta)^k is {full[0]:.16g}, not 1')
    params = ConstructionParams(k, n, beta, alpha, ComplexPoly(full[1:]))
    params = ConstructionParams(k, n, beta, alpha, params.p, *limit_roots(params))
    _validate(params, full)
    log.debug(f'built k={k} n={n}: |beta|={abs(beta):.6f} |alpha|={abs(alpha):.6f}')
    return params


def _validate(params, full):
    if not abs(params.beta) > 1 or not abs(params.alpha) < 1:
        raise ValidationFailed(f'branch check: |beta|={abs(params.beta):.6g}, |alpha|={abs(params.alpha):.6g}')
    one_plus = np.concatenate([[1], params.p.coeffs])
    identity = np.max(np.abs(one_plus - full)) / np.max(np.abs(full))
    if identity > IDENTITY_TOL:
        raise ValidationFailed(f'1 + z p(z) differs from (z - alpha)(z + beta)^k by {identity:.3g}')
    if eigen_condition_residual(params) > IDENTITY_TOL:
        raise ValidationFailed(f'alpha^2 p\'(alpha) misses {params.target} by {eigen_condition_residual(params):.3g}')
    if abs(params.z_inf - params.w_inf) <= LIMIT_TOL:
        raise ValidationFailed('z_inf and w_inf coincide')
    if params.n == 1:
        for name, z in (('z_inf', params.z_inf), ('w_inf', params.w_inf)):
            if not params.c_k <= abs(z) < MODULUS_CEILING:
                raise ValidationFailed(f'|{name}|={abs(z):.6g} outside [{params.c_k:.6g}, 49/50)')


def _limit_residual(p, z):
    G = p.derivative().shift(2) - 1
    return float(backward_residual(G.coeffs, z))


def limit_roots(params):
    """Closed-form in-disk roots of z^2 p'(z) = 1 and the lambdas they produce.

    z^2 p'(z) - 1 = (z + beta)^{k-1} (k z^2 + ((k-1)/beta^k) z - 1/beta^{k-1}).
    """
    k, beta, p = params.k, params.beta, params.p
    root = np.sqrt((k - 1) ** 2 + 4 * k * beta ** (k + 1) + 0j)
    z_inf = complex(-(root + (k - 1)) / (2 * k * beta ** k))
    w_inf = complex((root - (k - 1)) / (2 * k * beta ** k))
    values = []
    for z in (z_inf, w_inf):
        residual = _limit_residual(p, z)
        if residual > LIMIT_TOL:
            raise ValidationFailed(f'limit root {z:.6g} has residual {residual:.3g}')
        lam = complex(1 / z + p(z))
        F = ComplexPoly(np.concatenate([[1], (p - lam).coeffs]))
        value, derivative = abs(F(z)), abs(F.derivative()(z))
        scale = float(np.sum(np.abs(F.coeffs)))
        if value / scale > DOUBLE_ZERO_TOL or derivative / scale > DOUBLE_ZERO_TOL:
            raise ValidationFailed(f'F has no double zero at {z:.6g} (|F|={value:.3g}, |F\'|={derivative:.3g})')
        values.append(lam)
    return LimitRoots(z_inf, w_inf, values[0], values[1])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float = 0.0
    note: str = ''

    def to_json(self):
        return {'name': self.name, 'passed': self.passed, 'residual': self.residual, 'note': self.note}


@dataclass(frozen=True)
class ConstructionCertificate:
    params: ConstructionParams
    checks: tuple
    certificate: EigenCertificate

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        return {
            'params': self.params.to_json(),
            'checks': [c.to_json() for c in self.checks],
            'certificate': self.certificate.to_json(),
            'passed': self.passed,
        }


def _factorization_check(params, rng):
    k, beta = params.k, params.beta
    radius = np.sqrt(rng.uniform(0, 1, FACTORIZATION_POINTS)) * 0.999
    z = radius * np.exp(2j * np.pi * rng.uniform(0, 1, FACTORIZATION_POINTS))
    lhs = z * z * params.p.derivative()(z) - 1
    rhs = (z + beta) ** (k - 1) * (k * z * z + ((k - 1) / beta ** k) * z - 1 / beta ** (k - 1))
    meter = ResidualMeter()
    for a, b in zip(lhs, rhs):
        meter.update(abs(a - b) / (1 + abs(b)))
    return meter


@log.enter('verify')
def verify_construction(params, config=None):
    """Run the branch check then checks (a)-(d); the first failure raises ValidationFailed."""
    config = resolve_config(config)
    checks = []

    def record(name, passed, residual=0.0, note=''):
        checks.append(CheckResult(name, bool(passed), float(residual), note))
        if not passed:
            raise ValidationFailed(f'construction k={params.k} n={params.n} failed {name}: {note}')

    record('branch', abs(params.beta) > 1 and abs(params.alpha) < 1, 0.0,
           f'|beta|={abs(params.beta):.6g} |alpha|={abs(params.alpha):.6g}')
    record('pivotal_identity', pivotal_residual(params) < IDENTITY_TOL, pivotal_residual(params),
           '(1 + alpha/beta)^k = -1/(n+1)')

    meter = _factorization_check(params, np.random.default_rng(config.seed))
    record('factorization', meter.within(LIMIT_TOL), meter.worst,
           f'z^2 p\'(z) - 1 factorization at {meter.count} points')

    cert = eigen_test(params.symbol, 0, config)
    certified = isinstance(cert, EigenCertificate) and cert.branch is Branch.SIMPLE_ZEROS \
        and len(cert.zeros) == 1 and abs(cert.zeros[0].z - params.alpha) < 1e-8 \
        and cert.zeros[0].n == params.n
    residual = cert.zeros[0].condition_residual if certified else 0.0
    record('eigen_certificate', certified, residual,
           'lambda = 0 certified with the single zero alpha' if certified else f'got {cert}')

    w = winding(params.symbol, 0, config)
    record('winding', w == (0, False), 0.0, f'winding={w.w} on_curve={w.on_curve}')

    if params.n == 1:
        moduli = (abs(params.z_inf), abs(params.w_inf))
        inside = all(params.c_k <= m < MODULUS_CEILING for m in moduli) and params.z_inf != params.w_inf
        record('limit_moduli', inside, max(moduli), f'c_k={params.c_k:.6g}, moduli={moduli[0]:.6g}, {moduli[1]:.6g}')
    else:
        checks.append(CheckResult('limit_moduli', True, 0.0, 'skipped: bounds only established for n = 1'))
    return ConstructionCertificate(params, tuple(checks), cert)


class ContinuationStep(NamedTuple):
    n: int
    z_n: complex
    w_n: complex
    distance: float

    def to_json(self):
        return {'n': self.n, 'z_n': complex_pair(self.z_n), 'w_n': complex_pair(self.w_n),
                'distance': self.distance}


def continuation_ns(n_max):
    """1, 2, 4, ... below n_max, then n_max."""
    ns = [1 << i for i in range(max(n_max, 1).bit_length()) if 1 << i < n_max]
    return ns + [n_max] if n_max >= 1 else []


def root_continuation(params, ns, config=None):
    """Follow the roots of z^2 p'(z) = (n+2)/(n+1) that converge to z_inf and w_inf.

    Every row is paired with the limit polynomial z^2 p'(z) - 1 by match_roots;
    distance is the larger of |z_n - z_inf| and |w_n - w_inf|.
    """
    config = resolve_config(config)
    ns = [int(n) for n in ns]
    G = zero_condition_poly(params.symbol, 0)
    targets = np.array([(n + 2) / (n + 1) for n in ns] + [1.0])
    rows = np.tile(G.coeffs, (len(targets), 1))
    rows[:, 0] -= targets
    raw, _ = find_roots_batch(rows, config)
    limit = raw[-1].copy()
    anchors = [int(np.argmin(np.abs(limit - z))) for z in (params.z_inf, params.w_inf)]
    if anchors[0] == anchors[1]:
        raise ValidationFailed('z_inf and w_inf share a limit root')
    limit[anchors[0]], limit[anchors[1]] = params.z_inf, params.w_inf
    steps = []
    for n, row in zip(ns, raw[:-1]):
        partner = {j: i for i, j, _ in match_roots(row, limit).pairs}
        z_n, w_n = complex(row[partner[anchors[0]]]), complex(row[partner[anchors[1]]])
        distance = max(abs(z_n - params.z_inf), abs(w_n - params.w_inf))
        steps.append(ContinuationStep(n, z_n, w_n, float(distance)))
    return tuple(steps)


@dataclass(frozen=True)
class IsolatedPoints:
    lambda_set: tuple
    complete: bool
    gap_radius: float
    n_detect: int
    tail_ok: bool
    reason: str
    enumeration: object = None
    continuation: tuple = ()
    unresolved_ring: tuple = ()

    def to_json(self):
        return {
            'lambda_set': [c.to_json() for c in self.lambda_set],
            'complete': self.complete,
            'gap_radius': self.gap_radius,
            'n_detect': self.n_detect,
            'tail_ok': self.tail_ok,
            'reason': self.reason,
            'n_max': self.enumeration.n_max if self.enumeration else None,
            'continuation': [step.to_json() for step in self.continuation],
            'unresolved_ring': [[*complex_pair(lam), kind] for lam, kind in self.unresolved_ring],
        }


def tail_threshold(enumeration):
    """Largest n with a candidate that has fewer than two in-disk zeros (-1 if none)."""
    failing = [c.n for c in enumeration.candidates if c.on_circle or c.inside < 2]
    return max(failing, default=-1)


def _alpha_shadow(point, params, config):
    """A ring point certified through the same zero as 0 itself: alpha, with the same n.

    Next to a curve closer than eigen_condition_tol allows to resolve, the
    eigenvalue condition at alpha still holds to tolerance a little off 0.
    """
    cert = point.certificate
    if cert is None or len(cert.zeros) != 1:
        return False
    zero = cert.zeros[0]
    return zero.n == params.n and abs(zero.z - params.alpha) <= config.cluster_tol


SPECTRUM_KINDS = (PointKind.ESSENTIAL, PointKind.FILLED_WINDING, PointKind.EIGEN_REGION_INDEX_POSITIVE)


@log.enter('isolated')
def isolated_points(params, n_max=None, config=None):
    config = resolve_config(config)
    s = params.symbol
    enumeration = enumerate_lambda(s, n_max, config)
    if not any(abs(c.lam) <= config.dedup_tol for c in enumeration.certificates):
        raise ValidationFailed('0 is missing from the enumerated isolated eigenvalues')

    n_detect = tail_threshold(enumeration)
    tail_ok = n_detect < enumeration.n_max
    others = [abs(c.lam) for c in enumeration.certificates if abs(c.lam) > config.dedup_tol]
    gap = min([curve_distance(s, 0, config)] + others)
    if not gap > 0:
        raise ValidationFailed('0 is not isolated: gap radius is zero')

    angles = 2 * np.pi * (np.arange(RING_POINTS) + 0.5) / RING_POINTS
    unresolved = []
    for lam in 0.5 * gap * np.exp(1j * angles):
        point = classify_point(s, lam, config=config)
        if point.kind is PointKind.RESOLVENT:
            continue
        if point.kind in SPECTRUM_KINDS or \
                (point.kind is PointKind.ISOLATED_EIGEN and not _alpha_shadow(point, params, config)):
            raise ValidationFailed(
                f'ring point {lam:.3g} at half the gap radius is {point.kind.value}, not RESOLVENT')
        unresolved.append((complex(lam), point.kind.value))
    if unresolved:
        log.warning(f'{len(unresolved)} of {RING_POINTS} points at half the gap radius {gap:.3e} '
                    f'cannot be told apart from 0 at eigen_condition_tol={config.eigen_condition_tol:g}')

    continuation = root_continuation(params, continuation_ns(enumeration.n_max), config)
    log.info(f'gap radius {gap:.3e}, N_detect={n_detect}, |Lambda|={len(enumeration.certificates)}')
    return IsolatedPoints(enumeration.certificates, enumeration.complete, gap, n_detect, tail_ok,
                          enumeration.reason, enumeration, continuation, tuple(unresolved))


def _sweep_row(kn, config):
    k, n = kn
    params = build_counterexample(k, n, config)
    return {
        'k': k,
        'n': n,
        '|beta|': abs(params.beta),
        '|alpha|': abs(params.alpha),
        'eigen_condition_residual': eigen_condition_residual(params),
        'pivotal_residual': pivotal_residual(params),
        '|z_inf|': abs(params.z_inf),
        '|w_inf|': abs(params.w_inf),
        'c_k': params.c_k,
    }


@log.enter('sweep')
def sweep(ks, ns, config=None):
    config = resolve_config(config)
    grid = [(int(k), int(n)) for k in ks for n in ns]
    rows = parallel_map(partial(_sweep_row, config=dict(config)), grid,
                        workers=config.workers, desc='sweep', progress=not config.quiet)
    return pd.DataFrame(rows)


def monomial_family(a, k, b):
    """conj(z) + a z^k + b, whose spectrum is connected (no isolated points)."""
    coeffs = np.zeros(k + 1, dtype=complex)
    coeffs[0] += b
    coeffs[k] += a
    return HarmonicSymbol(ComplexPoly(coeffs), f'monomial a={a} k={k} b={b}')


def params_from_json(data):
    """Rebuild params from `construct` output, re-deriving every value from (k, n)."""
    return build_counterexample(int(data['k']), int(data['n']))
