"""Spectral theory of T = T_{conj(z) + p} on the Bergman space.

Everything reduces to zeros of F_lambda(z) = 1 + z (p(z) - lambda): on the
circle phi(z) - lambda = F_lambda(z) / z, so the winding number of the
essential curve about lambda is (zeros of F_lambda in the disk) - 1, and an
index-zero lambda is an eigenvalue exactly when every in-disk zero z_j is
simple and z_j^2 p'(z_j) = (n_j + 2) / (n_j + 1) for an integer n_j >= 0.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from polynomial import (ComplexPoly, DiskPosition, assemble_roots, find_roots,
                        find_roots_batch)
from utils import log
from utils.config import resolve_config
from utils.errors import (CrossCheckMismatch, Indeterminate, InvalidParams,
                          NonConvergence, PreconditionViolated, UnsupportedDegree)
from utils.utils import complex_pair, complex_pairs, from_pairs, parallel_map

ENUMERATION_CHUNK = 32
REFINE_CANDIDATES = 8


@dataclass(frozen=True, eq=False)
class HarmonicSymbol:
    """phi(z) = conj(z) + p(z)."""
    p: ComplexPoly
    label: str = ''

    @classmethod
    def from_text(cls, text, label=''):
        return cls(ComplexPoly.from_text(text), label)

    @classmethod
    def from_coeffs(cls, coeffs, label=''):
        return cls(ComplexPoly(coeffs), label)

    @classmethod
    def from_json(cls, data):
        return cls(ComplexPoly(from_pairs(data['p'])), data.get('label', ''))

    @property
    def degree(self):
        return self.p.degree

    def phi(self, z):
        return np.conj(z) + self.p(z)

    def boundary(self, samples):
        theta = 2 * np.pi * np.arange(samples) / samples
        return self.phi(np.exp(1j * theta))

    def shifted(self, lam):
        return HarmonicSymbol(self.p - lam, self.label)

    def to_json(self):
        return {'p': complex_pairs(self.p.coeffs), 'text': self.p.to_text(), 'label': self.label}


def f_lambda(s, lam):
    """1 + z (p(z) - lambda); the constant term is exactly 1."""
    q = s.p - lam
    return ComplexPoly(np.concatenate([[1], q.coeffs]))


def _f_roots(s, lam, config):
    return find_roots(f_lambda(s, lam), config)


def zero_condition_poly(s, target):
    """z^2 p'(z) - target."""
    return s.p.derivative().shift(2) - target


class Winding(NamedTuple):
    w: int
    on_curve: bool


def delta_arg_winding(s, lam, samples):
    """Winding of phi(e^{i theta}) about lam from the summed argument steps; None if a sample hits lam."""
    values = s.boundary(samples) - lam
    if np.any(values == 0):
        return None
    steps = np.angle(np.roll(values, -1) / values)
    return int(np.rint(steps.sum() / (2 * np.pi)))


def _cross_checked(s, lam, roots, config):
    w = roots.inside - 1
    on_curve = roots.on_circle
    if on_curve:
        return Winding(w, True)
    samples = config.arg_samples
    while delta_arg_winding(s, lam, samples) != w:
        samples *= 2
        if samples > config.arg_samples_max:
            raise CrossCheckMismatch(
                f'root count gives winding {w} at lambda={lam:.6g} but the argument '
                f'variation disagrees up to {config.arg_samples_max} samples')
        log.debug(f'winding cross-check at {lam:.6g} retried with {samples} samples')
    return Winding(w, False)


def winding(s, lam, config=None):
    config = resolve_config(config)
    return _cross_checked(s, lam, _f_roots(s, lam, config), config)


def essential_membership(s, lam, config=None):
    return _f_roots(s, lam, resolve_config(config)).on_circle


class Branch(str, Enum):
    NO_ZEROS = 'NO_ZEROS'
    SIMPLE_ZEROS = 'SIMPLE_ZEROS'


@dataclass(frozen=True)
class ZeroData:
    z: complex
    n: int
    zero_residual: float
    condition_residual: float

    def to_json(self):
        return {
            'z': complex_pair(self.z),
            'n': self.n,
            'zero_residual': self.zero_residual,
            'condition_residual': self.condition_residual,
        }


@dataclass(frozen=True)
class EigenCertificate:
    lam: complex
    branch: Branch
    zeros: tuple
    winding: int

    @property
    def max_n(self):
        return max((z.n for z in self.zeros), default=-1)

    def to_json(self):
        return {
            'lambda': complex_pair(self.lam),
            'branch': self.branch.value,
            'zeros': [z.to_json() for z in self.zeros],
            'winding': self.winding,
        }


@dataclass(frozen=True)
class NotEigenvalue:
    lam: complex
    reason: str
    zero: Optional[complex] = None
    value: Optional[complex] = None

    def to_json(self):
        return {
            'lambda': complex_pair(self.lam),
            'reason': self.reason,
            'zero': None if self.zero is None else complex_pair(self.zero),
            'z2_dp': None if self.value is None else complex_pair(self.value),
        }


def recover_n(v):
    """Nearest integer n >= 0 with (n + 2) / (n + 1) close to v."""
    return max(0, int(round(((2 - v) / (v - 1)).real)))


def eigen_test(s, lam, config=None, roots=None):
    """Certify lam as an eigenvalue, or say why it is not one.

    `roots` may carry an already computed root set of f_lambda(s, lam).
    """
    config = resolve_config(config)
    F = f_lambda(s, lam)
    if roots is None:
        roots = find_roots(F, config)
    if roots.on_circle:
        raise PreconditionViolated(f'lambda={lam:.6g} lies on the essential curve')
    inside = roots.at(DiskPosition.INSIDE)
    if not inside:
        return EigenCertificate(complex(lam), Branch.NO_ZEROS, (), -1)

    dp = s.p.derivative()
    zeros, failure, undecided = [], None, None
    for root in inside:
        z = root.location
        if root.multiplicity > 1:
            failure = failure or NotEigenvalue(complex(lam), 'multiple zero', z)
            continue
        v = z * z * dp(z)
        gap = abs(v - 1)
        # F_lambda'(z) = (z^2 p'(z) - 1) / z at a zero, so v = 1 is a double zero
        if gap < config.multiple_zero_tol:
            failure = failure or NotEigenvalue(complex(lam), 'multiple zero', z, v)
            continue
        if gap < config.indeterminacy_band:
            undecided = undecided or z
            continue
        n = recover_n(v)
        if n > config.n_cap:
            undecided = undecided or z
            continue
        condition = abs(v - (n + 2) / (n + 1))
        if condition > config.eigen_condition_tol:
            failure = failure or NotEigenvalue(complex(lam), 'zero fails the eigenvalue condition', z, v)
            continue
        zeros.append(ZeroData(z, n, abs(F(z)), float(condition)))

    if failure is not None:
        return failure
    if undecided is not None:
        raise Indeterminate(
            f'z^2 p\'(z) is within {config.indeterminacy_band:g} of 1 at the zero {undecided:.6g}')
    return EigenCertificate(complex(lam), Branch.SIMPLE_ZEROS, tuple(zeros), roots.inside - 1)


@dataclass(frozen=True)
class Candidate:
    n: int
    z: complex
    lam: complex
    inside: int
    on_circle: bool
    status: str

    def to_json(self):
        return {
            'n': self.n,
            'z': complex_pair(self.z),
            'lambda': complex_pair(self.lam),
            'inside': self.inside,
            'on_circle': self.on_circle,
            'status': self.status,
        }


@dataclass(frozen=True)
class LambdaEnumeration:
    certificates: tuple
    complete: bool
    n_max: int
    reason: str
    candidates: tuple = ()
    indeterminate: tuple = ()

    @property
    def lambdas(self):
        return [c.lam for c in self.certificates]

    def to_json(self, with_candidates=False):
        data = {
            'lambda_set': [c.to_json() for c in self.certificates],
            'complete': self.complete,
            'n_max': self.n_max,
            'reason': self.reason,
            'indeterminate': complex_pairs(self.indeterminate),
        }
        if with_candidates:
            data['candidates'] = [c.to_json() for c in self.candidates]
        return data


def _solve_rows(rows, config):
    return find_roots_batch(rows, config)


def _batched_roots(rows, config):
    chunks = [rows[i:i + ENUMERATION_CHUNK] for i in range(0, len(rows), ENUMERATION_CHUNK)]
    solved = parallel_map(partial(_solve_rows, config=dict(config)), chunks,
                          workers=config.workers, desc='roots', progress=not config.quiet)
    roots = np.concatenate([r for r, _ in solved])
    ok = np.concatenate([o for _, o in solved])
    return roots, ok


def _root_set(P, raw, ok, config):
    return assemble_roots(P, raw, config) if ok else find_roots(P, config)


def _limit_completeness(s, G, config):
    limit = find_roots(G - 1, config)
    for root in limit:
        if abs(abs(root.location) - 1) <= config.tail_margin:
            return False, f'a root of z^2 p\'(z) - 1 lies within {config.tail_margin:g} of the circle'
    for root in limit.at(DiskPosition.INSIDE):
        lam_inf = 1 / root.location + s.p(root.location)
        roots = _f_roots(s, lam_inf, config)
        if roots.on_circle or roots.inside < 2:
            return False, f'limit candidate {lam_inf:.6g} does not have two in-disk zeros'
    return True, ''


@log.enter('enumerate')
def enumerate_lambda(s, n_max=None, config=None):
    """All index-zero eigenvalues reachable with n_j <= n_max."""
    config = resolve_config(config)
    n_max = config.n_max if n_max is None else n_max
    if s.degree < 1:
        return LambdaEnumeration((), True, n_max, 'z^2 p\'(z) vanishes identically')

    G = zero_condition_poly(s, 0)
    ns = np.arange(n_max + 1)
    rows = np.tile(G.coeffs, (len(ns), 1))
    rows[:, 0] -= (ns + 2) / (ns + 1)
    roots, ok = _batched_roots(rows, config)

    # candidates lambda = 1/z + p(z) for in-disk solutions z
    raw_candidates = []
    for n in ns:
        row_roots = roots[n] if ok[n] else find_roots(ComplexPoly(rows[n]), config).expanded()
        for z in row_roots:
            if abs(z) < 1 - config.boundary_band:
                raw_candidates.append((int(n), complex(z), complex(1 / z + s.p(z))))

    f_rows = np.empty((len(raw_candidates), s.degree + 2), dtype=complex)
    f_rows[:, 0] = 1
    f_rows[:, 1:] = s.p.coeffs
    f_rows[:, 1] -= np.array([lam for _, _, lam in raw_candidates], dtype=complex)
    f_roots, f_ok = _batched_roots(f_rows, config) if len(f_rows) else (f_rows, np.ones(0, dtype=bool))

    certificates, candidates, indeterminate = [], [], []
    for idx, (n, z, lam) in enumerate(raw_candidates):
        F = ComplexPoly(f_rows[idx])
        rs = _root_set(F, f_roots[idx], f_ok[idx], config)
        status = 'winding'
        if rs.on_circle:
            status = 'on_curve'
        elif rs.inside == 1:
            if any(abs(lam - c.lam) <= config.dedup_tol for c in certificates):
                status = 'duplicate'
            else:
                try:
                    result = eigen_test(s, lam, config, roots=rs)
                except Indeterminate:
                    status = 'indeterminate'
                    indeterminate.append(lam)
                else:
                    if isinstance(result, EigenCertificate):
                        status = 'certified'
                        certificates.append(result)
                    else:
                        status = 'not_eigenvalue'
        candidates.append(Candidate(n, z, lam, rs.inside, rs.on_circle, status))

    complete, reason = _limit_completeness(s, G, config)
    if complete:
        stragglers = [c for c in candidates if c.n == n_max and (c.on_circle or c.inside < 2)]
        if stragglers:
            complete = False
            reason = f'{len(stragglers)} candidate(s) at n={n_max} still have fewer than two in-disk zeros'
        else:
            reason = 'every candidate beyond n_max has at least two in-disk zeros'
    log.info(f'{len(certificates)} isolated eigenvalue(s) from {len(candidates)} candidates '
             f'(n <= {n_max}, complete={complete})')
    return LambdaEnumeration(tuple(certificates), complete, n_max, reason,
                             tuple(candidates), tuple(indeterminate))


class PointKind(str, Enum):
    ESSENTIAL = 'ESSENTIAL'
    RESOLVENT = 'RESOLVENT'
    FILLED_WINDING = 'FILLED_WINDING'
    EIGEN_REGION_INDEX_POSITIVE = 'EIGEN_REGION_INDEX_POSITIVE'
    ISOLATED_EIGEN = 'ISOLATED_EIGEN'
    AMBIGUOUS = 'AMBIGUOUS'


KIND_CODES = {kind: code for code, kind in enumerate(PointKind)}
KINDS = list(PointKind)


@dataclass(frozen=True)
class PointClass:
    lam: complex
    kind: PointKind
    winding: Optional[int] = None
    certificate: Optional[EigenCertificate] = None
    reason: str = ''
    beyond_enumeration: bool = False

    def to_json(self):
        return {
            'lambda': complex_pair(self.lam),
            'kind': self.kind.value,
            'winding': self.winding,
            'certificate': self.certificate.to_json() if self.certificate else None,
            'reason': self.reason,
            'beyond_enumeration': self.beyond_enumeration,
        }


def classify_point(s, lam, n_max=None, config=None):
    config = resolve_config(config)
    n_max = config.n_max if n_max is None else n_max
    lam = complex(lam)
    try:
        roots = _f_roots(s, lam, config)
        w, on_curve = _cross_checked(s, lam, roots, config)
    except (NonConvergence, CrossCheckMismatch) as e:
        return PointClass(lam, PointKind.AMBIGUOUS, reason=str(e))
    if on_curve:
        return PointClass(lam, PointKind.ESSENTIAL, w)
    if w >= 1:
        return PointClass(lam, PointKind.FILLED_WINDING, w)
    if w == -1:
        return PointClass(lam, PointKind.EIGEN_REGION_INDEX_POSITIVE, w)
    try:
        result = eigen_test(s, lam, config, roots=roots)
    except Indeterminate as e:
        return PointClass(lam, PointKind.AMBIGUOUS, w, reason=str(e))
    except PreconditionViolated as e:
        return PointClass(lam, PointKind.ESSENTIAL, w, reason=str(e))
    if isinstance(result, NotEigenvalue):
        return PointClass(lam, PointKind.RESOLVENT, w, reason=result.reason)
    return PointClass(lam, PointKind.ISOLATED_EIGEN, w, certificate=result,
                      beyond_enumeration=result.max_n > n_max)


@dataclass(frozen=True)
class BatchClassification:
    codes: np.ndarray
    windings: np.ndarray
    curve_estimate: np.ndarray

    def kinds(self):
        return [KINDS[c] for c in self.codes]


def classify_batch(s, lams, config=None):
    """Vectorized classify_point without the argument cross-check.

    `curve_estimate` is min_j |lambda - phi(z_j / |z_j|)| over the zeros z_j
    of F_lambda, a cheap upper estimate of the distance to the curve.
    Rows the batched solver cannot certify fall back to classify_point.
    """
    config = resolve_config(config)
    lams = np.asarray(lams, dtype=complex).ravel()
    count = len(lams)
    codes = np.full(count, KIND_CODES[PointKind.AMBIGUOUS], dtype=np.int8)
    windings = np.zeros(count, dtype=int)
    estimate = np.full(count, np.inf)

    rows = np.empty((count, s.degree + 2), dtype=complex)
    rows[:, 0] = 1
    rows[:, 1:] = s.p.coeffs
    rows[:, 1] -= lams
    regular = rows[:, -1] != 0
    fallback = ~regular
    if regular.any():
        idx = np.flatnonzero(regular)
        roots, ok = find_roots_batch(rows[idx], config)
        fallback[idx[~ok]] = True
        idx, roots = idx[ok], roots[ok]
        moduli = np.abs(roots)
        inside_mask = moduli < 1 - config.boundary_band
        on_circle = np.any(np.abs(moduli - 1) <= config.boundary_band, axis=1)
        w = inside_mask.sum(axis=1) - 1
        unit = roots / moduli
        estimate[idx] = np.min(np.abs(lams[idx, None] - s.phi(unit)), axis=1)
        windings[idx] = w

        kind = np.where(w >= 1, KIND_CODES[PointKind.FILLED_WINDING],
                        np.where(w == -1, KIND_CODES[PointKind.EIGEN_REGION_INDEX_POSITIVE],
                                 KIND_CODES[PointKind.RESOLVENT]))
        zero_index = (w == 0)
        if zero_index.any():
            z = roots[zero_index, np.argmax(inside_mask[zero_index], axis=1)]
            v = z * z * s.p.derivative()(z)
            gap = np.abs(v - 1)
            with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
                ratio = np.real((2 - v) / (v - 1))
            n = np.clip(np.rint(np.nan_to_num(ratio, nan=0.0, posinf=1e300, neginf=0.0)), 0, 1e300)
            condition = np.abs(v - (n + 2) / (n + 1))
            sub = np.full(len(z), KIND_CODES[PointKind.RESOLVENT])
            undecided = (gap >= config.multiple_zero_tol) & ((gap < config.indeterminacy_band) | (n > config.n_cap))
            certified = (gap >= config.indeterminacy_band) & (n <= config.n_cap) & \
                (condition <= config.eigen_condition_tol)
            sub[undecided] = KIND_CODES[PointKind.AMBIGUOUS]
            sub[certified] = KIND_CODES[PointKind.ISOLATED_EIGEN]
            kind[zero_index] = sub
        kind[on_circle] = KIND_CODES[PointKind.ESSENTIAL]
        codes[idx] = kind

    for i in np.flatnonzero(fallback):
        point = classify_point(s, lams[i], config=config)
        codes[i] = KIND_CODES[point.kind]
        windings[i] = point.winding if point.winding is not None else 0
        if point.kind is PointKind.ESSENTIAL:
            estimate[i] = 0.0
    return BatchClassification(codes, windings, estimate)


@dataclass(frozen=True)
class Invertibility:
    verdict: bool
    clause: str
    witness: str
    zero: Optional[complex] = None
    n: Optional[int] = None

    def to_json(self):
        return {
            'invertible': self.verdict,
            'clause': self.clause,
            'witness': self.witness,
            'zero': None if self.zero is None else complex_pair(self.zero),
            'n': self.n,
        }


def invertible(s, config=None):
    """T is invertible iff 1 + z p(z) has no zero on the circle, exactly one
    in the disk, simple, and that zero z_0 fails z_0^2 p'(z_0) = (n+2)/(n+1)
    for every n >= 0."""
    config = resolve_config(config)
    roots = _f_roots(s, 0, config)
    if roots.on_circle:
        return Invertibility(False, 'on_curve', '1 + z p(z) has a zero on the unit circle')
    inside = roots.at(DiskPosition.INSIDE)
    if roots.inside != 1:
        return Invertibility(False, 'zero_count', f'1 + z p(z) has {roots.inside} zeros in the disk, not one')
    z0 = inside[0].location
    if s.degree <= 2:
        return Invertibility(True, 'quadratic', 'unique simple zero in the disk', z0)
    v = z0 * z0 * s.p.derivative()(z0)
    if abs(v - 1) < config.indeterminacy_band:
        raise Indeterminate(f'z0^2 p\'(z0) = {v:.6g} is too close to 1 to exclude every n')
    guess = recover_n(v)
    for n in range(max(guess - 1, 0), min(guess + 1, config.n_cap) + 1):
        if abs(v - (n + 2) / (n + 1)) <= config.eigen_condition_tol:
            return Invertibility(False, 'eigen_condition',
                                 f'eigenvalue condition satisfied at n = {n}', z0, n)
    return Invertibility(True, 'simple_zero', 'unique simple zero fails the eigenvalue condition', z0)


def curve_bbox(s, samples, inflate=0.25):
    curve = s.boundary(samples)
    re_min, re_max = curve.real.min(), curve.real.max()
    im_min, im_max = curve.imag.min(), curve.imag.max()
    pad_re = max(re_max - re_min, 1e-12) * inflate / 2
    pad_im = max(im_max - im_min, 1e-12) * inflate / 2
    return (float(re_min - pad_re), float(re_max + pad_re), float(im_min - pad_im), float(im_max + pad_im))


def curve_distance(s, lam, config=None):
    """Distance from lam to the essential curve: dense sampling, then bounded refinement."""
    config = resolve_config(config)
    samples = config.curve_samples
    theta = 2 * np.pi * np.arange(samples) / samples
    distance = np.abs(s.phi(np.exp(1j * theta)) - lam)
    best = float(distance.min())
    h = 2 * np.pi / samples

    def objective(t):
        return abs(s.phi(np.exp(1j * t)) - lam)

    for i in np.argsort(distance, kind='stable')[:REFINE_CANDIDATES]:
        res = minimize_scalar(objective, bounds=(theta[i] - h, theta[i] + h), method='bounded',
                              options={'xatol': 1e-14})
        best = min(best, float(res.fun))
    return best


def winding_atlas(s, resolution, config=None):
    """Batched classification on a resolution x resolution grid over the curve's box."""
    config = resolve_config(config)
    re_min, re_max, im_min, im_max = curve_bbox(s, config.curve_samples)
    re = re_min + (np.arange(resolution) + 0.5) * (re_max - re_min) / resolution
    im = im_min + (np.arange(resolution) + 0.5) * (im_max - im_min) / resolution
    points = (re[None, :] + 1j * im[:, None]).ravel()
    batch = classify_batch(s, points, config)
    return points, batch


@dataclass
class WeylReport:
    essential_samples: np.ndarray
    winding_regions: dict
    pi00: tuple
    holds: bool
    conditional: bool
    enumeration: LambdaEnumeration = field(repr=False)
    atlas: tuple = field(default=(), repr=False)

    def to_json(self):
        return {
            'omega': {
                'essential_samples': len(self.essential_samples),
                'winding_regions': {str(w): n for w, n in sorted(self.winding_regions.items())},
            },
            'pi00': complex_pairs(self.pi00),
            'holds': self.holds,
            'conditional': self.conditional,
            'complete': self.enumeration.complete,
            'n_max': self.enumeration.n_max,
        }


@log.enter('weyl')
def weyl_report(s, n_max=None, config=None, enumeration=None):
    """Weyl spectrum = curve plus nonzero-winding regions; pi00 = Lambda.

    Weyl's theorem holds when every Lambda point has winding 0 off the
    curve; a truncated enumeration makes the verdict conditional.
    """
    config = resolve_config(config)
    if enumeration is None:
        enumeration = enumerate_lambda(s, n_max, config)
    points, atlas = winding_atlas(s, config.atlas_resolution, config)
    regions, labelled = {}, []
    for lam, code, w in zip(points, atlas.codes, atlas.windings):
        if KINDS[code] in (PointKind.ESSENTIAL, PointKind.AMBIGUOUS):
            continue
        labelled.append((complex(lam), int(w)))
        if w != 0:
            regions[int(w)] = regions.get(int(w), 0) + 1
    holds = True
    for cert in enumeration.certificates:
        w, on_curve = winding(s, cert.lam, config)
        if on_curve or w != 0:
            holds = False
            log.warning(f'Lambda point {cert.lam:.6g} has winding {w} (on_curve={on_curve})')
    return WeylReport(s.boundary(config.curve_samples), regions, tuple(enumeration.lambdas),
                      holds, not enumeration.complete, enumeration, tuple(labelled))


class Hyponormality(str, Enum):
    NOT_HYPONORMAL = 'NOT_HYPONORMAL'
    INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass(frozen=True)
class HyponormalScreen:
    verdict: Hyponormality
    min_modulus: float
    theta: float

    def to_json(self):
        return {'verdict': self.verdict.value, 'min_modulus': self.min_modulus, 'theta': self.theta}


def hyponormal_screen(s, samples=None, config=None):
    """Necessary condition |p'| >= 1 on the circle; failing it rules hyponormality out."""
    config = resolve_config(config)
    samples = config.hyponormal_samples if samples is None else samples
    if samples < 16:
        raise InvalidParams(f'hyponormal screen needs at least 16 samples, got {samples}')
    dp = s.p.derivative()
    theta = 2 * np.pi * np.arange(samples) / samples
    modulus = np.abs(dp(np.exp(1j * theta)) * np.ones(samples))
    i = int(np.argmin(modulus))
    best_theta, best = float(theta[i]), float(modulus[i])
    h = 2 * np.pi / samples
    res = minimize_scalar(lambda t: abs(dp(np.exp(1j * t))), bounds=(theta[i] - h, theta[i] + h),
                          method='bounded', options={'xatol': 1e-12})
    if res.fun < best:
        best_theta, best = float(res.x), float(res.fun)
    verdict = Hyponormality.NOT_HYPONORMAL if best < 1 - config.screen_margin else Hyponormality.INCONCLUSIVE
    return HyponormalScreen(verdict, best, best_theta)


@dataclass(frozen=True)
class RangeInclusion:
    holds: bool
    worst_distance: float
    checked: int
    reverse_holds: Optional[bool] = None

    def to_json(self):
        return {
            'holds': self.holds,
            'worst_distance': self.worst_distance,
            'checked': self.checked,
            'reverse_holds': self.reverse_holds,
        }


def spectrum_points(report):
    """Sampled spectrum of a report: curve samples, Lambda and nonzero-winding atlas points."""
    points = [np.asarray(report.essential_samples, dtype=complex)]
    points.append(np.array([c.lam for c in report.lambda_set], dtype=complex))
    atlas = report.winding_atlas
    if atlas is not None:
        in_spectrum = np.array([w != 0 for _, w in atlas], dtype=bool)
        points.append(np.array([lam for lam, _ in atlas], dtype=complex)[in_spectrum])
    return np.concatenate(points)


def range_inclusion_check(s, report, grid=None, config=None):
    """Is every sampled spectrum point within range_tol of phi(closed disk)?

    For degree <= 1 the image is a solid ellipse equal to the spectrum, and the
    reverse inclusion is checked too.
    """
    config = resolve_config(config)
    grid = config.range_grid if grid is None else grid
    if s.degree > 2:
        raise UnsupportedDegree(f'range inclusion is only asserted for degree <= 2, got {s.degree}')
    radius = np.linspace(0.0, 1.0, grid)
    theta = 2 * np.pi * np.arange(4 * grid) / (4 * grid)
    disk = (radius[:, None] * np.exp(1j * theta)[None, :]).ravel()
    image = s.phi(disk)
    tree = cKDTree(np.column_stack([image.real, image.imag]))
    points = spectrum_points(report)
    distance, _ = tree.query(np.column_stack([points.real, points.imag]))
    worst = float(distance.max()) if len(distance) else 0.0

    reverse = None
    if s.degree <= 1:
        interior = s.phi((radius[radius < 0.98][:, None] * np.exp(1j * theta[::8])[None, :]).ravel())
        batch = classify_batch(s, interior, config)
        reverse = bool(np.all(batch.codes != KIND_CODES[PointKind.RESOLVENT]))
    return RangeInclusion(worst <= config.range_tol, worst, len(points), reverse)
