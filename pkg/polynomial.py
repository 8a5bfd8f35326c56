"""Dense complex polynomials and certified root finding.

Coefficients are stored in ascending order (index i holds the coefficient of
z^i), the same convention as `numpy.polynomial.polynomial`.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from utils import log
from utils.config import max_iterations, resolve_config
from utils.errors import DegreeMismatch, InvalidParams, NonConvergence, ZeroPolynomial

EXACT_MATCH_DEGREE = 12
POLISH_STEPS = 3
# angle offset of the Aberth starting circle, keeps guesses off symmetry axes
START_ANGLE = 0.7


class DiskPosition(str, Enum):
    INSIDE = 'INSIDE'
    ON_CIRCLE = 'ON_CIRCLE'
    OUTSIDE = 'OUTSIDE'


def disk_position(z, band):
    modulus = abs(z)
    if abs(modulus - 1.0) <= band:
        return DiskPosition.ON_CIRCLE
    return DiskPosition.INSIDE if modulus < 1.0 else DiskPosition.OUTSIDE


def format_complex(c):
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    sign = '+' if c.imag > 0 else '-'
    return f'{c.real!r}{sign}{abs(c.imag)!r}i'


def parse_complex(text):
    text = text.strip().replace(' ', '')
    if not text:
        raise InvalidParams('empty coefficient')
    try:
        return complex(text.replace('i', 'j'))
    except ValueError:
        raise InvalidParams(f'cannot parse coefficient {text!r}')


@dataclass(frozen=True, eq=False)
class ComplexPoly:
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).ravel().copy()
        nonzero = np.flatnonzero(coeffs)
        coeffs = coeffs[:nonzero[-1] + 1] if nonzero.size else np.zeros(1, dtype=complex)
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def from_text(cls, text):
        """Parse `1,-1,1` (ascending) or `0.5+2i,-1e-3i`."""
        return cls([parse_complex(part) for part in text.split(',')])

    def to_text(self):
        return ','.join(format_complex(c) for c in self.coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0

    def derivative(self):
        if self.degree == 0:
            return ComplexPoly([0])
        return ComplexPoly(npoly.polyder(self.coeffs))

    def shift(self, m):
        """Multiply by z^m."""
        return ComplexPoly(np.concatenate([np.zeros(m, dtype=complex), self.coeffs]))

    def __call__(self, z):
        value = npoly.polyval(z, self.coeffs)
        return complex(value) if np.ndim(value) == 0 else value

    def __add__(self, other):
        return ComplexPoly(npoly.polyadd(self.coeffs, _coeffs_of(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return ComplexPoly(npoly.polysub(self.coeffs, _coeffs_of(other)))

    def __rsub__(self, other):
        return ComplexPoly(npoly.polysub(_coeffs_of(other), self.coeffs))

    def __mul__(self, other):
        return ComplexPoly(npoly.polymul(self.coeffs, _coeffs_of(other)))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ComplexPoly) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f'ComplexPoly({self.to_text()})'


def _coeffs_of(other):
    if isinstance(other, ComplexPoly):
        return other.coeffs
    return np.atleast_1d(np.asarray(other, dtype=complex))


def eval_with_derivative(P, z):
    """(P(z), P'(z)) by one Horner pass."""
    value = 0j
    derivative = 0j
    for c in P.coeffs[::-1]:
        derivative = derivative * z + value
        value = value * z + c
    return complex(value), complex(derivative)


@dataclass(frozen=True)
class Root:
    location: complex
    multiplicity: int
    residual: float
    position: DiskPosition

    def to_json(self):
        return {
            'location': [self.location.real, self.location.imag],
            'multiplicity': self.multiplicity,
            'residual': self.residual,
            'position': self.position.value,
        }


@dataclass(frozen=True)
class RootSet:
    roots: tuple

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def degree(self):
        return sum(r.multiplicity for r in self.roots)

    def expanded(self):
        """Locations repeated by multiplicity."""
        return np.array([r.location for r in self.roots for _ in range(r.multiplicity)], dtype=complex)

    def at(self, position):
        return [r for r in self.roots if r.position is position]

    @property
    def inside(self):
        return sum(r.multiplicity for r in self.at(DiskPosition.INSIDE))

    @property
    def on_circle(self):
        return bool(self.at(DiskPosition.ON_CIRCLE))

    def to_json(self):
        return [r.to_json() for r in self.roots]


def backward_residual(coeffs, z):
    """|P(z)| relative to the coefficient scale sum_i |c_i| max(1, |z|)^i."""
    coeffs = np.asarray(coeffs)
    z = np.asarray(z)
    powers = np.maximum(1.0, np.abs(z))[..., None] ** np.arange(coeffs.shape[-1])
    scale = np.sum(np.abs(coeffs)[..., None, :] * powers, axis=-1) if coeffs.ndim > 1 \
        else powers @ np.abs(coeffs)
    value = _polyval_rows(coeffs, z)
    return np.abs(value) / scale


def _polyval_rows(coeffs, z):
    """Row-wise Horner: coeffs (B, d+1), z (B, m) -> (B, m). 1-D coeffs broadcast."""
    if coeffs.ndim == 1:
        return npoly.polyval(z, coeffs)
    value = np.zeros(z.shape, dtype=complex)
    for i in range(coeffs.shape[-1] - 1, -1, -1):
        value = value * z + coeffs[:, i:i + 1]
    return value


def _polyval_der_rows(coeffs, z):
    value = np.zeros(z.shape, dtype=complex)
    derivative = np.zeros(z.shape, dtype=complex)
    for i in range(coeffs.shape[-1] - 1, -1, -1):
        derivative = derivative * z + value
        value = value * z + coeffs[:, i:i + 1]
    return value, derivative


def _starting_guesses(monic):
    batch, d1 = monic.shape
    d = d1 - 1
    exponents = 1.0 / (d - np.arange(d))
    radius = np.max(np.abs(monic[:, :d]) ** exponents, axis=1)
    radius = np.where(radius > 0, radius, 1.0)
    angles = 2 * np.pi * np.arange(d) / d + START_ANGLE
    return radius[:, None] * np.exp(1j * angles)[None, :]


def aberth(coeffs, max_iter):
    """Aberth-Ehrlich iteration on each row of `coeffs` (B, d+1), d >= 1.

    Each root freezes once its correction drops below a few ulps, so a row's
    result depends only on that row.

    Returns:
        (roots (B, d), converged (B,) bool)
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    d = coeffs.shape[1] - 1
    monic = coeffs / coeffs[:, -1:]
    if d == 1:
        return -monic[:, :1], np.ones(len(coeffs), dtype=bool)

    z = _starting_guesses(monic)
    active = np.ones(z.shape, dtype=bool)
    off_diagonal = ~np.eye(d, dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        if not active.any():
            break
        rows = np.flatnonzero(active.any(axis=1))
        zr = z[rows]
        value, derivative = _polyval_der_rows(monic[rows], zr)
        diff = zr[:, :, None] - zr[:, None, :]
        with np.errstate(divide='ignore', invalid='ignore'):
            inverse = np.where(off_diagonal & (diff != 0), 1.0 / diff, 0)
            pull = inverse.sum(axis=2)
            denominator = derivative - value * pull
            delta = np.where(denominator != 0, value / denominator, 0)
        # a zero denominator with a nonzero value means a stalled guess; nudge it
        stalled = (denominator == 0) & (value != 0)
        delta = np.where(stalled, -1e-3 * (1 + np.abs(zr)) * np.exp(1j * START_ANGLE), delta)
        step = np.where(active[rows], delta, 0)
        z[rows] = zr - step
        small = np.abs(step) <= 4 * eps * np.maximum(1.0, np.abs(z[rows]))
        active[rows] &= ~(small | (value == 0))
    return z, ~active.any(axis=1)


def _cluster(locations, tol):
    """Union-find over pairs closer than tol; returns groups of indices in first-seen order."""
    parent = list(range(len(locations)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(locations)):
        for j in range(i + 1, len(locations)):
            if abs(locations[i] - locations[j]) < tol:
                parent[find(j)] = find(i)
    groups = {}
    for i in range(len(locations)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _polish(P, z):
    best, best_value = z, abs(P(z))
    for _ in range(POLISH_STEPS):
        value, derivative = eval_with_derivative(P, best)
        if derivative == 0 or value == 0:
            break
        candidate = best - value / derivative
        candidate_value = abs(P(candidate))
        if candidate_value >= best_value:
            break
        best, best_value = candidate, candidate_value
    return best


def assemble_roots(P, raw, config):
    """Cluster, polish and certify raw root estimates of P."""
    roots = []
    for group in _cluster(raw, config.cluster_tol):
        location = complex(np.mean(raw[group]))
        if len(group) == 1:
            location = _polish(P, location)
        residual = float(backward_residual(P.coeffs, location))
        if residual > config.root_residual_tol:
            raise NonConvergence(
                f'root {location:.6g} of a degree-{P.degree} polynomial has residual {residual:.3g}')
        roots.append(Root(location, len(group), residual, disk_position(location, config.boundary_band)))
    roots.sort(key=lambda r: (abs(r.location), r.location.real, r.location.imag))
    return RootSet(tuple(roots))


def find_roots(P, config=None):
    config = resolve_config(config)
    if P.is_zero:
        raise ZeroPolynomial('the zero polynomial has no finite root set')
    if P.degree == 0:
        return RootSet(())
    raw, converged = aberth(P.coeffs[None, :], max_iterations(config))
    if not converged[0]:
        log.debug(f'Aberth hit the iteration cap on {P!r}; checking residuals anyway')
    return assemble_roots(P, raw[0], config)


def find_roots_batch(coeffs, config=None):
    """Roots of many same-degree polynomials; rows are (d+1) ascending coefficients.

    Returns (roots (B, d), ok (B,)) where ok marks rows whose every raw root
    meets the residual tolerance. Clustering is not applied.
    """
    config = resolve_config(config)
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[1] < 2:
        return np.zeros((len(coeffs), 0), dtype=complex), np.ones(len(coeffs), dtype=bool)
    roots, _ = aberth(coeffs, max_iterations(config))
    residuals = backward_residual(coeffs, roots)
    return roots, np.all(residuals <= config.root_residual_tol, axis=1)


def count_in_disk(P, config=None):
    """(number of zeros strictly inside the unit disk, whether any sits on the circle)."""
    roots = find_roots(P, config)
    return roots.inside, roots.on_circle


@dataclass(frozen=True)
class RootPairing:
    pairs: tuple
    approximate: bool

    @property
    def total_distance(self):
        return float(sum(d for _, _, d in self.pairs))

    @property
    def max_distance(self):
        return float(max((d for _, _, d in self.pairs), default=0.0))


def _greedy_pairs(cost):
    n = len(cost)
    assignment = -np.ones(n, dtype=int)
    taken = np.zeros(n, dtype=bool)
    for flat in np.argsort(cost, axis=None, kind='stable'):
        i, j = divmod(int(flat), n)
        if assignment[i] < 0 and not taken[j]:
            assignment[i] = j
            taken[j] = True
    improved = True
    while improved:
        improved = False
        for a in range(n):
            for b in range(a + 1, n):
                ja, jb = assignment[a], assignment[b]
                if cost[a, jb] + cost[b, ja] < cost[a, ja] + cost[b, jb] - 1e-15:
                    assignment[a], assignment[b] = jb, ja
                    improved = True
    return assignment


def match_roots(A, B):
    """Minimal total distance bijection between two multiplicity-expanded root lists."""
    a = A.expanded() if isinstance(A, RootSet) else np.asarray(A, dtype=complex)
    b = B.expanded() if isinstance(B, RootSet) else np.asarray(B, dtype=complex)
    if len(a) != len(b):
        raise DegreeMismatch(f'cannot pair {len(a)} roots with {len(b)} roots')
    cost = np.abs(a[:, None] - b[None, :])
    if len(a) <= EXACT_MATCH_DEGREE:
        rows, cols = linear_sum_assignment(cost)
        approximate = False
    else:
        rows, cols = np.arange(len(a)), _greedy_pairs(cost)
        approximate = True
    pairs = tuple((int(i), int(j), float(cost[i, j])) for i, j in zip(rows, cols))
    return RootPairing(pairs, approximate)
