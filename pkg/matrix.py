"""Finite sections and power-series eigenvectors, an oracle independent of root finding.

Basis: e_n = sqrt(n + 1) z^n is orthonormal for the normalized area measure,
so a Taylor coefficient c_n is the coordinate c_n / sqrt(n + 1).
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.sparse

from utils import log
from utils.config import resolve_config
from utils.errors import InvalidParams, NonConvergence, SizeMismatch
from utils.utils import complex_pair, complex_pairs

MAX_DENSE = 2000
# coefficients are rescaled to 1 once they exceed RESCALE
RESCALE = 1e100


@dataclass(frozen=True, eq=False)
class FiniteSection:
    """N x N banded truncation; diagonals[offset] holds the entries (i, i + offset)."""
    size: int
    diagonals: dict
    tag: str = ''

    @property
    def offsets(self):
        return sorted(self.diagonals)

    @property
    def matrix(self):
        offsets = self.offsets
        return scipy.sparse.diags([self.diagonals[o] for o in offsets], offsets,
                                  shape=(self.size, self.size), format='csr', dtype=complex)

    def to_dense(self):
        return self.matrix.toarray()

    def entry(self, i, j):
        values = self.diagonals.get(j - i)
        if values is None:
            return 0j
        return complex(values[min(i, j)])

    @property
    def triangular(self):
        return all(o >= 0 for o in self.offsets) or all(o <= 0 for o in self.offsets)

    def bandwidth_below(self):
        return -min(min(self.offsets), 0)


def build_section(s, N):
    """T_{conj(z) + p} on span{e_0, ..., e_{N-1}}."""
    if N < 2:
        raise InvalidParams(f'section size must be at least 2, got {N}')
    n = np.arange(1, N)
    diagonals = {1: np.sqrt(n / (n + 1)).astype(complex)}
    for m, pm in enumerate(s.p.coeffs[:N]):
        cols = np.arange(N - m)
        entries = pm * np.sqrt((cols + 1) / (cols + m + 1))
        diagonals[-m] = diagonals.get(-m, 0) + entries
    return FiniteSection(N, diagonals, s.p.to_text())


def radial_weights(r, N):
    n = np.arange(1, N)
    return np.sqrt(n * (n + 1)) * 2 * r ** (2 * n + 1) / (2 * n + 1)


def radial_shift_section(r, N):
    """Backward weighted shift of the symbol chi_{|z|<r} conj(z)/|z|; compact, nilpotent sections."""
    if not 0 < r < 1:
        raise InvalidParams(f'radius must lie in (0, 1), got {r}')
    if N < 2:
        raise InvalidParams(f'section size must be at least 2, got {N}')
    return FiniteSection(N, {1: radial_weights(r, N).astype(complex)}, f'radial r={r}')


@dataclass(frozen=True)
class RadialWeylSummary:
    spectrum: tuple
    omega: tuple
    pi00: tuple
    holds: bool
    note: str

    def to_json(self):
        return {
            'spectrum': complex_pairs(self.spectrum),
            'omega': complex_pairs(self.omega),
            'pi00': complex_pairs(self.pi00),
            'weyl_theorem_holds': self.holds,
            'note': self.note,
        }


def radial_weyl_summary(r, N=64):
    """Weyl data of the radial shift read off a nilpotent section with nonzero weights.

    The operator is compact, so omega = {0}. sigma is {0} together with the
    section eigenvalues, and 0 belongs to pi00 when it is isolated there with a
    kernel of finite dimension (one plus the number of vanishing weights).
    """
    section = radial_shift_section(r, N)
    eigenvalues = section_eigenvalues(section)
    weights = section.diagonals[1]
    kernel = 1 + int(np.count_nonzero(weights == 0))
    spectrum = tuple(sorted({complex(z) for z in eigenvalues} | {0j}, key=lambda z: (z.real, z.imag)))
    if spectrum != (0j,):
        log.warning(f'radial shift r={r} section is not nilpotent: {len(spectrum)} distinct eigenvalues')
    omega = (0j,)
    pi00 = (0j,) if spectrum == (0j,) and kernel < N else ()
    difference = tuple(z for z in spectrum if z not in pi00)
    holds = set(difference) == set(omega)
    return RadialWeylSummary(spectrum, omega, pi00, holds,
                             f'compact operator: omega = {{0}}; 0 is an isolated eigenvalue with a '
                             f'{kernel}-dimensional kernel, so sigma minus pi00 is '
                             f'{"empty" if not difference else "nonempty"} and '
                             f'{"equals" if holds else "differs from"} omega')


class SeriesVerdict(str, Enum):
    DECAYING = 'DECAYING'
    GROWING = 'GROWING'
    UNDECIDED = 'UNDECIDED'


@dataclass(frozen=True, eq=False)
class SeriesEigenvector:
    """Taylor coefficients c_j = coeffs[j] * exp(log_scale)."""
    lam: complex
    coeffs: np.ndarray
    log_scale: float
    growth_ratio: float
    verdict: SeriesVerdict

    @property
    def length(self):
        return len(self.coeffs) - 1

    def taylor(self):
        with np.errstate(over='ignore', under='ignore'):
            return self.coeffs * np.exp(self.log_scale)

    def to_json(self):
        return {
            'lambda': complex_pair(self.lam),
            'length': self.length,
            'growth_ratio': self.growth_ratio,
            'verdict': self.verdict.value,
            'log_scale': self.log_scale,
        }


def series_coefficients(s, lam, M):
    """c_{j+1} = -((j+2)/(j+1)) sum_{m <= min(k, j)} q_m c_{j-m}, q = p - lambda, c_0 = 1."""
    q = (s.p - lam).coeffs
    k = len(q) - 1
    c = np.zeros(M + 1, dtype=complex)
    c[0] = 1
    log_scale = 0.0
    for j in range(M):
        width = min(k, j)
        window = c[j - width:j + 1][::-1]
        c[j + 1] = -((j + 2) / (j + 1)) * np.dot(q[:width + 1], window)
        size = abs(c[j + 1])
        if size > RESCALE:
            c[:j + 2] /= size
            log_scale += np.log(size)
    return c, log_scale


def growth_ratio(c):
    """Per-term growth from the max-norms of the last two windows of min(100, M/4) terms."""
    M = len(c) - 1
    L = max(1, min(100, M // 4))
    last = np.max(np.abs(c[M - L + 1:]))
    previous = np.max(np.abs(c[M - 2 * L + 1:M - L + 1]))
    if last == 0:
        return 0.0
    if previous == 0:
        return np.inf
    return float((last / previous) ** (1.0 / L))


def series_eigenvector(s, lam, M=None, config=None, retry=True):
    config = resolve_config(config)
    M = config.series_length if M is None else M
    if M < 50:
        raise InvalidParams(f'series length must be at least 50, got {M}')
    c, log_scale = series_coefficients(s, lam, M)
    ratio = growth_ratio(c)
    if ratio < 1 - config.series_margin:
        verdict = SeriesVerdict.DECAYING
    elif ratio > 1 + config.series_margin:
        verdict = SeriesVerdict.GROWING
    else:
        verdict = SeriesVerdict.UNDECIDED
    if verdict is SeriesVerdict.UNDECIDED and retry:
        log.debug(f'series verdict undecided at M={M} (ratio {ratio:.4f}); retrying at {2 * M}')
        return series_eigenvector(s, lam, 2 * M, config, retry=False)
    return SeriesEigenvector(complex(lam), c, float(log_scale), ratio, verdict)


def residual(section, v):
    """||(A - lambda I) c_hat|| / ||c_hat|| over rows clear of the truncation edge."""
    k = section.bandwidth_below()
    N = section.size
    if N > v.length - k:
        raise SizeMismatch(f'section size {N} needs a series of length at least {N + k}, got {v.length}')
    c_hat = v.coeffs[:N] / np.sqrt(np.arange(1, N + 1))
    norm = np.linalg.norm(c_hat)
    if norm == 0:
        raise SizeMismatch('series coefficients vanish on the section')
    c_hat = c_hat / norm
    y = section.matrix @ c_hat - v.lam * c_hat
    rows = N - max(k, 1)
    return float(np.linalg.norm(y[:rows]))


def section_eigenvalues(section):
    """Eigenvalues ordered by (re, im); exact diagonal for triangular sections."""
    if section.size > MAX_DENSE:
        raise InvalidParams(f'dense eigenvalues are limited to N <= {MAX_DENSE}, got {section.size}')
    if section.triangular:
        values = section.diagonals.get(0, np.zeros(section.size, dtype=complex))
        values = np.asarray(values, dtype=complex)
    else:
        try:
            values = scipy.linalg.eigvals(section.to_dense())
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise NonConvergence(f'eigenvalue iteration failed on a {section.size}-section: {e}')
    order = np.lexsort((values.imag, values.real))
    return values[order]
