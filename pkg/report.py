"""SpectralReport assembly and serialization (JSON, CSV, markdown)."""
import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from spectral import (hyponormal_screen, invertible, range_inclusion_check, weyl_report)
from utils import log
from utils.config import resolve_config
from utils.errors import BergmanError, ValidationFailed
from utils.utils import complex_pair, complex_pairs

SCHEMA_VERSION = 'bergman-spectra/v1'
HARDY_NOTE = ('On the Hardy space the spectrum of T_phi is the essential curve phi(circle) together with '
              'the points of nonzero winding. The Bergman spectrum adds the isolated eigenvalues: '
              'sigma_Bergman = sigma_Hardy union Lambda.')
REPORTED_TOLERANCES = (
    'root_residual_tol', 'boundary_band', 'eigen_condition_tol', 'indeterminacy_band',
    'multiple_zero_tol', 'dedup_tol', 'tail_margin', 'arg_samples', 'n_cap',
    'screen_margin', 'range_tol',
)


NUMBER = (int, float)
NULL = type(None)

# Top-level keys of every published document and their JSON types, by schema kind.
DOCUMENT_KEYS = {
    'report': {'symbol': dict, 'essential_samples': list, 'lambda_set': list, 'winding_atlas': list,
               'weyl': dict, 'hardy_relation_note': str, 'truncation': dict, 'tolerances': dict,
               'verdicts': dict},
    'classify': {'lambda': list, 'kind': str, 'winding': (int, NULL), 'certificate': (dict, NULL),
                 'reason': str, 'beyond_enumeration': bool},
    'invertible': {'invertible': bool, 'clause': str, 'witness': str, 'zero': (list, NULL), 'n': (int, NULL)},
    'weyl': {'omega': dict, 'pi00': list, 'holds': bool, 'conditional': bool, 'complete': bool, 'n_max': int},
    'construct': {'params': dict, 'checks': list, 'certificate': dict, 'passed': bool},
    'sweep': {'rows': list},
    'isolated': {'lambda_set': list, 'complete': bool, 'gap_radius': NUMBER, 'n_detect': int, 'tail_ok': bool,
                 'reason': str, 'n_max': (int, NULL), 'continuation': list, 'unresolved_ring': list},
    'raster': {'bbox': list, 'width': int, 'height': int, 'rows': list, 'marks': list,
               'essential_samples': list, 'metadata': dict},
    'raster-file': {'out': str, 'bytes': int, 'counts': dict, 'marks': list},
    'matrix': {'lambda': list, 'section_size': int, 'series': dict, 'residual': NUMBER, 'eigenvalues': list},
    'radial': {'spectrum': list, 'omega': list, 'pi00': list, 'weyl_theorem_holds': bool, 'note': str},
    'hyponormal': {'verdict': str, 'min_modulus': NUMBER, 'theta': NUMBER},
    'selftest': {'results': list, 'passed': bool},
    'error': {'error': str, 'message': str},
}


def schema(kind):
    return f'{SCHEMA_VERSION}/{kind}'


def _typed(value, types):
    types = types if isinstance(types, tuple) else (types,)
    if isinstance(value, bool):
        return bool in types
    return isinstance(value, types)


def check_document(doc):
    """Kind of a parsed document; ValidationFailed unless it matches its published keys."""
    tag = doc.get('schema', '') if isinstance(doc, dict) else ''
    prefix = SCHEMA_VERSION + '/'
    kind = tag[len(prefix):] if tag.startswith(prefix) else None
    if kind not in DOCUMENT_KEYS:
        raise ValidationFailed(f'unknown document schema {tag!r}')
    expected = DOCUMENT_KEYS[kind]
    keys = set(doc) - {'schema'}
    if keys != set(expected):
        raise ValidationFailed(f'{tag}: missing {sorted(set(expected) - keys)}, '
                               f'unexpected {sorted(keys - set(expected))}')
    wrong = [key for key, types in expected.items() if not _typed(doc[key], types)]
    if wrong:
        raise ValidationFailed(f'{tag}: wrong type for {", ".join(sorted(wrong))}')
    return kind


def dumps(payload):
    """Deterministic JSON text: sorted keys, compact separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, separators=(',', ':')) + '\n'


@dataclass
class SpectralReport:
    symbol: object
    essential_samples: np.ndarray
    lambda_set: tuple
    winding_atlas: tuple
    weyl: object
    hardy_relation_note: str
    truncation: dict
    tolerances: dict
    verdicts: dict = field(default_factory=dict)

    @property
    def pi00(self):
        return tuple(c.lam for c in self.lambda_set)

    def to_json(self):
        return {
            'schema': schema('report'),
            'symbol': self.symbol.to_json(),
            'essential_samples': complex_pairs(self.essential_samples),
            'lambda_set': [c.to_json() for c in self.lambda_set],
            'winding_atlas': [[*complex_pair(lam), w] for lam, w in self.winding_atlas],
            'weyl': {
                'pi00': complex_pairs(self.weyl.pi00),
                'weyl_theorem_holds': self.weyl.holds,
                'conditional': self.weyl.conditional,
                'winding_regions': {str(w): n for w, n in sorted(self.weyl.winding_regions.items())},
            },
            'hardy_relation_note': self.hardy_relation_note,
            'truncation': self.truncation,
            'tolerances': self.tolerances,
            'verdicts': self.verdicts,
        }


def _verdict(func, *args):
    try:
        return func(*args).to_json()
    except BergmanError as e:
        return {'error': type(e).__name__, 'message': str(e)}


@log.enter('analyze')
def build_report(s, n_max=None, config=None):
    config = resolve_config(config)
    n_max = config.n_max if n_max is None else n_max
    weyl = weyl_report(s, n_max, config)
    enumeration = weyl.enumeration
    report = SpectralReport(
        symbol=s,
        essential_samples=weyl.essential_samples,
        lambda_set=enumeration.certificates,
        winding_atlas=weyl.atlas,
        weyl=weyl,
        hardy_relation_note=HARDY_NOTE,
        truncation={'n_max': n_max, 'complete': enumeration.complete, 'reason': enumeration.reason},
        tolerances={key: config[key] for key in REPORTED_TOLERANCES},
    )
    report.verdicts['invertible'] = _verdict(invertible, s, config)
    report.verdicts['hyponormal'] = _verdict(hyponormal_screen, s, None, config)
    if s.degree <= 2:
        report.verdicts['range_inclusion'] = _verdict(range_inclusion_check, s, report, None, config)
    log.info(f'report: {len(report.lambda_set)} point(s) in Lambda, '
             f'Weyl theorem holds={weyl.holds} (conditional={weyl.conditional})')
    return report


def essential_frame(report):
    samples = np.asarray(report.essential_samples)
    theta = 2 * np.pi * np.arange(len(samples)) / max(len(samples), 1)
    return pd.DataFrame({'theta': theta, 're': samples.real, 'im': samples.imag})


def lambda_frame(report):
    rows = [{'re': c.lam.real, 'im': c.lam.imag, 'branch': c.branch.value, 'max_n': c.max_n,
             'zeros': len(c.zeros), 'winding': c.winding} for c in report.lambda_set]
    return pd.DataFrame(rows, columns=['re', 'im', 'branch', 'max_n', 'zeros', 'winding'])


def to_csv(report, table='lambda'):
    if table == 'lambda':
        frame = lambda_frame(report)
    elif table == 'essential':
        frame = essential_frame(report)
    else:
        raise ValueError(f'unknown table {table!r}')
    return frame.to_csv(index=False, float_format='%.17g', lineterminator='\n')


def summary_table(report):
    """Markdown summary of Lambda, one row per certified point."""
    frame = lambda_frame(report)
    if frame.empty:
        return f'Lambda is empty (n_max = {report.truncation["n_max"]}, complete = {report.truncation["complete"]})'
    return frame.to_markdown(index=False, floatfmt='.12g')
