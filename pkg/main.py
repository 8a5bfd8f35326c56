import argparse
import json
import re
import sys
from datetime import datetime
from pathlib import Path

import pandas as pd

from constructions import (build_counterexample, isolated_points, params_from_json, sweep,
                           verify_construction)
from matrix import (MAX_DENSE, build_section, radial_weyl_summary, residual, section_eigenvalues,
                    series_eigenvector)
from polynomial import parse_complex
from raster import rasterize
from render import FORMATS as RASTER_FORMATS
from render import get_renderer
from report import build_report, check_document, dumps, schema, summary_table, to_csv
from selftest import CRITERIA, check
from selftest import run_selftest as run_suite
from spectral import (HarmonicSymbol, classify_point, hyponormal_screen, invertible, weyl_report)
from utils import log
from utils.config import DEFAULTS, env_overrides, load_yaml, validate_config
from utils.errors import BergmanError, InvalidParams
from utils.utils import ArgDict, complex_pair, complex_pairs, dump_log, dump_result

COMMANDS = ('analyze', 'classify', 'invertible', 'weyl', 'construct', 'isolated', 'raster',
            'matrix', 'hyponormal', 'selftest')
FORMATS = ('json', 'csv', 'markdown') + tuple(f for f in RASTER_FORMATS if f != 'json')

KNOB_HELP = {
    'root_residual_tol': 'Relative backward error a root must reach',
    'cluster_tol': 'Distance below which raw roots merge into one multiple root',
    'boundary_band': 'Half-width of the band around |z| = 1 counted as ON_CIRCLE',
    'root_max_iter': 'Aberth iteration cap',
    'precise': 'Multiply the iteration cap by 10',
    'eigen_condition_tol': "Tolerance on z^2 p'(z) = (n+2)/(n+1)",
    'indeterminacy_band': "Band around z^2 p'(z) = 1 reported as Indeterminate",
    'multiple_zero_tol': "|z^2 p'(z) - 1| below which a zero counts as multiple",
    'n_cap': 'Largest n an eigenvalue certificate may use',
    'n_max': 'Largest n enumerated for isolated eigenvalues',
    'dedup_tol': 'Distance below which two enumerated eigenvalues coincide',
    'tail_margin': 'Distance from the circle required of limit roots for completeness',
    'arg_samples': 'Initial samples of the argument-variation winding cross-check',
    'arg_samples_max': 'Sample cap of the winding cross-check',
    'screen_margin': "Margin below 1 for the |p'| hyponormality screen",
    'hyponormal_samples': "Circle samples of the |p'| screen",
    'range_tol': 'Distance tolerance of the numerical range inclusion check',
    'range_grid': 'Radial grid size of the range inclusion check',
    'curve_samples': 'Samples of the essential curve',
    'atlas_resolution': 'Grid size of the winding atlas',
    'series_margin': 'Margin around 1 of the series growth ratio',
    'series_length': 'Series length M',
    'section_size': 'Finite section size N',
    'width': 'Raster width in pixels',
    'height': 'Raster height in pixels',
    'bbox': 'Raster box re_min,re_max,im_min,im_max (auto when unset)',
    'band_pixels': 'Essential band width in half pixel diagonals',
    'band_rows': 'Rows per raster work unit',
    'workers': 'Worker processes for raster, enumeration and sweeps',
    'seed': 'Random seed of randomized checks',
    'format': 'Output format',
    'quiet': 'Only log warnings and disable progress bars',
    'result_dir': 'Directory to save artifacts and logs (off when unset)',
}


class JsonErrorParser(argparse.ArgumentParser):
    """Usage errors become one JSON diagnostic on stderr and exit code 1."""

    def error(self, message):
        sys.stderr.write(json.dumps({'schema': schema('error'), 'error': 'UsageError',
                                     'message': f'{self.prog}: {message}'}) + '\n')
        sys.exit(1)


# values such as -0.5,0.2 or -1,0,1 that argparse would read as options
NEGATIVE_VALUE = re.compile(r'^-[\d.i]')
VALUE_FLAGS = {'--poly', '--label', '--lambda', '--bbox', '--res', '--radial', '--size', '--series',
               '--k', '--n'} | {f'--{key}' for key, default in DEFAULTS.items() if not isinstance(default, bool)}


def attach_values(argv):
    """Rewrite `--flag -value` as `--flag=-value` for flags that take one value."""
    out = []
    for token in argv:
        if out and out[-1] in VALUE_FLAGS and NEGATIVE_VALUE.match(token):
            out[-1] = f'{out[-1]}={token}'
        else:
            out.append(token)
    return out


def _pair(text):
    parts = text.split(',')
    try:
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        if len(parts) == 1:
            return parse_complex(parts[0])
    except (ValueError, InvalidParams):
        pass
    raise argparse.ArgumentTypeError(f'expected re,im or a complex number, got {text!r}')


def _bbox(text):
    try:
        values = tuple(float(v) for v in text.split(','))
    except ValueError:
        values = ()
    if len(values) != 4:
        raise argparse.ArgumentTypeError(f'expected re_min,re_max,im_min,im_max, got {text!r}')
    return values


def _resolution(text):
    try:
        parts = [int(v) for v in text.lower().split('x')]
    except ValueError:
        parts = []
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f'expected W or WxH, got {text!r}')
    return tuple(parts)


def _add_knobs(parser, defaults):
    for key, default in DEFAULTS.items():
        flag = f'--{key}'
        help_ = KNOB_HELP[key] + ' (default: %(default)s)'
        if isinstance(default, bool):
            parser.add_argument(flag, action='store_true', default=defaults[key], help=help_)
        elif key == 'bbox':
            parser.add_argument(flag, type=_bbox, default=defaults[key], help=help_)
        elif key == 'format':
            parser.add_argument(flag, choices=FORMATS, default=defaults[key], help=help_)
        elif key == 'result_dir':
            parser.add_argument(flag, default=defaults[key], help=help_)
        else:
            parser.add_argument(flag, type=type(default), default=defaults[key], help=help_)


def get_config(argv=None):
    argv = attach_values(sys.argv[1:] if argv is None else list(argv))
    parser = JsonErrorParser(
        add_help=False,
        description='certified spectra of Bergman-space Toeplitz operators with symbol conj(z) + p(z)')

    # load params from config file, then environment overrides
    parser.add_argument('-c', '--config', help='Path to configuration file')
    args, _ = parser.parse_known_args(argv)
    defaults = dict(DEFAULTS)
    if args.config:
        defaults.update(load_yaml(args.config))
    defaults.update(env_overrides())

    common = JsonErrorParser(add_help=False)
    common.add_argument('-c', '--config', default=args.config, help='Path to configuration file')
    # symbol input
    common.add_argument('--poly', default='0', help='Ascending coefficients of p, e.g. "0,-1,1" (default: %(default)s)')
    common.add_argument('--label', default='', help='Label attached to the symbol (default: %(default)s)')
    common.add_argument('--stdin', action='store_true', help='Read the symbol from JSON on stdin')
    _add_knobs(common, defaults)

    parser.add_argument('-h', '--help', action='help')
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='{' + ','.join(COMMANDS) + '}')
    sub = {name: subparsers.add_parser(name, parents=[common]) for name in COMMANDS}

    sub['analyze'].add_argument('--table', default='lambda', choices=['lambda', 'essential'],
                                help='Table exported with --format csv (default: %(default)s)')
    sub['classify'].add_argument('--lambda', dest='lam', type=_pair, required=True, help='Point re,im to classify')
    for name in ('construct', 'isolated'):
        sub[name].add_argument('--k', type=int, default=3, help='Degree k >= 3 (default: %(default)s)')
        sub[name].add_argument('--n', type=int, default=1, help='Target n >= 1 (default: %(default)s)')
    sub['construct'].add_argument('--sweep', action='store_true', help='Tabulate identities over --ks x --ns')
    sub['construct'].add_argument('--ks', type=int, nargs='+', default=list(range(3, 11)),
                                  help='k values of the sweep (default: %(default)s)')
    sub['construct'].add_argument('--ns', type=int, nargs='+', default=list(range(1, 6)),
                                  help='n values of the sweep (default: %(default)s)')
    sub['raster'].add_argument('--res', type=_resolution, help='Resolution W or WxH (default: width x height)')
    sub['raster'].add_argument('--out', help='Output path (default: stdout)')
    sub['matrix'].add_argument('--size', type=int, dest='section_size', default=defaults['section_size'],
                               help='Section size N (default: %(default)s)')
    sub['matrix'].add_argument('--series', type=int, dest='series_length', default=defaults['series_length'],
                               help='Series length M (default: %(default)s)')
    sub['matrix'].add_argument('--lambda', dest='lam', type=_pair, default=0j, help='Point re,im (default: 0,0)')
    sub['matrix'].add_argument('--radial', type=float, help='Use the radial shift of radius r instead of the symbol')
    sub['selftest'].add_argument('--only', nargs='+', help='Criteria to run, by name or number (default: all)',
                                 choices=[name for name, _ in CRITERIA] + [str(i) for i in range(1, len(CRITERIA) + 1)])

    args = parser.parse_args(argv)
    config = ArgDict(vars(args))
    return validate_config(config)


def init_env(config):
    if config.quiet:
        log.set_level(log.WARN)
    config.run_name = '{}_{}_{}'.format(
        config.command,
        Path(config.config).stem if config.config else (config.label or 'cli'),
        datetime.now().strftime('%Y%m%d%H%M%S'),
    )
    log.debug(f'Run name: {config.run_name}')
    return config


def read_stdin():
    try:
        return json.load(sys.stdin)
    except json.JSONDecodeError as e:
        raise InvalidParams(f'stdin is not valid JSON: {e}')


def symbol_from_json(data):
    """Accept `construct`, `analyze` or bare symbol documents."""
    if 'params' in data:
        data = data['params']
    if 'symbol' in data:
        data = data['symbol']
    if 'p' in data:
        return HarmonicSymbol.from_json(data)
    if 'k' in data and 'n' in data:
        return params_from_json(data).symbol
    raise InvalidParams('stdin JSON holds no symbol')


def load_symbol(config):
    if config.stdin:
        return symbol_from_json(read_stdin())
    return HarmonicSymbol.from_text(config.poly, config.label)


def load_params(config):
    if config.stdin:
        data = read_stdin()
        data = data.get('params', data)
        if 'k' not in data or 'n' not in data:
            raise InvalidParams('stdin JSON is not a construction (missing k and n)')
        return params_from_json(data)
    return build_counterexample(config.k, config.n, config)
def document(config, payload, kind=None):
    """JSON text of payload under schema `kind` (the command by default), checked against its keys."""
    text = dumps(dict(payload, schema=schema(kind or config.command)))
    check_document(json.loads(text))
    return text


def frame_output(config, frame, kind):
    if config.format == 'csv':
        return frame.to_csv(index=False, float_format='%.17g', lineterminator='\n')
    if config.format == 'markdown':
        return frame.to_markdown(index=False) + '\n'
    return document(config, {'rows': frame.to_dict(orient='records')}, kind)


def run_analyze(config):
    report = build_report(load_symbol(config), config.n_max, config)
    if config.format == 'csv':
        return to_csv(report, config.table)
    if config.format == 'markdown':
        return summary_table(report) + '\n'
    return document(config, report.to_json(), 'report')


def run_classify(config):
    return document(config, classify_point(load_symbol(config), config.lam, config.n_max, config).to_json())


def run_invertible(config):
    return document(config, invertible(load_symbol(config), config).to_json())


def run_weyl(config):
    return document(config, weyl_report(load_symbol(config), config.n_max, config).to_json())


def run_construct(config):
    if config.sweep:
        return frame_output(config, sweep(config.ks, config.ns, config), 'sweep')
    params = build_counterexample(config.k, config.n, config)
    return document(config, verify_construction(params, config).to_json())


def run_isolated(config):
    return document(config, isolated_points(load_params(config), config.n_max, config).to_json())


def run_raster(config):
    fmt = config.format
    if fmt not in RASTER_FORMATS:
        raise InvalidParams(f'raster output must be one of {", ".join(RASTER_FORMATS)}, got {fmt}')
    grid = rasterize(load_symbol(config), config.bbox, config.res, config.n_max, config)
    renderer = get_renderer(fmt, config)
    if config.out:
        size = renderer.save(grid, config.out)
        return document(config, {'out': config.out, 'bytes': size, 'counts': grid.counts(),
                                 'marks': complex_pairs(grid.marks)}, 'raster-file')
    return renderer.render(grid)


def run_matrix(config):
    if config.radial is not None:
        return document(config, radial_weyl_summary(config.radial, config.section_size).to_json(), 'radial')
    s = load_symbol(config)
    section = build_section(s, config.section_size)
    v = series_eigenvector(s, config.lam, config.series_length, config)
    res = residual(section, v)
    eigenvalues = section_eigenvalues(section) if section.size <= MAX_DENSE else []
    log.info(f'N={section.size} M={v.length}: residual {res:.3e}, series {v.verdict.value}')
    if config.format in ('csv', 'markdown'):
        frame = pd.DataFrame({'re': [z.real for z in eigenvalues], 'im': [z.imag for z in eigenvalues]})
        frame['abs'] = (frame['re'] ** 2 + frame['im'] ** 2) ** 0.5
        return frame_output(config, frame, 'matrix')
    return document(config, {
        'lambda': complex_pair(config.lam),
        'section_size': section.size,
        'series': v.to_json(),
        'residual': res,
        'eigenvalues': complex_pairs(eigenvalues),
    })


def run_hyponormal(config):
    return document(config, hyponormal_screen(load_symbol(config), config=config).to_json())


def run_selftest(config):
    results = run_suite(config, config.only)
    if config.format == 'markdown':
        emit(config, results.to_markdown(index=False) + '\n')
    else:
        emit(config, document(config, {'results': results.to_dict(orient='records'),
                                       'passed': bool(results['passed'].all())}))
    check(results)


def emit(config, data):
    if isinstance(data, str):
        data = data.encode('utf-8')
    sys.stdout.buffer.write(data)
    sys.stdout.flush()
    if config.result_dir:
        ext = config.format if config.format != 'markdown' else 'md'
        dump_result(config, f'{config.command}.{ext}', data)


HANDLERS = {
    'analyze': run_analyze,
    'classify': run_classify,
    'invertible': run_invertible,
    'weyl': run_weyl,
    'construct': run_construct,
    'isolated': run_isolated,
    'raster': run_raster,
    'matrix': run_matrix,
    'hyponormal': run_hyponormal,
    'selftest': run_selftest,
}


@log.enter('main')
def main(argv=None):
    config = init_env(get_config(argv))
    with log.LogCollector() as collector:
        try:
            data = HANDLERS[config.command](config)
            if data is not None:
                emit(config, data)
            code = 0
        except BergmanError as e:
            log.error(f'{type(e).__name__}: {e}')
            sys.stderr.write(json.dumps({'schema': schema('error'), 'error': type(e).__name__,
                                         'message': str(e)}) + '\n')
            code = e.exit_code
    if config.result_dir:
        dump_log(config, collector.logs)
    return code


if __name__ == '__main__':
    sys.exit(main())
