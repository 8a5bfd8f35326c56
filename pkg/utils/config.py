import os

import yaml

from utils import log
from utils.errors import InvalidParams
from utils.utils import ArgDict

ENV_PREFIX = 'BERGMAN_'

DEFAULTS = {
    # polynomial
    'root_residual_tol': 1e-11,
    'cluster_tol': 1e-7,
    'boundary_band': 1e-9,
    'root_max_iter': 500,
    'precise': False,
    # spectral
    'eigen_condition_tol': 1e-8,
    'indeterminacy_band': 1e-4,
    'multiple_zero_tol': 1e-6,
    'n_cap': 10000,
    'n_max': 100,
    'dedup_tol': 1e-9,
    'tail_margin': 1e-3,
    'arg_samples': 4096,
    'arg_samples_max': 65536,
    'screen_margin': 1e-9,
    'hyponormal_samples': 256,
    'range_tol': 0.05,
    'range_grid': 256,
    'curve_samples': 2048,
    'atlas_resolution': 32,
    # matrix
    'series_margin': 0.02,
    'series_length': 400,
    'section_size': 200,
    # raster
    'width': 512,
    'height': 512,
    'bbox': None,
    'band_pixels': 1.0,
    'band_rows': 16,
    # run
    'workers': 1,
    'seed': 1337,
    'format': 'json',
    'quiet': False,
    'result_dir': None,
}

_POSITIVE = (
    'root_residual_tol', 'cluster_tol', 'boundary_band', 'eigen_condition_tol',
    'indeterminacy_band', 'multiple_zero_tol', 'dedup_tol', 'tail_margin',
    'series_margin', 'screen_margin', 'range_tol', 'band_pixels',
)


def default_config(**overrides):
    config = ArgDict(DEFAULTS)
    config.update(overrides)
    return config


def resolve_config(config=None):
    """Library entry points accept None, a plain dict or an ArgDict."""
    if config is None:
        return default_config()
    if isinstance(config, ArgDict):
        return config
    merged = default_config()
    merged.update(config)
    return merged


def load_yaml(path):
    with open(path) as fp:
        config = yaml.load(fp, Loader=yaml.SafeLoader) or {}
    if not isinstance(config, dict):
        raise InvalidParams(f'config file {path} must hold a mapping, got {type(config).__name__}')
    unknown = sorted(set(config) - set(DEFAULTS))
    if unknown:
        log.warning(f'Ignoring unknown config keys in {path}: {", ".join(unknown)}')
    return {k: v for k, v in config.items() if k in DEFAULTS}


def _coerce(key, raw):
    value = yaml.safe_load(raw)
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            return bool(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except (TypeError, ValueError):
        raise InvalidParams(f'{ENV_PREFIX}{key.upper()}={raw!r} is not a valid {type(default).__name__}')
    return value


def env_overrides(environ=None):
    environ = os.environ if environ is None else environ
    overrides = {}
    for key in DEFAULTS:
        name = ENV_PREFIX + key.upper()
        if name in environ:
            overrides[key] = _coerce(key, environ[name])
    return overrides


def validate_config(config):
    for key in _POSITIVE:
        if not config[key] > 0:
            raise InvalidParams(f'{key} must be positive, got {config[key]}')
    if config.n_max < 0:
        raise InvalidParams(f'n_max must be non-negative, got {config.n_max}')
    if config.n_cap < 1:
        raise InvalidParams(f'n_cap must be at least 1, got {config.n_cap}')
    if config.arg_samples < 16 or config.arg_samples_max < config.arg_samples:
        raise InvalidParams('arg_samples must be at least 16 and not exceed arg_samples_max')
    for key in ('section_size', 'width', 'height', 'atlas_resolution', 'range_grid', 'band_rows'):
        if config[key] < 2:
            raise InvalidParams(f'{key} must be at least 2, got {config[key]}')
    if config.workers < 1:
        raise InvalidParams(f'workers must be at least 1, got {config.workers}')
    return config


def max_iterations(config):
    return config.root_max_iter * (10 if config.precise else 1)
