import json
import multiprocessing
import os
import time

import numpy as np
from tqdm import tqdm


class ArgDict(dict):
    def __init__(self, *args, **kwargs):
        super(ArgDict, self).__init__(*args, **kwargs)
        self.__dict__ = self


class ResidualMeter(object):
    """Tracks the worst of a stream of residuals and how many were seen."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.worst = 0.0
        self.count = 0

    def update(self, val):
        val = float(val)
        self.worst = max(self.worst, val)
        self.count += 1
        return self

    def within(self, tol):
        return self.worst < tol


class Timer(object):
    """Computes elapsed time."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.start = time.time()
        return self

    def time(self):
        return time.time() - self.start


def parallel_map(func, items, workers=1, desc=None, progress=True):
    """Ordered map over `items`, optionally on a process pool.

    Results come back in input order whatever the worker count, so callers
    that merge by index stay deterministic. `func` must be picklable when
    workers > 1.
    """
    items = list(items)
    bar = dict(total=len(items), desc=desc, disable=not progress or len(items) < 2, leave=False)
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in tqdm(items, **bar)]
    with multiprocessing.Pool(min(workers, len(items))) as pool:
        return list(tqdm(pool.imap(func, items), **bar))


def complex_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_pairs(values):
    return [complex_pair(z) for z in np.ravel(values)]


def from_pairs(pairs):
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def dump_result(config, name, text):
    """Write an artifact and the run's collected logs under result_dir/run_name/."""
    run_dir = os.path.join(config.result_dir, config.run_name)
    os.makedirs(run_dir, exist_ok=True)
    mode = 'wb' if isinstance(text, bytes) else 'w'
    with open(os.path.join(run_dir, name), mode) as fp:
        fp.write(text)
    return run_dir


def dump_log(config, logs):
    log_path = os.path.join(config.result_dir, config.run_name, 'logs.json')
    os.makedirs(os.path.dirname(log_path), exist_ok=True)
    result = {}
    if os.path.isfile(log_path):
        with open(log_path) as fp:
            result = json.load(fp)
    result.setdefault(config.command, []).append(logs)
    with open(log_path, 'w') as fp:
        json.dump(result, fp)
