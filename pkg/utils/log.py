"""Hierarchical run logger.

`enter(name)` nests a logger under the current path (bergman.isolated.enumerate)
and records the span's wall-clock milliseconds as a `dur_<path>` extra.
Records and extras land in every open LogCollector, which is what
`result_dir/<run>/logs.json` is written from.
"""
import datetime
import logging
import time
from contextlib import contextmanager
from functools import wraps

WARN = logging.WARN

# stdout is reserved for artifacts; logging.basicConfig writes to stderr
logging.basicConfig(level=logging.INFO, format='%(levelname)s:%(name)s: %(message)s')


def _now():
    return datetime.datetime.now(datetime.timezone.utc).replace(tzinfo=None).isoformat() + 'Z'


class Singleton(type):
    _instances = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super(Singleton, cls).__call__(*args, **kwargs)
        return cls._instances[cls]


class Logger(metaclass=Singleton):
    def __init__(self):
        self.paths = ['bergman']
        self.level = logging.INFO
        self.collectors = []

    @property
    def path(self):
        return '.'.join(self.paths)

    def logger(self):
        logger = logging.getLogger(self.path)
        logger.setLevel(self.level)
        return logger

    def set_level(self, level):
        self.level = level

    @contextmanager
    def layer(self, name):
        self.paths.append(name)
        path, start = self.path, time.perf_counter()
        try:
            yield
        finally:
            self.paths.pop()
            key = 'dur_' + path.replace('.', '__')
            self.add(key, int((time.perf_counter() - start) * 1000))

    def log(self, level, msg):
        self.logger().log(getattr(logging, level.upper()), msg)
        record = {'level': level, 'path': self.path, 'message': f'{msg}', 'time': _now()}
        for logs in self.collectors:
            logs.setdefault('logs', []).append(record)

    def add(self, key, value):
        """Sum `value` into the extra `key` of every open collector."""
        for logs in self.collectors:
            logs[key] = logs.get(key, 0) + value


class LogCollector():
    """Collects log records and extras emitted inside the `with` block."""

    def __init__(self):
        self.logs = {}

    def __enter__(self):
        Logger().collectors.append(self.logs)
        return self

    def __exit__(self, type, value, traceback):
        Logger().collectors.pop()


def enter(name):
    """Decorator running the function inside the sub logger `name`.

    Example:
        @enter('isolated')
        def isolated_points(...):
            enumerate_lambda(...)  # logs as bergman.isolated.enumerate
    """
    def decorate(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            with Logger().layer(name):
                return func(*args, **kwargs)
        return wrapper
    return decorate


def set_level(level):
    Logger().set_level(level)


def debug(msg):
    Logger().log('debug', msg)


def info(msg):
    Logger().log('info', msg)


def warning(msg):
    Logger().log('warning', msg)


def error(msg):
    Logger().log('error', msg)
