"""Pixel classification of the spectral picture.

Pixel centers are classified in fixed row bands so the grid does not depend
on the worker count; certified Lambda points are stamped on top.
"""
from dataclasses import dataclass, field
from enum import IntEnum
from functools import partial

import numpy as np

from spectral import KIND_CODES, PointKind, classify_batch, curve_bbox, enumerate_lambda
from utils import log
from utils.config import resolve_config
from utils.errors import InvalidParams
from utils.utils import parallel_map

MAX_PIXELS = 4096 * 4096


class RasterCode(IntEnum):
    ESSENTIAL_BAND = 0
    FILLED_POSITIVE_WINDING = 1
    EIGEN_REGION = 2
    RESOLVENT = 3
    ISOLATED_MARK = 4
    AMBIGUOUS = 5


# PGM gray level per code
GRAY_LEVELS = {
    RasterCode.ESSENTIAL_BAND: 0,
    RasterCode.FILLED_POSITIVE_WINDING: 96,
    RasterCode.EIGEN_REGION: 160,
    RasterCode.RESOLVENT: 255,
    RasterCode.ISOLATED_MARK: 48,
    RasterCode.AMBIGUOUS: 208,
}

_KIND_TO_CODE = {
    PointKind.ESSENTIAL: RasterCode.ESSENTIAL_BAND,
    PointKind.RESOLVENT: RasterCode.RESOLVENT,
    PointKind.FILLED_WINDING: RasterCode.FILLED_POSITIVE_WINDING,
    PointKind.EIGEN_REGION_INDEX_POSITIVE: RasterCode.EIGEN_REGION,
    # isolated eigenvalues are stamped from the enumeration, not from pixels
    PointKind.ISOLATED_EIGEN: RasterCode.RESOLVENT,
    PointKind.AMBIGUOUS: RasterCode.AMBIGUOUS,
}
_LUT = np.zeros(len(KIND_CODES), dtype=np.uint8)
for _kind, _code in KIND_CODES.items():
    _LUT[_code] = _KIND_TO_CODE[_kind]


@dataclass(frozen=True, eq=False)
class RasterGrid:
    bbox: tuple
    width: int
    height: int
    cells: np.ndarray
    metadata: dict
    marks: tuple = ()
    essential_samples: np.ndarray = field(default=None, repr=False)

    @property
    def pixel_size(self):
        re_min, re_max, im_min, im_max = self.bbox
        return (re_max - re_min) / self.width, (im_max - im_min) / self.height

    def counts(self):
        values = np.bincount(self.cells.ravel(), minlength=len(RasterCode))
        return {code.name: int(values[code]) for code in RasterCode}

    def pixel_of(self, lam):
        """(row, col) of the pixel containing lam, or None outside the box."""
        re_min, re_max, im_min, im_max = self.bbox
        dx, dy = self.pixel_size
        col = int(np.floor((lam.real - re_min) / dx))
        row = int(np.floor((im_max - lam.imag) / dy))
        if 0 <= row < self.height and 0 <= col < self.width:
            return row, col
        return None

    def center(self, row, col):
        re_min, re_max, im_min, im_max = self.bbox
        dx, dy = self.pixel_size
        return complex(re_min + (col + 0.5) * dx, im_max - (row + 0.5) * dy)


def pixel_centers(bbox, width, rows, height):
    re_min, re_max, im_min, im_max = bbox
    dx = (re_max - re_min) / width
    dy = (im_max - im_min) / height
    re = re_min + (np.arange(width) + 0.5) * dx
    im = im_max - (np.asarray(rows) + 0.5) * dy
    return re[None, :] + 1j * im[:, None]


def _classify_rows(rows, s, bbox, width, height, config):
    config = resolve_config(config)
    centers = pixel_centers(bbox, width, rows, height)
    batch = classify_batch(s, centers.ravel(), config)
    cells = _LUT[batch.codes]
    dx = (bbox[1] - bbox[0]) / width
    dy = (bbox[3] - bbox[2]) / height
    band = config.band_pixels * 0.5 * np.hypot(dx, dy)
    cells = np.where(batch.curve_estimate <= band, np.uint8(RasterCode.ESSENTIAL_BAND), cells)
    return cells.reshape(len(rows), width).astype(np.uint8)


def _validate(bbox, width, height):
    if len(bbox) != 4:
        raise InvalidParams(f'bbox needs four numbers re_min,re_max,im_min,im_max, got {bbox}')
    re_min, re_max, im_min, im_max = (float(b) for b in bbox)
    if not (np.isfinite([re_min, re_max, im_min, im_max]).all() and re_max > re_min and im_max > im_min):
        raise InvalidParams(f'degenerate bbox {bbox}')
    if width < 1 or height < 1 or width * height > MAX_PIXELS:
        raise InvalidParams(f'resolution {width}x{height} must be positive and at most 4096x4096 pixels')
    return re_min, re_max, im_min, im_max


@log.enter('raster')
def rasterize(s, bbox=None, resolution=None, n_max=None, config=None, enumeration=None):
    config = resolve_config(config)
    n_max = config.n_max if n_max is None else n_max
    width, height = resolution if resolution is not None else (config.width, config.height)
    bbox = bbox if bbox is not None else config.bbox
    if bbox is None:
        bbox = curve_bbox(s, config.curve_samples)
    bbox = _validate(bbox, width, height)

    bands = [np.arange(start, min(start + config.band_rows, height))
             for start in range(0, height, config.band_rows)]
    func = partial(_classify_rows, s=s, bbox=bbox, width=width, height=height, config=dict(config))
    cells = np.concatenate(parallel_map(func, bands, workers=config.workers,
                                        desc='raster', progress=not config.quiet))

    if enumeration is None:
        enumeration = enumerate_lambda(s, n_max, config)
    grid = RasterGrid(bbox, width, height, cells, {}, (), s.boundary(config.curve_samples))
    marks = []
    for cert in enumeration.certificates:
        pixel = grid.pixel_of(cert.lam)
        if pixel is None:
            continue
        cells[pixel] = RasterCode.ISOLATED_MARK
        marks.append(cert.lam)
    metadata = {
        'symbol': s.to_json(),
        'n_max': n_max,
        'complete': enumeration.complete,
        'tolerances': {key: config[key] for key in (
            'boundary_band', 'eigen_condition_tol', 'indeterminacy_band', 'band_pixels')},
    }
    grid = RasterGrid(bbox, width, height, cells, metadata, tuple(marks), grid.essential_samples)
    log.info(f'{width}x{height} raster: ' + ', '.join(f'{k}={v}' for k, v in grid.counts().items() if v))
    return grid
