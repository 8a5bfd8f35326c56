import numpy as np
import pytest

from raster import RasterCode, RasterGrid, rasterize
from render import get_renderer, render
from render.json_grid import grid_from_json
from spectral import HarmonicSymbol, curve_distance
from utils.errors import InvalidParams

ZBAR = HarmonicSymbol.from_text('0')


def _grid(cells, marks=()):
    cells = np.asarray(cells, dtype=np.uint8)
    height, width = cells.shape
    return RasterGrid((-1.0, 1.0, -1.0, 1.0), width, height, cells, {'n_max': 0}, tuple(marks),
                      np.exp(2j * np.pi * np.arange(8) / 8))


def test_zbar_regions(config):
    grid = rasterize(ZBAR, bbox=(-2, 2, -2, 2), resolution=(32, 32), config=config)
    assert sum(grid.counts().values()) == 32 * 32
    dx, dy = grid.pixel_size
    band = np.hypot(dx, dy)
    for row in range(32):
        for col in range(32):
            modulus = abs(grid.center(row, col))
            if modulus < 1 - band:
                assert grid.cells[row, col] == RasterCode.EIGEN_REGION
            elif modulus > 1 + band:
                assert grid.cells[row, col] == RasterCode.RESOLVENT
    assert grid.marks == ()


def test_real_symbol_is_flip_symmetric(config):
    s = HarmonicSymbol.from_text('0,0.5,0.3')
    grid = rasterize(s, bbox=(-2, 2, -2, 2), resolution=(24, 24), n_max=10, config=config)
    mismatched = np.sum(grid.cells != grid.cells[::-1])
    assert mismatched <= 0.01 * grid.cells.size


def test_worker_count_does_not_change_bytes(config):
    s = HarmonicSymbol.from_text('0,-1,1')
    config.band_rows = 4
    serial = rasterize(s, resolution=(16, 16), n_max=10, config=config)
    config.workers = 2
    parallel = rasterize(s, resolution=(16, 16), n_max=10, config=config)
    assert render(serial, 'pgm') == render(parallel, 'pgm')
    assert render(serial, 'json') == render(parallel, 'json')


def test_isolated_mark(construction_symbol, config):
    gap = curve_distance(construction_symbol, 0, config)
    box = gap / 4
    grid = rasterize(construction_symbol, bbox=(-box, box, -box, box), resolution=(9, 9), n_max=30,
                     config=config)
    assert grid.counts()['ISOLATED_MARK'] == 1
    assert grid.cells[4, 4] == RasterCode.ISOLATED_MARK
    assert grid.counts()['RESOLVENT'] == 80
    assert len(grid.marks) == 1


def test_invalid_box(config):
    with pytest.raises(InvalidParams):
        rasterize(ZBAR, bbox=(1, 1, -1, 1), resolution=(4, 4), config=config)
    with pytest.raises(InvalidParams):
        rasterize(ZBAR, bbox=(-1, 1, -1, 1), resolution=(5000, 5000), config=config)


def test_pgm():
    data = render(_grid(np.full((2, 2), RasterCode.RESOLVENT)), 'pgm')
    assert data == b'P5 2 2 255\n' + bytes([255] * 4)


def test_svg_marks():
    cells = np.full((4, 4), RasterCode.EIGEN_REGION)
    cells[1, 2] = RasterCode.ISOLATED_MARK
    text = render(_grid(cells, [0.25 + 0.25j]), 'svg').decode()
    assert text.count('<circle') == 1
    assert text.count('<polyline') == 1
    assert text.startswith('<?xml')
    assert text.rstrip().endswith('</svg>')


def test_json_round_trip():
    cells = np.array([[0, 1, 2], [3, 4, 5]])
    data = render(_grid(cells, [0.5j]), 'json')
    again = grid_from_json(data)
    assert np.array_equal(again.cells, cells)
    assert render(again, 'json') == data


def test_unknown_format():
    with pytest.raises(InvalidParams):
        get_renderer('png')


def test_save(tmp_path):
    path = tmp_path / 'grid.pgm'
    size = get_renderer('pgm').save(_grid(np.zeros((3, 5))), str(path))
    assert path.read_bytes()[:11] == b'P5 5 3 255\n'
    assert size == 11 + 15


def test_refinement_keeps_interior_pixels(construction_symbol, config):
    coarse = rasterize(construction_symbol, resolution=(16, 16), n_max=20, config=config)
    fine = rasterize(construction_symbol, bbox=coarse.bbox, resolution=(32, 32), n_max=20, config=config)
    padded = np.pad(coarse.cells, 3, mode='edge')
    for row in range(16):
        for col in range(16):
            code = coarse.cells[row, col]
            # at least three coarse pixels from any change of class
            if np.all(padded[row:row + 7, col:col + 7] == code):
                assert np.all(fine.cells[2 * row:2 * row + 2, 2 * col:2 * col + 2] == code)
