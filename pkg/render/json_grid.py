import json

import numpy as np

from raster import RasterGrid
from render.base import BaseRenderer
from utils.utils import complex_pairs, from_pairs

SCHEMA = 'bergman-spectra/v1/raster'


def grid_to_json(grid):
    return {
        'schema': SCHEMA,
        'bbox': [float(b) for b in grid.bbox],
        'width': grid.width,
        'height': grid.height,
        'rows': [''.join(str(c) for c in row) for row in grid.cells.tolist()],
        'marks': complex_pairs(grid.marks),
        'essential_samples': complex_pairs(grid.essential_samples) if grid.essential_samples is not None else [],
        'metadata': grid.metadata,
    }


def grid_from_json(data):
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    cells = np.array([[int(c) for c in row] for row in data['rows']], dtype=np.uint8)
    return RasterGrid(tuple(data['bbox']), data['width'], data['height'], cells,
                      data.get('metadata', {}), tuple(from_pairs(data['marks'])),
                      from_pairs(data['essential_samples']))


class JsonRenderer(BaseRenderer):
    """Raw grid and metadata; cells are one digit per pixel, one string per row."""

    def render(self, grid):
        text = json.dumps(grid_to_json(grid), sort_keys=True, separators=(',', ':'))
        return (text + '\n').encode('utf-8')
