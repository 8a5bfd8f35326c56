import numpy as np

from raster import GRAY_LEVELS, RasterCode
from render.base import BaseRenderer

_GRAY = np.array([GRAY_LEVELS[code] for code in RasterCode], dtype=np.uint8)


class PgmRenderer(BaseRenderer):
    """Binary P5 graymap, one gray level per RasterCode, top row first."""

    def render(self, grid):
        header = b'P5 %d %d 255\n' % (grid.width, grid.height)
        return header + _GRAY[grid.cells].tobytes()
