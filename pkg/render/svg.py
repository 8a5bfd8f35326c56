import numpy as np

from raster import RasterCode
from render.base import BaseRenderer

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN"
"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">

<svg
    width="%(width)d"
    height="%(height)d"
    viewBox="0 0 %(width)d %(height)d"
    version="1.1"
    xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="%(width)d" height="%(height)d" style="fill:#ffffff"/>
"""

POSTAMBLE = """\
</svg>
"""

FILLS = {
    RasterCode.FILLED_POSITIVE_WINDING: '#606060',
    RasterCode.EIGEN_REGION: '#a0a0a0',
    RasterCode.AMBIGUOUS: '#d0d0ff',
}


def _runs(row):
    """(start, length, code) for maximal runs of equal codes."""
    edges = np.flatnonzero(np.diff(row)) + 1
    starts = np.concatenate([[0], edges])
    ends = np.concatenate([edges, [len(row)]])
    return [(int(a), int(b - a), int(row[a])) for a, b in zip(starts, ends)]


class SvgRenderer(BaseRenderer):
    """Regions as run-length pixel rectangles, the essential curve as a
    polyline and one circle per certified isolated eigenvalue."""

    def to_pixel(self, grid, lam):
        re_min, re_max, im_min, im_max = grid.bbox
        x = (lam.real - re_min) / (re_max - re_min) * grid.width
        y = (im_max - lam.imag) / (im_max - im_min) * grid.height
        return x, y

    def region_commands(self, grid):
        commands = []
        for r, row in enumerate(grid.cells):
            for start, length, code in _runs(row):
                fill = FILLS.get(RasterCode(code))
                if fill is None:
                    continue
                commands.append('<rect x="%d" y="%d" width="%d" height="1" style="fill:%s"/>'
                                % (start, r, length, fill))
        return commands

    def curve_command(self, grid):
        if grid.essential_samples is None or not len(grid.essential_samples):
            return []
        samples = np.append(grid.essential_samples, grid.essential_samples[:1])
        points = ' '.join('%.3f,%.3f' % self.to_pixel(grid, lam) for lam in samples)
        return ['<polyline points="%s" style="fill:none;stroke:#000000;stroke-width:1"/>' % points]

    def mark_commands(self, grid):
        radius = max(3.0, 0.01 * max(grid.width, grid.height))
        return ['<circle cx="%.3f" cy="%.3f" r="%.3f" style="fill:none;stroke:#d00000;stroke-width:1.5"/>'
                % (*self.to_pixel(grid, lam), radius) for lam in grid.marks]

    def render(self, grid):
        width, height = grid.width, grid.height
        body = self.region_commands(grid) + self.curve_command(grid) + self.mark_commands(grid)
        text = PREAMBLE % locals() + ''.join(item + '\n' for item in body) + POSTAMBLE
        return text.encode('ascii')
