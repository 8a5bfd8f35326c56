from render.json_grid import JsonRenderer
from render.pgm import PgmRenderer
from render.svg import SvgRenderer
from utils.errors import InvalidParams

FORMATS = ('pgm', 'svg', 'json')


def get_renderer(fmt, config=None):
    if fmt == 'pgm':
        return PgmRenderer(config)

    elif fmt == 'svg':
        return SvgRenderer(config)

    elif fmt == 'json':
        return JsonRenderer(config)

    raise InvalidParams(f'unknown raster format {fmt!r}; choose one of {", ".join(FORMATS)}')


def render(grid, fmt, config=None):
    return get_renderer(fmt, config).render(grid)
