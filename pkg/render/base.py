from utils.config import resolve_config


class BaseRenderer:
    '''Base renderer turning a RasterGrid into bytes

    Args:
        config (ArgDict): config of the run
    '''

    def __init__(self, config=None):
        self.config = resolve_config(config)

    def render(self, grid):
        raise NotImplementedError

    def save(self, grid, path):
        data = self.render(grid)
        with open(path, 'wb') as fp:
            fp.write(data)
        return len(data)
