import io
import json

import pytest

from main import attach_values, get_config, main
from report import DOCUMENT_KEYS, check_document
from utils.config import env_overrides, validate_config, default_config
from utils.errors import InvalidParams, ValidationFailed


def run(capsys, *argv):
    code = main(list(argv) + ['--quiet'])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_invertible_quadratic(capsys):
    code, out, _ = run(capsys, 'invertible', '--poly', '0,-1,1')
    assert code == 0
    payload = json.loads(out)
    assert payload['invertible'] is True
    assert payload['schema'] == 'bergman-spectra/v1/invertible'


def test_classify_zbar(capsys):
    code, out, _ = run(capsys, 'classify', '--poly', '0', '--lambda', '0,0')
    assert code == 0
    assert json.loads(out)['kind'] == 'EIGEN_REGION_INDEX_POSITIVE'


def test_construct_pipes_into_analyze(capsys, monkeypatch):
    code, out, _ = run(capsys, 'construct', '--k', '3', '--n', '1')
    assert code == 0
    assert json.loads(out)['passed']
    monkeypatch.setattr('sys.stdin', io.StringIO(out))
    code, out, _ = run(capsys, 'analyze', '--stdin', '--n_max', '20', '--atlas_resolution', '8')
    assert code == 0
    report = json.loads(out)
    assert report['schema'] == 'bergman-spectra/v1/report'
    assert any(abs(complex(*c['lambda'])) < 1e-9 for c in report['lambda_set'])
    assert report['weyl']['weyl_theorem_holds']


def test_sweep_markdown(capsys):
    code, out, _ = run(capsys, 'construct', '--sweep', '--ks', '3', '4', '--ns', '1', '--format', 'markdown')
    assert code == 0
    assert out.count('\n') == 4


def test_raster_to_file(capsys, tmp_path):
    path = tmp_path / 'zbar.pgm'
    code, out, _ = run(capsys, 'raster', '--poly', '0', '--bbox', '-2,2,-2,2', '--res', '8',
                       '--format', 'pgm', '--out', str(path))
    assert code == 0
    assert path.read_bytes().startswith(b'P5 8 8 255\n')
    assert json.loads(out)['bytes'] == 11 + 64


def test_matrix(capsys):
    code, out, _ = run(capsys, 'matrix', '--poly', '0', '--lambda', '0.3,0', '--size', '50', '--series', '100')
    assert code == 0
    payload = json.loads(out)
    assert payload['residual'] < 1e-8
    assert payload['series']['verdict'] == 'DECAYING'


def test_domain_error_exit_code(capsys):
    code, out, err = run(capsys, 'construct', '--k', '2')
    assert code == 1
    assert out == ''
    assert json.loads(err.strip().splitlines()[-1])['error'] == 'InvalidParams'


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(['nonsense'])
    assert e.value.code == 1
    assert json.loads(capsys.readouterr().err)['error'] == 'UsageError'


def test_config_layers(monkeypatch, tmp_path):
    path = tmp_path / 'run.yml'
    path.write_text('n_max: 5\nseed: 7\n')
    assert get_config(['-c', str(path), 'weyl']).n_max == 5
    monkeypatch.setenv('BERGMAN_N_MAX', '7')
    assert get_config(['-c', str(path), 'weyl']).n_max == 7
    assert get_config(['weyl', '--n_max', '3']).n_max == 3
    assert get_config(['-c', str(path), 'weyl']).seed == 7


def test_env_coercion():
    assert env_overrides({'BERGMAN_EIGEN_CONDITION_TOL': '1e-6', 'BERGMAN_PRECISE': 'true'}) == \
        {'eigen_condition_tol': 1e-6, 'precise': True}
    with pytest.raises(InvalidParams):
        env_overrides({'BERGMAN_N_MAX': 'many'})


def test_validate_config():
    with pytest.raises(InvalidParams):
        validate_config(default_config(boundary_band=0))
    with pytest.raises(InvalidParams):
        validate_config(default_config(n_max=-1))


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, 'selftest', '--only', 'hyponormality', 'invertibility_vectors', '8')
    assert code == 0
    payload = json.loads(out)
    assert payload['passed']
    assert [r['criterion'] for r in payload['results']] == [5, 8, 11]


def test_attach_values():
    assert attach_values(['classify', '--lambda', '-0.5,0.2', '--quiet']) == \
        ['classify', '--lambda=-0.5,0.2', '--quiet']
    assert attach_values(['raster', '--bbox', '-2,2,-2,2', '--res', '8']) == \
        ['raster', '--bbox=-2,2,-2,2', '--res', '8']
    assert attach_values(['weyl', '--quiet', '-c', 'x.yml']) == ['weyl', '--quiet', '-c', 'x.yml']


def test_negative_lambda(capsys):
    code, out, _ = run(capsys, 'classify', '--poly', '0', '--lambda', '-0.5,0.2')
    assert code == 0
    payload = json.loads(out)
    assert payload['lambda'] == [-0.5, 0.2]
    assert payload['kind'] == 'EIGEN_REGION_INDEX_POSITIVE'


def test_negative_poly(capsys):
    code, out, _ = run(capsys, 'invertible', '--poly', '-1,0,1')
    assert code == 0
    assert json.loads(out)['schema'] == 'bergman-spectra/v1/invertible'


def test_negative_bbox(capsys):
    code, out, _ = run(capsys, 'raster', '--poly', '0', '--bbox', '-2,2,-2,2', '--res', '4', '--format', 'json')
    assert code == 0
    payload = json.loads(out)
    assert payload['bbox'] == [-2, 2, -2, 2]
    assert check_document(payload) == 'raster'


@pytest.mark.parametrize('argv, kind', [
    (['analyze', '--poly', '0,-1,1', '--n_max', '10', '--atlas_resolution', '8'], 'report'),
    (['classify', '--poly', '0', '--lambda', '2,0'], 'classify'),
    (['invertible', '--poly', '0,-1,1'], 'invertible'),
    (['weyl', '--poly', '0', '--n_max', '5', '--atlas_resolution', '8'], 'weyl'),
    (['construct', '--k', '3', '--n', '1'], 'construct'),
    (['construct', '--sweep', '--ks', '3', '--ns', '1', '2'], 'sweep'),
    (['isolated', '--n_max', '20'], 'isolated'),
    (['raster', '--poly', '0', '--bbox', '-2,2,-2,2', '--res', '6'], 'raster'),
    (['matrix', '--poly', '0', '--lambda', '0.3,0', '--size', '30', '--series', '60'], 'matrix'),
    (['matrix', '--radial', '0.5', '--size', '20'], 'radial'),
    (['hyponormal', '--poly', '0,0.3'], 'hyponormal'),
    (['selftest', '--only', 'hyponormality'], 'selftest'),
])
def test_documents_match_published_keys(capsys, argv, kind):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert check_document(json.loads(out)) == kind


def test_saved_raster_and_error_documents(capsys, tmp_path):
    code, out, _ = run(capsys, 'raster', '--poly', '0', '--res', '4', '--format', 'pgm',
                       '--out', str(tmp_path / 'grid.pgm'))
    assert code == 0
    assert check_document(json.loads(out)) == 'raster-file'
    code, _, err = run(capsys, 'construct', '--k', '2')
    assert code == 1
    assert check_document(json.loads(err.strip().splitlines()[-1])) == 'error'


def test_check_document_rejects():
    with pytest.raises(ValidationFailed):
        check_document({'schema': 'bergman-spectra/v1/hyponormal', 'verdict': 'INCONCLUSIVE'})
    with pytest.raises(ValidationFailed):
        check_document({'schema': 'bergman-spectra/v1/selftest', 'results': [], 'passed': 'yes'})
    with pytest.raises(ValidationFailed):
        check_document({'schema': 'other/v1/report'})
    assert 'isolated' in DOCUMENT_KEYS
