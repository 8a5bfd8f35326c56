import selftest
from utils import log


def test_winding_cross_check_reports_fixed_samples(monkeypatch, config):
    monkeypatch.setattr(selftest, 'WINDING_PAIRS', 20)
    passed, detail = selftest.winding_cross_check(config)
    assert passed
    assert detail.startswith('0 mismatches in 20 pairs; ')
    assert detail.endswith(f'at a fixed {selftest.FIXED_ARG_SAMPLES} samples')


def test_run_selftest_subset_records_spans(config):
    with log.LogCollector() as collector:
        results = selftest.run_selftest(config, only=['radial_shift'])
    assert results['name'].tolist() == ['radial_shift']
    assert results['passed'].all()
    assert collector.logs['dur_bergman__selftest'] >= 0
    assert any(record['path'] == 'bergman.selftest' for record in collector.logs['logs'])
