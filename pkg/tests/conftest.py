import pytest
from hypothesis import HealthCheck, settings

from curvelab.graphs import clear_memory_cache, set_cache_dir

settings.register_profile("curvelab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("curvelab")


@pytest.fixture(autouse=True)
def _no_persistent_cache():
    set_cache_dir(None)
    yield
    set_cache_dir(None)


@pytest.fixture
def fresh_stores():
    clear_memory_cache()
    yield
    clear_memory_cache()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance")
    for name, (ok, detail) in sorted(RESULTS.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
