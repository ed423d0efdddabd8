import pytest
from hypothesis import HealthCheck, settings

from betashift import Beta

CRITERIA = pytest.StashKey[dict]()

settings.register_profile(
    "default", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def phi():
    return Beta.golden_ratio()


@pytest.fixture(scope="session")
def trib():
    return Beta.tribonacci()


@pytest.fixture(scope="session")
def b19():
    return Beta("1.9")



def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")
    config.stash[CRITERIA] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and (rep.when == "call" or rep.failed):
        item.config.stash[CRITERIA][item.nodeid] = (mark.args[0], mark.args[1], rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(CRITERIA, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (n, title, outcome, dur) in sorted(store.items(), key=lambda kv: (str(kv[1][0]), kv[0])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict}  {title}  ({dur:.1f}s)")
