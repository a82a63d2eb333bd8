import pytest

from feedback_sentiment.corpus import Corpus
from feedback_sentiment.preprocess import PreprocessConfig

ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.fixture(scope="session")
def pconf():
    return PreprocessConfig.default()


@pytest.fixture
def tiny_corpus():
    return Corpus.from_pairs([("OBE helps", 1), ("too bad", 0)])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    status = "PASS" if rep.passed else "FAIL"
    ACCEPTANCE_RESULTS.append((number, f"{status} criterion {number}: {title} ({rep.duration:.2f} s)"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)
