import pytest

from mimo_rwma.constellation import build_constellation


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行 slow 标记的测试")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def qam16():
    return build_constellation("qam16")


@pytest.fixture
def qpsk():
    return build_constellation("qpsk")
