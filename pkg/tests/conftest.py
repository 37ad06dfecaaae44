import pytest

def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run the minutes-long acceptance tests')

def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: minutes-long acceptance run, needs --runslow')

def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)

@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    # keep the user's ~/.config and DW_THREADS out of every test
    from dwitness import utils
    monkeypatch.setattr(utils, 'user_home', str(tmp_path / 'home'))
    monkeypatch.delenv('DW_THREADS', raising=False)
