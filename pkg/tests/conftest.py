import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose each phase's report on the item, read by the acceptance fixture
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)
