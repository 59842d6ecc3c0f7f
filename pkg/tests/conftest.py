import os

import pytest
from hypothesis import HealthCheck, settings

from mltt.corpus import load_corpus

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=2000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def corpus():
    """The axiom-free corpus."""
    return load_corpus(axioms=False)


@pytest.fixture(scope="session")
def corpus_axioms():
    """The whole corpus, univalence and truncation axioms included."""
    return load_corpus(axioms=True)


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({detail})")
