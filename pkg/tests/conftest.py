import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def enumeration_1024():
    """Pair enumeration for puncturing 1/4 at N = 1024 with the default configuration."""
    from polar_po.po_core import enumerate_pairs

    return enumerate_pairs("punc:1/4", 1024)


CRITERIA: dict[int, str] = {}


def report(k: int, ok: bool, detail: str) -> None:
    """Record and print the one-line outcome of acceptance criterion ``k``."""
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} | {detail}"
    CRITERIA[k] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
