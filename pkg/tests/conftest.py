from __future__ import annotations

from hypothesis import settings, strategies as st

from chaincolour.lattice import SetFamily

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def families(draw, max_n: int = 4, max_size: int = 10, min_n: int = 1) -> SetFamily:
    n = draw(st.integers(min_n, max_n))
    members = draw(st.lists(st.integers(0, (1 << n) - 1), unique=True, max_size=min(max_size, 1 << n)))
    return SetFamily(n, members)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number].line())
