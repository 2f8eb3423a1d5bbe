from fractions import Fraction

import pytest
from hypothesis import strategies as st

from hetfac.model import Agent, Instance, Preference

coords = st.fractions(min_value=-10, max_value=10, max_denominator=12)
prefs = st.sampled_from(list(Preference))


@st.composite
def alternative_sets(draw, min_size=2, max_size=6):
    base = draw(st.lists(coords, min_size=1, max_size=max_size))
    # duplicates are drawn from what is already there so they actually occur
    while len(base) < max(min_size, 2) or draw(st.booleans()) and len(base) < max_size:
        base.append(draw(st.sampled_from(base)) if draw(st.booleans()) else draw(coords))
    return tuple(base[:max_size])


@st.composite
def instances(draw, compulsory=False, single=False, max_n=5, max_m=6):
    n = draw(st.integers(1, max_n))
    if compulsory:
        ps = [Preference.BOTH] * n
    elif single:
        ps = [Preference.F1] * n
    else:
        ps = draw(st.lists(prefs, min_size=n, max_size=n))
    xs = draw(st.lists(coords, min_size=n, max_size=n))
    alts = draw(alternative_sets(max_size=max_m))
    return Instance(tuple(Agent(x, p) for x, p in zip(xs, ps)), alts)


def F(s):
    return Fraction(s)


# acceptance criteria print one line each at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """Context manager recording PASS/FAIL for one acceptance criterion."""
    import contextlib
    import time

    @contextlib.contextmanager
    def record(ident: str, title: str):
        start = time.perf_counter()
        notes: list[str] = []
        try:
            yield notes
        except BaseException:
            ACCEPTANCE_LINES.append(
                f"FAIL  [{ident}] {title} ({time.perf_counter() - start:.1f}s) {'; '.join(notes)}"
            )
            raise
        ACCEPTANCE_LINES.append(
            f"PASS  [{ident}] {title} ({time.perf_counter() - start:.1f}s) {'; '.join(notes)}"
        )

    return record
