from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from oddcourant.poly import Polynomial

settings.register_profile(
    "exact", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")

rationals = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


def polynomials(nvars=2, max_degree=2, max_terms=4):
    exps = st.tuples(*[st.integers(0, max_degree)] * nvars).filter(lambda e: sum(e) <= max_degree)
    return st.dictionaries(exps, rationals, max_size=max_terms).map(lambda t: Polynomial(nvars, t))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
