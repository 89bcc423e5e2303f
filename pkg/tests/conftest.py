import pytest
from hypothesis import settings
from hypothesis import strategies as st

from clandestine import FIXTURES_DIR, GameParams, load_game, random_game
from clandestine.formula import Can, Imp, Know, Neg, Var

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

AGENTS = ("a", "b", "c")
POOL = ("p", "q", "r")


@pytest.fixture(scope="session")
def cuban():
    return load_game(FIXTURES_DIR / "cuban.json")


def formulas(agents=AGENTS, pool=POOL, max_leaves=12):
    coalitions = st.frozensets(st.sampled_from(agents))
    leaves = st.sampled_from(pool).map(Var)
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Neg),
            st.builds(Imp, sub, sub),
            st.builds(Know, coalitions, sub),
            st.builds(Can, coalitions, sub),
        ),
        max_leaves=max_leaves,
    )


game_params = st.builds(
    GameParams,
    n_states=st.integers(1, 6),
    n_agents=st.integers(1, 3),
    n_ops=st.integers(1, 2),
    partition_coarseness=st.floats(0, 1),
    extra_edge_prob=st.floats(0, 1),
)

games = st.builds(random_game, game_params, st.integers(0, 2**64 - 1))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    lines = [RESULTS[k] for k in range(1, 8) if k in RESULTS]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
