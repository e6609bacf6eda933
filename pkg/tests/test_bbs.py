import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxball.bbs import (
    Configuration,
    apply_K,
    evolve,
    evolve_by_carrier,
    format_configuration,
    parse_configuration,
    soliton_blocks,
    soliton_decomposition,
    trajectory,
)

T0 = "1 1 2 1 4 0 1 0 1 2 1 4 2 0 4 4 2 0 1 2"
PRINTED = [
    "0 0 1 0 2 4 0 1 0 1 0 2 1 4 2 1 1 4 0 1 4 2 2",
    "0 0 0 1 0 2 4 0 1 0 1 0 0 2 1 0 0 2 4 0 1 1 1 4 4 2 2",
    "0 0 0 0 1 0 2 4 0 1 0 1 0 0 0 2 1 0 2 4 0 0 0 1 1 1 0 4 4 2 2",
    "0 0 0 0 0 1 0 2 4 0 1 0 1 0 0 0 0 2 1 2 4 0 0 0 0 0 1 1 1 0 0 4 4 2 2",
    "0 0 0 0 0 0 1 0 2 4 0 1 0 1 0 0 0 0 0 1 2 4 2 0 0 0 0 0 0 1 1 1 0 0 0 4 4 2 2",
    "0 0 0 0 0 0 0 1 0 2 4 0 1 0 1 0 0 0 0 0 1 2 0 4 2 0 0 0 0 0 0 0 1 1 1 0 0 0 0 4 4 2 2",
]


def configs(max_kappa=4, max_len=30):
    return st.integers(1, max_kappa).flatmap(
        lambda k: st.lists(st.integers(0, k), max_size=max_len).map(lambda c: Configuration.of(c, k))
    )


def test_golden_trajectory():
    traj = trajectory(parse_configuration(T0, 4), 6)
    assert [format_configuration(x) for x in traj[1:]] == PRINTED


def test_carrier_sweep_figure():
    x = Configuration.of((1, 2, 2, 0, 3, 1, 0, 0), 3)
    assert evolve_by_carrier(x, 2, 3).same_state(Configuration.of((1, 0, 0, 1, 1, 2, 2, 0), 3))


def test_apply_K_single_color():
    assert apply_K(Configuration.of((1, 1, 0, 0, 0), 1), 1).cells == (0, 0, 1, 1)
    with pytest.raises(ValueError):
        apply_K(Configuration.of((1,), 1), 2)


@settings(max_examples=100)
@given(configs())
def test_wide_row_carrier_is_time_step(x):
    c = x.total_balls + 1
    assert evolve_by_carrier(x, 1, c).same_state(evolve(x))


@given(configs())
def test_ball_counts_conserved(x):
    assert evolve(x).ball_counts() == x.ball_counts()


def test_soliton_decomposition_printed_line():
    x = parse_configuration(PRINTED[-1], 4)
    sol = soliton_decomposition(x)
    assert sorted((s.length for s in sol), reverse=True) == [4, 3, 2, 1, 1, 1, 1, 1, 1, 1]
    assert soliton_decomposition(parse_configuration(T0, 4)) is None


@settings(max_examples=60, deadline=None)
@given(configs(max_len=15))
def test_decomposition_is_stable(x):
    # once decomposed, every later step keeps the same solitons shifted by their lengths
    traj = trajectory(x, 3 * len(x.cells) + 5)
    k = next(i for i, y in enumerate(traj) if soliton_decomposition(y) is not None)
    now = soliton_decomposition(traj[k])
    nxt = soliton_decomposition(evolve(traj[k]))
    assert [s.colors for s in now] == [s.colors for s in nxt]
    assert [s.position + s.length for s in now] == [s.position for s in nxt]


def test_soliton_blocks():
    blocks = soliton_blocks(parse_configuration("0 2 1 0 3 0 1 2", 3))
    assert [(b.colors, b.position) for b in blocks] == [((2, 1), 2), ((3,), 5), ((1,), 7), ((2,), 8)]


def test_parse_variants_and_errors():
    assert parse_configuration("1121").cells == (1, 1, 2, 1)
    assert parse_configuration("10,0,3", 10).cells == (10, 0, 3)
    with pytest.raises(ValueError, match="column 3"):
        parse_configuration("12x4")
    with pytest.raises(ValueError):
        Configuration.of((0, 5), 4)


def test_configuration_access():
    x = Configuration.of((0, 2, 0, 0), 2)
    assert x[2] == 2 and x[100] == 0
    assert x.normalized().cells == (0, 2)
    assert x.padded(6).cells == (0, 2, 0, 0, 0, 0)
    assert str(Configuration.of((), 1)) == ""
