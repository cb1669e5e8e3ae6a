import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tasbench.atam import NULL, Assembly, Tas, TileType
from tasbench.coopsets import (
    FULL,
    CooperationSet,
    StrengthFreeTas,
    UnattachableTile,
    cooperation_family,
    cooperation_set,
    find_opt_strength,
    find_strength,
    locally_equivalent,
    mask_to_str,
    str_to_mask,
    strength_free,
)

LABELS = ["a", "b", "c", "d"]


def test_mask_text_round_trip():
    for m in range(1, 16):
        assert str_to_mask(mask_to_str(m)) == m
    assert mask_to_str(0b0101) == "NS"
    for bad in ("", "NN", "X"):
        with pytest.raises(ValueError):
            str_to_mask(bad)


def test_cooperation_set_contract():
    with pytest.raises(ValueError):
        CooperationSet([0b0011])  # not upward closed and no NWSE
    with pytest.raises(ValueError):
        CooperationSet([0b0011, FULL])
    c = CooperationSet.from_minimal([0b0011])
    assert c.minimal() == [0b0011]
    assert set(c) == {0b0011, 0b0111, 0b1011, FULL}
    assert sorted(map(mask_to_str, c.maximal_excluded())) == ["NSE", "WSE"]


def test_cooperation_set_of_a_tile():
    t = TileType("t", north="a", west="b", south="a")
    g = {"a": 1, "b": 2}
    assert cooperation_set(t, g, 3).minimal() == [str_to_mask("NW"), str_to_mask("WS")]
    with pytest.raises(UnattachableTile):
        cooperation_set(t, g, 5)


@st.composite
def tile_and_strengths(draw):
    glues = [draw(st.sampled_from(LABELS + [NULL])) for _ in range(4)]
    g = {lab: draw(st.integers(0, 4)) for lab in LABELS}
    return TileType("t", *glues), g


@settings(max_examples=200, deadline=None)
@given(tile_and_strengths(), st.integers(1, 6), st.integers(2, 3))
def test_scaling_preserves_cooperation(case, tau, c):
    t, g = case
    scaled = {k: c * v for k, v in g.items()}
    assert cooperation_family(t, g, tau) == cooperation_family(t, scaled, c * tau)


def _random_family(data):
    mins = data.draw(st.lists(st.integers(1, 15), max_size=3))
    return CooperationSet.from_minimal(mins)


@settings(max_examples=120, deadline=None)
@given(st.data())
def test_find_strength_realizes_or_no_strength_exists(data):
    """Cross-check synthesis against exhaustive strength enumeration."""
    glues = [data.draw(st.sampled_from(["a", "b", "c", NULL])) for _ in range(4)]
    t = TileType("t", *glues)
    fam = _random_family(data)
    sf = StrengthFreeTas((t,), Assembly.single(t), {t: fam})
    tau = data.draw(st.integers(1, 3))
    g = find_strength(sf, tau)
    labels = sf.labels()
    exists = any(
        cooperation_family(t, dict(zip(labels, vals)), tau) == fam
        for vals in itertools.product(range(tau + 1), repeat=len(labels))
    )
    assert (g is not None) == exists
    if g is not None:
        assert cooperation_family(t, g, tau) == fam


def test_find_opt_strength_three_way_cooperation():
    # NWS together reach tau, no pair does
    t = TileType("t", north="a", west="b", south="c")
    sf = StrengthFreeTas((t,), Assembly.single(t), {t: CooperationSet.from_minimal([0b0111])})
    g, tau = find_opt_strength(sf, 10)
    assert tau == 3 and all(g[x] == 1 for x in "abc")
    assert find_strength(sf, 2) is None


def test_strength_free_and_local_equivalence():
    s = TileType("s", east="x")
    u = TileType("u", west="x", north="y")
    a = Tas((s, u), Assembly.single(s), {"x": 2, "y": 1}, 2)
    b = Tas((s, u), Assembly.single(s), {"x": 5, "y": 1}, 4)
    c = Tas((s, u), Assembly.single(s), {"x": 3, "y": 3}, 3)
    assert locally_equivalent(a, b)
    assert not locally_equivalent(a, c)
    assert strength_free(a) == strength_free(b)


def test_sftas_validation():
    t = TileType("t", north="a")
    u = TileType("u", south="a")
    with pytest.raises(ValueError):
        StrengthFreeTas((t,), Assembly.single(t), {})
    with pytest.raises(ValueError):
        StrengthFreeTas((t,), Assembly.single(u), {t: CooperationSet([FULL])})
    # the seed is exempt when simulating but still needs a cooperation set here
    seed = TileType("seed", east="w")
    with pytest.raises(UnattachableTile):
        strength_free(Tas((seed,), Assembly.single(seed), {"w": 1}, 3))
