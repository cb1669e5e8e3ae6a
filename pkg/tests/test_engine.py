import random

import pytest

from tasbench.atam import NULL, Assembly, Direction, Shape, Tas, TileType, attachment_strength, neighbor
from tasbench.engine import (
    AttachmentEvent,
    Outcome,
    ResourcesExceeded,
    SimulationBounds,
    bounded_tile_complexity,
    frontier,
    grow_terminal,
    is_directed,
    step,
    strictly_self_assembles,
    terminal_assemblies,
    tile_complexity_oracle,
)


def line_tas(n, tau=1):
    """Tiles t0..t{n-1} chained eastward with strength-``tau`` bonds."""
    tiles = [TileType(f"t{k}", west=f"g{k - 1}" if k else NULL, east=f"g{k}" if k < n - 1 else NULL) for k in range(n)]
    g = {f"g{k}": tau for k in range(n - 1)}
    return Tas(tuple(tiles), Assembly.single(tiles[0]), g, tau)


def _naive_terminals(tas, region):
    """Producible terminal assemblies by plain breadth-first search."""
    start = dict(tas.seed)
    seen = {frozenset(start.items())}
    todo = [start]
    out = set()
    while todo:
        a = todo.pop()
        moves = []
        for p in {neighbor(q, d) for q in a for d in Direction} - a.keys():
            for t in tas.tile_types:
                if attachment_strength(a, p, t, tas.g) >= tas.tau:
                    moves.append((p, t))
        if not moves:
            out.add(frozenset(a.items()))
        for p, t in moves:
            if p not in region:
                return None
            b = dict(a)
            b[p] = t
            key = frozenset(b.items())
            if key not in seen:
                seen.add(key)
                todo.append(b)
    return out


def random_tas(rng):
    labels = ["a", "b", "c"]
    n = rng.randint(2, 4)
    tau = rng.randint(1, 2)
    g = {lab: rng.randint(1, 2) for lab in labels}
    tiles = []
    while len(tiles) < n:
        glues = [rng.choice(labels + [NULL, NULL]) for _ in range(4)]
        t = TileType(f"t{len(tiles)}", *glues)
        strength = sum(g.get(x, 0) for x in glues)
        if (not tiles or strength >= tau) and t.glues not in [u.glues for u in tiles]:
            tiles.append(t)
    return Tas(tuple(tiles), Assembly.single(tiles[0]), g, tau)


BOX = Shape((x, y) for x in range(-2, 3) for y in range(-2, 3))


def test_frontier_and_step_on_a_line():
    tas = line_tas(3)
    events = frontier(tas, tas.seed)
    assert events == [AttachmentEvent((1, 0), tas.tile("t1"), 1)]
    a = step(tas, tas.seed, events[0])
    assert set(a) == {(0, 0), (1, 0)}
    with pytest.raises(ValueError):
        step(tas, a, events[0])
    with pytest.raises(ValueError):
        step(tas, tas.seed, AttachmentEvent((0, 1), tas.tile("t1"), 1))


def test_grow_terminal_line():
    tas = line_tas(5, tau=2)
    a = grow_terminal(tas)
    assert a.shape() == Shape((x, 0) for x in range(5))
    assert terminal_assemblies(tas, check_stability=True) == {a}


def test_cooperation_needs_both_neighbors():
    # an L-shaped seed-side pair lets the corner tile in only at tau 2 with both arms
    s = TileType("s", north="n1", east="e1")
    up = TileType("up", south="n1", east="c1")
    right = TileType("right", west="e1", north="c2")
    corner = TileType("corner", west="c1", south="c2")
    g = {"n1": 2, "e1": 2, "c1": 1, "c2": 1}
    tas = Tas((s, up, right, corner), Assembly.single(s), g, 2)
    (a,) = terminal_assemblies(tas)
    assert a[(1, 1)] == corner
    assert is_directed(tas)


def test_resource_limits_raise():
    grow = TileType("g", west="x", east="x")
    tas = Tas((grow,), Assembly.single(grow), {"x": 1}, 1)
    with pytest.raises(ResourcesExceeded):
        grow_terminal(tas, SimulationBounds(max_size=20))
    with pytest.raises(ResourcesExceeded):
        terminal_assemblies(tas, SimulationBounds(region=BOX))
    with pytest.raises(ResourcesExceeded):
        is_directed(tas, SimulationBounds(region=BOX))


def test_competing_tiles_are_not_directed():
    s = TileType("s", east="x")
    a = TileType("a", west="x")
    b = TileType("b", west="x", north="y")
    tas = Tas((s, a, b), Assembly.single(s), {"x": 1, "y": 1}, 1)
    assert len(terminal_assemblies(tas)) == 2
    assert not is_directed(tas)
    shape = Shape([(0, 0), (1, 0)])
    v = strictly_self_assembles(tas, shape)
    assert v.outcome is Outcome.YES  # both terminals fill the same two cells
    assert not strictly_self_assembles(tas, Shape([(0, 0)]))


def test_strict_self_assembly_negative_has_witness():
    tas = line_tas(3)
    v = strictly_self_assembles(tas, Shape([(0, 0), (1, 0)]))
    assert v.outcome is Outcome.NO and (2, 0) in v.witness


@pytest.mark.parametrize("seed", range(120))
def test_engine_matches_naive_enumeration(seed):
    rng = random.Random(seed)
    tas = random_tas(rng)
    naive = _naive_terminals(tas, BOX)
    if naive is None:
        with pytest.raises(ResourcesExceeded):
            terminal_assemblies(tas, SimulationBounds(region=BOX))
        return
    got = terminal_assemblies(tas, SimulationBounds(region=BOX), check_stability=True)
    assert {frozenset(a.items()) for a in got} == naive
    assert is_directed(tas, SimulationBounds(region=BOX)) == (len(naive) == 1)
    shapes = {frozenset(p for p, _ in a) for a in naive}
    for target in shapes:
        v = strictly_self_assembles(tas, Shape(target))
        assert v.outcome is (Outcome.YES if len(shapes) == 1 else Outcome.NO)


def test_oracle_small_values():
    assert tile_complexity_oracle(Shape([(0, 0)]), 1) == 1
    assert tile_complexity_oracle(Shape([(0, 0), (1, 0)]), 1) == 2
    assert tile_complexity_oracle(Shape([(0, 0), (1, 0)]), 1, max_types=1) is None
    assert bounded_tile_complexity(Shape([(0, 0), (1, 0)]), 2) == 2
    with pytest.raises(ValueError):
        tile_complexity_oracle(Shape((x, 0) for x in range(7)), 1)


def test_strict_self_assembly_state_budget():
    # not directed, so the verdict needs the exhaustive search
    s = TileType("s", east="x")
    a = TileType("a", west="x")
    b = TileType("b", west="x", north="y")
    tas = Tas((s, a, b), Assembly.single(s), {"x": 1, "y": 1}, 1)
    pair = Shape([(0, 0), (1, 0)])
    assert strictly_self_assembles(tas, pair, max_states=1).outcome is Outcome.RESOURCES_EXCEEDED
    assert strictly_self_assembles(tas, pair, max_states=10).outcome is Outcome.YES
