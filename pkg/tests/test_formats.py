import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tasbench.atam import NULL, Assembly, Shape, StrengthFunction, Tas, TileType
from tasbench.coopsets import CooperationSet, StrengthFreeTas
from tasbench.formats import (
    FormatError,
    read_assembly,
    read_instance,
    read_plan,
    read_sftas,
    read_shape,
    read_strengths,
    read_system,
    read_tas,
    read_tiles,
    read_values,
    write_assembly,
    write_instance,
    write_plan,
    write_sftas,
    write_shape,
    write_strengths,
    write_system,
    write_tas,
    write_tiles,
    write_values,
)
from tasbench.reductions import Literal, OneInThreeInstance, monotone_to_quadripartite, quad1in3_to_tp
from tasbench.shapegen import build_shape
from tasbench.threshold import QuadPartition, Sign, TauInequality, TauInequalitySystem

S = TileType("s", east="a", north="b")
U = TileType("u", west="a")
V = TileType("v", south="b", east="c")


def same_tas(a, b):
    return a.tile_types == b.tile_types and a.seed == b.seed and dict(a.g) == dict(b.g) and a.tau == b.tau


def test_tiles_strengths_assembly_round_trip():
    tiles = (S, U, V)
    assert read_tiles(write_tiles(tiles)) == tiles
    g = StrengthFunction({"a": 2, "b": 1, "c": 0})
    assert dict(read_strengths(write_strengths(g))) == dict(g)
    asm = Assembly({(0, 0): S, (1, 0): U, (0, 1): V})
    assert read_assembly(write_assembly(asm), tiles) == asm


def test_tas_round_trip_and_comments():
    tas = Tas((S, U, V), Assembly.single(S, (2, -1)), {"a": 2, "b": 2, "c": 1}, 2)
    text = write_tas(tas)
    assert same_tas(read_tas(text), tas)
    noisy = "# a comment\n\n" + text.replace("\n", "  # trailing\n", 1)
    assert same_tas(read_tas(noisy), tas)


def test_sftas_round_trip():
    fam = CooperationSet.from_minimal([0b0011, 0b1000])
    sf = StrengthFreeTas((S, U), Assembly.single(U, (0, 0)), {S: CooperationSet([15]), U: fam})
    assert read_sftas(write_sftas(sf)) == sf
    explicit = "a - - b @x\nNWSE NWS NWE\n"
    got = read_sftas(explicit)
    assert got.tile_types[0].name == "x" and got.tile_types[0].west == NULL


@st.composite
def systems(draw):
    names = [f"x{k}" for k in range(draw(st.integers(1, 5)))]
    rows = []
    for _ in range(draw(st.integers(0, 5))):
        sign = draw(st.sampled_from(list(Sign)))
        rows.append(TauInequality(sign, draw(st.lists(st.sampled_from(names), min_size=1, max_size=3))))
    strict = draw(st.booleans())
    if draw(st.booleans()):
        part = {v: draw(st.sampled_from("NWSE")) for v in names}
        return TauInequalitySystem.of(rows, names, strict, QuadPartition.from_mapping(part))
    return TauInequalitySystem.of(rows, names, strict)


@settings(max_examples=100, deadline=None)
@given(systems())
def test_system_round_trip(system):
    back = read_system(write_system(system))
    assert back == system
    assert (back.partition is None) == (system.partition is None)
    if system.partition is not None:
        assert back.partition.as_mapping() == system.partition.as_mapping()


def test_instance_round_trip():
    inst = OneInThreeInstance(("a", "b", "c"), ((Literal("a"), Literal("b", True), Literal("c")),))
    assert read_instance(write_instance(inst)) == inst
    quad = monotone_to_quadripartite(OneInThreeInstance.monotone([("a", "b", "c")]))
    back = read_instance(write_instance(quad))
    assert back.clauses == quad.clauses
    assert back.partition.as_mapping() == quad.partition.as_mapping()


def test_shape_and_values_round_trip():
    s = Shape([(0, 0), (0, 1), (-1, 1)])
    assert read_shape(write_shape(s)) == s
    vals = {"v[x]": 2, "k.x1": 1}
    assert read_values(write_values(vals)) == vals


def test_plan_round_trip_and_tamper_check():
    inst = OneInThreeInstance(("x", "y", "z"), (("x", "y", "z"),), QuadPartition.from_mapping({"x": "N", "y": "W", "z": "S"}))
    system = quad1in3_to_tp(inst, 4)
    _, plan = build_shape(system, h=3)
    text = write_plan(plan)
    back = read_plan(text)
    assert back.items == plan.items and back.trees == plan.trees and dict(back.constants) == dict(plan.constants)
    with pytest.raises(FormatError):
        read_plan(text.replace("\nscaffold ", "\nscaffold 1", 1))
    with pytest.raises(FormatError):
        read_plan("h 3\n")


@pytest.mark.parametrize("reader,text,line", [
    (read_tiles, "t N=a\nu Q=b\n", 2),
    (read_shape, "0 0\n1 x\n", 2),
    (read_strengths, "a 1\na 2\n", 2),
    (read_system, "vars: a\na + b >= TAU\n", 2),
    (read_sftas, "a b c d\nNX\n", 2),
])
def test_errors_carry_line_numbers(reader, text, line):
    with pytest.raises(FormatError) as err:
        reader(text)
    assert err.value.line == line
