"""Plain-text readers and writers for every file the command line touches.

All readers ignore blank lines and ``#`` comments.  Each writer's output
reads back to an equal value.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping

from .atam import NULL, Assembly, Direction, Shape, StrengthFunction, Tas, TileType
from .coopsets import CooperationSet, StrengthFreeTas, mask_to_str, str_to_mask
from .reductions import Literal, OneInThreeInstance
from .threshold import PARTS, QuadPartition, Sign, TauInequality, TauInequalitySystem

__all__ = [
    "FormatError",
    "read_tiles", "write_tiles",
    "read_strengths", "write_strengths",
    "read_assembly", "write_assembly",
    "read_tas", "write_tas",
    "read_sftas", "write_sftas",
    "read_system", "write_system",
    "read_instance", "write_instance",
    "read_shape", "write_shape",
    "read_plan", "write_plan",
    "write_values", "read_values",
]


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield k, line


def _int(tok: str, k: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", k) from None


# -- tiles, strengths, assemblies -------------------------------------------

_SIDE_KEYS = {"N": "north", "W": "west", "S": "south", "E": "east"}


def _parse_tile(tokens: list[str], k: int) -> TileType:
    if not tokens:
        raise FormatError("missing tile name", k)
    sides = {}
    for tok in tokens[1:]:
        key, eq, label = tok.partition("=")
        if not eq or key not in _SIDE_KEYS:
            raise FormatError(f"expected N=, W=, S= or E=, got {tok!r}", k)
        if key in sides:
            raise FormatError(f"side {key} given twice", k)
        sides[key] = label
    try:
        return TileType(tokens[0], **{_SIDE_KEYS[s]: lab for s, lab in sides.items()})
    except ValueError as e:
        raise FormatError(str(e), k) from None


def _format_tile(t: TileType) -> str:
    parts = [t.name] + [f"{s}={t.glue(Direction[s])}" for s in "NWSE" if t.glue(Direction[s]) != NULL]
    return " ".join(parts)


def read_tiles(text: str) -> tuple[TileType, ...]:
    tiles = tuple(_parse_tile(line.split(), k) for k, line in _lines(text))
    names = [t.name for t in tiles]
    if len(set(names)) != len(names):
        raise FormatError("duplicate tile names")
    return tiles


def write_tiles(tiles: Iterable[TileType]) -> str:
    return "".join(_format_tile(t) + "\n" for t in tiles)


def read_strengths(text: str) -> StrengthFunction:
    out = {}
    for k, line in _lines(text):
        toks = line.split()
        if len(toks) != 2:
            raise FormatError("expected '<label> <int>'", k)
        if toks[0] in out:
            raise FormatError(f"label {toks[0]!r} given twice", k)
        out[toks[0]] = _int(toks[1], k)
    try:
        return StrengthFunction(out)
    except ValueError as e:
        raise FormatError(str(e)) from None


def write_strengths(g: Mapping[str, int]) -> str:
    return "".join(f"{lab} {g[lab]}\n" for lab in g)


def read_assembly(text: str, tiles: Iterable[TileType]) -> Assembly:
    by_name = {t.name: t for t in tiles}
    placement = {}
    for k, line in _lines(text):
        toks = line.split()
        if len(toks) != 3:
            raise FormatError("expected '<x> <y> <tile>'", k)
        p = (_int(toks[0], k), _int(toks[1], k))
        if toks[2] not in by_name:
            raise FormatError(f"unknown tile {toks[2]!r}", k)
        if p in placement:
            raise FormatError(f"position {p} given twice", k)
        placement[p] = by_name[toks[2]]
    return Assembly(placement)


def write_assembly(a: Assembly) -> str:
    return "".join(f"{x} {y} {a[(x, y)].name}\n" for x, y in sorted(a))


# -- whole systems -----------------------------------------------------------


def read_tas(text: str) -> Tas:
    """``tau``, ``tile``, ``glue`` and ``seed`` lines, in any order."""
    tau = None
    tiles = []
    glues = {}
    seed = None
    for k, line in _lines(text):
        toks = line.split()
        head, rest = toks[0], toks[1:]
        if head == "tau":
            if len(rest) != 1 or tau is not None:
                raise FormatError("expected one 'tau <int>' line", k)
            tau = _int(rest[0], k)
        elif head == "tile":
            tiles.append(_parse_tile(rest, k))
        elif head == "glue":
            if len(rest) != 2:
                raise FormatError("expected 'glue <label> <int>'", k)
            glues[rest[0]] = _int(rest[1], k)
        elif head == "seed":
            if len(rest) != 3 or seed is not None:
                raise FormatError("expected one 'seed <tile> <x> <y>' line", k)
            seed = (rest[0], _int(rest[1], k), _int(rest[2], k))
        else:
            raise FormatError(f"unknown directive {head!r}", k)
    if tau is None or seed is None or not tiles:
        raise FormatError("a TAS file needs tau, seed and at least one tile")
    by_name = {t.name: t for t in tiles}
    if seed[0] not in by_name:
        raise FormatError(f"seed tile {seed[0]!r} is not defined")
    try:
        return Tas(tuple(tiles), Assembly.single(by_name[seed[0]], (seed[1], seed[2])), StrengthFunction(glues), tau)
    except ValueError as e:
        raise FormatError(str(e)) from None


def write_tas(tas: Tas) -> str:
    (pos, seed), = tas.seed.items()
    out = [f"tau {tas.tau}", f"seed {seed.name} {pos[0]} {pos[1]}"]
    out += [f"tile {_format_tile(t)}" for t in tas.tile_types]
    out += [f"glue {lab} {tas.g[lab]}" for lab in tas.g]
    return "\n".join(out) + "\n"


def read_sftas(text: str) -> StrengthFreeTas:
    """Pairs of lines: four labels (``-`` blank, optional ``@name``), then
    the cooperation family as direction strings or ``min:`` generators.

    An optional ``seed <name> <x> <y>`` line picks the seed; otherwise it is
    the first tile at the origin.
    """
    seed = None
    tiles = []
    coop = {}
    pending = None
    for k, line in _lines(text):
        toks = line.split()
        if toks[0] == "seed" and pending is None:
            if len(toks) != 4:
                raise FormatError("expected 'seed <tile> <x> <y>'", k)
            seed = (toks[1], _int(toks[2], k), _int(toks[3], k))
            continue
        if pending is None:
            name = None
            if toks[-1].startswith("@"):
                name = toks.pop()[1:]
            if len(toks) != 4:
                raise FormatError("expected four glue labels", k)
            labels = [NULL if tok == "-" else tok for tok in toks]
            try:
                pending = TileType(name or f"t{len(tiles) + 1}", *labels)
            except ValueError as e:
                raise FormatError(str(e), k) from None
            continue
        try:
            if toks[0] == "min:":
                fam = CooperationSet.from_minimal(str_to_mask(t) for t in toks[1:])
            else:
                fam = CooperationSet(str_to_mask(t) for t in toks)
        except ValueError as e:
            raise FormatError(str(e), k) from None
        tiles.append(pending)
        coop[pending] = fam
        pending = None
    if pending is not None:
        raise FormatError(f"tile {pending.name!r} has no cooperation family")
    if not tiles:
        raise FormatError("no tile types")
    by_name = {t.name: t for t in tiles}
    if len(by_name) != len(tiles):
        raise FormatError("duplicate tile names")
    if seed is None:
        seed = (tiles[0].name, 0, 0)
    if seed[0] not in by_name:
        raise FormatError(f"seed tile {seed[0]!r} is not defined")
    return StrengthFreeTas(tuple(tiles), Assembly.single(by_name[seed[0]], seed[1:]), coop)


def write_sftas(sf: StrengthFreeTas) -> str:
    (pos, seed), = sf.seed.items()
    out = [f"seed {seed.name} {pos[0]} {pos[1]}"]
    for t in sf.tile_types:
        if "-" in t.glues:
            raise ValueError("the label '-' is reserved for blank sides")
        out.append(" ".join(g if g != NULL else "-" for g in t.glues) + f" @{t.name}")
        out.append("min: " + " ".join(mask_to_str(m) for m in sf.coop[t].minimal()))
    return "\n".join(out) + "\n"


# -- inequality systems and 1-in-3 instances ----------------------------------

_ROW = re.compile(r"^(.+?)\s*(>=|<)\s*TAU$")


def read_system(text: str) -> TauInequalitySystem:
    variables = None
    rows = []
    strict = False
    partition = None
    for k, line in _lines(text):
        if line.startswith("vars:"):
            if variables is not None:
                raise FormatError("'vars:' given twice", k)
            variables = line[5:].split()
            continue
        if line == "strict":
            strict = True
            continue
        if line.startswith("partition:"):
            partition = _parse_partition(line[10:].split(), k)
            continue
        m = _ROW.match(line)
        if not m:
            raise FormatError(f"cannot parse inequality {line!r}", k)
        terms = [t.strip() for t in m.group(1).split("+")]
        if any(not t or " " in t for t in terms):
            raise FormatError(f"bad left-hand side {m.group(1)!r}", k)
        if variables is not None:
            unknown = [t for t in terms if t not in variables]
            if unknown:
                raise FormatError(f"undeclared variable {unknown[0]!r}", k)
        try:
            rows.append(TauInequality(Sign(m.group(2)), terms))
        except ValueError as e:
            raise FormatError(str(e), k) from None
    try:
        if variables is None:
            return TauInequalitySystem.of(rows, (), strict, partition)
        return TauInequalitySystem(tuple(variables), tuple(rows), strict, partition)
    except ValueError as e:
        raise FormatError(str(e)) from None


def _parse_partition(tokens: list[str], k: int) -> QuadPartition:
    groups = {}
    for tok in tokens:
        key, eq, names = tok.partition("=")
        if not eq or key not in PARTS or key in groups:
            raise FormatError(f"bad partition entry {tok!r}", k)
        groups[key] = [n for n in names.split(",") if n]
    try:
        return QuadPartition(**groups)
    except ValueError as e:
        raise FormatError(str(e), k) from None


def _format_partition(p: QuadPartition, order: Mapping[str, int]) -> str:
    pos = lambda v: (order.get(v, len(order)), v)
    return " ".join(f"{name}={','.join(sorted(part, key=pos))}" for name, part in zip(PARTS, p.parts))


def write_system(s: TauInequalitySystem) -> str:
    out = ["vars: " + " ".join(s.variables)]
    if s.strict_vars:
        out.append("strict")
    out += [str(q) for q in s.inequalities]
    if s.partition is not None:
        order = {v: k for k, v in enumerate(s.variables)}
        out.append("partition: " + _format_partition(s.partition, order))
    return "\n".join(out) + "\n"


def read_instance(text: str) -> OneInThreeInstance:
    variables = None
    clauses = []
    groups: dict[str, list[str]] = {}
    for k, line in _lines(text):
        if line.startswith("vars:"):
            variables = line[5:].split()
            continue
        if line.startswith("part "):
            head, _, names = line[5:].partition(":")
            head = head.strip()
            if head not in ("U1", "U2", "U3", "U4") or head in groups:
                raise FormatError(f"bad part line {line!r}", k)
            groups[head] = names.split()
            continue
        toks = line.split()
        if len(toks) != 3:
            raise FormatError("a clause has exactly three literals", k)
        try:
            clauses.append(tuple(Literal.parse(t) for t in toks))
        except ValueError as e:
            raise FormatError(str(e), k) from None
    if variables is None:
        names = dict.fromkeys(lit.var for c in clauses for lit in c)
        variables = list(names)
    partition = None
    if groups:
        partition = QuadPartition(**{p: groups.get(u, ()) for p, u in zip(PARTS, ("U1", "U2", "U3", "U4"))})
    try:
        return OneInThreeInstance(tuple(variables), tuple(clauses), partition)
    except ValueError as e:
        raise FormatError(str(e)) from None


def write_instance(inst: OneInThreeInstance) -> str:
    out = ["vars: " + " ".join(inst.variables)]
    out += [" ".join(str(lit) for lit in c) for c in inst.clauses]
    if inst.partition is not None:
        order = {v: k for k, v in enumerate(inst.variables)}
        for u, part in zip(("U1", "U2", "U3", "U4"), inst.partition.parts):
            out.append(f"part {u}: " + " ".join(sorted(part, key=lambda v: (order.get(v, 0), v))))
    return "\n".join(out) + "\n"


# -- shapes and value maps -----------------------------------------------------


def read_shape(text: str) -> Shape:
    cells = []
    for k, line in _lines(text):
        toks = line.split()
        if len(toks) != 2:
            raise FormatError("expected '<x> <y>'", k)
        cells.append((_int(toks[0], k), _int(toks[1], k)))
    if len(set(cells)) != len(cells):
        raise FormatError("repeated cell")
    try:
        return Shape(cells)
    except ValueError as e:
        raise FormatError(str(e)) from None


def write_shape(s: Shape) -> str:
    return "".join(f"{x} {y}\n" for x, y in sorted(s))


def write_values(values: Mapping[str, int]) -> str:
    return "".join(f"{k}={values[k]}\n" for k in values)


def read_values(text: str) -> dict[str, int]:
    out = {}
    for k, line in _lines(text):
        key, eq, val = line.partition("=")
        if not eq:
            raise FormatError("expected 'name=value'", k)
        out[key.strip()] = _int(val.strip(), k)
    return out


# -- shape plans ----------------------------------------------------------------


def write_plan(plan) -> str:
    """Construction parameters, trees, mounted items and constants, followed
    by the system itself.  Reading rebuilds the plan and checks every
    listed line against it."""
    out = [f"h {plan.h}", f"bits {plan.bits_len}"]
    for t in plan.trees:
        out.append(f"tree {t.id} {t.tree_type} {t.bits}")
    for it in plan.items:
        comp = "-" if it.component is None else it.component
        out.append(f"item {it.kind} {it.name} copy={it.copy} offset={it.offset[0]},{it.offset[1]} center={int(it.center)} component={comp} trees={','.join(it.trees)}")
    out.append(f"scaffold {plan.scaffold[0]} {plan.scaffold[1]}")
    for k, v in plan.constants.items():
        out.append(f"constant {k} {v}")
    out.append("system:")
    return "\n".join(out) + "\n" + write_system(plan.system)


def read_plan(text: str):
    from .shapegen import build_shape

    head, sep, body = text.partition("system:")
    if not sep:
        raise FormatError("plan has no 'system:' section")
    system = read_system(body)
    h = None
    for k, line in _lines(head):
        toks = line.split()
        if toks[0] == "h" and len(toks) == 2:
            h = _int(toks[1], k)
    if h is None:
        raise FormatError("plan has no 'h' line")
    try:
        _, plan = build_shape(system, None, h)
    except ValueError as e:
        raise FormatError(str(e)) from None
    expected = [line for _, line in _lines(write_plan(plan).partition("system:")[0])]
    given = [line for _, line in _lines(head)]
    if expected != given:
        diff = next((a, b) for a, b in zip(expected + [""] * len(given), given + [""] * len(expected)) if a != b)
        raise FormatError(f"plan does not match its system: expected {diff[0]!r}, found {diff[1]!r}")
    return plan
