"""Core aTAM data model: tile types, strength functions, assemblies, shapes.

Directions follow the counter-clockwise order N, W, S, E used throughout
the package; a direction set is a 4-bit mask with N=1, W=2, S=4, E=8.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

import networkx as nx

__all__ = [
    "NULL",
    "Direction",
    "DIRECTIONS",
    "Position",
    "TileType",
    "StrengthFunction",
    "Shape",
    "Assembly",
    "Tas",
    "binding_graph",
    "is_tau_stable",
    "attachment_strength",
    "is_connected",
    "neighbor",
]

#: The blank glue label; it never binds.
NULL = ""

Position = tuple[int, int]

_LABEL_RE = re.compile(r"^[^\s=#]*$")


class Direction(enum.IntEnum):
    N = 0
    W = 1
    S = 2
    E = 3

    @property
    def vector(self) -> Position:
        return _VECTORS[self]

    @property
    def opposite(self) -> Direction:
        return Direction((self + 2) % 4)

    @property
    def bit(self) -> int:
        return 1 << self


_VECTORS = {
    Direction.N: (0, 1),
    Direction.W: (-1, 0),
    Direction.S: (0, -1),
    Direction.E: (1, 0),
}

DIRECTIONS = tuple(Direction)


def neighbor(p: Position, d: Direction) -> Position:
    dx, dy = _VECTORS[d]
    return (p[0] + dx, p[1] + dy)


def _check_label(label: str) -> str:
    if not isinstance(label, str) or not _LABEL_RE.match(label):
        raise ValueError(f"invalid glue label {label!r}")
    return label


@dataclass(frozen=True)
class TileType:
    """A unit square with one glue label per side."""

    name: str
    north: str = NULL
    west: str = NULL
    south: str = NULL
    east: str = NULL

    def __post_init__(self):
        if not self.name or not _LABEL_RE.match(self.name):
            raise ValueError(f"invalid tile name {self.name!r}")
        for label in self.glues:
            _check_label(label)

    @property
    def glues(self) -> tuple[str, str, str, str]:
        return (self.north, self.west, self.south, self.east)

    def glue(self, d: Direction) -> str:
        return self.glues[d]

    def labels(self) -> set[str]:
        return {lab for lab in self.glues if lab != NULL}


class StrengthFunction(Mapping):
    """Map from glue label to a nonnegative integer strength.

    The NULL label always has strength 0.  Looking up an unknown label
    raises ``KeyError``.
    """

    def __init__(self, strengths: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        data = dict(strengths)
        out = {}
        for label, value in data.items():
            _check_label(label)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise ValueError(f"strength of {label!r} must be a nonnegative integer, got {value!r}")
            if label == NULL and value != 0:
                raise ValueError("the NULL label has forced strength 0")
            if label != NULL:
                out[label] = int(value)
        self._data = out

    def __getitem__(self, label: str) -> int:
        if label == NULL:
            return 0
        return self._data[label]

    def __contains__(self, label) -> bool:
        return label == NULL or label in self._data

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __eq__(self, other) -> bool:
        if isinstance(other, StrengthFunction):
            return self._data == other._data
        if isinstance(other, Mapping):
            return self._data == {k: v for k, v in other.items() if k != NULL}
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._data.items()))

    def __repr__(self) -> str:
        return f"StrengthFunction({self._data!r})"

    def scaled(self, c: int) -> StrengthFunction:
        if c < 1:
            raise ValueError("scale factor must be a positive integer")
        return StrengthFunction({k: c * v for k, v in self._data.items()})


def is_connected(points: Iterable[Position]) -> bool:
    """True iff the full grid graph on ``points`` is connected and nonempty."""
    pts = set(points)
    if not pts:
        return False
    start = next(iter(pts))
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for q in ((x, y + 1), (x - 1, y), (x, y - 1), (x + 1, y)):
            if q in pts and q not in seen:
                seen.add(q)
                queue.append(q)
    return len(seen) == len(pts)


class Shape(frozenset):
    """A finite, nonempty, connected set of lattice points."""

    def __new__(cls, points: Iterable[Position] = ()):
        pts = frozenset((int(x), int(y)) for x, y in points)
        if not is_connected(pts):
            raise ValueError("a shape must be nonempty and connected")
        return super().__new__(cls, pts)

    def translate(self, dx: int, dy: int) -> Shape:
        return Shape((x + dx, y + dy) for x, y in self)

    def bbox(self) -> tuple[int, int, int, int]:
        xs = [p[0] for p in self]
        ys = [p[1] for p in self]
        return min(xs), min(ys), max(xs), max(ys)

    def normalized(self) -> Shape:
        x0, y0, _, _ = self.bbox()
        return self.translate(-x0, -y0)

    def __repr__(self) -> str:
        return f"Shape({sorted(self)!r})"


class Assembly(Mapping):
    """Immutable finite placement of tiles on the lattice.

    Assemblies must be nonempty and connected.
    """

    __slots__ = ("_tiles", "_hash")

    def __init__(self, placement: Mapping[Position, TileType] | Iterable[tuple[Position, TileType]], *, _trusted: bool = False):
        tiles = dict(placement)
        if not _trusted:
            tiles = {(int(p[0]), int(p[1])): t for p, t in tiles.items()}
            if not all(isinstance(t, TileType) for t in tiles.values()):
                raise TypeError("assembly values must be TileType")
            if not is_connected(tiles):
                raise ValueError("an assembly must be nonempty and connected")
        self._tiles = tiles
        self._hash = None

    @classmethod
    def single(cls, tile: TileType, at: Position = (0, 0)) -> Assembly:
        return cls({at: tile}, _trusted=True)

    def __getitem__(self, p: Position) -> TileType:
        return self._tiles[p]

    def __iter__(self):
        return iter(self._tiles)

    def __len__(self) -> int:
        return len(self._tiles)

    def __eq__(self, other) -> bool:
        if isinstance(other, Assembly):
            return self._tiles == other._tiles
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._tiles.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{p}: {t.name}" for p, t in sorted(self._tiles.items()))
        return f"Assembly({{{body}}})"

    def shape(self) -> Shape:
        return Shape(self._tiles)

    def placed(self, p: Position, tile: TileType) -> Assembly:
        if p in self._tiles:
            raise ValueError(f"position {p} already occupied")
        if not any(neighbor(p, d) in self._tiles for d in DIRECTIONS):
            raise ValueError(f"position {p} is not adjacent to the assembly")
        tiles = dict(self._tiles)
        tiles[p] = tile
        return Assembly(tiles, _trusted=True)

    def translate(self, dx: int, dy: int) -> Assembly:
        return Assembly({(x + dx, y + dy): t for (x, y), t in self._tiles.items()}, _trusted=True)


@dataclass(frozen=True)
class Tas:
    """A singly-seeded tile assembly system (T, seed, g, tau).

    Tile types other than the seed's type must be attachable at all, i.e.
    their four glues together reach ``tau``.
    """

    tile_types: tuple[TileType, ...]
    seed: Assembly
    g: StrengthFunction
    tau: int

    def __post_init__(self):
        object.__setattr__(self, "tile_types", tuple(self.tile_types))
        if not isinstance(self.g, StrengthFunction):
            object.__setattr__(self, "g", StrengthFunction(self.g))
        if isinstance(self.tau, bool) or int(self.tau) != self.tau or self.tau < 1:
            raise ValueError("temperature must be a positive integer")
        names = [t.name for t in self.tile_types]
        if len(set(names)) != len(names):
            raise ValueError("tile type names must be unique")
        if len(set(self.tile_types)) != len(self.tile_types):
            raise ValueError("duplicate tile types")
        if len(self.seed) != 1:
            raise ValueError("only singly-seeded systems are supported")
        (seed_tile,) = self.seed.values()
        if seed_tile not in self.tile_types:
            raise ValueError("seed tile type is not in the tile set")
        for t in self.tile_types:
            for label in t.labels():
                if label not in self.g:
                    raise ValueError(f"strength function has no value for label {label!r}")
            if t != seed_tile and sum(self.g[lab] for lab in t.glues) < self.tau:
                raise ValueError(f"tile type {t.name!r} can never attach at temperature {self.tau}")

    @property
    def seed_tile(self) -> TileType:
        return next(iter(self.seed.values()))

    def tile(self, name: str) -> TileType:
        for t in self.tile_types:
            if t.name == name:
                return t
        raise KeyError(name)

    def scaled(self, c: int) -> Tas:
        return Tas(self.tile_types, self.seed, self.g.scaled(c), c * self.tau)


def binding_graph(a: Assembly, g: StrengthFunction) -> nx.Graph:
    """Weighted graph of interacting neighbors in ``a``.

    Edge weights are the strengths of the shared glue labels.
    """
    graph = nx.Graph()
    graph.add_nodes_from(a)
    for p, t in a.items():
        for d in (Direction.N, Direction.E):
            q = neighbor(p, d)
            u = a.get(q)
            if u is None:
                continue
            label = t.glue(d)
            if label != NULL and label == u.glue(d.opposite) and g[label] > 0:
                graph.add_edge(p, q, weight=g[label])
    return graph


def is_tau_stable(a: Assembly, g: StrengthFunction, tau: int) -> bool:
    """True iff every cut of the binding graph of ``a`` has weight >= tau."""
    if len(a) == 1:
        return True
    graph = binding_graph(a, g)
    if not nx.is_connected(graph):
        return False
    cut_value, _ = nx.stoer_wagner(graph)
    return cut_value >= tau


def attachment_strength(a: Mapping[Position, TileType], p: Position, t: TileType, g: StrengthFunction) -> int:
    """Total strength with which ``t`` would bind at the empty position ``p``."""
    if p in a:
        raise ValueError(f"position {p} is occupied")
    total = 0
    adjacent = False
    for d in DIRECTIONS:
        u = a.get(neighbor(p, d))
        if u is None:
            continue
        adjacent = True
        label = t.glue(d)
        if label != NULL and label == u.glue(d.opposite):
            total += g[label]
    if not adjacent:
        raise ValueError(f"position {p} is not adjacent to the assembly")
    return total
