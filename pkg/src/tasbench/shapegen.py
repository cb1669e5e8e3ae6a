"""Shapes that encode a quadripartite tau-inequality system and witness
tile systems that assemble them.

Every variable (and every auxiliary introduced for a ``<`` inequality)
gets a *tree*: a trunk of ``h`` cells standing on a scaffold row, topped by
a crown that ends in a single-cell cooperation tip next to a common center
cell, plus an arm carrying the tree's bit pattern as one-cell
protrusions.  The crown geometry depends on the tree type (the side of the
center its tip touches), so four trees of distinct types can be bundled
around one center without overlapping.

Local coordinates put the component center at ``(0, 0)``.  With
``b = len(bits)``:

* ``S``: tip ``(0,-1)``, crotch ``(0,-2)``, arm west along ``y=-2``.
* ``W``: tip ``(-1,0)``, crotch ``(-2,0)``, arm north along ``x=-2``.
* ``E``: tip ``(1,0)``, crotch ``(2,0)``, arm south along ``x=2``.
* ``N``: tip ``(0,1)``, crotch ``(0,2)``, arm east along ``y=2``.

Trunk tops sit on row ``-(2b+2)``; the crown climbs from there.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .atam import NULL, Assembly, Direction, Position, Shape, StrengthFunction, Tas, TileType, neighbor
from .threshold import PARTS, QuadPartition, Sign, TauInequality, TauInequalitySystem, check_quadripartite, is_tp43

__all__ = [
    "TreeSpec",
    "ComponentSpec",
    "MountedItem",
    "ShapePlan",
    "WitnessTas",
    "tree_cells",
    "foot_position",
    "expected_assembly",
    "build_variable_tree",
    "build_geq_component",
    "build_less_component",
    "component_gadgets",
    "build_shape",
    "build_witness_tas",
    "default_height",
    "render",
    "plan_roles",
]

_DIR = {"N": Direction.N, "W": Direction.W, "S": Direction.S, "E": Direction.E}


@dataclass(frozen=True)
class TreeSpec:
    id: str
    tree_type: str
    bits: str
    height: int

    def __post_init__(self):
        if self.tree_type not in PARTS:
            raise ValueError(f"tree type must be one of {PARTS}")
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise ValueError("bits must be a nonempty 0/1 string")
        if self.height < 1:
            raise ValueError("tree height must be positive")


@dataclass(frozen=True)
class _Cell:
    pos: Position
    parent: Position | None
    role: str  # trunk, crown, crotch, tip, arm, protrusion


def _crown_top(b: int) -> int:
    return -(2 * b + 2)


def tree_cells(spec: TreeSpec) -> list[_Cell]:
    """Cells of a tree in growth order, each with its parent cell.

    The root (first cell) has no parent; it binds to the scaffold below it.
    """
    b = len(spec.bits)
    top = _crown_top(b)
    bottom = top - spec.height + 1
    t = spec.tree_type
    path: list[Position] = []
    if t == "S":
        path = [(0, y) for y in range(bottom, -1)]
        tip, arm_dir, prot = (0, -1), (-1, 0), (0, -1)
    elif t == "W":
        x0 = -(2 * b + 2)
        path = [(x0, y) for y in range(bottom, 1)] + [(x, 0) for x in range(x0 + 1, -1)]
        tip, arm_dir, prot = (-1, 0), (0, 1), (-1, 0)
    elif t == "E":
        x0 = 2 * b + 2
        path = [(x0, y) for y in range(bottom, 1)] + [(x, 0) for x in range(x0 - 1, 1, -1)]
        tip, arm_dir, prot = (1, 0), (0, -1), (1, 0)
    else:
        x0, ytop = -(2 * b + 4), 2 * b + 2
        path = [(x0, y) for y in range(bottom, ytop + 1)] + [(x, ytop) for x in range(x0 + 1, 1)]
        path += [(0, y) for y in range(ytop - 1, 1, -1)]
        tip, arm_dir, prot = (0, 1), (1, 0), (0, 1)
    cells = []
    prev = None
    for k, p in enumerate(path):
        role = "trunk" if k < spec.height else "crown"
        cells.append(_Cell(p, prev, role))
        prev = p
    crotch = path[-1]
    cells[-1] = _Cell(crotch, cells[-1].parent, "crotch")
    cells.append(_Cell(tip, crotch, "tip"))
    arm_prev = crotch
    arm = []
    for k in range(1, 2 * b + 1):
        p = (crotch[0] + k * arm_dir[0], crotch[1] + k * arm_dir[1])
        cells.append(_Cell(p, arm_prev, "arm"))
        arm.append(p)
        arm_prev = p
    for k, bit in enumerate(spec.bits):
        host = arm[2 * k] if bit == "1" else arm[2 * k + 1]
        cells.append(_Cell((host[0] + prot[0], host[1] + prot[1]), host, "protrusion"))
    return cells


def foot_position(spec: TreeSpec) -> Position:
    """Cell west of the root.  A per-placement foot tile there lets the root
    attach by cooperation (tau-1 from the scaffold, 1 from the foot), so no
    single shared bond can pull a scaffold tile in backwards."""
    x, y = tree_cells(spec)[0].pos
    return (x - 1, y)


def build_variable_tree(spec: TreeSpec) -> Shape:
    """The tree's cells in component-local coordinates."""
    return Shape(c.pos for c in tree_cells(spec))


@dataclass(frozen=True)
class ComponentSpec:
    """An inequality, the trees of its variables and, for ``<``, one
    auxiliary tree of a type none of the variables use."""

    index: int
    inequality: TauInequality
    pillars: tuple[TreeSpec, ...]
    aux: TreeSpec | None = None

    def __post_init__(self):
        types = [p.tree_type for p in self.pillars]
        if len(set(types)) != len(types):
            raise ValueError("two pillars of one component share a tree type")
        if (self.aux is not None) != (self.inequality.sign is Sign.LT_TAU):
            raise ValueError("an auxiliary tree is present exactly for < inequalities")
        if self.aux is not None and self.aux.tree_type in types:
            raise ValueError("auxiliary tree type collides with a pillar")
        if len(self.pillars) > (4 if self.aux is None else 3):
            raise ValueError("too many pillars")


def component_gadgets(spec: ComponentSpec) -> list[tuple[tuple[TreeSpec, ...], bool]]:
    """The gadgets of a component as (trees, center filled) pairs.

    A ``>=`` component is a single gadget.  A ``<`` component has the full
    gadget with its center filled, then one gadget per tree left out, in
    tree order, with the center empty.
    """
    if spec.aux is None:
        return [(spec.pillars, True)]
    trees = spec.pillars + (spec.aux,)
    out = [(trees, True)]
    for k in range(len(trees)):
        out.append((trees[:k] + trees[k + 1:], False))
    return out


def _gadget_cells(trees: Sequence[TreeSpec], center: bool) -> set[Position]:
    cells: set[Position] = set()
    for t in trees:
        mine = {c.pos for c in tree_cells(t)}
        if cells & mine:
            raise AssertionError(f"tree {t.id} overlaps another pillar")
        cells |= mine
    if center:
        cells.add((0, 0))
    return cells


def build_geq_component(spec: ComponentSpec) -> Shape:
    if spec.inequality.sign is not Sign.GEQ_TAU:
        raise ValueError("not a >= inequality")
    (trees, center), = component_gadgets(spec)
    return Shape(_gadget_cells(trees, center))


def build_less_component(spec: ComponentSpec, gap: int = 1) -> Shape:
    """The component's gadgets side by side on a shared base row."""
    if spec.inequality.sign is not Sign.LT_TAU:
        raise ValueError("not a < inequality")
    cells: set[Position] = set()
    cursor = 0
    base = None
    for trees, center in component_gadgets(spec):
        g = _gadget_cells(trees, center)
        x0 = min(x for x, _ in g)
        x1 = max(x for x, _ in g)
        y0 = min(y for _, y in g)
        base = y0 - 1 if base is None else base
        cells |= {(x - x0 + cursor, y) for x, y in g}
        cursor += x1 - x0 + 1 + gap
    cells |= {(x, base) for x in range(cursor - gap)}
    return Shape(cells)


@dataclass(frozen=True)
class MountedItem:
    """One footprint on the scaffold: a lone tree or a gadget."""

    kind: str  # tree, geq, less
    name: str
    copy: int
    trees: tuple[str, ...]
    center: bool
    offset: tuple[int, int]
    component: int | None = None


@dataclass(frozen=True)
class ShapePlan:
    system: TauInequalitySystem
    partition: QuadPartition
    h: int
    bits_len: int
    trees: tuple[TreeSpec, ...]
    variable_trees: tuple[str, ...]
    components: tuple[ComponentSpec, ...]
    items: tuple[MountedItem, ...]
    scaffold: tuple[int, int]
    constants: Mapping[str, int] = field(default_factory=dict)

    def tree(self, tree_id: str) -> TreeSpec:
        for t in self.trees:
            if t.id == tree_id:
                return t
        raise KeyError(tree_id)

    @property
    def n(self) -> int:
        return len(self.variable_trees)

    @property
    def c_prime(self) -> int:
        return len(self.trees) - len(self.variable_trees)


def default_height(n_trees: int) -> int:
    bits = max(1, math.ceil(math.log2(max(n_trees, 2))))
    return max(8, 2 * bits + 6)


def _validate(system: TauInequalitySystem, partition: QuadPartition | None) -> QuadPartition:
    partition = partition if partition is not None else system.partition
    if partition is None:
        raise ValueError("a quadripartition is required")
    if not is_tp43(system):
        raise ValueError("system is not TP(4,3)")
    if not check_quadripartite(system, partition):
        raise ValueError("system is not quadripartite under the given partition")
    return partition


def build_shape(system: TauInequalitySystem, partition: QuadPartition | None = None, h: int | None = None, *, gap: int = 1) -> tuple[Shape, ShapePlan]:
    """Mount two copies of every tree and every gadget on a scaffold row.

    The scaffold is row ``y = 0`` starting at ``x = 0``; roots stand on it.
    """
    partition = _validate(system, partition)
    part = partition.as_mapping()
    n_lt = sum(1 for q in system.inequalities if q.sign is Sign.LT_TAU)
    n_trees = len(system.variables) + n_lt
    bits_len = max(1, math.ceil(math.log2(max(n_trees, 2))))
    if h is None:
        h = default_height(n_trees)
    if h < 1:
        raise ValueError("height must be positive")
    codes = iter(format(k, f"0{bits_len}b") for k in range(n_trees))
    var_tree = {v: TreeSpec(f"v:{v}", part[v], next(codes), h) for v in system.variables}
    trees = list(var_tree.values())
    components = []
    for k, ineq in enumerate(system.inequalities):
        pillars = tuple(var_tree[v] for v in ineq.terms)
        aux = None
        if ineq.sign is Sign.LT_TAU:
            used = {p.tree_type for p in pillars}
            aux = TreeSpec(f"aux:{k}", next(p for p in PARTS if p not in used), next(codes), h)
            trees.append(aux)
        components.append(ComponentSpec(k, ineq, pillars, aux))

    by_id = {t.id: t for t in trees}
    footprints: list[tuple[str, str, int, tuple[TreeSpec, ...], bool, int | None]] = []
    for t in trees:
        for copy in (1, 2):
            footprints.append(("tree", t.id, copy, (t,), False, None))
    for comp in components:
        kind = "geq" if comp.aux is None else "less"
        for copy in (1, 2):
            for g, (gtrees, center) in enumerate(component_gadgets(comp)):
                footprints.append((kind, f"c{comp.index}.g{g}", copy, gtrees, center, comp.index))

    root_row = _crown_top(bits_len) - h + 1
    cells: set[Position] = set()
    items = []
    cursor = 0
    for kind, name, copy, gtrees, center, comp in footprints:
        local = _gadget_cells(gtrees, center) | {foot_position(t) for t in gtrees}
        x0 = min(x for x, _ in local)
        x1 = max(x for x, _ in local)
        dx, dy = cursor - x0, 1 - root_row
        placed = {(x + dx, y + dy) for x, y in local}
        if cells & placed:
            raise AssertionError("footprints overlap")
        cells |= placed
        items.append(MountedItem(kind, name, copy, tuple(t.id for t in gtrees), center, (dx, dy), comp))
        cursor += x1 - x0 + 1 + gap
    x_end = cursor - gap - 1
    cells |= {(x, 0) for x in range(0, x_end + 1)}
    shape = Shape(cells)
    plan = ShapePlan(
        system.with_partition(partition) if system.partition is None else system,
        partition,
        h,
        bits_len,
        tuple(trees),
        tuple(var_tree[v].id for v in system.variables),
        tuple(components),
        tuple(items),
        (0, x_end),
    )
    consts = _constants(plan, by_id)
    object.__setattr__(plan, "constants", consts)
    return shape, plan


def _crown_size(t: TreeSpec) -> int:
    return len(tree_cells(t)) - t.height


def _constants(plan: ShapePlan, by_id: Mapping[str, TreeSpec]) -> dict[str, int]:
    scaffold = plan.scaffold[1] - plan.scaffold[0] + 1
    crowns = sum(_crown_size(t) for t in plan.trees)
    centers = len(plan.components)
    feet = sum(len(it.trees) for it in plan.items)
    return {
        "n": plan.n,
        "c_prime": plan.c_prime,
        "scaffold": scaffold,
        "crowns": crowns,
        "centers": centers,
        "feet": feet,
        "c": scaffold + crowns + centers + feet,
    }


# ---------------------------------------------------------------------------
# witness TAS


@dataclass(frozen=True)
class WitnessTas:
    tas: Tas
    type_count_breakdown: Mapping[str, int]
    plan: ShapePlan


def _side(a: Position, b: Position) -> Direction:
    """Direction from ``a`` to its neighbor ``b``."""
    for d in Direction:
        if neighbor(a, d) == b:
            return d
    raise AssertionError(f"{a} and {b} are not neighbors")


def tip_label(tree_id: str) -> str:
    return f"l[{tree_id}]"


def _tree_tiles(spec: TreeSpec) -> tuple[list[TileType], dict[Position, TileType]]:
    """Tile types of one tree and the type used at each local cell."""
    cells = tree_cells(spec)
    index = {c.pos: k for k, c in enumerate(cells)}
    glues: dict[Position, list[str]] = {c.pos: [NULL] * 4 for c in cells}
    for k, c in enumerate(cells):
        label = f"{spec.id}/{k}"
        if c.parent is None:
            glues[c.pos][Direction.S] = label
            glues[c.pos][Direction.W] = f"{spec.id}/foot"
        else:
            d = _side(c.parent, c.pos)
            glues[c.parent][d] = label
            glues[c.pos][d.opposite] = label
    tip = next(c for c in cells if c.role == "tip")
    toward = _side(tip.pos, (0, 0))
    glues[tip.pos][toward] = tip_label(spec.id)
    at = {c.pos: TileType(f"{spec.id}.{index[c.pos]}", *glues[c.pos]) for c in cells}
    return list(at.values()), at


def build_witness_tas(system: TauInequalitySystem, partition: QuadPartition | None, solution: Mapping[str, int], tau: int, h: int | None = None) -> WitnessTas:
    """A temperature-``tau`` system assembling ``build_shape(system, ...)``.

    ``solution`` must satisfy the system at ``tau`` with every value in
    ``[1, tau - 1]``.  Tip glues carry the solution values, auxiliary tips
    of a ``<`` inequality carry ``tau`` minus the sum of its values, and
    structural bonds have strength ``tau`` except the two root bonds
    (``tau - 1`` to the scaffold, 1 to the foot).
    """
    partition = _validate(system, partition)
    if not system.satisfied_by(solution, tau):
        raise ValueError("solution does not satisfy the system")
    bad = [v for v in system.variables if not 1 <= solution[v] <= tau - 1]
    if bad:
        raise ValueError(f"solution values must lie in [1, tau-1]; violated by {bad[:5]}")
    shape, plan = build_shape(system, partition, h)

    strengths: dict[str, int] = {}
    tree_types: dict[str, list[TileType]] = {}
    tree_at: dict[str, dict[Position, TileType]] = {}
    for t in plan.trees:
        types, at = _tree_tiles(t)
        tree_types[t.id] = types
        tree_at[t.id] = at
        for tile in at.values():
            for lab in tile.labels():
                strengths.setdefault(lab, tau)
    for t in plan.trees:
        strengths[f"{t.id}/0"] = tau - 1
        strengths[f"{t.id}/foot"] = 1
    for v in system.variables:
        strengths[tip_label(f"v:{v}")] = solution[v]

    centers: dict[int, TileType] = {}
    for comp in plan.components:
        trees = comp.pillars + ((comp.aux,) if comp.aux else ())
        sides = [NULL] * 4
        for t in trees:
            sides[_DIR[t.tree_type]] = tip_label(t.id)
        centers[comp.index] = TileType(f"center.{comp.index}", *sides)
        if comp.aux is not None:
            total = sum(solution[v] for v in comp.inequality.terms)
            strengths[tip_label(comp.aux.id)] = tau - total

    x0, x1 = plan.scaffold
    scaffold_types = []
    above: dict[int, str] = {}
    feet = []
    for item in plan.items:
        dx, dy = item.offset
        for tid in item.trees:
            spec = plan.tree(tid)
            root = tree_cells(spec)[0].pos
            above[root[0] + dx] = f"{tid}/0"
            fx = foot_position(spec)[0] + dx
            k = len(feet)
            above[fx] = f"foot/{k}"
            strengths[f"foot/{k}"] = tau
            feet.append(TileType(f"foot.{k}", NULL, NULL, f"foot/{k}", f"{tid}/foot"))
    for x in range(x0, x1 + 1):
        west = f"scaf/{x - 1}" if x > x0 else NULL
        east = f"scaf/{x}" if x < x1 else NULL
        north = above.get(x, NULL)
        scaffold_types.append(TileType(f"scaf.{x}", north, west, NULL, east))
        for lab in (west, east):
            if lab:
                strengths[lab] = tau

    all_types = scaffold_types[:]
    for t in plan.trees:
        all_types += tree_types[t.id]
    all_types += list(centers.values())
    all_types += feet
    seed = Assembly.single(scaffold_types[0], (x0, 0))
    tas = Tas(tuple(all_types), seed, StrengthFunction(strengths), tau)

    crowns = sum(len(tree_types[t.id]) - plan.h for t in plan.trees)
    breakdown = {
        "trees": len(plan.trees),
        "per_tree_height": plan.h,
        "scaffold": len(scaffold_types),
        "crowns": crowns,
        "centers": len(centers),
        "feet": len(feet),
    }
    expected = len(plan.trees) * plan.h + plan.constants["c"]
    if len(tas.tile_types) != expected or crowns != plan.constants["crowns"] or len(feet) != plan.constants["feet"]:
        raise AssertionError(f"tile count {len(tas.tile_types)} does not match (n+c')h + c = {expected}")
    return WitnessTas(tas, breakdown, plan)


def expected_assembly(w: WitnessTas) -> Assembly:
    """The terminal assembly the witness system is designed to build."""
    plan = w.plan
    tiles = {t.name: t for t in w.tas.tile_types}
    out: dict[Position, TileType] = {}
    x0, x1 = plan.scaffold
    for x in range(x0, x1 + 1):
        out[(x, 0)] = tiles[f"scaf.{x}"]
    cache = {t.id: _tree_tiles(t)[1] for t in plan.trees}
    k = 0
    for item in plan.items:
        dx, dy = item.offset
        for tid in item.trees:
            for (x, y), t in cache[tid].items():
                out[(x + dx, y + dy)] = t
            fx, fy = foot_position(plan.tree(tid))
            out[(fx + dx, fy + dy)] = tiles[f"foot.{k}"]
            k += 1
        if item.center:
            out[(dx, dy)] = tiles[f"center.{item.component}"]
    return Assembly(out)


# ---------------------------------------------------------------------------
# rendering


def plan_roles(plan: ShapePlan) -> dict[Position, str]:
    """Cell -> role letter: ``s`` scaffold, tree type letter, ``c`` center,
    ``p`` protrusion, ``t`` tip, ``f`` foot."""
    roles: dict[Position, str] = {}
    x0, x1 = plan.scaffold
    for x in range(x0, x1 + 1):
        roles[(x, 0)] = "s"
    for item in plan.items:
        dx, dy = item.offset
        for tid in item.trees:
            spec = plan.tree(tid)
            for c in tree_cells(spec):
                ch = {"protrusion": "p", "tip": "t"}.get(c.role, spec.tree_type)
                roles[(c.pos[0] + dx, c.pos[1] + dy)] = ch
            fx, fy = foot_position(spec)
            roles[(fx + dx, fy + dy)] = "f"
        if item.center:
            roles[(dx, dy)] = "c"
    return roles


_COLORS = {"s": "#777777", "N": "#4e79a7", "W": "#59a14f", "S": "#e15759", "E": "#f28e2b", "c": "#222222", "p": "#b07aa1", "t": "#edc948", "f": "#9c755f", "#": "#4e79a7"}


def render(s: Shape, style: str = "ascii", roles: Mapping[Position, str] | None = None, cell: int = 16) -> str:
    """Draw a shape, top row first.

    ``ascii`` uses ``#`` (or the role letter) for cells and ``.`` for
    empty lattice points; ``svg`` draws ``cell``-pixel squares.
    """
    x0, y0, x1, y1 = s.bbox()
    if style == "ascii":
        rows = []
        for y in range(y1, y0 - 1, -1):
            row = []
            for x in range(x0, x1 + 1):
                if (x, y) in s:
                    row.append(roles.get((x, y), "#") if roles else "#")
                else:
                    row.append(".")
            rows.append("".join(row))
        return "\n".join(rows) + "\n"
    if style == "svg":
        w = (x1 - x0 + 1) * cell
        hgt = (y1 - y0 + 1) * cell
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}">']
        for x, y in sorted(s, key=lambda p: (-p[1], p[0])):
            role = roles.get((x, y), "#") if roles else "#"
            px, py = (x - x0) * cell, (y1 - y) * cell
            out.append(f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" fill="{_COLORS.get(role, "#4e79a7")}" stroke="#ffffff" stroke-width="1"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown render style {style!r}")
