"""Assembly dynamics: attachment steps, terminal assemblies, directedness,
strict self-assembly and a micro-scale directed tile complexity oracle.

Directedness and strict self-assembly are decided without enumerating the
full producible set whenever possible.  One terminal assembly ``A`` is grown
greedily; the system is directed with unique terminal ``A`` iff for every
non-seed position ``q`` of ``A`` no other tile type can attach at ``q`` to
the largest producible sub-assembly of ``A`` that avoids ``q``.  Positions
where no other type can bind even against all of ``A``'s neighbors are
skipped, so the check is near linear for well-designed systems.
"""

from __future__ import annotations

import bisect
import enum
import heapq
import itertools
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .atam import (
    DIRECTIONS,
    NULL,
    Assembly,
    Position,
    Shape,
    Tas,
    TileType,
    attachment_strength,
    is_tau_stable,
    neighbor,
)

__all__ = [
    "AttachmentEvent",
    "SimulationBounds",
    "ResourcesExceeded",
    "Outcome",
    "StrictAssemblyVerdict",
    "frontier",
    "step",
    "grow_terminal",
    "terminal_assemblies",
    "is_directed",
    "strictly_self_assembles",
    "tile_complexity_oracle",
    "bounded_tile_complexity",
    "ORACLE_MAX_CELLS",
]

ORACLE_MAX_CELLS = 6
ORACLE_MAX_TYPES = 4


class ResourcesExceeded(Exception):
    """A search hit one of its explicit resource bounds."""

    def __init__(self, reason: str, explored: int = 0):
        super().__init__(f"{reason} (explored {explored})")
        self.reason = reason
        self.explored = explored


@dataclass(frozen=True)
class AttachmentEvent:
    position: Position
    tile: TileType
    strength: int


@dataclass(frozen=True)
class SimulationBounds:
    region: Shape | None = None
    max_assemblies: int = 100_000
    max_size: int = 10_000

    def __post_init__(self):
        if self.max_assemblies < 1 or self.max_size < 1:
            raise ValueError("simulation limits must be positive")


class Outcome(enum.Enum):
    YES = "yes"
    NO = "no"
    RESOURCES_EXCEEDED = "resources_exceeded"


@dataclass(frozen=True)
class StrictAssemblyVerdict:
    outcome: Outcome
    witness: Assembly | None = None
    reason: str = ""

    def __post_init__(self):
        if (self.witness is not None) != (self.outcome is Outcome.NO):
            raise ValueError("a witness is present exactly for negative verdicts")

    def __bool__(self) -> bool:
        return self.outcome is Outcome.YES


class _Kinetics:
    """Attachment lookup tables for one tile set, strength function and tau."""

    def __init__(self, glues: Sequence[Sequence[str]], g: Mapping[str, int], tau: int):
        self.glues = [tuple(gl) for gl in glues]
        self.tau = tau
        self.strength = [[g[lab] if lab != NULL else 0 for lab in gl] for gl in self.glues]
        # (side of the new tile, label) -> tile indices exposing it there
        self.by_side: dict[tuple[int, str], list[int]] = defaultdict(list)
        for i, gl in enumerate(self.glues):
            for d in range(4):
                if gl[d] != NULL and self.strength[i][d] > 0:
                    self.by_side[(d, gl[d])].append(i)

    @classmethod
    def of(cls, tas: Tas) -> _Kinetics:
        kin = cls([t.glues for t in tas.tile_types], tas.g, tas.tau)
        kin.tiles = tas.tile_types
        kin.index = {t: i for i, t in enumerate(tas.tile_types)}
        return kin

    def strengths_at(self, occ: Mapping[Position, int], p: Position) -> dict[int, int]:
        totals: dict[int, int] = defaultdict(int)
        for d in DIRECTIONS:
            u = occ.get(neighbor(p, d))
            if u is None:
                continue
            label = self.glues[u][d.opposite]
            if label == NULL:
                continue
            for i in self.by_side.get((d, label), ()):
                totals[i] += self.strength[i][d]
        return totals

    def attachable(self, occ: Mapping[Position, int], p: Position) -> list[int]:
        return sorted(i for i, s in self.strengths_at(occ, p).items() if s >= self.tau)

    def frontier(self, occ: Mapping[Position, int]) -> list[tuple[Position, int, int]]:
        empty = {neighbor(p, d) for p in occ for d in DIRECTIONS} - occ.keys()
        events = []
        for p in sorted(empty):
            for i, s in sorted(self.strengths_at(occ, p).items()):
                if s >= self.tau:
                    events.append((p, i, s))
        return events


class _Escape(Exception):
    def __init__(self, position: Position, tile: int):
        self.position = position
        self.tile = tile


def _saturate(kin: _Kinetics, occ: dict[Position, int], pick, limit: int) -> dict[Position, int]:
    """Attach tiles chosen by ``pick`` until nothing more attaches.

    Positions are processed smallest first so the result is reproducible.
    """
    heap = sorted({neighbor(p, d) for p in occ for d in DIRECTIONS} - occ.keys())
    while heap:
        p = heapq.heappop(heap)
        if p in occ:
            continue
        t = pick(occ, p)
        if t is None:
            continue
        occ[p] = t
        if len(occ) > limit:
            raise ResourcesExceeded("assembly size limit exceeded", len(occ))
        for d in DIRECTIONS:
            q = neighbor(p, d)
            if q not in occ:
                heapq.heappush(heap, q)
    return occ


def _greedy_pick(kin: _Kinetics, region: frozenset | None):
    def pick(occ, p):
        options = kin.attachable(occ, p)
        if not options:
            return None
        if region is not None and p not in region:
            raise _Escape(p, options[0])
        return options[0]

    return pick


def _restricted_closure(kin: _Kinetics, target: Mapping[Position, int], seed: Position, avoid: Position) -> dict[Position, int]:
    """Largest producible sub-assembly of ``target`` not covering ``avoid``."""

    def pick(occ, p):
        t = target.get(p)
        if t is None or p == avoid:
            return None
        return t if kin.strengths_at(occ, p).get(t, 0) >= kin.tau else None

    return _saturate(kin, {seed: target[seed]}, pick, len(target))


def _divergence(kin: _Kinetics, occ: Mapping[Position, int], seed: Position):
    """Find a producible assembly that disagrees with terminal ``occ``.

    Returns ``None`` when ``occ`` is the unique terminal assembly and every
    producible assembly is a sub-assembly of it.
    """
    cut = None
    for q in sorted(occ):
        if q == seed:
            continue
        others = [i for i in kin.attachable(_without(occ, q), q) if i != occ[q]]
        if not others:
            continue
        if cut is None:
            cut = _CutInfo(kin, occ, seed)
        if not any(cut.supported(kin, occ, q, i) for i in others):
            continue
        partial = _restricted_closure(kin, occ, seed, q)
        alternatives = [i for i in kin.attachable(partial, q) if i != occ[q]]
        if alternatives:
            partial = dict(partial)
            partial[q] = alternatives[0]
            return partial
    return None


class _CutInfo:
    """DFS numbering of the binding graph of ``occ`` rooted at the seed.

    Removing a cut vertex ``q`` disconnects the subtrees of its children
    whose lowpoint does not climb above ``q``; no tile there can attach
    before ``q`` does.
    """

    def __init__(self, kin: _Kinetics, occ: Mapping[Position, int], seed: Position):
        self.disc: dict[Position, int] = {}
        self.fin: dict[Position, int] = {}
        self.low: dict[Position, int] = {}
        self.parent: dict[Position, Position | None] = {seed: None}
        self.children: dict[Position, list[Position]] = {}
        counter = 0
        self.disc[seed] = self.low[seed] = counter
        stack = [(seed, iter(self._bonded(kin, occ, seed)))]
        while stack:
            p, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                counter += 1
                self.fin[p] = counter
                par = self.parent[p]
                if par is not None:
                    self.low[par] = min(self.low[par], self.low[p])
                continue
            if nxt not in self.disc:
                counter += 1
                self.disc[nxt] = self.low[nxt] = counter
                self.parent[nxt] = p
                self.children.setdefault(p, []).append(nxt)
                stack.append((nxt, iter(self._bonded(kin, occ, nxt))))
            elif nxt != self.parent[p]:
                self.low[p] = min(self.low[p], self.disc[nxt])

    @staticmethod
    def _bonded(kin, occ, p):
        t = occ[p]
        for d in DIRECTIONS:
            u = neighbor(p, d)
            v = occ.get(u)
            if v is not None and kin.glues[t][d] != NULL and kin.glues[t][d] == kin.glues[v][d.opposite] and kin.strength[t][d] > 0:
                yield u

    def _separated(self, q: Position, u: Position) -> bool:
        if u not in self.disc:
            return True
        # u lies in the DFS subtree of a child of q that q cuts off
        if not (self.disc[q] < self.disc[u] and self.fin[u] <= self.fin[q]):
            return False
        kids = self.children[q]
        k = bisect.bisect_right([self.disc[c] for c in kids], self.disc[u]) - 1
        return self.low[kids[k]] >= self.disc[q]

    def supported(self, kin: _Kinetics, occ: Mapping[Position, int], q: Position, i: int) -> bool:
        """Whether tile ``i`` can reach tau at ``q`` from neighbors still reachable without ``q``."""
        total = 0
        for d in DIRECTIONS:
            u = neighbor(q, d)
            v = occ.get(u)
            if v is None or self._separated(q, u):
                continue
            label = kin.glues[v][d.opposite]
            if label != NULL and label == kin.glues[i][d]:
                total += kin.strength[i][d]
        return total >= kin.tau


class _Without(Mapping):
    """View of a placement with one position removed."""

    def __init__(self, occ, q):
        self._occ = occ
        self._q = q

    def __getitem__(self, p):
        if p == self._q:
            raise KeyError(p)
        return self._occ[p]

    def get(self, p, default=None):
        if p == self._q:
            return default
        return self._occ.get(p, default)

    def __iter__(self):
        return (p for p in self._occ if p != self._q)

    def __len__(self):
        return len(self._occ) - (self._q in self._occ)


def _without(occ, q):
    return _Without(occ, q)


def _to_assembly(kin: _Kinetics, occ: Mapping[Position, int]) -> Assembly:
    return Assembly({p: kin.tiles[i] for p, i in occ.items()}, _trusted=True)


def _from_assembly(kin: _Kinetics, a: Assembly) -> dict[Position, int]:
    try:
        return {p: kin.index[t] for p, t in a.items()}
    except KeyError as exc:
        raise ValueError(f"assembly uses a tile type outside the system: {exc}") from None


def _seed_state(kin: _Kinetics, tas: Tas) -> tuple[Position, dict[Position, int]]:
    (pos, tile), = tas.seed.items()
    return pos, {pos: kin.index[tile]}


# ---------------------------------------------------------------------------
# single steps


def frontier(tas: Tas, a: Assembly) -> list[AttachmentEvent]:
    """All single-tile attachments to ``a`` with strength at least tau.

    Events are ordered by (position, tile index).
    """
    kin = _Kinetics.of(tas)
    occ = _from_assembly(kin, a)
    return [AttachmentEvent(p, kin.tiles[i], s) for p, i, s in kin.frontier(occ)]


def step(tas: Tas, a: Assembly, e: AttachmentEvent) -> Assembly:
    if e.position in a:
        raise ValueError(f"position {e.position} is occupied")
    if e.tile not in tas.tile_types:
        raise ValueError(f"tile type {e.tile.name!r} is not in the system")
    s = attachment_strength(a, e.position, e.tile, tas.g)
    if s < tas.tau or s != e.strength:
        raise ValueError(f"{e} is not a frontier event (strength {s}, tau {tas.tau})")
    return a.placed(e.position, e.tile)


# ---------------------------------------------------------------------------
# global behavior


def grow_terminal(tas: Tas, bounds: SimulationBounds = SimulationBounds()) -> Assembly:
    """Grow one terminal assembly by always attaching at the smallest position."""
    kin = _Kinetics.of(tas)
    _, occ = _seed_state(kin, tas)
    region = frozenset(bounds.region) if bounds.region is not None else None
    try:
        _saturate(kin, occ, _greedy_pick(kin, region), bounds.max_size)
    except _Escape as esc:
        raise ResourcesExceeded(f"attachment at {esc.position} leaves the region", len(occ)) from None
    return _to_assembly(kin, occ)


def terminal_assemblies(tas: Tas, bounds: SimulationBounds = SimulationBounds(), *, check_stability: bool = False) -> frozenset[Assembly]:
    """Exact set of producible terminal assemblies, by exhaustive search.

    Raises :class:`ResourcesExceeded` when the search would leave
    ``bounds.region``, grow past ``bounds.max_size`` tiles or visit more than
    ``bounds.max_assemblies`` distinct assemblies.
    """
    kin = _Kinetics.of(tas)
    _, occ0 = _seed_state(kin, tas)
    region = frozenset(bounds.region) if bounds.region is not None else None
    seen = {frozenset(occ0.items())}
    stack = [occ0]
    terminal = []
    while stack:
        occ = stack.pop()
        if check_stability:
            assert is_tau_stable(_to_assembly(kin, occ), tas.g, tas.tau)
        events = kin.frontier(occ)
        if not events:
            terminal.append(occ)
            continue
        for p, i, _ in reversed(events):
            if region is not None and p not in region:
                raise ResourcesExceeded(f"attachment at {p} leaves the region", len(seen))
            if len(occ) + 1 > bounds.max_size:
                raise ResourcesExceeded("assembly size limit exceeded", len(seen))
            key = frozenset(occ.items()) | {(p, i)}
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > bounds.max_assemblies:
                raise ResourcesExceeded("assembly count limit exceeded", len(seen))
            nxt = dict(occ)
            nxt[p] = i
            stack.append(nxt)
    return frozenset(_to_assembly(kin, occ) for occ in terminal)


def is_directed(tas: Tas, bounds: SimulationBounds = SimulationBounds()) -> bool:
    """Whether the producible assemblies form a directed poset.

    Raises :class:`ResourcesExceeded` if the greedily grown assembly does not
    terminate within ``bounds``.
    """
    kin = _Kinetics.of(tas)
    seed, occ = _seed_state(kin, tas)
    region = frozenset(bounds.region) if bounds.region is not None else None
    try:
        _saturate(kin, occ, _greedy_pick(kin, region), bounds.max_size)
    except _Escape as esc:
        raise ResourcesExceeded(f"attachment at {esc.position} leaves the region", len(occ)) from None
    return _divergence(kin, occ, seed) is None


def strictly_self_assembles(tas: Tas, s: Shape, max_states: int = 200_000) -> StrictAssemblyVerdict:
    """Decide whether every terminal assembly of ``tas`` has shape ``s``.

    Directed systems are settled by the greedy-growth certificate.  Other
    systems fall back to exhaustive search restricted to ``s``, which gives
    up with ``RESOURCES_EXCEEDED`` beyond ``max_states`` assemblies.
    """
    kin = _Kinetics.of(tas)
    seed, occ = _seed_state(kin, tas)
    region = frozenset(s)
    if seed not in region:
        return StrictAssemblyVerdict(Outcome.NO, tas.seed, "seed lies outside the shape")
    try:
        _saturate(kin, occ, _greedy_pick(kin, region), len(region))
    except _Escape as esc:
        occ[esc.position] = esc.tile
        return StrictAssemblyVerdict(Outcome.NO, _to_assembly(kin, occ), f"tile attaches outside the shape at {esc.position}")
    if occ.keys() != region:
        return StrictAssemblyVerdict(Outcome.NO, _to_assembly(kin, occ), "terminal assembly has the wrong shape")
    if _divergence(kin, occ, seed) is None:
        return StrictAssemblyVerdict(Outcome.YES, reason="unique terminal assembly")
    return _exhaustive_strict(kin, seed, occ_seed={seed: occ[seed]}, region=region, max_states=max_states)


def _exhaustive_strict(kin, seed, occ_seed, region, max_states) -> StrictAssemblyVerdict:
    seen = {frozenset(occ_seed.items())}
    stack = [occ_seed]
    while stack:
        occ = stack.pop()
        events = kin.frontier(occ)
        if not events:
            if occ.keys() != region:
                return StrictAssemblyVerdict(Outcome.NO, _to_assembly(kin, occ), "terminal assembly has the wrong shape")
            continue
        for p, i, _ in events:
            if p not in region:
                bad = dict(occ)
                bad[p] = i
                return StrictAssemblyVerdict(Outcome.NO, _to_assembly(kin, bad), f"tile attaches outside the shape at {p}")
        for p, i, _ in reversed(events):
            key = frozenset(occ.items()) | {(p, i)}
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > max_states:
                return StrictAssemblyVerdict(Outcome.RESOURCES_EXCEEDED, reason=f"more than {max_states} assemblies")
            nxt = dict(occ)
            nxt[p] = i
            stack.append(nxt)
    return StrictAssemblyVerdict(Outcome.YES, reason="exhaustive search")


# ---------------------------------------------------------------------------
# micro-scale tile complexity


def _side_labelings(n_sides: int, max_labels: int):
    """Label assignments to sides, canonical up to renaming labels.

    Labels are integers 1.. in order of first use; 0 is the blank label.
    """
    out = [0] * n_sides

    def rec(pos, used):
        if pos == n_sides:
            yield tuple(out), used
            return
        for lab in range(0, min(used + 1, max_labels) + 1):
            out[pos] = lab
            yield from rec(pos + 1, max(used, lab))

    yield from rec(0, 0)


def _bindable(sides: tuple[int, ...], used: int) -> bool:
    # every label must sit on some pair of abutting sides (N/S or W/E)
    seen = [0] * (used + 1)
    for k, lab in enumerate(sides):
        if lab:
            seen[lab] |= 1 << (k % 4)
    for mask in seen[1:]:
        ns = (mask & 1) and (mask & 4)
        we = (mask & 2) and (mask & 8)
        if not (ns or we):
            return False
    return True


def _micro_assembles(kin: _Kinetics, seed_tile: int, seed_pos: Position, region: frozenset) -> bool:
    occ = {seed_pos: seed_tile}
    try:
        _saturate(kin, occ, _greedy_pick(kin, region), len(region))
    except _Escape:
        return False
    if occ.keys() != region:
        return False
    return _divergence(kin, occ, seed_pos) is None


def tile_complexity_oracle(s: Shape, tau: int, max_types: int = 4, max_labels: int = 4, *, max_cells: int = ORACLE_MAX_CELLS) -> int | None:
    """Least number of tile types of a directed temperature-``tau`` system
    that strictly self-assembles ``s``, searching systems with at most
    ``max_types`` types, ``max_labels`` glue labels and strengths in
    ``[0, tau]``.  Returns ``None`` if no such system exists in that range.

    Labels that can never bind (no abutting partner side) and strength-0
    labels behave like the blank label, so the search skips them; label
    renaming is factored out canonically.
    """
    if len(s) > max_cells:
        raise ValueError(f"shape has {len(s)} cells; the oracle is limited to {max_cells}")
    if not 1 <= max_types <= ORACLE_MAX_TYPES:
        raise ValueError(f"max_types must be in [1, {ORACLE_MAX_TYPES}]")
    if max_labels < 0 or tau < 1:
        raise ValueError("max_labels must be nonnegative and tau positive")
    region = frozenset(s)
    cells = sorted(region)
    for k in range(1, max_types + 1):
        for sides, used in _side_labelings(4 * k, max_labels):
            if not _bindable(sides, used):
                continue
            tiles = [sides[4 * i: 4 * i + 4] for i in range(k)]
            if len(set(tiles)) < k:
                continue
            glues = [tuple(str(lab) if lab else NULL for lab in t) for t in tiles]
            for values in itertools.product(range(1, tau + 1), repeat=used):
                g = {str(lab): v for lab, v in zip(range(1, used + 1), values)}
                weak = [i for i, t in enumerate(tiles) if sum(values[lab - 1] for lab in t if lab) < tau]
                if len(weak) > 1:
                    continue
                kin = _Kinetics(glues, g, tau)
                seeds = weak if weak else range(k)
                for seed_tile in seeds:
                    for pos in cells:
                        if _micro_assembles(kin, seed_tile, pos, region):
                            return k
    return None


def bounded_tile_complexity(s: Shape, tau: int, **kwargs) -> int | None:
    """Minimum of the oracle over temperatures 1..tau."""
    found = [d for d in (tile_complexity_oracle(s, i, **kwargs) for i in range(1, tau + 1)) if d is not None]
    return min(found) if found else None
