"""Cooperation sets, strength-free systems and strength synthesis.

A direction set is a 4-bit mask (N=1, W=2, S=4, E=8).  The cooperation set
of a tile type is the family of side subsets whose glues together reach
the temperature; two systems with the same tiles, seed and cooperation
sets have the same dynamics.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .atam import DIRECTIONS, NULL, Assembly, Direction, StrengthFunction, Tas, TileType
from .threshold import TauInequality, TauInequalitySystem, decide, geq, lt

__all__ = [
    "FULL",
    "mask_to_str",
    "str_to_mask",
    "CooperationSet",
    "UnattachableTile",
    "StrengthFreeTas",
    "cooperation_set",
    "cooperation_family",
    "locally_equivalent",
    "strength_free",
    "sftas_to_inequalities",
    "find_strength",
    "find_opt_strength",
]

FULL = 0b1111
_LETTERS = "NWSE"


def mask_to_str(mask: int) -> str:
    return "".join(c for k, c in enumerate(_LETTERS) if mask >> k & 1)


def str_to_mask(text: str) -> int:
    mask = 0
    for c in text.upper():
        if c not in _LETTERS:
            raise ValueError(f"bad direction letter {c!r} in {text!r}")
        bit = 1 << _LETTERS.index(c)
        if mask & bit:
            raise ValueError(f"repeated direction in {text!r}")
        mask |= bit
    if not mask:
        raise ValueError("empty direction set")
    return mask


def _sides(mask: int) -> list[Direction]:
    return [d for d in DIRECTIONS if mask & d.bit]


class CooperationSet(frozenset):
    """An upward-closed family of nonempty direction sets containing NWSE."""

    def __new__(cls, family: Iterable[int] = ()):
        fam = frozenset(int(m) for m in family)
        if any(not 0 < m <= FULL for m in fam):
            raise ValueError("direction sets are nonempty 4-bit masks")
        if FULL not in fam:
            raise ValueError("a cooperation set must contain the full direction set")
        for m in fam:
            for bit in (1, 2, 4, 8):
                if m | bit not in fam:
                    raise ValueError(f"family is not upward closed at {mask_to_str(m)}")
        return super().__new__(cls, fam)

    @classmethod
    def from_minimal(cls, minimal: Iterable[int]) -> CooperationSet:
        mins = list(minimal)
        return cls(m for m in range(1, 16) if any(m & k == k for k in mins) or m == FULL)

    def minimal(self) -> list[int]:
        return sorted((m for m in self if not any(k != m and k & m == k for k in self)), key=_order)

    def maximal_excluded(self) -> list[int]:
        out = [m for m in range(1, 16) if m not in self and all(m | b in self for b in (1, 2, 4, 8) if not m & b)]
        return sorted(out, key=_order)

    def __repr__(self) -> str:
        return f"CooperationSet({[mask_to_str(m) for m in sorted(self, key=_order)]})"


def _order(mask: int):
    # larger sets first, then NWSE order
    return (-bin(mask).count("1"), [not mask >> k & 1 for k in range(4)])


class UnattachableTile(ValueError):
    """Raised when a tile type's four glues together stay below tau."""

    def __init__(self, tile: TileType, family: frozenset):
        super().__init__(f"tile type {tile.name!r} can never attach")
        self.tile = tile
        self.family = family


def cooperation_family(t: TileType, g: Mapping[str, int], tau: int) -> frozenset:
    """Raw family of direction masks reaching ``tau``; may lack NWSE."""
    strengths = [0 if lab == NULL else g[lab] for lab in t.glues]
    return frozenset(m for m in range(1, 16) if sum(strengths[d] for d in _sides(m)) >= tau)


def cooperation_set(t: TileType, g: Mapping[str, int], tau: int) -> CooperationSet:
    fam = cooperation_family(t, g, tau)
    if FULL not in fam:
        raise UnattachableTile(t, fam)
    return CooperationSet(fam)


@dataclass(frozen=True)
class StrengthFreeTas:
    tile_types: tuple[TileType, ...]
    seed: Assembly
    coop: Mapping[TileType, CooperationSet]

    def __post_init__(self):
        object.__setattr__(self, "tile_types", tuple(self.tile_types))
        coop = {}
        for t in self.tile_types:
            if t not in self.coop:
                raise ValueError(f"no cooperation set for tile type {t.name!r}")
            c = self.coop[t]
            coop[t] = c if isinstance(c, CooperationSet) else CooperationSet(c)
        extra = set(self.coop) - set(self.tile_types)
        if extra:
            raise ValueError(f"cooperation sets for unknown tile types {sorted(t.name for t in extra)}")
        object.__setattr__(self, "coop", coop)
        if len(self.seed) != 1 or next(iter(self.seed.values())) not in coop:
            raise ValueError("seed must be a single tile of a listed type")

    def labels(self) -> list[str]:
        seen = {}
        for t in self.tile_types:
            for lab in t.glues:
                if lab != NULL:
                    seen.setdefault(lab, None)
        return list(seen)

    def __eq__(self, other):
        if not isinstance(other, StrengthFreeTas):
            return NotImplemented
        return self.tile_types == other.tile_types and self.seed == other.seed and dict(self.coop) == dict(other.coop)

    def __hash__(self):
        return hash((self.tile_types, self.seed))


def strength_free(tas: Tas) -> StrengthFreeTas:
    """The strength-free representative of ``tas``.

    Raises :class:`UnattachableTile` if some type, the seed's included,
    cannot reach tau with all four sides.
    """
    coop = {t: cooperation_set(t, tas.g, tas.tau) for t in tas.tile_types}
    return StrengthFreeTas(tas.tile_types, tas.seed, coop)


def locally_equivalent(a: Tas, b: Tas) -> bool:
    if set(a.tile_types) != set(b.tile_types) or a.seed != b.seed:
        return False
    return all(cooperation_family(t, a.g, a.tau) == cooperation_family(t, b.g, b.tau) for t in a.tile_types)


def sftas_to_inequalities(sf: StrengthFreeTas) -> TauInequalitySystem:
    """One ``>=`` inequality per minimal included set and one ``<`` per
    maximal excluded set, over one variable per glue label.

    Blank sides contribute nothing.  A minimal set made of blank sides only
    can never be met, which is reported as ``ValueError``.
    """
    rows: list[TauInequality] = []
    seen = set()
    for t in sf.tile_types:
        fam = sf.coop[t]
        for m in fam.minimal():
            terms = [t.glue(d) for d in _sides(m) if t.glue(d) != NULL]
            if not terms:
                raise ValueError(f"tile type {t.name!r} needs only blank sides to reach tau")
            _add(rows, seen, geq(*terms))
        for m in fam.maximal_excluded():
            terms = [t.glue(d) for d in _sides(m) if t.glue(d) != NULL]
            if terms:
                _add(rows, seen, lt(*terms))
    return TauInequalitySystem.of(rows, sf.labels())


def _add(rows, seen, ineq):
    key = (ineq.sign, tuple(sorted(ineq.terms)))
    if key not in seen:
        seen.add(key)
        rows.append(ineq)


def find_strength(sf: StrengthFreeTas, tau: int) -> StrengthFunction | None:
    """A strength function realizing ``sf`` at ``tau``, or ``None``."""
    try:
        system = sftas_to_inequalities(sf)
    except ValueError:
        return None
    sol = decide(system, tau)
    if sol is None:
        return None
    g = StrengthFunction(sol)
    for t in sf.tile_types:
        fam = cooperation_family(t, g, tau)
        if fam != sf.coop[t]:
            raise AssertionError(f"synthesized strengths miss the cooperation set of {t.name!r}")
    return g


def find_opt_strength(sf: StrengthFreeTas, tau_max: int = 64) -> tuple[StrengthFunction, int] | None:
    """Least tau in ``[1, tau_max]`` at which ``sf`` is realizable.

    ``None`` means nothing up to ``tau_max``, not that no tau exists.
    """
    if tau_max < 1:
        raise ValueError("tau_max must be at least 1")
    for tau in range(1, tau_max + 1):
        g = find_strength(sf, tau)
        if g is not None:
            return g, tau
    return None
