"""Reductions between 1-in-3 satisfiability, threshold programming and
strength-free tile systems, plus a brute-force 1-in-3 solver.

Chain: monotone 1-in-3 -> quadripartite 1-in-3 -> tau-inequality system
-> strength-free TAS.  Each stage has a back-mapping or an oracle so the
equivalences can be checked instance by instance.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .atam import Assembly, TileType
from .coopsets import FULL, CooperationSet, StrengthFreeTas
from .gadgets import gadget_lower_bound, gadget_positivity
from .threshold import (
    PARTS,
    QuadPartition,
    Sign,
    TauInequalitySystem,
    check_quadripartite,
    find_quad_partition,
    geq,
    lt,
)

__all__ = [
    "Literal",
    "OneInThreeInstance",
    "brute_force_1in3",
    "is_1in3_solution",
    "clause_gadget",
    "conversion_gadget",
    "monotone_to_quadripartite",
    "quad1in3_to_tp",
    "tp_min_variant",
    "tp_to_sftas",
    "tp_solution_to_assignment",
    "tp_value_name",
    "constant_names",
    "encode_assignment",
    "FILLER",
    "all_monotone_instances",
    "random_monotone_instance",
]

FILLER = "x_tau"


@dataclass(frozen=True, order=True)
class Literal:
    var: str
    negative: bool = False

    def __invert__(self) -> Literal:
        return Literal(self.var, not self.negative)

    def value(self, assignment: Mapping[str, bool]) -> bool:
        return assignment[self.var] != self.negative

    def __str__(self) -> str:
        return ("-" if self.negative else "") + self.var

    @classmethod
    def parse(cls, text: str) -> Literal:
        if text.startswith("-"):
            return cls(text[1:], True)
        return cls(text)


def _lits(*items) -> tuple[Literal, ...]:
    return tuple(x if isinstance(x, Literal) else Literal(x) for x in items)


@dataclass(frozen=True)
class OneInThreeInstance:
    """Variables, 3-literal clauses and an optional partition ``U1..U4``.

    The partition reuses :class:`QuadPartition` with ``U1..U4`` stored as
    ``N, W, S, E``.
    """

    variables: tuple[str, ...]
    clauses: tuple[tuple[Literal, ...], ...]
    partition: QuadPartition | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(_lits(*c) for c in self.clauses))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        declared = set(self.variables)
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {[str(l) for l in c]} does not have 3 literals")
            for lit in c:
                if lit.var not in declared:
                    raise ValueError(f"clause uses undeclared variable {lit.var!r}")
        if self.partition is not None:
            missing = declared - self.partition.variables()
            if missing:
                raise ValueError(f"partition does not cover {sorted(missing)}")
            if not self.is_quadripartite():
                raise ValueError("a clause has two variables in one part")

    @classmethod
    def monotone(cls, clauses: Iterable[Sequence[str]], variables: Iterable[str] = ()) -> OneInThreeInstance:
        cl = [tuple(c) for c in clauses]
        names = dict.fromkeys(variables)
        for c in cl:
            names.update(dict.fromkeys(c))
        return cls(tuple(names), tuple(_lits(*c) for c in cl))

    def is_monotone(self) -> bool:
        return not any(lit.negative for c in self.clauses for lit in c)

    def is_quadripartite(self) -> bool:
        if self.partition is None:
            return False
        part = self.partition.as_mapping()
        for c in self.clauses:
            seen = [part[lit.var] for lit in c]
            if len(set(seen)) != len(seen):
                return False
        return True

    def polarity(self) -> dict[str, bool]:
        """Variable -> whether it occurs negated; ``ValueError`` if mixed."""
        out: dict[str, bool] = {}
        for c in self.clauses:
            for lit in c:
                if out.setdefault(lit.var, lit.negative) != lit.negative:
                    raise ValueError(f"variable {lit.var!r} occurs with both polarities")
        return out


def is_1in3_solution(inst: OneInThreeInstance, assignment: Mapping[str, bool]) -> bool:
    if any(v not in assignment for v in inst.variables):
        return False
    return all(sum(lit.value(assignment) for lit in c) == 1 for c in inst.clauses)


def brute_force_1in3(inst: OneInThreeInstance, fixed: Mapping[str, bool] | None = None) -> dict[str, bool] | None:
    """A 1-in-3 assignment extending ``fixed``, or ``None``.

    Backtracking over variables with exactly-one propagation; complete.
    Literals are counted with multiplicity.
    """
    index = {v: i for i, v in enumerate(inst.variables)}
    clauses = [[(index[l.var], l.negative) for l in c] for c in inst.clauses]
    occurs: list[list[int]] = [[] for _ in inst.variables]
    for k, c in enumerate(clauses):
        for i, _ in c:
            if k not in occurs[i]:
                occurs[i].append(k)
    values: list[bool | None] = [None] * len(index)
    for v, b in (fixed or {}).items():
        values[index[v]] = bool(b)

    def propagate(vals, queue) -> bool:
        while queue:
            k = queue.pop()
            true = 0
            free = []
            for i, neg in clauses[k]:
                if vals[i] is None:
                    free.append((i, neg))
                elif vals[i] != neg:
                    true += 1
            if true > 1:
                return False
            if true == 1:
                forced = [(i, neg, False) for i, neg in free]
            elif not free:
                return False
            elif len(free) == 1:
                forced = [(free[0][0], free[0][1], True)]
            else:
                forced = []
            for i, neg, want in forced:
                val = want != neg
                if vals[i] is None:
                    vals[i] = val
                    queue.extend(occurs[i])
                elif vals[i] != val:
                    return False
        return True

    def rec(vals):
        free = [i for i, x in enumerate(vals) if x is None]
        if not free:
            return vals
        score = [0] * len(vals)
        for k, c in enumerate(clauses):
            open_ = [i for i, _ in c if vals[i] is None]
            if open_:
                for i in open_:
                    score[i] += 1
        i = max(free, key=lambda j: (score[j], -j))
        for val in (True, False):
            nv = vals[:]
            nv[i] = val
            if propagate(nv, list(occurs[i])):
                out = rec(nv)
                if out is not None:
                    return out
        return None

    if not propagate(values, list(range(len(clauses)))):
        return None
    result = rec(values)
    if result is None:
        return None
    assignment = {v: bool(result[i]) for v, i in index.items()}
    if not is_1in3_solution(inst, assignment):
        raise AssertionError("1-in-3 solver returned a non-solution")
    return assignment


# ---------------------------------------------------------------------------
# monotone -> quadripartite


def conversion_gadget(alpha: Literal, beta: Literal, gamma: Literal, tag: str) -> list[tuple[Literal, ...]]:
    """Four clauses over fresh ``h, i, j, k`` that are 1-in-3 satisfiable
    exactly when one of ``alpha, beta, gamma`` is true."""
    h, i, j, k = (Literal(f"{tag}.{s}") for s in "hijk")
    return [(~alpha, h, k), (~beta, i, k), (~gamma, j, k), (h, i, j)]


def clause_gadget(x: str, y: str, z: str, tag: str) -> list[tuple[Literal, ...]]:
    """The 13-clause block standing for the monotone clause ``{x, y, z}``."""
    v = {s: Literal(f"{tag}.{s}") for s in ("a1", "a2", "a3", "b1", "b2", "b3", "c", "dx", "dy", "dz", "exy", "eyz", "ezx", "fxy", "fyz", "fzx")}
    nx, ny, nz = Literal(x, True), Literal(y, True), Literal(z, True)
    return [
        (nx, v["a1"], v["b1"]), (ny, v["a2"], v["b2"]), (nz, v["a3"], v["b3"]), (v["a1"], v["a2"], v["a3"]),
        (nx, v["c"], v["dx"]), (ny, v["c"], v["dy"]), (nz, v["c"], v["dz"]),
        (v["c"], v["exy"], v["fxy"]), (v["c"], v["eyz"], v["fyz"]), (v["c"], v["ezx"], v["fzx"]),
        (v["dx"], v["dy"], v["exy"]), (v["dy"], v["dz"], v["eyz"]), (v["dz"], v["dx"], v["ezx"]),
    ]


_FIXED_PARTS = {
    "exy": "N", "eyz": "N", "ezx": "N",
    "a1": "W", "b3": "W", "c": "W",
    "a2": "S", "b1": "S", "dx": "S", "dz": "S", "fxy": "S", "fyz": "S", "fzx": "S",
    "a3": "E", "b2": "E", "dy": "E",
}


def _quad_block(x: str, y: str, z: str, tag: str) -> list[tuple[Literal, ...]]:
    block = clause_gadget(x, y, z, tag)
    last = block.pop()
    first = conversion_gadget(*last, tag=f"{tag}.r")
    for n, clause in enumerate(first, 1):
        block += conversion_gadget(*clause, tag=f"{tag}.r{n}")
    return block


def _template_parts() -> dict[str, str]:
    """Parts of every auxiliary variable of one 28-clause block."""
    block = _quad_block("X", "Y", "Z", "T")
    fixed = {"X": "N", "Y": "N", "Z": "N"}
    fixed.update({f"T.{k}": p for k, p in _FIXED_PARTS.items()})
    system = TauInequalitySystem.of(geq(*(l.var for l in c)) for c in block)
    partition = find_quad_partition(system, fixed)
    if partition is None:
        raise AssertionError("the 28-clause block has no quadripartition")
    part = partition.as_mapping()
    return {v[2:]: part[v] for v in system.variables if v.startswith("T.")}


_TEMPLATE: dict[str, str] | None = None


def monotone_to_quadripartite(inst: OneInThreeInstance) -> OneInThreeInstance:
    """Replace each clause by a 28-clause block with ``U1`` holding every
    source variable; satisfiability is preserved."""
    global _TEMPLATE
    if not inst.is_monotone():
        raise ValueError("instance is not monotone")
    if _TEMPLATE is None:
        _TEMPLATE = _template_parts()
    clauses = []
    part = {v: "N" for v in inst.variables}
    names = list(inst.variables)
    for n, (x, y, z) in enumerate(inst.clauses, 1):
        tag = f"q{n}"
        block = _quad_block(x.var, y.var, z.var, tag)
        clauses += block
        for suffix, p in _TEMPLATE.items():
            part[f"{tag}.{suffix}"] = p
            names.append(f"{tag}.{suffix}")
    out = OneInThreeInstance(tuple(dict.fromkeys(names)), tuple(clauses), QuadPartition.from_mapping(part))
    return out


# ---------------------------------------------------------------------------
# quadripartite 1-in-3 -> threshold programming


def tp_value_name(var: str) -> str:
    return f"v[{var}]"


def _clause_vars(c) -> list[str]:
    return [tp_value_name(l.var) for l in c]


def _value_parts(inst: OneInThreeInstance) -> tuple[dict[str, str], list]:
    if inst.partition is None or not inst.is_quadripartite():
        raise ValueError("instance needs a quadripartition")
    inst.polarity()
    part = {tp_value_name(v): p for v, p in inst.partition.as_mapping().items() if v in set(inst.variables)}
    rows = []
    for v in inst.variables:
        frag = gadget_positivity(tp_value_name(v), prefix=f"pos[{v}]", part=part[tp_value_name(v)])
        aux = frag.interface["aux"]
        part[aux] = PARTS[(PARTS.index(part[tp_value_name(v)]) + 1) % 4]
        rows.append(frag.system)
    return part, rows


def constant_names(tau: int, part: str | None = None) -> tuple[str, ...]:
    """Outputs of the constant gadgets ``x1, x2`` and, above 4, ``x_{tau-4}``."""
    tag = f"k{part}" if part else "k"
    names = [gadget_lower_bound(1, prefix=f"{tag}.x1").output, gadget_lower_bound(2, prefix=f"{tag}.x2").output]
    if tau > 4:
        names.append(gadget_lower_bound(tau - 4, prefix=f"{tag}.xt").output)
    return tuple(names)


def _constants(tau: int, part: str | None):
    """Constants ``x1 >= 1``, ``x2 >= 2`` (and ``x_{tau-4} >= tau - 4``) kept
    jointly below tau, which pins them to exactly those values."""
    tag = f"k{part}" if part else "k"
    frags = [gadget_lower_bound(1, prefix=f"{tag}.x1"), gadget_lower_bound(2, prefix=f"{tag}.x2")]
    if tau > 4:
        frags.append(gadget_lower_bound(tau - 4, prefix=f"{tag}.xt"))
    pin = [f.output for f in frags]
    system = TauInequalitySystem.union([f.system for f in frags] + [TauInequalitySystem.of([lt(*pin)])])
    partition = find_quad_partition(system, {pin[-1]: part} if part else {})
    if partition is None:
        raise AssertionError("constant gadgets are not quadripartite")
    return system, partition.as_mapping(), pin


def _finish(rows: list[TauInequalitySystem], part: dict[str, str], extra) -> TauInequalitySystem:
    system = TauInequalitySystem.union(rows + [TauInequalitySystem.of(extra)])
    partition = QuadPartition.from_mapping({v: part[v] for v in system.variables})
    if not check_quadripartite(system, partition):
        raise AssertionError("reduction output is not quadripartite")
    return TauInequalitySystem(system.variables, system.inequalities, system.strict_vars, partition)


def quad1in3_to_tp(inst: OneInThreeInstance, tau: int) -> TauInequalitySystem:
    """A system solvable at ``tau`` iff ``inst`` is 1-in-3 satisfiable.

    ``v[u]`` is 2 when the literal of ``u`` is true and 1 otherwise; this
    needs each variable to occur with a single polarity.  For ``tau > 4``
    every clause adds a constant ``tau - 4`` taken from the copy of the
    constant gadgets that lives in the part the clause leaves free.
    """
    if tau < 4:
        raise ValueError("the reduction needs tau >= 4")
    part, rows = _value_parts(inst)
    extra = []
    consts: dict[str, str] = {}
    for c in inst.clauses:
        v1, v2, v3 = _clause_vars(c)
        if tau == 4:
            extra += [geq(v1, v2, v3), lt(v1, v2), lt(v1, v3), lt(v2, v3)]
            continue
        free = next(p for p in PARTS if p not in {part[v1], part[v2], part[v3]})
        if free not in consts:
            system, cpart, pin = _constants(tau, free)
            rows.append(system)
            part.update(cpart)
            consts[free] = pin[-1]
        x = consts[free]
        extra += [geq(v1, v2, v3, x), lt(v1, v2, x), lt(v1, v3, x), lt(v2, v3, x)]
    return _finish(rows, part, extra)


def tp_min_variant(inst: OneInThreeInstance) -> TauInequalitySystem:
    """The optimization variant: least tau is 4 iff ``inst`` is satisfiable.

    ``x1 >= 1`` and ``x2 >= 2`` with ``x1 + x2 < tau`` keep tau at 4 or
    more; the clause inequalities carry no constant.
    """
    part, rows = _value_parts(inst)
    system, cpart, _ = _constants(4, None)
    rows.append(system)
    part.update(cpart)
    extra = []
    for c in inst.clauses:
        v1, v2, v3 = _clause_vars(c)
        extra += [geq(v1, v2, v3), lt(v1, v2), lt(v1, v3), lt(v2, v3)]
    return _finish(rows, part, extra)


def encode_assignment(inst: OneInThreeInstance, assignment: Mapping[str, bool]) -> dict[str, int]:
    """Values of the ``v[u]`` variables for a 1-in-3 assignment."""
    pol = inst.polarity()
    return {tp_value_name(v): 2 if assignment[v] != pol.get(v, False) else 1 for v in inst.variables}


def tp_solution_to_assignment(sol: Mapping[str, int], inst: OneInThreeInstance) -> dict[str, bool]:
    """Decode ``v[u]`` values back to truth values.

    A variable in no clause is only bounded below, so any value is
    accepted for it and it decodes to false.
    """
    pol = inst.polarity()
    used = {lit.var for c in inst.clauses for lit in c}
    out = {}
    for v in inst.variables:
        x = sol[tp_value_name(v)]
        if v not in used:
            out[v] = False
            continue
        if x not in (1, 2):
            raise ValueError(f"{tp_value_name(v)} = {x}; expected 1 or 2")
        out[v] = (x == 2) != pol.get(v, False)
    if not is_1in3_solution(inst, out):
        raise ValueError("decoded assignment does not satisfy the instance")
    return out


# ---------------------------------------------------------------------------
# threshold programming -> strength-free TAS


def _tile_coop(n_terms: int, geq_row: bool) -> CooperationSet:
    # variable sides come first, filler sides after them
    core = (1 << n_terms) - 1
    filler = FULL & ~core
    return CooperationSet(m for m in range(1, 16) if m & filler or (geq_row and m & core == core))


def tp_to_sftas(sys: TauInequalitySystem) -> StrengthFreeTas:
    """Encode a system shaped like :func:`tp_min_variant` output as tiles.

    A ``>=`` row over 2 or 3 distinct variables becomes one tile with those
    labels and the filler on the other sides; its cooperation set excludes
    exactly the proper subsets of the row's sides, which also encodes the
    ``<`` rows over those subsets.  Any other ``<`` row over up to 3
    variables gets a tile excluding every subset of its sides.
    """
    if FILLER in sys.variables:
        raise ValueError(f"variable name {FILLER!r} is reserved for the filler label")
    tiles: list[tuple[TileType, CooperationSet]] = []
    covered = set()
    for ineq in sys.inequalities:
        if len(set(ineq.terms)) != len(ineq.terms):
            raise ValueError(f"repeated variable in {ineq}")
        if ineq.sign is Sign.GEQ_TAU:
            if not 2 <= len(ineq.terms) <= 3:
                raise ValueError(f"cannot encode {ineq}: need 2 or 3 terms")
            terms = list(ineq.terms)
            for r in range(1, len(terms)):
                covered.update(frozenset(s) for s in itertools.combinations(terms, r))
    by_glues: dict[tuple, CooperationSet] = {}
    for ineq in sys.inequalities:
        terms = list(ineq.terms)
        if ineq.sign is Sign.GEQ_TAU:
            coop = _tile_coop(len(terms), True)
        elif frozenset(terms) in covered:
            continue
        elif len(terms) > 3:
            raise ValueError(f"cannot encode {ineq}: too many terms")
        else:
            coop = _tile_coop(len(terms), False)
        sides = tuple(terms + [FILLER] * (4 - len(terms)))
        if sides in by_glues:
            if by_glues[sides] != coop:
                raise ValueError(f"rows over {terms} need one tile with two cooperation sets")
            continue
        by_glues[sides] = coop
        tiles.append((TileType(f"t{len(tiles) + 1}", *sides), coop))
    if not tiles:
        raise ValueError("empty system")
    types = tuple(t for t, _ in tiles)
    return StrengthFreeTas(types, Assembly.single(types[0]), dict(tiles))


# ---------------------------------------------------------------------------
# instance generators


def _canonical(clauses: Sequence[tuple[int, ...]], n: int) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted(tuple(sorted(perm[i] for i in c)) for c in clauses))
        if best is None or key < best:
            best = key
    return best


def all_monotone_instances(max_vars: int = 5, max_clauses: int = 3) -> list[OneInThreeInstance]:
    """All monotone instances up to renaming of variables.

    A clause is a multiset of 3 variables and a clause list may repeat a
    clause; ``u_k`` is the k-th variable.
    """
    triples = list(itertools.combinations_with_replacement(range(max_vars), 3))
    seen = set()
    out = []
    for m in range(0, max_clauses + 1):
        for combo in itertools.combinations_with_replacement(triples, m):
            key = _canonical(combo, max_vars)
            if key in seen:
                continue
            seen.add(key)
            used = sorted({i for c in key for i in c})
            out.append(OneInThreeInstance.monotone(([f"u{i + 1}" for i in c] for c in key), [f"u{i + 1}" for i in used]))
    return out


def random_monotone_instance(n_vars: int, n_clauses: int, rng: random.Random) -> OneInThreeInstance:
    names = [f"u{i + 1}" for i in range(n_vars)]
    clauses = [rng.sample(names, 3) for _ in range(n_clauses)]
    return OneInThreeInstance.monotone(clauses, names)
