"""Systems of tau-inequalities and an exact solver for them.

A tau-inequality is either ``sum(terms) >= tau`` or ``sum(terms) < tau``
over nonnegative integer variables, where a variable may occur more than
once.  The solver works on the capped box ``[0, tau]^n``: a variable that
occurs in some strict inequality is at most ``tau - 1`` anyway, and one that
only occurs in ``>=`` inequalities loses nothing by being lowered to ``tau``.
"""

from __future__ import annotations

import enum
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

__all__ = [
    "Sign",
    "TauInequality",
    "TauInequalitySystem",
    "QuadPartition",
    "geq",
    "lt",
    "decide",
    "minimize_tau",
    "is_tp43",
    "check_quadripartite",
    "find_quad_partition",
    "PARTS",
]

PARTS = ("N", "W", "S", "E")


class Sign(enum.Enum):
    GEQ_TAU = ">="
    LT_TAU = "<"


@dataclass(frozen=True)
class TauInequality:
    sign: Sign
    terms: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not 1 <= len(self.terms) <= 4:
            raise ValueError(f"an inequality has 1 to 4 terms, got {len(self.terms)}")

    def lhs(self, values: Mapping[str, int]) -> int:
        return sum(values[v] for v in self.terms)

    def holds(self, values: Mapping[str, int], tau: int) -> bool:
        s = self.lhs(values)
        return s >= tau if self.sign is Sign.GEQ_TAU else s < tau

    def __str__(self) -> str:
        return f"{' + '.join(self.terms)} {self.sign.value} TAU"


def geq(*terms: str) -> TauInequality:
    return TauInequality(Sign.GEQ_TAU, terms)


def lt(*terms: str) -> TauInequality:
    return TauInequality(Sign.LT_TAU, terms)


@dataclass(frozen=True)
class TauInequalitySystem:
    """Variables, inequalities, the all-variables-below-tau flag and an
    optional quadripartition of the variables."""

    variables: tuple[str, ...]
    inequalities: tuple[TauInequality, ...] = ()
    strict_vars: bool = False
    partition: QuadPartition | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        declared = set(self.variables)
        for ineq in self.inequalities:
            for v in ineq.terms:
                if v not in declared:
                    raise ValueError(f"inequality {ineq} uses undeclared variable {v!r}")
        if self.partition is not None:
            missing = declared - self.partition.variables()
            if missing:
                raise ValueError(f"partition does not cover {sorted(missing)}")
            extra = self.partition.variables() - declared
            if extra:
                raise ValueError(f"partition names undeclared variables {sorted(extra)}")

    @classmethod
    def of(cls, inequalities: Iterable[TauInequality], variables: Iterable[str] = (), strict_vars: bool = False, partition: QuadPartition | None = None) -> TauInequalitySystem:
        """Build a system, declaring variables in order of first use."""
        ineqs = tuple(inequalities)
        names = dict.fromkeys(variables)
        for ineq in ineqs:
            names.update(dict.fromkeys(ineq.terms))
        return cls(tuple(names), ineqs, strict_vars, partition)

    def satisfied_by(self, values: Mapping[str, int], tau: int) -> bool:
        if any(values.get(v, -1) < 0 or int(values[v]) != values[v] for v in self.variables):
            return False
        if self.strict_vars and any(values[v] >= tau for v in self.variables):
            return False
        return all(ineq.holds(values, tau) for ineq in self.inequalities)

    def violations(self, values: Mapping[str, int], tau: int) -> list[TauInequality]:
        return [ineq for ineq in self.inequalities if not ineq.holds(values, tau)]

    def __or__(self, other: TauInequalitySystem) -> TauInequalitySystem:
        """Union of two systems; partitions are kept only if both have one."""
        mine = set(self.variables)
        partition = None
        if self.partition is not None and other.partition is not None:
            partition = QuadPartition.from_mapping({**other.partition.as_mapping(), **self.partition.as_mapping()})
        return TauInequalitySystem.of(
            self.inequalities + other.inequalities,
            self.variables + tuple(v for v in other.variables if v not in mine),
            self.strict_vars or other.strict_vars,
            partition,
        )

    @classmethod
    def union(cls, systems: Iterable[TauInequalitySystem]) -> TauInequalitySystem:
        """Union of many systems, computed in one pass."""
        systems = list(systems)
        names: dict[str, None] = {}
        rows: list[TauInequality] = []
        part: dict[str, str] = {}
        for s in systems:
            names.update(dict.fromkeys(s.variables))
            rows.extend(s.inequalities)
            if s.partition is not None:
                for v, p in s.partition.as_mapping().items():
                    part.setdefault(v, p)
        keep = systems and all(s.partition is not None for s in systems)
        return cls(tuple(names), tuple(rows), any(s.strict_vars for s in systems), QuadPartition.from_mapping(part) if keep else None)

    def with_strict(self, strict: bool = True) -> TauInequalitySystem:
        return TauInequalitySystem(self.variables, self.inequalities, strict, self.partition)

    def with_partition(self, partition: QuadPartition | None) -> TauInequalitySystem:
        return TauInequalitySystem(self.variables, self.inequalities, self.strict_vars, partition)


@dataclass(frozen=True)
class QuadPartition:
    N: frozenset = frozenset()
    W: frozenset = frozenset()
    S: frozenset = frozenset()
    E: frozenset = frozenset()

    def __post_init__(self):
        for name in PARTS:
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        seen = set()
        for part in self.parts:
            if seen & part:
                raise ValueError(f"partition parts overlap on {sorted(seen & part)}")
            seen |= part

    @classmethod
    def from_mapping(cls, part_of: Mapping[str, str]) -> QuadPartition:
        groups = {name: set() for name in PARTS}
        for v, p in part_of.items():
            groups[p].add(v)
        return cls(**groups)

    @property
    def parts(self) -> tuple[frozenset, ...]:
        return (self.N, self.W, self.S, self.E)

    def variables(self) -> frozenset:
        return self.N | self.W | self.S | self.E

    def part_of(self, v: str) -> str:
        for name, part in zip(PARTS, self.parts):
            if v in part:
                return name
        raise KeyError(v)

    def as_mapping(self) -> dict[str, str]:
        return {v: name for name, part in zip(PARTS, self.parts) for v in part}

    def __or__(self, other: QuadPartition) -> QuadPartition:
        return QuadPartition(*(a | b for a, b in zip(self.parts, other.parts)))


def is_tp43(sys: TauInequalitySystem) -> bool:
    return all(len(q.terms) <= (4 if q.sign is Sign.GEQ_TAU else 3) for q in sys.inequalities)


def check_quadripartite(sys: TauInequalitySystem, p: QuadPartition) -> bool:
    """Whether the terms of each inequality lie in pairwise distinct parts."""
    missing = set(sys.variables) - p.variables()
    if missing:
        raise ValueError(f"partition does not cover {sorted(missing)}")
    part = p.as_mapping()
    for ineq in sys.inequalities:
        parts = [part[v] for v in ineq.terms]
        if len(set(parts)) != len(parts):
            return False
    return True


def find_quad_partition(sys: TauInequalitySystem, fixed: Mapping[str, str] | None = None) -> QuadPartition | None:
    """Search for a partition accepted by :func:`check_quadripartite`.

    This is 4-coloring of the conflict graph, solved by backtracking with
    most-constrained-first ordering; ``fixed`` pins some variables.
    """
    fixed = dict(fixed or {})
    adj: dict[str, set] = {v: set() for v in sys.variables}
    for ineq in sys.inequalities:
        if len(set(ineq.terms)) != len(ineq.terms):
            return None
        for a in ineq.terms:
            adj[a].update(b for b in ineq.terms if b != a)
    color: dict[str, str] = {}
    for v, c in fixed.items():
        if v in adj:
            if any(color.get(u) == c for u in adj[v]):
                return None
            color[v] = c
    todo = [v for v in sys.variables if v not in color]

    def options(v):
        used = {color[u] for u in adj[v] if u in color}
        return [c for c in PARTS if c not in used]

    def rec():
        free = [v for v in todo if v not in color]
        if not free:
            return True
        v = min(free, key=lambda u: (len(options(u)), -len(adj[u])))
        for c in options(v):
            color[v] = c
            if rec():
                return True
            del color[v]
        return False

    # one recursion level per variable
    import sys as _sys

    limit = _sys.getrecursionlimit()
    _sys.setrecursionlimit(max(limit, 4 * len(todo) + 100))
    try:
        if not rec():
            return None
    finally:
        _sys.setrecursionlimit(limit)
    return QuadPartition.from_mapping(color)


# ---------------------------------------------------------------------------
# solver


class _Infeasible(Exception):
    pass


class _Problem:
    """Integer form: ``sum c*x >= b`` (kind 0) or ``sum c*x <= b`` (kind 1)."""

    def __init__(self, sys: TauInequalitySystem, tau: int, bounds: Mapping[str, tuple[int, int]] | None):
        self.names = list(sys.variables)
        self.index = {v: i for i, v in enumerate(self.names)}
        n = len(self.names)
        cap = tau - 1 if sys.strict_vars else tau
        self.lo = [0] * n
        self.hi = [cap] * n
        for v, (a, b) in (bounds or {}).items():
            i = self.index[v]
            self.lo[i] = max(self.lo[i], a)
            self.hi[i] = min(self.hi[i], b)
        self.cons: list[tuple[int, list[tuple[int, int]], int]] = []
        merged = Counter()
        for ineq in sys.inequalities:
            terms = tuple(sorted(Counter(self.index[v] for v in ineq.terms).items()))
            kind = 0 if ineq.sign is Sign.GEQ_TAU else 1
            merged[(kind, terms)] += 1
        for kind, terms in merged:
            self.cons.append((kind, list(terms), tau if kind == 0 else tau - 1))
        self.watch: list[list[int]] = [[] for _ in range(n)]
        for k, (_, terms, _) in enumerate(self.cons):
            for i, _ in terms:
                self.watch[i].append(k)
        # a variable only pushing >= sums up may sit at its upper bound, one
        # only occurring in < sums at its lower bound
        for i in range(n):
            kinds = {self.cons[k][0] for k in self.watch[i]}
            if kinds == {0}:
                self.lo[i] = self.hi[i]
            elif kinds == {1} or not kinds:
                self.hi[i] = self.lo[i]
        self.tau = tau
        self._lp = None

    # -- propagation ------------------------------------------------------

    def propagate(self, lo: list[int], hi: list[int], dirty: Iterable[int] | None = None) -> bool:
        cons = self.cons
        queue = list(range(len(cons))) if dirty is None else sorted({k for i in dirty for k in self.watch[i]})
        queued = set(queue)
        while queue:
            k = queue.pop()
            queued.discard(k)
            kind, terms, b = cons[k]
            changed = []
            if kind == 0:
                total = sum(c * hi[i] for i, c in terms)
                if total < b:
                    return False
                for i, c in terms:
                    need = b - (total - c * hi[i])
                    if need > c * lo[i]:
                        new = -((-need) // c)
                        if new > hi[i]:
                            return False
                        lo[i] = new
                        changed.append(i)
            else:
                total = sum(c * lo[i] for i, c in terms)
                if total > b:
                    return False
                for i, c in terms:
                    room = b - (total - c * lo[i])
                    if room < c * hi[i]:
                        new = room // c
                        if new < lo[i]:
                            return False
                        hi[i] = new
                        changed.append(i)
            for i in changed:
                for k2 in self.watch[i]:
                    if k2 != k and k2 not in queued:
                        queued.add(k2)
                        queue.append(k2)
        return True

    def entailed(self, k: int, lo, hi) -> bool:
        kind, terms, b = self.cons[k]
        if kind == 0:
            return sum(c * lo[i] for i, c in terms) >= b
        return sum(c * hi[i] for i, c in terms) <= b

    # -- linear relaxation -----------------------------------------------

    def lp(self, lo, hi, variables: Sequence[int]):
        """Solve the relaxation restricted to ``variables`` (others fixed at lo).

        Returns ``None`` if it is infeasible, else the real solution.
        """
        pos = {i: j for j, i in enumerate(variables)}
        rows, rhs = [], []
        for k in {k for i in variables for k in self.watch[i]}:
            kind, terms, b = self.cons[k]
            row = np.zeros(len(variables))
            const = 0
            for i, c in terms:
                if i in pos:
                    row[pos[i]] += c
                else:
                    const += c * lo[i]
            # store as row . x <= rhs
            if kind == 0:
                rows.append(-row)
                rhs.append(const - b)
            else:
                rows.append(row)
                rhs.append(b - const)
        if not rows:
            return [lo[i] for i in variables]
        res = linprog(
            np.zeros(len(variables)),
            A_ub=np.array(rows),
            b_ub=np.array(rhs, dtype=float),
            bounds=[(lo[i], hi[i]) for i in variables],
            method="highs",
        )
        if res.status == 2:
            return None
        if res.status != 0:
            return [lo[i] for i in variables]
        return list(res.x)


def _components(prob: _Problem, lo, hi, variables: Iterable[int]) -> list[list[int]]:
    free = {i for i in variables if lo[i] < hi[i]}
    seen: set[int] = set()
    comps = []
    for start in sorted(free):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            i = stack.pop()
            for k in prob.watch[i]:
                if prob.entailed(k, lo, hi):
                    continue
                for j, _ in prob.cons[k][1]:
                    if j in free and j not in seen:
                        seen.add(j)
                        comp.append(j)
                        stack.append(j)
        comps.append(sorted(comp))
    return comps


def _solve_component(prob: _Problem, lo: list[int], hi: list[int], comp: list[int]) -> dict[int, int] | None:
    """Values for ``comp`` consistent with the other (fixed or independent) variables."""
    guide = None
    if any(hi[i] - lo[i] > 3 for i in comp):
        guide = prob.lp(lo, hi, comp)
        if guide is None:
            return None
        if all(abs(x - round(x)) < 1e-9 for x in guide):
            trial_lo, trial_hi = lo[:], hi[:]
            for i, x in zip(comp, guide):
                trial_lo[i] = trial_hi[i] = int(round(x))
            if prob.propagate(trial_lo, trial_hi, comp):
                return {i: trial_lo[i] for i in comp}
        guide = dict(zip(comp, guide))
    var = min(comp, key=lambda i: (hi[i] - lo[i], -len(prob.watch[i]), i))
    values = list(range(lo[var], hi[var] + 1))
    if guide is not None:
        g = guide[var]
        values.sort(key=lambda v: (abs(v - g), v))
    else:
        pull = sum(1 if prob.cons[k][0] == 0 else -1 for k in prob.watch[var])
        if pull > 0:
            values.reverse()
    for v in values:
        nlo, nhi = lo[:], hi[:]
        nlo[var] = nhi[var] = v
        if not prob.propagate(nlo, nhi, [var]):
            continue
        result = {i: nlo[i] for i in comp if nlo[i] == nhi[i]}
        ok = True
        for sub in _components(prob, nlo, nhi, comp):
            part = _solve_component(prob, nlo, nhi, sub)
            if part is None:
                ok = False
                break
            result.update(part)
            for i, x in part.items():
                nlo[i] = nhi[i] = x
        if ok:
            return result
    return None


def decide(sys: TauInequalitySystem, tau: int, *, bounds: Mapping[str, tuple[int, int]] | None = None) -> dict[str, int] | None:
    """A satisfying assignment at temperature ``tau``, or ``None`` if none exists.

    ``bounds`` optionally restricts individual variables to closed ranges.
    The search is complete; the returned assignment is checked against
    every inequality.
    """
    if isinstance(tau, bool) or int(tau) != tau or tau < 1:
        raise ValueError("tau must be a positive integer")
    prob = _Problem(sys, tau, bounds)
    lo, hi = prob.lo[:], prob.hi[:]
    if any(a > b for a, b in zip(lo, hi)) or not prob.propagate(lo, hi):
        return None
    everything = list(range(len(prob.names)))
    comps = _components(prob, lo, hi, everything)
    if comps and prob.lp(lo, hi, [i for c in comps for i in c]) is None:
        return None
    for comp in comps:
        part = _solve_component(prob, lo, hi, comp)
        if part is None:
            return None
        for i, x in part.items():
            lo[i] = hi[i] = x
    values = {v: lo[i] for v, i in prob.index.items()}
    if not sys.satisfied_by(values, tau) or any(not a <= values[v] <= b for v, (a, b) in (bounds or {}).items()):
        raise AssertionError("solver produced an assignment that fails verification")
    return values


def minimize_tau(sys: TauInequalitySystem, tau_max: int) -> tuple[int, dict[str, int]] | None:
    """Least feasible tau in ``[1, tau_max]`` with a witness.

    Every tau is tried in turn since feasibility need not be monotone.
    """
    if tau_max < 1:
        raise ValueError("tau_max must be at least 1")
    for tau in range(1, tau_max + 1):
        sol = decide(sys, tau)
        if sol is not None:
            return tau, sol
    return None
