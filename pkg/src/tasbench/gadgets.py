"""Reusable tau-inequality gadgets: positivity pairs, adders to a lower
bound, arbitrary lower bounds and systems with a prescribed least
feasible temperature.

Every constructor takes an optional ``prefix`` that namespaces the fresh
variables it introduces.  Without one a process-wide counter is used.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field

from .threshold import (
    QuadPartition,
    TauInequalitySystem,
    check_quadripartite,
    decide,
    find_quad_partition,
    geq,
    is_tp43,
    lt,
)

__all__ = [
    "GadgetFragment",
    "gadget_positivity",
    "gadget_adder",
    "gadget_lower_bound",
    "system_min_tau",
    "closed_form",
    "adder_threshold",
]

_counter = itertools.count(1)


def _fresh(prefix: str | None, kind: str) -> str:
    return prefix if prefix is not None else f"{kind}{next(_counter)}"


@dataclass(frozen=True)
class GadgetFragment:
    """A sub-system plus the names of its designated variables.

    ``interface`` always has ``output``; adders also expose ``base``.
    ``partition`` is one valid quadripartition of the fragment's variables.
    """

    system: TauInequalitySystem
    interface: Mapping[str, str]
    partition: QuadPartition
    kind: str
    params: Mapping[str, int] = field(default_factory=dict)
    children: tuple[GadgetFragment, ...] = ()

    @property
    def output(self) -> str:
        return self.interface["output"]

    def aux_variables(self) -> tuple[str, ...]:
        iface = set(self.interface.values())
        return tuple(v for v in self.system.variables if v not in iface)


def _merge(systems) -> TauInequalitySystem:
    return TauInequalitySystem.union(list(systems))


def gadget_positivity(target: str, *, prefix: str | None = None, part: str = "N") -> GadgetFragment:
    """``target + a >= tau`` and ``a < tau``: forces ``target >= 1``."""
    p = _fresh(prefix, "pos")
    aux = f"{p}.a"
    system = TauInequalitySystem((target, aux), (geq(target, aux), lt(aux)))
    other = "W" if part != "W" else "N"
    partition = QuadPartition.from_mapping({target: part, aux: other})
    return GadgetFragment(system, {"output": target, "aux": aux}, partition, "positivity")


def adder_threshold(i: int, n: int) -> int:
    """Least tau at which the adder of index ``i`` on a base bounded below by ``n`` is solvable."""
    return n + 2 ** (i + 1) + 1


def gadget_adder(i: int, base: str, *, prefix: str | None = None, positive: bool = True) -> GadgetFragment:
    """Adder raising the lower bound of ``base`` by ``2**(i+1)`` into ``z2``.

    ``i = 0`` gives the four-inequality doubling-free variant that adds 2.
    With ``positive`` every core variable except ``base`` gets a positivity
    pair.
    """
    if i < 0:
        raise ValueError("adder index must be nonnegative")
    p = _fresh(prefix, "add")

    def A(k, mark=""):
        if k == i and not mark:
            return base
        return f"{p}.A{k}{mark}"

    def B(k, mark):
        return f"{p}.B{k}{mark}"

    x0, z1, z2, xb, xc = (f"{p}.{s}" for s in ("x0", "z1", "z2", "xb", "xc"))
    rows = []
    if i >= 1:
        rows += [
            geq(A(1, "'"), B(1, "'"), x0),
            geq(A(1, "''"), B(1, "''"), x0),
            lt(A(1), B(1, "'"), x0),
            lt(A(1, "'"), B(1, "''"), x0),
        ]
    for j in range(2, i + 1):
        rows += [
            geq(A(j - 1), B(j, "'"), A(j, "'")),
            geq(A(j - 1), B(j, "''"), A(j, "''")),
            lt(A(j - 1, "''"), B(j, "'"), A(j)),
            lt(A(j, "'"), B(j, "''"), A(j - 1, "''")),
        ]
    top = A(i, "''") if i >= 1 else base
    rows += [lt(top, xb), lt(z1, xc), geq(z1, xb), geq(z2, xc)]

    core = [base]
    if i >= 1:
        core.append(x0)
    for k in range(1, i + 1):
        core += [A(k, "'"), A(k, "''"), B(k, "'"), B(k, "''")]
        if k < i:
            core.append(A(k))
    core += [z1, z2, xb, xc]
    if len(core) != 5 * i + 5:
        raise AssertionError(f"adder has {len(core)} core variables, expected {5 * i + 5}")

    # A-variables alternate between two parts by the parity of k, B's and
    # slacks share a third, positivity partners take the fourth
    part = {x0: "N", z1: "N", z2: "N", xb: "S", xc: "S"}
    for k in range(1, i + 1):
        side = "N" if k % 2 == 0 else "W"
        part[A(k, "'")] = part[A(k, "''")] = side
        if k < i:
            part[A(k)] = side
        part[B(k, "'")] = part[B(k, "''")] = "S"
    part[base] = "N" if i % 2 == 0 else "W"
    part = {v: part[v] for v in core}

    children = []
    if positive:
        for v in core:
            if v != base:
                children.append(gadget_positivity(v, prefix=f"{v}~pos", part=part[v]))
        for c in children:
            part[c.interface["aux"]] = "E"
    system = TauInequalitySystem.of(rows, core) | _merge(c.system for c in children)
    frag = GadgetFragment(
        system,
        {"base": base, "output": z2, "z1": z1, "xb": xb, "xc": xc},
        QuadPartition.from_mapping(part),
        "adder",
        {"i": i},
        tuple(children),
    )
    return frag


def gadget_lower_bound(m: int, *, prefix: str | None = None) -> GadgetFragment:
    """A fragment whose output is at least ``m`` in every solution.

    Built from the binary expansion of ``m``: a positive variable covers the
    lowest bit, and one adder per further set bit, lowest first.
    """
    if m < 1:
        raise ValueError("lower bound must be positive")
    p = _fresh(prefix, "lb")
    start = f"{p}.x"
    if m == 1:
        return gadget_positivity(start, prefix=f"{p}.pos")
    children = []
    if m & 1:
        children.append(gadget_positivity(start, prefix=f"{p}.pos"))
    current = start
    for j in range(1, m.bit_length()):
        if m >> j & 1:
            adder = gadget_adder(j - 1, current, prefix=f"{p}.s{j}")
            children.append(adder)
            current = adder.output
    system = _merge(c.system for c in children)
    system = TauInequalitySystem.of(system.inequalities, (start,) + system.variables)
    partition = find_quad_partition(system)
    if partition is None:
        raise AssertionError("lower-bound composition is not quadripartite")
    return GadgetFragment(system, {"output": current, "start": start}, partition, "lower_bound", {"m": m}, tuple(children))


def closed_form(frag: GadgetFragment, tau: int, base_value: int | None = None) -> dict[str, int]:
    """The explicit solution of a gadget fragment at temperature ``tau``.

    Adders take the base value ``n`` (default: 1); positivity partners are
    set to ``tau - 1``.  Valid for every tau at or above the fragment's
    threshold.
    """
    if frag.kind == "positivity":
        target = frag.output
        v = 1 if base_value is None else base_value
        return {target: v, frag.interface["aux"]: tau - 1}
    if frag.kind == "adder":
        i = frag.params["i"]
        n = 1 if base_value is None else base_value
        return _adder_values(frag, i, n, tau)
    if frag.kind == "lower_bound":
        m = frag.params["m"]
        values = {frag.interface["start"]: m & 1}
        current = m & 1
        for child in frag.children:
            if child.kind == "positivity":
                values.update(closed_form(child, tau, 1))
            else:
                values.update(closed_form(child, tau, current))
                current += 2 ** (child.params["i"] + 1)
        return values
    raise ValueError(f"no closed form for {frag.kind}")


def _adder_values(frag: GadgetFragment, i: int, n: int, tau: int) -> dict[str, int]:
    base = frag.interface["base"]
    p = frag.output.rsplit(".", 1)[0]
    A = lambda k, mark="": base if k == i and not mark else f"{p}.A{k}{mark}"
    B = lambda k, mark: f"{p}.B{k}{mark}"
    top = n + 2 ** (i + 1)
    val = {base: n, f"{p}.z1": top - 1, f"{p}.z2": top, f"{p}.xb": tau - (top - 1), f"{p}.xc": tau - top}
    if i >= 1:
        val[f"{p}.x0"] = 1
    for k in range(1, i + 1):
        if k < i:
            a1, a2 = 2 ** k, 2 ** (k + 1) - 1
            val[A(k)] = 1
        else:
            a1, a2 = n + 2 ** i - 1, n + 2 ** (i + 1) - 2
        val[A(k, "'")], val[A(k, "''")] = a1, a2
        val[B(k, "'")], val[B(k, "''")] = tau - a1 - 1, tau - a2 - 1
    for child in frag.children:
        val.update(closed_form(child, tau, val[child.output]))
    return val


def system_min_tau(k: int, *, prefix: str | None = None) -> TauInequalitySystem:
    """A system solvable exactly at the temperatures ``tau >= k``.

    The output of a lower bound of ``k - 1`` is kept below tau.  The claimed
    threshold is checked for every tau up to ``k + 3`` before returning.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    frag = gadget_lower_bound(k - 1, prefix=_fresh(prefix, "mt"))
    system = frag.system | TauInequalitySystem((frag.output,), (lt(frag.output),))
    if not is_tp43(system) or not check_quadripartite(system, frag.partition):
        raise AssertionError("min-tau system violates its arity or partition contract")
    for tau in range(1, k + 4):
        if (decide(system, tau) is not None) != (tau >= k):
            raise AssertionError(f"min-tau system has the wrong feasibility at tau={tau}")
    return system
