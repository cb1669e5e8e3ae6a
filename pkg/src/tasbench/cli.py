"""Command-line entry point.

Exit codes: 0 success, 1 negative answer, 2 usage or validation error,
3 resource limit hit.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import formats as fmt
from .atam import Shape
from .coopsets import find_opt_strength, find_strength, locally_equivalent
from .engine import (
    Outcome,
    ResourcesExceeded,
    SimulationBounds,
    frontier,
    is_directed,
    strictly_self_assembles,
    terminal_assemblies,
    tile_complexity_oracle,
)
from .reductions import (
    brute_force_1in3,
    monotone_to_quadripartite,
    quad1in3_to_tp,
    tp_min_variant,
    tp_solution_to_assignment,
    tp_to_sftas,
)
from .shapegen import build_shape, build_variable_tree, build_witness_tas, plan_roles, render
from .threshold import decide, minimize_tau

OK, NEGATIVE, USAGE, RESOURCES = 0, 1, 2, 3


class CliError(Exception):
    """Validation failure reported with exit code 2."""


class VerifyError(Exception):
    """A ``--verify`` cross-check disagreed."""


@dataclass
class Report:
    """Key-value headline plus an optional body block."""

    pairs: list[tuple[str, object]] = field(default_factory=list)
    body: str = ""
    is_file: bool = False

    def add(self, key, value):
        self.pairs.append((key, value))

    def emit(self, style: str, out, err) -> None:
        # a file body on stdout stays clean so it can be piped onward
        head = err if self.is_file and style == "text" else out
        for k, v in self.pairs:
            head.write(f"{k}={_fmt_value(v)}\n")
        if self.body:
            if style == "machine":
                for line in self.body.splitlines():
                    out.write(f"line={line}\n")
            else:
                out.write(self.body if self.body.endswith("\n") else self.body + "\n")


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _write_or_body(args, text: str, report: Report) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
        report.add("written", args.output)
    else:
        report.body = text
        report.is_file = True


def _bounds(args, default_region: Shape | None = None) -> SimulationBounds:
    region = default_region
    if args.region:
        x0, y0, x1, y1 = args.region
        if x0 > x1 or y0 > y1:
            raise CliError("region corners must satisfy x0 <= x1 and y0 <= y1")
        region = Shape((x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1))
    return SimulationBounds(region=region, max_assemblies=args.max_states, max_size=args.max_size)


# -- tp ---------------------------------------------------------------------------


def cmd_tp_decide(args, report):
    system = fmt.read_system(_read(args.system))
    sol = decide(system, args.tau)
    if sol is None:
        report.add("feasible", False)
        return NEGATIVE
    report.add("feasible", True)
    report.add("tau", args.tau)
    report.body = fmt.write_values(sol)
    return OK


def cmd_tp_min(args, report):
    system = fmt.read_system(_read(args.system))
    res = minimize_tau(system, args.tau_max)
    if res is None:
        report.add("feasible", False)
        report.add("tau_max", args.tau_max)
        return NEGATIVE
    tau, sol = res
    report.add("tau", tau)
    report.body = fmt.write_values(sol)
    return OK


# -- sat ---------------------------------------------------------------------------


def cmd_sat_solve(args, report):
    inst = fmt.read_instance(_read(args.instance))
    sol = brute_force_1in3(inst)
    if sol is None:
        report.add("satisfiable", False)
        return NEGATIVE
    report.add("satisfiable", True)
    report.body = "".join(f"{v}={int(sol[v])}\n" for v in inst.variables)
    return OK


def cmd_sat_reduce_quad(args, report):
    inst = fmt.read_instance(_read(args.instance))
    if not inst.is_monotone():
        raise CliError("reduce-quad expects a monotone instance")
    quad = monotone_to_quadripartite(inst)
    if args.verify and (brute_force_1in3(inst) is None) != (brute_force_1in3(quad) is None):
        raise VerifyError("quadripartite instance disagrees with the source on satisfiability")
    report.add("clauses", len(quad.clauses))
    report.add("variables", len(quad.variables))
    _write_or_body(args, fmt.write_instance(quad), report)
    return OK


def cmd_sat_reduce_tp(args, report):
    inst = fmt.read_instance(_read(args.instance))
    if inst.partition is None or not inst.is_quadripartite():
        raise CliError("reduce-tp expects a quadripartite instance with part lines")
    system = tp_min_variant(inst) if args.min else quad1in3_to_tp(inst, args.tau)
    if args.verify:
        sat = brute_force_1in3(inst) is not None
        if args.min:
            res = minimize_tau(system, 4)
            ok = (res is not None and res[0] == 4) == sat
        else:
            sol = decide(system, args.tau)
            ok = (sol is not None) == sat
            if ok and sol is not None:
                tp_solution_to_assignment(sol, inst)
        if not ok:
            raise VerifyError("inequality system disagrees with the instance on satisfiability")
    report.add("variables", len(system.variables))
    report.add("inequalities", len(system.inequalities))
    _write_or_body(args, fmt.write_system(system), report)
    return OK


def cmd_sat_reduce_sftas(args, report):
    system = fmt.read_system(_read(args.system))
    try:
        sf = tp_to_sftas(system)
    except ValueError as e:
        raise CliError(str(e)) from None
    if args.verify:
        a = decide(system, args.tau) is not None
        b = find_strength(sf, args.tau) is not None
        if a != b:
            raise VerifyError(f"strength synthesis ({b}) disagrees with the system ({a}) at tau={args.tau}")
    report.add("tile_types", len(sf.tile_types))
    _write_or_body(args, fmt.write_sftas(sf), report)
    return OK


# -- sftas -------------------------------------------------------------------------


def cmd_sftas_find(args, report):
    sf = fmt.read_sftas(_read(args.sftas))
    g = find_strength(sf, args.tau)
    if g is None:
        report.add("realizable", False)
        report.add("tau", args.tau)
        return NEGATIVE
    report.add("realizable", True)
    report.add("tau", args.tau)
    report.body = fmt.write_strengths(g)
    return OK


def cmd_sftas_findopt(args, report):
    sf = fmt.read_sftas(_read(args.sftas))
    res = find_opt_strength(sf, args.tau_max)
    if res is None:
        report.add("realizable", False)
        report.add("tau_max", args.tau_max)
        return NEGATIVE
    g, tau = res
    report.add("realizable", True)
    report.add("tau", tau)
    report.body = fmt.write_strengths(g)
    return OK


def cmd_sftas_check_equiv(args, report):
    a = fmt.read_tas(_read(args.first))
    b = fmt.read_tas(_read(args.second))
    eq = locally_equivalent(a, b)
    report.add("equivalent", eq)
    return OK if eq else NEGATIVE


# -- shape -------------------------------------------------------------------------


def _check_trees(shape: Shape, plan) -> None:
    """Every mounted tree copy sits in the shape exactly as built alone."""
    cells = set(shape)
    for item in plan.items:
        dx, dy = item.offset
        for tid in item.trees:
            tree = build_variable_tree(plan.tree(tid))
            if not {(x + dx, y + dy) for x, y in tree} <= cells:
                raise VerifyError(f"tree {tid} of item {item.name} is not in the shape")
    if fmt.read_shape(fmt.write_shape(shape)) != shape:
        raise VerifyError("shape does not survive a write/read round trip")


def cmd_shape_build(args, report):
    system = fmt.read_system(_read(args.system))
    shape, plan = build_shape(system, None, args.height)
    if args.verify:
        _check_trees(shape, plan)
    report.add("cells", len(shape))
    report.add("h", plan.h)
    for k, v in plan.constants.items():
        report.add(k, v)
    if args.plan:
        Path(args.plan).write_text(fmt.write_plan(plan))
        report.add("plan", args.plan)
    if args.render:
        Path(args.render_to or f"shape.{'svg' if args.render == 'svg' else 'txt'}").write_text(render(shape, args.render, plan_roles(plan)))
    _write_or_body(args, fmt.write_shape(shape), report)
    return OK


def cmd_shape_render(args, report):
    shape = fmt.read_shape(_read(args.shape))
    roles = plan_roles(fmt.read_plan(_read(args.plan))) if args.plan else None
    _write_or_body(args, render(shape, args.render, roles), report)
    return OK


def cmd_shape_witness(args, report):
    system = fmt.read_system(_read(args.system))
    bounds = {v: (1, args.tau - 1) for v in system.variables}
    sol = decide(system, args.tau, bounds=bounds) if args.tau > 1 else None
    if sol is None:
        report.add("feasible", False)
        return NEGATIVE
    w = build_witness_tas(system, None, sol, args.tau, args.height)
    shape, _ = build_shape(system, None, w.plan.h)
    if args.shape:
        Path(args.shape).write_text(fmt.write_shape(shape))
        report.add("shape", args.shape)
    if args.verify:
        verdict = strictly_self_assembles(w.tas, shape, args.max_states)
        if verdict.outcome is not Outcome.YES:
            raise VerifyError(f"witness does not strictly self-assemble the shape: {verdict.reason}")
    report.add("tile_types", len(w.tas.tile_types))
    for k, v in w.type_count_breakdown.items():
        report.add(k, v)
    report.add("c", w.plan.constants["c"])
    _write_or_body(args, fmt.write_tas(w.tas), report)
    return OK


# -- sim ---------------------------------------------------------------------------


def cmd_sim_frontier(args, report):
    tas = fmt.read_tas(_read(args.tas))
    a = fmt.read_assembly(_read(args.assembly), tas.tile_types) if args.assembly else tas.seed
    events = frontier(tas, a)
    report.add("events", len(events))
    report.body = "".join(f"{e.position[0]} {e.position[1]} {e.tile.name} {e.strength}\n" for e in events)
    return OK


def cmd_sim_terminals(args, report):
    tas = fmt.read_tas(_read(args.tas))
    terms = sorted(terminal_assemblies(tas, _bounds(args)), key=lambda a: sorted((p, t.name) for p, t in a.items()))
    report.add("terminals", len(terms))
    report.body = "\n".join(f"terminal {k}\n" + fmt.write_assembly(a) for k, a in enumerate(terms, 1))
    return OK


def cmd_sim_strict(args, report):
    tas = fmt.read_tas(_read(args.tas))
    shape = fmt.read_shape(_read(args.shape))
    v = strictly_self_assembles(tas, shape, args.max_states)
    report.add("outcome", v.outcome.value)
    if v.reason:
        report.add("reason", v.reason)
    if v.witness is not None:
        report.body = fmt.write_assembly(v.witness)
    return {Outcome.YES: OK, Outcome.NO: NEGATIVE, Outcome.RESOURCES_EXCEEDED: RESOURCES}[v.outcome]


def cmd_sim_directed(args, report):
    tas = fmt.read_tas(_read(args.tas))
    d = is_directed(tas, _bounds(args))
    report.add("directed", d)
    return OK if d else NEGATIVE


# -- oracle ------------------------------------------------------------------------


def cmd_oracle_tilecomplexity(args, report):
    shape = fmt.read_shape(_read(args.shape))
    d = tile_complexity_oracle(shape, args.tau, args.max_types, args.max_labels)
    report.add("tau", args.tau)
    if d is None:
        report.add("found", False)
        report.add("max_types", args.max_types)
        return NEGATIVE
    report.add("tile_complexity", d)
    return OK


# -- parser ------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tasbench", description="Tile assembly, tau-inequality and reduction toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, func, help_):
        sp = group.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS)
        return sp

    def out(sp):
        sp.add_argument("-o", "--output", help="write the result file here instead of stdout")

    def limits(sp, region=True):
        sp.add_argument("--max-states", type=_positive, default=200_000)
        sp.add_argument("--max-size", type=_positive, default=100_000)
        if region:
            sp.add_argument("--region", type=int, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))

    tp = groups.add_parser("tp", help="tau-inequality systems").add_subparsers(dest="cmd", required=True)
    sp = sub(tp, "decide", cmd_tp_decide, "solve a system at one tau")
    sp.add_argument("system")
    sp.add_argument("--tau", type=_positive, required=True)
    sp = sub(tp, "min", cmd_tp_min, "least feasible tau")
    sp.add_argument("system")
    sp.add_argument("--tau-max", type=_positive, default=64)

    sat = groups.add_parser("sat", help="1-in-3 SAT instances and reductions").add_subparsers(dest="cmd", required=True)
    sp = sub(sat, "solve", cmd_sat_solve, "decide 1-in-3 satisfiability")
    sp.add_argument("instance")
    sp = sub(sat, "reduce-quad", cmd_sat_reduce_quad, "monotone to quadripartite instance")
    sp.add_argument("instance")
    sp.add_argument("--verify", action="store_true")
    out(sp)
    sp = sub(sat, "reduce-tp", cmd_sat_reduce_tp, "quadripartite instance to inequality system")
    sp.add_argument("instance")
    sp.add_argument("--tau", type=_positive, default=4)
    sp.add_argument("--min", action="store_true", help="emit the least-tau variant")
    sp.add_argument("--verify", action="store_true")
    out(sp)
    sp = sub(sat, "reduce-sftas", cmd_sat_reduce_sftas, "inequality system to strength-free TAS")
    sp.add_argument("system")
    sp.add_argument("--tau", type=_positive, default=4, help="temperature used by --verify")
    sp.add_argument("--verify", action="store_true")
    out(sp)

    sft = groups.add_parser("sftas", help="strength-free systems").add_subparsers(dest="cmd", required=True)
    sp = sub(sft, "find", cmd_sftas_find, "synthesize strengths at one tau")
    sp.add_argument("sftas")
    sp.add_argument("--tau", type=_positive, required=True)
    sp = sub(sft, "findopt", cmd_sftas_findopt, "least tau with a realizing strength function")
    sp.add_argument("sftas")
    sp.add_argument("--tau-max", type=_positive, default=64)
    sp = sub(sft, "check-equiv", cmd_sftas_check_equiv, "compare cooperation sets of two TAS files")
    sp.add_argument("first")
    sp.add_argument("second")

    sh = groups.add_parser("shape", help="shape construction").add_subparsers(dest="cmd", required=True)
    sp = sub(sh, "build", cmd_shape_build, "shape encoding a quadripartite system")
    sp.add_argument("system")
    sp.add_argument("--height", type=_positive)
    sp.add_argument("--plan", help="also write the plan file here")
    sp.add_argument("--render", choices=("svg", "ascii"))
    sp.add_argument("--render-to", help="file for --render output")
    sp.add_argument("--verify", action="store_true")
    out(sp)
    sp = sub(sh, "render", cmd_shape_render, "draw a shape file")
    sp.add_argument("shape")
    sp.add_argument("--render", choices=("svg", "ascii"), default="ascii")
    sp.add_argument("--plan", help="plan file for role colors")
    out(sp)
    sp = sub(sh, "witness", cmd_shape_witness, "TAS assembling the shape of a solvable system")
    sp.add_argument("system")
    sp.add_argument("--tau", type=_positive, default=4)
    sp.add_argument("--height", type=_positive)
    sp.add_argument("--shape", help="also write the shape file here")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--max-states", type=_positive, default=200_000)
    out(sp)

    sim = groups.add_parser("sim", help="simulate a TAS").add_subparsers(dest="cmd", required=True)
    sp = sub(sim, "frontier", cmd_sim_frontier, "attachments available to an assembly")
    sp.add_argument("tas")
    sp.add_argument("assembly", nargs="?")
    sp = sub(sim, "terminals", cmd_sim_terminals, "all terminal assemblies")
    sp.add_argument("tas")
    limits(sp)
    sp = sub(sim, "strict", cmd_sim_strict, "strict self-assembly of a shape")
    sp.add_argument("tas")
    sp.add_argument("shape")
    limits(sp, region=False)
    sp = sub(sim, "directed", cmd_sim_directed, "unique terminal assembly check")
    sp.add_argument("tas")
    limits(sp)

    orc = groups.add_parser("oracle", help="brute-force oracles").add_subparsers(dest="cmd", required=True)
    sp = sub(orc, "tilecomplexity", cmd_oracle_tilecomplexity, "least tile count for a tiny shape")
    sp.add_argument("shape")
    sp.add_argument("--tau", type=_positive, default=1)
    sp.add_argument("--max-types", type=_positive, default=4)
    sp.add_argument("--max-labels", type=int, default=4)
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    report = Report()
    try:
        code = args.func(args, report)
    except ResourcesExceeded as e:
        report.add("error", "resources_exceeded")
        report.add("reason", e.reason)
        code = RESOURCES
    except VerifyError as e:
        print(f"tasbench: verification failed: {e}", file=stderr)
        return USAGE
    except (CliError, ValueError) as e:
        print(f"tasbench: {e}", file=stderr)
        return USAGE
    report.emit(args.format, stdout, stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
