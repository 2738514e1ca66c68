"""Command-line front end.

Exit codes: 0 solution/OK, 1 NO (or violated), 2 EXCEPTION, 64 usage or
parse error, 70 internal error.
"""
from __future__ import annotations

import argparse
import json
import subprocess
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import bench
from .closures import ExtendedRelation
from .core import EXCEPTION, NO, CspError, InputError, Instance, brute_force_backend, violations
from .io import (
    dumps_instance,
    format_cnf,
    instance_to_cnf,
    loads_instance,
    parse_assignment,
    parse_cnf,
    parse_graph,
    read_instance,
)
from .oracles import RevealLevel, make_fixed_oracle
from .reductions import (
    PROPERTIES,
    REDUCTIONS,
    check_equivalence,
    coloring_to_hyperplane_noncover,
    eq_class_hardness,
    graph_property_gadget,
    hamdigraph_to_groupeq,
    lineq_unary_type,
    monsat_encode,
    threecol_to_union_ug,
    threesat_to_rf_union_2sat,
    threesat_to_union_delta,
    union_2col_rf_transform,
)
from .solvers.promise import kweight_rf_backend, onesat_rf_backend
from .solvers.twosat import twosat_backend
from .transfer import solve_hidden, solve_hidden_v_promise, trial_bound

EXIT_OK, EXIT_NO, EXIT_EXCEPTION, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 64, 70


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    problem: str
    level: str
    policy: str
    trials: int
    bound: int | None
    answer: str
    wall_seconds: float

    def lines(self) -> list[str]:
        d = asdict(self)
        d["wall_seconds"] = f"{self.wall_seconds:.3f}"
        d["bound"] = "-" if self.bound is None else self.bound
        width = max(len(k) for k in d)
        return [f"{k.ljust(width)}  {v}" for k, v in d.items()]


# ---------------------------------------------------------------------------
# backends


def custom_backend(path: str):
    """An external executable reading an instance file on stdin and
    printing an assignment (JSON list or integers), NO or EXCEPTION."""

    def backend(inst: Instance):
        proc = subprocess.run([path], input=dumps_instance(inst), capture_output=True,
                              text=True, check=False)
        if proc.returncode not in (0, 1, 2):
            raise CspError(f"custom backend exited with {proc.returncode}: {proc.stderr.strip()}")
        out = proc.stdout.strip()
        if out == "NO":
            return NO
        if out == "EXCEPTION":
            return EXCEPTION
        return parse_assignment(out)

    return backend


def matching_backend(inst: Instance):
    if inst.admissible.kind == "weight":
        return kweight_rf_backend(inst)
    return onesat_rf_backend(inst)


def make_backend(spec: str):
    """Returns (backend, promise_mode)."""
    if spec == "brute":
        return brute_force_backend, False
    if spec == "2sat":
        return twosat_backend, False
    if spec == "matching":
        return matching_backend, True
    if spec.startswith("custom:"):
        path = spec.split(":", 1)[1]
        if not path:
            raise UsageError("custom backend needs a path")
        return custom_backend(path), False
    raise UsageError(f"unknown backend {spec!r}")


def _answer_text(ans) -> str:
    if ans is NO:
        return "NO"
    if ans is EXCEPTION:
        return "EXCEPTION"
    return " ".join(map(str, ans))


def _exit_for(ans) -> int:
    return EXIT_NO if ans is NO else EXIT_EXCEPTION if ans is EXCEPTION else EXIT_OK


def _load(path: str) -> Instance:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return loads_instance(text)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    backend, _ = make_backend(args.backend)
    try:
        ans = backend(inst)
    except InputError as e:
        raise UsageError(f"backend {args.backend!r} cannot handle this instance: {e}") from None
    print(_answer_text(ans))
    return _exit_for(ans)


def cmd_hide(args) -> int:
    inst = _load(args.instance)
    if any(isinstance(r, ExtendedRelation) for r in inst.relations):
        raise UsageError("hidden instances must use explicit relations, not unions of lifted terms")
    level = RevealLevel.parse(args.reveal)
    backend, promise = make_backend(args.backend)
    oracle = make_fixed_oracle(inst, level, args.policy)
    start = time.perf_counter()
    try:
        if promise:
            if level not in (RevealLevel.V, RevealLevel.NONE):
                raise UsageError("promise backends run under --reveal v or none")
            ans = solve_hidden_v_promise(oracle, backend)
            bound = None
        else:
            ans = solve_hidden(oracle, backend)
            bound = trial_bound(level, inst.relations, inst.admissible, inst.m)
    except InputError as e:
        raise UsageError(f"backend {args.backend!r} is incompatible: {e}") from None
    report = RunReport(Path(args.instance).stem, level.value, args.policy, oracle.trials,
                       bound, _answer_text(ans), time.perf_counter() - start)
    if args.json:
        print(json.dumps(asdict(report), sort_keys=True))
    else:
        print("\n".join(report.lines()))
    if args.transcript:
        print("\n".join(oracle.transcript.lines()))
    if bound is not None and oracle.trials > bound:
        print(f"error: {oracle.trials} trials exceed the bound {bound}", file=sys.stderr)
        return EXIT_INTERNAL
    return _exit_for(ans)


def _base_from_directives(directives: dict, base_file: str | None):
    if base_file:
        inst = read_instance(base_file)
        return list(inst.relations), inst.w
    spec = directives.get("base", ["lineq", "2"])
    if len(spec) != 2 or spec[0] != "lineq":
        raise InputError("base directive must read 'c base lineq P'")
    p = int(spec[1])
    return lineq_unary_type(p), p


def build_reduction(name: str, text: str, args):
    """Parse the source text for reduction ``name`` and run the constructor."""
    if name in PROPERTIES:
        return graph_property_gadget(name, parse_graph(text))
    if name in ("3sat-delta", "rf-2sat", "monsat"):
        phi, directives = parse_cnf(text)
        if name == "3sat-delta":
            return threesat_to_union_delta(phi)
        if name == "rf-2sat":
            return threesat_to_rf_union_2sat(phi)
        relations, w = _base_from_directives(directives, args.base)
        return monsat_encode(relations, w, phi)
    g = parse_graph(text)

    def param(key, default=None):
        val = getattr(args, key, None)
        if val is None:
            val = g.params.get(key, default)
        if val is None:
            raise InputError(f"reduction {name} needs parameter {key}")
        return val

    if name == "3col-ug":
        return threecol_to_union_ug(g, param("k", 3))
    if name == "eq-clique":
        return eq_class_hardness("clique", g, g.forced, param("k"))
    if name == "eq-hamc":
        return eq_class_hardness("hamiltonian-cycle", g, g.forced)
    if name == "col-hyp":
        return coloring_to_hyperplane_noncover(g, param("p"))
    if name == "rf-2col":
        return union_2col_rf_transform(g.n, g.edge_sets)
    if name == "groupeq":
        return hamdigraph_to_groupeq(g, param("p", g.n), param("z", 2))
    raise UsageError(f"unknown reduction {name!r}")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)


def cmd_reduce(args) -> int:
    text = sys.stdin.read() if args.source == "-" else Path(args.source).read_text()
    out = build_reduction(args.kind, text, args)
    payload = format_cnf(instance_to_cnf(out.target)) if args.emit_dimacs else dumps_instance(out.target)
    if args.output:
        Path(args.output).write_text(payload)
    else:
        sys.stdout.write(payload)
    if args.manifest:
        manifest = {
            "reduction": out.name,
            "source": args.source,
            "target": {"w": out.target.w, "ell": out.target.ell, "q": out.target.q, "m": out.target.m},
            "metadata": _jsonable({k: v for k, v in out.metadata.items() if k != "block_family"}),
        }
        if args.check:
            rep = check_equivalence(out)
            manifest["check"] = asdict(rep) | {"ok": rep.ok}
            src = out.source_solve()
            if src is not None:
                manifest["source_witness"] = _jsonable(src)
                manifest["target_witness"] = list(out.forward(src))
        Path(args.manifest).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    a = parse_assignment(Path(args.assignment).read_text())
    bad = violations(inst, a)
    if not bad:
        print("OK")
        return EXIT_OK
    print("VIOLATED " + " ".join(map(str, bad)))
    return EXIT_NO


def cmd_bench(args) -> int:
    if args.cases < 0:
        raise UsageError("--cases must be non-negative")
    rows = bench.run_bench(args.family, args.cases, args.seed)
    sys.stdout.write(bench.format_table(rows))
    s = bench.summary(rows)
    print(" ".join(f"{k}={v}" for k, v in s.items()))
    if args.json:
        Path(args.json).write_text(bench.dump_json(rows))
    return EXIT_OK if s["disagreements"] == 0 and s["bound_violations"] == 0 else EXIT_INTERNAL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hiddencsp", description="Trial-and-error CSP toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance file directly")
    s.add_argument("instance")
    s.add_argument("--backend", default="brute")
    s.set_defaults(func=cmd_solve)

    h = sub.add_parser("hide", help="hide an instance behind a revealing oracle and solve it")
    h.add_argument("instance")
    h.add_argument("--reveal", choices=[lv.value for lv in RevealLevel], default="v")
    h.add_argument("--policy", default="first", help="first, random:SEED or greedy")
    h.add_argument("--backend", default="brute")
    h.add_argument("--json", action="store_true", help="print the report as JSON")
    h.add_argument("--transcript", action="store_true", help="print every trial and reply")
    h.set_defaults(func=cmd_hide)

    r = sub.add_parser("reduce", help="build a hardness-gadget target instance")
    r.add_argument("--from", dest="kind", required=True, choices=REDUCTIONS)
    r.add_argument("source")
    r.add_argument("-o", "--output")
    r.add_argument("--manifest", help="write a JSON manifest with provenance metadata")
    r.add_argument("--check", action="store_true", help="brute-force both sides into the manifest")
    r.add_argument("--emit-dimacs", action="store_true", help="emit Boolean clause targets as DIMACS")
    r.add_argument("--k", type=int)
    r.add_argument("--p", type=int)
    r.add_argument("--z", type=int)
    r.add_argument("--base", help="instance file whose relations form the MONSAT base type")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="list the constraints an assignment violates")
    v.add_argument("instance")
    v.add_argument("assignment")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="seeded trial counts against the proven bounds")
    b.add_argument("--family", choices=bench.FAMILIES, default="rand-small")
    b.add_argument("--cases", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", help="also write a JSON dump to this path")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "policy", None) and not (
            args.policy in ("first", "greedy") or args.policy.startswith("random:")):
        parser.error(f"unknown policy {args.policy!r}")
    try:
        return args.func(args)
    except (UsageError, InputError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CspError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
