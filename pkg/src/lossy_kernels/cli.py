"""Command line interface: gen, kernelize, lift, solve, verify, report."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any

from . import generators, harness, io
from .cvc import cvc_kernelize
from .cycles import cp_kernelize
from .factors import df_kernelize
from .framework import AccuracyError, KernelOutput, ParameterizedInstance
from .ola import OlaInstance, ola_kernelize
from .oracles import OracleRefusal
from .problems import PROBLEMS, get
from .pvc import pvc_kernelize
from .steiner import DEFAULT_DW_CAP, CapExceeded, SteinerInstance, steiner_kernelize


class CliError(Exception):
    pass


# -- instances -------------------------------------------------------------


def load_instance(problem: str, text: str, k: int | None, line: int = 1) -> ParameterizedInstance:
    if problem == "df":
        lines = text.splitlines()
        if not 1 <= line <= max(1, len(lines)):
            raise CliError(f"line {line} is out of range")
        word = lines[line - 1] if lines else ""
        return ParameterizedInstance(word, len(set(word)) if k is None else k)
    gf = io.parse_dimacs(text)
    if k is None:
        k = next((int(c.split()[1]) for c in gf.comments if c.startswith("k ")), None)
    if problem == "steiner":
        if not gf.terminals:
            raise CliError("Steiner instances need 't <v>' terminal lines")
        return ParameterizedInstance(SteinerInstance(gf.graph, frozenset(gf.terminals)), len(set(gf.terminals)))
    if problem == "ola":
        if not gf.cover and gf.graph.num_edges:
            raise CliError("arrangement instances need 'vc <v>' vertex cover lines")
        cover = frozenset(gf.cover)
        return ParameterizedInstance(OlaInstance(gf.graph, cover), len(cover) if k is None else k)
    if k is None:
        raise CliError(f"{problem} needs --k")
    return ParameterizedInstance(gf.graph, k)


def run_kernel(problem: str, inst: ParameterizedInstance, accuracy: float, options: dict) -> KernelOutput:
    p = inst.payload
    if problem == "cvc":
        return cvc_kernelize(p, inst.k, accuracy)
    if problem == "pvc":
        return pvc_kernelize(p, inst.k, accuracy)
    if problem == "cp":
        return cp_kernelize(p, inst.k, accuracy)
    if problem == "df":
        return df_kernelize(p, inst.k, accuracy)
    if problem == "steiner":
        return steiner_kernelize(p, inst.k, accuracy, options.get("dw_cap") or DEFAULT_DW_CAP)
    if problem == "ola":
        return ola_kernelize(p.graph, p.cover, inst.k, accuracy, force_x=options.get("force_x"))
    raise CliError(f"unknown problem {problem!r}")


def instance_text(problem: str, inst: ParameterizedInstance) -> tuple[str, list[int]]:
    """Serialized reduced instance and the file-id -> vertex-id order."""
    p = inst.payload
    if problem == "df":
        return p + "\n", []
    comments = [f"k {inst.k}"]
    if problem == "steiner":
        return io.format_dimacs(p.graph, terminals=p.terminals, comments=comments)
    if problem == "ola":
        return io.format_dimacs(p.graph, cover=p.cover, comments=comments)
    return io.format_dimacs(p, comments=comments)


# -- solutions -------------------------------------------------------------


def parse_solution(problem: str, text: str, order: list[int]) -> Any:
    def vid(tok: str) -> int:
        i = int(tok)
        if not 1 <= i <= len(order):
            raise CliError(f"vertex {i} is not in the instance")
        return order[i - 1]

    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("c")]
    if problem in ("cvc", "pvc"):
        return frozenset(vid(t) for row in rows for t in row)
    if problem == "ola":
        return [vid(t) for row in rows for t in row]
    if problem == "cp":
        return [tuple(vid(t) for t in row) for row in rows]
    if problem == "steiner":
        return [(vid(a), vid(b)) for a, b in rows]
    if problem == "df":
        return [(int(a), int(b)) for a, b in rows]
    raise CliError(f"unknown problem {problem!r}")


def format_solution(problem: str, sol: Any) -> str:
    """Solutions in 1-based file ids of the original instance."""
    if problem in ("cvc", "pvc"):
        return " ".join(str(v + 1) for v in sorted(sol)) + "\n"
    if problem == "ola":
        return " ".join(str(v + 1) for v in sol) + "\n"
    if problem == "cp":
        return "".join(" ".join(str(v + 1) for v in cyc) + "\n" for cyc in sol)
    if problem == "steiner":
        return "".join(f"{u + 1} {v + 1}\n" for u, v in sol)
    if problem == "df":
        return "".join(f"{i} {j}\n" for i, j in sol)
    raise CliError(f"unknown problem {problem!r}")


def fingerprint(problem: str, kernel: KernelOutput) -> str:
    if kernel.transcript is not None:
        return kernel.transcript.to_json_lines()
    if problem == "df":
        return json.dumps(list(kernel.info["positions"].targets))
    return ""


# -- subcommands -------------------------------------------------------------


def _accuracy(problem: str, args: argparse.Namespace) -> float:
    kind = get(problem).accuracy_kind
    value = args.alpha if kind == "alpha" else args.eps
    if value is None:
        raise CliError(f"{problem} needs --{kind}")
    return value


def cmd_gen(args: argparse.Namespace) -> int:
    params = {}
    for item in args.param:
        key, _, value = item.partition("=")
        if not value:
            raise CliError(f"bad --param {item!r}; use key=value")
        params[key.replace("-", "_")] = value
    out = Path(args.out)
    if args.count > 1:
        out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        inst = generators.generate(generators.GeneratorSpec(args.family, params, seed))
        header = [f"generator {args.family} {' '.join(f'{k}={v}' for k, v in sorted(params.items()))}".rstrip(),
                  f"prng {generators.PRNG_NAME} seed {seed}"]
        if isinstance(inst, str):
            text, ext = inst + "\n", "txt"
        elif isinstance(inst, tuple):
            text, ext = io.format_dimacs(inst[0], comments=header)[0], "dimacs"
        elif isinstance(inst, SteinerInstance):
            text, ext = io.format_dimacs(inst.graph, terminals=inst.terminals, comments=header)[0], "dimacs"
        elif isinstance(inst, OlaInstance):
            text, ext = io.format_dimacs(inst.graph, cover=inst.cover, comments=header)[0], "dimacs"
        else:
            text, ext = io.format_dimacs(inst, comments=header)[0], "dimacs"
        target = out / f"{args.family}-{i:04d}.{ext}" if args.count > 1 else out
        target.write_text(text)
    return 0


def cmd_kernelize(args: argparse.Namespace) -> int:
    source = Path(args.input).read_text()
    acc = _accuracy(args.problem, args)
    options = {"force_x": args.force_x, "dw_cap": args.dw_cap}
    if args.problem == "df":
        count = max(1, len(source.splitlines()))
        insts = [load_instance("df", source, args.k, i) for i in range(1, count + 1)]
    else:
        insts = [load_instance(args.problem, source, args.k)]
    kernels = [run_kernel(args.problem, inst, acc, options) for inst in insts]
    texts, orders = zip(*(instance_text(args.problem, ker.reduced) for ker in kernels))
    Path(args.out).write_text("".join(texts))
    if args.problem == "df" and args.positions:
        io.write_position_maps(args.positions, (ker.info["positions"].targets for ker in kernels))
    if args.state:
        state = {
            "problem": args.problem,
            "accuracy": acc,
            "k": args.k if args.problem == "df" else insts[0].k,
            "options": options,
            "input": source,
            "order": orders[0],
            "fingerprint": [fingerprint(args.problem, ker) for ker in kernels],
        }
        Path(args.state).write_text(json.dumps(state, indent=1) + "\n")
    problem = get(args.problem)
    for ker in kernels:
        print(f"reduced size {problem.size(ker.reduced.payload)} parameter {ker.reduced.k}")
    return 0


def cmd_lift(args: argparse.Namespace) -> int:
    state = json.loads(Path(args.state).read_text())
    problem = state["problem"]
    if args.problem != problem:
        raise CliError(f"state file is for {problem}, not {args.problem}")
    inst = load_instance(problem, state["input"], state["k"], args.line)
    kernel = run_kernel(problem, inst, state["accuracy"], state["options"])
    saved = state["fingerprint"][args.line - 1] if args.line <= len(state["fingerprint"]) else None
    if fingerprint(problem, kernel) != saved:
        raise CliError("kernel rerun does not match the saved transcript")
    sol = parse_solution(problem, Path(args.solution).read_text(), state["order"])
    lifted = kernel.lift(sol)
    value = get(problem).value(inst.payload, inst.k, lifted)
    text = format_solution(problem, lifted)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"value {value}", file=sys.stderr)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.problem, Path(args.input).read_text(), args.k)
    value, witness = get(args.problem).oracle(inst.payload, inst.k)
    print(f"value {value}")
    sys.stdout.write(format_solution(args.problem, witness))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    accs = args.alpha if get(args.problem).accuracy_kind == "alpha" else args.eps
    if not accs:
        raise CliError(f"{args.problem} needs at least one --{get(args.problem).accuracy_kind}")
    corpus = []
    for path in args.input:
        corpus.append((Path(path).name, load_instance(args.problem, Path(path).read_text(), args.k)))
    rows = harness.run_experiment(corpus, args.problem, accs, verify=not args.no_oracle)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            harness.write_csv(rows, fh)
    else:
        harness.write_csv(rows, sys.stdout)
    bad = harness.violations(rows)
    for row in bad:
        print(f"violation: {row.instance} accuracy {row.accuracy} ratio {row.ratio}", file=sys.stderr)
    return 1 if bad else 0


def cmd_report(args: argparse.Namespace) -> int:
    table = []
    for path in args.csv:
        with open(path, newline="") as fh:
            table.extend(csv.DictReader(fh))
    summary = harness.summarize(table)
    cols = ["problem", "accuracy", "rows", "verified", "max_n_reduced", "min_ratio", "max_ratio", "strict_failures"]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(cols)
    for s in summary:
        writer.writerow(["" if s[c] is None else s[c] for c in cols])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lossy-kernels", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (only gen draws random numbers)")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate seeded instances")
    g.add_argument("family", choices=generators.FAMILIES)
    g.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    problems = sorted(PROBLEMS)
    k = sub.add_parser("kernelize", parents=[common], help="reduce an instance")
    k.add_argument("problem", choices=problems)
    k.add_argument("--in", dest="input", required=True)
    k.add_argument("--out", required=True)
    k.add_argument("--state", "--lift-state", dest="state", help="write what lift needs to this JSON file")
    k.add_argument("--positions", help="df only: write position maps as JSON lines")
    k.add_argument("--k", type=int)
    k.add_argument("--alpha", type=float)
    k.add_argument("--eps", type=float)
    k.add_argument("--force-x", type=int, help="group size override for ola")
    k.add_argument("--dw-cap", type=int, default=DEFAULT_DW_CAP, help="terminal cap for steiner")
    k.set_defaults(func=cmd_kernelize)

    lf = sub.add_parser("lift", parents=[common], help="lift a reduced solution")
    lf.add_argument("problem", choices=problems)
    lf.add_argument("--state", "--lift-state", dest="state", required=True)
    lf.add_argument("--line", type=int, default=1, help="df only: which input string to lift for")
    lf.add_argument("--solution", required=True)
    lf.add_argument("--out")
    lf.set_defaults(func=cmd_lift)

    s = sub.add_parser("solve", parents=[common], help="solve exactly with the oracle")
    s.add_argument("problem", choices=problems)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--k", type=int)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="kernelize, solve, lift and audit ratios")
    v.add_argument("problem", choices=problems)
    v.add_argument("--in", dest="input", nargs="+", required=True)
    v.add_argument("--k", type=int)
    v.add_argument("--alpha", type=float, action="append")
    v.add_argument("--eps", type=float, action="append")
    v.add_argument("--csv")
    v.add_argument("--no-oracle", action="store_true", help="report sizes only")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", parents=[common], help="summarize CSV files")
    r.add_argument("csv", nargs="+")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, AccuracyError, CapExceeded, OracleRefusal, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
