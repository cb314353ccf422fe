"""``dkcore`` command line.

Exit codes: 0 success, 1 usage, 2 I/O or parse error, 3 verification
mismatch, 4 no quiescence within the round limit.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import kernels
from .engine import check_bounds, run_one_to_many, run_one_to_one
from .errors import DomainError, ParseError
from .graph import format_edge_list, gen_chain, gen_random, gen_worst_case, read_edge_list
from .oracle import coreness_exact, format_coreness, parse_coreness, stats, verify_locality

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MISMATCH, EXIT_NOCONV = 0, 1, 2, 3, 4

OUT_DIR_ENV = "DKCORE_OUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path, text: str) -> None:
    """Write ``text`` to ``path`` atomically; ``-`` is stdout."""
    if str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _default_out(graph_path: str, suffix: str) -> Path:
    stem = "stdin" if graph_path == "-" else Path(graph_path).name.split(".")[0]
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / f"{stem}{suffix}"


def _load(args):
    mode = "symmetrize" if args.symmetrize else "undirected"
    return read_edge_list(args.graph, mode, args.nodes)


def _graph_args(p):
    p.add_argument("graph", help="edge-list file, '-' for stdin, .gz accepted")
    p.add_argument("--nodes", type=int, help="pad the node id space to N nodes")
    p.add_argument("--symmetrize", action="store_true", help="treat lines as arcs of a directed graph")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dkcore", description="Distributed k-core decomposition simulator.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="exact coreness by peeling")
    _graph_args(p)
    p.add_argument("-o", "--output", help=f"coreness file (default ${OUT_DIR_ENV}/<stem>.coreness, '-' for stdout)")

    p = sub.add_parser("simulate", help="run the distributed protocol")
    _graph_args(p)
    p.add_argument("--mode", choices=["one2one", "one2many"], default="one2one")
    p.add_argument("--hosts", type=int)
    p.add_argument("--policy", choices=["broadcast", "p2p"])
    p.add_argument("--schedule", choices=["sync", "random"], default="sync")
    p.add_argument("--seed", type=int, help="first seed; repetition i uses seed+i (default seeds 1..R)")
    p.add_argument("--optimized", action="store_true", help="one2one: skip sends that cannot lower a neighbor")
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--sample-rounds", type=_int_list, help="rounds for the per-core table, e.g. 25,50,75")
    p.add_argument("--report", default="-", help="aggregate JSON report path ('-' for stdout)")
    p.add_argument("--trace", help="per-round error CSV of the first repetition")
    p.add_argument("--per-core", help="per-core completion CSV of the first repetition")
    p.add_argument("--batches", help="one2many: dump of cross-host batches of the first repetition")

    p = sub.add_parser("gen", help="write a generated graph")
    p.add_argument("family", choices=["worstcase", "chain", "random"])
    p.add_argument("n", type=int)
    p.add_argument("p", type=float, nargs="?", help="edge probability (random)")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", default="-")

    p = sub.add_parser("verify", help="check a coreness file against the oracle and locality")
    _graph_args(p)
    p.add_argument("coreness")

    p = sub.add_parser("bounds", help="synchronous run versus the analytic bounds")
    _graph_args(p)
    p.add_argument("--json", action="store_true")
    return ap


def _validate(args) -> None:
    if args.command == "simulate":
        if args.mode != "one2many":
            if args.hosts is not None:
                raise UsageError("--hosts requires --mode one2many")
            if args.policy is not None:
                raise UsageError("--policy requires --mode one2many")
            if args.batches is not None:
                raise UsageError("--batches requires --mode one2many")
        else:
            if args.hosts is None or args.hosts < 1:
                raise UsageError("--mode one2many needs --hosts >= 1")
            if args.optimized:
                raise UsageError("--optimized applies to --mode one2one only")
            args.policy = args.policy or "broadcast"
        if args.repetitions < 1:
            raise UsageError("--repetitions must be >= 1")
        if args.max_rounds is not None and args.max_rounds < 1:
            raise UsageError("--max-rounds must be >= 1")
    elif args.command == "gen":
        if args.family == "random":
            if args.p is None or args.seed is None:
                raise UsageError("gen random needs N P and an explicit --seed")
        elif args.p is not None:
            raise UsageError(f"gen {args.family} takes only N")
    if getattr(args, "nodes", None) is not None and args.nodes < 0:
        raise UsageError("--nodes must be >= 0")


def cmd_decompose(args) -> int:
    g = _load(args)
    c = coreness_exact(g)
    out = args.output or _default_out(args.graph, ".coreness")
    _write(out, format_coreness(g, c))
    print(stats(g, c).line(), file=sys.stderr if str(out) == "-" else sys.stdout)
    return EXIT_OK


def _aggregate(reports, n, mode):
    ts = [r.exec_time_rounds for r in reports]
    doc = {
        "t_avg": float(np.mean(ts)),
        "t_min": int(min(ts)),
        "t_max": int(max(ts)),
    }
    if mode == "one2one":
        per_node = [(r.initial_messages + r.update_messages) / n if n else 0.0 for r in reports]
        doc["m_avg"] = float(np.mean(per_node))
        doc["m_max"] = float(max(int(r.messages_per_node.max(initial=0)) for r in reports))
    else:
        ov = [r.overhead_per_node for r in reports]
        doc["m_avg"] = float(np.mean(ov))
        doc["m_max"] = float(max(ov))
        doc["overhead_per_node"] = float(np.mean(ov))
    doc["update_messages_avg"] = float(np.mean([r.update_messages for r in reports]))
    doc["converged"] = all(r.converged for r in reports)
    return doc


def cmd_simulate(args) -> int:
    g = _load(args)
    oracle = coreness_exact(g)
    R = args.repetitions
    if args.schedule == "random":
        seeds = [(args.seed if args.seed is not None else 1) + i for i in range(R)]
    else:
        seeds = [None] * R
    reports = []
    batch_log = None
    for i, seed in enumerate(seeds):
        if args.mode == "one2one":
            rep = run_one_to_one(g, args.schedule, seed, args.optimized, args.max_rounds, oracle,
                                 args.sample_rounds)
        else:
            log = io.StringIO() if (i == 0 and args.batches) else None
            rep = run_one_to_many(g, args.hosts, args.policy, args.schedule, seed, args.max_rounds,
                                  oracle, sample_rounds=args.sample_rounds, batch_log=log)
            if log is not None:
                batch_log = log.getvalue()
        reports.append(rep)

    doc = {
        "graph": args.graph,
        "n": g.n,
        "m": g.m,
        "mode": args.mode,
        "schedule": args.schedule,
        "optimized": args.optimized,
        "hosts": args.hosts,
        "policy": args.policy,
        "repetitions": R,
        "seeds": seeds,
        "backend": kernels.backend_name(),
    }
    doc.update(_aggregate(reports, g.n, args.mode))
    first = reports[0]
    if args.mode == "one2one" and args.schedule == "sync" and not args.optimized:
        doc["bounds"] = check_bounds(g, oracle, first).to_dict()
    doc["report"] = first.to_dict()
    _write(args.report, json.dumps(doc, indent=1) + "\n")
    if args.trace:
        _write(args.trace, first.trace_csv())
    if args.per_core:
        buf = io.StringIO()
        first.per_core_completion.write_csv(buf)
        _write(args.per_core, buf.getvalue())
    if batch_log is not None:
        _write(args.batches, batch_log)
    if not doc["converged"]:
        print("dkcore: no quiescence within the round limit", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "worstcase":
        g = gen_worst_case(args.n)
    elif args.family == "chain":
        g = gen_chain(args.n)
    else:
        g = gen_random(args.n, args.p, args.seed)
    _write(args.output, format_edge_list(g))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load(args)
    with open(args.coreness, encoding="utf-8") as fh:
        c = parse_coreness(fh, g)
    oracle = coreness_exact(g)
    wrong = np.flatnonzero(c != oracle).tolist()
    local = verify_locality(g, c)
    if not wrong and not local:
        print(f"ok: {g.n} nodes match")
        return EXIT_OK
    for u in wrong:
        print(f"mismatch\t{g.label(u)}\tgot={c[u]}\texpected={oracle[u]}")
    for u in local:
        print(f"locality\t{g.label(u)}\tcoreness={c[u]}")
    return EXIT_MISMATCH


def cmd_bounds(args) -> int:
    g = _load(args)
    oracle = coreness_exact(g)
    rep = run_one_to_one(g, "sync", oracle=oracle)
    br = check_bounds(g, oracle, rep)
    sys.stdout.write(json.dumps(br.to_dict()) + "\n" if args.json else br.lines())
    if not rep.converged:
        return EXIT_NOCONV
    return EXIT_OK if br.all_satisfied else EXIT_MISMATCH


COMMANDS = {
    "decompose": cmd_decompose,
    "simulate": cmd_simulate,
    "gen": cmd_gen,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"dkcore: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (OSError, ParseError) as e:
        print(f"dkcore: {e}", file=sys.stderr)
        return EXIT_IO
    except DomainError as e:
        print(f"dkcore: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
