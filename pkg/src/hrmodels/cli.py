"""Command line front end: ``hrmodels <command> ...``.

Exit codes: 0 success, 2 when a completion has no strictly CND solution
(or a reproduction check fails), 1 on any error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io
from .completion import CompletionResult, PartialVariogram, SolverOptions, complete
from .config import get_tol
from .degree import emld, emld_k2n_numeric
from .eci import evaluate_atoms, generator_atoms, separation_statements, test_eci
from .errors import HRError
from .graphs import chordal_decomposition, clique_number, is_chordal, read_graph, treewidth
from .pareto import (ParetoSample, empirical_variogram, rank_transform, sample_pareto,
                     threshold_exceedances)
from .reproduce import TARGETS, run
from .threshold import cycle4_rank1_experiment, emlt_bounds
from .varalg import dimensionality, fiedler_bapat_check, is_strictly_cnd

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_SOLUTION = 2


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    graph: str | None = None
    tol: float | None = None
    seed: int | None = None
    output: str | None = None
    format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerances must be positive")


def _seed(value: str | None, required: bool) -> int | None:
    if value is None:
        if required:
            raise ValueError("this command is stochastic: pass --seed N or --seed auto")
        return None
    if value == "auto":
        seed = int(np.random.SeedSequence().entropy % 2**63)
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    return int(value)


def _config(args) -> RunConfig:
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("command", "graph", "tol", "seed", "out", "format", "jobs", "func")}
    return RunConfig(args.command, inputs, getattr(args, "graph", None), args.tol,
                     None, getattr(args, "out", None), getattr(args, "format", "json"),
                     getattr(args, "jobs", 1))


# ---------------------------------------------------------------- commands

def cmd_fit(cfg: RunConfig) -> int:
    g = read_graph(cfg.graph)
    inp = cfg.inputs
    if inp.get("partial"):
        p = io.read_partial(inp["partial"], cfg.tol)
    else:
        if inp.get("gamma"):
            gamma = io.read_matrix(inp["gamma"])
        elif inp.get("sample"):
            v = np.array([float(x) for x in inp["sample"].split(",")])
            gamma = (v[:, None] - v[None, :]) ** 2
        elif inp.get("data"):
            raw = io.read_data(inp["data"], inp.get("skip_header", False))
            if inp.get("rank_transform"):
                raw = rank_transform(raw)
            gamma = empirical_variogram(threshold_exceedances(raw, inp.get("threshold", 0.0)))
        else:
            raise ValueError("fit needs --partial, --gamma, --sample or --data")
        p = PartialVariogram.from_matrix(g, gamma, cfg.tol)
    opts = SolverOptions(tol=get_tol(cfg.tol))
    res: CompletionResult = complete(p, inp.get("method", "auto"), opts)
    io.dump(io.report(res.to_json(), cfg.tol), cfg.output)
    return EXIT_OK if res.converged else EXIT_NO_SOLUTION


def cmd_ci(cfg: RunConfig) -> int:
    inp = cfg.inputs
    gamma = io.read_matrix(inp["gamma"])
    if cfg.graph:
        stmts = separation_statements(read_graph(cfg.graph))
    elif inp.get("statements"):
        stmts = io.read_statements(inp["statements"])
    elif inp.get("statement"):
        stmts = [io.parse_statement(s) for s in inp["statement"]]
    else:
        raise ValueError("ci needs --statement, --statements or --graph")

    def one(st):
        r = test_eci(gamma, st, cfg.tol)
        entry = {"statement": st.to_json(), **r.to_json()}
        if inp.get("atoms"):
            entry["atoms"] = evaluate_atoms(gamma, generator_atoms(st), cfg.tol).to_json()
        return entry

    with ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as pool:
        results = list(pool.map(one, stmts))
    io.dump(io.report({"results": results}, cfg.tol), cfg.output)
    return EXIT_OK


def cmd_degree(cfg: RunConfig) -> int:
    inp = cfg.inputs
    if inp.get("k2n"):
        rep = emld_k2n_numeric(inp["k2n"], cfg.seed)
    elif cfg.graph:
        rep = emld(read_graph(cfg.graph))
    else:
        raise ValueError("degree needs --graph or --k2n")
    io.dump(io.report(rep.to_json(), cfg.tol), cfg.output)
    return EXIT_OK


def cmd_mlt(cfg: RunConfig) -> int:
    inp = cfg.inputs
    if inp.get("c4_sample"):
        x2, x3 = inp["c4_sample"]
        out = cycle4_rank1_experiment(x2, x3, tol=cfg.tol)
        io.dump(io.report(out.to_json(), cfg.tol), cfg.output)
        return EXIT_OK
    if not cfg.graph:
        raise ValueError("mlt needs --graph or --c4-sample")
    g = read_graph(cfg.graph)
    b = emlt_bounds(g, inp.get("elim_trials", 0), cfg.seed or 0, inp.get("counterexamples", False))
    io.dump(io.report(b.to_json(), cfg.tol), cfg.output)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    inp = cfg.inputs
    gamma = io.read_matrix(inp["gamma"])
    s = sample_pareto(gamma, inp["n"], cfg.seed, jobs=cfg.jobs, tol=cfg.tol)
    s.gamma_ref = inp["gamma"]
    if cfg.output:
        io.write_data(s.data, cfg.output)
        meta = io.report({**s.metadata(), "acceptance": s.acceptance}, cfg.tol)
        io.dump(meta, inp.get("meta") or cfg.output + ".json")
    else:
        io.write_data(s.data, sys.stdout)
    return EXIT_OK


def cmd_empvario(cfg: RunConfig) -> int:
    inp = cfg.inputs
    raw = io.read_data(inp["data"], inp.get("skip_header", False))
    if inp.get("rank_transform"):
        raw = rank_transform(raw)
    if inp.get("threshold") is not None:
        sample = threshold_exceedances(raw, inp["threshold"])
    else:
        sample = ParetoSample(raw)  # rows are taken to be exceedances already
    gamma = empirical_variogram(sample, ddof=inp.get("ddof", 1), weighted=inp.get("weighted", False))
    if cfg.format == "csv":
        io.write_data(gamma, cfg.output or sys.stdout)
    else:
        io.dump(io.report({**io.matrix_to_json(gamma), "n": sample.n}, cfg.tol), cfg.output)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    gamma = io.read_matrix(cfg.inputs["gamma"])
    cert = is_strictly_cnd(gamma, cfg.tol)
    out = {"certificate": cert.to_json()}
    if cert.status != "none":
        out["dimensionality"] = dimensionality(gamma, cfg.tol)
    if cert:
        out["fiedler_bapat_residual"] = fiedler_bapat_check(gamma, cfg.tol).residual
    if cfg.graph:
        g = read_graph(cfg.graph)
        out["graph"] = {"chordal": is_chordal(g), "clique_number": clique_number(g),
                        "treewidth": treewidth(g, exact=g.d <= 20).width}
        if out["graph"]["chordal"] and g.is_connected():
            out["graph"]["decomposition"] = chordal_decomposition(g).to_json()
    io.dump(io.report(out, cfg.tol), cfg.output)
    return EXIT_OK


def cmd_reproduce(cfg: RunConfig) -> int:
    target = cfg.inputs["target"]
    names = list(TARGETS) if target == "all" else [target]
    seed = cfg.seed if cfg.seed is not None else 0
    ok = True
    payload = {}
    for name in names:
        checks = run(name, seed)
        for c in checks:
            print(f"{name}: {c.line()}")
            ok &= c.passed
        payload[name] = [c.to_json() for c in checks]
    if cfg.output:
        io.dump(io.report({"seed": seed, "targets": payload}, cfg.tol), cfg.output)
    return EXIT_OK if ok else EXIT_NO_SOLUTION


COMMANDS = {"fit": cmd_fit, "ci": cmd_ci, "degree": cmd_degree, "mlt": cmd_mlt,
            "simulate": cmd_simulate, "empvario": cmd_empvario, "check": cmd_check,
            "reproduce": cmd_reproduce}
STOCHASTIC = {"simulate"}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative rank/definiteness tolerance (default 1e-8 or $HR_TOL)")
    common.add_argument("--seed", default=None, help="integer seed or 'auto'")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads; output order is fixed")

    ap = argparse.ArgumentParser(prog="hrmodels", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="complete a partial variogram on a graph")
    p.add_argument("--graph", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--partial", help="partial variogram JSON")
    src.add_argument("--gamma", help="full matrix whose edge entries are used")
    src.add_argument("--sample", help="comma separated observation; its rank-one variogram is used")
    src.add_argument("--data", help="raw data CSV on exponential margins")
    p.add_argument("--threshold", type=float, default=0.0, help="quantile level q for --data")
    p.add_argument("--rank-transform", action="store_true")
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--method", default="auto",
                   choices=["auto", "chordal", "two-clique", "general", "decomposed"])

    p = sub.add_parser("ci", parents=[common], help="extremal conditional independence tests")
    p.add_argument("--gamma", required=True)
    p.add_argument("--statement", action="append", help='e.g. "1|3|2" for 1 _|_ 3 | 2')
    p.add_argument("--statements", help="JSON list of statements")
    p.add_argument("--graph", help="test every separation statement of this graph")
    p.add_argument("--atoms", action="store_true", help="also report generator atom values")

    p = sub.add_parser("degree", parents=[common], help="extremal ML degree")
    p.add_argument("--graph")
    p.add_argument("--k2n", type=int, help="count completions of random K_{2,n} data")

    p = sub.add_parser("mlt", parents=[common], help="extremal ML threshold bounds")
    p.add_argument("--graph")
    p.add_argument("--elim-trials", type=int, default=0)
    p.add_argument("--counterexamples", action="store_true")
    p.add_argument("--c4-sample", type=float, nargs=2, metavar=("X2", "X3"),
                   help="rank-one 4-cycle experiment on c(1, x2, x3, -(1+x2+x3))")

    p = sub.add_parser("simulate", parents=[common], help="exact Pareto samples")
    p.add_argument("--gamma", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--meta", help="metadata JSON path (default OUT.json)")

    p = sub.add_parser("empvario", parents=[common], help="empirical variogram of data")
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--rank-transform", action="store_true")
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--weighted", action="store_true", help="weight halfspaces by size")
    p.add_argument("--ddof", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("check", parents=[common], help="certify a variogram (and describe a graph)")
    p.add_argument("--gamma", required=True)
    p.add_argument("--graph")

    p = sub.add_parser("reproduce", parents=[common], help="rerun a registered experiment")
    p.add_argument("target", help=f"one of {', '.join(TARGETS)} or all")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        needs_seed = args.command in STOCHASTIC or (args.command == "degree" and args.k2n) \
            or (args.command == "mlt" and args.elim_trials > 0)
        cfg.seed = _seed(args.seed, needs_seed)
        return COMMANDS[args.command](cfg)
    except HRError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
