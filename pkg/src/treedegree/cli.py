"""Command-line front end.

Every subcommand prints one JSON result document on stdout; messages go to
stderr.  Exit codes: 0 success, 2 malformed input or arguments, 3 no
spanning tree (disconnected graph or unreachable root), 4 numerical
failure, 5 capability violation.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import distribution as dist
from . import moments as mom
from .errors import (
    CapabilityError,
    Disconnected,
    InputError,
    NonIntegerDegreeWeights,
    NumericalFailure,
    TreeDegreeError,
)
from .graph import Graph
from .io import dumps, graph_digest, read_graph
from .laplacian import ReducedLaplacianSystem, factorize, selected_inverse_entries, tree_total_weight
from .oracle import DEFAULT_CAP, brute_report, enumerate_spanning_trees
from .sampler import SamplerConfig, monte_carlo_moments, sample_edge_arrays

log = logging.getLogger("treedegree")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DISCONNECTED = 3
EXIT_NUMERICAL = 4
EXIT_CAPABILITY = 5

# tolerances used by `check`
TOL_DUALITY = 1e-10
TOL_POLYNOMIAL = 1e-8
TOL_ROOT = 1e-8
TOL_ORACLE = 1e-9
ORACLE_TREE_LIMIT = 100_000


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from None
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treedegree", description="Degree moments of random spanning trees.")
    common = _Parser(add_help=False)
    common.add_argument("--graph", required=True, help="graph file (JSON or 'u v w [omega]' text)")
    common.add_argument("--directed", action="store_true", help="treat a text graph file as directed")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--indent", type=int, default=None, help="pretty-print the JSON output")
    rooted = _Parser(add_help=False)
    rooted.add_argument("--root", type=int, default=None, help="removed node / in-tree root")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("expectation", parents=[common, rooted])
    p.add_argument("--node", type=int, required=True)
    p = sub.add_parser("variance", parents=[common, rooted])
    p.add_argument("--node", type=int, required=True)
    p = sub.add_parser("covariance", parents=[common, rooted])
    p.add_argument("--nodes", type=_pair, required=True, metavar="V,U")
    p = sub.add_parser("edge-prob", parents=[common, rooted])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--edge", type=_pair, metavar="U,V")
    g.add_argument("--all", action="store_true")
    p = sub.add_parser("distribution", parents=[common, rooted])
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--joint", type=int, default=None, metavar="U")
    p.add_argument("--mode", choices=dist.MODES, default="fourier")
    p = sub.add_parser("decomposable", parents=[common, rooted])
    p.add_argument("--variance", action="store_true")
    p = sub.add_parser("tree-weight", parents=[common, rooted])
    p.add_argument("--log", action="store_true")
    p = sub.add_parser("sample", parents=[common, rooted])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--moments", type=_int_list, default=None, metavar="V1,V2,...")
    p = sub.add_parser("enumerate", parents=[common, rooted])
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--report", action="store_true")
    p = sub.add_parser("check", parents=[common, rooted])
    p.add_argument("--node", type=int, default=None)
    return parser


def _root(G: Graph, args) -> int | None:
    if G.directed and args.root is None:
        raise UsageError("--root is required for directed graphs")
    if args.root is not None:
        G.check_node(args.root)
    return args.root


def _diagnostics(system: ReducedLaplacianSystem | None, nodes=(), warnings=()) -> dict:
    diag: dict = {"condition_estimate": None, "residuals": {}, "warnings": list(warnings)}
    if system is None:
        return diag
    diag["condition_estimate"] = system.condition
    nodes = [v for v in nodes if v != system.root] or [x for x in range(min(system.n_nodes, 2)) if x != system.root]
    if nodes and system.dim:
        pos = system.positions(nodes)
        rhs = np.zeros((system.dim, len(nodes)))
        rhs[pos, np.arange(len(nodes))] = 1.0
        diag["residuals"]["solve"] = system.residual(system.solve(rhs, check=False), rhs)
    return diag


def _edge_endpoints(G: Graph, i: int) -> tuple[int, int]:
    return G.edges[i].u, G.edges[i].v


# -- subcommands --------------------------------------------------------------

def _cmd_expectation(G, args):
    system = factorize(G, _root(G, args))
    value = mom.expected_degree(G, args.node, system=system)
    return system.root, {"expectation": value}, _diagnostics(system, [args.node])


def _cmd_variance(G, args):
    system = factorize(G, _root(G, args))
    value = mom.degree_variance(G, args.node, system=system)
    return system.root, {"variance": value}, _diagnostics(system, [args.node])


def _cmd_covariance(G, args):
    v, u = args.nodes
    system = factorize(G, _root(G, args))
    value = mom.degree_covariance(G, v, u, system=system)
    return system.root, {"covariance": value}, _diagnostics(system, [v, u])


def _cmd_edge_prob(G, args):
    system = factorize(G, _root(G, args))
    if args.all:
        probs = mom.edge_probabilities(G, system=system)
        rows = [{"u": e.u, "v": e.v, "probability": float(p)} for e, p in zip(G.edges, probs)]
        values = {"edges": rows, "sum": math.fsum(probs)}
        return system.root, values, _diagnostics(system)
    u, v = args.edge
    value = mom.edge_probability(G, (u, v), system=system)
    return system.root, {"probability": value}, _diagnostics(system, [u, v])


def _cmd_distribution(G, args):
    root = _root(G, args)
    if args.joint is None:
        d = dist.degree_distribution(G, args.node, root, mode=args.mode, workers=args.threads)
        values = {"distribution": [{"degree": k, "probability": p} for k, p in d.probabilities.items()]}
        diag = d.diagnostics
    else:
        j = dist.joint_degree_distribution(G, args.node, args.joint, root, mode=args.mode, workers=args.threads)
        values = {
            "joint": [{"k1": a, "k2": b, "probability": p} for (a, b), p in sorted(j.probabilities.items())],
            "marginals": [
                [{"degree": k, "probability": p} for k, p in j.marginal(0).items()],
                [{"degree": k, "probability": p} for k, p in j.marginal(1).items()],
            ],
        }
        diag = j.diagnostics
    root = root if root is not None else dist._resolve_root(G, None)
    out = _diagnostics(None)
    out["condition_estimate"] = diag.get("condition")
    out["residuals"]["interpolation"] = diag.get("residual")
    out["interpolation"] = {"mode": diag["mode"], "points": diag["points"]}
    return root, values, out


def _cmd_decomposable(G, args):
    system = factorize(G, _root(G, args))
    values = {"expectation": mom.decomposable_expectation(G, system=system)}
    if args.variance:
        values["variance"] = mom.decomposable_variance(G, system=system)
    return system.root, values, _diagnostics(system)


def _cmd_tree_weight(G, args):
    root = _root(G, args)
    try:
        system = factorize(G, root)
    except Disconnected as exc:
        values = {"log_tree_weight": -math.inf} if args.log else {"tree_weight": 0.0}
        return root, values, _diagnostics(None, warnings=[str(exc)])
    if args.log:
        values = {"log_tree_weight": tree_total_weight(system, log=True)}
    else:
        values = {"tree_weight": tree_total_weight(system)}
    warnings = []
    if not args.log and math.isinf(values["tree_weight"]):
        warnings.append("tree weight overflows a double; use --log")
    return system.root, values, _diagnostics(system, warnings=warnings)


def _cmd_sample(G, args):
    root = _root(G, args)
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    cfg = SamplerConfig(args.count, args.seed, root, max(1, args.threads))
    arr = sample_edge_arrays(G, cfg)
    freq = np.bincount(arr.ravel(), minlength=G.n_edges) / cfg.count
    values: dict = {
        "count": cfg.count,
        "seed": cfg.seed,
        "edge_frequencies": [{"u": e.u, "v": e.v, "frequency": float(f)} for e, f in zip(G.edges, freq)],
    }
    if args.moments:
        m = monte_carlo_moments(G, args.moments, cfg)
        values["moments"] = [
            {"node": v, "mean": float(a), "variance": float(b), "stderr": float(c)}
            for v, a, b, c in zip(m.nodes, m.mean, m.variance, m.stderr)
        ]
    used_root = root if root is not None else 0
    return used_root, values, _diagnostics(None)


def _cmd_enumerate(G, args):
    root = _root(G, args)
    trees = enumerate_spanning_trees(G, root, cap=args.cap)
    values: dict = {
        "tree_count": len(trees),
        "total_weight": math.fsum(t.weight for t in trees),
        "trees": [
            {"edges": [list(_edge_endpoints(G, i)) for i in t.edges], "weight": t.weight} for t in trees
        ],
    }
    if args.report:
        rep = brute_report(G, root, cap=args.cap)
        values["report"] = {
            "expectation": rep.expectation.tolist(),
            "variance": rep.variance.tolist(),
            "covariance": rep.covariance.tolist(),
            "edge_probability": rep.edge_probability.tolist(),
            "distribution": [
                [{"degree": k, "probability": p} for k, p in d.items()] for d in rep.distribution
            ],
            "decomposable_expectation": rep.decomposable_expectation,
            "decomposable_variance": rep.decomposable_variance,
        }
    return root, values, _diagnostics(None)


def _discrepancy(a: float, b: float, scale: float) -> float:
    diff = abs(a - b)
    if diff <= 1e-13 * scale:
        return 0.0
    return diff / max(abs(a), abs(b))


def _cmd_check(G, args):
    root = _root(G, args)
    system = factorize(G, root)
    nodes = [args.node] if args.node is not None else list(range(G.n_nodes))
    for v in nodes:
        G.check_node(v)
    omega_scale = max([1.0] + [abs(e.omega) for e in G.edges])
    checks = []
    warnings = []

    def record(name, a, b, tol, scale=omega_scale ** 2):
        d = _discrepancy(float(a), float(b), scale)
        checks.append({"name": name, "discrepancy": d, "tolerance": tol, "passed": d <= tol})

    means = {}
    for v in nodes:
        m = mom.degree_moments(G, v, system=system)
        means[v] = m
        record(f"duality[{v}]", m.expectation, mom.expected_degree_via_edges(G, v, system=system), TOL_DUALITY)
        try:
            pe, pv = dist.moments_from_polynomial(G, v, system.root, mode="fourier")
        except NonIntegerDegreeWeights:
            warnings.append(f"node {v}: non-integer degree weights, polynomial check skipped")
        else:
            record(f"polynomial_expectation[{v}]", m.expectation, pe, TOL_POLYNOMIAL)
            record(f"polynomial_variance[{v}]", m.variance, pv, TOL_POLYNOMIAL)

    probs = mom.edge_probabilities(G, system=system)
    record("edge_probability_sum", math.fsum(probs), G.n_nodes - 1, TOL_DUALITY, 1.0)
    if not G.directed:
        all_means = [mom.expected_degree(G, v, system=system) for v in range(G.n_nodes)]
        record("decomposable_identity", mom.decomposable_expectation(G, system=system),
               0.5 * math.fsum(all_means), TOL_DUALITY)
        others = [r for r in range(G.n_nodes) if r != system.root][:3]
        for r in others:
            alt = factorize(G, r)
            record(f"cofactor[{r}]", alt.log_abs_det, system.log_abs_det, TOL_ROOT, 1.0)
            for v in nodes:
                m = mom.degree_moments(G, v, system=alt)
                record(f"root_invariance_expectation[{v},{r}]", m.expectation, means[v].expectation, TOL_ROOT)
                record(f"root_invariance_variance[{v},{r}]", m.variance, means[v].variance, TOL_ROOT)

    diag = _diagnostics(system, nodes, warnings)
    if _tree_count_estimate(G, system.root) <= ORACLE_TREE_LIMIT:
        rep = brute_report(G, system.root if G.directed else None)
        record("oracle_total_weight", tree_total_weight(system), rep.total_weight, TOL_ORACLE, 1.0)
        oracle = []
        for v in nodes:
            record(f"oracle_expectation[{v}]", means[v].expectation, rep.expectation[v], TOL_ORACLE)
            record(f"oracle_variance[{v}]", means[v].variance, rep.variance[v], TOL_ORACLE)
            oracle.append({"node": v, "expectation": float(rep.expectation[v]), "variance": float(rep.variance[v])})
        diag["oracle"] = {"tree_count": rep.tree_count, "total_weight": rep.total_weight, "nodes": oracle}
    else:
        warnings.append("too many spanning trees for the enumeration oracle; oracle check skipped")
    worst = max(c["discrepancy"] for c in checks)
    passed = all(c["passed"] for c in checks)
    values = {"passed": passed, "max_discrepancy": worst, "checks": checks}
    return system.root, values, diag


def _tree_count_estimate(G: Graph, root: int) -> float:
    unit = G.with_weights([1.0] * G.n_edges)
    try:
        return tree_total_weight(factorize(unit, root if G.directed else None))
    except Disconnected:
        return 0.0


COMMANDS = {
    "expectation": _cmd_expectation,
    "variance": _cmd_variance,
    "covariance": _cmd_covariance,
    "edge-prob": _cmd_edge_prob,
    "distribution": _cmd_distribution,
    "decomposable": _cmd_decomposable,
    "tree-weight": _cmd_tree_weight,
    "sample": _cmd_sample,
    "enumerate": _cmd_enumerate,
    "check": _cmd_check,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, Disconnected):
        return EXIT_DISCONNECTED
    if isinstance(exc, NumericalFailure):
        return EXIT_NUMERICAL
    if isinstance(exc, CapabilityError):
        return EXIT_CAPABILITY
    return EXIT_INPUT


def execute(argv: Sequence[str]) -> tuple[int, dict | None]:
    """Run a command and return ``(exit code, result document or None)``."""
    code, doc, _ = _execute(argv)
    return code, doc


def _execute(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        G = read_graph(args.graph, directed=True if args.directed else None)
        root, values, diag = COMMANDS[args.command](G, args)
    except (TreeDegreeError, ValueError, argparse.ArgumentTypeError) as exc:
        log.error("%s", exc)
        return exit_code_for(exc), None, None
    doc = {
        "command": args.command,
        "input_digest": graph_digest(G),
        "root": root,
        "values": values,
        "diagnostics": diag,
    }
    code = EXIT_OK
    if args.command == "check" and not values["passed"]:
        code = EXIT_NUMERICAL
    return code, doc, args.indent


def run(argv: Sequence[str] | None = None) -> int:
    """Entry point: print the result document, return the exit code."""
    if not logging.getLogger().handlers:
        logging.basicConfig(stream=sys.stderr, format="treedegree: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        try:
            build_parser().parse_args(list(argv))
        except SystemExit as exc:
            return int(exc.code or 0)
    code, doc, indent = _execute(argv)
    if doc is not None:
        sys.stdout.write(dumps(doc, indent=indent) + "\n")
    return code


def main() -> None:
    sys.exit(run())
