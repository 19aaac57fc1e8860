"""Command-line interface: ``tropmedian <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (bad input data, failed
validation) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import string
import sys
import time
from math import comb, gcd

from . import io as tio
from .consensus import dimension_bound, median_of_ultrametrics, tropical_median
from .fw import dimension, fw_polytrope, staircase, tropical_vertices
from .rational import format_rational
from .tropical import d_asym, d_sym, site_matrix
from .transport import recover_primal, solve_transportation
from .trees import (
    emit_newick,
    is_ultrametric,
    pointwise_max_consensus,
    random_equidistant_tree,
    rooted_triplets,
    tree_to_ultrametric,
    ultrametric_to_tree,
)


class DomainError(Exception):
    pass


def _dump(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _weights(args, count):
    if not getattr(args, "weights", None):
        return None
    weights = tio.read_weights(args.weights)
    if len(weights) != count:
        raise DomainError(f"{len(weights)} weights for {count} inputs")
    return weights


def cmd_consensus(args, out):
    trees = tio.read_trees(args.input)
    if not trees:
        raise DomainError("no trees in input")
    result = tropical_median(trees, _weights(args, len(trees)), adjust_equidistant=args.adjust_equidistant)
    if args.json:
        _dump(result.to_json(), out)
    else:
        out.write(emit_newick(result.tree) + "\n")


def cmd_fw_point(args, out):
    V = site_matrix(tio.read_matrix(args.sites, args.header))
    weights = _weights(args, len(V))
    plan = solve_transportation(V, weights)
    sol = recover_primal(plan, V)
    if args.dump_plan:
        _dump(plan.to_json(), out)
        return
    if args.json:
        _dump(
            {
                "x": [format_rational(c) for c in sol.x],
                "t": [format_rational(c) for c in sol.t],
                "p_star": format_rational(sol.value),
            },
            out,
        )
    else:
        out.write(" ".join(format_rational(c) for c in sol.x) + "\n")


def cmd_fw_set(args, out):
    V = site_matrix(tio.read_matrix(args.sites, args.header))
    poly = fw_polytrope(V, _weights(args, len(V)), method=args.method, threads=args.threads)
    if args.json:
        _dump(poly.to_json(), out)
        return
    out.write(f"p_star {format_rational(poly.optimal_value)}\n")
    out.write(f"dimension {dimension(poly)}\n")
    out.write("bounds\n")
    for row in poly.bounds:
        out.write("  " + " ".join(format_rational(a) for a in row) + "\n")
    out.write("tropical_vertices\n")
    for v in tropical_vertices(poly):
        out.write("  " + " ".join(format_rational(c) for c in v) + "\n")


def cmd_validate(args, out):
    path = str(args.input)
    failures = []
    if path.endswith(".csv"):
        items = tio.read_ultrametrics(path)
        for k, u in enumerate(items):
            ok, witness = is_ultrametric(u)
            if not ok:
                failures.append(f"row {k + 1}: ultrametric inequality fails on {witness}")
    else:
        items = tio.read_trees(path)
        taxa = items[0].taxa if items else ()
        for k, tree in enumerate(items):
            if tree.taxa != taxa:
                failures.append(f"tree {k + 1}: taxa differ from tree 1")
            if not tree.is_equidistant():
                failures.append(f"tree {k + 1}: not equidistant, leaves {tree.non_equidistant_leaves()}")
    for line in failures:
        out.write(line + "\n")
    if failures:
        raise DomainError(f"{len(failures)} problem(s) found")
    out.write(f"ok: {len(items)} item(s)\n")


def cmd_dist(args, out):
    V = site_matrix(tio.read_matrix(args.sites, args.header))
    fn = d_sym if args.sym else d_asym
    matrix = [[fn(a, b) for b in V] for a in V]
    if args.json:
        _dump([[format_rational(x) for x in row] for row in matrix], out)
    else:
        for row in matrix:
            out.write(" ".join(format_rational(x) for x in row) + "\n")


def cmd_triplets(args, out):
    trees = tio.read_trees(args.input)
    for k, tree in enumerate(trees, start=1):
        trips = sorted(rooted_triplets(tree_to_ultrametric(tree)))
        out.write(f"tree {k}: " + " ".join(str(t) for t in trips) + "\n")


def cmd_pmax(args, out):
    trees = tio.read_trees(args.input)
    if not trees:
        raise DomainError("no trees in input")
    u = pointwise_max_consensus([tree_to_ultrametric(t) for t in trees], normalize=args.normalize)
    tree = ultrametric_to_tree(u)
    if args.json:
        _dump({"newick": emit_newick(tree), "ultrametric": [format_rational(x) for x in u.d]}, out)
    else:
        out.write(emit_newick(tree) + "\n")


def taxa_labels(n: int) -> list[str]:
    if n <= 26:
        return list(string.ascii_uppercase[:n])
    return [f"t{k:03d}" for k in range(1, n + 1)]


def bench_gcd_scan(n_taxa: int, m_values, seed: int = 0, timing: bool = True):
    """Rows ``(m, dim, vertices, micros)`` for m random equidistant trees on ``n_taxa`` leaves."""
    taxa = taxa_labels(n_taxa)
    rows = []
    for m in m_values:
        rng = random.Random(seed * 1_000_003 + m)
        ultras = [tree_to_ultrametric(random_equidistant_tree(taxa, rng)) for _ in range(m)]
        start = time.perf_counter()
        result = median_of_ultrametrics(ultras)
        micros = int((time.perf_counter() - start) * 1e6) if timing else 0
        rows.append((m, result.fw_dimension, result.tropical_vertex_count, micros))
    return rows


def _parse_assignments(tokens) -> dict[str, int]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("m", "n"):
            raise argparse.ArgumentTypeError(f"expected m=<int> or n=<int>, got {tok!r}")
        out[key] = int(value)
    return out


def cmd_bench(args, out):
    if args.staircase:
        try:
            sizes = _parse_assignments(args.staircase)
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise DomainError(str(exc)) from None
        m, n = sizes.get("m"), sizes.get("n")
        if not m or not n or m < 1 or n < 2:
            raise DomainError("staircase needs m >= 1 and n >= 2")
        poly = fw_polytrope(staircase(m, n))
        out.write(
            f"staircase m={m} n={n}: dimension {dimension(poly)} "
            f"(gcd bound {gcd(m, n) - 1}), tropical vertices {len(tropical_vertices(poly))}\n"
        )
        return
    if args.random:
        taxa = taxa_labels(args.taxa)
        rng = random.Random(args.seed)
        ultras = [tree_to_ultrametric(random_equidistant_tree(taxa, rng)) for _ in range(args.trees)]
        start = time.perf_counter()
        result = median_of_ultrametrics(ultras)
        elapsed = time.perf_counter() - start
        out.write(
            f"trees={args.trees} taxa={args.taxa} dim={result.fw_dimension} "
            f"vertices={result.tropical_vertex_count} seconds={elapsed:.3f}\n"
        )
        out.write(emit_newick(result.tree) + "\n")
        return
    rows = bench_gcd_scan(args.taxa, range(1, args.m_max + 1), args.seed, timing=not args.no_timing)
    out.write("m,dim,vertices,micros\n")
    for row in rows:
        out.write(",".join(str(x) for x in row) + "\n")
    pairs = comb(args.taxa, 2)
    bad = [m for m, dim, _, _ in rows if dim > dimension_bound(m, args.taxa)]
    if bad:
        raise DomainError(f"dimension bound gcd(m, {pairs}) violated for m in {bad}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tropmedian", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("consensus", help="tropical median consensus tree")
    p.add_argument("input", help="Newick file, one tree per line")
    p.add_argument("--weights", help="file of positive integer multiplicities, one per tree")
    p.add_argument("--adjust-equidistant", action="store_true", help="extend leaf edges of non-equidistant trees")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_consensus)

    for name, func, helptext in (
        ("fw-point", cmd_fw_point, "one Fermat-Weber point of the sites"),
        ("fw-set", cmd_fw_set, "facets, tropical vertices and dimension of the Fermat-Weber set"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("sites", help="CSV/TSV site matrix, one site per row")
        p.add_argument("--header", action="store_true", help="skip the first row")
        p.add_argument("--weights", help="file of positive integer multiplicities, one per site")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)
        if name == "fw-point":
            p.add_argument("--dump-plan", action="store_true", help="print the optimal transport plan as JSON")
        else:
            p.add_argument("--method", choices=("slackness", "lp"), default="slackness")
            p.add_argument("--threads", type=int, default=1, help="worker cap for the facet programs")

    p = sub.add_parser("validate", help="check a tree file (equidistance) or ultrametric CSV")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dist", help="pairwise tropical distances between sites")
    p.add_argument("sites")
    p.add_argument("--header", action="store_true")
    p.add_argument("--sym", action="store_true", help="symmetric distance instead of asymmetric")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("triplets", help="rooted triplets of each tree")
    p.add_argument("input")
    p.set_defaults(func=cmd_triplets)

    p = sub.add_parser("pmax", help="pointwise maximum consensus")
    p.add_argument("input")
    p.add_argument("--normalize", choices=("raw", "H"), default="raw")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pmax)

    p = sub.add_parser("bench", help="staircase check, random workload or gcd scan")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--staircase", nargs=2, metavar="K=V", help="e.g. --staircase m=6 n=9")
    mode.add_argument("--random", action="store_true", help="time one median of random trees")
    mode.add_argument("--gcd-scan", action="store_true", help="CSV of dimension and time per m (default)")
    p.add_argument("--taxa", type=int, default=5)
    p.add_argument("--trees", type=int, default=10)
    p.add_argument("--m-max", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timing", action="store_true", help="write 0 for micros so output is reproducible")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except (DomainError, ValueError, OSError) as exc:
        err.write(f"tropmedian: error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
