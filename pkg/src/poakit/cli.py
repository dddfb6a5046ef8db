"""Command-line front end.

Exit status: 0 on success, 1 when a stability audit fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .embedding import classical_mds, compare_poa_mds, distortion_report, embed, write_svg
from .errors import PoaError
from .extension import MODES, extend_many
from .signals import analyze, orthonormalize, synthesize
from .solver import PrincipalObservableSet, SolverConfig, solve_poa
from .stability import covariance_stability_audit, default_family, mean_stability_audit, wasserstein1

log = logging.getLogger("poakit")

EXIT_OK, EXIT_AUDIT_FAIL, EXIT_INPUT = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="edge list or distance-matrix CSV")
    p.add_argument("--format", choices=["edge-list", "distance-csv"], default=None,
                   help="default: distance-csv for *.csv, edge-list otherwise")
    p.add_argument("--measure", default=None, help="one weight per line (default uniform)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["pairwise", "edges"], default="pairwise")
    p.add_argument("--validate", action="store_true", help="check metric axioms (O(n^3))")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG scatter")
    p.add_argument("--po", default=None, help="reuse observables from a po.csv instead of solving")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poakit", description="Principal observable analysis")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in [("poa", "compute principal observables"),
                        ("embed", "POA embedding with L-inf distortion report"),
                        ("mds", "classical MDS baseline embedding"),
                        ("distort", "POA vs MDS distortion comparison")]:
        _common(sub.add_parser(name, help=help_))
    p = sub.add_parser("extend", help="McShane-Whitney extension to new points")
    _common(p)
    p.add_argument("--queries", required=True, help="CSV, rows = queries, columns = sample points")
    p.add_argument("--values", default=None, help="extend this observable instead of the POs")

    p = sub.add_parser("signal", help="observable-domain analysis/synthesis")
    p.add_argument("action", choices=["analyze", "synthesize"])
    _common(p)
    p.add_argument("--signal", default=None, help="signal file, one value per line (analyze)")
    p.add_argument("--spectrum", default=None, help="spectrum CSV (synthesize)")

    p = sub.add_parser("stability", help="audit mean/covariance stability between two measures")
    _common(p)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--random-family", type=int, default=50)
    return parser


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(restarts=args.restarts, seed=args.seed, constraint_mode=args.mode)


def _observables(args, space, mu, graph) -> PrincipalObservableSet:
    if args.po:
        header, data = io.read_columns(args.po)
        if data.shape[0] != space.n:
            raise PoaError(f"{args.po} has {data.shape[0]} rows, space has {space.n} points")
        obs = data.T
        var = np.array([float(np.sum(mu.weights * (f - mu.weights @ f) ** 2)) for f in obs])
        return PrincipalObservableSet(obs, var, [{} for _ in obs], False, len(obs))
    if args.k < 1:
        raise PoaError("--k must be >= 1")
    pos = solve_poa(space, mu, args.k, _solver_cfg(args), graph)
    if pos.truncated:
        log.warning("only %d of %d principal observables exist", pos.k, args.k)
    return pos


def _write_pos(out: Path, pos: PrincipalObservableSet, args) -> None:
    io.write_columns(out / "po.csv", list(pos.observables), [f"po{m + 1}" for m in range(pos.k)])
    io.write_json(out / "poa.json", {
        "command": "poa",
        "requested": pos.requested,
        "found": pos.k,
        "truncated": pos.truncated,
        "variances": pos.variances.tolist(),
        "config": {"restarts": args.restarts, "seed": args.seed, "mode": args.mode},
        "diagnostics": pos.diagnostics,
    })


def _cmd_poa(args, space, mu, graph, out):
    _write_pos(out, _observables(args, space, mu, graph), args)
    return EXIT_OK


def _edges(graph):
    return None if graph is None else [(i, j) for i, j, _ in graph.edges]


def _cmd_embed(args, space, mu, graph, out):
    pos = _observables(args, space, mu, graph)
    emb = embed(pos, min(args.k, pos.k))
    _write_pos(out, pos, args)
    io.write_columns(out / "embedding.csv", list(emb.coords.T), [f"x{m + 1}" for m in range(emb.k)])
    io.write_json(out / "distortion.json", {"command": "embed", "truncated": pos.truncated,
                                             "poa": distortion_report(space, emb).to_dict()})
    if args.svg:
        write_svg(out / "embedding.svg", emb, "POA embedding", _edges(graph))
    return EXIT_OK


def _cmd_mds(args, space, mu, graph, out):
    emb = classical_mds(space, min(args.k, max(space.n - 1, 1)))
    io.write_columns(out / "mds.csv", list(emb.coords.T), [f"x{m + 1}" for m in range(emb.k)])
    io.write_json(out / "mds_distortion.json", {"command": "mds",
                                                 "mds": distortion_report(space, emb).to_dict()})
    if args.svg:
        write_svg(out / "mds.svg", emb, "MDS embedding", _edges(graph))
    return EXIT_OK


def _cmd_distort(args, space, mu, graph, out):
    pos = _observables(args, space, mu, graph)
    cmp = compare_poa_mds(space, mu, args.k, graph=graph, pos=pos)
    io.write_json(out / "comparison.json", {
        "command": "distort",
        "k": args.k,
        "truncated": cmp["truncated"],
        "note": "POA distortions use the L-inf norm, MDS distortions the L2 norm",
        "poa_linf": cmp["poa"].to_dict(),
        "mds_l2": cmp["mds"].to_dict(),
    })
    if args.svg:
        write_svg(out / "embedding.svg", cmp["poa_embedding"], "POA embedding", _edges(graph))
        write_svg(out / "mds.svg", cmp["mds_embedding"], "MDS embedding", _edges(graph))
    return EXIT_OK


def _cmd_extend(args, space, mu, graph, out):
    Q = io.read_matrix_csv(args.queries)
    if args.values:
        named = [("f", io.read_vector(args.values))]
    else:
        pos = _observables(args, space, mu, graph)
        named = [(f"po{m + 1}", f) for m, f in enumerate(pos.observables)]
    cols, header = [], []
    for name, f in named:
        for mode in MODES:
            cols.append(extend_many(f, Q, mode))
            header.append(f"{name}_{mode}")
    io.write_columns(out / "extension.csv", cols, header)
    return EXIT_OK


def _cmd_signal(args, space, mu, graph, out):
    pos = _observables(args, space, mu, graph)
    basis = orthonormalize(pos, mu)
    if args.action == "analyze":
        if not args.signal:
            raise PoaError("signal analyze needs --signal")
        a = analyze(io.read_vector(args.signal), basis, mu)
        io.write_columns(out / "spectrum.csv", [np.arange(a.size), a], ["index", "coefficient"])
    else:
        if not args.spectrum:
            raise PoaError("signal synthesize needs --spectrum")
        _, data = io.read_columns(args.spectrum)
        a = data[:, 1]
        # --k counts principal observables; the constant u0 is always kept
        a = a[: min(a.size, args.k + 1)]
        io.write_vector(out / "signal.txt", synthesize(a, basis))
    return EXIT_OK


def _cmd_stability(args, space, mu, graph, out):
    from .mmspace import normalize_measure

    a = normalize_measure(io.read_vector(args.mu))
    b = normalize_measure(io.read_vector(args.nu))
    if a.n != space.n or b.n != space.n:
        raise PoaError("measure files must have one weight per point")
    pos = None
    if args.k >= 1:
        pos = _observables(args, space, a, graph)
    fam = default_family(space, a, pos, args.random_family, args.seed)
    w1, plan = wasserstein1(space, a, b)
    mean_rep = mean_stability_audit(space, a, b, fam, w1=w1)
    rng = np.random.default_rng(args.seed)
    idx = rng.integers(len(fam), size=(min(200, len(fam) ** 2), 2))
    cov_rep = covariance_stability_audit(space, a, b, [(fam[i], fam[j]) for i, j in idx], w1=w1)
    passed = mean_rep.passed and cov_rep.passed
    io.write_json(out / "stability.json", {
        "command": "stability",
        "status": "PASS" if passed else "FAIL",
        "w1": w1,
        "family_size": len(fam),
        "mean": mean_rep.to_dict(),
        "covariance": cov_rep.to_dict(),
    })
    print(f"stability: {'PASS' if passed else 'FAIL'} (w1 = {w1:.6g})")
    return EXIT_OK if passed else EXIT_AUDIT_FAIL


COMMANDS = {
    "poa": _cmd_poa,
    "embed": _cmd_embed,
    "mds": _cmd_mds,
    "distort": _cmd_distort,
    "extend": _cmd_extend,
    "signal": _cmd_signal,
    "stability": _cmd_stability,
}


def run(args) -> int:
    try:
        space, mu, graph = io.load_dataset(args.input, args.format, args.measure, args.validate)
        if args.mode == "edges" and graph is None:
            raise PoaError("--mode edges needs an edge-list input")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, space, mu, graph, out)
    except (PoaError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
