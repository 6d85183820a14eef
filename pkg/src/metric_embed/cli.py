"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 a certified bound failed, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import acceptance, analysis, compact, gluing, interlacing, io, nets, stability
from .core import EmbeddingTable, validate_metric
from .errors import MetricEmbedError
from .frechet import frechet
from .generators import generate

EXIT_OK, EXIT_INVALID, EXIT_CERT, EXIT_USAGE = 0, 1, 2, 64
RANDOMIZED_KINDS = {"grid_subset", "random_lp_subset"}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_space(path):
    return io.space_from_json(io.read_json(path))


def _load_embedding(path, space):
    return io.embedding_from_json(io.read_json(path), space)


def cmd_generate(args) -> int:
    if args.kind in RANDOMIZED_KINDS and args.seed is None:
        raise UsageError(f"--kind {args.kind} is randomized and needs --seed")
    params = {k: getattr(args, k) for k in ("n", "depth", "dim", "p", "levels", "seed")
              if getattr(args, k) is not None}
    try:
        space = generate(args.kind, **params)
    except KeyError as exc:
        raise UsageError(f"--kind {args.kind} needs --{exc.args[0]}") from None
    io.write_json(io.space_to_json(space), args.out)
    return EXIT_OK


def cmd_net(args) -> int:
    space = _load_space(args.inp)
    io.write_json(nets.greedy_net(space, args.eps).to_json(), args.out)
    return EXIT_OK


def cmd_embed(args) -> int:
    if args.method == "local-frechet" and args.eps0 > 0 and args.seed is None:
        raise UsageError("--eps0 > 0 draws random weights and needs --seed")
    space = _load_space(args.inp)
    code = EXIT_OK
    if args.method == "frechet":
        anchors = "all" if args.anchors == "all" else io.read_json(args.anchors)["members"]
        table = frechet(space, anchors)
    elif args.method == "compact":
        if args.mu == "log2":
            mu = compact.DecayModulus.log2(space.diam)
        else:
            obj = io.read_json(args.mu)
            mu = compact.DecayModulus.from_table(obj["t"], obj["mu"])
        table, cert = compact.compact_embedding(space, mu, args.depth)
        if args.certify:
            _emit_certificate(cert.to_json(), args.cert)
            code = EXIT_OK if cert.ok else EXIT_CERT
    elif args.method == "glue":
        fam = io.read_family(args.local_maps, space, args.eps0)
        table = gluing.glue(fam)
        extra = 0.0
        if args.augment is not None:
            table = gluing.augment_with_radius(table, args.augment)
            extra = args.augment
        if args.certify:
            cert = gluing.certify_glue(fam, table, extra)
            _emit_certificate(cert.to_json(), args.cert)
            code = EXIT_OK if cert.ok else EXIT_CERT
    else:
        fam = gluing.frechet_family(space, args.eps0, seed=args.seed)
        io.write_family(fam, args.out_dir)
        return EXIT_OK
    io.write_json(io.embedding_to_json(table), args.out)
    return code


def _emit_certificate(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True, default=io._default)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr)


def cmd_analyze(args) -> int:
    space = _load_space(args.inp)
    f = _load_embedding(args.emb, space)
    code = EXIT_OK
    if args.mode == "moduli":
        prof = analysis.moduli(space, f)
        out = {"t": prof.grid.tolist(), "rho_hat": prof.rho.tolist(), "omega_hat": prof.omega.tolist()}
        if args.csv:
            _write_csv(args.csv, prof.rows())
    elif args.mode == "distortion":
        D, s = analysis.distortion(space, f)
        out = {"distortion": D, "scale": s}
    elif args.mode == "coarse-fit":
        fit = analysis.coarse_lipschitz_fit(space, f)
        out = {"A": fit.A, "B": fit.B}
    elif args.mode == "exponent":
        prof = analysis.moduli(space, f)
        out = {"alpha": analysis.compression_exponent_estimate(prof, args.tau)}
        if args.csv:
            _write_csv(args.csv, prof.rows())
    else:
        if not args.spec:
            raise UsageError("--mode envelope needs --spec")
        verdict = analysis.envelope_check(space, f, analysis.envelope_from_json(io.read_json(args.spec)))
        out = verdict.to_json()
        code = EXIT_OK if verdict.ok else EXIT_CERT
    io.write_json(out, args.out)
    return code


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "rho_hat", "omega_hat"])
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def cmd_interlace(args) -> int:
    g = interlacing.build_graph(args.n, args.k)
    out = g.to_json()
    if args.search is not None:
        if args.emb:
            obj = io.read_json(args.emb)
            coords = np.asarray(obj["coords"], dtype=float)
            sizes = obj.get("block_sizes", [coords.shape[1]])
            p = io._unnum(obj.get("outer_exponent", math.inf))
            images = coords if len(sizes) == 1 else EmbeddingTable(_vertex_space(g), coords, sizes, p).images
        else:
            images = interlacing.frechet_images(g)
        method = args.method
        if method == "auto":
            method = "exhaustive" if math.comb(args.n, args.search) <= args.exhaustive_limit else "greedy"
        if method == "greedy" and args.seed is None:
            raise UsageError("greedy Q-search is randomized and needs --seed")
        res = interlacing.q_constant_search(g, images, args.search, seed=args.seed or 0,
                                            restarts=args.restarts, method=method)
        out = {"graph": out, "search": res.to_json()}
    io.write_json(out, args.out)
    return EXIT_OK


def _vertex_space(g):
    if not g.connected:
        raise ValueError("block-vector images need a connected interlacing graph")
    return validate_metric(g.dist, [",".join(map(str, v)) for v in g.vertices])


def cmd_stability(args) -> int:
    if args.family_x or args.family_y:
        if not (args.family_x and args.family_y):
            raise UsageError("--family-x and --family-y go together")
        X = stability.SequenceFamily.from_vectors(io.read_json(args.family_x), args.p)
        Y = stability.SequenceFamily.from_vectors(io.read_json(args.family_y), args.p)
    else:
        X, Y = stability.witness(args.witness, args.N, args.p)
    report = stability.double_limit(X, Y, args.eta, args.W, strict=False)
    out = report.to_json()
    if args.snowflake is not None:
        _, delta_s = stability.snowflake_invariance_probe(X, Y, args.snowflake, args.eta, args.W, strict=False)
        out["delta_snowflaked"] = delta_s
    io.write_json(out, args.out)
    return EXIT_OK if report.converged else EXIT_INVALID


def cmd_certify_all(args) -> int:
    results = acceptance.run_all(args.seed, args.jobs)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CERT


def build_parser() -> Parser:
    parser = Parser(prog="metric-embed", description="Certified embeddings of finite metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    g = sub.add_parser("generate", help="write a generated metric space as JSON")
    g.add_argument("--kind", required=True,
                   choices=["path", "binary_tree", "grid_subset", "random_lp_subset", "dyadic"])
    g.add_argument("--n", type=int)
    g.add_argument("--depth", type=int)
    g.add_argument("--dim", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--levels", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_generate)

    n = sub.add_parser("net", help="greedy maximal eps-net")
    n.add_argument("--eps", type=float, required=True)
    n.add_argument("--in", dest="inp", required=True)
    n.add_argument("--out", default="-")
    n.set_defaults(func=cmd_net)

    e = sub.add_parser("embed", help="build an embedding")
    esub = e.add_subparsers(dest="method", required=True, parser_class=Parser)
    fr = esub.add_parser("frechet")
    fr.add_argument("--anchors", default="all", help="'all' or a skeleton JSON")
    co = esub.add_parser("compact")
    co.add_argument("--mu", default="log2", help="'log2' or a JSON table {t: [...], mu: [...]}")
    co.add_argument("--depth", type=int)
    co.add_argument("--certify", action="store_true")
    co.add_argument("--cert", help="certificate path (default stderr)")
    gl = esub.add_parser("glue")
    gl.add_argument("--local-maps", required=True)
    gl.add_argument("--eps0", type=float, default=0.0)
    gl.add_argument("--augment", type=float)
    gl.add_argument("--certify", action="store_true")
    gl.add_argument("--cert", help="certificate path (default stderr)")
    lf = esub.add_parser("local-frechet", help="write full-anchor Fréchet local maps for gluing")
    lf.add_argument("--eps0", type=float, default=0.0)
    lf.add_argument("--seed", type=int)
    lf.add_argument("--out-dir", required=True)
    for p in (fr, co, gl, lf):
        p.add_argument("--in", dest="inp", required=True)
        if p is not lf:
            p.add_argument("--out", default="-")
    e.set_defaults(func=cmd_embed)

    a = sub.add_parser("analyze", help="moduli, distortion, coarse fit, exponent or envelope check")
    a.add_argument("--mode", required=True, choices=["moduli", "distortion", "coarse-fit", "exponent", "envelope"])
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--emb", required=True)
    a.add_argument("--spec")
    a.add_argument("--csv")
    a.add_argument("--tau", type=float, default=0.0)
    a.add_argument("--out", default="-")
    a.set_defaults(func=cmd_analyze)

    il = sub.add_parser("interlace", help="interlacing graph and Q-constant search")
    il.add_argument("--n", type=int, required=True)
    il.add_argument("--k", type=int, required=True)
    il.add_argument("--search", type=int, metavar="M")
    il.add_argument("--emb")
    il.add_argument("--method", default="auto", choices=["auto", "exhaustive", "greedy"])
    il.add_argument("--restarts", type=int, default=64)
    il.add_argument("--exhaustive-limit", type=int, default=100_000)
    il.add_argument("--seed", type=int)
    il.add_argument("--out", default="-")
    il.set_defaults(func=cmd_interlace)

    st = sub.add_parser("stability", help="iterated-limit probes")
    st.add_argument("--witness", default="c0", choices=["c0", "hilbert", "lp"])
    st.add_argument("--N", type=int, default=stability.DEFAULT_N)
    st.add_argument("--W", type=int, default=stability.DEFAULT_W)
    st.add_argument("--eta", type=float, default=stability.DEFAULT_ETA)
    st.add_argument("--p", type=float, default=3.0, help="exponent for the lp witness and custom families")
    st.add_argument("--snowflake", type=float)
    st.add_argument("--family-x")
    st.add_argument("--family-y")
    st.add_argument("--out", default="-")
    st.set_defaults(func=cmd_stability)

    c = sub.add_parser("certify-all", help="run every acceptance check")
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_certify_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MetricEmbedError, ValueError, KeyError, OSError) as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
