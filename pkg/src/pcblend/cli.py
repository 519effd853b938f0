"""Command-line interface.

Exit status: 0 on success, 1 on usage errors, 2 on data errors (unreadable or
malformed input, incompatible sizes, ...).
"""

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import config
from .cluster import constrained_kmeans, save_cluster_set
from .core import normalize_unit_cube
from .datagen import DESIGN_KINDS, gen_dataset, gen_design
from .density import style_source
from .embed import OTEmbedder, PcaEmbedder, PcaModel, load_latent, pca_fit
from .io import CloudFormatError, load_cloud, read_ply, store_cloud, write_ply
from .metrics import SinkhornParams, chamfer, emd_exact, sinkhorn
from .pipelines import blend_latents, blend_sweep, style_transfer_sweep
from .svg import export_svg

log = logging.getLogger("pcblend")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def read_config(path):
    """``key=value`` lines; ``#`` comments and blank lines are ignored."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}: line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _pick_k(n, k):
    if k is not None:
        return k
    if n <= config.CLUSTER_SIZE:
        return 1
    if n % config.CLUSTER_SIZE:
        raise ValueError(
            f"{n} points are not a multiple of the cluster size {config.CLUSTER_SIZE}; pass --clusters"
        )
    return n // config.CLUSTER_SIZE


def _lam_name(prefix, lam):
    return f"{prefix}_lam{lam:.3f}"


def _write_outputs(out_dir, stem, points, svg_axis):
    path = os.path.join(out_dir, stem + ".ply")
    write_ply(points, path)
    if svg_axis:
        export_svg(points, svg_axis, os.path.join(out_dir, stem + ".svg"))
    print(path)


def _embedder(args):
    if args.embedder == "ot":
        return OTEmbedder()
    if args.model is None:
        raise UsageError(f"--embedder {args.embedder} requires --model")
    return PcaEmbedder(PcaModel.load(args.model))


def cmd_cluster(args):
    pts = load_cloud(args.input)
    k = _pick_k(len(pts), args.k)
    cs = constrained_kmeans(pts, k, seed=args.seed, max_iters=args.max_iters)
    save_cluster_set(cs, args.out_dir)
    print(f"k={cs.k} m={cs.m} iterations={cs.iterations} objective={cs.objective!r}")


def cmd_blend(args):
    lams = args.lam or [0.5]
    os.makedirs(args.out_dir, exist_ok=True)
    if args.embedder == "external":
        if not (args.latents_a and args.latents_b and args.model):
            raise UsageError("--embedder external requires --latents-a, --latents-b and --model")
        decoder = PcaEmbedder(PcaModel.load(args.model)).decode
        za = [load_latent(os.path.join(args.latents_a, f)) for f in sorted(os.listdir(args.latents_a))]
        zb = [load_latent(os.path.join(args.latents_b, f)) for f in sorted(os.listdir(args.latents_b))]
        for lam in lams:
            _write_outputs(args.out_dir, _lam_name("blend", lam),
                           blend_latents(za, zb, lam, decoder), args.svg)
        return
    if args.a is None or args.b is None:
        raise UsageError("blend requires --a and --b")
    x = load_cloud(args.a)
    y = load_cloud(args.b)
    k = _pick_k(len(x), args.clusters)
    results = blend_sweep(x, y, lams, k, _embedder(args), seed=args.seed,
                          max_iters=args.max_iters, workers=args.threads)
    for res in results:
        _write_outputs(args.out_dir, _lam_name("blend", res.lam), res.points, args.svg)


def cmd_style_transfer(args):
    lams = args.lam or [0.5]
    os.makedirs(args.out_dir, exist_ok=True)
    x = load_cloud(args.input)
    design = load_cloud(args.design)
    k = _pick_k(len(x), args.clusters)
    results = style_transfer_sweep(
        x, design, lams, k, _embedder(args), bandwidth=args.bandwidth, seed=args.seed,
        noise_sigma=args.noise, max_iters=args.max_iters, workers=args.threads,
    )
    _write_outputs(args.out_dir, "style_source", results[0].style_source, args.svg)
    for res in results:
        _write_outputs(args.out_dir, _lam_name("style", res.lam), res.points, args.svg)


def cmd_style_sample(args):
    x = load_cloud(args.input)
    design = load_cloud(args.design)
    xn, tf = normalize_unit_cube(x)
    s = style_source(xn, design, args.bandwidth, args.seed, args.noise)
    store_cloud(tf.inverse(s), args.out)
    print(args.out)


def cmd_metrics(args):
    x = load_cloud(args.a)
    y = load_cloud(args.b)
    rows = []
    t0 = time.perf_counter()
    rows.append(("chamfer", chamfer(x, y), time.perf_counter() - t0))
    if args.exact_emd:
        t0 = time.perf_counter()
        rows.append(("emd_exact", emd_exact(x, y)[0], time.perf_counter() - t0))
    if not args.no_sinkhorn:
        t0 = time.perf_counter()
        res = sinkhorn(x, y, SinkhornParams(blur=args.blur, scaling=args.scaling))
        if not res.converged:
            log.warning("Sinkhorn did not converge in %d iterations", res.iterations)
        rows.append(("sinkhorn_mean", res.value, time.perf_counter() - t0))
    if args.csv:
        print("metric,value,seconds")
        for name, value, sec in rows:
            print(f"{name},{value!r},{sec:.6f}")
    else:
        for name, value, sec in rows:
            print(f"{name:<14} {value!r:<24} {sec:.3f}s")


def cmd_gen_dataset(args):
    os.makedirs(args.out_dir, exist_ok=True)
    lines = []
    for i, item in enumerate(gen_dataset(args.count, args.points, args.seed)):
        name = f"cloud_{i:04d}.ply"
        write_ply(item.points, os.path.join(args.out_dir, name))
        params = " ".join(f"{k}={v!r}".replace(" ", "") for k, v in item.params.items())
        lines.append(f"{name} kind={item.kind} seed={item.seed} {params}")
    with open(os.path.join(args.out_dir, "manifest.txt"), "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {args.count} clouds to {args.out_dir}")


def cmd_gen_design(args):
    store_cloud(gen_design(args.kind, args.points, seed=args.seed), args.out)
    print(args.out)


def cmd_export_svg(args):
    export_svg(load_cloud(args.input), args.axis, args.out, size=args.size, radius=args.radius)
    print(args.out)


def cmd_fit_pca(args):
    clusters = []
    for directory in args.clusters_dir:
        for name in sorted(os.listdir(directory)):
            if name.endswith(".ply"):
                clusters.append(read_ply(os.path.join(directory, name)))
    model = pca_fit(clusters, args.d)
    model.save(args.out)
    print(f"m={model.m} d={model.d} -> {args.out}")


def build_parser():
    parser = _Parser(prog="pcblend", description="Equal-size clustering, transport "
                     "distances, cluster-wise blending and style transfer for point clouds.")
    parser.add_argument("--config", help="key=value file with default flag values")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for per-cluster work")
    parser.add_argument("-v", "--verbose", action="store_true")
    # global options are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads for per-cluster work")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    def seeded(p):
        p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)

    p = add("cluster", help="equal-size constrained k-means")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, help=f"number of clusters (default n/{config.CLUSTER_SIZE})")
    p.add_argument("--max-iters", type=int, default=config.KMEANS_MAX_ITERS)
    p.add_argument("--out-dir", required=True)
    seeded(p)
    p.set_defaults(func=cmd_cluster)

    def blending(p):
        p.add_argument("--lambda", dest="lam", type=float, action="append",
                       help="blend weight of the first cloud; repeat for a sweep")
        p.add_argument("--clusters", type=int, help=f"k (default n/{config.CLUSTER_SIZE})")
        p.add_argument("--embedder", choices=("ot", "pca", "external"), default="ot")
        p.add_argument("--model", help="PCA model file (pca and external embedders)")
        p.add_argument("--max-iters", type=int, default=config.KMEANS_MAX_ITERS)
        p.add_argument("--out-dir", required=True)
        p.add_argument("--svg", choices=("x", "y", "z"), help="also write SVG views along this axis")
        seeded(p)

    p = add("blend", help="cluster-aligned blending of two clouds")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--latents-a", help="directory of per-cluster latent files (external)")
    p.add_argument("--latents-b")
    blending(p)
    p.set_defaults(func=cmd_blend)

    p = add("style-transfer", help="impose a design cloud onto a cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--design", required=True)
    p.add_argument("--bandwidth", type=float, default=config.KDE_BANDWIDTH)
    p.add_argument("--noise", type=float, default=config.NOISE_SIGMA)
    blending(p)
    p.set_defaults(func=cmd_style_transfer)

    p = add("style-sample", help="resample a design along a cloud's density")
    p.add_argument("--input", required=True)
    p.add_argument("--design", required=True)
    p.add_argument("--bandwidth", type=float, default=config.KDE_BANDWIDTH)
    p.add_argument("--noise", type=float, default=config.NOISE_SIGMA)
    p.add_argument("--out", required=True)
    seeded(p)
    p.set_defaults(func=cmd_style_sample)

    p = add("metrics", help="distances between two clouds")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--exact-emd", action="store_true", help="also compute the exact EMD (sum)")
    p.add_argument("--no-sinkhorn", action="store_true")
    p.add_argument("--blur", type=float, default=config.SINKHORN_BLUR)
    p.add_argument("--scaling", type=float, default=config.SINKHORN_SCALING)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = add("gen-dataset", help="synthetic training shapes")
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--out-dir", required=True)
    seeded(p)
    p.set_defaults(func=cmd_gen_dataset)

    p = add("gen-design", help="design cloud")
    p.add_argument("--kind", choices=DESIGN_KINDS, required=True)
    p.add_argument("--points", type=int, default=65536)
    p.add_argument("--out", required=True)
    seeded(p)
    p.set_defaults(func=cmd_gen_design)

    p = add("export-svg", help="orthographic SVG scatter of a cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--radius", type=float, default=1.5)
    p.set_defaults(func=cmd_export_svg)

    p = add("fit-pca", help="fit the PCA embedder on cluster PLY files")
    p.add_argument("--clusters-dir", action="append", required=True)
    p.add_argument("--d", type=int, default=config.LATENT_DIM)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_pca)

    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for p in [parser, *subparsers.choices.values()]:
        dests = {a.dest for a in p._actions}
        # string defaults are converted by each action's type
        p.set_defaults(**{k: v for k, v in values.items() if k in dests})


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except OSError as exc:
        print(f"pcblend: cannot read config: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"pcblend {args.command}: {exc}", file=sys.stderr)
        return 1
    except (CloudFormatError, ValueError, OSError) as exc:
        print(f"pcblend {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    return run()
