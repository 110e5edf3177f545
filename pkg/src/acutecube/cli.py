"""Command-line interface: ``acutecube <subcommand> ...``.

Exit status: 0 on success, 1 when ``audit`` finds a mesh that is not acute
and completely well-centered, 2 on any error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .audit import HistogramSpec, audit, histogram, histogram_csv
from .constructions import (
    TilingSpec,
    canonical_cube,
    canonical_dataset,
    periodic_identify,
    reflect_prism,
    tile_box,
    variant_1387,
)
from .delaunay import triangulate
from .errors import AcuteCubeError
from .io import (
    atomic_write,
    bundle_paths,
    format_identification,
    format_vertex_table,
    read_bundle,
    read_manifest,
    read_vertex_table,
    sha256_file,
    sha256_text,
    write_bundle,
    write_manifest,
    write_vtk,
)
from .optimize import SmoothConfig, perturb, quality_margin, smooth
from .symmetry import SymmetryGroup, SymmetryOp, classify_tets, full_group, generate_vertices


def _say(*args):
    print(*args, file=sys.stderr)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return {}
    atomic_write(out, text)
    return {str(out): sha256_text(text)}


def _write_mesh(mesh, prefix, fmt):
    if fmt == "vtk-legacy":
        path = Path(prefix)
        if path.suffix != ".vtk":
            path = path.with_name(path.name + ".vtk")
        return write_vtk(mesh, path)
    return write_bundle(mesh, prefix)


def _manifest(args, outputs, prefix):
    if not outputs or args.no_manifest:
        return
    base = Path(prefix)
    if base.suffix in (".node", ".ele", ".vtk", ".txt", ".csv", ".json"):
        base = base.with_suffix("")
    path = base.with_name(base.name + ".manifest.json")
    write_manifest(
        path,
        args.command,
        {"argv": args.argv},
        outputs,
        canonical_dataset().checksum,
        __version__,
    )


def cmd_generate(args):
    ds = canonical_dataset()
    gen = generate_vertices(ds.seed26)
    if set(gen.points) != set(ds.full277):
        raise AcuteCubeError("generated vertices disagree with the embedded table")
    _say("stage sizes: " + " -> ".join(str(s) for s in gen.stage_sizes))
    stage = 0 if args.seed_only else (len(gen.stage_sizes) - 1 if args.stage is None else args.stage)
    if not 0 <= stage < len(gen.stage_sizes):
        raise AcuteCubeError(f"stage must be in 0..{len(gen.stage_sizes) - 1}")
    pts = gen.upto(stage)
    outputs = _emit(format_vertex_table(pts), args.output)
    _manifest(args, outputs, args.output or "")
    return 0


def cmd_triangulate(args):
    pts = read_vertex_table(args.input)
    mesh = triangulate(pts, args.policy, name=Path(args.input).stem)
    print(f"{mesh.n_vertices} vertices, {len(mesh.edges)} edges, {mesh.n_tets} tets")
    outputs = _write_mesh(mesh, args.output, args.format)
    _manifest(args, outputs, args.output)
    return 0


def cmd_audit(args):
    mesh = read_bundle(args.bundle)
    report = audit(mesh)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    outputs = _emit(text, args.output)
    _manifest(args, outputs, args.output or "")
    if args.output:
        _say("passed" if report.passed else "FAILED: " + "; ".join(report.failures[:5]))
    return 0 if report.passed else 1


def _group(name) -> SymmetryGroup:
    if name == "trivial":
        return SymmetryGroup((SymmetryOp.identity(),))
    return full_group()


def cmd_classify(args):
    mesh = read_bundle(args.bundle)
    cls = classify_tets(mesh, _group(args.group))
    lines = ["class,representative,size,locus,v0,v1,v2,v3"]
    for k, c in enumerate(cls.classes):
        verts = ",".join(str(v) for v in mesh.tets[c.representative].tolist())
        lines.append(f"{k},{c.representative},{c.multiplicity},{c.locus},{verts}")
    _say(f"{len(cls)} classes, {cls.total()} tets")
    outputs = _emit("\n".join(lines) + "\n", args.output)
    _manifest(args, outputs, args.output or "")
    return 0


def cmd_build(args):
    target = args.target
    if target == "box" and len(args.dims) != 3:
        raise AcuteCubeError("build box needs three counts: nx ny nz")
    if target != "box" and args.dims:
        raise AcuteCubeError(f"build {target} takes no counts")
    pairs = None
    if target == "cube":
        mesh = canonical_cube(args.policy)
    elif target == "variant":
        mesh = variant_1387(args.policy)
    elif target == "prism":
        mesh = reflect_prism(canonical_cube(args.policy))
    elif target == "periodic":
        pc = periodic_identify(reflect_prism(canonical_cube(args.policy)))
        mesh, pairs = pc.mesh, pc.pairs
    else:
        periodic = tuple(args.periodic) if args.periodic else ()
        out = tile_box(TilingSpec(*args.dims, periodic=periodic), canonical_cube(args.policy))
        if periodic:
            mesh, pairs = out.mesh, out.pairs
        else:
            mesh = out
    outputs = _write_mesh(mesh, args.output, args.format)
    if pairs is not None:
        node, _ = bundle_paths(args.output)
        ident = node.with_suffix(".ident")
        outputs.update(_emit(format_identification(pairs), ident))
        print(f"{mesh.n_vertices} vertices, {mesh.n_tets} tets, {len(pairs)} identified pairs")
    else:
        print(f"{mesh.n_vertices} vertices, {mesh.n_tets} tets")
    _manifest(args, outputs, args.output)
    return 0


def cmd_hist(args):
    mesh = read_bundle(args.bundle)
    rows = histogram(mesh, HistogramSpec(args.metric, args.bin_width))
    outputs = _emit(histogram_csv(rows), args.output)
    _manifest(args, outputs, args.output or "")
    return 0


def cmd_perturb(args):
    mesh = read_bundle(args.bundle)
    out = perturb(mesh, args.sigma, args.seed)
    outputs = _write_mesh(out, args.output, "node-ele")
    _manifest(args, outputs, args.output)
    return 0


def _smooth_config(args) -> SmoothConfig:
    cfg = SmoothConfig.from_file(args.config) if args.config else SmoothConfig()
    if args.iters is not None:
        cfg.max_iters = args.iters
    if args.step is not None:
        cfg.step = args.step
    if args.symmetry is not None:
        cfg.symmetry = args.symmetry == "on"
    if args.kappa is not None:
        cfg.kappa = args.kappa
    if args.redelaunay is not None:
        cfg.redelaunay_every = args.redelaunay
    return SmoothConfig(**vars(cfg))


def cmd_smooth(args):
    mesh = read_bundle(args.bundle)
    cfg = _smooth_config(args)
    trace: list = []
    out = smooth(mesh, cfg, trace=trace)
    print(f"margin before {trace[0]:.6f}, after {quality_margin(out, cfg.kappa):.6f}, sweeps {len(trace) - 1}")
    outputs = _write_mesh(out, args.output, "node-ele")
    _manifest(args, outputs, args.output)
    return 0


def cmd_export(args):
    mesh = read_bundle(args.bundle)
    outputs = _write_mesh(mesh, args.output, args.format)
    _manifest(args, outputs, args.output)
    return 0


def cmd_verify(args):
    """Re-run a manifest's command and compare output checksums."""
    doc = read_manifest(args.manifest)
    before = doc["outputs"]
    code = main(list(doc["arguments"]["argv"]) + ["--no-manifest"])
    mismatched = [p for p, h in before.items() if not Path(p).exists() or sha256_file(p) != h]
    expected = (0, 1) if doc["command"] == "audit" else (0,)
    if code not in expected or mismatched:
        _say("mismatch: " + ", ".join(mismatched) if mismatched else f"command exited {code}")
        return 1
    _say(f"{len(before)} output(s) reproduced")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acutecube", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--no-manifest", action="store_true", help="do not write a run manifest")
        return p

    p = add("generate", cmd_generate, "write the vertex table regenerated from the 26 seeds")
    p.add_argument("--stage", type=int, help="stop after stage N (0 = seed, 4 = full set)")
    p.add_argument("--seed-only", action="store_true")
    p.add_argument("-o", "--output")

    p = add("triangulate", cmd_triangulate, "Delaunay-triangulate a vertex table")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="bundle prefix")
    p.add_argument("--policy", choices=["reject", "perturb"], default="reject")
    p.add_argument("--format", choices=["node-ele", "vtk-legacy"], default="node-ele")

    p = add("audit", cmd_audit, "audit a bundle; exit 0 iff acute and completely well-centered")
    p.add_argument("bundle")
    p.add_argument("-o", "--output")

    p = add("classify", cmd_classify, "orbit classification of tets as CSV")
    p.add_argument("bundle")
    p.add_argument("--group", choices=["full", "trivial"], default="full")
    p.add_argument("-o", "--output")

    p = add("build", cmd_build, "build cube, variant, prism, periodic or box meshes")
    p.add_argument("target", choices=["cube", "variant", "prism", "periodic", "box"])
    p.add_argument("dims", nargs="*", type=int, help="nx ny nz for box")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--periodic", nargs="*", choices=["x", "y", "z"], help="periodic axes for box")
    p.add_argument("--policy", choices=["reject", "perturb"], default="reject")
    p.add_argument("--format", choices=["node-ele", "vtk-legacy"], default="node-ele")

    p = add("hist", cmd_hist, "histogram of a metric as CSV")
    p.add_argument("bundle")
    p.add_argument("--metric", choices=["dihedral", "face-angle", "h-over-R"], default="dihedral")
    p.add_argument("--bin-width", type=float)
    p.add_argument("-o", "--output")

    p = add("perturb", cmd_perturb, "random stratum-preserving vertex displacement")
    p.add_argument("bundle")
    p.add_argument("--sigma", type=int, required=True, help="max displacement in milliunits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = add("smooth", cmd_smooth, "quality-margin smoothing")
    p.add_argument("bundle")
    p.add_argument("--config", help="key = value file with SmoothConfig fields")
    p.add_argument("--iters", type=int)
    p.add_argument("--step", type=int)
    p.add_argument("--symmetry", choices=["on", "off"])
    p.add_argument("--kappa", type=float)
    p.add_argument("--redelaunay", type=int, help="re-triangulate every N sweeps (0 = never)")
    p.add_argument("-o", "--output", required=True)

    p = add("export", cmd_export, "convert a bundle to another format")
    p.add_argument("bundle")
    p.add_argument("--format", choices=["node-ele", "vtk-legacy"], default="vtk-legacy")
    p.add_argument("-o", "--output", required=True)

    p = add("verify", cmd_verify, "re-run a manifest and check byte-identical outputs")
    p.add_argument("manifest")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = [a for a in argv if a != "--no-manifest"]
    try:
        return args.func(args)
    except (AcuteCubeError, OSError, ValueError) as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
