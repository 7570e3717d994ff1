"""Command-line commands: generate, triangulate, verify, experiment, spread and sample."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Optional

from config.settings import DEFAULT_SEED, get_engine_settings, get_project_root, load_experiment_config, tolerance
from src.errors import (
    BudgetExceededError,
    CloudFormatError,
    ConfigError,
    DegenerateCloudError,
    DuplicatePointError,
    InvalidParameterError,
    OracleLimitError,
)
from src.geometry.complexity import stats
from src.geometry.delaunay import triangulate
from src.geometry.validation import validate
from src.generators.helix import gen_helix_single_turn
from src.generators.registry import FAMILIES, generate
from src.metrics.neighbors import bound_monitor
from src.metrics.sampling import check_sample
from src.metrics.spread import spread
from src.repositories.file_repository import (
    STATS_SCHEMA,
    FileReportRepository,
    TextMeshRepository,
    XYZCloudRepository,
    stats_path,
)
from src.services import experiments
from src.services.bitangent import DEFAULT_SAMPLES, verify_bitangent
from src.services.experiments import run_scaling

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DUPLICATE = 4
EXIT_DEGENERATE = 5

VERIFY_TARGETS = ("pitch", "neighborly", "bitangent", "seams", "oracle", "ball-rows", "degree", "turn")

# Generator options shared by `generate`; each maps onto a registry parameter
_GENERATOR_OPTIONS = (
    ("--n", "n", int),
    ("--m", "m", int),
    ("--k", "k", int),
    ("--spread", "spread", float),
    ("--eps", "eps", float),
    ("--per-sphere", "per_sphere", int),
    ("--count", "count", int),
    ("--spacing", "spacing", str),
)


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'")


def _emit(report: dict, out: Optional[str]) -> None:
    """Print a JSON report to stdout or write it to --out."""
    if out:
        FileReportRepository(Path.cwd()).write_json(out, report)
    else:
        json.dump(report, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")


# --- commands ----------------------------------------------------------------

def cmd_generate(args: argparse.Namespace) -> int:
    params = {name: getattr(args, name) for _, name, _ in _GENERATOR_OPTIONS
              if getattr(args, name) is not None}
    if args.caps:
        params["caps"] = True
    family = FAMILIES.get(args.family.replace("_", "-"))
    if family is not None:
        # Options the family does not take are reported by name
        extra = set(params) - set(family.params)
        if extra:
            raise InvalidParameterError(f"{family.name} does not take {sorted('--' + p.replace('_', '-') for p in extra)}")

    cloud = generate(args.family, seed=args.seed, **params)
    out = args.out or f"{args.family}.xyz"
    path = XYZCloudRepository(Path.cwd()).write(out, cloud)
    _emit({"path": str(path), "n": len(cloud), **cloud.provenance.to_dict()}, None)
    return EXIT_OK


def cmd_triangulate(args: argparse.Namespace) -> int:
    clouds = XYZCloudRepository(Path.cwd())
    cloud = clouds.read(args.input)
    settings = get_engine_settings()
    tri = triangulate(cloud, seed=args.seed, max_planar_points=settings.oracle_max_points)

    meshes = TextMeshRepository(Path.cwd())
    out = Path(args.out) if args.out else Path(args.input).with_suffix(".tets")
    tets_path = meshes.write_tets(out, tri)
    if args.off:
        meshes.write_hull(args.off, tri)

    counts = stats(tri)
    report = {
        "schema": STATS_SCHEMA,
        "input": str(args.input),
        "seed": args.seed,
        "dimension": tri.dimension,
        **counts.to_dict(),
        "euler_characteristic": counts.euler_characteristic,
        "provenance": cloud.provenance.to_dict(),
    }
    code = EXIT_OK
    if tri.dimension < 3:
        logger.warning("%s is %d-dimensional; wrote its edges, no tetrahedra", args.input, tri.dimension)
        code = EXIT_DEGENERATE
    if args.validate:
        result = validate(tri, gate=settings.validation_gate, samples=settings.validation_samples, seed=args.seed)
        report["validation"] = result.to_dict()
        if not result.ok:
            code = EXIT_FAIL
    FileReportRepository(Path.cwd()).write_json(stats_path(tets_path), report)
    _emit(report, None)
    return code


def _verify_pitch(args) -> dict:
    alphas = args.alphas or [0.05, 1.0, 20.0]
    invariance = experiments.verify_pitch_invariance(args.n or 512, alphas, seed=args.seed)
    identity = experiments.verify_pitch_identity_draws(args.draws, seed=args.seed)
    return {"check": "pitch", "ok": invariance.ok and identity.ok,
            "invariance": invariance.to_dict(), "identity": identity.to_dict()}


def _verify_neighborly(args) -> dict:
    cloud = gen_helix_single_turn(args.n or 64, args.spacing or "even", seed=args.seed)
    return experiments.verify_neighborly(cloud, seed=args.seed).to_dict()


def _verify_bitangent(args) -> dict:
    t = args.t if args.t is not None else math.pi / 2
    return verify_bitangent(t, args.samples or DEFAULT_SAMPLES, alpha=args.alpha).to_dict()


def _verify_seams(args) -> dict:
    eps = args.eps if args.eps is not None else 0.125
    return experiments.verify_seam_bipartite(args.m or 33, eps, seed=args.seed).to_dict()


def _verify_oracle(args) -> dict:
    return experiments.verify_oracle(args.n or 32, args.trials, seed=args.seed, n_min=args.n_min).to_dict()


def _verify_ball_rows(args) -> dict:
    k = args.k or 16
    if args.randomized:
        n = args.n or 40 * k
        min_coverage = float(tolerance("random_ball_rows", "min_coverage", 0.8))
        report = experiments.verify_ball_rows(k, n=n, seed=args.seed, randomized=True, min_coverage=min_coverage)
    else:
        report = experiments.verify_ball_rows(k, per_sphere=args.per_sphere or 128, seed=args.seed)
    return report.to_dict()


def _verify_degree(args) -> dict:
    radii = args.radii or tolerance("degree_law", "radii", [8, 16, 32, 64])
    max_slope = float(tolerance("degree_law", "max_slope", 2.3))
    return experiments.verify_degree_law(args.n or 1024, radii, max_slope=max_slope, seed=args.seed).to_dict()


def _verify_turn(args) -> dict:
    return experiments.verify_turn_neighbors(args.n or 1024, seed=args.seed).to_dict()


_VERIFIERS: dict[str, Callable[[argparse.Namespace], dict]] = {
    "pitch": _verify_pitch,
    "neighborly": _verify_neighborly,
    "bitangent": _verify_bitangent,
    "seams": _verify_seams,
    "oracle": _verify_oracle,
    "ball-rows": _verify_ball_rows,
    "degree": _verify_degree,
    "turn": _verify_turn,
}


def cmd_verify(args: argparse.Namespace) -> int:
    report = _VERIFIERS[args.which](args)
    _emit(report, args.out)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_experiment(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    workers = args.workers or config["workers"]
    run = run_scaling(config["family"], config["sizes"], seed=config["seed"], params=config["params"],
                      time_budget_s=config["time_budget_s"], workers=workers)

    out_dir = Path(args.out_dir) if args.out_dir else get_project_root() / "data" / "reports"
    stem = Path(args.config).stem
    reports = FileReportRepository(out_dir)
    frame = run.frame(timings=args.timings)
    reports.write_table(f"{stem}.csv", frame)
    for record in run.records:
        logger.info("size n = %d took %.2fs", record.n, record.wall_time)

    summary = {"config": str(args.config), **run.summary(config["tolerances"])}
    reports.write_json(f"{stem}.json", summary)
    _emit(summary, None)
    return EXIT_OK if summary["checks"]["passed"] else EXIT_FAIL


def cmd_spread(args: argparse.Namespace) -> int:
    cloud = XYZCloudRepository(Path.cwd()).read(args.input)
    measured = spread(cloud)
    report = measured.to_dict()
    if args.bounds:
        tri = triangulate(cloud, seed=args.seed)
        report["bounds"] = bound_monitor(stats(tri), measured).to_dict()
    _emit(report, args.out)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    cloud = XYZCloudRepository(Path.cwd()).read(args.input)
    if cloud.surface is None:
        raise InvalidParameterError(f"{args.input} has no surface tag in its provenance sidecar")
    probes = args.probes or get_engine_settings().probes
    report = check_sample(cloud, cloud.surface, args.eps, probes=probes, seed=args.seed)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.passes else EXIT_FAIL


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delaunay-spread",
                                     description="Delaunay complexity of point sets with bounded spread.")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a generated cloud as xyz plus provenance JSON")
    gen.add_argument("family", help=f"one of {', '.join(sorted(FAMILIES))}")
    for flag, dest, kind in _GENERATOR_OPTIONS:
        gen.add_argument(flag, dest=dest, type=kind, default=None)
    gen.add_argument("--caps", action="store_true", help="close the helix cylinder with spherical caps")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--out", default=None, help="xyz path (default <family>.xyz)")
    gen.set_defaults(handler=cmd_generate)

    tri = sub.add_parser("triangulate", help="triangulate an xyz file")
    tri.add_argument("input")
    tri.add_argument("--out", default=None, help="tets path (default: input with .tets)")
    tri.add_argument("--off", default=None, help="also write the hull as an OFF mesh")
    tri.add_argument("--validate", action="store_true")
    tri.add_argument("--seed", type=int, default=DEFAULT_SEED)
    tri.set_defaults(handler=cmd_triangulate)

    ver = sub.add_parser("verify", help="check one construction; exit 0 on pass, 1 on fail")
    ver.add_argument("which", choices=VERIFY_TARGETS)
    ver.add_argument("--n", type=int, default=None)
    ver.add_argument("--n-min", dest="n_min", type=int, default=None, help="oracle: smallest cloud size")
    ver.add_argument("--m", type=int, default=None)
    ver.add_argument("--k", type=int, default=None)
    ver.add_argument("--t", type=float, default=None)
    ver.add_argument("--alpha", type=float, default=1.0)
    ver.add_argument("--alphas", type=_float_list, default=None)
    ver.add_argument("--radii", type=_float_list, default=None)
    ver.add_argument("--eps", type=float, default=None)
    ver.add_argument("--per-sphere", dest="per_sphere", type=int, default=None)
    ver.add_argument("--spacing", default=None)
    ver.add_argument("--randomized", action="store_true")
    ver.add_argument("--samples", type=int, default=None)
    ver.add_argument("--trials", type=int, default=10)
    ver.add_argument("--draws", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--out", default=None)
    ver.set_defaults(handler=cmd_verify)

    exp = sub.add_parser("experiment", help="run a scaling experiment from a JSON config")
    exp.add_argument("config")
    exp.add_argument("--out-dir", dest="out_dir", default=None)
    exp.add_argument("--workers", type=int, default=None)
    exp.add_argument("--timings", action="store_true", help="include wall time in the CSV")
    exp.set_defaults(handler=cmd_experiment)

    spr = sub.add_parser("spread", help="closest pair, diameter and spread of an xyz file")
    spr.add_argument("input")
    spr.add_argument("--bounds", action="store_true", help="also compare edge count with spread bounds")
    spr.add_argument("--seed", type=int, default=DEFAULT_SEED)
    spr.add_argument("--out", default=None)
    spr.set_defaults(handler=cmd_spread)

    smp = sub.add_parser("sample", help="epsilon-sample check against the cloud's tagged surface")
    smp.add_argument("input")
    smp.add_argument("--eps", type=float, required=True)
    smp.add_argument("--probes", type=int, default=None)
    smp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    smp.add_argument("--out", default=None)
    smp.set_defaults(handler=cmd_sample)
    return parser


def configure_logging(level: Optional[str]) -> None:
    """Send logs to stderr so stdout carries only JSON."""
    name = (level or get_engine_settings().log_level).upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, name, logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, run one command and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except DuplicatePointError as e:
        logger.error("duplicate points: %s", e)
        return EXIT_DUPLICATE
    except DegenerateCloudError as e:
        logger.error("degenerate cloud: %s", e)
        return EXIT_DEGENERATE
    except BudgetExceededError as e:
        logger.error("time budget exceeded: %s", e)
        return EXIT_FAIL
    except (ConfigError, InvalidParameterError, OracleLimitError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (CloudFormatError, OSError) as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
