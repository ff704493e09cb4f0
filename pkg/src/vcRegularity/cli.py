import argparse
import sys
from pathlib import Path
from typing import List, Optional

from vcRegularity import __version__, logger
from vcRegularity.components.serialization import load_manifest
from vcRegularity.config.configuration import ConfigurationManager
from vcRegularity.constants import CONFIG_FILE_PATH, EXIT_ERROR, EXIT_NOT_REGULAR, EXIT_REGULAR, PARAMS_FILE_PATH
from vcRegularity.entity.config_entity import FAMILIES
from vcRegularity.exceptions import VCRegularityError
from vcRegularity.pipeline.stage_01_generate_graph import GraphGenerationPipeline
from vcRegularity.pipeline.stage_02_regularize import RegularizationPipeline
from vcRegularity.pipeline.stage_03_check_regularity import RegularityCheckPipeline
from vcRegularity.pipeline.stage_04_vc_dimension import VCDimensionPipeline, format_dimension


class _ArgumentParser(argparse.ArgumentParser):
    # exit code 2 is taken by "iteration-capped"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def manifest_path_for(output: Path) -> Path:
    output = Path(output)
    return output.with_name(f"{output.stem}.manifest.json")


def _manager(args: argparse.Namespace, **overrides) -> ConfigurationManager:
    overrides.setdefault("CI_MODE", args.ci)
    overrides.setdefault("N_JOBS", args.jobs)
    return ConfigurationManager(
        config_filepath=Path(args.config),
        params_filepath=Path(args.params),
        overrides=overrides,
    )


def _require_seed(args: argparse.Namespace, manager: ConfigurationManager) -> None:
    if manager.ci_mode and args.seed is None:
        raise ValueError(f"'{args.command}' needs an explicit --seed in CI mode")


def _run_generate(manager: ConfigurationManager, graph_file: Path, manifest_file: Path) -> int:
    config = manager.get_graph_generation_config(graph_file=graph_file, manifest_file=manifest_file)
    GraphGenerationPipeline(config).main()
    return EXIT_REGULAR


def _run_partition(manager: ConfigurationManager, graph_file: Path, partition_file: Path,
                   trace_file: Path, manifest_file: Path, progress: bool = False) -> int:
    config = manager.get_regularization_config(
        graph_file=graph_file,
        partition_file=partition_file,
        trace_file=trace_file,
        manifest_file=manifest_file,
        progress=progress,
    )
    result = RegularizationPipeline(config).main()
    return result.outcome.exit_code


def _run_check(manager: ConfigurationManager, graph_file: Path, partition_file: Path,
               report_file: Path, manifest_file: Path) -> int:
    config = manager.get_regularity_check_config(
        graph_file=graph_file,
        partition_file=partition_file,
        report_file=report_file,
        manifest_file=manifest_file,
    )
    report = RegularityCheckPipeline(config).main()
    return EXIT_REGULAR if report.is_regular else EXIT_NOT_REGULAR


def cmd_generate(args: argparse.Namespace) -> int:
    manager = _manager(args, FAMILY=args.family, N_X=args.nx, N_Y=args.ny, SEED=args.seed,
                       P=args.p, DIM=args.dim)
    _require_seed(args, manager)
    output = Path(args.output)
    return _run_generate(manager, output, Path(args.manifest or manifest_path_for(output)))


def cmd_partition(args: argparse.Namespace) -> int:
    manager = _manager(args, R=args.r, D=args.d, SEED=args.seed, MAX_ITERS=args.max_iters,
                       C0=args.c0, C1=args.c1, MAX_ROUNDS=args.max_rounds,
                       EXACT_CAP=args.exact_cap, TRIALS=args.trials, AUDIT=args.audit)
    _require_seed(args, manager)
    output = Path(args.output)
    trace = Path(args.trace) if args.trace else output.with_suffix(".csv")
    return _run_partition(manager, Path(args.graph), output, trace,
                          Path(args.manifest or manifest_path_for(output)), progress=args.progress)


def cmd_check(args: argparse.Namespace) -> int:
    manager = _manager(args, EPSILON=args.epsilon, R=args.r, EXACT_CAP=args.exact_cap,
                       TRIALS=args.trials, SEED=args.seed)
    _require_seed(args, manager)
    partition = Path(args.partition)
    output = Path(args.output) if args.output else partition.with_name(f"{partition.stem}.report.json")
    return _run_check(manager, Path(args.graph), partition, output,
                      Path(args.manifest or manifest_path_for(output)))


def cmd_vcdim(args: argparse.Namespace) -> int:
    manager = _manager(args, VC_CAP=args.cap)
    config = manager.get_vcdim_config(graph_file=Path(args.graph))
    dimensions = VCDimensionPipeline(config).main()
    for name, value in dimensions.items():
        print(f"{name}: {format_dimension(value, config.cap)}")
    return EXIT_REGULAR


def cmd_replay(args: argparse.Namespace) -> int:
    """
    Re-runs a recorded command from its manifest. Outputs go to the recorded
    paths, or under --outdir with the same file names.
    """
    manifest_file = Path(args.manifest_file)
    manifest = load_manifest(manifest_file)
    if manifest.version != __version__:
        logger.warning(f"manifest was written by version {manifest.version}, replaying with {__version__}")

    def relocate(path: str) -> Path:
        return Path(args.outdir) / Path(path).name if args.outdir else Path(path)

    manager = ConfigurationManager(
        config_filepath=Path(args.config),
        params_filepath=None,
        overrides={**manifest.config, "N_JOBS": args.jobs},
    )
    target = relocate(str(manifest_file))
    outputs, inputs = manifest.outputs, manifest.inputs
    if manifest.command == "generate":
        code = _run_generate(manager, relocate(outputs["graph"]), target)
    elif manifest.command == "partition":
        code = _run_partition(manager, Path(inputs["graph"]), relocate(outputs["partition"]),
                              relocate(outputs["trace"]), target)
    elif manifest.command == "check":
        code = _run_check(manager, Path(inputs["graph"]), Path(inputs["partition"]),
                          relocate(outputs["report"]), target)
    else:
        raise ValueError(f"{manifest_file}: cannot replay command {manifest.command!r}")

    if code != manifest.exit_code:
        logger.warning(f"replay exited with {code}, the recorded run with {manifest.exit_code}")
    return code


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", default=str(CONFIG_FILE_PATH), help="artifact paths (config.yaml)")
    common.add_argument("--params", default=str(PARAMS_FILE_PATH), help="parameter file (params.yaml)")
    common.add_argument("--ci", action="store_true", default=None,
                        help="CI mode: require --seed, write wall_ms as 0")
    common.add_argument("--jobs", type=int, default=None, help="worker count for per-block work")

    parser = _ArgumentParser(prog="vcreg", description="Regular partitions of bounded-VC bipartite graphs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a seeded graph family as a .big file")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-p", type=float, default=None, help="edge probability (erdos-renyi)")
    p.add_argument("--dim", type=int, default=None, help="box dimension (box-incidence)")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--manifest", default=None)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("partition", parents=[common], help="build a 1/r-regular partition")
    p.add_argument("graph")
    p.add_argument("-r", type=int, default=None, help="target 1/r-regularity")
    p.add_argument("-d", type=int, default=None, help="assumed VC dimension bound")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--c0", type=float, default=None, help="net size constant")
    p.add_argument("--c1", type=float, default=None, help="size bound constant")
    p.add_argument("--max-rounds", type=int, default=None, help="net doubling rounds")
    p.add_argument("--exact-cap", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--audit", action="store_true", default=None)
    p.add_argument("--progress", action="store_true")
    p.add_argument("-o", "--output", required=True, help="partition JSON")
    p.add_argument("--trace", default=None, help="trace CSV (default: OUTPUT with .csv)")
    p.add_argument("--manifest", default=None)
    p.set_defaults(handler=cmd_partition)

    p = sub.add_parser("check", parents=[common], help="re-verify a stored partition")
    p.add_argument("graph")
    p.add_argument("partition")
    p.add_argument("--epsilon", default=None, help="e.g. 1/4 or 0.25 (default: 1/r)")
    p.add_argument("-r", type=int, default=None)
    p.add_argument("--exact-cap", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", default=None, help="report JSON")
    p.add_argument("--manifest", default=None)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("vcdim", parents=[common], help="print primal, dual and symmetric VC dimension")
    p.add_argument("graph")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(handler=cmd_vcdim)

    p = sub.add_parser("replay", parents=[common], help="re-run a recorded command from its manifest")
    p.add_argument("manifest_file")
    p.add_argument("--outdir", default=None)
    p.set_defaults(handler=cmd_replay)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (VCRegularityError, FileNotFoundError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"vcreg {args.command}: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
