import os
from fractions import Fraction
from pathlib import Path
from typing import Optional

from box import ConfigBox

from vcRegularity import logger
from vcRegularity.constants import (CONFIG_FILE_PATH, DEFAULT_CONFIG, DEFAULT_PARAMS,
                                    PARAMS_FILE_PATH, THREADS_ENV_VAR)
from vcRegularity.utils.common import read_yaml, create_directories
from vcRegularity.entity.config_entity import (FamilySpec, GraphGenerationConfig, LoopConfig,
                                               NetBudget, RegularityCheckConfig,
                                               RegularizationConfig, TesterConfig,
                                               VCDimensionConfig)


class ConfigurationManager:
    """
    Merges config.yaml (artifact paths) and params.yaml (algorithm parameters)
    with the packaged defaults, then applies `overrides` (None values are
    skipped) and the VCREG_THREADS environment variable.
    """
    def __init__(
        self,
        config_filepath: Path = CONFIG_FILE_PATH,
        params_filepath: Optional[Path] = PARAMS_FILE_PATH,
        overrides: Optional[dict] = None):

        config_filepath = Path(config_filepath)
        self.config = read_yaml(config_filepath) if config_filepath.exists() else ConfigBox(DEFAULT_CONFIG)

        params = dict(DEFAULT_PARAMS)
        if params_filepath is not None and Path(params_filepath).exists():
            params.update(read_yaml(Path(params_filepath)).to_dict())
        for key, value in (overrides or {}).items():
            if value is not None:
                params[key] = value

        threads = os.environ.get(THREADS_ENV_VAR)
        if threads:
            try:
                params["N_JOBS"] = int(threads)
            except ValueError as e:
                raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {threads!r}") from e
            logger.info(f"{THREADS_ENV_VAR}={threads} overrides N_JOBS")

        self.params = ConfigBox(params)

    @property
    def ci_mode(self) -> bool:
        return bool(self.params.CI_MODE)

    def params_echo(self) -> dict:
        """The effective parameters, as recorded in run manifests."""
        echo = self.params.to_dict()
        # thread count never changes results, so it stays out of the echo
        echo.pop("N_JOBS", None)
        return echo

    def _stage_dir(self, root_dir: str, *outputs: Optional[Path]) -> Path:
        # only stages writing at least one default artifact path need the artifacts tree
        if any(output is None for output in outputs):
            create_directories([self.config.artifacts_root, root_dir])
        return Path(root_dir)

    def get_tester_config(self) -> TesterConfig:
        return TesterConfig(
            exact_cap=int(self.params.EXACT_CAP),
            trials=int(self.params.TRIALS),
            seed=int(self.params.SEED),
            n_jobs=int(self.params.N_JOBS),
        )

    def get_loop_config(self, progress: bool = False) -> LoopConfig:
        r, d = int(self.params.R), int(self.params.D)
        max_iters = self.params.MAX_ITERS
        return LoopConfig(
            r=r,
            d=d,
            net_budget=NetBudget(d=d, r=r, c0=float(self.params.C0),
                                 max_rounds=int(self.params.MAX_ROUNDS)),
            tester=self.get_tester_config(),
            max_iters=None if max_iters is None else int(max_iters),
            seed=int(self.params.SEED),
            c1=float(self.params.C1),
            n_jobs=int(self.params.N_JOBS),
            audit=bool(self.params.AUDIT),
            progress=progress,
            record_wall_time=not self.ci_mode,
        )

    def get_family_spec(self) -> FamilySpec:
        p = self.params.P
        return FamilySpec(
            family=str(self.params.FAMILY),
            n_x=int(self.params.N_X),
            n_y=int(self.params.N_Y),
            seed=int(self.params.SEED),
            p=None if p is None else float(p),
            dim=int(self.params.DIM),
        )

    def get_epsilon(self) -> Fraction:
        epsilon = self.params.EPSILON
        if epsilon is None:
            return Fraction(1, int(self.params.R))
        epsilon = Fraction(str(epsilon))
        if epsilon <= 0:
            raise ValueError(f"EPSILON must be positive, got {epsilon}")
        return epsilon

    def get_graph_generation_config(self, graph_file: Optional[Path] = None,
                                    manifest_file: Optional[Path] = None) -> GraphGenerationConfig:
        config = self.config.graph_generation

        graph_generation_config = GraphGenerationConfig(
            root_dir=self._stage_dir(config.root_dir, graph_file, manifest_file),
            graph_file=Path(graph_file or config.graph_file),
            manifest_file=Path(manifest_file or config.manifest_file),
            spec=self.get_family_spec(),
            params=self.params_echo(),
        )

        return graph_generation_config

    def get_regularization_config(self, graph_file: Optional[Path] = None,
                                  partition_file: Optional[Path] = None,
                                  trace_file: Optional[Path] = None,
                                  manifest_file: Optional[Path] = None,
                                  progress: bool = False) -> RegularizationConfig:
        config = self.config.regularization

        regularization_config = RegularizationConfig(
            root_dir=self._stage_dir(config.root_dir, partition_file, trace_file, manifest_file),
            graph_file=Path(graph_file or self.config.graph_generation.graph_file),
            partition_file=Path(partition_file or config.partition_file),
            trace_file=Path(trace_file or config.trace_file),
            manifest_file=Path(manifest_file or config.manifest_file),
            loop=self.get_loop_config(progress=progress),
            ci_mode=self.ci_mode,
            params=self.params_echo(),
        )

        return regularization_config

    def get_regularity_check_config(self, graph_file: Optional[Path] = None,
                                    partition_file: Optional[Path] = None,
                                    report_file: Optional[Path] = None,
                                    manifest_file: Optional[Path] = None) -> RegularityCheckConfig:
        config = self.config.regularity_check

        regularity_check_config = RegularityCheckConfig(
            root_dir=self._stage_dir(config.root_dir, report_file, manifest_file),
            graph_file=Path(graph_file or self.config.graph_generation.graph_file),
            partition_file=Path(partition_file or self.config.regularization.partition_file),
            report_file=Path(report_file or config.report_file),
            manifest_file=Path(manifest_file or config.manifest_file),
            epsilon=self.get_epsilon(),
            tester=self.get_tester_config(),
            params=self.params_echo(),
        )

        return regularity_check_config

    def get_vcdim_config(self, graph_file: Optional[Path] = None) -> VCDimensionConfig:
        return VCDimensionConfig(
            graph_file=Path(graph_file or self.config.graph_generation.graph_file),
            cap=int(self.params.VC_CAP),
        )
