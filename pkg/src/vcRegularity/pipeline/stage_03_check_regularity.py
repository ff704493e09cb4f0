from typing import Optional

from vcRegularity.config.configuration import ConfigurationManager
from vcRegularity.components.regularity_tester import partition_regularity
from vcRegularity.components.serialization import (load_partition, read_big, save_manifest,
                                                   save_report)
from vcRegularity.constants import EXIT_NOT_REGULAR, EXIT_REGULAR
from vcRegularity.entity.artifact_entity import RegularityReport, RunManifest
from vcRegularity.entity.config_entity import RegularityCheckConfig
from vcRegularity import __version__, logger


STAGE_NAME = "Regularity Check stage"


class RegularityCheckPipeline:
    """Re-verifies a stored partition, independently of how it was produced."""
    def __init__(self, config: Optional[RegularityCheckConfig] = None):
        self.config = config

    def main(self) -> RegularityReport:
        config = self.config or ConfigurationManager().get_regularity_check_config()
        g = read_big(config.graph_file)
        partition = load_partition(config.partition_file, g)
        report = partition_regularity(g, partition, config.epsilon, config.tester)

        save_report(config.report_file, report)
        save_manifest(config.manifest_file, RunManifest(
            command="check",
            inputs={"graph": str(config.graph_file), "partition": str(config.partition_file)},
            config=config.params,
            version=__version__,
            outcome="regular" if report.is_regular else "not-regular",
            exit_code=EXIT_REGULAR if report.is_regular else EXIT_NOT_REGULAR,
            outputs={"report": str(config.report_file)},
        ))
        return report




if __name__ == '__main__':
    try:
        logger.info(f"*******************")
        logger.info(f">>>>>> stage {STAGE_NAME} started <<<<<<")
        obj = RegularityCheckPipeline()
        obj.main()
        logger.info(f">>>>>> stage {STAGE_NAME} completed <<<<<<\n\nx==========x")
    except Exception as e:
        logger.exception(e)
        raise e
