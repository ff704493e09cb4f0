from typing import Optional

from vcRegularity.config.configuration import ConfigurationManager
from vcRegularity.components.refine_loop import regularize
from vcRegularity.components.serialization import (read_big, save_manifest, save_partition,
                                                   save_trace)
from vcRegularity.entity.artifact_entity import RegularizationResult, RunManifest
from vcRegularity.entity.config_entity import RegularizationConfig
from vcRegularity import __version__, logger


STAGE_NAME = "Regularization stage"


class RegularizationPipeline:
    def __init__(self, config: Optional[RegularizationConfig] = None):
        self.config = config

    def main(self) -> RegularizationResult:
        config = self.config or ConfigurationManager().get_regularization_config()
        g = read_big(config.graph_file)
        result = regularize(g, config.loop)

        final = result.trace.records[-1]
        save_partition(config.partition_file, result.partition, final.rho, config.loop.epsilon,
                       result.nets)
        save_trace(config.trace_file, result.trace)
        save_manifest(config.manifest_file, RunManifest(
            command="partition",
            inputs={"graph": str(config.graph_file)},
            config=config.params,
            version=__version__,
            outcome=result.outcome.value,
            exit_code=result.outcome.exit_code,
            outputs={"partition": str(config.partition_file), "trace": str(config.trace_file)},
        ))
        return result




if __name__ == '__main__':
    try:
        logger.info(f"*******************")
        logger.info(f">>>>>> stage {STAGE_NAME} started <<<<<<")
        obj = RegularizationPipeline()
        obj.main()
        logger.info(f">>>>>> stage {STAGE_NAME} completed <<<<<<\n\nx==========x")
    except Exception as e:
        logger.exception(e)
        raise e
