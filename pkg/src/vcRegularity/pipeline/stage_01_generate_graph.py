from typing import Optional

from vcRegularity.config.configuration import ConfigurationManager
from vcRegularity.components.graph_generators import generate
from vcRegularity.components.serialization import save_manifest, write_big
from vcRegularity.constants import EXIT_REGULAR
from vcRegularity.entity.artifact_entity import RunManifest
from vcRegularity.entity.config_entity import GraphGenerationConfig
from vcRegularity.entity.graph_entity import BipartiteRelation
from vcRegularity import __version__, logger

STAGE_NAME = "Graph Generation stage"


class GraphGenerationPipeline:
    def __init__(self, config: Optional[GraphGenerationConfig] = None):
        self.config = config

    def main(self) -> BipartiteRelation:
        config = self.config or ConfigurationManager().get_graph_generation_config()
        g = generate(config.spec)
        write_big(g, config.graph_file)
        save_manifest(config.manifest_file, RunManifest(
            command="generate",
            inputs={},
            config=config.params,
            version=__version__,
            outcome="written",
            exit_code=EXIT_REGULAR,
            outputs={"graph": str(config.graph_file)},
        ))
        return g




if __name__ == '__main__':
    try:
        logger.info(f">>>>>> {STAGE_NAME} started <<<<<<")
        obj = GraphGenerationPipeline()
        obj.main()
        logger.info(f">>>>>> {STAGE_NAME} completed <<<<<<\n\nx==========x")
    except Exception as e:
        logger.exception(e)
        raise e
