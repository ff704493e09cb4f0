from typing import Dict, Optional

from vcRegularity.config.configuration import ConfigurationManager
from vcRegularity.components.serialization import read_big
from vcRegularity.components.vc_dimension import dual_family, primal_family, vc_dimension
from vcRegularity.entity.config_entity import VCDimensionConfig
from vcRegularity import logger


STAGE_NAME = "VC Dimension stage"


def format_dimension(value: int, cap: int) -> str:
    return f">{cap}" if value > cap else str(value)


class VCDimensionPipeline:
    def __init__(self, config: Optional[VCDimensionConfig] = None):
        self.config = config

    def main(self) -> Dict[str, int]:
        """
        Returns the primal, dual and symmetric VC dimensions of the graph; a
        value of cap + 1 means "> cap".
        """
        config = self.config or ConfigurationManager().get_vcdim_config()
        g = read_big(config.graph_file)
        primal = vc_dimension(primal_family(g), config.cap)
        dual = vc_dimension(dual_family(g), config.cap)
        dimensions = {"primal": primal, "dual": dual, "symmetric": max(primal, dual)}
        logger.info(", ".join(f"{name} VC {format_dimension(value, config.cap)}"
                              for name, value in dimensions.items()))
        return dimensions




if __name__ == '__main__':
    try:
        logger.info(f"*******************")
        logger.info(f">>>>>> stage {STAGE_NAME} started <<<<<<")
        obj = VCDimensionPipeline()
        obj.main()
        logger.info(f">>>>>> stage {STAGE_NAME} completed <<<<<<\n\nx==========x")
    except Exception as e:
        logger.exception(e)
        raise e
