from pathlib import Path

CONFIG_FILE_PATH = Path("config/config.yaml")
PARAMS_FILE_PATH = Path("params.yaml")

# used when params.yaml is not in the working directory
DEFAULT_PARAMS = {
    "FAMILY": "block-diagonal",
    "N_X": 64,
    "N_Y": 64,
    "P": 0.5,
    "DIM": 2,
    "SEED": 7,
    "R": 2,
    "D": 1,
    "EPSILON": None,
    "C0": 8.0,
    "C1": 1.0,
    "MAX_ROUNDS": 6,
    "MAX_ITERS": None,
    "EXACT_CAP": 14,
    "TRIALS": 50,
    "VC_CAP": 4,
    "AUDIT": False,
    "N_JOBS": 1,
    "CI_MODE": False,
}

DEFAULT_CONFIG = {
    "artifacts_root": "artifacts",
    "graph_generation": {
        "root_dir": "artifacts/graph_generation",
        "graph_file": "artifacts/graph_generation/graph.big",
        "manifest_file": "artifacts/graph_generation/manifest.json",
    },
    "regularization": {
        "root_dir": "artifacts/regularization",
        "partition_file": "artifacts/regularization/partition.json",
        "trace_file": "artifacts/regularization/trace.csv",
        "manifest_file": "artifacts/regularization/manifest.json",
    },
    "regularity_check": {
        "root_dir": "artifacts/regularity_check",
        "report_file": "artifacts/regularity_check/report.json",
        "manifest_file": "artifacts/regularity_check/manifest.json",
    },
}

THREADS_ENV_VAR = "VCREG_THREADS"

SHATTER_GUARD = 30
AUDIT_RESTRICTION_SIZE = 16

EXIT_REGULAR = 0
EXIT_ERROR = 1
EXIT_CAPPED = 2
EXIT_STAGNATED = 3
EXIT_NOT_REGULAR = 4
