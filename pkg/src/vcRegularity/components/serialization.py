from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd

from vcRegularity import logger
from vcRegularity.entity.artifact_entity import (EnergyTrace, IrregularityWitness, NetPair,
                                                 Partition, RegularityReport, RunManifest,
                                                 TraceRecord, Verdict)
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset
from vcRegularity.exceptions import GraphFormatError, GroundMismatchError
from vcRegularity.utils.common import load_json, save_json

TRACE_COLUMNS = [
    "iter",
    "rho_num",
    "rho_den",
    "parts_x",
    "parts_y",
    "net_x_size",
    "net_y_size",
    "irregular_mass_num",
    "irregular_mass_den",
    "wall_ms",
]


def write_big(g: BipartiteRelation, path: Path) -> None:
    """
    Writes `g` in the ".big" text format: a header line "n_x n_y" followed by
    one "x y" line per edge, edges in lexicographic order.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# bipartite relation, {g.num_edges} edges", f"{g.n_x} {g.n_y}"]
    lines.extend(f"{x} {y}" for x, y in g.edges())
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"graph {g.n_x}x{g.n_y} ({g.num_edges} edges) written to: {path}")


def _parse_pair(text: str, line_no: int, path: Path) -> Tuple[int, int]:
    fields = text.split()
    if len(fields) != 2:
        raise GraphFormatError(f"{path}:{line_no}: expected two integers, got {text!r}")
    try:
        return int(fields[0]), int(fields[1])
    except ValueError as e:
        raise GraphFormatError(f"{path}:{line_no}: expected two integers, got {text!r}") from e


def read_big(path: Path) -> BipartiteRelation:
    """
    Reads a ".big" file. Blank lines and lines starting with '#' are ignored.

    Raises:
        FileNotFoundError: If `path` does not exist.
        GraphFormatError: On a missing header, a malformed line, an endpoint
            out of range or a repeated edge; the message names the line.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"graph file not found at: {path}")

    header: Optional[Tuple[int, int]] = None
    seen = set()
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        a, b = _parse_pair(text, line_no, path)
        if header is None:
            if a < 1 or b < 1:
                raise GraphFormatError(f"{path}:{line_no}: side sizes must be >= 1, got {a}x{b}")
            header = (a, b)
            continue
        if not (0 <= a < header[0] and 0 <= b < header[1]):
            raise GraphFormatError(f"{path}:{line_no}: edge ({a}, {b}) outside {header[0]}x{header[1]}")
        if (a, b) in seen:
            raise GraphFormatError(f"{path}:{line_no}: duplicate edge ({a}, {b})")
        seen.add((a, b))

    if header is None:
        raise GraphFormatError(f"{path}: missing 'n_x n_y' header")
    g = BipartiteRelation.from_edges(header[0], header[1], seen)
    logger.info(f"graph {g.n_x}x{g.n_y} ({g.num_edges} edges) loaded from: {path}")
    return g


def rational_to_json(value: Fraction) -> dict:
    value = Fraction(value)
    return {"num": str(value.numerator), "den": str(value.denominator), "float": float(value)}


def rational_from_json(data) -> Fraction:
    """Only num/den are read; the float field is informational."""
    return Fraction(int(data["num"]), int(data["den"]))


def partition_to_dict(p: Partition, energy: Fraction, epsilon: Fraction,
                      nets: Optional[NetPair] = None) -> dict:
    nets = nets if nets is not None else p.provenance
    if nets is None:
        nets = NetPair.empty(p.n_x, p.n_y)
    return {
        "n_x": p.n_x,
        "n_y": p.n_y,
        "x_blocks": [block.indices() for block in p.x_blocks],
        "y_blocks": [block.indices() for block in p.y_blocks],
        "energy": rational_to_json(energy),
        "nets": {"x": nets.x_net.indices(), "y": nets.y_net.indices()},
        "epsilon": rational_to_json(epsilon),
    }


def save_partition(path: Path, p: Partition, energy: Fraction, epsilon: Fraction,
                   nets: Optional[NetPair] = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_json(path=path, data=partition_to_dict(p, energy, epsilon, nets))


def _blocks_from_json(side: Side, raw_blocks, ground: int) -> Tuple[VertexSubset, ...]:
    blocks = []
    for raw in raw_blocks:
        indices = [int(v) for v in raw]
        if any(not 0 <= v < ground for v in indices):
            raise GroundMismatchError(f"{side.value}-block {indices} leaves the {ground}-vertex side")
        blocks.append(VertexSubset.from_indices(side, indices, ground))
    return tuple(blocks)


def load_partition(path: Path, g: Optional[BipartiteRelation] = None) -> Partition:
    """
    Loads a partition JSON. With `g`, the stored side sizes must match it.

    Raises:
        GroundMismatchError: If the partition does not fit `g`.
        GraphFormatError: If the blocks do not form a partition of each side.
    """
    data = load_json(path=Path(path))
    n_x, n_y = int(data["n_x"]), int(data["n_y"])
    if g is not None and (g.n_x, g.n_y) != (n_x, n_y):
        raise GroundMismatchError(f"partition is over {n_x}x{n_y} but the graph is {g.n_x}x{g.n_y}")
    nets = NetPair(
        VertexSubset.from_indices(Side.X, [int(v) for v in data["nets"]["x"]], n_x),
        VertexSubset.from_indices(Side.Y, [int(v) for v in data["nets"]["y"]], n_y),
        rational_from_json(data["epsilon"]),
    )
    try:
        return Partition(
            _blocks_from_json(Side.X, data["x_blocks"], n_x),
            _blocks_from_json(Side.Y, data["y_blocks"], n_y),
            provenance=nets,
        )
    except GroundMismatchError:
        raise
    except ValueError as e:
        raise GraphFormatError(f"{path}: {e}") from e


def _witness_to_dict(w: IrregularityWitness) -> dict:
    return {
        "wx": w.wx.indices(),
        "wy": w.wy.indices(),
        "defect": rational_to_json(w.defect),
        "block_density": rational_to_json(w.block_density),
        "witness_density": rational_to_json(w.witness_density),
    }


def report_to_dict(report: RegularityReport) -> dict:
    pairs: List[dict] = []
    for entry in report.verdicts:
        if entry.verdict is Verdict.REGULAR_CERTIFIED:
            continue
        item = {"pair": list(entry.pair), "verdict": entry.verdict.value, "method": entry.method}
        if entry.witness is not None:
            item["witness"] = _witness_to_dict(entry.witness)
        pairs.append(item)
    cfg = report.tester_config
    return {
        "epsilon": rational_to_json(report.epsilon),
        "is_regular": report.is_regular,
        "irregular_mass": rational_to_json(report.irregular_mass),
        "blocks": list(report.shape),
        "counts": report.counts(),
        "tester": {"exact_cap": cfg.exact_cap, "trials": cfg.trials, "seed": cfg.seed},
        "pairs": pairs,
    }


def save_report(path: Path, report: RegularityReport) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_json(path=path, data=report_to_dict(report))


def trace_to_frame(trace: EnergyTrace) -> pd.DataFrame:
    # numerators and denominators go out as strings; they can outgrow int64
    rows = [
        {
            "iter": record.iter,
            "rho_num": str(record.rho.numerator),
            "rho_den": str(record.rho.denominator),
            "parts_x": record.parts_x,
            "parts_y": record.parts_y,
            "net_x_size": record.net_x_size,
            "net_y_size": record.net_y_size,
            "irregular_mass_num": str(record.irregular_mass.numerator),
            "irregular_mass_den": str(record.irregular_mass.denominator),
            "wall_ms": record.wall_ms,
        }
        for record in trace.records
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def save_trace(path: Path, trace: EnergyTrace) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_to_frame(trace).to_csv(path, index=False)
    logger.info(f"trace with {len(trace)} record(s) saved at: {path}")


def load_trace(path: Path) -> EnergyTrace:
    frame = pd.read_csv(path, dtype=str)
    if list(frame.columns) != TRACE_COLUMNS:
        raise GraphFormatError(f"{path}: unexpected trace header {list(frame.columns)}")
    trace = EnergyTrace()
    for row in frame.itertuples(index=False):
        trace.append(TraceRecord(
            iter=int(row.iter),
            rho=Fraction(int(row.rho_num), int(row.rho_den)),
            parts_x=int(row.parts_x),
            parts_y=int(row.parts_y),
            net_x_size=int(row.net_x_size),
            net_y_size=int(row.net_y_size),
            irregular_mass=Fraction(int(row.irregular_mass_num), int(row.irregular_mass_den)),
            wall_ms=int(row.wall_ms),
        ))
    return trace


def save_manifest(path: Path, manifest: RunManifest) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_json(path=path, data=manifest.to_dict())


def load_manifest(path: Path) -> RunManifest:
    data = load_json(path=Path(path)).to_dict()
    return RunManifest(
        command=data["command"],
        inputs=dict(data["inputs"]),
        config=dict(data["config"]),
        version=data["version"],
        outcome=data["outcome"],
        exit_code=int(data["exit_code"]),
        outputs=dict(data["outputs"]),
    )
