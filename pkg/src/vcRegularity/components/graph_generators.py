from typing import Callable, Dict, Tuple

import numpy as np

from vcRegularity import logger
from vcRegularity.entity.config_entity import FamilySpec
from vcRegularity.entity.graph_entity import BipartiteRelation


def split_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """
    Stream-splitting rule: SeedSequence(seed).spawn(2); the first child draws
    every X-side object (intervals, boxes, thresholds, random edges), the second
    every Y-side object (points). Neither draw depends on the other's size.
    """
    x_seq, y_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(x_seq), np.random.default_rng(y_seq)


def _intervals(spec: FamilySpec) -> np.ndarray:
    x_rng, y_rng = split_streams(spec.seed)
    ends = np.sort(x_rng.random((spec.n_x, 2)), axis=1)
    points = y_rng.random(spec.n_y)
    return (ends[:, :1] <= points[None, :]) & (points[None, :] <= ends[:, 1:])


def _boxes(spec: FamilySpec) -> np.ndarray:
    x_rng, y_rng = split_streams(spec.seed)
    corners = np.sort(x_rng.random((spec.n_x, spec.dim, 2)), axis=2)
    points = y_rng.random((spec.n_y, spec.dim))
    lower, upper = corners[:, None, :, 0], corners[:, None, :, 1]
    return ((lower <= points[None]) & (points[None] <= upper)).all(axis=2)


def _threshold(spec: FamilySpec) -> np.ndarray:
    x_rng, y_rng = split_streams(spec.seed)
    return x_rng.random(spec.n_x)[:, None] <= y_rng.random(spec.n_y)[None, :]


def _block_diagonal(spec: FamilySpec) -> np.ndarray:
    in_a = np.arange(spec.n_x) < spec.n_x // 2
    in_c = np.arange(spec.n_y) < spec.n_y // 2
    return in_a[:, None] == in_c[None, :]


def _matching(spec: FamilySpec) -> np.ndarray:
    return np.eye(spec.n_x, spec.n_y, dtype=bool)


def _complete(spec: FamilySpec) -> np.ndarray:
    return np.ones((spec.n_x, spec.n_y), dtype=bool)


def _erdos_renyi(spec: FamilySpec) -> np.ndarray:
    x_rng, _ = split_streams(spec.seed)
    return x_rng.random((spec.n_x, spec.n_y)) < spec.p


def _powerset(spec: FamilySpec) -> np.ndarray:
    # row x is the subset of Y = {0..k-1} whose indicator is the binary expansion of x
    return ((np.arange(spec.n_x)[:, None] >> np.arange(spec.n_y)[None, :]) & 1).astype(bool)


GENERATORS: Dict[str, Callable[[FamilySpec], np.ndarray]] = {
    "interval-incidence": _intervals,
    "box-incidence": _boxes,
    "threshold": _threshold,
    "block-diagonal": _block_diagonal,
    "matching": _matching,
    "complete": _complete,
    "erdos-renyi": _erdos_renyi,
    "powerset": _powerset,
}


def generate(spec: FamilySpec) -> BipartiteRelation:
    """
    Builds the relation described by `spec`; identical specs give identical relations.

    Invalid parameters are rejected with SpecError when the FamilySpec is built.
    """
    relation = BipartiteRelation.from_matrix(GENERATORS[spec.family](spec))
    logger.info(f"generated {spec.family} {spec.n_x}x{spec.n_y} (seed {spec.seed}): "
                f"{relation.num_edges} edges")
    return relation
