import math
from fractions import Fraction
from typing import Dict, Optional, Union

import numpy as np

from vcRegularity import logger
from vcRegularity.entity.artifact_entity import BuildStats, DifferenceNet, NetVerification
from vcRegularity.entity.config_entity import NetBudget
from vcRegularity.entity.graph_entity import BipartiteRelation, VertexSubset, popcount
from vcRegularity.exceptions import EmptySideError

Seed = Union[int, np.random.SeedSequence]


def net_size_schedule(b: NetBudget, round_index: int, universe_size: Optional[int] = None) -> int:
    """
    Sample size of a resampling round: ceil(c0 d r ln max(r, 2)) doubled once
    per round and capped at the universe size.
    """
    if round_index < 0:
        raise ValueError(f"round must be non-negative, got {round_index}")
    size = math.ceil(b.c0 * b.d * b.r * math.log(max(b.r, 2))) * 2**round_index
    if universe_size is not None:
        size = min(size, universe_size)
    return size


def verify_difference_net(g: BipartiteRelation, net: DifferenceNet) -> NetVerification:
    """
    Checks the ε-net-for-differences property of `net` and sets its `verified` flag.

    Vertices of the index block are grouped by their trace on the net; inside a
    group any two neighbourhoods must differ on less than ε of the universe.
    Within a group only distinct restrictions to the universe are compared, and
    groups and pairs are scanned in vertex order, so the counterexample returned
    is always the same one.

    Returns:
        NetVerification: ok, or the first violating pair (a, a').
    """
    index_side = net.index_block.side
    universe_bits = net.universe.members
    universe_size = net.universe.size
    net_bits = net.members.members

    groups: Dict[int, Dict[int, int]] = {}
    for vertex in net.index_block:
        restricted = g.neighbourhood(index_side, vertex) & universe_bits
        groups.setdefault(restricted & net_bits, {}).setdefault(restricted, vertex)

    for representatives in groups.values():
        if len(representatives) < 2:
            continue
        items = list(representatives.items())
        for i, (row_a, a) in enumerate(items):
            for row_b, b in items[i + 1:]:
                if Fraction(popcount(row_a ^ row_b), universe_size) >= net.epsilon:
                    net.verified = False
                    return NetVerification(ok=False, counterexample=(a, b))

    net.verified = True
    return NetVerification(ok=True)


def build_difference_net(g: BipartiteRelation, index_block: VertexSubset, universe: VertexSubset,
                         b: NetBudget, seed: Seed, epsilon: Optional[Fraction] = None) -> DifferenceNet:
    """
    Builds a verified ε-net for differences inside `universe` by seeded sampling
    without replacement, doubling the sample each round.

    Args:
        g: The relation.
        index_block: Opposite-side vertices whose neighbourhoods must be separated.
        universe: The block the net lives in; measures are normalized to it.
        b: Sizing budget; ε defaults to 1/b.r.
        seed: Seed or SeedSequence; identical seeds give identical nets.
        epsilon: Optional explicit quality overriding 1/b.r.

    Returns:
        DifferenceNet: the first sample that verifies, or the whole universe
        once `b.max_rounds` rounds are exhausted.
    """
    if universe.is_empty():
        raise EmptySideError("cannot build a net inside an empty universe")
    if index_block.is_empty():
        raise EmptySideError("cannot build a net for an empty index block")
    if index_block.side is not universe.side.opposite:
        raise ValueError("index block and universe must lie on opposite sides")

    eps = b.epsilon if epsilon is None else epsilon
    rng = np.random.default_rng(seed)
    pool = np.asarray(universe.indices(), dtype=np.int64)
    samples_drawn = 0

    for round_index in range(b.max_rounds):
        size = net_size_schedule(b, round_index, universe.size)
        chosen = rng.choice(pool, size=size, replace=False)
        samples_drawn += size
        net = DifferenceNet(
            side=universe.side,
            universe=universe,
            index_block=index_block,
            members=VertexSubset.from_indices(universe.side, chosen.tolist(), universe.ground_size),
            epsilon=eps,
            build_stats=BuildStats(samples_drawn=samples_drawn, resample_rounds=round_index + 1),
        )
        if verify_difference_net(g, net).ok:
            logger.debug(f"net of size {net.members.size}/{universe.size} verified at eps={eps} "
                         f"after {round_index + 1} round(s)")
            return net

    logger.debug(f"net sampling exhausted {b.max_rounds} rounds; falling back to the whole universe")
    return DifferenceNet(
        side=universe.side,
        universe=universe,
        index_block=index_block,
        members=universe,
        epsilon=eps,
        verified=True,
        build_stats=BuildStats(samples_drawn=samples_drawn, resample_rounds=b.max_rounds, fell_back=True),
    )
