import math
import time
from dataclasses import replace
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from vcRegularity import logger
from vcRegularity.components.bigraph import restrict
from vcRegularity.components.epsilon_nets import build_difference_net
from vcRegularity.components.partition_energy import (energy, induced_partition, refines,
                                                      restrict_partition)
from vcRegularity.components.regularity_tester import (boost_bounds, orient_witness,
                                                       partition_regularity,
                                                       two_block_energy_gain, witness_boost)
from vcRegularity.components.vc_dimension import sauer_shelah_bound, vc_dimension_of_relation
from vcRegularity.constants import AUDIT_RESTRICTION_SIZE
from vcRegularity.entity.artifact_entity import (BoundValue, EnergyTrace, LoopOutcome, NetPair,
                                                 Partition, RegularityReport,
                                                 RegularizationResult, TheoreticalBounds,
                                                 TraceRecord)
from vcRegularity.entity.config_entity import LoopConfig
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset
from vcRegularity.exceptions import DegenerateWitness, DomainError

AUDITED_PAIRS = 8


def _bound_value(formula: str, c1: float, base: float, exponent_log2: float) -> BoundValue:
    # base ** exponent, with the exponent given by its log2 so towers never get materialized
    if base <= 0:
        raise DomainError(f"bound base must be positive, got {base}")
    log2_base = math.log2(base)
    if exponent_log2 < 1000:
        log2 = 2.0**exponent_log2 * log2_base
    else:
        log2 = math.copysign(math.inf, log2_base) if log2_base else 0.0
    log2_log2 = exponent_log2 + math.log2(log2_base) if log2_base > 0 else -math.inf
    value = 2.0**log2 if log2 < 1023 else None
    return BoundValue(formula=formula, c1=c1, log2=log2, log2_log2=log2_log2, value=value,
                      overflow_to_infinity=value is None)


def theoretical_bounds(d: int, r: int, i: int, c1: float = 1.0) -> TheoreticalBounds:
    """
    Iteration cap 10³r⁷ and the size bound (c1 d r³ ln r³)^(d^(2i)) at round i
    and at the cap. Astronomical values are reported through log₂ with
    `overflow_to_infinity` set.
    """
    if d < 1 or r < 2 or i < 0:
        raise DomainError(f"need d >= 1, r >= 2, i >= 0; got d={d}, r={r}, i={i}")
    iter_cap = 10**3 * r**7
    base = c1 * d * r**3 * math.log(r**3)

    def at(step: int) -> BoundValue:
        formula = f"(c1*{d}*{r}^3*ln({r}^3))^({d}^(2*{step}))"
        return _bound_value(formula, c1, base, 2 * step * math.log2(d))

    return TheoreticalBounds(iter_cap=iter_cap, size_at_iter=at(i), final_size=at(iter_cap))


def refinement_size_forecast(d: int, r: int, parts: int, c1: float = 1.0) -> BoundValue:
    """One-step forecast (c1 |𝒫| d r³ ln r³)^d for the refined partition."""
    if d < 1 or r < 2 or parts < 1:
        raise DomainError(f"need d >= 1, r >= 2, parts >= 1; got d={d}, r={r}, parts={parts}")
    base = c1 * parts * d * r**3 * math.log(r**3)
    return _bound_value(f"(c1*{parts}*{d}*{r}^3*ln({r}^3))^{d}", c1, base, math.log2(d))


def refine_once(g: BipartiteRelation, nets: NetPair, partition: Partition, cfg: LoopConfig,
                round_index: int = 0) -> Tuple[NetPair, Partition]:
    """
    One refinement step: a verified 1/(10r³)-net for differences inside every
    block (separating the neighbourhoods of the whole opposite side under the
    block measure), unioned with the current nets, then re-induced.

    The net of block k on side s in round t is seeded with (seed, t, s, k), so
    the result does not depend on `cfg.n_jobs`.
    """
    budget = cfg.refinement_budget
    tasks = []
    for side_code, side in enumerate((Side.X, Side.Y)):
        index_block = g.full_side(side.opposite)
        for k, block in enumerate(partition.blocks(side)):
            seed = np.random.SeedSequence([cfg.seed, round_index, side_code, k])
            tasks.append(delayed(build_difference_net)(g, index_block, block, budget, seed))
    built = Parallel(n_jobs=cfg.n_jobs)(tasks)

    x_bits, y_bits = nets.x_net.members, nets.y_net.members
    fallbacks = 0
    for net in built:
        fallbacks += net.build_stats.fell_back
        if net.side is Side.X:
            x_bits |= net.members.members
        else:
            y_bits |= net.members.members
    refined_nets = NetPair(
        VertexSubset(Side.X, x_bits, g.n_x),
        VertexSubset(Side.Y, y_bits, g.n_y),
        min(nets.quality, budget.epsilon),
    )
    refined = induced_partition(g, refined_nets)
    logger.debug(f"round {round_index}: {len(built)} block nets ({fallbacks} full-block fallbacks), "
                 f"nets {refined_nets.x_net.size}+{refined_nets.y_net.size}")
    return refined_nets, refined


def _forecast(d: int, net_size: int) -> Optional[float]:
    return sauer_shelah_bound(d, net_size) if net_size >= d else None


def _audit_vc(g: BipartiteRelation, cfg: LoopConfig, round_index: int) -> None:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, round_index, 2]))
    xs = rng.choice(g.n_x, size=min(g.n_x, AUDIT_RESTRICTION_SIZE), replace=False)
    ys = rng.choice(g.n_y, size=min(g.n_y, AUDIT_RESTRICTION_SIZE), replace=False)
    sample = restrict(g, VertexSubset.from_indices(Side.X, xs.tolist(), g.n_x),
                      VertexSubset.from_indices(Side.Y, ys.tolist(), g.n_y))
    observed = vc_dimension_of_relation(sample, cap=cfg.d)
    if observed > cfg.d:
        logger.warning(f"audit: a {len(xs)}x{len(ys)} restriction has VC dimension > d={cfg.d}; "
                       f"the assumed bound does not hold for this relation")


def _audit_amplification(g: BipartiteRelation, previous: Partition, report: RegularityReport,
                         refined: Partition, r: int) -> None:
    for witness in report.witnesses()[:AUDITED_PAIRS]:
        i, j = witness.pair
        bx, by = previous.x_blocks[i], previous.y_blocks[j]
        sub = restrict_partition(refined, bx, by)
        oriented_g, oriented = orient_witness(g, bx, by, witness)
        try:
            boosted = witness_boost(oriented_g, bx, by, oriented, r, sub)
        except DegenerateWitness as e:
            logger.warning(f"audit: amplification of pair {witness.pair} degenerated: {e}")
            continue
        gain = two_block_energy_gain(oriented_g, bx, by, boosted.x_tilde, boosted.y_tilde)
        boost_bounds(boosted, gain, r)


def _record(iteration: int, rho: Fraction, partition: Partition, nets: NetPair,
            report: RegularityReport, wall_ms: int, d: int) -> TraceRecord:
    return TraceRecord(
        iter=iteration,
        rho=rho,
        parts_x=len(partition.x_blocks),
        parts_y=len(partition.y_blocks),
        net_x_size=nets.x_net.size,
        net_y_size=nets.y_net.size,
        irregular_mass=report.irregular_mass,
        wall_ms=wall_ms,
        forecast_x=_forecast(d, nets.y_net.size),
        forecast_y=_forecast(d, nets.x_net.size),
    )


def _check_forecast(record: TraceRecord, g: BipartiteRelation) -> None:
    for parts, forecast, n in ((record.parts_x, record.forecast_x, g.n_x),
                               (record.parts_y, record.forecast_y, g.n_y)):
        if forecast is not None and parts > min(n, forecast):
            logger.warning(f"round {record.iter}: {parts} blocks exceed the trace-count bound "
                           f"{forecast:.1f}; the relation's VC dimension exceeds d")


def regularize(g: BipartiteRelation, cfg: LoopConfig) -> RegularizationResult:
    """
    Refines from the trivial partition until it is 1/r-regular.

    Only the previous partition is held between rounds; the full chain is kept
    in `history` when `cfg.keep_history` is set.

    The tester runs on 𝒫₀ and after every round. The loop stops when the tester
    declares the partition 1/r-regular, after `cfg.max_iters` rounds, or after
    two consecutive rounds whose energy gain is below 1/(10³r⁷).
    """
    eps = cfg.epsilon
    nets = NetPair.empty(g.n_x, g.n_y)
    partition = induced_partition(g, nets)
    started = time.perf_counter()
    rho = energy(g, partition)
    report = partition_regularity(g, partition, eps, cfg.tester)
    trace = EnergyTrace()
    wall_ms = int((time.perf_counter() - started) * 1000) if cfg.record_wall_time else 0
    trace.append(_record(0, rho, partition, nets, report, wall_ms, cfg.d))
    history = [partition] if cfg.keep_history else []

    outcome = LoopOutcome.REGULAR
    stagnant_rounds = 0
    iteration = 0
    with tqdm(total=cfg.max_iters, desc="refine", disable=not cfg.progress) as bar:
        while not report.is_regular:
            if iteration >= cfg.max_iters:
                outcome = LoopOutcome.CAPPED
                break
            if stagnant_rounds >= 2:
                outcome = LoopOutcome.STAGNATED
                break
            iteration += 1
            started = time.perf_counter()
            previous, previous_report, previous_rho = partition, report, rho

            nets, partition = refine_once(g, nets, partition, cfg, iteration)
            rho = energy(g, partition)
            report = partition_regularity(g, partition, eps, cfg.tester)

            gain = rho - previous_rho
            if gain < 0 or not refines(partition, previous):
                logger.error(f"round {iteration}: refinement broke monotonicity (gain {gain})")
            if gain < cfg.increment:
                stagnant_rounds += 1
                if previous_report.all_certified:
                    logger.warning(f"round {iteration}: certified-irregular partition gained only "
                                   f"{gain} < {cfg.increment}")
            else:
                stagnant_rounds = 0
            if cfg.audit:
                _audit_vc(g, cfg, iteration)
                _audit_amplification(g, previous, previous_report, partition, cfg.r)

            wall_ms = int((time.perf_counter() - started) * 1000) if cfg.record_wall_time else 0
            record = replace(
                _record(iteration, rho, partition, nets, report, wall_ms, cfg.d),
                step_forecast_log2=refinement_size_forecast(cfg.d, cfg.r, previous.size(), cfg.c1).log2,
                tower_log2=theoretical_bounds(cfg.d, cfg.r, iteration, cfg.c1).size_at_iter.log2,
            )
            _check_forecast(record, g)
            trace.append(record)
            if cfg.keep_history:
                history.append(partition)
            bar.update(1)
            logger.info(f"round {iteration}: rho={rho} (+{gain}), parts {record.parts_x}x{record.parts_y}, "
                        f"irregular mass {report.irregular_mass}")

    logger.info(f"regularize finished: {outcome.value} after {iteration} round(s), "
                f"|P|={partition.size()}, rho={rho}")
    return RegularizationResult(
        partition=partition,
        nets=nets,
        trace=trace,
        report=report,
        outcome=outcome,
        history=tuple(history),
    )
