r"""
Named acceptance suites: batches of seeded runs whose outcomes are checked
against properties the dynamics must satisfy
"""

from typing import Callable, Dict, List, Sequence
from dataclasses import dataclass, field
import logging
import os
import numpy as np

from .analysis import conservation_audit, topk_certificate, verify_component_consensus
from .engine import SimulationConfig, run_batch
from .errors import UnknownSuiteError
from .pairs import PairDistribution, PairSchedule
from .profile import OpinionProfile, column_average
from .subjects import SubjectPolicy

logger = logging.getLogger(__name__)

THREADS_ENV = 'VOTE_DIFFUSE_THREADS'

CONFIG = {
    'conservation': {'m': 20, 'n': 10, 'steps': 1000000, 'max_drift': 1e-10},
    'gossip-consensus': {'sizes': (4, 10), 'n': 3, 'steps_per_agent': 100000, 'tol': 1e-8},
    'topk': {'m': 5, 'n': 4, 'k': 2, 'steps': 200000, 'tol': 1e-8, 'min_count': 10},
    'hk-freeze': {'eps': 0.5, 'steps': 10000},
    'disconnected': {'blocks': ((0, 1, 2, 3, 4), (5, 6, 7, 8, 9)), 'n': 3, 'steps': 200000,
                     'tol': 1e-8, 'min_count': 10}
}


@dataclass(frozen=True)
class SeedResult:

    seed: int
    passed: bool
    metric: float
    detail: str = ''


@dataclass(frozen=True)
class SuiteResult:
    """
    Outcome of one suite over a list of seeds
    """

    name: str
    runs: List[SeedResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:

        return bool(self.runs) and all(r.passed for r in self.runs)

    def summary(self) -> str:

        lines = ['Suite: {} | seeds: {} | {}'.format(
            self.name, len(self.runs), 'PASS' if self.passed else 'FAIL')]
        for r in self.runs:
            lines.append('  seed {}: {} | {} {}'.format(
                r.seed, 'PASS' if r.passed else 'FAIL', repr(r.metric), r.detail).rstrip())
        return '\n'.join(lines)


def _conservation(seeds: Sequence[int], threads: int, steps: int = None) -> List[SeedResult]:

    cfg = CONFIG['conservation']
    steps = steps or cfg['steps']
    policies = (SubjectPolicy.full(), SubjectPolicy.top_k(3), SubjectPolicy.binomial(0.5),
                SubjectPolicy.hk(0.5))
    configs = [SimulationConfig.create(
        m=cfg['m'], n=cfg['n'], initial_generator='uniform', initial_seed=seed,
        pair_source=PairDistribution.uniform(cfg['m']),
        subject_policy=policies[idx % len(policies)], max_steps=steps, seed=seed,
        snapshot_every=steps, convergence_mode='off'
    ) for idx, seed in enumerate(seeds)]
    results = []
    for seed, config, trace in zip(seeds, configs, run_batch(configs, threads)):
        drift = conservation_audit(trace)
        results.append(SeedResult(seed, drift <= cfg['max_drift'], drift,
                                  'drift ({})'.format(config.subject_policy.kind)))
    return results


def _gossip_consensus(seeds: Sequence[int], threads: int, steps: int = None) -> List[SeedResult]:

    cfg = CONFIG['gossip-consensus']
    configs, keys = [], []
    for seed in seeds:
        for m in cfg['sizes']:
            configs.append(SimulationConfig.create(
                m=m, n=cfg['n'], initial_generator='gaussian', initial_seed=seed,
                pair_source=PairDistribution.uniform(m),
                max_steps=steps or cfg['steps_per_agent'] * m,
                seed=seed, snapshot_every=1000, convergence_tol=1e-12, convergence_window=1000
            ))
            keys.append(seed)
    per_seed = {}
    for seed, trace in zip(keys, run_batch(configs, threads)):
        final = trace.final_profile.scores
        spread = float(np.max(np.ptp(final, axis=0)))
        error = float(np.max(np.abs(final - column_average(trace.initial_profile).averages)))
        worst = per_seed.get(seed, 0.0)
        per_seed[seed] = max(worst, spread, error)
    return [SeedResult(s, per_seed[s] <= cfg['tol'], per_seed[s], 'max spread/mean error')
            for s in seeds]


def _topk(seeds: Sequence[int], threads: int, steps: int = None) -> List[SeedResult]:

    cfg = CONFIG['topk']
    configs = [SimulationConfig.create(
        m=cfg['m'], n=cfg['n'], initial_generator='gaussian', initial_seed=seed,
        pair_source=PairDistribution.uniform(cfg['m']),
        subject_policy=SubjectPolicy.top_k(cfg['k']), max_steps=steps or cfg['steps'],
        seed=seed, snapshot_every=1000, convergence_tol=1e-12, convergence_window=1000
    ) for seed in seeds]
    results = []
    for seed, trace in zip(seeds, run_batch(configs, threads)):
        cert = topk_certificate(trace, cfg['tol'], cfg['min_count'])
        if not cert.applicable or cert.k_prime < 1:
            results.append(SeedResult(seed, False, float(cert.k_prime),
                                      "k' ({})".format(cert.diagnostic)))
            continue
        xbar0 = column_average(trace.initial_profile).averages
        error = abs(cert.top_value - float(xbar0[cert.aggregate_ranking[0]]))
        results.append(SeedResult(seed, error <= cfg['tol'], float(cert.k_prime),
                                  "k' (top value error {})".format(repr(error))))
    return results


def _hk_freeze(seeds: Sequence[int], threads: int, steps: int = None) -> List[SeedResult]:

    cfg = CONFIG['hk-freeze']
    steps = steps or cfg['steps']
    initial = OpinionProfile([[0.0], [1.0]])
    configs = [SimulationConfig.create(
        m=2, n=1, initial_profile=initial, pair_source=PairDistribution.point_mass(2, 0, 1),
        subject_policy=SubjectPolicy.hk(cfg['eps']), max_steps=steps, seed=seed,
        snapshot_every=1, convergence_mode='off'
    ) for seed in seeds]
    results = []
    for seed, trace in zip(seeds, run_batch(configs, threads)):
        changed = sum(1 for s in trace.snapshots.values() if s != initial)
        results.append(SeedResult(seed, changed == 0 and trace.stopped_at == steps,
                                  float(changed), 'changed snapshots'))
    return results


def _disconnected(seeds: Sequence[int], threads: int, steps: int = None) -> List[SeedResult]:

    cfg = CONFIG['disconnected']
    blocks = cfg['blocks']
    m = sum(len(b) for b in blocks)
    configs, oracles = [], []
    for seed in seeds:
        rng = np.random.Generator(np.random.PCG64(seed))
        initial = OpinionProfile(rng.standard_normal((m, cfg['n'])))
        configs.append(SimulationConfig.create(
            m=m, n=cfg['n'], initial_profile=initial, pair_source=PairSchedule.blocks(blocks),
            max_steps=steps or cfg['steps'], seed=seed, convergence_tol=1e-12
        ))
        for block in blocks:
            oracles.append(SimulationConfig.create(
                m=len(block), n=cfg['n'],
                initial_profile=OpinionProfile(initial.scores[list(block)]),
                pair_source=PairSchedule.round_robin(len(block)), max_steps=steps or cfg['steps'],
                seed=seed, convergence_tol=1e-12
            ))
    traces = run_batch(configs + oracles, threads)
    runs, oracle_traces = traces[:len(configs)], traces[len(configs):]
    results = []
    for idx, (seed, trace) in enumerate(zip(seeds, runs)):
        verification = verify_component_consensus(trace, cfg['tol'], cfg['min_count'])
        error = 0.0
        for b, block in enumerate(blocks):
            oracle = oracle_traces[idx * len(blocks) + b].final_profile.scores
            block_mean = column_average(trace.initial_profile.scores[list(block)]).averages
            final = trace.final_profile.scores[list(block)]
            error = max(error, float(np.max(np.abs(final - oracle))),
                        float(np.max(np.abs(final - block_mean))))
        n_comps = [len(verification.components(j)) for j in range(trace.n)]
        passed = verification.passed and error <= cfg['tol'] and \
            all(c == len(blocks) for c in n_comps)
        results.append(SeedResult(seed, passed, error, 'max block error, components {}'
                                  .format(n_comps)))
    return results


SUITES: Dict[str, Callable[..., List[SeedResult]]] = {
    'conservation': _conservation,
    'gossip-consensus': _gossip_consensus,
    'topk': _topk,
    'hk-freeze': _hk_freeze,
    'disconnected': _disconnected
}


def thread_cap(n_seeds: int) -> int:
    """
    Worker threads for a suite: os.cpu_count() unless VOTE_DIFFUSE_THREADS caps it,
    never more than the number of seeds
    """

    cap = os.cpu_count() or 1
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            logger.warning('Ignoring {}={}: not an integer'.format(THREADS_ENV, env))
    return max(1, min(cap, n_seeds))


def run_suite(name: str, seeds: Sequence[int], threads: int = None,
              steps: int = None) -> SuiteResult:
    """
    Runs an acceptance suite over the given seeds

    Args:
        name (str): one of `SUITES`
        seeds (Sequence[int]): distinct non-negative seeds
        threads (int, optional): worker threads; default = `thread_cap(len(seeds))`
        steps (int, optional): overrides the suite's step budget

    Returns:
        SuiteResult
    """

    if name not in SUITES:
        raise UnknownSuiteError('Unknown suite `{}`, expected one of {}'
                                .format(name, sorted(SUITES)))
    seeds = list(seeds)
    if threads is None:
        threads = thread_cap(len(seeds))
    logger.info('Running suite {} over {} seeds ({} threads)'.format(name, len(seeds), threads))
    result = SuiteResult(name, SUITES[name](seeds, threads, steps))
    logger.info('Suite {}: {}'.format(name, 'PASS' if result.passed else 'FAIL'))
    return result
