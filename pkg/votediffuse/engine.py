r"""
Step loop of the voting diffusion dynamics: X(t) -> X(t + 1), trace recording,
numerical convergence detection and replay

Developed for desk-scale verification of pairwise opinion averaging
"""

from typing import Any, Dict, Iterator, List, Literal, Optional, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from re import compile
import logging
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .callbacks import CallbackOperator, Callback, ConvergenceMonitor, ProgressLogger,\
    SnapshotRecorder, has_converged
from .errors import ConfigError, CorruptTraceError, ParameterError, ScheduleExhaustedError,\
    VoteDiffuseError
from .graphs import connected_components
from .pairs import IIDPairSource, PairDistribution, PairSchedule, PairSource, _edges_str,\
    make_pair_source
from .profile import OpinionProfile, PairEvent, SubjectSet, midpoint_inplace
from .subjects import SubjectPolicy

logger = logging.getLogger(__name__)

_TRACE_FN = compile(r'.*\.(trace|npz)$')
_CHUNK = 65536

CONVERGED = 'converged'
MAX_STEPS = 'max_steps'
EXHAUSTED = 'exhausted'
HALTED = 'halted'
STOP_REASONS = (CONVERGED, MAX_STEPS, EXHAUSTED, HALTED)


def generate_initial_profile(m: int, n: int, generator: str, seed: int) -> OpinionProfile:
    """
    Random initial profile, seeded independently of the dynamics so one X(0) can be
    reused across policies

    Args:
        m (int): agents
        n (int): candidates
        generator (str): 'uniform' (on [0, 1)) or 'gaussian' (standard normal)
        seed (int): seed of a dedicated PCG64 generator

    Returns:
        OpinionProfile
    """

    rng = np.random.Generator(np.random.PCG64(seed))
    if generator == 'uniform':
        return OpinionProfile(rng.random((m, n)))
    if generator == 'gaussian':
        return OpinionProfile(rng.standard_normal((m, n)))
    raise ParameterError('Unknown initial-profile generator: {}'.format(generator))


class SimulationConfig(BaseModel):
    """
    Everything a run depends on; a run is fully determined by this object
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: int = Field(ge=2)
    n: int = Field(ge=1)
    initial_profile: Optional[OpinionProfile] = None
    initial_generator: Optional[Literal['uniform', 'gaussian']] = None
    initial_seed: int = Field(0, ge=0, lt=2 ** 64)
    pair_source: Any = None
    subject_policy: Any = Field(default_factory=SubjectPolicy.full)
    max_steps: int = Field(ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    snapshot_every: int = Field(1000, ge=1)
    convergence_tol: float = Field(1e-12, gt=0.0)
    convergence_window: int = Field(1000, ge=1)
    convergence_mode: Optional[Literal['consensus', 'quiescence', 'off']] = None

    @model_validator(mode='after')
    def _check_dimensions(self) -> 'SimulationConfig':

        if self.initial_profile is None and self.initial_generator is None:
            raise ValueError('either initial_profile or initial_generator is required')
        if self.initial_profile is not None and \
                self.initial_profile.shape != (self.m, self.n):
            raise ValueError('initial_profile has shape {}, expected ({}, {})'.format(
                self.initial_profile.shape, self.m, self.n))
        source = self.pair_source
        if source is None:
            raise ValueError('pair_source is required')
        dist = source.dist if isinstance(source, IIDPairSource) else source
        if isinstance(dist, PairDistribution) and dist.m != self.m:
            raise ValueError('pair distribution covers {} agents, expected {}'
                             .format(dist.m, self.m))
        if isinstance(source, PairSchedule):
            source.validate(self.m)
        elif not isinstance(source, (PairDistribution, PairSource)) and not callable(source):
            raise ValueError('unsupported pair source {}'.format(type(source).__name__))
        if not isinstance(self.subject_policy, SubjectPolicy):
            raise ValueError('subject_policy must be a SubjectPolicy')
        self.subject_policy.validate(self.n)
        return self

    @classmethod
    def create(cls, **kwargs) -> 'SimulationConfig':
        """
        Builds a config, reporting the first violation as a ConfigError naming the field
        """

        try:
            return cls(**kwargs)
        except ValidationError as exc:
            err = exc.errors()[0]
            name = '.'.join(str(x) for x in err['loc']) or 'config'
            raise ConfigError(name, err['msg'].replace('Value error, ', ''))
        except VoteDiffuseError as exc:
            raise ConfigError('config', str(exc))

    @property
    def effective_convergence_mode(self) -> str:

        return self.convergence_mode or self.subject_policy.default_convergence_mode

    def resolve_initial_profile(self) -> OpinionProfile:

        if self.initial_profile is not None:
            return self.initial_profile
        return generate_initial_profile(self.m, self.n, self.initial_generator,
                                        self.initial_seed)

    def echo(self) -> Dict[str, str]:
        """
        Flat key=value description stored in trace headers

        Returns:
            dict[str, str]
        """

        desc = {
            'm': str(self.m),
            'n': str(self.n),
            'seed': str(self.seed),
            'max_steps': str(self.max_steps),
            'snapshot_every': str(self.snapshot_every),
            'convergence_tol': repr(float(self.convergence_tol)),
            'convergence_window': str(self.convergence_window),
            'convergence_mode': self.effective_convergence_mode,
        }
        if self.initial_profile is not None:
            desc['initial.kind'] = 'explicit'
        else:
            desc['initial.kind'] = self.initial_generator
            desc['initial.seed'] = str(self.initial_seed)
        source = self.pair_source
        if isinstance(source, PairSource):
            desc.update(source.describe())
        elif isinstance(source, PairDistribution):
            desc['pairs.kind'] = 'iid'
            desc['pairs.support'] = _edges_str(source.support())
        elif isinstance(source, PairSchedule):
            desc['pairs.kind'] = 'cyclic' if source.cyclic else 'finite'
            desc['pairs.period'] = str(len(source))
        else:
            desc['pairs.kind'] = 'callback'
        desc.update(self.subject_policy.describe())
        return desc


@dataclass(frozen=True)
class StepRecord:
    """
    One recorded step: time, pair, discussed candidates
    """

    t: int
    pair: PairEvent
    subjects: SubjectSet


@dataclass(frozen=True)
class Trace:
    """
    Record of a run: config echo, dense event log (pairs and subject masks),
    periodic snapshots and the final profile; immutable once returned by `run`
    """

    config: Dict[str, str]
    initial_profile: OpinionProfile
    pairs: np.ndarray
    subject_mask: np.ndarray
    snapshots: Dict[int, OpinionProfile]
    final_profile: OpinionProfile
    stopped_at: int
    stop_reason: str

    @property
    def m(self) -> int:

        return self.initial_profile.agents

    @property
    def n(self) -> int:

        return self.initial_profile.candidates

    @property
    def subject_kind(self) -> str:

        return self.config.get('subjects.kind', 'full')

    def __len__(self) -> int:

        return len(self.pairs)

    def event(self, t: int) -> StepRecord:

        a, b = self.pairs[t]
        return StepRecord(t, PairEvent(int(a), int(b)), SubjectSet.from_mask(self.subject_mask[t]))

    def iter_events(self) -> Iterator[StepRecord]:

        for t in range(len(self.pairs)):
            yield self.event(t)

    @property
    def events(self) -> List[StepRecord]:

        return list(self.iter_events())

    def save(self, trace_filename: str):
        """
        Saves the trace: `.trace` for the line-delimited text format, `.npz` for the
        compact binary variant

        Args:
            trace_filename (str): filename/path to save the trace
        """

        if _TRACE_FN.match(trace_filename) is None:
            raise ValueError('Traces must be saved with a `.trace` or `.npz` extension')
        from .files.trace_io import write_trace, write_trace_npz
        if trace_filename.endswith('.npz'):
            write_trace_npz(self, trace_filename)
        else:
            write_trace(self, trace_filename)


def _grow(buffer: np.ndarray, rows: int) -> np.ndarray:

    grown = np.zeros((rows,) + buffer.shape[1:], dtype=buffer.dtype)
    grown[:len(buffer)] = buffer
    return grown


def _convergence_components(config: SimulationConfig, source: PairSource,
                            mode: str) -> Optional[List[Sequence[int]]]:

    if mode == 'quiescence':
        return [(i,) for i in range(config.m)]
    try:
        graph = source.connectivity(config.m)
    except ParameterError:
        logger.warning('No connectivity graph for this pair source; convergence spread is '
                       'checked across all agents')
        return None
    return connected_components(graph)


def run(config: SimulationConfig, callbacks: Sequence[Callback] = (),
        verbose: int = 0) -> Trace:
    """
    run: iterates draw pair -> compute subjects -> average, recording every event;
    stops after `max_steps`, when the convergence monitor fires, when a finite
    script is exhausted, or when a user callback halts the run

    Args:
        config (SimulationConfig): validated configuration
        callbacks (Sequence[Callback], optional): extra step-loop hooks
        verbose (int, optional): if > 0, logs progress every `this` steps; default = 0

    Returns:
        Trace: full record of the run
    """

    rng_pairs, rng_subjects = [np.random.Generator(np.random.PCG64(s))
                               for s in np.random.SeedSequence(config.seed).spawn(2)]
    source = make_pair_source(config.pair_source, rng_pairs)
    select = config.subject_policy.mask_selector(config.n, rng_subjects)
    initial = config.resolve_initial_profile()
    scores = initial.copy_scores()
    capacity = min(config.max_steps, _CHUNK)
    pairs = np.empty((capacity, 2), dtype=np.int32)
    mask = np.zeros((capacity, config.n), dtype=bool)
    all_columns = slice(None)

    # Set up callbacks
    CBO = CallbackOperator()
    recorder = SnapshotRecorder(config.snapshot_every)
    CBO.add_cb(recorder)
    monitor = None
    mode = config.effective_convergence_mode
    if mode != 'off':
        monitor = ConvergenceMonitor(config.convergence_tol, config.convergence_window,
                                     _convergence_components(config, source, mode))
        CBO.add_cb(monitor)
    for cb in callbacks:
        CBO.add_cb(cb)
    if verbose:
        CBO.add_cb(ProgressLogger(verbose))

    stop_reason = MAX_STEPS
    steps = 0
    # RUN BEGIN
    CBO.on_run_begin(scores)
    while steps < config.max_steps:

        # STEP BEGIN
        if not CBO.on_step_begin(steps):
            stop_reason = HALTED
            break

        try:
            pair = source.next_pair(steps, scores)
            a, b = pair.a, pair.b
            cols = all_columns if select is None else select(scores, a, b, steps)
        except ScheduleExhaustedError as exc:
            logger.info('Stopping at step {}: {}'.format(steps, exc))
            stop_reason = EXHAUSTED
            break
        if steps == capacity:
            capacity = min(config.max_steps, 2 * capacity)
            pairs = _grow(pairs, capacity)
            mask = _grow(mask, capacity)
        midpoint_inplace(scores, a, b, cols)
        pairs[steps, 0] = a
        pairs[steps, 1] = b
        mask[steps] = True if select is None else cols
        steps += 1

        # STEP END
        if not CBO.on_step_end(steps - 1, scores):
            stop_reason = CONVERGED if monitor is not None and monitor.converged else HALTED
            break

    # RUN END
    CBO.on_run_end(scores)
    final = OpinionProfile(scores)
    snapshots = dict(recorder.snapshots)
    snapshots[steps] = final
    logger.debug('Run finished after {} steps ({})'.format(steps, stop_reason))
    return Trace(
        config=config.echo(),
        initial_profile=initial,
        pairs=pairs[:steps].copy(),
        subject_mask=mask[:steps].copy(),
        snapshots=snapshots,
        final_profile=final,
        stopped_at=steps,
        stop_reason=stop_reason
    )


def replay(trace: Trace) -> OpinionProfile:
    """
    Re-applies every recorded event to the trace's initial profile; the result equals
    `trace.final_profile` bit for bit

    Args:
        trace (Trace): recorded run

    Returns:
        OpinionProfile: replayed final profile
    """

    m, n = trace.initial_profile.shape
    if trace.subject_mask.ndim != 2 or len(trace.subject_mask) != len(trace.pairs) or \
            (len(trace.pairs) and trace.subject_mask.shape[1] != n):
        raise CorruptTraceError('Subject masks do not match {} events over {} candidates'
                                .format(len(trace.pairs), n))
    scores = trace.initial_profile.copy_scores()
    for t in range(len(trace.pairs)):
        a, b = int(trace.pairs[t][0]), int(trace.pairs[t][1])
        if not 0 <= a < b < m:
            raise CorruptTraceError('Event {} pairs agents ({}, {}) outside [1, {}]'
                                    .format(t, a + 1, b + 1, m))
        midpoint_inplace(scores, a, b, trace.subject_mask[t])
    return OpinionProfile(scores)


def run_batch(configs: Sequence[SimulationConfig], threads: int = 1) -> List[Trace]:
    """
    Runs independent configurations, optionally across worker threads; results keep
    the order of `configs`

    Args:
        configs (Sequence[SimulationConfig]): one config per run
        threads (int, optional): worker threads; default = 1

    Returns:
        list[Trace]
    """

    if threads <= 1:
        return [run(c) for c in configs]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(run, configs))
