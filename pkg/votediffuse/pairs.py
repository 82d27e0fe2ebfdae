r"""
Communicating pair processes: i.i.d. gossip over a pair distribution, scripted
(finite or cyclic) schedules and user callbacks that may look at the current state
"""

from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union
from dataclasses import dataclass
import logging
import numpy as np

from .errors import ParameterError, ScheduleExhaustedError
from .graphs import AgentGraph
from .profile import PairEvent

logger = logging.getLogger(__name__)

_SUM_TOL = 1e-12
_PREFETCH = 4096


class PairDistribution(object):

    def __init__(self, weights: Iterable[Iterable[float]]):
        """
        PairDistribution: per-step selection probabilities of agent pairs; the
        unordered pair {i, j} is drawn with probability weights[i][j] + weights[j][i]

        Args:
            weights (Iterable[Iterable[float]]): (m, m) non-negative matrix with zero
                diagonal whose entries sum to 1 (within 1e-12) or are all zero
        """

        w = np.array(weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ParameterError('Pair weights must be a square matrix, got shape {}'
                                 .format(w.shape))
        if w.shape[0] < 2:
            raise ParameterError('Pair weights need at least 2 agents')
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ParameterError('Pair weights must be finite and non-negative')
        if np.any(np.diag(w) != 0.0):
            raise ParameterError('Pair weights must have a zero diagonal')
        total = w.sum()
        if total != 0.0 and abs(total - 1.0) > _SUM_TOL:
            raise ParameterError('Pair weights must sum to 1, got {}'.format(total))
        w.setflags(write=False)
        self._weights = w
        self._pairs, self._probs = self._collapse(w)

    @staticmethod
    def _collapse(w: np.ndarray) -> Tuple[List[PairEvent], np.ndarray]:

        iu, ju = np.triu_indices(w.shape[0], k=1)
        pairs = [PairEvent(int(i), int(j)) for i, j in zip(iu, ju)]
        probs = w[iu, ju] + w[ju, iu]
        return (pairs, probs)

    @classmethod
    def uniform(cls, m: int) -> 'PairDistribution':
        """
        Uniform over all m(m-1)/2 pairs, i.e. gossip on the complete graph
        """

        w = np.full((m, m), 1.0 / (m * (m - 1)))
        np.fill_diagonal(w, 0.0)
        return cls(w)

    @classmethod
    def point_mass(cls, m: int, i: int, j: int) -> 'PairDistribution':
        """
        Always selects the pair {i, j} (0-based)
        """

        pair = PairEvent(i, j)
        pair.validate(m)
        w = np.zeros((m, m))
        w[pair.a, pair.b] = 0.5
        w[pair.b, pair.a] = 0.5
        return cls(w)

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[PairEvent]) -> 'PairDistribution':
        """
        Uniform over the supplied edge set
        """

        edges = sorted(set(edges))
        if not edges:
            raise ParameterError('Edge set must not be empty')
        w = np.zeros((m, m))
        for e in edges:
            e.validate(m)
            w[e.a, e.b] = w[e.b, e.a] = 0.5 / len(edges)
        return cls(w)

    @property
    def m(self) -> int:

        return self._weights.shape[0]

    @property
    def weights(self) -> np.ndarray:

        return self._weights

    def pair_probabilities(self) -> Tuple[List[PairEvent], np.ndarray]:
        """
        Returns:
            tuple[list[PairEvent], np.ndarray]: every unordered pair (i < j) and its
                selection probability
        """

        return (list(self._pairs), self._probs.copy())

    def support(self) -> List[PairEvent]:

        return [p for p, pr in zip(self._pairs, self._probs) if pr > 0.0]

    def _checked_probs(self) -> np.ndarray:

        total = self._probs.sum()
        if total == 0.0:
            raise ParameterError('Cannot sample from an all-zero pair distribution')
        return self._probs / total


@dataclass(frozen=True)
class PairSchedule:
    """
    Deterministic pair script; `cyclic` schedules repeat with period len(events)
    """

    events: Tuple[PairEvent, ...]
    cyclic: bool = False

    def __post_init__(self):

        object.__setattr__(self, 'events', tuple(self.events))
        if self.cyclic and len(self.events) == 0:
            raise ParameterError('Cyclic schedules need period >= 1')

    def __len__(self) -> int:

        return len(self.events)

    def validate(self, m: int):

        for e in self.events:
            e.validate(m)

    @classmethod
    def round_robin(cls, m: int) -> 'PairSchedule':
        """
        Cyclic sweep over all pairs, nearest indices first: every (i, i + d) for
        d = 1, ..., m - 1; for m = 3 the cycle is {1,2}, {2,3}, {1,3} (1-based)
        """

        events = [PairEvent(i, i + d) for d in range(1, m) for i in range(m - d)]
        return cls(tuple(events), cyclic=True)

    @classmethod
    def path_sweep(cls, m: int, burst: int = 1) -> 'PairSchedule':
        """
        Cyclic forward-then-backward sweep along the path 1-2-...-m, each pair
        repeated `burst` times in a row; information crosses the society slowly,
        which makes it the worst-case scripted source of the verification suites
        """

        if burst < 1:
            raise ParameterError('burst must be >= 1, got {}'.format(burst))
        forward = [PairEvent(i, i + 1) for i in range(m - 1)]
        sweep = forward + forward[::-1]
        return cls(tuple(e for e in sweep for _ in range(burst)), cyclic=True)

    @classmethod
    def blocks(cls, blocks: Sequence[Sequence[int]]) -> 'PairSchedule':
        """
        Cyclic round-robin inside each block of agents, never across blocks
        """

        events = []
        for block in blocks:
            block = sorted(block)
            events.extend(PairEvent(block[i], block[i + d])
                          for d in range(1, len(block)) for i in range(len(block) - d))
        return cls(tuple(events), cyclic=True)


def sample_iid(dist: PairDistribution, rng: np.random.Generator) -> PairEvent:
    """
    Draws one pair from `dist`

    Args:
        dist (PairDistribution): pair probabilities
        rng (np.random.Generator): seeded generator, advanced by the draw

    Returns:
        PairEvent: the sampled pair
    """

    probs = dist._checked_probs()
    return dist._pairs[int(rng.choice(len(probs), p=probs))]


def next_scripted(schedule: PairSchedule, t: int) -> PairEvent:
    """
    Pair of a scripted schedule at step `t`

    Args:
        schedule (PairSchedule): script
        t (int): step index, t >= 0

    Returns:
        PairEvent: events[t mod period] when cyclic, events[t] otherwise
    """

    if t < 0:
        raise ParameterError('Step index must be non-negative, got {}'.format(t))
    if schedule.cyclic:
        return schedule.events[t % len(schedule.events)]
    if t >= len(schedule.events):
        raise ScheduleExhaustedError('Finite schedule of length {} has no step {}'
                                     .format(len(schedule.events), t))
    return schedule.events[t]


class PairSource(object):
    """
    Base pair source: single-consumer, stateful, one per simulation run
    """

    def next_pair(self, t: int, scores: np.ndarray) -> PairEvent:
        raise NotImplementedError

    def connectivity(self, m: int = None) -> AgentGraph:
        raise NotImplementedError

    def describe(self) -> Dict[str, str]:
        return {}


class IIDPairSource(PairSource):

    def __init__(self, dist: PairDistribution, rng: np.random.Generator,
                 prefetch: int = _PREFETCH):
        """
        I.i.d. gossip source; draws are taken from `rng` in blocks of `prefetch`,
        so the sequence is fixed by the seed and the block size

        Args:
            dist (PairDistribution): pair probabilities
            rng (np.random.Generator): dedicated generator for this source
            prefetch (int, optional): draws per block; default = 4096
        """

        self.dist = dist
        self.rng = rng
        self._probs = dist._checked_probs()
        self.prefetch = prefetch
        self._buffer = np.empty(0, dtype=np.intp)
        self._pos = 0

    def next_pair(self, t: int, scores: np.ndarray) -> PairEvent:

        if self._pos >= len(self._buffer):
            self._buffer = self.rng.choice(len(self._probs), size=self.prefetch,
                                           p=self._probs)
            self._pos = 0
        pair = self.dist._pairs[self._buffer[self._pos]]
        self._pos += 1
        return pair

    def connectivity(self, m: int = None) -> AgentGraph:

        return connectivity_graph(self.dist)

    def describe(self) -> Dict[str, str]:

        return {'pairs.kind': 'iid', 'pairs.support': _edges_str(self.dist.support())}


class ScriptedPairSource(PairSource):

    def __init__(self, schedule: PairSchedule):
        """
        Replays a PairSchedule; raises ScheduleExhaustedError past the end of a
        finite script
        """

        self.schedule = schedule

    def next_pair(self, t: int, scores: np.ndarray) -> PairEvent:

        return next_scripted(self.schedule, t)

    def connectivity(self, m: int = None) -> AgentGraph:

        return connectivity_graph(self.schedule, m)

    def describe(self) -> Dict[str, str]:

        return {
            'pairs.kind': 'cyclic' if self.schedule.cyclic else 'finite',
            'pairs.period': str(len(self.schedule))
        }


class CallbackPairSource(PairSource):

    def __init__(self, fn: Callable[[int, np.ndarray], Union[PairEvent, Tuple[int, int]]],
                 graph: Optional[AgentGraph] = None):
        """
        State-dependent (adapted) source: `fn(t, scores)` returns the pair for step
        t given the current read-only scores

        Args:
            fn (callable): pair policy, returns a PairEvent or a 0-based (i, j) tuple
            graph (AgentGraph, optional): connectivity graph of the policy; the
                package cannot derive it, so analyses needing it require this
        """

        self.fn = fn
        self.graph = graph

    def next_pair(self, t: int, scores: np.ndarray) -> PairEvent:

        view = scores.view()
        view.setflags(write=False)
        pair = self.fn(t, view)
        if not isinstance(pair, PairEvent):
            pair = PairEvent(*pair)
        pair.validate(scores.shape[0])
        return pair

    def connectivity(self, m: int = None) -> AgentGraph:

        if self.graph is None:
            raise ParameterError('Callback pair sources need a user-supplied connectivity graph')
        return self.graph

    def describe(self) -> Dict[str, str]:

        return {'pairs.kind': 'callback'}


def connectivity_graph(source: Union[PairDistribution, PairSchedule, PairSource],
                       m: int = None) -> AgentGraph:
    """
    Graph of pairs that communicate infinitely often: the positive-probability
    support of a distribution, the pairs of one cycle of a cyclic schedule, or, for
    a finite schedule, every pair that occurs at all (flagged `finite_horizon`)

    Args:
        source (PairDistribution | PairSchedule | PairSource): pair process
        m (int, optional): number of agents for schedules; inferred from the
            largest scheduled agent when omitted

    Returns:
        AgentGraph: counts are occurrences per cycle (schedules) or 1 (support)
    """

    if isinstance(source, PairSource):
        return source.connectivity(m)
    if isinstance(source, PairDistribution):
        return AgentGraph.from_edges(source.m, source.support())
    counts = {}
    for e in source.events:
        counts[e] = counts.get(e, 0) + 1
    if m is None:
        m = max((e.b for e in source.events), default=1) + 1
    if not source.cyclic:
        logger.warning('Connectivity of a finite schedule: "infinitely often" is not '
                       'meaningful, using pairs that occur at least once')
    return AgentGraph(m, counts, finite_horizon=not source.cyclic)


def make_pair_source(source: Union[PairDistribution, PairSchedule, PairSource, Callable],
                     rng: np.random.Generator) -> PairSource:
    """
    Builds a fresh PairSource for one run; i.i.d. draws always come from `rng`,
    never from a generator or prefetch buffer left over in a configured source

    Args:
        source: configured pair process
        rng (np.random.Generator): the run's pair stream

    Returns:
        PairSource: owned by a single run
    """

    if isinstance(source, IIDPairSource):
        return IIDPairSource(source.dist, rng, source.prefetch)
    if isinstance(source, ScriptedPairSource):
        return ScriptedPairSource(source.schedule)
    if isinstance(source, CallbackPairSource):
        return CallbackPairSource(source.fn, source.graph)
    if isinstance(source, PairSource):
        return source
    if isinstance(source, PairDistribution):
        return IIDPairSource(source, rng)
    if isinstance(source, PairSchedule):
        return ScriptedPairSource(source)
    if callable(source):
        return CallbackPairSource(source)
    raise ParameterError('Unknown pair source: {}'.format(type(source).__name__))


def _edges_str(edges: Iterable[PairEvent]) -> str:

    return ','.join('{}-{}'.format(*e.one_based()) for e in edges)
