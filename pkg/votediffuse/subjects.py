r"""
Subject processes: which candidates the active pair discusses at a step

Four regimes are built in (every candidate, top-k selective, binomial selection,
bounded-confidence) plus scripted sequences fixed before the run.
"""

from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union
from dataclasses import dataclass
import logging
import numpy as np

from .errors import ParameterError, ScheduleExhaustedError
from .profile import OpinionProfile, PairEvent, SubjectSet, _as_scores, top_k_set

logger = logging.getLogger(__name__)

KINDS = ('full', 'top_k', 'binomial', 'hk', 'scripted')

MaskSelector = Callable[[np.ndarray, int, int, int], np.ndarray]


def full_subjects(n: int) -> SubjectSet:
    """
    Every candidate; for n = 1 this is the classical gossip model's {1}
    """

    if n < 1:
        raise ParameterError('n must be >= 1, got {}'.format(n))
    return SubjectSet.full(n)


def topk_subjects(X: Union[OpinionProfile, np.ndarray], pair: PairEvent, k: int) -> SubjectSet:
    """
    Top-k selective gossip: union of both agents' top-k sets T_k(X_a) ∪ T_k(X_b)

    Args:
        X (OpinionProfile): current profile
        pair (PairEvent): communicating pair
        k (int): 1 <= k <= n

    Returns:
        SubjectSet: at least k candidates
    """

    scores = _as_scores(X)
    return SubjectSet(top_k_set(scores[pair.a], k) | top_k_set(scores[pair.b], k))


def binomial_subjects(n: int, p: float, rng: np.random.Generator) -> SubjectSet:
    """
    Binomial selection: each candidate included independently with probability p

    Args:
        n (int): number of candidates
        p (float): inclusion probability in (0, 1]
        rng (np.random.Generator): seeded generator, advanced by n uniform draws

    Returns:
        SubjectSet: possibly empty when p < 1
    """

    if not 0.0 < p <= 1.0:
        raise ParameterError('p must be in (0,1]')
    return SubjectSet.from_mask(rng.random(n) < p)


def hk_subjects(X: Union[OpinionProfile, np.ndarray], pair: PairEvent, eps: float) -> SubjectSet:
    """
    Bounded-confidence selection: candidates on which the two agents are within
    `eps` of each other (inclusive)

    Args:
        X (OpinionProfile): current profile
        pair (PairEvent): communicating pair
        eps (float): confidence bound, >= 0

    Returns:
        SubjectSet: {j : |X_aj - X_bj| <= eps}
    """

    if not eps >= 0.0:
        raise ParameterError('eps must be >= 0, got {}'.format(eps))
    scores = _as_scores(X)
    return SubjectSet.from_mask(np.abs(scores[pair.a] - scores[pair.b]) <= eps)


def scripted_subjects(script: Sequence[SubjectSet], t: int, cyclic: bool = False) -> SubjectSet:
    """
    Subject set of a pre-generated sequence at step `t`
    """

    if cyclic and script:
        return script[t % len(script)]
    if t >= len(script):
        raise ScheduleExhaustedError('Subject script of length {} has no step {}'
                                     .format(len(script), t))
    return script[t]


@dataclass(frozen=True)
class SubjectPolicy:
    """
    Subject process selector; build with the `full`, `top_k`, `binomial`, `hk` and
    `scripted` constructors
    """

    kind: str = 'full'
    k: Optional[int] = None
    p: Optional[float] = None
    eps: Optional[float] = None
    script: Optional[Tuple[SubjectSet, ...]] = None
    cyclic: bool = False

    def __post_init__(self):

        if self.kind not in KINDS:
            raise ParameterError('Unknown subject policy `{}`, expected one of {}'
                                 .format(self.kind, KINDS))
        if self.kind == 'top_k' and (self.k is None or int(self.k) < 1):
            raise ParameterError('k must be >= 1, got {}'.format(self.k))
        if self.kind == 'binomial' and (self.p is None or not 0.0 < self.p <= 1.0):
            raise ParameterError('p must be in (0,1]')
        if self.kind == 'hk':
            if self.eps is None or not self.eps >= 0.0:
                raise ParameterError('eps must be >= 0, got {}'.format(self.eps))
            if self.eps == 0.0:
                logger.warning('eps = 0 only averages candidates the pair already agrees on '
                               'exactly; generic profiles stay frozen')
        if self.kind == 'scripted':
            if self.script is None:
                raise ParameterError('Scripted subject policies need a script')
            object.__setattr__(self, 'script', tuple(SubjectSet(s) for s in self.script))
            if self.cyclic and not self.script:
                raise ParameterError('Cyclic subject scripts need period >= 1')

    @classmethod
    def full(cls) -> 'SubjectPolicy':

        return cls('full')

    @classmethod
    def top_k(cls, k: int) -> 'SubjectPolicy':

        return cls('top_k', k=k)

    @classmethod
    def binomial(cls, p: float) -> 'SubjectPolicy':

        return cls('binomial', p=p)

    @classmethod
    def hk(cls, eps: float) -> 'SubjectPolicy':

        return cls('hk', eps=eps)

    @classmethod
    def scripted(cls, script: Iterable[Iterable[int]], cyclic: bool = False) -> 'SubjectPolicy':

        return cls('scripted', script=tuple(SubjectSet(s) for s in script), cyclic=cyclic)

    @property
    def default_convergence_mode(self) -> str:
        """
        str: 'consensus' where connected agents must agree in the limit,
            'quiescence' where disagreement may persist legitimately
        """

        return 'consensus' if self.kind in ('full', 'binomial') else 'quiescence'

    def validate(self, n: int):
        """
        Raises ParameterError/DimensionError when the policy does not fit n candidates
        """

        if self.kind == 'top_k' and not 1 <= self.k <= n:
            raise ParameterError('k must be in [1, {}], got {}'.format(n, self.k))
        if self.kind == 'scripted':
            for s in self.script:
                s.validate(n)

    def select(self, scores: np.ndarray, pair: PairEvent, t: int,
               rng: np.random.Generator) -> SubjectSet:
        """
        Subject set for step `t`

        Args:
            scores (np.ndarray): current (m, n) scores
            pair (PairEvent): the pair activated at step t
            t (int): step index
            rng (np.random.Generator): generator for randomized policies

        Returns:
            SubjectSet
        """

        if self.kind == 'full':
            return full_subjects(scores.shape[1])
        if self.kind == 'top_k':
            return topk_subjects(scores, pair, self.k)
        if self.kind == 'binomial':
            return binomial_subjects(scores.shape[1], self.p, rng)
        if self.kind == 'hk':
            return hk_subjects(scores, pair, self.eps)
        return scripted_subjects(self.script, t, self.cyclic)

    def mask_selector(self, n: int, rng: np.random.Generator) -> Optional[MaskSelector]:
        """
        Per-run selector over boolean column masks, `selector(scores, a, b, t)`; it
        draws from `rng` exactly as `select` does, so
        SubjectSet.from_mask(selector(scores, a, b, t)) == select(scores, pair, t, rng)

        Args:
            n (int): number of candidates
            rng (np.random.Generator): generator for randomized policies

        Returns:
            callable or None: None for the full policy, whose mask never changes
        """

        if self.kind == 'full':
            return None

        if self.kind == 'top_k':
            pos = n - self.k

            def select_top_k(scores: np.ndarray, a: int, b: int, t: int) -> np.ndarray:
                rows = scores[[a, b]]
                threshold = np.partition(rows, pos, axis=1)[:, pos]
                return (rows[0] >= threshold[0]) | (rows[1] >= threshold[1])

            return select_top_k

        if self.kind == 'binomial':
            p = self.p

            def select_binomial(scores: np.ndarray, a: int, b: int, t: int) -> np.ndarray:
                return rng.random(n) < p

            return select_binomial

        if self.kind == 'hk':
            eps = self.eps

            def select_hk(scores: np.ndarray, a: int, b: int, t: int) -> np.ndarray:
                return np.abs(scores[a] - scores[b]) <= eps

            return select_hk

        masks = np.zeros((len(self.script), n), dtype=bool)
        for idx, s in enumerate(self.script):
            masks[idx, s.columns()] = True
        masks.setflags(write=False)
        length, cyclic = len(masks), self.cyclic

        def select_scripted(scores: np.ndarray, a: int, b: int, t: int) -> np.ndarray:
            if cyclic and length:
                return masks[t % length]
            if t >= length:
                raise ScheduleExhaustedError('Subject script of length {} has no step {}'
                                             .format(length, t))
            return masks[t]

        return select_scripted

    def describe(self) -> Dict[str, str]:

        desc = {'subjects.kind': self.kind}
        if self.kind == 'top_k':
            desc['subjects.k'] = str(self.k)
        elif self.kind == 'binomial':
            desc['subjects.p'] = repr(float(self.p))
        elif self.kind == 'hk':
            desc['subjects.eps'] = repr(float(self.eps))
        elif self.kind == 'scripted':
            desc['subjects.length'] = str(len(self.script))
            desc['subjects.cyclic'] = str(self.cyclic).lower()
        return desc
