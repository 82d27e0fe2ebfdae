r"""
Opinion state of the society and the pairwise averaging update

Agents and candidates are 0-based everywhere inside the package; conversion to
the 1-based numbering users see happens in `votediffuse.files` and the CLI only.
"""

from typing import Iterable, List, Tuple, Union
from dataclasses import dataclass
import numpy as np

from .errors import DimensionError, ParameterError


class OpinionProfile(object):

    __slots__ = ('_scores',)

    def __init__(self, scores: Iterable[Iterable[float]]):
        """
        OpinionProfile: immutable m x n matrix of opinion scores, rows are agents,
        columns are candidates

        Args:
            scores (Iterable[Iterable[float]]): score matrix of shape (m, n), m >= 2,
                n >= 1, all entries finite
        """

        arr = np.array(scores, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ParameterError('Opinion profile must be a 2-D matrix, got {} dimension(s)'
                                 .format(arr.ndim))
        if arr.shape[0] < 2:
            raise ParameterError('Opinion profile needs at least 2 agents, got {}'
                                 .format(arr.shape[0]))
        if arr.shape[1] < 1:
            raise ParameterError('Opinion profile needs at least 1 candidate')
        if not np.all(np.isfinite(arr)):
            raise ParameterError('Opinion profile entries must be finite')
        arr.setflags(write=False)
        self._scores = arr

    @property
    def scores(self) -> np.ndarray:
        """
        np.ndarray: read-only (m, n) float64 view of the scores
        """

        return self._scores

    @property
    def agents(self) -> int:

        return self._scores.shape[0]

    @property
    def candidates(self) -> int:

        return self._scores.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:

        return self._scores.shape

    def row(self, i: int) -> np.ndarray:

        return self._scores[i]

    def column(self, j: int) -> np.ndarray:

        return self._scores[:, j]

    def to_list(self) -> List[List[float]]:

        return self._scores.tolist()

    def copy_scores(self) -> np.ndarray:
        """
        Returns:
            np.ndarray: writable copy of the scores, for in-place stepping
        """

        return np.array(self._scores, copy=True)

    def __eq__(self, other) -> bool:

        if not isinstance(other, OpinionProfile):
            return NotImplemented
        return np.array_equal(self._scores, other._scores)

    def __hash__(self):

        return hash((self._scores.shape, self._scores.tobytes()))

    def __repr__(self) -> str:

        return 'OpinionProfile({})'.format(self.to_list())


@dataclass(frozen=True, order=True)
class PairEvent:
    """
    Unordered communicating pair {a, b}; stored canonically with a < b
    """

    a: int
    b: int

    def __post_init__(self):

        a, b = int(self.a), int(self.b)
        if a == b:
            raise ParameterError('Communicating pair needs two distinct agents, got {} twice'
                                 .format(a + 1))
        if a < 0 or b < 0:
            raise DimensionError('Agent indices must be non-negative, got ({}, {})'.format(a, b))
        if a > b:
            a, b = b, a
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)

    def validate(self, m: int):
        """
        Raises DimensionError unless both agents lie in [0, m)
        """

        if self.b >= m:
            raise DimensionError('Agent {} out of range for {} agents'.format(self.b + 1, m))

    def one_based(self) -> Tuple[int, int]:

        return (self.a + 1, self.b + 1)


class SubjectSet(frozenset):
    """
    Set S(t) of candidate indices discussed at one step; may be empty
    """

    def __new__(cls, members: Iterable[int] = ()):

        members = [int(j) for j in members]
        for j in members:
            if j < 0:
                raise DimensionError('Candidate indices must be non-negative, got {}'.format(j))
        return super(SubjectSet, cls).__new__(cls, members)

    @classmethod
    def full(cls, n: int) -> 'SubjectSet':

        return cls(range(n))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> 'SubjectSet':

        return cls(np.flatnonzero(mask))

    def validate(self, n: int):
        """
        Raises DimensionError unless every member lies in [0, n)
        """

        for j in self:
            if j >= n:
                raise DimensionError('Candidate {} out of range for {} candidates'
                                     .format(j + 1, n))

    def columns(self) -> np.ndarray:
        """
        Returns:
            np.ndarray: members as a sorted index array
        """

        return np.array(sorted(self), dtype=np.intp)

    def one_based(self) -> List[int]:

        return [j + 1 for j in sorted(self)]

    def __repr__(self) -> str:

        return 'SubjectSet({})'.format(sorted(self))


@dataclass(frozen=True)
class AggregateProfile:
    """
    Per-candidate society mean X̄ = (1/m) eᵀX
    """

    averages: np.ndarray

    def __len__(self) -> int:

        return len(self.averages)

    def __getitem__(self, j: int) -> float:

        return float(self.averages[j])


def _as_scores(X: Union[OpinionProfile, np.ndarray]) -> np.ndarray:

    if isinstance(X, OpinionProfile):
        return X.scores
    return np.asarray(X, dtype=np.float64)


def midpoint_inplace(scores: np.ndarray, a: int, b: int, cols: Union[np.ndarray, slice]):
    """
    Moves rows a and b of `scores` to their midpoint on `cols` (an index array,
    a boolean mask or a slice)
    """

    mid = (scores[a, cols] + scores[b, cols]) / 2
    scores[a, cols] = mid
    scores[b, cols] = mid


def apply_step_inplace(scores: np.ndarray, pair: PairEvent, subjects: SubjectSet):
    """
    In-place form of `apply_step` on a writable float64 array; indices are assumed
    valid (the engine validates its sources once, not per step)

    Args:
        scores (np.ndarray): (m, n) writable score matrix
        pair (PairEvent): communicating pair
        subjects (SubjectSet): candidates the pair discusses
    """

    if not subjects:
        return
    midpoint_inplace(scores, pair.a, pair.b, subjects.columns())


def apply_step(X: OpinionProfile, pair: PairEvent, subjects: SubjectSet) -> OpinionProfile:
    """
    One step of the voting diffusion dynamics: agents `pair.a` and `pair.b` move to
    the midpoint of their scores on every candidate in `subjects`; all other entries
    are unchanged

    Args:
        X (OpinionProfile): current profile
        pair (PairEvent): communicating pair
        subjects (SubjectSet): candidates discussed

    Returns:
        OpinionProfile: the next profile
    """

    pair.validate(X.agents)
    subjects.validate(X.candidates)
    scores = X.copy_scores()
    apply_step_inplace(scores, pair, subjects)
    return OpinionProfile(scores)


def column_average(X: Union[OpinionProfile, np.ndarray]) -> AggregateProfile:
    """
    Society mean score per candidate, summed in ascending agent order

    Args:
        X (OpinionProfile): profile

    Returns:
        AggregateProfile: per-candidate means
    """

    scores = _as_scores(X)
    total = np.zeros(scores.shape[1], dtype=np.float64)
    for row in scores:
        total += row
    averages = total / scores.shape[0]
    averages.setflags(write=False)
    return AggregateProfile(averages)


def borda_ranking(xbar: Union[AggregateProfile, np.ndarray]) -> np.ndarray:
    """
    Aggregate ranking: candidates by non-increasing average score, ties broken by
    ascending candidate index

    Args:
        xbar (AggregateProfile): aggregate profile

    Returns:
        np.ndarray: permutation σ (0-based), σ[0] is the top candidate
    """

    averages = xbar.averages if isinstance(xbar, AggregateProfile) else np.asarray(xbar)
    return np.argsort(-averages, kind='stable')


def top_k_set(v: Iterable[float], k: int) -> SubjectSet:
    """
    Threshold top-k set T_k(v) = {j : v_j >= v_σ(k)}; ties at the threshold are all
    kept, so the result can hold more than k candidates

    Args:
        v (Iterable[float]): finite score vector of length n
        k (int): 1 <= k <= n

    Returns:
        SubjectSet: T_k(v)
    """

    v = np.asarray(v, dtype=np.float64)
    if not 1 <= k <= len(v):
        raise ParameterError('k must be in [1, {}], got {}'.format(len(v), k))
    threshold = np.partition(v, len(v) - k)[len(v) - k]
    return SubjectSet(np.flatnonzero(v >= threshold))


def mixing_matrix(pair: PairEvent, subjects: SubjectSet, j: int, m: int) -> np.ndarray:
    """
    Column-j mixing matrix W = I - 1[j in S] (1/2)(e_a - e_b)(e_a - e_b)ᵀ; diagnostic
    only, `apply_step` agrees with W @ X[:, j] on every column

    Args:
        pair (PairEvent): communicating pair
        subjects (SubjectSet): discussed candidates
        j (int): candidate whose column the matrix acts on
        m (int): number of agents

    Returns:
        np.ndarray: (m, m) doubly stochastic matrix
    """

    pair.validate(m)
    if j < 0:
        raise DimensionError('Candidate index must be non-negative, got {}'.format(j))
    W = np.eye(m)
    if j in subjects:
        d = np.zeros(m)
        d[pair.a] = 1.0
        d[pair.b] = -1.0
        W -= 0.5 * np.outer(d, d)
    return W


def is_doubly_stochastic(W: np.ndarray, min_diagonal: float = 0.0) -> bool:
    """
    Exact check: non-negative entries, every row and column sum equal to 1, and
    diagonal entries >= `min_diagonal`

    Args:
        W (np.ndarray): square matrix
        min_diagonal (float, optional): lower bound on W_ii; default = 0.0

    Returns:
        bool
    """

    W = np.asarray(W)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        return False
    return bool(
        np.all(W >= 0.0)
        and np.all(W.sum(axis=0) == 1.0)
        and np.all(W.sum(axis=1) == 1.0)
        and np.all(np.diag(W) >= min_diagonal)
    )


def envelope(X: Union[OpinionProfile, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-column opinion envelope

    Returns:
        tuple[np.ndarray, np.ndarray]: (column maxima, column minima)
    """

    scores = _as_scores(X)
    return (scores.max(axis=0), scores.min(axis=0))
