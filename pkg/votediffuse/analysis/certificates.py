r"""
Top-k' certification for top-k selective gossip traces: the depth of the initial
aggregate ranking on which the whole society ends up agreeing
"""

from typing import Dict, List, Optional
from dataclasses import dataclass, field
import logging
import numpy as np

from ..engine import Trace
from ..errors import PolicyMismatchError
from ..profile import PairEvent, SubjectSet, borda_ranking, column_average, top_k_set
from .consensus import consensus_report, pair_graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopKCertificate:
    """
    Result of `topk_certificate`

    Attributes:
        applicable (bool): False when the trace's pair graph is disconnected; all
            other fields are then left at their empty defaults
        k (int): k of the top-k policy that produced the trace
        k_prime (int): largest k' whose initial top-k' aggregate set reached
            society-wide consensus; 0 signals insufficient convergence
        alpha_hat (float): minimum final common value over society-wide consensual
            candidates, None when there are none
        consensual_candidates (SubjectSet): candidates with a single consensus class
        aggregate_ranking (np.ndarray): Borda ranking of the initial aggregate profile
        top_value (float): final common value of the top aggregate candidate
        diagnostic (str): reason for k' = 0 or non-applicability
        pair_discussion_sets (dict): per frequently-active pair, the candidates it
            discussed at least min_count times
        pair_alphas (dict): per pair, min final score of its first agent over the
            pair's discussion set
        alpha_spread (float): max - min of pair_alphas (0 when alpha does not depend
            on the pair)
        q_set (SubjectSet): {j : initial aggregate score of j >= alpha_hat - tol}
        above_alpha_discussed (bool): every consensual candidate valued above
            alpha_hat lies in every pair's discussion set
    """

    applicable: bool
    k: int
    k_prime: int = 0
    alpha_hat: Optional[float] = None
    consensual_candidates: SubjectSet = field(default_factory=SubjectSet)
    aggregate_ranking: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.intp))
    top_value: Optional[float] = None
    diagnostic: str = ''
    pair_discussion_sets: Dict[PairEvent, SubjectSet] = field(default_factory=dict)
    pair_alphas: Dict[PairEvent, float] = field(default_factory=dict)
    alpha_spread: Optional[float] = None
    q_set: SubjectSet = field(default_factory=SubjectSet)
    above_alpha_discussed: bool = False

    @property
    def top_k_prime(self) -> List[int]:
        """
        list[int]: the first k' candidates of the aggregate ranking
        """

        return [int(j) for j in self.aggregate_ranking[:self.k_prime]]


def pair_discussion_sets(trace: Trace, min_count: int = 10) -> Dict[PairEvent, SubjectSet]:
    """
    Per pair activated at least max(min_count, 1) times, the candidates it
    discussed at least max(min_count, 1) times

    Args:
        trace (Trace): recorded run
        min_count (int, optional): occurrence threshold; default = 10

    Returns:
        dict[PairEvent, SubjectSet]
    """

    threshold = max(min_count, 1)
    if len(trace) == 0:
        return {}
    m = trace.m
    codes = trace.pairs[:, 0].astype(np.int64) * m + trace.pairs[:, 1]
    uniq, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
    discussed = np.zeros((len(uniq), trace.n), dtype=np.int64)
    np.add.at(discussed, inverse.ravel(), trace.subject_mask.astype(np.int64))
    sets = {}
    for idx, code in enumerate(uniq):
        if counts[idx] >= threshold:
            pair = PairEvent(int(code // m), int(code % m))
            sets[pair] = SubjectSet.from_mask(discussed[idx] >= threshold)
    return sets


def topk_certificate(trace: Trace, tol: float = 1e-8, min_count: int = 10) -> TopKCertificate:
    """
    Certifies the depth k' of the initial aggregate ranking on which the society
    reached consensus under top-k selective gossip

    Args:
        trace (Trace): trace recorded under the top-k subject policy
        tol (float, optional): consensus tolerance; default = 1e-8
        min_count (int, optional): "infinitely often" threshold; default = 10

    Returns:
        TopKCertificate
    """

    if trace.subject_kind != 'top_k':
        raise PolicyMismatchError('Top-k certification needs a top_k trace, got `{}`'
                                  .format(trace.subject_kind))
    k = int(trace.config.get('subjects.k', 0))
    if not pair_graph(trace, min_count).is_connected():
        logger.warning('Pair graph is disconnected at min_count={}; top-k certificate not '
                       'applicable'.format(min_count))
        return TopKCertificate(applicable=False, k=k,
                               diagnostic='pair graph disconnected at min_count={}'
                               .format(min_count))

    xbar0 = column_average(trace.initial_profile).averages
    ranking = borda_ranking(xbar0)
    report = consensus_report(trace.final_profile, tol)
    society = report.society_candidates()
    values = {j: report.classes_for(j)[0].value for j in society}

    k_prime = 0
    for depth in range(1, trace.n + 1):
        if not top_k_set(xbar0, depth) <= set(society):
            break
        k_prime = depth

    diagnostic = ''
    top = int(ranking[0])
    if k_prime == 0:
        spread = float(np.ptp(trace.final_profile.column(top)))
        diagnostic = 'top aggregate candidate {} lacks consensus (spread {}); the run ' \
                     'has not converged far enough'.format(top + 1, spread)
        logger.info(diagnostic)

    alpha_hat = min(values.values()) if values else None
    sets = pair_discussion_sets(trace, min_count)
    final = trace.final_profile.scores
    pair_alphas = {
        pair: float(np.min(final[pair.a, s.columns()]))
        for pair, s in sets.items() if s
    }
    alpha_spread = float(np.ptp(list(pair_alphas.values()))) if pair_alphas else None
    if alpha_hat is None:
        q_set = SubjectSet()
        above_alpha_discussed = False
    else:
        q_set = SubjectSet.from_mask(xbar0 >= alpha_hat - tol)
        above = [j for j, v in values.items() if v > alpha_hat]
        above_alpha_discussed = all(set(above) <= s for s in sets.values())

    return TopKCertificate(
        applicable=True,
        k=k,
        k_prime=k_prime,
        alpha_hat=alpha_hat,
        consensual_candidates=SubjectSet(society),
        aggregate_ranking=ranking,
        top_value=values.get(top),
        diagnostic=diagnostic,
        pair_discussion_sets=sets,
        pair_alphas=pair_alphas,
        alpha_spread=alpha_spread,
        q_set=q_set,
        above_alpha_discussed=above_alpha_discussed
    )
