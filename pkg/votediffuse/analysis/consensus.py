r"""
Post-hoc consensus analysis of recorded traces: discussion graphs, consensus
classes, component-wise consensus verification and the conservation audit
"""

from typing import Dict, List, Tuple, Union
from dataclasses import dataclass, field
import numpy as np
from sklearn.cluster import AgglomerativeClustering

from ..engine import Trace
from ..errors import DimensionError, ParameterError
from ..graphs import AgentGraph, connected_components
from ..profile import OpinionProfile, PairEvent, _as_scores, column_average


def _pair_counts(pairs: np.ndarray, m: int) -> Dict[PairEvent, int]:
    """
    Occurrence count of every pair in an (T, 2) event array
    """

    if len(pairs) == 0:
        return {}
    codes = pairs[:, 0].astype(np.int64) * m + pairs[:, 1]
    uniq, counts = np.unique(codes, return_counts=True)
    return {PairEvent(int(c // m), int(c % m)): int(cnt) for c, cnt in zip(uniq, counts)}


def discussion_graph(trace: Trace, j: int, min_count: int = 1) -> AgentGraph:
    """
    Agent graph of candidate j: edge {a, b} iff the pair was activated with j among
    the discussed candidates at least max(min_count, 1) times; a finite-horizon
    stand-in for "discusses j infinitely often"

    Args:
        trace (Trace): recorded run
        j (int): candidate, 0-based
        min_count (int, optional): occurrence threshold; default = 1

    Returns:
        AgentGraph: thresholded graph; counts hold the observed occurrences
    """

    if not 0 <= j < trace.n:
        raise DimensionError('Candidate {} out of range for {} candidates'.format(j, trace.n))
    rows = trace.pairs[trace.subject_mask[:, j]]
    graph = AgentGraph(trace.m, _pair_counts(rows, trace.m), finite_horizon=True)
    return graph.thresholded(min_count)


def pair_graph(trace: Trace, min_count: int = 1) -> AgentGraph:
    """
    Pair-occurrence graph of a trace regardless of the discussed candidates

    Args:
        trace (Trace): recorded run
        min_count (int, optional): occurrence threshold; default = 1

    Returns:
        AgentGraph
    """

    graph = AgentGraph(trace.m, _pair_counts(trace.pairs, trace.m), finite_horizon=True)
    return graph.thresholded(min_count)


@dataclass(frozen=True)
class ConsensusClass:
    """
    Agents sharing a limiting score on one candidate
    """

    candidate: int
    members: Tuple[int, ...]
    value: float
    spread: float


@dataclass(frozen=True)
class ConsensusReport:
    """
    Per candidate, the partition of the agents into consensus classes at `tol`;
    classes are ordered by their smallest member
    """

    tol: float
    classes: Dict[int, List[ConsensusClass]] = field(default_factory=dict)

    def classes_for(self, j: int) -> List[ConsensusClass]:

        return self.classes[j]

    def is_society_consensus(self, j: int) -> bool:
        """
        True when a single class covers every agent on candidate j
        """

        return len(self.classes[j]) == 1

    def society_candidates(self) -> List[int]:

        return sorted(j for j in self.classes if self.is_society_consensus(j))

    def consent(self, j: int, a: int, b: int) -> bool:
        """
        True when agents a and b fall in the same class on candidate j
        """

        for cls in self.classes[j]:
            if a in cls.members:
                return b in cls.members
        raise DimensionError('Agent {} is not part of the report'.format(a))


def _single_linkage_labels(column: np.ndarray, tol: float) -> np.ndarray:
    """
    Single-linkage cluster labels of a 1-D sample, merging whenever two values are
    within tol of each other (inclusive); the result is transitively closed
    """

    if np.ptp(column) <= tol:
        return np.zeros(len(column), dtype=np.intp)
    clustering = AgglomerativeClustering(
        n_clusters=None,
        linkage='single',
        distance_threshold=float(np.nextafter(tol, np.inf))
    )
    return clustering.fit_predict(column.reshape(-1, 1))


def consensus_report(final: Union[OpinionProfile, np.ndarray], tol: float) -> ConsensusReport:
    """
    Clusters the agents of every candidate by single linkage on
    |X_ij - X_i'j| <= tol; large tolerances chain distinct values into one class

    Args:
        final (OpinionProfile): (usually final) profile
        tol (float): tolerance, > 0

    Returns:
        ConsensusReport: class values are class means
    """

    if not tol > 0.0:
        raise ParameterError('tol must be > 0, got {}'.format(tol))
    scores = _as_scores(final)
    classes = {}
    for j in range(scores.shape[1]):
        column = scores[:, j]
        labels = _single_linkage_labels(column, tol)
        groups = {}
        for agent, label in enumerate(labels):
            groups.setdefault(int(label), []).append(agent)
        ordered = sorted(groups.values(), key=lambda g: g[0])
        classes[j] = [ConsensusClass(
            candidate=j,
            members=tuple(g),
            value=float(np.mean(column[g])),
            spread=float(np.ptp(column[g]))
        ) for g in ordered]
    return ConsensusReport(tol, classes)


@dataclass(frozen=True)
class ComponentCheck:
    """
    One (candidate, discussion-graph component) check of the final profile
    """

    candidate: int
    component: Tuple[int, ...]
    spread: float
    value: float
    passed: bool


@dataclass(frozen=True)
class ConsensusVerification:
    """
    Outcome of `verify_component_consensus`
    """

    tol: float
    min_count: int
    checks: List[ComponentCheck]

    @property
    def passed(self) -> bool:

        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[ComponentCheck]:

        return [c for c in self.checks if not c.passed]

    def components(self, j: int) -> List[Tuple[int, ...]]:

        return [c.component for c in self.checks if c.candidate == j]

    def candidate_passed(self, j: int) -> bool:

        return all(c.passed for c in self.checks if c.candidate == j)


def verify_component_consensus(trace: Trace, tol: float = 1e-8,
                               min_count: int = 10) -> ConsensusVerification:
    """
    Checks that agents connected in candidate j's discussion graph agree on j in
    the final profile: every component's spread must be <= tol. Only this
    direction is checked; agents may agree without being connected

    Args:
        trace (Trace): recorded run, ideally stopped as `converged`
        tol (float, optional): spread tolerance; default = 1e-8
        min_count (int, optional): discussion-count threshold; default = 10

    Returns:
        ConsensusVerification: one check per (candidate, component)
    """

    final = trace.final_profile.scores
    checks = []
    for j in range(trace.n):
        graph = discussion_graph(trace, j, min_count)
        for comp in connected_components(graph):
            values = final[list(comp), j]
            spread = float(np.ptp(values))
            checks.append(ComponentCheck(
                candidate=j,
                component=comp,
                spread=spread,
                value=float(np.mean(values)),
                passed=spread <= tol
            ))
    return ConsensusVerification(tol, min_count, checks)


def conservation_audit(trace: Trace) -> float:
    """
    Returns:
        float: max_j |mean_j(final) - mean_j(initial)|; 0 in exact arithmetic
    """

    initial = column_average(trace.initial_profile).averages
    final = column_average(trace.final_profile).averages
    return float(np.max(np.abs(final - initial)))
