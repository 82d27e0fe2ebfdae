r"""Weighted agent graphs and their connected components"""
from typing import Dict, Iterable, List, Tuple
from dataclasses import dataclass, field
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _csgraph_components

from .profile import PairEvent


@dataclass(frozen=True)
class AgentGraph:
    """
    Undirected graph on agents [0, m); `counts` maps a pair to how often it was
    observed (or 1 for structural edges), `finite_horizon` flags graphs built from
    a finite record where "infinitely often" has no exact meaning
    """

    m: int
    counts: Dict[PairEvent, int] = field(default_factory=dict)
    finite_horizon: bool = False

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[PairEvent],
                   finite_horizon: bool = False) -> 'AgentGraph':

        counts = {}
        for e in edges:
            e.validate(m)
            counts[e] = counts.get(e, 0) + 1
        return cls(m, counts, finite_horizon)

    def edges(self, min_count: int = 1) -> List[PairEvent]:
        """
        Edges observed at least max(min_count, 1) times, sorted

        Args:
            min_count (int, optional): occurrence threshold; default = 1

        Returns:
            list[PairEvent]
        """

        threshold = max(min_count, 1)
        return sorted(e for e, c in self.counts.items() if c >= threshold)

    def thresholded(self, min_count: int) -> 'AgentGraph':

        return AgentGraph(self.m, {e: self.counts[e] for e in self.edges(min_count)},
                          self.finite_horizon)

    def adjacency(self, min_count: int = 1) -> csr_matrix:

        edges = self.edges(min_count)
        rows = [e.a for e in edges]
        cols = [e.b for e in edges]
        data = np.ones(len(edges), dtype=np.int8)
        return csr_matrix((data, (rows, cols)), shape=(self.m, self.m))

    def is_connected(self, min_count: int = 1) -> bool:

        return len(connected_components(self, min_count)) == 1


def connected_components(graph: AgentGraph, min_count: int = 1) -> List[Tuple[int, ...]]:
    """
    Connected-components partition of the agents; isolated agents are singleton
    components. Members are sorted and components are ordered by smallest member,
    so the result does not depend on edge enumeration order

    Args:
        graph (AgentGraph): graph on [0, m)
        min_count (int, optional): edges need at least this many observations;
            default = 1

    Returns:
        list[tuple[int, ...]]: partition of [0, m)
    """

    _, labels = _csgraph_components(graph.adjacency(min_count), directed=False)
    groups = {}
    for agent, label in enumerate(labels):
        groups.setdefault(label, []).append(agent)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
