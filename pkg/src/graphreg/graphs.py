"""Undirected predictor graphs: neighborhoods, degrees, adjacency queries.

Nodes are 0-indexed.  Neighbor lists are stored sorted so that group slicing
downstream is deterministic.  Graphs are immutable after construction and
safe to share across workers.
"""

from dataclasses import dataclass

import numpy as np


class UndirectedGraph:
    """Simple undirected graph over ``p`` nodes, no self-loops, no weights."""

    def __init__(self, p, edges=()):
        if p < 0:
            raise ValueError(f"node count must be nonnegative, got {p}")
        self.p = int(p)
        adj = [set() for _ in range(self.p)]
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < self.p and 0 <= j < self.p):
                raise ValueError(f"edge ({i},{j}) out of range for p={self.p}")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            adj[i].add(j)
            adj[j].add(i)
        self._neighbors = tuple(
            np.array(sorted(s), dtype=np.intp) for s in adj
        )

    def neighbors(self, i):
        """Sorted adjacent nodes of ``i``, self excluded."""
        if not (0 <= i < self.p):
            raise ValueError(f"node {i} out of range for p={self.p}")
        return self._neighbors[i]

    def has_edge(self, i, j):
        return j in self._neighbors[i]

    def edges(self):
        """Edges as (i, j) pairs with i < j, lexicographically sorted."""
        out = []
        for i in range(self.p):
            for j in self._neighbors[i]:
                if i < j:
                    out.append((i, int(j)))
        return out

    @property
    def n_edges(self):
        return sum(len(a) for a in self._neighbors) // 2

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self.p == other.p and all(
            np.array_equal(a, b) for a, b in zip(self._neighbors, other._neighbors)
        )

    def __hash__(self):
        return hash((self.p, tuple(tuple(a) for a in self._neighbors)))

    def __repr__(self):
        return f"UndirectedGraph(p={self.p}, edges={self.n_edges})"


@dataclass(frozen=True)
class Neighborhood:
    """A node together with itself-plus-neighbors and the resulting size.

    ``members`` always contains ``node``; ``degree`` counts the node itself,
    so an isolated node has degree 1.
    """

    node: int
    members: np.ndarray
    degree: int


def neighborhood(graph, i):
    """Closed neighborhood of node ``i``: the node plus its neighbors."""
    if not (0 <= i < graph.p):
        raise ValueError(f"node {i} out of range for p={graph.p}")
    members = np.union1d(graph.neighbors(i), [i]).astype(np.intp)
    return Neighborhood(node=int(i), members=members, degree=len(members))


def neighborhoods(graph):
    """All closed neighborhoods of a graph, in node order."""
    return [neighborhood(graph, i) for i in range(graph.p)]


def degrees(graph):
    """Closed-neighborhood sizes for every node (isolated node -> 1)."""
    return np.array([len(graph.neighbors(i)) + 1 for i in range(graph.p)], dtype=np.intp)


def graph_from_precision(omega, tol=1e-10):
    """Graph whose edges are the off-diagonal entries of ``omega`` above ``tol``.

    ``omega`` must be symmetric within ``tol``; entries with absolute value
    at or below ``tol`` are treated as structural zeros.
    """
    omega = np.asarray(omega, dtype=np.float64)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {omega.shape}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    asym = float(np.max(np.abs(omega - omega.T))) if omega.size else 0.0
    if asym > tol:
        raise ValueError(f"matrix is asymmetric beyond tol: max |a_ij - a_ji| = {asym:.3e}")
    p = omega.shape[0]
    ii, jj = np.triu_indices(p, k=1)
    keep = np.abs(omega[ii, jj]) > tol
    return UndirectedGraph(p, edges=zip(ii[keep].tolist(), jj[keep].tolist()))
