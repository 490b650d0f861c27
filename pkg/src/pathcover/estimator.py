"""scikit-learn style wrapper around :func:`pathcover.pipeline.solve`.

``FivePathCover().fit(X)`` accepts a :class:`~pathcover.graph.Graph`, a
square (dense or sparse) adjacency matrix, or an ``(m, 2)`` edge array.
After fitting, ``labels_[v]`` is the index of the path covering ``v`` or
``-1``, which makes the estimator usable like a clusterer.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exact import SearchBudget, exact_opt
from .graph import Graph
from .pipeline import AlgoConfig, Trace, solve


def as_graph(X, n_vertices: int | None = None) -> Graph:
    """Validate ``X`` and turn it into a :class:`Graph`."""
    if isinstance(X, Graph):
        return X
    if sp.issparse(X):
        X = check_array(X, accept_sparse="coo")
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got shape {X.shape}")
        coo = sp.coo_matrix(X)
        pairs = {(min(i, j), max(i, j)) for i, j, w in zip(coo.row, coo.col, coo.data)
                 if w != 0 and i != j}
        return Graph(X.shape[0], sorted(pairs))
    arr = check_array(X, ensure_2d=True, ensure_min_samples=0, dtype=None)
    if arr.ndim == 2 and arr.shape[1] == 2 and (n_vertices is not None or arr.shape[0] != 2):
        edges = arr.astype(np.int64)
        n = n_vertices if n_vertices is not None else (int(edges.max()) + 1 if len(edges) else 0)
        pairs = {(min(int(a), int(b)), max(int(a), int(b))) for a, b in edges}
        if len(pairs) != len(edges):
            raise ValueError("edge array contains duplicate edges")
        return Graph(n, sorted(pairs))
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {arr.shape}")
    if not np.array_equal(arr, arr.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(np.diag(arr) != 0):
        raise ValueError("adjacency matrix has self-loops")
    rows, cols = np.nonzero(np.triu(arr, 1))
    return Graph(arr.shape[0], zip(rows.tolist(), cols.tolist()))


class FivePathCover(ClusterMixin, BaseEstimator):
    """Cover vertices by vertex-disjoint paths with at least five vertices.

    Parameters
    ----------
    method : {"approx", "exact"}
        ``"approx"`` runs the approximation algorithm; ``"exact"`` runs the
        exhaustive oracle (small graphs only).
    audit : bool
        Check the working-subgraph invariant after every phase-1 step.
    n_vertices : int or None
        Vertex count when ``X`` is an edge array with trailing isolated
        vertices.
    """

    def __init__(self, method: str = "approx", audit: bool = False,
                 n_vertices: int | None = None):
        self.method = method
        self.audit = audit
        self.n_vertices = n_vertices

    def fit(self, X, y=None):
        if self.method not in ("approx", "exact"):
            raise ValueError(f"method must be 'approx' or 'exact', got {self.method!r}")
        g = as_graph(X, self.n_vertices)
        if self.method == "exact":
            sol = exact_opt(g, 5, SearchBudget())
            self.trace_ = None
        else:
            self.trace_ = Trace()
            sol = solve(g, AlgoConfig(audit=self.audit), self.trace_)
        self.paths_ = sol.canonical()
        self.covered_ = sol.covered
        labels = np.full(g.n, -1, dtype=np.int64)
        for i, path in enumerate(self.paths_):
            labels[path] = i
        self.labels_ = labels
        self.n_vertices_in_ = g.n
        return self

    def coverage(self) -> float:
        check_is_fitted(self, "labels_")
        return self.covered_ / self.n_vertices_in_ if self.n_vertices_in_ else 0.0
