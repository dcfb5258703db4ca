"""Weighted-graph data model, standing assumptions, and graph geometry.

A weighted graph is a triple (X, b, m): a finite ordered vertex set X, a
symmetric nonnegative edge weight b with zero diagonal, and a positive
vertex measure m.  Vectors over the graph are numpy arrays ordered like
``vertex_ids``.

Length-metric computations are carried out in exact rational arithmetic
(every float is an exact dyadic rational), so ball-membership comparisons
at tied radii never flip due to rounding.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from heapq import heappop, heappush
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    DuplicateVertex,
    EmptySubset,
    InvalidWeight,
    NonPositiveMeasure,
    NonSymmetricWeight,
    ParseError,
    SelfLoop,
    UnknownVertex,
    ValidationError,
)


class MetricKind(Enum):
    """Which graph metric to use: hop counting or 1/b edge lengths."""

    COMBINATORIAL = "combinatorial"
    LENGTH = "length"


class FullSetInradiusWarning(UserWarning):
    """The inradius of the full vertex set is unbounded on a finite graph."""


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable weighted graph (X, b, m).

    Attributes:
        vertex_ids: ordered vertex identifiers.
        m: positive vertex measures, ordered like ``vertex_ids``.
        weights: dense symmetric edge-weight matrix b with zero diagonal.
    """

    vertex_ids: tuple[str, ...]
    m: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.m.setflags(write=False)
        self.weights.setflags(write=False)
        object.__setattr__(
            self, "_index", {v: i for i, v in enumerate(self.vertex_ids)}
        )

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    def index_of(self, vertex_id: str) -> int:
        try:
            return self._index[vertex_id]  # type: ignore[attr-defined]
        except KeyError:
            raise UnknownVertex(f"unknown vertex id {vertex_id!r}") from None

    def subset_indices(self, ids: Sequence[str]) -> np.ndarray:
        """Map vertex ids to positions, rejecting duplicates."""
        idx = [self.index_of(v) for v in ids]
        if len(set(idx)) != len(idx):
            raise ValidationError("duplicate vertex id in subset")
        return np.asarray(idx, dtype=int)

    def degrees(self) -> np.ndarray:
        """Weighted degree Deg(x) = (1/m(x)) * sum_y b(x,y)."""
        return self.weights.sum(axis=1) / self.m

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.weights[i] > 0.0)[0]

    def measure(self, indices: Iterable[int]) -> float:
        return float(sum(self.m[i] for i in indices))


@dataclass(frozen=True)
class AssumptionReport:
    """Standing assumptions: connectivity plus the boundedness constants."""

    connected: bool
    d_max: float
    sup_m: float
    inf_m: float
    inf_positive_b: float


def build_graph(
    vertices: Sequence[tuple[str, float]],
    edges: Sequence[tuple[str, str, float]],
) -> WeightedGraph:
    """Build a validated graph from vertex and edge lists.

    Each undirected edge is stored once.  Input is rejected rather than
    repaired: giving an edge in both orientations with different weights
    raises ``NonSymmetricWeight``; giving the same edge twice (same or
    reversed orientation, equal weight) raises ``DuplicateEdge``.
    """
    ids = [str(v) for v, _ in vertices]
    if len(set(ids)) != len(ids):
        raise DuplicateVertex("vertex ids must be unique")
    n = len(ids)
    index = {v: i for i, v in enumerate(ids)}

    m = np.zeros(n)
    for (v, mv) in vertices:
        mv = float(mv)
        if not math.isfinite(mv) or mv <= 0.0:
            raise NonPositiveMeasure(f"m({v!r}) = {mv} is not a positive real")
        m[index[str(v)]] = mv

    b = np.zeros((n, n))
    seen: dict[tuple[int, int], float] = {}
    for (u, v, w) in edges:
        u, v = str(u), str(v)
        if u not in index or v not in index:
            raise UnknownVertex(f"edge ({u!r}, {v!r}) references an unknown vertex")
        w = float(w)
        if not math.isfinite(w) or w < 0.0:
            raise InvalidWeight(f"b({u!r},{v!r}) = {w} is not a finite nonnegative real")
        i, j = index[u], index[v]
        if i == j:
            raise SelfLoop(f"self-loop at {u!r}")
        key = (min(i, j), max(i, j))
        if key in seen:
            if seen[key] != w:
                raise NonSymmetricWeight(
                    f"edge ({u!r},{v!r}) given twice with weights {seen[key]} and {w}"
                )
            raise DuplicateEdge(f"edge ({u!r},{v!r}) appears more than once")
        seen[key] = w
        b[i, j] = w
        b[j, i] = w

    return WeightedGraph(tuple(ids), m, b)


def validate_assumptions(g: WeightedGraph) -> AssumptionReport:
    """Check connectivity and compute the boundedness constants."""
    deg = g.degrees()
    positive = g.weights[g.weights > 0.0]
    return AssumptionReport(
        connected=_is_connected(g),
        d_max=float(deg.max()) if g.n else 0.0,
        sup_m=float(g.m.max()),
        inf_m=float(g.m.min()),
        inf_positive_b=float(positive.min()) if positive.size else math.inf,
    )


def _is_connected(g: WeightedGraph) -> bool:
    if g.n == 0:
        return True
    seen = np.zeros(g.n, dtype=bool)
    queue = deque([0])
    seen[0] = True
    while queue:
        i = queue.popleft()
        for j in g.neighbors(i):
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


# ---------------------------------------------------------------------------
# metrics


@lru_cache(maxsize=64)
def _comb_matrix(g: WeightedGraph) -> np.ndarray:
    """All-pairs hop counts; -1 marks unreachable pairs."""
    n = g.n
    nbrs = [g.neighbors(i) for i in range(n)]
    out = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        dist = out[src]
        dist[src] = 0
        queue = deque([src])
        while queue:
            i = queue.popleft()
            for j in nbrs[i]:
                if dist[j] < 0:
                    dist[j] = dist[i] + 1
                    queue.append(j)
    return out


@lru_cache(maxsize=64)
def _length_matrix(g: WeightedGraph) -> tuple[tuple[object, ...], ...]:
    """All-pairs length distances as exact Fractions; None marks unreachable."""
    n = g.n
    lengths: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
    for i in range(n):
        for j in g.neighbors(i):
            lengths[i].append((int(j), Fraction(1) / Fraction(g.weights[i, j])))
    rows = []
    for src in range(n):
        dist: list[Fraction | None] = [None] * n
        dist[src] = Fraction(0)
        heap: list[tuple[Fraction, int]] = [(Fraction(0), src)]
        while heap:
            d, i = heappop(heap)
            if dist[i] is not None and d > dist[i]:
                continue
            for j, w in lengths[i]:
                nd = d + w
                if dist[j] is None or nd < dist[j]:
                    dist[j] = nd
                    heappush(heap, (nd, j))
        rows.append(tuple(dist))
    return tuple(rows)


def _exact_distance(g: WeightedGraph, kind: MetricKind, i: int, j: int):
    """Distance as int / Fraction, or None when unreachable."""
    if kind is MetricKind.COMBINATORIAL:
        d = int(_comb_matrix(g)[i, j])
        return None if d < 0 else d
    return _length_matrix(g)[i][j]


def distance(
    g: WeightedGraph, kind: MetricKind, x: str, y: str, *, exact: bool = False
):
    """Graph distance between two vertices; +inf when disconnected."""
    d = _exact_distance(g, kind, g.index_of(x), g.index_of(y))
    if exact:
        return math.inf if d is None else d
    return math.inf if d is None else float(d)


def _exact_dist_to_set(g, kind, i: int, targets: Sequence[int]):
    """min distance from vertex i to a set; None when unreachable."""
    best = None
    for j in targets:
        d = _exact_distance(g, kind, i, j)
        if d is not None and (best is None or d < best):
            best = d
    return best


def covering_radius(
    g: WeightedGraph, kind: MetricKind, D: Sequence[str], *, exact: bool = False
):
    """Smallest R such that closed R-balls around D cover the graph.

    On a finite graph this is the largest attained distance to D; it is
    +inf exactly when some vertex is unreachable from D.
    """
    if len(D) == 0:
        raise EmptySubset("covering radius needs a nonempty subset")
    didx = [int(i) for i in g.subset_indices(D)]
    worst = 0 if kind is MetricKind.COMBINATORIAL else Fraction(0)
    for i in range(g.n):
        d = _exact_dist_to_set(g, kind, i, didx)
        if d is None:
            return math.inf
        if d > worst:
            worst = d
    return worst if exact else float(worst)


def inradius(
    g: WeightedGraph, kind: MetricKind, omega: Sequence[str], *, exact: bool = False
):
    """Largest radius of an open ball contained in ``omega``.

    The supremum over radii is attained at the largest distance value
    d* = max_{x in omega} dist(x, complement); open balls U_r(x) stay in
    omega exactly for r <= d*.  Returns 0 for the empty set.  For
    omega = X there is no complement to hit, the value is unbounded:
    +inf is returned and ``FullSetInradiusWarning`` is emitted.
    """
    if len(omega) == 0:
        return 0.0
    oidx = set(int(i) for i in g.subset_indices(omega))
    comp = [i for i in range(g.n) if i not in oidx]
    if not comp:
        warnings.warn(
            "inradius of the full vertex set is unbounded",
            FullSetInradiusWarning,
            stacklevel=2,
        )
        return math.inf
    best = None
    for i in oidx:
        d = _exact_dist_to_set(g, kind, i, comp)
        if d is None:
            return math.inf
        if best is None or d > best:
            best = d
    return best if exact else float(best)


def max_ball_volume(g: WeightedGraph, kind: MetricKind, r) -> float:
    """max_x m(B_r(x)) over closed balls of radius r.

    ``r`` may be a float, int, or Fraction; comparisons against the exact
    rational distances are exact (floats convert exactly).
    """
    if isinstance(r, float):
        if math.isinf(r):
            return float(g.m.sum())
        r = Fraction(r)
    if r < 0:
        raise ValidationError("ball radius must be nonnegative")
    best = 0.0
    for i in range(g.n):
        vol = 0.0
        for j in range(g.n):
            d = _exact_distance(g, kind, i, j)
            if d is not None and d <= r:
                vol += g.m[j]
        best = max(best, vol)
    return best


# ---------------------------------------------------------------------------
# Folner diagnostics


def folner_ratio(g: WeightedGraph, Y: Sequence[str]) -> Fraction:
    """Boundary-to-volume ratio b(Y, Y^c) / m(Y), as an exact rational."""
    if len(Y) == 0:
        raise EmptySubset("Folner ratio needs a nonempty subset")
    yidx = set(int(i) for i in g.subset_indices(Y))
    boundary = Fraction(0)
    for i in yidx:
        for j in g.neighbors(i):
            if int(j) not in yidx:
                boundary += Fraction(g.weights[i, j])
    mass = sum((Fraction(g.m[i]) for i in yidx), Fraction(0))
    return boundary / mass


# ---------------------------------------------------------------------------
# JSON interchange

_GRAPH_KEYS = {"vertices", "edges"}


def graph_to_json(g: WeightedGraph) -> dict:
    """Dump a graph to the JSON interchange form (each edge stored once)."""
    edges = []
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if g.weights[i, j] > 0.0:
                edges.append(
                    {"u": g.vertex_ids[i], "v": g.vertex_ids[j], "b": float(g.weights[i, j])}
                )
    return {
        "vertices": [
            {"id": v, "m": float(g.m[i])} for i, v in enumerate(g.vertex_ids)
        ],
        "edges": edges,
    }


def graph_from_json(data: dict) -> WeightedGraph:
    """Parse the JSON interchange form; NaN/inf, self-loops and duplicate
    edges are rejected."""
    if not isinstance(data, dict) or not _GRAPH_KEYS <= set(data):
        raise ParseError("graph JSON needs 'vertices' and 'edges' lists")
    try:
        vertices = [(str(v["id"]), float(v["m"])) for v in data["vertices"]]
        edges = [(str(e["u"]), str(e["v"]), float(e["b"])) for e in data["edges"]]
    except (TypeError, KeyError, ValueError) as exc:
        raise ParseError(f"malformed graph JSON: {exc}") from exc
    return build_graph(vertices, edges)


def load_graph_json(path: str | Path) -> WeightedGraph:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return graph_from_json(data)


def subset_from_json(data: dict) -> tuple[str, ...]:
    if not isinstance(data, dict) or "ids" not in data or not isinstance(data["ids"], list):
        raise ParseError("subset JSON needs an 'ids' list")
    return tuple(str(v) for v in data["ids"])


def load_subset_json(path: str | Path) -> tuple[str, ...]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return subset_from_json(data)
