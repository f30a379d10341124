"""The simplex of complete graphs.

M+1 cliques of M vertices. Vertex ``(i, j)`` lives in clique ``i`` and its
single external edge goes to vertex ``(j, i)`` of clique ``j``, so every
pair of cliques is joined by exactly one edge. One whole clique is marked.

Vertices are numbered ``i*M + p`` where ``p`` is the rank of slot ``j``
among the slots of clique ``i`` (slot ``i`` itself does not exist). Arcs
(vertex, direction) are numbered ``v*M + d`` with directions ordered as in
:func:`neighbors`: the M-1 clique-mates by ascending slot, then the external
neighbour.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np


class Vertex(NamedTuple):
    clique: int
    slot: int


class VertexClass(str, Enum):
    A = "a"  # marked
    B = "b"  # adjacent to marked
    C = "c"  # distance two


@dataclass(frozen=True)
class SimplexParams:
    M: int
    marked_clique: int = 0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"clique size M must be an integer >= 2, got {self.M!r}")
        if not 0 <= self.marked_clique <= self.M:
            raise ValueError(f"marked_clique must lie in [0, {self.M}], got {self.marked_clique}")

    @property
    def N(self) -> int:
        return self.M * (self.M + 1)

    @property
    def n_cliques(self) -> int:
        return self.M + 1

    @property
    def n_arcs(self) -> int:
        return self.N * self.M


def _check_vertex(params: SimplexParams, v) -> Vertex:
    v = Vertex(*v)
    M = params.M
    if not (0 <= v.clique <= M and 0 <= v.slot <= M) or v.clique == v.slot:
        raise ValueError(f"invalid vertex {tuple(v)} for M={M}")
    return v


def vertex_index(params: SimplexParams, v) -> int:
    v = _check_vertex(params, v)
    return v.clique * params.M + (v.slot if v.slot < v.clique else v.slot - 1)


def vertex_at(params: SimplexParams, index: int) -> Vertex:
    if not 0 <= index < params.N:
        raise ValueError(f"vertex index {index} out of range for N={params.N}")
    clique, p = divmod(int(index), params.M)
    return Vertex(clique, p if p < clique else p + 1)


def vertices(params: SimplexParams) -> list[Vertex]:
    return [vertex_at(params, i) for i in range(params.N)]


def neighbors(params: SimplexParams, v) -> list[Vertex]:
    v = _check_vertex(params, v)
    intra = [Vertex(v.clique, s) for s in range(params.M + 1) if s not in (v.clique, v.slot)]
    return intra + [Vertex(v.slot, v.clique)]


def classify(params: SimplexParams, v) -> VertexClass:
    v = _check_vertex(params, v)
    if v.clique == params.marked_clique:
        return VertexClass.A
    if v.slot == params.marked_clique:
        return VertexClass.B
    return VertexClass.C


@lru_cache(maxsize=32)
def _structure(M: int):
    params = SimplexParams(M)
    N = params.N
    cliques = np.repeat(np.arange(M + 1), M)
    ranks = np.tile(np.arange(M), M + 1)
    slots = np.where(ranks < cliques, ranks, ranks + 1)
    # external partner of (i, j) is (j, i)
    partner_rank = np.where(cliques < slots, cliques, cliques - 1)
    external = slots * M + partner_rank

    # flip-flop shift on arcs: (v, d) -> (u, index of v among u's neighbours)
    arc_target = np.empty(N * M, dtype=np.int64)
    arc_head = np.empty(N * M, dtype=np.int64)
    for v in range(N):
        i, j = cliques[v], slots[v]
        others = [s for s in range(M + 1) if s != i and s != j]
        for d, s in enumerate(others):
            u = i * M + (s if s < i else s - 1)
            # from u=(i, s), v's slot j sits among slots excluding i and s
            back = j - (j > i) - (j > s)
            arc_target[v * M + d] = u * M + back
            arc_head[v * M + d] = u
        u = external[v]
        arc_target[v * M + M - 1] = u * M + M - 1
        arc_head[v * M + M - 1] = u
    for arr in (cliques, slots, external, arc_target, arc_head):
        arr.setflags(write=False)
    return cliques, slots, external, arc_target, arc_head


def external_partner(params: SimplexParams) -> np.ndarray:
    """Index array: ``external_partner(p)[v]`` is v's external neighbour."""
    return _structure(params.M)[2]


def flip_flop_permutation(params: SimplexParams) -> np.ndarray:
    """Arc permutation of the flip-flop shift; an involution."""
    return _structure(params.M)[3]


def arc_heads(params: SimplexParams) -> np.ndarray:
    """Vertex each arc points to."""
    return _structure(params.M)[4]


@lru_cache(maxsize=64)
def vertex_classes(params: SimplexParams) -> np.ndarray:
    """Per-vertex class codes: 0 = a, 1 = b, 2 = c."""
    cliques, slots = _structure(params.M)[:2]
    out = np.full(params.N, 2, dtype=np.int8)
    out[slots == params.marked_clique] = 1
    out[cliques == params.marked_clique] = 0
    out.setflags(write=False)
    return out


def marked_mask(params: SimplexParams) -> np.ndarray:
    return vertex_classes(params) == 0


def adjacency_action(params: SimplexParams, x) -> np.ndarray:
    """A @ x without forming A: clique sums minus self, plus external partner."""
    x = np.asarray(x)
    if x.shape != (params.N,):
        raise ValueError(f"vector of length {params.N} expected, got shape {x.shape}")
    blocks = x.reshape(params.M + 1, params.M)
    intra = blocks.sum(axis=1, keepdims=True) - blocks
    return intra.reshape(-1) + x[external_partner(params)]


def adjacency_matrix(params: SimplexParams) -> np.ndarray:
    """Dense adjacency built from :func:`neighbors`; for tests at small M."""
    a = np.zeros((params.N, params.N))
    for v in vertices(params):
        for u in neighbors(params, v):
            a[vertex_index(params, v), vertex_index(params, u)] = 1.0
    return a
