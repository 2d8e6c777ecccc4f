"""Bipartitions of a party set and the clique-union graph of a composition plan."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


@dataclass(frozen=True)
class Bipartition:
    """``left | right`` split of ``range(n_parties)``; ``left`` always holds party 0."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        if not self.left or not self.right:
            raise ValueError("both sides of a bipartition must be non-empty")
        if 0 not in self.left:
            raise ValueError("canonical bipartitions keep party 0 on the left")
        if set(self.left) & set(self.right):
            raise ValueError("sides overlap")

    @classmethod
    def from_side(cls, side: Iterable[int], n_parties: int) -> Bipartition:
        side = set(side)
        other = set(range(n_parties)) - side
        if 0 not in side:
            side, other = other, side
        return cls(tuple(sorted(side)), tuple(sorted(other)))

    def restrict(self, parties: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Positions (within ``parties``) that fall on the left and right."""
        parties = list(parties)
        left = tuple(k for k, p in enumerate(parties) if p in self.left)
        right = tuple(k for k, p in enumerate(parties) if p in self.right)
        return left, right

    def crosses(self, parties: Iterable[int]) -> bool:
        left, right = self.restrict(parties)
        return bool(left) and bool(right)

    def label(self) -> str:
        """1-based display form, e.g. ``{1,3}|{2}``."""
        fmt = lambda side: "{" + ",".join(str(p + 1) for p in side) + "}"
        return f"{fmt(self.left)}|{fmt(self.right)}"


def bipartitions(n_parties: int) -> list[Bipartition]:
    """All ``2**(n-1) - 1`` canonical bipartitions, sorted by the left side."""
    rest = range(1, n_parties)
    out = []
    for r in range(0, n_parties - 1):
        for extra in combinations(rest, r):
            out.append(Bipartition.from_side((0, *extra), n_parties))
    out.sort(key=lambda b: b.left)
    return out


@dataclass(frozen=True)
class CompositionGraph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        if self.n_vertices == 0:
            return []
        if self.edges:
            u, v = np.array(sorted(self.edges)).T
        else:
            u = v = np.zeros(0, dtype=int)
        adj = coo_matrix((np.ones(len(u)), (u, v)), shape=(self.n_vertices, self.n_vertices))
        _, labels = connected_components(adj, directed=False)
        groups: dict[int, list[int]] = {}
        for vertex, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(vertex)
        return sorted(groups.values(), key=lambda g: g[0])


def graph_from_blocks(n_vertices: int, blocks: Iterable[Iterable[int]]) -> CompositionGraph:
    edges = set()
    for block in blocks:
        for a, b in combinations(sorted(set(block)), 2):
            edges.add((a, b))
    return CompositionGraph(n_vertices, frozenset(edges))


def build_graph(plan) -> CompositionGraph:
    """Graph on the plan's parties with a clique per block."""
    return graph_from_blocks(len(plan.dims), (b.parties for b in plan.blocks))


def is_connected(g: CompositionGraph) -> bool:
    return len(g.components()) <= 1
