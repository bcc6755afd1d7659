"""Exact triadic cardinalities of window multigraphs.

A triangle is a distinct node triple; parallel interaction edges do not
multiply it.  Influence triangles use each user's earliest interaction time
with the content.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputFormatError, ValidationError
from .stream import UC, UU, InteractionMultigraph, SocialGraph, build_multigraph


@dataclass
class GroundTruth:
    cardinalities: dict
    distribution: np.ndarray
    W: int
    n: int
    mode: str = UU

    @property
    def counts(self) -> np.ndarray:
        """Histogram with ``counts[i]`` nodes of cardinality ``i``."""
        return np.bincount(np.fromiter(self.cardinalities.values(), dtype=np.int64,
                                       count=len(self.cardinalities)),
                           minlength=self.W + 1)

    def histogram(self) -> np.ndarray:
        h = self.counts.astype(float)
        h[0] += self.n - len(self.cardinalities)
        return h

    def truncated(self, W: int) -> np.ndarray:
        """Distribution over ``0..W`` with mass above ``W`` folded into ``W``."""
        h = self.histogram()
        out = np.zeros(W + 1)
        k = min(W + 1, len(h))
        out[:k] = h[:k]
        out[W] += h[W + 1:].sum()
        return out / self.n


def triangle_counts(adj: dict) -> dict:
    """Per-node triangle counts of a simple undirected graph.

    Degree-ordered forward intersection: each triangle is found once from
    its lowest-ranked vertex.
    """
    rank = {u: (len(nb), u) for u, nb in adj.items()}
    fwd = {u: {v for v in nb if rank[v] > rank[u]} for u, nb in adj.items()}
    counts = dict.fromkeys(adj, 0)
    for u, fu in fwd.items():
        for v in fu:
            common = fu & fwd[v]
            if common:
                k = len(common)
                counts[u] += k
                counts[v] += k
                for w in common:
                    counts[w] += 1
    return counts


def total_triangles(adj: dict) -> int:
    return sum(triangle_counts(adj).values()) // 3


def interaction_cardinalities(g: InteractionMultigraph) -> dict:
    if g.mode != UU:
        raise ValueError("interaction cardinalities need a uu multigraph")
    counts = triangle_counts(g.simple_adjacency())
    for u in g.nodes:
        counts.setdefault(u, 0)
    return counts


def interaction_cardinality(g: InteractionMultigraph, u: str) -> int:
    adj = g.simple_adjacency()
    nb = adj.get(u)
    if not nb:
        return 0
    return sum(len(nb & adj[v]) for v in nb) // 2


def _content_influence(first: dict, social: SocialGraph) -> int:
    """Influence pairs among users of one content (``user -> earliest time``)."""
    users = first.keys()
    total = 0
    if len(first) < 2:
        return 0
    for a, ta in first.items():
        nbrs = social.succ.get(a, ())
        # each pair is seen from the follower side; undirected graphs see it twice
        if len(nbrs) < len(first):
            cand = (b for b in nbrs if b in first)
        else:
            cand = (b for b in users if b in nbrs)
        for b in cand:
            tb = first[b]
            if not social.directed:
                total += 1
            elif ta > tb:
                total += 1
            elif ta == tb and not (social.follows(b, a) and b < a):
                total += 1
    return total // 2 if not social.directed else total


def influence_cardinalities(g: InteractionMultigraph, social: SocialGraph | None = None) -> dict:
    if g.mode != UC:
        raise ValueError("influence cardinalities need a uc multigraph")
    social = social if social is not None else g.social
    if social is None:
        raise ValidationError("influence cardinalities need a social graph")
    return {c: _content_influence(first, social) for c, first in _firsts(g).items()}


def _firsts(g: InteractionMultigraph) -> dict:
    out = g.first_times()
    for c in g.contents:
        out.setdefault(c, {})
    return out


def influence_cardinality(g: InteractionMultigraph, social: SocialGraph, c: str) -> int:
    first = g.first_times().get(c)
    return _content_influence(first, social) if first else 0


def exact_distribution(g: InteractionMultigraph, social: SocialGraph | None = None,
                       n_override: int | None = None) -> GroundTruth:
    """Histogram of cardinalities over users (uu) or contents (uc).

    ``n_override`` sets the population size; the difference from the number
    of nodes seen is absorbed by the zero-cardinality bin.
    """
    if g.mode == UU:
        cards = interaction_cardinalities(g)
    else:
        cards = influence_cardinalities(g, social)
    positive = sum(1 for v in cards.values() if v > 0)
    if n_override is not None:
        if n_override < positive:
            raise InputFormatError(f"n_override={n_override} is below the {positive} nodes "
                                   "with positive cardinality")
        n = int(n_override)
    else:
        n = len(cards)
    W = max(cards.values(), default=0)
    counts = np.bincount(np.fromiter(cards.values(), dtype=np.int64, count=len(cards)),
                         minlength=W + 1).astype(float)
    counts[0] += n - len(cards)
    dist = counts / n if n > 0 else counts
    return GroundTruth(cards, dist, W, n, g.mode)


def triangle_count_series(windows) -> list[tuple[int, int]]:
    """``(uu activity count, distinct interaction triangles)`` per window."""
    out = []
    for w in windows:
        g = build_multigraph(w, UU)
        out.append((g.n_edges, total_triangles(g.simple_adjacency())))
    return out
