"""Synthetic activity streams with known ground truth.

Planted user-user streams realize a cardinality histogram as a forest of
triangle cacti (triangles glued at vertices along a tree), which creates no
triangles beyond the planted ones.  Planted user-content streams use a follow
star per content so any histogram is reachable.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import InfeasibleError
from .stream import UC, UU, SocialActivity, SocialGraph


def user(i) -> str:
    return f"u{i}"


def content(i) -> str:
    return f"c{i}"


@dataclass
class SyntheticStream:
    activities: list
    social: SocialGraph
    truth: dict = field(default_factory=dict)
    mode: str = UU

    def histogram(self) -> dict:
        return dict(sorted(Counter(self.truth.values()).items()))


def _timestamps(rng, count, start, length):
    return np.sort(rng.integers(start, start + length, size=count))


def _emit(edges, kind, rng, start=0, length=1000, shuffle=True):
    edges = list(edges)
    if shuffle:
        order = rng.permutation(len(edges))
        edges = [edges[i] for i in order]
    ts = _timestamps(rng, len(edges), start, length)
    return [SocialActivity(kind, a, b, int(t)) for (a, b), t in zip(edges, ts)]


def _normalize_histogram(hist) -> dict:
    out = {}
    for k, v in dict(hist).items():
        k, v = int(k), int(v)
        if k < 0 or v < 0:
            raise InfeasibleError("histogram keys and counts must be nonnegative")
        if v:
            out[k] = v
    return out


def cactus_triangles(demands: list[int]) -> list[tuple[int, int, int]]:
    """Triangles over node indices so node ``v`` lies in ``demands[v]`` of them.

    Builds a forest of triangle cacti greedily.  Requires the demand sum to
    be ``3T`` and at least ``2T + 1`` nodes with positive demand.
    """
    total = sum(demands)
    if total % 3:
        raise InfeasibleError(f"cardinalities sum to {total}, which is not a multiple of 3; "
                              "every triangle contributes 3")
    T = total // 3
    pos = sorted((v for v, d in enumerate(demands) if d > 0), key=lambda v: -demands[v])
    if T and len(pos) < 2 * T + 1:
        raise InfeasibleError(f"{T} triangles need at least {2 * T + 1} participating "
                              f"nodes for a triangle forest, got {len(pos)}")
    remaining = {v: demands[v] for v in pos}
    pool = list(pos)  # descending demand; new nodes are taken from the front
    tris = []
    queue: list = []
    head = 0
    while len(tris) < T:
        if head >= len(queue):
            if not pool:
                raise InfeasibleError("ran out of nodes while building the triangle forest")
            root = pool.pop(0)
            queue.append(root)
        v = queue[head]
        while remaining[v] > 0 and len(tris) < T:
            if len(pool) < 2:
                raise InfeasibleError("ran out of nodes while building the triangle forest")
            # one high-demand node keeps the tree growing, one low-demand leaf
            a = pool.pop(0)
            b = pool.pop()
            tris.append((v, a, b))
            remaining[v] -= 1
            remaining[a] -= 1
            remaining[b] -= 1
            queue.extend((a, b))
        head += 1
    if any(remaining.values()):
        raise InfeasibleError("histogram cannot be realized as a triangle forest")
    return tris


def planted_uu(hist, seed: int = 0, window_length: int = 1000, start: int = 0,
               prefix: str = "u") -> SyntheticStream:
    """User-user stream whose users have exactly the requested cardinalities.

    Zero-cardinality users hang off other users by a single pendant edge.
    """
    hist = _normalize_histogram(hist)
    rng = np.random.default_rng(seed)
    demands = [k for k, v in sorted(hist.items(), reverse=True) for _ in range(v)]
    names = [f"{prefix}{i}" for i in rng.permutation(len(demands))]
    tris = cactus_triangles(demands)
    edges = set()
    for a, b, c in tris:
        for x, y in ((a, b), (b, c), (a, c)):
            edges.add((min(x, y), max(x, y)))
    zeros = [v for v, d in enumerate(demands) if d == 0]
    anchors = [v for v, d in enumerate(demands) if d > 0]
    pendants = []
    if anchors:
        pendants = [(z, anchors[k % len(anchors)]) for k, z in enumerate(zeros)]
    elif len(zeros) == 1:
        raise InfeasibleError("a lone zero-cardinality user cannot appear in a uu stream")
    elif zeros:
        # disjoint pairs; an odd one out extends the first pair into a path
        pendants = [(zeros[k], zeros[k + 1]) for k in range(0, len(zeros) - 1, 2)]
        if len(zeros) % 2:
            pendants.append((zeros[-1], zeros[0]))
    for x, y in pendants:
        edges.add((min(x, y), max(x, y)))
    named = [(names[a], names[b]) for a, b in sorted(edges)]
    acts = _emit(named, UU, rng, start, window_length)
    social = SocialGraph.from_edges(named, directed=False)
    truth = {names[v]: d for v, d in enumerate(demands)}
    return SyntheticStream(acts, social, truth, UU)


def planted_uc(hist, seed: int = 0, window_length: int = 1000, start: int = 0,
               n_hubs: int | None = None) -> SyntheticStream:
    """User-content stream with one follow star per content.

    A content of cardinality ``i`` is touched by a hub user first and then by
    ``i`` of the hub's followers, who do not follow each other.
    """
    hist = _normalize_histogram(hist)
    rng = np.random.default_rng(seed)
    cards = [k for k, v in sorted(hist.items()) for _ in range(v)]
    cards = [cards[i] for i in rng.permutation(len(cards))]
    W = max(cards, default=0)
    n_hubs = n_hubs or max(1, min(len(cards), 50))
    fan = max(W, 1)
    hubs = [f"u{h}" for h in range(n_hubs)]
    followers = {h: [f"u{n_hubs + k * fan + j}" for j in range(fan)] for k, h in enumerate(hubs)}
    social = SocialGraph(directed=True)
    for h, fs in followers.items():
        for f in fs:
            social.add_edge(f, h)
    acts = []
    truth = {}
    span = max(window_length - W - 1, 1)
    for idx, card in enumerate(cards):
        c = f"c{idx}"
        h = hubs[idx % n_hubs]
        t0 = start + int(rng.integers(0, span))
        acts.append(SocialActivity(UC, h, c, t0))
        chosen = rng.choice(fan, size=card, replace=False) if card else []
        for step, j in enumerate(chosen, start=1):
            acts.append(SocialActivity(UC, followers[h][j], c, t0 + step))
        truth[c] = card
    acts.sort(key=lambda a: a.timestamp)
    return SyntheticStream(acts, social, truth, UC)


def planted_stream(hist, mode: str = UU, seed: int = 0, **kw) -> SyntheticStream:
    if mode == UU:
        return planted_uu(hist, seed, **kw)
    if mode == UC:
        return planted_uc(hist, seed, **kw)
    raise ValueError(f"unknown mode {mode!r}")


def shuffle_stream(graph, seed: int = 0, window_length: int = 1000, start: int = 0,
                   repeats: int = 1) -> SyntheticStream:
    """Edges of an undirected graph in random order with sorted timestamps.

    ``graph`` may be a networkx graph or an edge list of integer or string
    node labels.  With ``repeats > 1`` each edge appears that many times.
    """
    rng = np.random.default_rng(seed)
    edge_list = list(graph.edges()) if hasattr(graph, "edges") else list(graph)
    named = [(_label(a), _label(b)) for a, b in edge_list if a != b]
    social = SocialGraph.from_edges(named, directed=False)
    acts = _emit(named * repeats, UU, rng, start, window_length)
    return SyntheticStream(acts, social, {}, UU)


def _label(x) -> str:
    s = str(x)
    return s if s.startswith("u") else f"u{s}"


def clustered_edges(n: int, group_size: int, p_in: float, out_edges: int,
                    seed: int = 0) -> np.ndarray:
    """Integer edge array of a graph with dense random groups plus noise.

    Nodes are split into consecutive groups; each within-group pair is an
    edge with probability ``p_in`` and ``out_edges`` random pairs are added.
    """
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(group_size, k=1)
    groups = n // group_size
    offsets = np.repeat(np.arange(groups) * group_size, len(iu))
    a = np.tile(iu, groups) + offsets
    b = np.tile(ju, groups) + offsets
    keep = rng.random(len(a)) < p_in
    a, b = a[keep], b[keep]
    x = rng.integers(0, n, size=out_edges)
    y = rng.integers(0, n, size=out_edges)
    ok = x != y
    e = np.concatenate([np.stack([a, b], 1), np.stack([np.minimum(x, y), np.maximum(x, y)], 1)[ok]])
    return np.unique(e, axis=0)


def edges_to_stream(edges: np.ndarray, seed: int = 0, window_length: int = 1000,
                    start: int = 0) -> list[SocialActivity]:
    """Fast path: integer edge array to a randomly ordered uu stream."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(edges))
    ts = _timestamps(rng, len(edges), start, window_length)
    names = {}
    out = []
    for (a, b), t in zip(edges[order].tolist(), ts.tolist()):
        na = names.get(a) or names.setdefault(a, f"u{a}")
        nb = names.get(b) or names.setdefault(b, f"u{b}")
        out.append(SocialActivity(UU, na, nb, t))
    return out


def powerlaw_social(n: int, m: int = 3, p_triangle: float = 0.3, seed: int = 0) -> nx.Graph:
    return nx.powerlaw_cluster_graph(n, m, p_triangle, seed=seed)


def truncate_stream(activities, W: int) -> list[SocialActivity]:
    """Drop uu activities that would push any user's cardinality above ``W``."""
    adj: dict = defaultdict(set)
    card: Counter = Counter()
    out = []
    for a in activities:
        if a.kind != UU:
            out.append(a)
            continue
        u, v = a.source, a.target
        if v in adj[u]:
            out.append(a)
            continue
        common = adj[u] & adj[v]
        k = len(common)
        if k and (card[u] + k > W or card[v] + k > W or any(card[w] >= W for w in common)):
            continue
        adj[u].add(v)
        adj[v].add(u)
        card[u] += k
        card[v] += k
        for w in common:
            card[w] += 1
        out.append(a)
    return out


def social_window(social: nx.Graph, n_interactions: int, rng, start: int, length: int) -> list:
    """Interactions drawn uniformly (with repetition) along social edges."""
    edges = np.array(social.edges())
    picks = edges[rng.integers(0, len(edges), size=n_interactions)]
    ts = _timestamps(rng, n_interactions, start, length)
    return [SocialActivity(UU, _label(a), _label(b), int(t)) for (a, b), t in zip(picks.tolist(), ts.tolist())]


def burst_stream(social: nx.Graph, n_windows: int, per_window: int, burst_windows,
                 burst_triangles: int, window_length: int = 1000,
                 seed: int = 0) -> SyntheticStream:
    """Windows of background interactions with planted triangle bursts.

    Background windows draw ``per_window`` interactions along random social
    edges; each window in ``burst_windows`` additionally receives the three
    interactions of ``burst_triangles`` random social triangles.
    """
    rng = np.random.default_rng(seed)
    bursts = set(burst_windows)
    tri_list = [tuple(sorted(t)) for t in _social_triangles(social)]
    if bursts and not tri_list:
        raise InfeasibleError("social graph has no triangles to plant")
    acts = []
    for w in range(n_windows):
        start = w * window_length
        win = social_window(social, per_window, rng, start, window_length)
        if w in bursts:
            picks = rng.choice(len(tri_list), size=burst_triangles,
                               replace=burst_triangles > len(tri_list))
            extra = []
            for i in picks.tolist():
                a, b, c = tri_list[i]
                extra.extend([(a, b), (b, c), (a, c)])
            ts = _timestamps(rng, len(extra), start, window_length)
            win += [SocialActivity(UU, _label(x), _label(y), int(t)) for (x, y), t in zip(extra, ts)]
            win.sort(key=lambda a: a.timestamp)
        acts.extend(win)
    sg = SocialGraph.from_edges(((_label(a), _label(b)) for a, b in social.edges()), directed=False)
    return SyntheticStream(acts, sg, {}, UU)


def _social_triangles(g: nx.Graph):
    for u in g:
        for v in g[u]:
            if v <= u:
                continue
            for w in set(g[u]) & set(g[v]):
                if w > v:
                    yield u, v, w
