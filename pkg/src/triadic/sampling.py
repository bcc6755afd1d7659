"""Single-pass stream samplers and the reduction to observation vectors.

* ITS keeps each activity independently with probability ``p`` and checks
  a user pair's social edge with probability ``p_prime``.
* ITS-color hashes users (and contents) into ``N`` colors and keeps an
  activity iff both endpoints share a color.
* SGS samples users with probability ``p_n`` and keeps interactions along
  edges of the subgraphs induced by each sampled user and its neighbors;
  contents are sampled on first sight.

Decisions are pure functions of a seed and an identity: the stream position
for ITS coins, the node id for colors and node samples, and
``(content, user pair)`` for social-edge checks.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np

from .bloom import BloomFilter
from .errors import InputFormatError, ValidationError
from .oracle import triangle_counts
from .rng import NodeHasher, derive_key, index_uniform, index_uniforms
from .stream import UC, UU, SocialActivity, SocialGraph

ITS = "its"
ITS_COLOR = "its-color"
SGS = "sgs"
METHODS = (ITS, ITS_COLOR, SGS)


def _check_rate(name, value):
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class ItsConfig:
    p: float
    p_prime: float = 1.0
    seed: int = 0

    def __post_init__(self):
        _check_rate("p", self.p)
        _check_rate("p_prime", self.p_prime)


@dataclass(frozen=True)
class ItsColorConfig:
    N: int
    seed: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")

    @property
    def p(self) -> float:
        return 1.0 / self.N


@dataclass(frozen=True)
class SgsConfig:
    p_n: float
    seed: int = 0
    expected_contents: int = 100_000
    fp_rate: float = 0.01

    def __post_init__(self):
        _check_rate("p_n", self.p_n)


@dataclass
class SampledGraph:
    method: str
    config: object
    social: SocialGraph | None = None
    uu_edges: list = field(default_factory=list)
    uc_edges: list = field(default_factory=list)
    # (content, a, b) with a < b -> social adjacency found by the check
    checks: dict = field(default_factory=dict)
    verified_edges: set = field(default_factory=set)
    sampled_nodes: set | None = None
    sampled_contents: set | None = None
    # per content: user pairs whose check found a social edge
    pairs: dict = field(default_factory=lambda: defaultdict(list))
    offered: int = 0
    dropped_off_social: int = 0
    # per content: kept user -> earliest kept time
    _firsts: dict = field(default_factory=lambda: defaultdict(dict), repr=False)

    @property
    def kept(self) -> int:
        return len(self.uu_edges) + len(self.uc_edges)

    def content_users(self) -> dict:
        return self._firsts


def _pair(a, b):
    return (a, b) if a < b else (b, a)


class _PairChecker:
    """Memoized social-edge checks with a per-(content, pair) coin."""

    def __init__(self, seed: int, p_prime: float):
        self.p_prime = p_prime
        self._hash = NodeHasher(seed, "pair-check")

    def decide(self, content, a, b, social: SocialGraph):
        x, y = _pair(a, b)
        if self.p_prime < 1.0 and self._hash.uniform((content, x, y)) >= self.p_prime:
            return None
        return social.has_edge(x, y)


def its_verify_social_edge(cfg, pair, social: SocialGraph, content=None):
    """``None`` when the pair is not checked, else whether the edge exists."""
    p_prime = getattr(cfg, "p_prime", 1.0)
    return _PairChecker(cfg.seed, p_prime).decide(content, pair[0], pair[1], social)


class _Sampler:
    method = ""

    def __init__(self, config, social: SocialGraph | None, p_prime: float):
        self.config = config
        self.social = social
        self._checker = _PairChecker(config.seed, p_prime)
        self.graph = SampledGraph(self.method, config, social)

    def _keep_uc(self, a: SocialActivity):
        sg = self.graph
        sg.uc_edges.append((a.source, a.target, a.timestamp))
        users = sg._firsts[a.target]
        u = a.source
        if u in users:
            if a.timestamp < users[u]:
                users[u] = a.timestamp
            return
        users[u] = a.timestamp
        if self.social is None or len(users) < 2:
            return
        # only social neighbors can yield an edge, so scan the smaller side
        nbrs = self.social.neighbors(u)
        cand = [v for v in nbrs if v in users] if len(nbrs) < len(users) \
            else [v for v in users if v != u and v in nbrs]
        for v in cand:
            key = (a.target,) + _pair(u, v)
            if key in sg.checks:
                continue
            res = self._checker.decide(a.target, u, v, self.social)
            if res is None:
                continue
            sg.checks[key] = res
            if res:
                sg.pairs[a.target].append(key[1:])
                if self.social.follows(u, v):
                    sg.verified_edges.add((u, v))
                if self.social.follows(v, u):
                    sg.verified_edges.add((v, u))

    def offer(self, a: SocialActivity) -> bool:
        raise NotImplementedError

    def offer_all(self, activities) -> "SampledGraph":
        for a in activities:
            self.offer(a)
        return self.graph


class ItsSampler(_Sampler):
    method = ITS

    def __init__(self, config: ItsConfig, social: SocialGraph | None = None):
        super().__init__(config, social, config.p_prime)
        self._key = derive_key(config.seed, "its-edge")

    def offer(self, a: SocialActivity) -> bool:
        idx = self.graph.offered
        self.graph.offered += 1
        if self.config.p < 1.0 and index_uniform(self._key, idx) >= self.config.p:
            return False
        if a.kind == UU:
            self.graph.uu_edges.append((a.source, a.target, a.timestamp))
        else:
            self._keep_uc(a)
        return True

    def offer_all(self, activities) -> SampledGraph:
        acts = activities if isinstance(activities, list) else list(activities)
        start = self.graph.offered
        self.graph.offered += len(acts)
        if self.config.p < 1.0:
            keep = np.flatnonzero(index_uniforms(self._key, start, len(acts)) < self.config.p)
            acts = [acts[i] for i in keep.tolist()]
        uu = self.graph.uu_edges
        for a in acts:
            if a.kind == UU:
                uu.append((a.source, a.target, a.timestamp))
            else:
                self._keep_uc(a)
        return self.graph


class ItsColorSampler(_Sampler):
    method = ITS_COLOR

    def __init__(self, config: ItsColorConfig, social: SocialGraph | None = None):
        super().__init__(config, social, 1.0)
        self._hash = NodeHasher(config.seed, "color")
        self._colors: dict = {}

    def color(self, node) -> int:
        c = self._colors.get(node)
        if c is None:
            c = self._hash.bucket(node, self.config.N)
            self._colors[node] = c
        return c

    def offer(self, a: SocialActivity) -> bool:
        self.graph.offered += 1
        if self.config.N > 1 and self.color(a.source) != self.color(a.target):
            return False
        if a.kind == UU:
            self.graph.uu_edges.append((a.source, a.target, a.timestamp))
        else:
            self._keep_uc(a)
        return True


@dataclass
class SgsState:
    p_n: float
    sampled_users: set
    user_subgraphs: dict
    allowed_edges: set
    sampled_contents: set
    seen_contents: BloomFilter
    seed: int


def sgs_init(social: SocialGraph | None, p_n: float, seed: int = 0,
             expected_contents: int = 100_000, fp_rate: float = 0.01) -> SgsState:
    """Sample users and materialize the subgraph around each of them."""
    _check_rate("p_n", p_n)
    social = social if social is not None else SocialGraph(directed=False)
    h = NodeHasher(seed, "sgs-user")
    users = sorted(social.users)
    sampled = {u for u in users if p_n >= 1.0 or h.uniform(u) < p_n}
    subgraphs = {}
    allowed = set()
    for s in sampled:
        nbrs = social.neighbors(s)
        edges = {_pair(s, x) for x in nbrs}
        for x in nbrs:
            for y in social.neighbors(x) & nbrs:
                edges.add(_pair(x, y))
        subgraphs[s] = frozenset(edges)
        allowed |= edges
    return SgsState(p_n, sampled, subgraphs, allowed, set(),
                    BloomFilter(expected_contents, fp_rate, seed), seed)


class SgsSampler(_Sampler):
    method = SGS

    def __init__(self, config: SgsConfig, social: SocialGraph | None = None,
                 state: SgsState | None = None):
        super().__init__(config, social, 1.0)
        self.state = state or sgs_init(social, config.p_n, config.seed,
                                       config.expected_contents, config.fp_rate)
        self._content_hash = NodeHasher(config.seed, "sgs-content")
        self.graph.sampled_nodes = set(self.state.sampled_users)
        self.graph.sampled_contents = self.state.sampled_contents

    def offer(self, a: SocialActivity) -> bool:
        self.graph.offered += 1
        if a.kind == UU:
            return self._offer_uu(a)
        return self._offer_uc(a)

    def _offer_uu(self, a: SocialActivity) -> bool:
        if self.social is None or not self.social.has_edge(a.source, a.target):
            self.graph.dropped_off_social += 1
            return False
        if _pair(a.source, a.target) not in self.state.allowed_edges:
            return False
        self.graph.uu_edges.append((a.source, a.target, a.timestamp))
        return True

    def _offer_uc(self, a: SocialActivity) -> bool:
        st = self.state
        c = a.target
        if c not in st.sampled_contents:
            if st.seen_contents.add(c):
                return False
            if st.p_n < 1.0 and self._content_hash.uniform(c) >= st.p_n:
                return False
            st.sampled_contents.add(c)
        self._keep_uc(a)
        return True


def make_sampler(method: str, config, social: SocialGraph | None = None):
    if method == ITS:
        return ItsSampler(config, social)
    if method == ITS_COLOR:
        return ItsColorSampler(config, social)
    if method == SGS:
        return SgsSampler(config, social)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class TriangleStatistics:
    counts: np.ndarray
    W: int
    mode: str
    n_known: int | None = None
    clamped: int = 0

    @property
    def g_plus(self) -> np.ndarray:
        return self.counts[1:]

    @property
    def n_observed(self) -> int:
        return int(self.counts[1:].sum())

    def to_rows(self):
        return [(j, int(c)) for j, c in enumerate(self.counts)]


def sampled_cardinalities(sg: SampledGraph, mode: str) -> dict:
    """Triangle counts per node of the sampled graph under the oracle rules.

    Influence pairs count only when their social edge was verified during
    sampling.
    """
    if mode == UU:
        adj: dict = defaultdict(set)
        for u, v, _ in sg.uu_edges:
            adj[u].add(v)
            adj[v].add(u)
        cards = triangle_counts(adj)
        if sg.sampled_nodes is not None:
            return {u: cards.get(u, 0) for u in sg.sampled_nodes}
        return cards
    ver = sg.verified_edges
    directed = sg.social.directed if sg.social is not None else True
    firsts = sg.content_users()
    contents = firsts.keys() if sg.sampled_contents is None else sg.sampled_contents
    cards = {}
    for c in contents:
        users = firsts.get(c, {})
        total = 0
        for x, y in sg.pairs.get(c, ()):
            tx, ty = users[x], users[y]
            if not directed or tx == ty:
                total += 1
            elif tx > ty:
                total += (x, y) in ver
            else:
                total += (y, x) in ver
        cards[c] = total
    return cards


def collect_statistics(sg: SampledGraph, W: int, mode: str) -> TriangleStatistics:
    """Histogram sampled triangle counts into ``g_0 .. g_W`` (clamping at W)."""
    if W < 1:
        raise ValueError("W must be >= 1")
    if mode == UC and sg.social is None:
        raise ValidationError("uc statistics need the social graph used while sampling")
    cards = sampled_cardinalities(sg, mode)
    vals = np.fromiter(cards.values(), dtype=np.int64, count=len(cards))
    clamped = int(np.sum(vals > W))
    counts = np.bincount(np.minimum(vals, W), minlength=W + 1).astype(float)
    return TriangleStatistics(counts, W, mode, clamped=clamped)


def calibrate_g0(stats: TriangleStatistics, n: int) -> TriangleStatistics:
    """Fold nodes that left no trace into ``g_0`` given the population size."""
    seen = float(stats.counts[1:].sum())
    if n < seen:
        raise InputFormatError(f"population {n} is smaller than the {int(seen)} nodes "
                               "observed with sampled triangles")
    counts = stats.counts.copy()
    counts[0] = n - seen
    return TriangleStatistics(counts, stats.W, stats.mode, n_known=int(n), clamped=stats.clamped)


def write_sampled_graph(sg: SampledGraph, path, header: str | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for u, v, t in sg.uu_edges:
            fh.write(f"uu {u} {v} {t}\n")
        for u, c, t in sg.uc_edges:
            fh.write(f"uc {u} {c} {t}\n")
        for a, b in sorted(sg.verified_edges):
            fh.write(f"# verified-edge {a} {b}\n")


def config_dict(config) -> dict:
    return asdict(config)
