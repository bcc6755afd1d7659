"""Activity stream parsing, windowing and multigraph construction.

Stream files hold one activity per line::

    uu u1 u2 100      # user u1 interacts with user u2 at t=100
    uc u1 c7 105      # user u1 interacts with content c7

Users carry a ``u`` prefix and contents a ``c`` prefix, which keeps the two id
spaces disjoint.  Social graph files hold ``follower followee`` pairs; a
``# undirected`` header line switches to friendship semantics.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import OrderingError, ParseError, ValidationError

UU = "uu"
UC = "uc"
KINDS = (UU, UC)
USER_PREFIX = "u"
CONTENT_PREFIX = "c"


@dataclass(frozen=True, slots=True)
class SocialActivity:
    kind: str
    source: str
    target: str
    timestamp: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown activity kind {self.kind!r}")
        if not is_user(self.source):
            raise ValidationError(f"source {self.source!r} is not a user id")
        if self.kind == UU and not is_user(self.target):
            raise ValidationError(f"target {self.target!r} of a uu activity is not a user id")
        if self.kind == UC and not is_content(self.target):
            raise ValidationError(f"target {self.target!r} of a uc activity is not a content id")
        if self.kind == UU and self.source == self.target:
            raise ValidationError(f"self-loop on {self.source}")
        if self.timestamp < 0:
            raise ValidationError("timestamps must be nonnegative")

    def to_line(self) -> str:
        return f"{self.kind} {self.source} {self.target} {self.timestamp}"


def is_user(ident: str) -> bool:
    return len(ident) > 1 and ident[0] == USER_PREFIX


def is_content(ident: str) -> bool:
    return len(ident) > 1 and ident[0] == CONTENT_PREFIX


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_activity(line: str, lineno: int | None = None) -> SocialActivity:
    parts = _strip(line).split()
    if len(parts) != 4:
        raise ParseError(f"expected 4 fields, got {len(parts)}: {line.strip()!r}", lineno)
    kind, src, dst, ts = parts
    if kind not in KINDS:
        raise ParseError(f"unknown activity kind {kind!r}", lineno)
    try:
        t = int(ts)
    except ValueError:
        raise ParseError(f"timestamp {ts!r} is not an integer", lineno) from None
    if t < 0 or t >= 1 << 64:
        raise ParseError(f"timestamp {t} outside uint64 range", lineno)
    try:
        return SocialActivity(kind, src, dst, t)
    except ValidationError as exc:
        if lineno is None:
            raise
        raise ValidationError(f"line {lineno}: {exc}") from None


def iter_activities(lines: Iterable[str]) -> Iterator[SocialActivity]:
    for lineno, line in enumerate(lines, start=1):
        if not _strip(line):
            continue
        yield parse_activity(line, lineno)


def read_stream(path) -> list[SocialActivity]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_activities(fh))


def write_stream(activities: Iterable[SocialActivity], path, header: str | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for a in activities:
            fh.write(a.to_line() + "\n")


class SocialGraph:
    """Follow (directed) or friendship (undirected) relations among users.

    In the directed case an edge ``a -> b`` means ``a`` follows ``b``.
    """

    def __init__(self, directed: bool = True):
        self.directed = directed
        self.succ: dict[str, set] = defaultdict(set)
        self.pred: dict[str, set] = defaultdict(set) if directed else self.succ

    @classmethod
    def from_edges(cls, edges, directed: bool = True) -> "SocialGraph":
        g = cls(directed)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    def add_edge(self, a: str, b: str):
        if a == b:
            raise ValidationError(f"self-loop on {a} in social graph")
        if not (is_user(a) and is_user(b)):
            raise ValidationError(f"social edge ({a}, {b}) must join user ids")
        self.succ[a].add(b)
        self.pred[b].add(a)

    def follows(self, a: str, b: str) -> bool:
        s = self.succ.get(a)
        return s is not None and b in s

    def has_edge(self, a: str, b: str) -> bool:
        """Adjacent in either direction."""
        return self.follows(a, b) or self.follows(b, a)

    def neighbors(self, u: str) -> set:
        if not self.directed:
            return self.succ.get(u, set())
        return self.succ.get(u, set()) | self.pred.get(u, set())

    def influences(self, earlier: tuple, later: tuple) -> bool:
        """Whether a ``(user, time)`` pair counts as an influence edge.

        The later interactor must follow the earlier one; equal times count
        if either follows the other.  Undirected graphs only need adjacency.
        """
        (a, ta), (b, tb) = earlier, later
        if not self.directed or ta == tb:
            return self.has_edge(a, b)
        if ta > tb:
            a, b = b, a
        return self.follows(b, a)

    @property
    def users(self) -> set:
        return set(self.succ) | set(self.pred)

    def edges(self):
        seen = set()
        for a, nbrs in self.succ.items():
            for b in nbrs:
                if not self.directed:
                    key = (a, b) if a < b else (b, a)
                    if key in seen:
                        continue
                    seen.add(key)
                    yield key
                else:
                    yield a, b

    def n_edges(self) -> int:
        total = sum(len(s) for s in self.succ.values())
        return total if self.directed else total // 2

    def __len__(self) -> int:
        return len(self.users)


def read_social_graph(path) -> SocialGraph:
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    directed = not any(line.strip().lower() == "# undirected" for line in lines)
    g = SocialGraph(directed)
    for lineno, line in enumerate(lines, start=1):
        body = _strip(line)
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 user ids, got {len(parts)}", lineno)
        try:
            g.add_edge(*parts)
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    return g


def write_social_graph(g: SocialGraph, path, header: str | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        if not g.directed:
            fh.write("# undirected\n")
        for a, b in g.edges():
            fh.write(f"{a} {b}\n")


@dataclass
class ActivityWindow:
    window_index: int
    start: int
    end: int
    activities: list = field(default_factory=list)

    def __len__(self):
        return len(self.activities)


def _reordered(stream, horizon: int) -> Iterator[SocialActivity]:
    """Sort a nearly ordered stream by holding items ``horizon`` ticks back."""
    heap: list = []
    seq = 0
    latest = None
    emitted = None
    for a in stream:
        latest = a.timestamp if latest is None else max(latest, a.timestamp)
        if emitted is not None and a.timestamp < emitted:
            raise OrderingError(f"timestamp {a.timestamp} arrived after {emitted} "
                                f"was released (horizon {horizon})")
        heapq.heappush(heap, (a.timestamp, seq, a))
        seq += 1
        while heap and heap[0][0] <= latest - horizon:
            emitted = heap[0][0]
            yield heapq.heappop(heap)[2]
    while heap:
        yield heapq.heappop(heap)[2]


def window_partition(stream: Iterable[SocialActivity], window_length: int,
                     reorder_horizon: int | None = None) -> Iterator[ActivityWindow]:
    """Group a stream into consecutive half-open windows ``[kL, (k+1)L)``.

    Windows run from the first activity's window onward; gaps produce empty
    windows.  Decreasing timestamps raise :class:`OrderingError` unless a
    reorder horizon is given.
    """
    if window_length <= 0:
        raise ValueError("window_length must be positive")
    if reorder_horizon is not None:
        if reorder_horizon < 0:
            raise ValueError("reorder_horizon must be nonnegative")
        stream = _reordered(stream, reorder_horizon)
    current = None
    prev_t = None
    for a in stream:
        if prev_t is not None and a.timestamp < prev_t:
            raise OrderingError(f"timestamp {a.timestamp} follows {prev_t}")
        prev_t = a.timestamp
        k = a.timestamp // window_length
        if current is None:
            current = ActivityWindow(k, k * window_length, (k + 1) * window_length)
        while k > current.window_index:
            yield current
            j = current.window_index + 1
            current = ActivityWindow(j, j * window_length, (j + 1) * window_length)
        current.activities.append(a)
    if current is not None:
        yield current


@dataclass
class InteractionMultigraph:
    mode: str
    nodes: set
    edges: list
    social: SocialGraph | None = None
    contents: set = field(default_factory=set)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def simple_adjacency(self) -> dict:
        """Deduplicated undirected adjacency of a UU multigraph."""
        adj: dict = defaultdict(set)
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def first_times(self) -> dict:
        """Per content, each user's earliest interaction time."""
        out: dict = defaultdict(dict)
        for u, c, t in self.edges:
            d = out[c]
            if u not in d or t < d[u]:
                d[u] = t
        return out


def build_multigraph(window, mode: str, social: SocialGraph | None = None) -> InteractionMultigraph:
    """Multigraph of the window's activities of the given kind.

    Accepts an :class:`ActivityWindow` or any iterable of activities.
    """
    if mode not in KINDS:
        raise ValueError(f"mode must be one of {KINDS}")
    acts = window.activities if isinstance(window, ActivityWindow) else window
    edges = [(a.source, a.target, a.timestamp) for a in acts if a.kind == mode]
    if mode == UU:
        nodes = {u for e in edges for u in e[:2]}
        return InteractionMultigraph(UU, nodes, edges, social)
    users = {e[0] for e in edges}
    contents = {e[1] for e in edges}
    return InteractionMultigraph(UC, users | contents, edges, social, contents)
