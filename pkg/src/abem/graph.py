"""Network snapshots, temporal loading, deltas and synthetic generators.

A :class:`Snapshot` is a simple graph frozen at one time step. A
:class:`DynamicNetwork` is an ordered sequence of snapshots over the same
id space. Node ids are arbitrary non-negative integers and are never
remapped in reported results; an internal contiguous index is built per
snapshot purely as a memory/speed compaction and is invisible to callers.

Snapshots are immutable after construction and safe to share across
worker threads.
"""

from __future__ import annotations

import gzip
import hashlib
import logging
import math
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

log = logging.getLogger(__name__)

__all__ = [
    "GraphError",
    "EdgeListParseError",
    "MissingNodeError",
    "Snapshot",
    "SnapshotDelta",
    "DynamicNetwork",
    "degree",
    "neighbors",
    "diff",
    "apply_delta",
    "load_edge_list",
    "load_temporal_edge_list",
    "quarter_buckets",
    "fixed_width_buckets",
    "value_buckets",
    "generate_synthetic",
]


class GraphError(Exception):
    """Base class for graph construction and query errors."""


class EdgeListParseError(GraphError):
    """A malformed line was encountered while parsing an edge list."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class MissingNodeError(GraphError):
    def __init__(self, node):
        super().__init__(f"node {node!r} not present in snapshot")
        self.node = node


def _canonical_edge(u: int, v: int, directed: bool) -> tuple[int, int]:
    if directed or u <= v:
        return (u, v)
    return (v, u)


class Snapshot:
    """One simple graph at a single time step.

    ``adjacency`` maps every node to a sorted tuple of neighbours
    (out-neighbours when directed). Self-loops and duplicate edges are
    rejected at construction; loaders filter them beforehand.
    """

    __slots__ = (
        "time_index",
        "directed",
        "nodes",
        "adjacency",
        "_edges",
        "_fingerprint",
        "_order",
        "_index",
        "_adj_idx",
    )

    def __init__(
        self,
        time_index: int,
        nodes: Iterable[int],
        edges: Iterable[tuple[int, int]],
        directed: bool = False,
    ):
        if time_index < 0:
            raise GraphError("time_index must be non-negative")
        node_set = set(nodes)
        canon: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if u not in node_set or v not in node_set:
                raise GraphError(f"edge ({u}, {v}) references a missing node")
            canon.add(_canonical_edge(u, v, directed))

        adj: dict[int, list[int]] = {n: [] for n in sorted(node_set)}
        for u, v in canon:
            adj[u].append(v)
            if not directed:
                adj[v].append(u)

        self.time_index = time_index
        self.directed = directed
        self.nodes: frozenset[int] = frozenset(node_set)
        self.adjacency: dict[int, tuple[int, ...]] = {
            n: tuple(sorted(vs)) for n, vs in adj.items()
        }
        self._edges: frozenset[tuple[int, int]] = frozenset(canon)
        self._fingerprint: str | None = None
        self._order: tuple[int, ...] | None = None
        self._index: dict[int, int] | None = None
        self._adj_idx: list[tuple[int, ...]] | None = None

    # -- basic queries ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def edges(self) -> frozenset[tuple[int, int]]:
        """Canonical edge set: (u, v) with u <= v when undirected."""
        return self._edges

    def has_node(self, v: int) -> bool:
        return v in self.nodes

    def degree(self, v: int) -> int:
        """Degree of ``v`` (out-degree when directed)."""
        try:
            return len(self.adjacency[v])
        except KeyError:
            raise MissingNodeError(v) from None

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Sorted neighbours of ``v`` (out-neighbours when directed)."""
        try:
            return self.adjacency[v]
        except KeyError:
            raise MissingNodeError(v) from None

    # -- equality / identity ----------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Snapshot):
            return NotImplemented
        return (
            self.time_index == other.time_index
            and self.directed == other.directed
            and self.nodes == other.nodes
            and self._edges == other._edges
        )

    def __hash__(self):
        return hash((self.time_index, self.directed, self.nodes, self._edges))

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return (
            f"Snapshot(t={self.time_index}, {kind}, "
            f"n={self.node_count}, m={self.edge_count})"
        )

    @property
    def fingerprint(self) -> str:
        """Stable content hash used for caching and seed derivation."""
        if self._fingerprint is None:
            h = hashlib.blake2b(digest_size=16)
            h.update(f"{self.time_index}|{int(self.directed)}|".encode())
            h.update(",".join(map(str, sorted(self.nodes))).encode())
            h.update(b"|")
            h.update(";".join(f"{u},{v}" for u, v in sorted(self._edges)).encode())
            self._fingerprint = h.hexdigest()
        return self._fingerprint

    # -- compact index for simulation (internal) --------------------------

    def _compiled(self) -> tuple[tuple[int, ...], dict[int, int], list[tuple[int, ...]]]:
        if self._adj_idx is None:
            order = tuple(sorted(self.nodes))
            index = {n: i for i, n in enumerate(order)}
            self._order = order
            self._index = index
            self._adj_idx = [
                tuple(index[w] for w in self.adjacency[n]) for n in order
            ]
        return self._order, self._index, self._adj_idx  # type: ignore[return-value]


def degree(s: Snapshot, v: int) -> int:
    """Degree of ``v`` in ``s`` (out-degree when directed)."""
    return s.degree(v)


def neighbors(s: Snapshot, v: int) -> set[int]:
    """Neighbour set of ``v`` (out-neighbours when directed)."""
    return set(s.neighbors(v))


@dataclass(frozen=True)
class SnapshotDelta:
    """Set-difference between two snapshots over the same id space."""

    nodes_added: frozenset[int]
    nodes_removed: frozenset[int]
    edges_added: frozenset[tuple[int, int]]
    edges_removed: frozenset[tuple[int, int]]

    @property
    def empty(self) -> bool:
        return not (
            self.nodes_added
            or self.nodes_removed
            or self.edges_added
            or self.edges_removed
        )


def diff(earlier: Snapshot, later: Snapshot) -> SnapshotDelta:
    """Delta that transforms ``earlier`` into ``later``.

    Both snapshots must share the same directedness.
    """
    if earlier.directed != later.directed:
        raise GraphError("cannot diff a directed snapshot against an undirected one")
    return SnapshotDelta(
        nodes_added=frozenset(later.nodes - earlier.nodes),
        nodes_removed=frozenset(earlier.nodes - later.nodes),
        edges_added=frozenset(later.edges() - earlier.edges()),
        edges_removed=frozenset(earlier.edges() - later.edges()),
    )


def apply_delta(earlier: Snapshot, delta: SnapshotDelta, time_index: int) -> Snapshot:
    """Apply ``delta`` to ``earlier``, producing the later snapshot."""
    nodes = (set(earlier.nodes) - set(delta.nodes_removed)) | set(delta.nodes_added)
    edges = (set(earlier.edges()) - set(delta.edges_removed)) | set(delta.edges_added)
    return Snapshot(time_index, nodes, edges, directed=earlier.directed)


class DynamicNetwork:
    """Ordered snapshot sequence with strictly increasing time indices."""

    def __init__(self, snapshots: Sequence[Snapshot]):
        snaps = list(snapshots)
        if not snaps:
            raise GraphError("a dynamic network needs at least one snapshot")
        for a, b in zip(snaps, snaps[1:]):
            if b.time_index <= a.time_index:
                raise GraphError("snapshot time indices must strictly increase")
            if a.directed != b.directed:
                raise GraphError("snapshots must share directedness")
        self.snapshots: tuple[Snapshot, ...] = tuple(snaps)
        self.deltas: tuple[SnapshotDelta, ...] = tuple(
            diff(a, b) for a, b in zip(snaps, snaps[1:])
        )

    def __len__(self) -> int:
        return len(self.snapshots)

    def __iter__(self) -> Iterator[Snapshot]:
        return iter(self.snapshots)

    def __getitem__(self, i: int) -> Snapshot:
        return self.snapshots[i]


# -- edge-list parsing -----------------------------------------------------


def _read_text(source) -> str:
    """Read ``source`` (path, bytes or file object) as UTF-8 text.

    Gzip-compressed content is decompressed transparently, detected by
    magic bytes rather than file name.
    """
    if isinstance(source, (str, Path)):
        data: bytes | str = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    if isinstance(data, str):
        return data
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data.decode("utf-8")


def _parse_edge_lines(text: str, fields: int):
    """Yield (line_number, tokens) for non-comment, non-blank lines."""
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != fields:
            raise EdgeListParseError(
                f"expected {fields} whitespace-separated tokens, got {len(tokens)}", i
            )
        try:
            values = tuple(int(t) for t in tokens)
        except ValueError:
            raise EdgeListParseError(f"non-integer token in {tokens!r}", i) from None
        yield i, values


def load_edge_list(source, directed: bool = False) -> Snapshot:
    """Parse a whitespace-separated ``u v`` edge list into a Snapshot.

    Lines starting with ``#`` are comments. Duplicate lines collapse to a
    single edge, self-loop lines are dropped (a count is logged), and an
    input with no surviving edges is an error.
    """
    text = _read_text(source)
    edges: set[tuple[int, int]] = set()
    nodes: set[int] = set()
    self_loops = 0
    for _, (u, v) in _parse_edge_lines(text, 2):
        if u == v:
            self_loops += 1
            continue
        nodes.add(u)
        nodes.add(v)
        edges.add(_canonical_edge(u, v, directed))
    if self_loops:
        log.warning("dropped %d self-loop line(s) while loading edge list", self_loops)
    if not edges:
        raise GraphError("edge list contains no usable edges")
    return Snapshot(0, nodes, edges, directed=directed)


# -- temporal loading ------------------------------------------------------


def quarter_buckets() -> Callable[[int], int]:
    """Bucket rule mapping unix timestamps to calendar quarters (UTC)."""

    def rule(ts: int) -> int:
        dt = datetime.fromtimestamp(ts, tz=timezone.utc)
        return dt.year * 4 + (dt.month - 1) // 3

    return rule


def fixed_width_buckets(width: int, origin: int = 0) -> Callable[[int], int]:
    """Bucket rule splitting time into windows of ``width`` seconds."""
    if width <= 0:
        raise ValueError("bucket width must be positive")

    def rule(ts: int) -> int:
        return (ts - origin) // width

    return rule


def value_buckets() -> Callable[[int], int]:
    """Bucket rule treating the timestamp itself as the bucket index."""
    return lambda ts: ts


def load_temporal_edge_list(
    source,
    bucket_of: Callable[[int], int],
    directed: bool = False,
    join_quit: bool = True,
) -> DynamicNetwork:
    """Parse ``u v unix_timestamp`` lines into one snapshot per bucket.

    Each non-empty bucket becomes a snapshot; time indices are renumbered
    consecutively from 0 in bucket order. With ``join_quit`` enabled a
    node is present in every snapshot between its first and last observed
    interaction, even in buckets where it has no edges. The bucket rule
    must be monotone over the observed timestamps.
    """
    text = _read_text(source)
    per_bucket: dict[int, set[tuple[int, int]]] = {}
    ts_to_bucket: dict[int, int] = {}
    first_seen: dict[int, int] = {}
    last_seen: dict[int, int] = {}
    self_loops = 0
    for i, (u, v, ts) in _parse_edge_lines(text, 3):
        if ts in ts_to_bucket:
            b = ts_to_bucket[ts]
        else:
            try:
                b = int(bucket_of(ts))
            except Exception as exc:
                raise EdgeListParseError(f"bucket rule failed on {ts}: {exc}", i) from exc
            ts_to_bucket[ts] = b
        if u == v:
            self_loops += 1
            continue
        per_bucket.setdefault(b, set()).add(_canonical_edge(u, v, directed))
        for n in (u, v):
            if n not in first_seen or b < first_seen[n]:
                first_seen[n] = b
            if n not in last_seen or b > last_seen[n]:
                last_seen[n] = b
    if self_loops:
        log.warning(
            "dropped %d self-loop line(s) while loading temporal edge list", self_loops
        )
    if not per_bucket:
        raise GraphError("temporal edge list contains no usable edges")

    stamps = sorted(ts_to_bucket)
    for a, b in zip(stamps, stamps[1:]):
        if ts_to_bucket[b] < ts_to_bucket[a]:
            raise GraphError("bucket rule is not monotone over observed timestamps")

    snaps = []
    for idx, b in enumerate(sorted(per_bucket)):
        edges = per_bucket[b]
        nodes = {n for e in edges for n in e}
        if join_quit:
            nodes |= {
                n for n in first_seen if first_seen[n] <= b <= last_seen[n]
            }
        snaps.append(Snapshot(idx, nodes, edges, directed=directed))
    return DynamicNetwork(snaps)


# -- synthetic generators ---------------------------------------------------


def _erdos_renyi_edges(n: int, p: float, rng: random.Random) -> set[tuple[int, int]]:
    """G(n, p) edges by geometric skip-sampling over the pair sequence."""
    edges: set[tuple[int, int]] = set()
    if p <= 0.0:
        return edges
    if p >= 1.0:
        return {(u, v) for u in range(n) for v in range(u + 1, n)}
    logq = math.log(1.0 - p)
    v, w = 1, -1
    while v < n:
        w += 1 + int(math.log(1.0 - rng.random()) / logq)
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            edges.add((w, v))
    return edges


def _barabasi_albert_edges(n: int, m: int, rng: random.Random) -> set[tuple[int, int]]:
    """Preferential attachment seeded with a complete graph on m nodes.

    Every later node attaches to m distinct existing nodes drawn in
    proportion to degree, so the final edge count is exactly
    C(m, 2) + m * (n - m).
    """
    edges: set[tuple[int, int]] = set()
    repeated: list[int] = []
    for u in range(m):
        for v in range(u + 1, m):
            edges.add((u, v))
            repeated.append(u)
            repeated.append(v)
    for v in range(m, n):
        targets: set[int] = set()
        while len(targets) < m:
            if repeated:
                targets.add(repeated[rng.randrange(len(repeated))])
            else:
                targets.add(rng.randrange(v))
        for t in sorted(targets):
            edges.add(_canonical_edge(t, v, directed=False))
            repeated.append(t)
            repeated.append(v)
    return edges


def generate_synthetic(
    model: str,
    n: int,
    *,
    p: float | None = None,
    m: int | None = None,
    rng_seed: int = 0,
) -> Snapshot:
    """Generate an undirected synthetic snapshot with nodes 0..n-1.

    ``model`` is ``"erdos_renyi"`` (requires ``p``) or
    ``"barabasi_albert"`` (requires ``m``). Deterministic for a fixed
    ``rng_seed``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(rng_seed)
    if model == "erdos_renyi":
        if p is None or not 0.0 <= p <= 1.0:
            raise ValueError("erdos_renyi requires p in [0, 1]")
        edges = _erdos_renyi_edges(n, p, rng)
    elif model == "barabasi_albert":
        if m is None or not 1 <= m < n:
            raise ValueError("barabasi_albert requires 1 <= m < n")
        edges = _barabasi_albert_edges(n, m, rng)
    else:
        raise ValueError(f"unknown synthetic model {model!r}")
    return Snapshot(0, range(n), edges, directed=False)
