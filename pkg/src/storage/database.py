"""
Link Database

SQLite-backed store of geo-localized nodes and link erasure statistics, with
shortest-hop path extraction and JSON snapshot persistence.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import json
import logging
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import networkx as nx
from dateutil.parser import isoparse

from src.analytics.erasure_analytics import PathProfile
from src.processors.topology_processor import TopologyProcessor
from src.storage.models import GeoLink, GeoNode, LinkObservation, Role

logger = logging.getLogger(__name__)

IN_MEMORY = ':memory:'

PathProvider = Callable[[nx.DiGraph, str, str], Optional[List[str]]]


def min_hop_path(graph: nx.DiGraph, source: str, sink: str) -> Optional[List[str]]:
    """
    Minimum-hop path; among equally short paths the lexicographically smallest chain wins.

    One breadth-first search from the sink over reversed links gives every
    node's hop distance, then the walk from the source takes the smallest
    successor that is one hop closer. Linear in the size of the graph.
    """
    if source not in graph or sink not in graph:
        return None
    distance = nx.single_source_shortest_path_length(graph.reverse(copy=False), sink)
    if source not in distance:
        return None

    chain = [source]
    while chain[-1] != sink:
        here = distance[chain[-1]]
        chain.append(min(nxt for nxt in graph.successors(chain[-1])
                         if distance.get(nxt) == here - 1))
    return chain


@dataclass
class PathResult:
    """Outcome of a path query; profile is None when no path exists."""
    found: bool
    nodes: List[str] = field(default_factory=list)
    profile: Optional[PathProfile] = None

    @property
    def hops(self) -> int:
        return max(0, len(self.nodes) - 1)


class GeoLinkDatabase:
    """
    SQLite wrapper for the geo-tagged link statistics.

    Every statement runs behind one re-entrant lock on the shared connection,
    so readers never see an ingest half applied.
    """

    def __init__(self, db_path: str = IN_MEMORY, alpha: float = 0.2,
                 path_provider: PathProvider = min_hop_path):
        """
        Initialize database connection settings.

        Args:
            db_path: Path to SQLite database file, or ':memory:'
            alpha: EWMA weight of the latest loss observation
            path_provider: Routing function used by extract_path
        """
        self.db_path = db_path
        self.alpha = alpha
        self.path_provider = path_provider
        self.processor = TopologyProcessor()
        self.conn = None
        self._lock = threading.RLock()

        # Ensure data directory exists
        if db_path != IN_MEMORY:
            Path(db_path).parent.mkdir(parents=True, exist_ok=True)

        self.init_database()

    def connect(self) -> sqlite3.Connection:
        """
        Create database connection.

        Returns:
            SQLite connection object
        """
        if self.conn is None:
            self.conn = sqlite3.connect(self.db_path, check_same_thread=False)
            self.conn.row_factory = sqlite3.Row
            self.conn.execute('PRAGMA foreign_keys = ON')
        return self.conn

    def close(self):
        """Close database connection."""
        if self.conn:
            self.conn.close()
            self.conn = None

    def init_database(self):
        """Create tables if they don't exist."""
        with self._lock:
            conn = self.connect()
            cursor = conn.cursor()

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS nodes (
                    id TEXT PRIMARY KEY,
                    lat REAL NOT NULL CHECK (lat BETWEEN -90 AND 90),
                    lon REAL NOT NULL CHECK (lon BETWEEN -180 AND 180),
                    role TEXT NOT NULL,
                    nc_capable INTEGER NOT NULL DEFAULT 1
                )
            ''')

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS links (
                    src TEXT NOT NULL REFERENCES nodes(id),
                    dst TEXT NOT NULL REFERENCES nodes(id),
                    delta REAL NOT NULL CHECK (delta BETWEEN 0 AND 1),
                    samples INTEGER NOT NULL DEFAULT 0 CHECK (samples >= 0),
                    updated_at TEXT,
                    PRIMARY KEY (src, dst),
                    CHECK (src <> dst)
                )
            ''')

            conn.commit()
        logger.debug(f"Link database initialized at {self.db_path}")

    def execute(self, query: str, params: tuple = ()) -> int:
        """
        Execute a query that modifies data (INSERT, UPDATE, DELETE).

        Args:
            query: SQL query with ? placeholders
            params: Values to substitute for placeholders

        Returns:
            Number of affected rows
        """
        with self._lock:
            conn = self.connect()
            cursor = conn.cursor()
            cursor.execute(query, params)
            conn.commit()
            return cursor.rowcount

    def fetch_one(self, query: str, params: tuple = ()) -> Optional[Dict]:
        """Execute a SELECT query and return one row as a dict, or None."""
        with self._lock:
            cursor = self.connect().cursor()
            cursor.execute(query, params)
            row = cursor.fetchone()
        return dict(row) if row else None

    def fetch_all(self, query: str, params: tuple = ()) -> List[Dict]:
        """Execute a SELECT query and return all rows as dicts."""
        with self._lock:
            cursor = self.connect().cursor()
            cursor.execute(query, params)
            rows = cursor.fetchall()
        return [dict(row) for row in rows]

    # Topology Operations

    def ingest(self, text: str) -> 'GeoLinkDatabase':
        """
        Load a topology document, replacing the current contents.

        Args:
            text: Topology JSON document

        Returns:
            self

        Raises:
            TopologyValidationError: If the document is rejected; nothing is written
        """
        nodes, links = self.processor.parse_document(text)
        with self._lock:
            conn = self.connect()
            with conn:
                conn.execute('DELETE FROM links')
                conn.execute('DELETE FROM nodes')
                conn.executemany(
                    'INSERT INTO nodes (id, lat, lon, role, nc_capable) VALUES (?, ?, ?, ?, ?)',
                    [(n.id, n.lat, n.lon, n.role.value, int(n.nc_capable)) for n in nodes])
                conn.executemany(
                    'INSERT INTO links (src, dst, delta, samples, updated_at) VALUES (?, ?, ?, ?, ?)',
                    [(l.src, l.dst, l.delta, l.samples, l.updated_at) for l in links])
        logger.info(f"Ingested {len(nodes)} nodes and {len(links)} links")
        return self

    def get_node(self, node_id: str) -> Optional[GeoNode]:
        row = self.fetch_one('SELECT * FROM nodes WHERE id = ?', (node_id,))
        return self._node(row) if row else None

    def get_link(self, src: str, dst: str) -> Optional[GeoLink]:
        row = self.fetch_one('SELECT * FROM links WHERE src = ? AND dst = ?', (src, dst))
        return GeoLink(**row) if row else None

    def list_nodes(self) -> List[GeoNode]:
        return [self._node(row) for row in self.fetch_all('SELECT * FROM nodes ORDER BY id')]

    def list_links(self) -> List[GeoLink]:
        return [GeoLink(**row) for row in self.fetch_all('SELECT * FROM links ORDER BY src, dst')]

    def nodes_by_role(self, role: Role) -> List[GeoNode]:
        rows = self.fetch_all('SELECT * FROM nodes WHERE role = ? ORDER BY id', (Role(role).value,))
        return [self._node(row) for row in rows]

    # Statistics Operations

    def update_stats(self, obs: LinkObservation) -> float:
        """
        Fold a loss observation into the link's erasure estimate.

        Args:
            obs: Observation on an existing link

        Returns:
            Updated delta

        Raises:
            ValueError: If the link is unknown
        """
        with self._lock:
            link = self.get_link(obs.src, obs.dst)
            if link is None:
                raise ValueError(f"No link {obs.src}->{obs.dst} in the database")
            delta = self.processor.calculate_ewma(link.delta, obs.loss_rate, self.alpha)
            stamp = obs.timestamp.isoformat() if obs.timestamp else link.updated_at
            self.execute('UPDATE links SET delta = ?, samples = samples + 1, updated_at = ? '
                         'WHERE src = ? AND dst = ?', (delta, stamp, obs.src, obs.dst))
        logger.debug(f"Link {obs.src}->{obs.dst}: delta {link.delta:.4f} -> {delta:.4f}")
        return delta

    def stale_links(self, max_age: timedelta, now: datetime) -> List[GeoLink]:
        """Links never updated or last updated more than max_age before now."""
        stale = []
        for link in self.list_links():
            if link.updated_at is None:
                stale.append(link)
                continue
            updated = isoparse(link.updated_at)
            if updated.tzinfo is None and now.tzinfo is not None:
                updated = updated.replace(tzinfo=now.tzinfo)
            if now - updated > max_age:
                stale.append(link)
        return stale

    # Path Operations

    def graph(self, nc_only: bool = False, keep: Tuple[str, ...] = ()) -> nx.DiGraph:
        """
        Directed link graph. With nc_only, nodes that cannot code are dropped
        unless listed in keep.
        """
        with self._lock:
            nodes, links = self.list_nodes(), self.list_links()
        graph = nx.DiGraph()
        for node in nodes:
            if nc_only and not node.nc_capable and node.id not in keep:
                continue
            graph.add_node(node.id)
        for link in links:
            if link.src in graph and link.dst in graph:
                graph.add_edge(link.src, link.dst, delta=link.delta)
        return graph

    def extract_path(self, source: str, sink: str, nc_only: bool = False) -> PathResult:
        """
        Route from source to sink and read the per-link erasure rates.

        Args:
            source: Source node id
            sink: Sink node id
            nc_only: Only route through relays that can code

        Returns:
            PathResult; found is False for a disconnected pair

        Raises:
            ValueError: If either endpoint is unknown or they coincide
        """
        with self._lock:
            for node_id in (source, sink):
                if self.get_node(node_id) is None:
                    raise ValueError(f"Unknown node {node_id!r}")
            if source == sink:
                raise ValueError(f"Source and sink are the same node {source!r}")
            graph = self.graph(nc_only=nc_only, keep=(source, sink))

        chain = self.path_provider(graph, source, sink)
        if not chain:
            logger.info(f"No path from {source} to {sink}")
            return PathResult(found=False)

        hops = list(zip(chain, chain[1:]))
        profile = PathProfile(deltas=tuple(graph.edges[a, b]['delta'] for a, b in hops),
                              labels=tuple(f"{a}->{b}" for a, b in hops))
        return PathResult(found=True, nodes=list(chain), profile=profile)

    # Persistence

    def snapshot(self) -> Dict[str, Any]:
        """Database contents in the topology document schema, in canonical order."""
        with self._lock:
            nodes, links = self.list_nodes(), self.list_links()
        return {
            'nodes': [node.to_dict() for node in nodes],
            'links': [link.to_dict() for link in links],
        }

    def persist(self, destination: str):
        """Write the snapshot as JSON."""
        Path(destination).parent.mkdir(parents=True, exist_ok=True)
        with open(destination, 'w', encoding='utf-8') as f:
            f.write(json.dumps(self.snapshot(), indent=2) + '\n')
        logger.info(f"Link database written to {destination}")

    @classmethod
    def load(cls, source: str, db_path: str = IN_MEMORY, **kwargs) -> 'GeoLinkDatabase':
        """Create a database from a JSON snapshot or topology document."""
        with open(source, 'r', encoding='utf-8') as f:
            text = f.read()
        return cls(db_path, **kwargs).ingest(text)

    def _node(self, row: Dict) -> GeoNode:
        return GeoNode(id=row['id'], lat=row['lat'], lon=row['lon'], role=Role(row['role']),
                       nc_capable=bool(row['nc_capable']))

    def __enter__(self):
        """Context manager entry."""
        self.connect()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Context manager exit."""
        self.close()
