"""sqlite3 cache of Manin symbol spaces, keyed by (format version, N)."""

from __future__ import annotations

import hashlib
import json
import logging
import sqlite3
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Union

import pandas as pd

from ..modular_symbols import PAYLOAD_SCHEMA, ManinSymbolSpace

logger = logging.getLogger(__name__)

CACHE_FILE = "spaces.sqlite"


def space_key(N: int, version: str = PAYLOAD_SCHEMA) -> str:
    return hashlib.sha256(f"{version}:{N}".encode()).hexdigest()


class SpaceCache:
    """Symbol spaces stored as JSON payloads in ``<directory>/spaces.sqlite``."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / CACHE_FILE
        self._lock = threading.Lock()
        with self._connect() as conn:
            conn.execute(
                "CREATE TABLE IF NOT EXISTS spaces (key TEXT PRIMARY KEY, level INTEGER NOT NULL, payload TEXT NOT NULL)"
            )

    @contextmanager
    def _connect(self) -> Iterator[sqlite3.Connection]:
        """One connection per operation: committed on success, always closed."""
        conn = sqlite3.connect(self.path)
        try:
            with conn:
                yield conn
        finally:
            conn.close()

    def load(self, N: int) -> Optional[ManinSymbolSpace]:
        with self._lock, self._connect() as conn:
            row = conn.execute("SELECT payload FROM spaces WHERE key = ?", (space_key(N),)).fetchone()
        if row is None:
            return None
        try:
            space = ManinSymbolSpace.from_payload(json.loads(row[0]))
        except (ValueError, KeyError) as exc:
            logger.warning("Ignoring unreadable cache entry for N=%d: %s", N, exc)
            return None
        logger.info("Cache hit for the level %d symbol space", N)
        return space

    def store(self, space: ManinSymbolSpace) -> None:
        payload = json.dumps(space.to_payload(), sort_keys=True)
        with self._lock, self._connect() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO spaces (key, level, payload) VALUES (?, ?, ?)",
                (space_key(space.N), space.N, payload),
            )
        logger.info("Cached the level %d symbol space in %s", space.N, self.path)

    def entries(self) -> pd.DataFrame:
        """One row per cached level with its payload size in bytes."""
        with self._lock, self._connect() as conn:
            return pd.read_sql("SELECT level, length(payload) AS size FROM spaces ORDER BY level", conn)
