"""
Repository Pattern:
Persistent state lives behind these classes. Services hand over domain
objects (normal-form keys, audit events); the store underneath is either a
directory of append-only JSONL files or a PostgreSQL key-value table.
"""

import json
import logging
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple

from config import AppConfig
from db import db_cursor
from errors import CacheError
from models import AuditEvent, NormalFormKey

logger = logging.getLogger(__name__)

CACHE_FORMAT = "reflexkit-cache"
CACHE_VERSION = 1

NF_NAMESPACE = "nf"
KSDB_NAMESPACE = "ksdb"


class KeyValueStore(ABC):
    @abstractmethod
    def get(self, namespace: str, key: str) -> Optional[str]:
        ...

    @abstractmethod
    def put(self, namespace: str, key: str, value: str) -> None:
        """Idempotent: an existing key keeps its first value."""

    @abstractmethod
    def items(self, namespace: str) -> Iterator[Tuple[str, str]]:
        ...

    def record_audit(self, event: AuditEvent) -> None:
        pass


class FileKeyValueStore(KeyValueStore):
    def __init__(self, root: Path) -> None:
        self.root = Path(root)
        self._loaded: Dict[str, Dict[str, str]] = {}

    def _path(self, namespace: str) -> Path:
        return self.root / f"{namespace}.jsonl"

    def _load(self, namespace: str) -> Dict[str, str]:
        if namespace in self._loaded:
            return self._loaded[namespace]
        data: Dict[str, str] = {}
        path = self._path(namespace)
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                header = f.readline()
                try:
                    meta = json.loads(header)
                except json.JSONDecodeError:
                    raise CacheError(f"{path}: missing cache header")
                if meta.get("format") != CACHE_FORMAT or meta.get("version") != CACHE_VERSION:
                    raise CacheError(
                        f"{path}: unsupported cache format {meta.get('format')!r} "
                        f"version {meta.get('version')!r}"
                    )
                for lineno, line in enumerate(f, start=2):
                    try:
                        rec = json.loads(line)
                        data.setdefault(rec["k"], rec["v"])
                    except (json.JSONDecodeError, KeyError, TypeError):
                        logger.warning("%s:%d: skipping unreadable cache line", path, lineno)
        self._loaded[namespace] = data
        return data

    def get(self, namespace: str, key: str) -> Optional[str]:
        return self._load(namespace).get(key)

    def put(self, namespace: str, key: str, value: str) -> None:
        data = self._load(namespace)
        if key in data:
            return
        path = self._path(namespace)
        self.root.mkdir(parents=True, exist_ok=True)
        fresh = not path.exists()
        with open(path, "a", encoding="utf-8") as f:
            if fresh:
                f.write(json.dumps({"format": CACHE_FORMAT, "version": CACHE_VERSION,
                                    "namespace": namespace}) + "\n")
            f.write(json.dumps({"k": key, "v": value}) + "\n")
        data[key] = value

    def items(self, namespace: str) -> Iterator[Tuple[str, str]]:
        return iter(sorted(self._load(namespace).items()))

    def record_audit(self, event: AuditEvent) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / "audit.jsonl", "a", encoding="utf-8") as f:
            f.write(json.dumps({
                "event_type": event.event_type,
                "payload": event.payload,
                "created_at": event.created_at.isoformat() if event.created_at else None,
            }) + "\n")


class PostgresKeyValueStore(KeyValueStore):
    def __init__(self, dsn: Optional[str]) -> None:
        self.dsn = dsn

    def get(self, namespace: str, key: str) -> Optional[str]:
        sql = """
        SELECT value FROM kv_store
        WHERE namespace = %s AND key = %s;
        """
        with db_cursor(dsn=self.dsn) as cur:
            cur.execute(sql, (namespace, key))
            row = cur.fetchone()
        return row["value"] if row else None

    def put(self, namespace: str, key: str, value: str) -> None:
        sql = """
        INSERT INTO kv_store (namespace, key, value)
        VALUES (%s, %s, %s)
        ON CONFLICT (namespace, key) DO NOTHING;
        """
        with db_cursor(dsn=self.dsn) as cur:
            cur.execute(sql, (namespace, key, value))

    def items(self, namespace: str) -> Iterator[Tuple[str, str]]:
        sql = """
        SELECT key, value FROM kv_store
        WHERE namespace = %s
        ORDER BY key;
        """
        with db_cursor(dsn=self.dsn) as cur:
            cur.execute(sql, (namespace,))
            rows = cur.fetchall()
        return iter([(r["key"], r["value"]) for r in rows])

    def record_audit(self, event: AuditEvent) -> None:
        sql = """
        INSERT INTO audit_log (event_type, payload)
        VALUES (%s, %s);
        """
        with db_cursor(dsn=self.dsn) as cur:
            cur.execute(sql, (event.event_type, event.payload))


class CacheStoreFactory:
    """
    RK_CACHE_BACKEND = 'file' | 'postgres'
    """

    @staticmethod
    def create(config: AppConfig) -> KeyValueStore:
        if config.cache.backend == "file":
            return FileKeyValueStore(config.cache.path)
        if config.cache.backend == "postgres":
            return PostgresKeyValueStore(config.db.dsn)
        raise CacheError("Unknown cache backend: %s" % config.cache.backend)


def _nf_to_json(nf: NormalFormKey) -> str:
    return json.dumps({"matrix": [list(r) for r in nf.canonical_matrix], "digest": nf.digest})


def _nf_from_json(text: str) -> NormalFormKey:
    rec = json.loads(text)
    return NormalFormKey(
        canonical_matrix=tuple(tuple(int(x) for x in r) for r in rec["matrix"]),
        digest=rec["digest"],
    )


class CacheRepo:
    def __init__(self, store: KeyValueStore) -> None:
        self.store = store

    def get_normal_form(self, point_key: str) -> Optional[NormalFormKey]:
        text = self.store.get(NF_NAMESPACE, point_key)
        return _nf_from_json(text) if text is not None else None

    def put_normal_form(self, point_key: str, nf: NormalFormKey) -> None:
        self.store.put(NF_NAMESPACE, point_key, _nf_to_json(nf))

    def get_ksdb_index(self, digest: str) -> Optional[int]:
        text = self.store.get(KSDB_NAMESPACE, digest)
        return int(text) if text is not None else None

    def put_ksdb_index(self, digest: str, index: int) -> None:
        self.store.put(KSDB_NAMESPACE, digest, str(index))

    def ksdb_size(self) -> int:
        return sum(1 for _ in self.store.items(KSDB_NAMESPACE))


# Single entry point for audit events. Commands call this after every run;
# without a configured store the events are only logged.
class AuditRepo:
    _store: Optional[KeyValueStore] = None

    @classmethod
    def configure(cls, store: Optional[KeyValueStore]) -> None:
        cls._store = store

    @classmethod
    def record_event(cls, event_type: str, payload: str) -> None:
        event = AuditEvent(event_type=event_type, payload=payload,
                           created_at=datetime.now(timezone.utc))
        logger.debug("audit %s %s", event_type, payload)
        if cls._store is not None:
            cls._store.record_audit(event)
