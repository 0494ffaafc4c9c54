import psycopg2
from psycopg2.extras import RealDictCursor
from contextlib import contextmanager

from config import load_config
from errors import CacheError


def get_connection(dsn: str | None = None):
    dsn = dsn or load_config().db.dsn
    if not dsn:
        raise CacheError("RK_DB_DSN is not set; the postgres cache backend needs a DSN")
    return psycopg2.connect(dsn)


@contextmanager
def db_cursor(dict_cursor: bool = True, dsn: str | None = None):
    conn = get_connection(dsn)
    try:
        cursor_factory = RealDictCursor if dict_cursor else None
        cur = conn.cursor(cursor_factory=cursor_factory)
        yield cur
        conn.commit()
    except Exception:
        conn.rollback()
        raise
    finally:
        conn.close()


# Idempotent: safe to run before every postgres-backed command.
def init_schema(dsn: str | None = None):
    """Create the key-value cache and audit tables."""
    ddl = """
    CREATE TABLE IF NOT EXISTS kv_store (
        namespace   VARCHAR(32)  NOT NULL,
        key         VARCHAR(128) NOT NULL,
        value       TEXT         NOT NULL,
        created_at  TIMESTAMPTZ  NOT NULL DEFAULT NOW(),
        PRIMARY KEY (namespace, key)
    );

    CREATE TABLE IF NOT EXISTS audit_log (
        id          SERIAL PRIMARY KEY,
        event_type  VARCHAR(64) NOT NULL,
        payload     TEXT        NOT NULL,
        created_at  TIMESTAMPTZ NOT NULL DEFAULT NOW()
    );
    """
    with db_cursor(dict_cursor=False, dsn=dsn) as cur:
        cur.execute(ddl)
