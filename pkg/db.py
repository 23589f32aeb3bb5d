# db.py
import hashlib
import json
import sqlite3
from datetime import datetime, timezone
from pathlib import Path

DB_PATH = Path("quiver_cache.db")


def get_db(path=None):
    conn = sqlite3.connect(path or DB_PATH)
    conn.row_factory = sqlite3.Row
    conn.execute("PRAGMA journal_mode=WAL;")
    return conn


def init_db(conn):
    # rendered CLI output for the expensive verbs
    conn.execute("""
    CREATE TABLE IF NOT EXISTS job_output_cache (
        input_hash TEXT PRIMARY KEY,     -- job_input_hash(payload)
        output_text TEXT NOT NULL,       -- exact bytes printed by the CLI
        verb TEXT NOT NULL,              -- for debugging
        created_at TEXT NOT NULL,        -- ISO UTC
        last_used_at TEXT NOT NULL       -- ISO UTC
    );
    """)

    conn.execute(
        "CREATE INDEX IF NOT EXISTS idx_job_cache_last_used "
        "ON job_output_cache(last_used_at);"
    )
    conn.commit()


def utc_now_iso():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


CACHE_VERSION = "v1"


def job_input_hash(payload: dict) -> str:
    """
    Deterministic hash of everything that affects the output.
    Changing this function invalidates the cache contract.
    """
    joined = CACHE_VERSION + "\n" + json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def get_cached_output(conn, input_hash: str):
    row = conn.execute(
        "SELECT output_text FROM job_output_cache WHERE input_hash = ?",
        (input_hash,)
    ).fetchone()
    if not row:
        return None

    # LRU hygiene
    conn.execute(
        "UPDATE job_output_cache SET last_used_at = ? WHERE input_hash = ?",
        (utc_now_iso(), input_hash)
    )
    conn.commit()
    return row["output_text"]


def store_output(conn, input_hash: str, text: str, verb: str):
    now = utc_now_iso()
    conn.execute("""
        INSERT INTO job_output_cache (input_hash, output_text, verb, created_at, last_used_at)
        VALUES (?, ?, ?, ?, ?)
        ON CONFLICT(input_hash) DO UPDATE SET
            output_text = excluded.output_text,
            last_used_at = excluded.last_used_at
    """, (input_hash, text, verb, now, now))
    conn.commit()


def evict_old_entries(conn, days: int = 30):
    """
    Remove cache entries not used within `days`.
    Safe to call frequently.
    """
    cutoff = datetime.now(timezone.utc).timestamp() - (days * 86400)
    cutoff_iso = datetime.fromtimestamp(
        cutoff,
        tz=timezone.utc
    ).isoformat(timespec="seconds")

    conn.execute(
        "DELETE FROM job_output_cache WHERE last_used_at < ?",
        (cutoff_iso,),
    )
    conn.commit()
