"""
SQLAlchemy models for the scenario run ledger.

Each CLI invocation records one ScenarioRun row so that completed scenarios with
unchanged configuration and seed can be skipped on the next run.
"""

import os
from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Index, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

Base = declarative_base()


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


class ScenarioRun(Base):
    """
    One execution of a scenario config.

    A run is identified for reuse by (config_hash, seed); status moves from
    "running" to "completed" or "failed".
    """
    __tablename__ = "scenario_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)

    scenario = Column(String(200), nullable=False, index=True)
    kind = Column(String(50), nullable=False)

    config_hash = Column(String(64), nullable=False, index=True)
    # sha256 of the resolved config text

    seed = Column(String(20), nullable=False)
    # unsigned 64-bit seeds do not fit a signed integer column

    status = Column(String(20), nullable=False, default="running", index=True)
    # Values: "running", "completed", "failed"

    output_files = Column(Text, nullable=True)
    # Newline-separated paths

    message = Column(Text, nullable=True)

    started_at = Column(DateTime(timezone=True), default=utc_now, nullable=False)
    finished_at = Column(DateTime(timezone=True), nullable=True)

    def __repr__(self):
        return f"<ScenarioRun(scenario={self.scenario}, kind={self.kind}, status={self.status})>"


Index("idx_run_config_seed", ScenarioRun.config_hash, ScenarioRun.seed)


# Database connection helpers

_engine = None
_engine_url = None


def get_engine(database_url=None):
    """
    Get or create the database engine (singleton pattern).

    Args:
        database_url: SQLAlchemy URL. If None, reads FPTE_DATABASE_URL.

    Raises:
        ValueError: If no URL is given and FPTE_DATABASE_URL is not set
        AssertionError: If called with a different URL after the engine exists
    """
    global _engine, _engine_url

    if database_url is None:
        database_url = os.getenv("FPTE_DATABASE_URL")
        if not database_url:
            raise ValueError(
                "database_url not provided and FPTE_DATABASE_URL not set. "
                "Set FPTE_DATABASE_URL or pass database_url."
            )

    if _engine is not None:
        assert _engine_url == database_url, (
            f"Attempted to create engine with different database URL. "
            f"Existing: {_engine_url}, Requested: {database_url}. "
            f"Only one database URL is allowed per process."
        )
        return _engine

    _engine = create_engine(database_url, echo=False)
    _engine_url = database_url

    return _engine


def dispose_engine():
    """Drop the cached engine so the next get_engine call may use a new URL."""
    global _engine, _engine_url
    if _engine is not None:
        _engine.dispose()
    _engine = None
    _engine_url = None


def get_session(engine):
    """
    Create a session with explicit transaction control.

    Example:
        session = get_session(get_engine())
        with session.begin():
            runs = session.query(ScenarioRun).all()
        session.close()
    """
    Session = sessionmaker(bind=engine, autobegin=False)
    return Session()


def init_db(engine):
    """Create all tables that do not exist yet."""
    Base.metadata.create_all(engine)
