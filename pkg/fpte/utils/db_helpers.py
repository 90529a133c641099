"""Run ledger helpers for the scenario runner."""

import logging
from pathlib import Path

from sqlalchemy.orm import Session

from fpte.database.models import ScenarioRun, utc_now

logger = logging.getLogger(__name__)


def get_completed_runs(session: Session, config_hash: str, seed: int) -> list[ScenarioRun]:
    """Completed runs of a config/seed pair whose output files all still exist."""
    with session.begin():
        runs = (
            session.query(ScenarioRun)
            .filter_by(config_hash=config_hash, seed=str(seed), status="completed")
            .order_by(ScenarioRun.id)
            .all()
        )
        session.expunge_all()
    present = []
    for run in runs:
        files = [f for f in (run.output_files or "").splitlines() if f]
        if files and all(Path(f).exists() for f in files):
            present.append(run)
    return present


def mark_run_started(session: Session, scenario: str, kind: str, config_hash: str, seed: int) -> int:
    """Insert a running ledger row and return its id."""
    with session.begin():
        run = ScenarioRun(scenario=scenario, kind=kind, config_hash=config_hash, seed=str(seed), status="running")
        session.add(run)
        session.flush()
        return run.id


def mark_run_finished(session: Session, run_id: int, status: str, output_files=(), message: str | None = None):
    """Close a ledger row as completed or failed."""
    if status not in ("completed", "failed"):
        raise ValueError(f"unknown run status {status!r}")
    with session.begin():
        run = session.get(ScenarioRun, run_id)
        if run is None:
            logger.error(f"Ledger row {run_id} vanished before it could be closed")
            return
        run.status = status
        run.output_files = "\n".join(str(f) for f in output_files)
        run.message = message
        run.finished_at = utc_now()
