"""
Print the scenario run ledger.

Usage:
    poetry run python -m fpte.scripts.run_summary

    # With a custom ledger
    FPTE_DATABASE_URL='sqlite:///output/runs.sqlite' poetry run python -m fpte.scripts.run_summary
"""

import os
import sys
from collections import Counter
from pathlib import Path

from dotenv import load_dotenv

from fpte.database.models import ScenarioRun, get_engine, get_session, init_db


def run_summary(database_url=None, limit=20):
    """
    Print status counts and the most recent runs.

    Args:
        database_url: SQLAlchemy URL. If None, reads FPTE_DATABASE_URL or falls
            back to runs.sqlite in FPTE_OUTPUT_DIR.
        limit: Number of recent runs to list
    """
    if database_url is None:
        database_url = os.getenv("FPTE_DATABASE_URL")
        if not database_url:
            ledger = Path(os.getenv("FPTE_OUTPUT_DIR", "output")) / "runs.sqlite"
            if not ledger.exists():
                print(f"ERROR: no ledger at {ledger}")
                print("Usage: FPTE_DATABASE_URL='sqlite:///path/runs.sqlite' python -m fpte.scripts.run_summary")
                sys.exit(1)
            database_url = f"sqlite:///{ledger.resolve()}"

    engine = get_engine(database_url)
    init_db(engine)
    session = get_session(engine)

    try:
        with session.begin():
            runs = session.query(ScenarioRun).order_by(ScenarioRun.id.desc()).all()
            by_status = Counter(run.status for run in runs)
            by_kind = Counter(run.kind for run in runs)

            print("=" * 80)
            print("SUMMARY")
            print("=" * 80)
            print(f"Total runs:   {len(runs)}")
            for status in ("completed", "failed", "running"):
                print(f"  {status.capitalize():<11} {by_status.get(status, 0)}")
            print("=" * 80)

            print("\nBreakdown by kind:")
            print("-" * 80)
            for kind, count in sorted(by_kind.items()):
                print(f"  {kind:<26} {count}")
            print("-" * 80)

            print(f"\nLast {min(limit, len(runs))} runs:")
            print("-" * 80)
            print(f"{'Id':<6} {'Scenario':<30} {'Kind':<24} {'Status':<10} {'Seed':<10}")
            for run in runs[:limit]:
                print(f"{run.id:<6} {run.scenario[:30]:<30} {run.kind:<24} {run.status:<10} {run.seed:<10}")
                if run.status == "failed" and run.message:
                    print(f"       ✗ {run.message}")
            print("-" * 80)

    except Exception as e:
        print(f"\n✗ ERROR: {e}")
        sys.exit(1)

    finally:
        session.close()
        engine.dispose()


if __name__ == "__main__":
    load_dotenv()

    run_summary()
