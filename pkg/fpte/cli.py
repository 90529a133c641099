"""
Command-line scenario runner.

Usage:
    fpte run scenarios/rprocess_fpt_curve.cfg --output output --seed 7
    fpte kinds

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from fpte import __version__, settings
from fpte.config import load_config
from fpte.database.models import dispose_engine, get_engine, get_session, init_db
from fpte.errors import ConfigError, FpteError
from fpte.pipelines import TablePipeline
from fpte.scenarios import SCENARIOS, get_scenario
from fpte.utils.db_helpers import get_completed_runs, mark_run_finished, mark_run_started

logger = logging.getLogger("fpte.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpte", description="First-passage-time scenarios")
    parser.add_argument("--version", action="version", version=f"fpte {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one scenario config")
    run.add_argument("config", type=Path)
    run.add_argument("--output", type=Path, default=None, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override [scenario] seed")
    run.add_argument("--threads", type=int, default=None, help="worker cap")
    run.add_argument("--tolerance", type=float, default=None, help="override [quadrature] rtol")
    run.add_argument("--force", action="store_true", help="rerun even if the ledger has a completed run")

    commands.add_parser("kinds", help="list scenario kinds")
    return parser


def _ledger_session(output_dir: Path):
    url = settings.DATABASE_URL or f"sqlite:///{(output_dir / 'runs.sqlite').resolve()}"
    engine = get_engine(url)
    init_db(engine)
    return get_session(engine)


def run_scenario(args) -> int:
    try:
        config = load_config(args.config).with_overrides(seed=args.seed, rtol=args.tolerance)
        threads = args.threads if args.threads is not None else settings.THREADS
        if threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {threads}")
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"config error: {e}")
        return EXIT_CONFIG

    output_dir = args.output or Path(settings.OUTPUT_DIR)
    output_dir.mkdir(parents=True, exist_ok=True)
    session = _ledger_session(output_dir)
    digest = config.digest()
    try:
        if not args.force and get_completed_runs(session, digest, config.seed):
            logger.info(f"Scenario {config.name!r} already completed for this config and seed, skipping")
            print(f"skipped {config.name}: completed run found (use --force to rerun)")
            return EXIT_OK

        run_id = mark_run_started(session, config.name, config.kind, digest, config.seed)
        pipeline = TablePipeline(output_dir, config)
        try:
            scenario = get_scenario(config.kind)(config, output_dir, threads)
            for table in scenario.run():
                pipeline.process_table(table)
        except ConfigError as e:
            logger.error(f"Scenario {config.name!r} rejected its configuration: {e}")
            mark_run_finished(session, run_id, "failed", message=str(e))
            print(f"config error: {e}")
            return EXIT_CONFIG
        except FpteError as e:
            logger.error(f"Scenario {config.name!r} failed: {e}")
            mark_run_finished(session, run_id, "failed", message=str(e))
            print(f"numerical failure: {e}")
            return EXIT_NUMERICAL
        except Exception as e:
            logger.error(f"Scenario {config.name!r} raised {type(e).__name__}: {e}", exc_info=True)
            mark_run_finished(session, run_id, "failed", message=f"{type(e).__name__}: {e}")
            print(f"numerical failure: {type(e).__name__}: {e}")
            return EXIT_NUMERICAL

        outputs = pipeline.written + scenario.extra_outputs
        mark_run_finished(session, run_id, "completed", output_files=outputs)
        print(f"{config.name}: wrote {len(outputs)} file(s) to {output_dir}")
        return EXIT_OK
    finally:
        session.close()
        dispose_engine()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT)

    if args.command == "kinds":
        for kind in SCENARIOS:
            print(kind)
        return EXIT_OK
    return run_scenario(args)


if __name__ == "__main__":
    sys.exit(main())
