import argparse
import logging
import os
import sys

current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.append(current_dir)
from fixtures.poly_file import FixtureError
from utils.logger import create_logger
from verification.runner import SUITES, RunConfig, run

logger = logging.getLogger(__name__)


def build_parser():
    parser = argparse.ArgumentParser(description="Exact verification of the Brauer-Severi surface bundle computations.")
    commands = parser.add_subparsers(dest="command", required=True)
    parser_run = commands.add_parser("run", help="Run verification suites and write a report.")
    parser_run.add_argument("--suite", type=str, action="append", choices=list(SUITES) + ["all"], help="Suite to run; repeatable, default all.")
    parser_run.add_argument("--format", type=str, choices=["json", "text"], default="json", help="Report format.")
    parser_run.add_argument("--out", type=str, default=None, help="Write the report here instead of stdout.")
    parser_run.add_argument("--fixtures", type=str, default=None, help="Fixture directory (default: $VERIFY_FIXTURES, then data/).")
    parser_run.add_argument("--dump-matrices", type=str, default=None, help="Directory for the multiplication matrices M2..M9.")
    parser_run.add_argument("--log-dir", type=str, default=None, help="Directory for log.txt.")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    create_logger(args.log_dir)
    config = RunConfig(
        suites=args.suite or ["all"],
        format=args.format,
        out=args.out,
        fixtures_dir=args.fixtures,
        dump_matrices=args.dump_matrices,
        log_dir=args.log_dir,
    )
    try:
        report = run(config)
    except (FixtureError, OSError) as e:
        logger.error(f"cannot load fixtures: {e}")
        return 2
    except Exception:
        # exit 1 is reserved for failed checks
        logger.exception("verification run aborted")
        return 2

    text = report.to_json() if config.format == "json" else report.to_text()
    if config.out:
        os.makedirs(os.path.dirname(os.path.abspath(config.out)), exist_ok=True)
        with open(config.out, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"report written to {config.out}")
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
