"""
Command line::

    kik run <config> [--out PATH] [--format csv|json] [--seed U64] [--threads N] [--comet-project NAME] [-v]
    kik emit-default <scenario>

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical failures.
"""
import argparse
import logging
import sys

from kik.config import KINDS, ScenarioConfig, resolve_seed
from kik.errors import ConfigError, NumericalError
from kik.logger import CometLogger
from kik.records import FORMATS, dumps, write_results

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kik", description="Adaptive KIK error mitigation scenarios")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario config")
    run.add_argument("config", help="INI scenario config")
    run.add_argument("--out", default=None, help="output path; stdout when omitted")
    run.add_argument("--format", choices=FORMATS, default=None)
    run.add_argument("--seed", type=int, default=None, help="overrides KIK_SEED and the config seed")
    run.add_argument("--threads", type=int, default=1, help="parameter points evaluated in parallel")
    run.add_argument("--progress", action="store_true", help="show a progress bar")
    run.add_argument("--comet-project", default=None, help="also log per-point metrics to a Comet experiment")
    run.add_argument("-v", "--verbose", action="count", default=0)

    emit = commands.add_parser("emit-default", help="print the default config of a scenario")
    emit.add_argument("scenario", choices=KINDS)
    return parser


def _log_level(verbose: int, configured: str) -> int:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    level = logging.getLevelName(str(configured).upper())
    if not isinstance(level, int):
        raise ConfigError("unknown log level {!r}".format(configured))
    return level


def run(args) -> int:
    from kik.scenarios import run_scenario

    config = ScenarioConfig.load(args.config)
    logging.basicConfig(level=_log_level(args.verbose, config.output["log_level"]),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    config = config.with_seed(resolve_seed(args.seed, config))
    fmt = args.format or config.output["format"]
    if fmt not in FORMATS:
        raise ConfigError("unknown output format {!r}".format(fmt))
    out = args.out or config.output["path"] or None
    if args.threads < 1:
        raise ConfigError("--threads must be positive, got {}".format(args.threads))

    logger.info("running %s (config %s, seed %s)", config.kind, config.hash[:12], config.seed)
    records = run_scenario(config, logger=_metrics_logger(args.comet_project, config), threads=args.threads,
                           progress=args.progress)
    if out:
        write_results(records, out, fmt, config)
    else:
        sys.stdout.write(dumps(records, fmt))
    return EXIT_OK


def _metrics_logger(project, config):
    if not project:
        return None
    from comet_ml import Experiment

    experiment = Experiment(project_name=project)
    experiment.log_parameters({"{}.{}".format(section, key): value
                               for section, values in config.as_dict().items() for key, value in values.items()})
    experiment.log_other("config_hash", config.hash)
    return CometLogger(experiment)


def emit_default(args) -> int:
    sys.stdout.write(ScenarioConfig.defaults(args.scenario).to_ini())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run(args)
        return emit_default(args)
    except ConfigError as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
