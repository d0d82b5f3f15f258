# app/main.py
import argparse
import logging
import sys

from .commands import cmd_design, cmd_simulate, cmd_sweep
from .config import load_config
from .core_model import DegenerateMeasurementError, ReconstructionError, SingularSystemError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _orders(text):
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"orders must be a comma-separated list of integers, got '{text}'")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration JSON (defaults: design example)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--path", choices=["direct", "polyphase"], help="reconstruction path")
    common.add_argument("--no-noise", action="store_true", help="disable the input noise")
    common.add_argument("--full-output", action="store_true",
                        help="zero-pad the input so the output spans it; transients are flagged in traces")
    common.add_argument("--debug", action="store_true", help="log at DEBUG level")
    common.add_argument("--log-file", help="also write the log to this file")

    parser = argparse.ArgumentParser(
        prog="tiadc-recon",
        description="Least-squares reconstruction of nonuniformly sampled bandpass signals",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("design", parents=[common], help="design the filter bank and write its responses")
    sim = sub.add_parser("simulate", parents=[common], help="simulate one run and write metrics")
    sim.add_argument("--traces", action="store_true", help="write v.csv, y2.csv and x2.csv")
    sweep = sub.add_parser("sweep", parents=[common], help="repeat design and simulation over filter orders")
    sweep.add_argument("--orders", type=_orders, help="comma-separated filter orders, e.g. 20,30,40")
    return parser


def configure_logging(debug=False, log_file=None):
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=handlers,
        force=True,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.debug, args.log_file)

    overrides = {
        "output_dir": args.out,
        "path": args.path,
        "noise_enabled": False if args.no_noise else None,
        "full_output": True if args.full_output else None,
        "sweep_orders": getattr(args, "orders", None),
    }
    try:
        config = load_config(args.config, **overrides)
        if args.command == "design":
            cmd_design(config)
        elif args.command == "simulate":
            cmd_simulate(config, traces=args.traces)
        else:
            cmd_sweep(config)
    except (SingularSystemError, DegenerateMeasurementError, ArithmeticError) as e:
        logger.error(f"Numerical failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ReconstructionError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
