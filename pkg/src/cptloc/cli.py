"""Command line entry point: ``cptloc <kind> --config FILE [--out PREFIX]``."""

import argparse
import logging
import sys

from .scenario import (
    EXIT_IO,
    KINDS,
    exit_code_for,
    parse_config,
    render_config,
    run_scenario,
    with_overrides,
)
from .errors import CPTLocError

log = logging.getLogger("cptloc")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cptloc",
        description="Run CPT atom-localization scenarios and write CSV results.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} scenario")
        p.add_argument("--config", help="TOML scenario file (defaults are used if omitted)")
        p.add_argument("--out", help="output path prefix, overrides scenario.output")
        p.add_argument("--check", action="store_true",
                       help="validate the configuration, print it with defaults filled, and exit")
        if kind == "sweep":
            p.add_argument("--jobs", type=int, help="number of sweep members run concurrently")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        if getattr(args, "jobs", None) is not None:
            text = _with_jobs(text, args.jobs)
        scenario = with_overrides(parse_config(text, kind=args.kind), output=args.out)
    except OSError as exc:
        print(f"cptloc: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except CPTLocError as exc:
        print(f"cptloc: {exc}", file=sys.stderr)
        return exit_code_for(exc)

    if args.check:
        sys.stdout.write(render_config(scenario))
        return 0

    manifest = run_scenario(scenario)
    for err in manifest.errors:
        print(f"cptloc: {err['type']}: {err['message']}", file=sys.stderr)
    if manifest.manifest_path:
        print(manifest.manifest_path)
    return manifest.exit_code


def _with_jobs(text, jobs):
    # --jobs wins over sweep.jobs; re-render through the parser to keep one code path.
    scenario = parse_config(text, kind="sweep")
    scenario.parameters["sweep"]["jobs"] = jobs
    return render_config(scenario)


if __name__ == "__main__":
    sys.exit(main())
