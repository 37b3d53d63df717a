import os
import sys

from .reporter.runner import COMMANDS, run_command


def main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description="Symbolic dynamics checks over a text manifest.")
    parser.add_argument("--manifest", required=True, help="Path to the manifest file")
    parser.add_argument("command", choices=sorted(COMMANDS), help="Check to run")
    parser.add_argument("names", nargs="*", help="Systems, codes or diagram the command works on")
    parser.add_argument("--relation", default="alpha", choices=["alpha", "theta"], help="Quotient relation for cover")
    parser.add_argument("--dir", dest="direction", default="u", choices=["u", "s"], help="Direction for resolving")
    parser.add_argument("--verbose", action="store_true", help="Print detailed logs to stderr")
    parser.add_argument("--json", "--summary-json", dest="summary_json", action="store_true", help="Emit the report as flat JSON")

    args = parser.parse_args()
    sys.exit(
        run_command(
            os.path.abspath(args.manifest),
            args.command,
            args.names,
            args.relation,
            args.direction,
            args.verbose,
            args.summary_json,
        )
    )


if __name__ == "__main__":
    main()
