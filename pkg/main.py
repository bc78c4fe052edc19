"""Command-line entrypoint for mtlab."""

import sys

from dotenv import load_dotenv

# Load MTLAB_* settings (precision, cache directory, p-bound) before anything reads them
load_dotenv(override=True)

from mtlab.cli import run_command


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
