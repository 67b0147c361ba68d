# Plan-Summary-Toolkit.py

import sys

from plansumm.cli.main_cli import main as cli_main


def main():
    """Application entry point."""
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == '__main__':
    main()
