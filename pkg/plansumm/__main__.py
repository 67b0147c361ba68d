# plansumm/__main__.py

import sys

from plansumm.cli.main_cli import main

if __name__ == "__main__":
    sys.exit(main())
