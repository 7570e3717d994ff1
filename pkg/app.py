"""Delaunay spread harness.

Command-line entry point: generate point sets, triangulate them, and check
complexity and sampling claims. Run `python app.py --help` for commands.
"""

import sys

from src.cli.commands import main


if __name__ == "__main__":
    sys.exit(main())
