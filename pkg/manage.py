#!/usr/bin/env python
"""Command-line utility for the codec and Django's own administrative tasks."""
import sys


def main():
    """Run the requested command through the wz entry point."""
    try:
        from config.cli import main as run
    except ImportError as exc:
        raise ImportError(
            "Couldn't import the codec project. Are you sure Django is installed "
            "and available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
