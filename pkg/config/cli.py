"""Entry point for the `wz` console script.

Subcommands are Django management commands living in apps.pipeline, so
`wz encode ...` and `python manage.py encode ...` run the same code.
"""

import os
import sys

# command names that are not valid python module names
ALIASES = {
    "si-eval": "si_eval",
}


def main(argv=None):
    """Run a wz subcommand and return its exit code.

    Args:
        argv (list): arguments after the program name; defaults to sys.argv[1:]

    Returns:
        code (int): 0 on success, otherwise the command's exit code

    """
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    from django.core.management import execute_from_command_line

    args = list(sys.argv[1:] if argv is None else argv)
    if args:
        args[0] = ALIASES.get(args[0], args[0])

    try:
        execute_from_command_line(["wz", *args])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0
