"""Regenerate tests/golden/help_<command>.txt after changing CLI flags."""

import contextlib
import io
import os
import pathlib

os.environ["COLUMNS"] = "80"

from qlin.cli import build_parser  # noqa: E402

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"


def main():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            p.print_help()
        (GOLDEN / f"help_{name}.txt").write_text(buf.getvalue())
        print("wrote", name)


if __name__ == "__main__":
    main()
