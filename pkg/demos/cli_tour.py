"""A short session with the command-line tool, run against the bundled scenes.

Each step prints the command, its output and its exit code.  Written files go
to a temporary directory.
"""
import contextlib
import io
import tempfile
from pathlib import Path

from gammacell.cli import main as gammacell

SCENES = Path(__file__).resolve().parent.parent / "scenes"


def step(*args):
    args = [str(a) for a in args]
    print("$ gammacell " + " ".join(a.replace(str(SCENES) + "/", "scenes/") for a in args))
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = gammacell(args)
    text = (out.getvalue() + err.getvalue()).rstrip()
    lines = text.splitlines()
    for line in lines[:14]:
        print("  " + line)
    if len(lines) > 14:
        print(f"  ... ({len(lines) - 14} more lines)")
    print(f"  [exit {code}]\n")
    return code


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        step("faces", SCENES / "even_lift.json", "E")
        step("divide", SCENES / "n2.json", "A", "--f", "sum", "-o", tmp / "div.json")
        step("verify", tmp / "div.json", "--box", 8)
        step("split", SCENES / "n2.json", "W", "-n", 2, "-o", tmp / "split.json")
        step("padic-member", SCENES / "padic.json", "S", "--point", "4/7,36")
        step("render", SCENES / "n2_decomposition.json", "--name", "A.decomposition",
             "-o", tmp / "n2.svg")
        # a scene whose complex repeats a cell: verification fails with exit 1
        bad = (SCENES / "n2.json").read_text().replace(
            '"maps"', '"complexes": {"D": ["A", "A"]},\n  "maps"')
        (tmp / "bad.json").write_text(bad)
        step("verify", tmp / "bad.json", "--box", 4)


if __name__ == "__main__":
    main()
