"""Compare the classifier against the hand labels in queries/labeled."""

import re
import sys
from pathlib import Path

from spqlab.sparql.features import classify_query
from spqlab.sparql.parser import parse_query

LABELED = Path(__file__).resolve().parent.parent / "queries" / "labeled"


def header(text, key):
    m = re.search(rf"^# {key}: (.+)$", text, re.M)
    return m.group(1).strip() if m else "?"


def main():
    bad = 0
    files = sorted(LABELED.glob("*.rq"))
    for path in files:
        text = path.read_text()
        c = classify_query(parse_query(text))
        want = (header(text, "features"), header(text, "class"))
        got = (c.feature_string(), c.label)
        mark = "ok " if got == want else "BAD"
        bad += got != want
        print(f"{mark} {path.stem:28s} {got[0]:22s} {got[1]:13s}" + ("" if got == want else f" want {want}"))
    print(f"{len(files) - bad}/{len(files)} agree")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
