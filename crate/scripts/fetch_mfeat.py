#!/usr/bin/env python3
"""Writes the six Multiple Features views to data/mfeat in the UCI layout.

The copy bundled with the mvlearn wheel (one CSV per view, header row, label
in the last column) is converted back to whitespace-separated rows, 2000 per
file, in class blocks of 200.
"""

import argparse
import csv
import io
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

VIEWS = {"fou": 76, "fac": 216, "kar": 64, "pix": 240, "zer": 47, "mor": 6}


def download_wheel(dest: Path) -> Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "mvlearn", "--no-deps", "-d", str(dest)],
        check=True,
    )
    return next(dest.glob("mvlearn-*.whl"))


def convert(wheel: Path, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(wheel) as z:
        names = {Path(n).name: n for n in z.namelist() if "UCImultifeature" in n}
        for view, dim in VIEWS.items():
            text = z.read(names[f"mfeat-{view}.csv"]).decode()
            rows = list(csv.reader(io.StringIO(text)))[1:]
            labels = [int(float(r[-1])) for r in rows]
            if labels != [i // 200 for i in range(2000)] or any(len(r) != dim + 1 for r in rows):
                raise SystemExit(f"mfeat-{view}: unexpected layout")
            with open(out / f"mfeat-{view}", "w") as f:
                f.writelines(" ".join(r[:-1]) + "\n" for r in rows)
            print(f"mfeat-{view}: {len(rows)} x {dim}")


def main() -> None:
    root = Path(__file__).resolve().parent.parent
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=root / "data" / "mfeat")
    p.add_argument("--wheel", type=Path, help="use an already downloaded mvlearn wheel")
    args = p.parse_args()
    if args.wheel:
        convert(args.wheel, args.out)
        return
    with tempfile.TemporaryDirectory() as tmp:
        convert(download_wheel(Path(tmp)), args.out)


if __name__ == "__main__":
    main()
