#!/usr/bin/env python3
"""Rebuild the native MovieLens 100K layout (u.data, u.item, u.genre).

GroupLens is the canonical source. When it is reachable, download
ml-100k.zip from https://grouplens.org/datasets/movielens/100k/ and unpack it
into data/ml-100k instead of running this script.

Offline, the same ratings and genre flags ship inside the RecBole wheel
(recbole/dataset_example/ml-100k). This script converts those atomic files:

    pip download --no-deps recbole==1.2.1 -d /tmp/recbole
    python3 tools/prepare_ml100k.py /tmp/recbole/recbole-1.2.1-py3-none-any.whl data/ml-100k

Titles are rebuilt as "Title (Year)"; release date and IMDb URL are left empty.
"""

import argparse
import pathlib
import sys
import zipfile

GENRES = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]
PREFIX = "recbole/dataset_example/ml-100k/"


def read_member(wheel, name):
    with zipfile.ZipFile(wheel) as z:
        return z.read(PREFIX + name).decode("utf-8").splitlines()


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("wheel", help="path to recbole-*.whl")
    ap.add_argument("out", help="output directory")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    inter = read_member(args.wheel, "ml-100k.inter")[1:]
    with open(out / "u.data", "w", newline="\n") as f:
        for line in inter:
            user, item, rating, ts = line.split("\t")
            f.write(f"{user}\t{item}\t{int(float(rating))}\t{int(float(ts))}\n")

    items = read_member(args.wheel, "ml-100k.item")[1:]
    index = {g: k for k, g in enumerate(GENRES)}
    rows = []
    for line in items:
        item_id, title, year, classes = line.split("\t")
        flags = [0] * len(GENRES)
        for g in classes.split():
            if g not in index:
                sys.exit(f"unknown genre {g!r} for item {item_id}")
            flags[index[g]] = 1
        label = f"{title} ({year})" if year.isdigit() else title
        rows.append((int(item_id), label, flags))
    rows.sort()
    with open(out / "u.item", "w", newline="\n", encoding="latin-1", errors="replace") as f:
        for item_id, label, flags in rows:
            f.write("|".join([str(item_id), label, "", "", ""] + [str(x) for x in flags]) + "\n")

    with open(out / "u.genre", "w", newline="\n") as f:
        for k, g in enumerate(GENRES):
            f.write(f"{g}|{k}\n")

    print(f"wrote {len(inter)} ratings and {len(rows)} items to {out}")


if __name__ == "__main__":
    main()
