#!/usr/bin/env python3
"""Fetch standard grayscale test images into a corpus directory as P5 PGMs.

The SIPI database is not redistributable from this repository. This script
collects the copies that are published inside old PyPI source distributions
and converts them to 8-bit P5 PGM. Images that cannot be found are listed at
the end; place genuine 512x512 grayscale versions (lena, f16, baboon,
barbara, boat, peppers, elaine, sailboat) in the corpus directory by hand.
"""

import argparse
import io
import pickle
import re
import sys
import tarfile
import urllib.request

import numpy as np

INDEX = "https://pypi.org/simple/{}/"
WANTED = ["lena", "f16", "baboon", "barbara", "boat", "peppers", "elaine", "sailboat"]


def sdist_url(project, version):
    html = urllib.request.urlopen(INDEX.format(project), timeout=60).read().decode()
    m = re.search(r'href="([^"]*%s-%s\.tar\.gz)[^"]*"' % (project, re.escape(version)), html)
    if not m:
        raise RuntimeError(f"{project} {version} sdist not found")
    return urllib.request.urljoin(INDEX.format(project), m.group(1))


def member(url, name):
    data = urllib.request.urlopen(url, timeout=300).read()
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
        return tar.extractfile(name).read()


def lena():
    raw = member(sdist_url("scipy", "0.16.1"), "scipy-0.16.1/scipy/misc/lena.dat")
    return np.array(pickle.loads(raw, encoding="latin1"), dtype=np.uint8)


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", help="corpus directory")
    args = ap.parse_args()
    import os

    os.makedirs(args.out, exist_ok=True)
    found = {}
    try:
        found["lena"] = lena()
    except Exception as exc:  # network or index failures
        print(f"lena: {exc}", file=sys.stderr)
    for name, img in found.items():
        write_pgm(os.path.join(args.out, name + ".pgm"), img)
        print(f"wrote {name}.pgm {img.shape[1]}x{img.shape[0]}")
    missing = [n for n in WANTED if n not in found]
    if missing:
        print("not available from this script: " + ", ".join(missing))


if __name__ == "__main__":
    main()
