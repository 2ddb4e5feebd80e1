#!/usr/bin/env python3
"""Fetch the CiteSeer and Cora networks and convert them to kne's formats.

Both networks are taken from the data directory bundled with the `pgl`
wheel on PyPI (Cora in the original LINQS `.cites`/`.content` layout,
CiteSeer in the Planetoid `ind.*` pickle layout), so the fetch only needs
access to a Python package index.

Outputs, under data/<name>/:
    <name>.edges   one undirected edge per line: "token token"
    <name>.labels  one line per labeled node:    "token class"

CiteSeer is restricted to the 3312 labeled nodes; self-loops present in
the source are kept in the file (the loader drops them).

The other networks used for larger runs are plain SNAP edge lists:
    AstroPh   https://snap.stanford.edu/data/ca-AstroPh.txt.gz
    HepTh     https://snap.stanford.edu/data/ca-HepTh.txt.gz
    Facebook  https://snap.stanford.edu/data/facebook_combined.txt.gz
    Gnutella  https://snap.stanford.edu/data/p2p-Gnutella08.txt.gz
They load directly with `kne` after decompression.
"""

import argparse
import hashlib
import pathlib
import pickle
import subprocess
import sys
import tempfile
import zipfile

PGL_SPEC = "pgl==2.2.6"

OUTPUT_FILES = [
    "citeseer/citeseer.edges",
    "citeseer/citeseer.labels",
    "cora/cora.edges",
    "cora/cora.labels",
]


def sha256(path):
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def download_wheel(workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", PGL_SPEC, "-d", str(workdir)],
        check=True,
    )
    wheels = sorted(workdir.glob("pgl-*.whl"))
    if not wheels:
        sys.exit("pgl wheel not found after download")
    return wheels[0]


def convert_cora(zf, out):
    out.mkdir(parents=True, exist_ok=True)
    cites = zf.read("pgl/data/cora/cora.cites").decode()
    content = zf.read("pgl/data/cora/cora.content").decode()
    seen = set()
    edges = []
    for line in cites.splitlines():
        parts = line.split()
        if len(parts) < 2:
            continue
        a, b = parts[0], parts[1]
        key = (a, b) if a <= b else (b, a)
        if key in seen:
            continue
        seen.add(key)
        edges.append(f"{a} {b}\n")
    (out / "cora.edges").write_text("".join(edges))
    labels = []
    for line in content.splitlines():
        parts = line.split()
        if parts:
            labels.append(f"{parts[0]} {parts[-1]}\n")
    (out / "cora.labels").write_text("".join(labels))


def convert_citeseer(zf, out):
    import numpy as np

    out.mkdir(parents=True, exist_ok=True)
    prefix = "pgl/data/citeseer/ind.citeseer."

    def load(name):
        return pickle.loads(zf.read(prefix + name), encoding="latin1")

    def dense(x):
        return np.asarray(x.todense() if hasattr(x, "todense") else x)

    graph = load("graph")
    ally = dense(load("ally"))
    ty = dense(load("ty"))
    test_index = [int(x) for x in zf.read(prefix + "test.index").decode().split()]

    labels = {}
    for i in range(ally.shape[0]):
        if ally[i].sum() > 0:
            labels[i] = int(ally[i].argmax())
    for row, node in enumerate(test_index):
        if ty[row].sum() > 0:
            labels[node] = int(ty[row].argmax())

    seen = set()
    edges = []
    for u in sorted(graph):
        for v in graph[u]:
            if u not in labels or v not in labels:
                continue
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            edges.append(f"{key[0]} {key[1]}\n")
    (out / "citeseer.edges").write_text("".join(edges))
    (out / "citeseer.labels").write_text(
        "".join(f"{node} {cls}\n" for node, cls in sorted(labels.items()))
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    parser.add_argument("--wheel", help="use an already downloaded pgl wheel")
    args = parser.parse_args()
    out = pathlib.Path(args.out)

    with tempfile.TemporaryDirectory() as tmp:
        wheel = pathlib.Path(args.wheel) if args.wheel else download_wheel(pathlib.Path(tmp))
        with zipfile.ZipFile(wheel) as zf:
            convert_cora(zf, out / "cora")
            convert_citeseer(zf, out / "citeseer")

    checksums = out / "SHA256SUMS"
    if checksums.exists():
        bad = []
        for line in checksums.read_text().splitlines():
            digest, name = line.split()
            if sha256(out / name) != digest:
                bad.append(name)
        if bad:
            sys.exit("checksum mismatch: " + ", ".join(bad))
        print("checksums ok")
    else:
        lines = [f"{sha256(out / n)}  {n}\n" for n in OUTPUT_FILES]
        checksums.write_text("".join(lines))
        print(f"wrote {checksums}")


if __name__ == "__main__":
    main()
