#!/usr/bin/env python3
"""Convert the per-class JSON files of the npm `fashion-mnist` package to IDX.

The package ships one file per class (clothes/<k>.json, {"data": [[784 bytes], ...]})
with no train/test marking. Empty entries (class 0 has two) are dropped. Per class, the first 6000 images become training
data and the last 1000 become test data. Both files interleave the classes
round-robin so any prefix is class balanced.
"""

import argparse
import json
import struct
from pathlib import Path

TRAIN_PER_CLASS = 6000
TEST_PER_CLASS = 1000


def write_idx(out_dir: Path, stem: str, images, labels):
    with open(out_dir / f"{stem}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with open(out_dir / f"{stem}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def interleave(per_class):
    images, labels = [], []
    for i in range(len(per_class[0])):
        for k, rows in enumerate(per_class):
            images.append(rows[i])
            labels.append(k)
    return images, labels


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("clothes_dir", type=Path, help="package/src/clothes")
    ap.add_argument("out_dir", type=Path)
    args = ap.parse_args()

    train, test = [], []
    for k in range(10):
        rows = [r for r in json.loads((args.clothes_dir / f"{k}.json").read_text())["data"] if r]
        if len(rows) < TRAIN_PER_CLASS + TEST_PER_CLASS:
            raise SystemExit(f"class {k}: only {len(rows)} images")
        for r in rows:
            if len(r) != 784 or min(r) < 0 or max(r) > 255:
                raise SystemExit(f"class {k}: malformed image")
        train.append(rows[:TRAIN_PER_CLASS])
        test.append(rows[-TEST_PER_CLASS:])

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(args.out_dir, "train", *interleave(train))
    write_idx(args.out_dir, "t10k", *interleave(test))
    print(f"wrote {10 * TRAIN_PER_CLASS} train and {10 * TEST_PER_CLASS} test images to {args.out_dir}")


if __name__ == "__main__":
    main()
