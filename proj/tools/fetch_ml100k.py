#!/usr/bin/env python3
# Copyright 2026 The onebp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Fetch MovieLens-100k into data/ml-100k/u.data.

Tries the GroupLens archive first. Without direct internet access it falls
back to the copy bundled in the pytorch-widedeep wheel, fetched through pip
(needs pandas and pyarrow).
"""

import argparse
import hashlib
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
WHEEL_SPEC = "pytorch-widedeep==1.7.0"
WHEEL_MEMBER = "pytorch_widedeep/datasets/data/MovieLens100k_data.parquet.brotli"


def from_grouplens() -> bytes:
    with urllib.request.urlopen(GROUPLENS_URL, timeout=30) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    return archive.read("ml-100k/u.data")


def from_wheel() -> bytes:
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet", "-d", tmp, WHEEL_SPEC],
            check=True,
        )
        wheel = next(pathlib.Path(tmp).glob("*.whl"))
        raw = zipfile.ZipFile(wheel).read(WHEEL_MEMBER)
    df = pd.read_parquet(io.BytesIO(raw))
    cols = ["user_id", "movie_id", "rating", "timestamp"]
    return df[cols].to_csv(sep="\t", header=False, index=False, lineterminator="\n").encode()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/ml-100k/u.data", type=pathlib.Path)
    parser.add_argument("--source", choices=["auto", "grouplens", "wheel"], default="auto")
    args = parser.parse_args()

    data = None
    if args.source in ("auto", "grouplens"):
        try:
            data = from_grouplens()
        except Exception as exc:  # noqa: BLE001
            if args.source == "grouplens":
                raise
            print(f"GroupLens download failed ({exc}); using the wheel copy", file=sys.stderr)
    if data is None:
        data = from_wheel()

    rows = data.count(b"\n")
    if rows != 100000:
        print(f"expected 100000 rows, got {rows}", file=sys.stderr)
        return 1
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(data)
    print(f"wrote {args.out} ({rows} rows, md5 {hashlib.md5(data).hexdigest()})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
