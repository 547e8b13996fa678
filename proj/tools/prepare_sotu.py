#!/usr/bin/env python3
# Copyright 2026 The lmaug Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds the bundled State of the Union text corpus.

Source: the CC0-licensed @stdlib/datasets-sotu npm package. Text is lowercased,
punctuation is dropped, and each sentence becomes one line, which gives a
transcript-like corpus in the toolkit's one-sentence-per-line format.
Whole addresses are assigned to train/dev/eval so the held-out sets are disjoint.

usage: prepare_sotu.py <package/data dir> <output dir> [--from-year 1923]
"""
import argparse
import glob
import json
import os
import re

SENT_SPLIT = re.compile(r"(?<=[.!?;:])\s+")
NUM_COMMA = re.compile(r"(?<=\d),(?=\d{3})")
NON_WORD = re.compile(r"[^a-z0-9']+")


def sentences(text):
    text = NUM_COMMA.sub("", text)
    text = text.replace("%", " percent ").replace("$", " dollars ")
    for raw in SENT_SPLIT.split(text):
        toks = [t.strip("'") for t in NON_WORD.sub(" ", raw.lower()).split()]
        toks = [t for t in toks if t]
        if toks:
            yield " ".join(toks)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("data_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--from-year", type=int, default=1923)
    args = ap.parse_args()

    docs = []
    for path in glob.glob(os.path.join(args.data_dir, "*.json")):
        with open(path, encoding="utf-8") as f:
            d = json.load(f)
        if d["year"] >= args.from_year:
            docs.append((d["year"], d["name"], d["text"]))
    docs.sort()

    splits = {"train": [], "dev": [], "eval": []}
    for i, (_, _, text) in enumerate(docs):
        k = i % 20
        name = "eval" if k in (3, 13) else "dev" if k == 8 else "train"
        splits[name].extend(sentences(text))

    os.makedirs(args.out_dir, exist_ok=True)
    for name, lines in splits.items():
        with open(os.path.join(args.out_dir, name + ".txt"), "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
        print(name, len(lines), sum(len(l.split()) for l in lines))


if __name__ == "__main__":
    main()
