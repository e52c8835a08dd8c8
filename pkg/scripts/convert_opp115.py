#!/usr/bin/env python3
"""Convert raw OPP-115 policy files into the corpus format read by complygraph.

The OPP-115 distribution stores each policy as a single file whose segments
are separated by a literal ``|||`` marker, with the provider domain embedded
in the file name (for example ``20_www.lids.com.html``). This script walks a
directory of such files and emits one corpus file:

    #PROVIDER lids.com lids.com
    #SEG s1 [First Party Collection/Use]
    <segment text>

Category labels are attached when an annotations directory is supplied (one
CSV per policy, sharing the file stem). When a category-to-article map is
also supplied, a ground-truth CSV of provider_id,segment_id,article rows is
written next to the corpus.

The script is one-way tooling for dataset preparation; the package itself
only reads its output formats.
"""

import argparse
import csv
import html
import re
import sys
from collections import Counter
from pathlib import Path

SEGMENT_SEPARATOR = "|||"

_TAG = re.compile(r"<[^>]+>")
_WS = re.compile(r"\s+")
_STEM = re.compile(r"^\d+_(?:www\.)?(?P<domain>.+?)$", re.IGNORECASE)
_SLUG_OK = re.compile(r"^[a-z0-9][a-z0-9._-]*$")
_MARKUP_EXTS = (".html", ".htm", ".txt", ".xml")


def file_stem(name: str) -> str:
    """File name minus a markup extension.

    Plain ``Path.stem`` would also eat the final domain label of
    extension-less names like ``1_www.lids.com``.
    """
    lower = name.lower()
    for ext in _MARKUP_EXTS:
        if lower.endswith(ext):
            return name[: -len(ext)]
    return name


def strip_markup(text: str) -> str:
    """Drop HTML tags and entities, collapse whitespace."""
    text = _TAG.sub(" ", text)
    text = html.unescape(text)
    return _WS.sub(" ", text).strip()


def provider_slug(stem: str) -> str:
    m = _STEM.match(stem)
    domain = (m.group("domain") if m else stem).lower()
    slug = re.sub(r"[^a-z0-9._-]+", "-", domain).strip("-._") or "unknown"
    if not _SLUG_OK.match(slug):
        slug = "p-" + slug
    return slug


def read_segments(path: Path) -> list:
    raw = path.read_text(encoding="utf-8", errors="replace")
    parts = [strip_markup(p) for p in raw.split(SEGMENT_SEPARATOR)]
    return [p for p in parts if p]


def read_categories(path: Path, segment_col: int, category_col: int) -> dict:
    """Majority category per segment index from an OPP-115 annotation CSV."""
    votes: dict = {}
    with path.open(encoding="utf-8", errors="replace", newline="") as fh:
        for row in csv.reader(fh):
            if len(row) <= max(segment_col, category_col):
                continue
            try:
                seg = int(row[segment_col])
            except ValueError:
                continue
            category = row[category_col].strip()
            if category:
                votes.setdefault(seg, Counter())[category] += 1
    return {seg: c.most_common(1)[0][0] for seg, c in votes.items()}


def read_category_map(path: Path) -> dict:
    """Parse `Category Name,article[;article...]` rows."""
    mapping: dict = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, arts = line.partition(",")
        if not sep:
            raise SystemExit(f"{path}:{lineno}: expected 'category,articles'")
        numbers = []
        for piece in arts.split(";"):
            piece = piece.strip()
            if not piece:
                continue
            if not piece.isdigit() or int(piece) < 1:
                raise SystemExit(f"{path}:{lineno}: bad article number {piece!r}")
            numbers.append(int(piece))
        mapping[name.strip()] = numbers
    return mapping


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("policies_dir", type=Path,
                        help="directory of OPP-115 policy files (||| separated)")
    parser.add_argument("--out", type=Path, required=True,
                        help="corpus file to write")
    parser.add_argument("--annotations", type=Path,
                        help="directory of OPP-115 annotation CSVs")
    parser.add_argument("--segment-col", type=int, default=4,
                        help="annotation CSV column holding the segment index")
    parser.add_argument("--category-col", type=int, default=5,
                        help="annotation CSV column holding the category name")
    parser.add_argument("--category-map", type=Path,
                        help="category,article[;article...] file; enables truth output")
    parser.add_argument("--truth-out", type=Path,
                        help="ground-truth CSV to write (requires --category-map)")
    args = parser.parse_args(argv)

    if args.truth_out and not args.category_map:
        parser.error("--truth-out requires --category-map")

    files = sorted(p for p in args.policies_dir.iterdir()
                   if p.is_file() and not p.name.startswith("."))
    if not files:
        print(f"no policy files found in {args.policies_dir}", file=sys.stderr)
        return 1

    category_map = read_category_map(args.category_map) if args.category_map else {}

    corpus_lines = []
    truth_rows = []
    seen = set()
    n_providers = 0
    n_segments = 0
    for path in files:
        segments = read_segments(path)
        if not segments:
            print(f"skipping {path.name}: no segments", file=sys.stderr)
            continue
        stem = file_stem(path.name)
        slug = provider_slug(stem)
        if slug in seen:
            print(f"skipping {path.name}: duplicate provider {slug}", file=sys.stderr)
            continue
        seen.add(slug)
        categories = {}
        if args.annotations:
            ann = args.annotations / (stem + ".csv")
            if ann.exists():
                categories = read_categories(ann, args.segment_col, args.category_col)
        corpus_lines.append(f"#PROVIDER {slug} {slug}")
        for i, text in enumerate(segments):
            seg_id = f"s{i + 1}"
            category = categories.get(i, "")
            header = f"#SEG {seg_id} [{category}]" if category else f"#SEG {seg_id}"
            corpus_lines.append(header)
            corpus_lines.append(text)
            n_segments += 1
            for article in category_map.get(category, []):
                truth_rows.append((slug, seg_id, article))
        n_providers += 1

    args.out.write_text("\n".join(corpus_lines) + "\n", encoding="utf-8")
    print(f"wrote {args.out}: {n_providers} providers, {n_segments} segments")

    if args.truth_out:
        with args.truth_out.open("w", encoding="utf-8", newline="") as fh:
            fh.write("# provider_id,segment_id,article_number\n")
            for slug, seg_id, article in truth_rows:
                fh.write(f"{slug},{seg_id},{article}\n")
        print(f"wrote {args.truth_out}: {len(truth_rows)} truth rows")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
