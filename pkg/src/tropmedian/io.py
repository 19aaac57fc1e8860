"""Readers and writers for site matrices, tree files and ultrametric tables."""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path
from typing import Iterable

from .rational import format_rational, to_rational
from .trees import PhyloTree, Ultrametric, parse_newick


def _lines(path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _split(line: str) -> list[str]:
    if "\t" in line:
        return line.split("\t")
    if "," in line:
        return line.split(",")
    return line.split()


def read_matrix(path, header: bool = False) -> list[list]:
    """Rows of exact rationals from a CSV/TSV file; blank and ``#`` lines are skipped."""
    rows = []
    for lineno, line in enumerate(_lines(path), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if header:
            header = False
            continue
        try:
            rows.append([to_rational(cell) for cell in _split(text)])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return rows


def read_weights(path) -> list[int]:
    weights = []
    for line in _lines(path):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        for cell in re.split(r"[,\s]+", text):
            if cell:
                value = to_rational(cell)
                if value.denominator != 1 or value < 1:
                    raise ValueError(f"weights must be positive integers, got {cell!r}")
                weights.append(int(value))
    return weights


def read_trees(path) -> list[PhyloTree]:
    """One Newick string per line; ``#`` starts a comment line."""
    trees = []
    for lineno, line in enumerate(_lines(path), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            trees.append(parse_newick(text))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return trees


def read_ultrametrics(path) -> list[Ultrametric]:
    """CSV with a header of pair labels ``A|B`` and one distance vector per line."""
    reader = csv.reader(line for line in _lines(path) if line.strip() and not line.startswith("#"))
    header = next(reader, None)
    if header is None:
        return []
    pairs = []
    for cell in header:
        a, sep, b = cell.strip().partition("|")
        if not sep:
            raise ValueError(f"header cell {cell!r} is not of the form A|B")
        pairs.append((a, b))
    out = []
    for row in reader:
        if len(row) != len(pairs):
            raise ValueError(f"row has {len(row)} entries, header has {len(pairs)}")
        out.append(Ultrametric.from_dict(dict(zip(pairs, row))))
    return out


def format_ultrametrics(items: Iterable[Ultrametric]) -> str:
    items = list(items)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if items:
        writer.writerow(items[0].pair_labels())
        for u in items:
            writer.writerow(format_rational(x) for x in u.d)
    return buf.getvalue()
