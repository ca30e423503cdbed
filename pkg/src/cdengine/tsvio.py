"""Tab-separated output with a reproducible comment header.

Every emitted file starts with three comment lines (command, config hash,
seed) so a table can always be traced back to the run that produced it.
Cells: None -> empty, floats via repr (shortest round-trip), so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if value != value:  # NaN is the in-memory undefined marker
            return ""
        return repr(value)
    return str(value)


def write_tsv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence],
              command: str, cfg_hash: str, seed: int) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# command: {command}\n")
        fh.write(f"# config_hash: {cfg_hash}\n")
        fh.write(f"# seed: {seed}\n")
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(format_cell(c) for c in row) + "\n")
            n += 1
    return n


def read_tsv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read a table written by :func:`write_tsv` (comment lines skipped)."""
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if header is None:
                header = parts
                continue
            if len(parts) != len(header):
                raise ParseError(path, line_no,
                                 f"expected {len(header)} columns, got {len(parts)}")
            rows.append(parts)
    if header is None:
        raise ParseError(path, 1, "no header row found")
    return header, rows


def read_columns(path: str | Path) -> dict[str, list]:
    """Columns as {name: list}, empty cells mapped to None and numerics parsed."""
    header, rows = read_tsv(path)
    cols: dict[str, list] = {h: [] for h in header}
    for row in rows:
        for h, cell in zip(header, row):
            if cell == "":
                cols[h].append(None)
            else:
                try:
                    cols[h].append(int(cell))
                except ValueError:
                    try:
                        cols[h].append(float(cell))
                    except ValueError:
                        cols[h].append(cell)
    return cols
