"""Corpus ingestion, validation, filtering, and field-year aggregation.

A corpus is an immutable bundle of per-document metadata plus the citation
graph in compressed adjacency (CSR) form. Dense indices are assigned by first
appearance order in the nodes file; all downstream determinism keys off that
order.
"""

from __future__ import annotations

import json
import math
import pickle
from bisect import bisect_left
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CacheError,
    DuplicateIdError,
    EmptyCorpusError,
    ParseError,
    ReferentialIntegrityError,
)

NODE_COLUMNS = ("doc_id", "kind", "year", "field_sub", "venue", "title", "abstract", "author_ids")
EDGE_COLUMNS = ("citing_id", "cited_id")
KINDS = ("paper", "patent")

CACHE_MAGIC = b"CDC1"


@dataclass(frozen=True)
class IngestOptions:
    """Knobs for :func:`ingest` and :meth:`Corpus.from_columns`.

    taxonomy maps field_sub -> field_area; it may be a path to a two-column
    TSV file or an in-memory mapping. When None, field_area falls back to
    field_sub (identity taxonomy).
    """

    taxonomy: str | Path | Mapping[str, str] | None = None
    skip_dangling: bool = False
    year_bounds: tuple[int, int] = (1900, 2030)


@dataclass
class ValidationReport:
    """Tallies of anomalies observed while building a corpus.

    Chronology violations (cited newer than citer) are counted but the edges
    are retained: real citation data admits negative cited ages.
    """

    n_docs: int = 0
    n_edges: int = 0
    duplicate_edges: int = 0
    self_loops: int = 0
    chronology_violations: int = 0
    dangling_skipped: int = 0

    def as_rows(self) -> list[tuple[str, int]]:
        return [
            ("n_docs", self.n_docs),
            ("n_edges", self.n_edges),
            ("duplicate_edges", self.duplicate_edges),
            ("self_loops_dropped", self.self_loops),
            ("chronology_violations", self.chronology_violations),
            ("dangling_skipped", self.dangling_skipped),
        ]


@dataclass
class DocumentRecord:
    doc_id: str
    kind: str
    year: int
    field_sub: str
    venue: str | None = None
    title: str | None = None
    abstract: str | None = None
    author_ids: list[str] = field(default_factory=list)


class CitationGraph:
    """Directed citation graph in dense-index CSR form.

    ``forward`` is citing -> cited, ``backward`` its exact transpose.
    Neighbor lists are sorted ascending, self-loops and duplicate edges never
    appear, and iteration is therefore deterministic.
    """

    __slots__ = ("n", "fw_ptr", "fw_idx", "bw_ptr", "bw_idx", "year_of", "ids", "index_of")

    def __init__(self, ids: list[str], year_of: np.ndarray,
                 fw_ptr: np.ndarray, fw_idx: np.ndarray,
                 bw_ptr: np.ndarray, bw_idx: np.ndarray,
                 index_of: dict[str, int] | None = None):
        self.n = len(ids)
        self.ids = ids
        self.year_of = year_of
        self.fw_ptr = fw_ptr
        self.fw_idx = fw_idx
        self.bw_ptr = bw_ptr
        self.bw_idx = bw_idx
        self.index_of = index_of if index_of is not None else {d: i for i, d in enumerate(ids)}

    @property
    def m(self) -> int:
        return int(self.fw_idx.shape[0])

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.fw_idx[self.fw_ptr[i]:self.fw_ptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self.bw_idx[self.bw_ptr[i]:self.bw_ptr[i + 1]]

    def out_degree(self) -> np.ndarray:
        return self.fw_ptr[1:] - self.fw_ptr[:-1]

    def in_degree(self) -> np.ndarray:
        return self.bw_ptr[1:] - self.bw_ptr[:-1]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (citing, cited) index arrays in forward CSR order."""
        citing = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree())
        return citing, self.fw_idx.copy()

    def with_edges(self, citing: np.ndarray, cited: np.ndarray) -> "CitationGraph":
        """Same node set, different edges (used by the rewiring null model).

        The edge list must already satisfy the graph invariants; duplicates
        or self-loops are an error here, not a cleanup request.
        """
        citing = np.asarray(citing, dtype=np.int64)
        cited = np.asarray(cited, dtype=np.int64)
        if np.any(citing == cited):
            raise ValueError("self-loop in edge list")
        if citing.shape[0] and np.unique(citing * np.int64(self.n) + cited).shape[0] != citing.shape[0]:
            raise ValueError("duplicate edges in edge list")
        fw_ptr, fw_idx, bw_ptr, bw_idx = _build_csr(self.n, citing, cited)
        return CitationGraph(self.ids, self.year_of, fw_ptr, fw_idx, bw_ptr, bw_idx, self.index_of)


def _build_csr(n: int, u: np.ndarray, v: np.ndarray):
    """Sorted CSR in both directions from deduplicated edge index arrays."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    order = np.lexsort((v, u))
    fu, fv = u[order], v[order]
    fw_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(fu, minlength=n), out=fw_ptr[1:])
    order_b = np.lexsort((fu, fv))
    bw_idx = fu[order_b]
    bw_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(fv, minlength=n), out=bw_ptr[1:])
    return fw_ptr, fv, bw_ptr, bw_idx


@dataclass
class Corpus:
    """Immutable document metadata plus citation graph.

    Never mutate a corpus after construction: all batch operations assume
    they can read it from any number of workers concurrently.
    """

    graph: CitationGraph
    kinds: list[str]
    field_sub: list[str]
    field_area: list[str]
    venues: list[str | None]
    titles: list[str | None]
    abstracts: list[str | None]
    authors: list[list[str]]
    taxonomy: dict[str, str]
    validation: ValidationReport

    @property
    def n_docs(self) -> int:
        return self.graph.n

    @property
    def doc_ids(self) -> list[str]:
        return self.graph.ids

    @property
    def years(self) -> np.ndarray:
        return self.graph.year_of

    def index(self, doc_id: str) -> int:
        return self.graph.index_of[doc_id]

    def with_graph(self, graph: CitationGraph) -> "Corpus":
        return replace(self, graph=graph)

    # ------------------------------------------------------------------
    @classmethod
    def from_columns(
        cls,
        doc_ids: Sequence[str],
        kinds: Sequence[str] | str,
        years: Sequence[int] | np.ndarray,
        field_sub: Sequence[str] | str,
        citing: np.ndarray,
        cited: np.ndarray,
        venues: Sequence[str | None] | None = None,
        titles: Sequence[str | None] | None = None,
        abstracts: Sequence[str | None] | None = None,
        authors: Sequence[list[str]] | None = None,
        options: IngestOptions = IngestOptions(),
        dangling_skipped: int = 0,
    ) -> "Corpus":
        """Assemble a corpus from parallel columns and edge index arrays.

        Self-loops are dropped and duplicate (citing, cited) pairs collapsed,
        both tallied in the validation report.
        """
        n = len(doc_ids)
        doc_ids = list(doc_ids)
        index_of: dict[str, int] = {}
        for i, d in enumerate(doc_ids):
            if d in index_of:
                raise DuplicateIdError(f"duplicate doc_id: {d!r}")
            index_of[d] = i

        years = np.asarray(years, dtype=np.int64)
        lo, hi = options.year_bounds
        if n and (years.min() < lo or years.max() > hi):
            bad = int(np.argmax((years < lo) | (years > hi)))
            raise ParseError("<nodes>", bad + 1,
                             f"year {int(years[bad])} outside bounds [{lo}, {hi}]")

        if isinstance(kinds, str):
            kinds = [kinds] * n
        kinds = list(kinds)
        if isinstance(field_sub, str):
            field_sub = [field_sub] * n
        field_sub = list(field_sub)

        taxonomy = _resolve_taxonomy(options.taxonomy)
        if taxonomy is None:
            taxonomy = {}
            field_area = list(field_sub)
        else:
            field_area = []
            for i, fs in enumerate(field_sub):
                try:
                    field_area.append(taxonomy[fs])
                except KeyError:
                    raise ParseError("<nodes>", i + 1, f"unknown field_sub {fs!r} (not in taxonomy)")

        venues = list(venues) if venues is not None else [None] * n
        titles = list(titles) if titles is not None else [None] * n
        abstracts = list(abstracts) if abstracts is not None else [None] * n
        authors = [list(a) for a in authors] if authors is not None else [[] for _ in range(n)]

        report = ValidationReport(n_docs=n, dangling_skipped=dangling_skipped)

        u = np.asarray(citing, dtype=np.int64)
        v = np.asarray(cited, dtype=np.int64)
        keep = u != v
        report.self_loops = int(u.shape[0] - keep.sum())
        u, v = u[keep], v[keep]
        if u.shape[0]:
            codes = u * np.int64(n) + v
            uniq = np.unique(codes)
            report.duplicate_edges = int(codes.shape[0] - uniq.shape[0])
            u = uniq // n
            v = uniq % n
        report.n_edges = int(u.shape[0])
        report.chronology_violations = int(np.count_nonzero(years[v] > years[u])) if u.shape[0] else 0

        fw_ptr, fw_idx, bw_ptr, bw_idx = _build_csr(n, u, v)
        graph = CitationGraph(doc_ids, years, fw_ptr, fw_idx, bw_ptr, bw_idx, index_of)
        return cls(graph, kinds, field_sub, field_area, venues, titles, abstracts,
                   authors, dict(taxonomy), report)

    @classmethod
    def from_records(cls, records: Sequence[DocumentRecord],
                     edges: Iterable[tuple[str, str]],
                     options: IngestOptions = IngestOptions()) -> "Corpus":
        index_of = {}
        for i, r in enumerate(records):
            if r.doc_id in index_of:
                raise DuplicateIdError(f"duplicate doc_id: {r.doc_id!r}")
            index_of[r.doc_id] = i
        u, v, skipped = [], [], 0
        for citing_id, cited_id in edges:
            iu = index_of.get(citing_id)
            iv = index_of.get(cited_id)
            if iu is None or iv is None:
                if options.skip_dangling:
                    skipped += 1
                    continue
                missing = citing_id if iu is None else cited_id
                raise ReferentialIntegrityError(f"edge references undeclared doc_id {missing!r}")
            u.append(iu)
            v.append(iv)
        return cls.from_columns(
            [r.doc_id for r in records],
            [r.kind for r in records],
            [r.year for r in records],
            [r.field_sub for r in records],
            np.asarray(u, dtype=np.int64),
            np.asarray(v, dtype=np.int64),
            venues=[r.venue for r in records],
            titles=[r.title for r in records],
            abstracts=[r.abstract for r in records],
            authors=[r.author_ids for r in records],
            options=options,
            dangling_skipped=skipped,
        )


def _resolve_taxonomy(taxonomy) -> dict[str, str] | None:
    if taxonomy is None:
        return None
    if isinstance(taxonomy, Mapping):
        return dict(taxonomy)
    return load_taxonomy(taxonomy)


def load_taxonomy(path: str | Path) -> dict[str, str]:
    """Two-column TSV: field_sub, field_area. A header row is optional."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected 2 columns, got {len(parts)}")
            if line_no == 1 and tuple(parts) == ("field_sub", "field_area"):
                continue
            mapping[parts[0]] = parts[1]
    return mapping


# ----------------------------------------------------------------------
# File ingestion


def _parse_author_ids(raw) -> list[str]:
    if raw is None:
        return []
    if isinstance(raw, list):
        return [str(a) for a in raw if str(a)]
    return [a for a in str(raw).split(";") if a]


def _parse_nodes_tsv(path: str | Path, year_bounds) -> list[DocumentRecord]:
    records = []
    lo, hi = year_bounds
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != NODE_COLUMNS:
            raise ParseError(path, 1, f"nodes header must be exactly {list(NODE_COLUMNS)}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(NODE_COLUMNS):
                raise ParseError(path, line_no,
                                 f"expected {len(NODE_COLUMNS)} columns, got {len(parts)}")
            doc_id, kind, year_s, field_sub, venue, title, abstract, author_ids = parts
            if kind not in KINDS:
                raise ParseError(path, line_no, f"kind must be one of {list(KINDS)}, got {kind!r}")
            try:
                year = int(year_s)
            except ValueError:
                raise ParseError(path, line_no, f"year is not an integer: {year_s!r}")
            if not lo <= year <= hi:
                raise ParseError(path, line_no, f"year {year} outside bounds [{lo}, {hi}]")
            records.append(DocumentRecord(
                doc_id=doc_id, kind=kind, year=year, field_sub=field_sub,
                venue=venue or None, title=title or None, abstract=abstract or None,
                author_ids=_parse_author_ids(author_ids),
            ))
    return records


def _parse_nodes_jsonl(path: str | Path, year_bounds) -> list[DocumentRecord]:
    records = []
    lo, hi = year_bounds
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc}")
            try:
                doc_id = str(obj["doc_id"])
                kind = str(obj["kind"])
                year = int(obj["year"])
                field_sub = str(obj["field_sub"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(path, line_no, f"missing or malformed required field: {exc}")
            if kind not in KINDS:
                raise ParseError(path, line_no, f"kind must be one of {list(KINDS)}, got {kind!r}")
            if not lo <= year <= hi:
                raise ParseError(path, line_no, f"year {year} outside bounds [{lo}, {hi}]")
            records.append(DocumentRecord(
                doc_id=doc_id, kind=kind, year=year, field_sub=field_sub,
                venue=obj.get("venue") or None, title=obj.get("title") or None,
                abstract=obj.get("abstract") or None,
                author_ids=_parse_author_ids(obj.get("author_ids")),
            ))
    return records


def _parse_edges_tsv(path: str | Path) -> list[tuple[str, str]]:
    edges = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != EDGE_COLUMNS:
            raise ParseError(path, 1, f"edges header must be exactly {list(EDGE_COLUMNS)}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected 2 columns, got {len(parts)}")
            edges.append((parts[0], parts[1]))
    return edges


def ingest(nodes_file: str | Path, edges_file: str | Path,
           options: IngestOptions = IngestOptions()) -> Corpus:
    """Load a corpus from a nodes file (TSV or JSON lines) and an edges TSV."""
    suffix = Path(nodes_file).suffix.lower()
    if suffix in (".jsonl", ".ndjson", ".json"):
        records = _parse_nodes_jsonl(nodes_file, options.year_bounds)
    else:
        records = _parse_nodes_tsv(nodes_file, options.year_bounds)
    edges = _parse_edges_tsv(edges_file)
    return Corpus.from_records(records, edges, options)


# ----------------------------------------------------------------------
# Filtering


@dataclass(frozen=True)
class FilterSpec:
    """None means "no constraint"; an empty set matches nothing."""

    venues: frozenset[str] | None = None
    year_range: tuple[int, int] | None = None
    field_subs: frozenset[str] | None = None
    field_areas: frozenset[str] | None = None
    kinds: frozenset[str] | None = None


def filter_corpus(corpus: Corpus, spec: FilterSpec) -> Corpus:
    """New corpus with exactly the matching documents and the induced edges."""
    n = corpus.n_docs
    keep = np.ones(n, dtype=bool)
    if spec.venues is not None:
        keep &= np.fromiter((v in spec.venues for v in corpus.venues), bool, n)
    if spec.year_range is not None:
        lo, hi = spec.year_range
        keep &= (corpus.years >= lo) & (corpus.years <= hi)
    if spec.field_subs is not None:
        keep &= np.fromiter((f in spec.field_subs for f in corpus.field_sub), bool, n)
    if spec.field_areas is not None:
        keep &= np.fromiter((f in spec.field_areas for f in corpus.field_area), bool, n)
    if spec.kinds is not None:
        keep &= np.fromiter((k in spec.kinds for k in corpus.kinds), bool, n)

    if not keep.any():
        raise EmptyCorpusError("filter matched no documents")

    new_of_old = np.full(n, -1, dtype=np.int64)
    kept = np.flatnonzero(keep)
    new_of_old[kept] = np.arange(kept.shape[0])

    u, v = corpus.graph.edge_arrays()
    emask = keep[u] & keep[v]
    taxonomy = corpus.taxonomy if corpus.taxonomy else None
    sel = kept.tolist()
    return Corpus.from_columns(
        [corpus.doc_ids[i] for i in sel],
        [corpus.kinds[i] for i in sel],
        corpus.years[kept],
        [corpus.field_sub[i] for i in sel],
        new_of_old[u[emask]],
        new_of_old[v[emask]],
        venues=[corpus.venues[i] for i in sel],
        titles=[corpus.titles[i] for i in sel],
        abstracts=[corpus.abstracts[i] for i in sel],
        authors=[corpus.authors[i] for i in sel],
        options=IngestOptions(taxonomy=taxonomy),
    )


# ----------------------------------------------------------------------
# Field-year aggregates


@dataclass
class FieldYearTable:
    """Per (field, year) aggregate rows at two field granularities.

    Base columns: n_new_works, mean_refs_out, mean_authors. Other modules
    (and :func:`growth_regressors`) append further columns; None marks a
    missing value.
    """

    sub: dict[tuple[str, int], dict[str, float | None]]
    area: dict[tuple[str, int], dict[str, float | None]]

    def rows(self, level: str) -> dict[tuple[str, int], dict[str, float | None]]:
        if level == "sub":
            return self.sub
        if level == "area":
            return self.area
        raise ValueError(f"field level must be 'sub' or 'area', got {level!r}")

    def nb_mean_lookup(self, level: str = "area") -> dict[tuple[str, int], float]:
        return {k: row["mean_refs_out"] for k, row in self.rows(level).items()}


def field_year_aggregates(corpus: Corpus) -> FieldYearTable:
    """Count new works and mean out-citations / author counts per field-year."""
    if corpus.n_docs == 0:
        raise EmptyCorpusError("cannot aggregate an empty corpus")
    outdeg = corpus.graph.out_degree()

    def collect(fields: list[str]) -> dict[tuple[str, int], dict[str, float | None]]:
        acc: dict[tuple[str, int], list[float]] = {}
        years = corpus.years
        for i in range(corpus.n_docs):
            key = (fields[i], int(years[i]))
            slot = acc.get(key)
            if slot is None:
                slot = acc[key] = [0, 0, 0]
            slot[0] += 1
            slot[1] += int(outdeg[i])
            slot[2] += len(corpus.authors[i])
        return {
            key: {
                "n_new_works": float(n),
                "mean_refs_out": refs / n,
                "mean_authors": nauth / n,
            }
            for key, (n, refs, nauth) in sorted(acc.items())
        }

    return FieldYearTable(sub=collect(corpus.field_sub), area=collect(corpus.field_area))


def growth_regressors(table: FieldYearTable) -> FieldYearTable:
    """Append logged new-work counts over 1/5/10-year windows to every row.

    A window summing to zero yields None (missing marker); the row itself is
    retained.
    """
    for level in ("sub", "area"):
        rows = table.rows(level)
        by_field: dict[str, dict[int, float]] = {}
        for (f, y), row in rows.items():
            by_field.setdefault(f, {})[y] = row["n_new_works"] or 0.0
        for (f, y), row in rows.items():
            counts = by_field[f]
            for span, col in ((1, "ln_n_new_1"), (5, "ln_n_new_5"), (10, "ln_n_new_10")):
                total = sum(counts.get(yy, 0.0) for yy in range(y - span + 1, y + 1))
                row[col] = math.log(total) if total > 0 else None
    return table


# ----------------------------------------------------------------------
# Author careers


@dataclass
class AuthorCareer:
    author_id: str
    first_year: int
    # years -> number of this author's works published strictly before `year`,
    # materialized for the years the author appears in the corpus
    works_before: dict[int, int]
    _years_sorted: list[int] = field(default_factory=list, repr=False)

    def prior_works(self, year: int) -> int:
        return bisect_left(self._years_sorted, year)

    def career_age(self, year: int) -> int:
        return year - self.first_year


@dataclass
class TeamStats:
    doc_id: str
    mean_career_age: float | None
    mean_prior_works: float | None
    excluded: bool = False


def author_careers(corpus: Corpus, cap_years: int = 80) -> tuple[dict[str, AuthorCareer], list[TeamStats]]:
    """Per-author career records and per-document team statistics.

    Documents whose mean team career age exceeds ``cap_years`` are flagged
    excluded; documents with no authors get missing (None) team stats.
    """
    years_by_author: dict[str, list[int]] = {}
    for i in range(corpus.n_docs):
        y = int(corpus.years[i])
        for a in corpus.authors[i]:
            years_by_author.setdefault(a, []).append(y)

    careers: dict[str, AuthorCareer] = {}
    for a, ys in years_by_author.items():
        ys.sort()
        works_before = {y: bisect_left(ys, y) for y in sorted(set(ys))}
        careers[a] = AuthorCareer(a, ys[0], works_before, ys)

    team: list[TeamStats] = []
    for i in range(corpus.n_docs):
        auths = corpus.authors[i]
        doc_id = corpus.doc_ids[i]
        if not auths:
            team.append(TeamStats(doc_id, None, None))
            continue
        y = int(corpus.years[i])
        ages = [careers[a].career_age(y) for a in auths]
        prior = [careers[a].prior_works(y) for a in auths]
        mean_age = sum(ages) / len(ages)
        team.append(TeamStats(doc_id, mean_age, sum(prior) / len(prior),
                              excluded=mean_age > cap_years))
    return careers, team


# ----------------------------------------------------------------------
# Binary cache


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the versioned binary cache ("CDC1" magic header)."""
    payload = {
        "doc_ids": corpus.doc_ids,
        "kinds": corpus.kinds,
        "years": corpus.years,
        "field_sub": corpus.field_sub,
        "field_area": corpus.field_area,
        "venues": corpus.venues,
        "titles": corpus.titles,
        "abstracts": corpus.abstracts,
        "authors": corpus.authors,
        "taxonomy": corpus.taxonomy,
        "fw_ptr": corpus.graph.fw_ptr,
        "fw_idx": corpus.graph.fw_idx,
        "bw_ptr": corpus.graph.bw_ptr,
        "bw_idx": corpus.graph.bw_idx,
        "validation": vars(corpus.validation),
    }
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(pickle.dumps(payload, protocol=4))


def load_corpus(path: str | Path) -> Corpus:
    with open(path, "rb") as fh:
        magic = fh.read(len(CACHE_MAGIC))
        if magic != CACHE_MAGIC:
            raise CacheError(
                f"{path}: not a corpus cache or version mismatch "
                f"(expected magic {CACHE_MAGIC!r}, found {magic!r})")
        payload = pickle.loads(fh.read())
    graph = CitationGraph(payload["doc_ids"], payload["years"],
                          payload["fw_ptr"], payload["fw_idx"],
                          payload["bw_ptr"], payload["bw_idx"])
    return Corpus(graph, payload["kinds"], payload["field_sub"], payload["field_area"],
                  payload["venues"], payload["titles"], payload["abstracts"],
                  payload["authors"], payload["taxonomy"],
                  ValidationReport(**payload["validation"]))


def is_corpus_cache(path: str | Path) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(len(CACHE_MAGIC)) == CACHE_MAGIC
    except OSError:
        return False
