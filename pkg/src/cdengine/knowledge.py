"""Knowledge-use metrics: citation diversity, self-citation, cited-work age,
concentration on the most-cited works, and semantic diversity of their titles.
"""

from __future__ import annotations

import math
import re
import zlib
from collections import Counter
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError

Vectorizer = Callable[[str], np.ndarray]

_TOKEN_RE = re.compile(r"\w+")


def _field_column(corpus, field_level: str) -> list[str]:
    if field_level == "sub":
        return corpus.field_sub
    if field_level == "area":
        return corpus.field_area
    raise ValueError(f"field level must be 'sub' or 'area', got {field_level!r}")


def diversity_of_work_cited(corpus, field_level: str = "sub"
                            ) -> dict[tuple[str, int], float | None]:
    """Normalized entropy of citation targets per citing field-year group.

    With target counts c_1..c_K and p_i = c_i / sum(c), the value is
    -sum(p_i ln p_i) / ln K, defined as 0 when K == 1 and missing (None) for
    groups with no citation events.
    """
    fields = _field_column(corpus, field_level)
    years = corpus.years
    graph = corpus.graph
    counters: dict[tuple[str, int], Counter] = {}
    for d in range(corpus.n_docs):
        key = (fields[d], int(years[d]))
        ctr = counters.setdefault(key, Counter())
        for r in graph.out_neighbors(d):
            ctr[int(r)] += 1

    out: dict[tuple[str, int], float | None] = {}
    for key, ctr in sorted(counters.items()):
        if not ctr:
            out[key] = None
            continue
        out[key] = normalized_entropy(list(ctr.values()))
    return out


def normalized_entropy(counts: list[int]) -> float:
    k = len(counts)
    if k == 1:
        return 0.0
    total = float(sum(counts))
    h = -sum((c / total) * math.log(c / total) for c in counts if c)
    return h / math.log(k)


def self_citation_ratio(corpus, focal: int) -> float | None:
    """Share of the focal document's references written by any of its authors.

    Missing when the document has no references or no author list.
    """
    refs = corpus.graph.out_neighbors(focal)
    focal_authors = set(corpus.authors[focal])
    if refs.shape[0] == 0 or not focal_authors:
        return None
    shared = sum(1 for r in refs if focal_authors.intersection(corpus.authors[int(r)]))
    return shared / refs.shape[0]


def age_of_work_cited(corpus, focal: int) -> tuple[float, float] | None:
    """Mean and population-sd age of the focal document's references.

    Ages may be negative (citations to later-dated works occur in real data);
    a single reference yields dispersion exactly 0.
    """
    refs = corpus.graph.out_neighbors(focal)
    if refs.shape[0] == 0:
        return None
    ages = float(corpus.years[focal]) - corpus.years[refs].astype(np.float64)
    return float(ages.mean()), float(ages.std())


def top_cited_membership(corpus, field_level: str = "sub", as_of_year: int | None = None
                         ) -> dict[str, list[int]]:
    """Per field: the ceil(1%) most-cited documents, by citations received.

    Citation counts are cumulative over the whole corpus horizon unless
    as_of_year bounds the citing side. Only documents with at least one
    citation qualify; ties at the cutoff break by ascending dense index.
    """
    graph = corpus.graph
    if as_of_year is None:
        cites = graph.in_degree()
    else:
        u, v = graph.edge_arrays()
        mask = corpus.years[u] <= as_of_year
        cites = np.bincount(v[mask], minlength=corpus.n_docs).astype(np.int64)

    fields = _field_column(corpus, field_level)
    by_field: dict[str, list[int]] = {}
    for i in range(corpus.n_docs):
        if cites[i] > 0:
            by_field.setdefault(fields[i], []).append(i)

    membership: dict[str, list[int]] = {}
    for f, docs in sorted(by_field.items()):
        docs.sort(key=lambda i: (-int(cites[i]), i))
        take = math.ceil(0.01 * len(docs))
        membership[f] = docs[:take]
    return membership


def top1pct_share(corpus, field_level: str = "sub", as_of_year: int | None = None
                  ) -> tuple[dict[tuple[str, int], float | None], dict[str, list[int]]]:
    """Share of a field-year group's citation events aimed at top-cited works.

    Groups with zero citation events are missing (None).
    """
    membership = top_cited_membership(corpus, field_level, as_of_year)
    top_set = {i for docs in membership.values() for i in docs}
    fields = _field_column(corpus, field_level)
    years = corpus.years
    graph = corpus.graph

    events: dict[tuple[str, int], list[int]] = {}
    for d in range(corpus.n_docs):
        key = (fields[d], int(years[d]))
        slot = events.setdefault(key, [0, 0])
        refs = graph.out_neighbors(d)
        slot[0] += int(refs.shape[0])
        slot[1] += int(sum(1 for r in refs if int(r) in top_set))

    shares = {key: (hit / total if total else None)
              for key, (total, hit) in sorted(events.items())}
    return shares, membership


def members_by_field_year(corpus, membership: Mapping[str, list[int]]
                          ) -> dict[tuple[str, int], list[int]]:
    """Slice per-field membership lists by each member's publication year."""
    out: dict[tuple[str, int], list[int]] = {}
    years = corpus.years
    for f, docs in membership.items():
        for i in docs:
            out.setdefault((f, int(years[i])), []).append(i)
    return {k: sorted(v) for k, v in sorted(out.items())}


# ----------------------------------------------------------------------
# Title vectorizers


def _title_tokens(title: str) -> list[str]:
    return _TOKEN_RE.findall(title.lower())


def hashed_title_vectorizer(dim: int = 256) -> Vectorizer:
    """Deterministic hashed bag-of-tokens vectorizer (crc32 bucketing).

    The default, so tests and batch runs need no external embedding files;
    reproducible bit-for-bit across processes.
    """

    def vectorize(title: str) -> np.ndarray:
        vec = np.zeros(dim, dtype=np.float64)
        for tok in _title_tokens(title):
            vec[zlib.crc32(tok.encode("utf-8")) % dim] += 1.0
        return vec

    return vectorize


def embedding_table_vectorizer(path) -> Vectorizer:
    """File-backed word embeddings: each line is token then float components.

    A title maps to the mean vector of its in-vocabulary tokens; titles with
    no known token map to a zero vector and are treated as unusable.
    """
    table: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if len(parts) < 2:
                continue
            vec = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ConfigError(f"{path}: inconsistent embedding width for {parts[0]!r}")
            table[parts[0]] = vec
    if not table:
        raise ConfigError(f"{path}: embedding table is empty")

    def vectorize(title: str) -> np.ndarray:
        vecs = [table[t] for t in _title_tokens(title) if t in table]
        if not vecs:
            return np.zeros(dim, dtype=np.float64)
        return np.mean(vecs, axis=0)

    return vectorize


def pairwise_cosine_similarities(vectors: np.ndarray) -> np.ndarray:
    """Upper-triangle cosine similarities of the rows (all pairs, i < j)."""
    norms = np.linalg.norm(vectors, axis=1)
    unit = vectors / norms[:, None]
    gram = unit @ unit.T
    iu = np.triu_indices(vectors.shape[0], k=1)
    return gram[iu]


def semantic_diversity(corpus, members_by_fy: Mapping[tuple[str, int], list[int]],
                       vectorizer: Vectorizer | None = None
                       ) -> dict[tuple[str, int], float | None]:
    """Coefficient of variation (population sd / mean) of pairwise title
    similarities within each membership group.

    Members without a usable title vector are skipped; groups left with fewer
    than 3 are missing, as are groups whose mean similarity is 0.
    """
    if vectorizer is None:
        vectorizer = hashed_title_vectorizer()
    titles = corpus.titles
    out: dict[tuple[str, int], float | None] = {}
    for key, docs in sorted(members_by_fy.items()):
        vecs = []
        for i in docs:
            t = titles[i]
            if t is None:
                continue
            v = vectorizer(t)
            if np.linalg.norm(v) == 0:
                continue
            vecs.append(v)
        if len(vecs) < 3:
            out[key] = None
            continue
        sims = pairwise_cosine_similarities(np.vstack(vecs))
        mean = sims.mean()
        if mean == 0:
            out[key] = None
            continue
        out[key] = float(sims.std() / mean)
    return out


# ----------------------------------------------------------------------
# Per-document batch rows for the CLI


def knowledge_rows(corpus) -> list[tuple[int, int, float | None, float | None, float | None]]:
    """(doc index, n_refs, self_cite_ratio, mean_age, sd_age) per document."""
    rows = []
    outdeg = corpus.graph.out_degree()
    for i in range(corpus.n_docs):
        age = age_of_work_cited(corpus, i)
        rows.append((
            i,
            int(outdeg[i]),
            self_citation_ratio(corpus, i),
            age[0] if age else None,
            age[1] if age else None,
        ))
    return rows
