"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random

import numpy as np

from cdengine import Corpus, IngestOptions


def make_corpus(docs, edges=(), taxonomy=None):
    """Build a corpus from compact dicts.

    Each doc dict needs id/year; kind, field, venue, title, abstract, authors
    are optional.
    """
    ids = [d["id"] for d in docs]
    index = {d: i for i, d in enumerate(ids)}
    u = np.asarray([index[a] for a, b in edges], dtype=np.int64)
    v = np.asarray([index[b] for a, b in edges], dtype=np.int64)
    return Corpus.from_columns(
        ids,
        [d.get("kind", "paper") for d in docs],
        [d["year"] for d in docs],
        [d.get("field", "F") for d in docs],
        u,
        v,
        venues=[d.get("venue") for d in docs],
        titles=[d.get("title") for d in docs],
        abstracts=[d.get("abstract") for d in docs],
        authors=[d.get("authors", []) for d in docs],
        options=IngestOptions(taxonomy=taxonomy),
    )


def chain_corpus():
    """C cites B cites A (years 1950..1952)."""
    return make_corpus(
        [{"id": "A", "year": 1950}, {"id": "B", "year": 1951}, {"id": "C", "year": 1952}],
        [("B", "A"), ("C", "B")],
    )


def enumeration_fixture():
    """Focal with refs {r1, r2}; w1 cites focal; w2 cites focal+r1; w3 cites r2."""
    return make_corpus(
        [
            {"id": "focal", "year": 2000},
            {"id": "r1", "year": 1995},
            {"id": "r2", "year": 1996},
            {"id": "w1", "year": 2001},
            {"id": "w2", "year": 2002},
            {"id": "w3", "year": 2003},
        ],
        [("focal", "r1"), ("focal", "r2"), ("w1", "focal"),
         ("w2", "focal"), ("w2", "r1"), ("w3", "r2")],
    )


def random_corpus(rng: random.Random, n_max: int = 30, p_lo: float = 0.1, p_hi: float = 0.4):
    """Random digraph with random years; chronology violations allowed."""
    n = rng.randint(4, n_max)
    p = rng.uniform(p_lo, p_hi)
    years = [rng.randint(1990, 2010) for _ in range(n)]
    edges_u, edges_v = [], []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                edges_u.append(u)
                edges_v.append(v)
    return Corpus.from_columns(
        [f"d{i}" for i in range(n)], "paper", years,
        [rng.choice(["F1", "F2"]) for _ in range(n)],
        np.asarray(edges_u, dtype=np.int64), np.asarray(edges_v, dtype=np.int64),
        venues=[rng.choice(["VX", "VY", "VZ", None]) for _ in range(n)],
        titles=[f"title {i} alpha" for i in range(n)],
        authors=[[f"a{rng.randint(0, n // 2)}"] for _ in range(n)],
    )


def big_synthetic_corpus(n: int = 1_000_000, m: int = 10_000_000, seed: int = 7) -> Corpus:
    """Large chronological corpus: node i's year grows with i, references
    point uniformly at earlier nodes. Built fully vectorized.
    """
    rng = np.random.default_rng(seed)
    years = 1950 + (np.arange(n, dtype=np.int64) * 60) // n
    citing = rng.integers(1, n, size=int(m * 1.06), dtype=np.int64)
    cited = (rng.random(citing.shape[0]) * citing).astype(np.int64)
    codes = np.unique(citing * np.int64(n) + cited)
    if codes.shape[0] > m:
        pick = np.sort(rng.choice(codes.shape[0], size=m, replace=False))
        codes = codes[pick]
    citing = codes // n
    cited = codes % n
    return Corpus.from_columns(
        [f"d{i}" for i in range(n)], "paper", years, "F", citing, cited)


def hub_growth_corpus(first_year: int = 2000, n_years: int = 14,
                      per_year: int = 30, hub_start_offset: int = 7,
                      n_hub_docs: int = 15, adopters_slope: int = 5) -> Corpus:
    """Deterministic corpus whose reference-list lengths grow over time.

    Each "main" document cites two private predecessors nobody else ever
    cites plus the same-slot main document of the previous year, so in early
    years no other document co-cites a focal work's references. From
    ``first_year + hub_start_offset`` onward a growing share of each cohort
    also cites all shared "hub" documents of the previous year; hubs are
    co-cited across the cohort, mechanically inflating the
    only-cite-the-references class as reference lists lengthen. Hubs and
    private docs live in an auxiliary field so the MAIN field's mean
    reference count reflects the growth exactly.
    """
    ids, years, fields = [], [], []
    edges_u, edges_v = [], []

    def add(doc_id, year, field):
        ids.append(doc_id)
        years.append(year)
        fields.append(field)
        return len(ids) - 1

    hub_year0 = first_year + hub_start_offset

    def n_adopters(year):
        return min(per_year, max(0, (year - hub_year0) * adopters_slope))

    mains: dict[int, list[int]] = {}
    hubs: dict[int, list[int]] = {}
    for y in range(first_year, first_year + n_years):
        n_hubs = n_hub_docs if y >= hub_year0 else 0
        hubs[y] = [add(f"hub{y}_{k}", y, "AUX") for k in range(n_hubs)]
        mains[y] = [add(f"m{y}_{j}", y, "MAIN") for j in range(per_year)]
        for j, m in enumerate(mains[y]):
            if y == first_year:
                continue
            for p in range(2):
                edges_u.append(m)
                edges_v.append(add(f"priv{y}_{j}_{p}", y - 1, "AUX"))
            edges_u.append(m)
            edges_v.append(mains[y - 1][j])
            if j < n_adopters(y):
                for h in hubs[y - 1]:
                    edges_u.append(m)
                    edges_v.append(h)
    return Corpus.from_columns(
        ids, "paper", years, fields,
        np.asarray(edges_u, dtype=np.int64), np.asarray(edges_v, dtype=np.int64),
        options=IngestOptions(taxonomy={"MAIN": "MAIN", "AUX": "AUX"}))


def write_nodes_tsv(path, docs):
    lines = ["\t".join(["doc_id", "kind", "year", "field_sub", "venue", "title",
                        "abstract", "author_ids"])]
    for d in docs:
        lines.append("\t".join([
            d["id"], d.get("kind", "paper"), str(d["year"]), d.get("field", "F"),
            d.get("venue", ""), d.get("title", ""), d.get("abstract", ""),
            ";".join(d.get("authors", [])),
        ]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_edges_tsv(path, edges):
    lines = ["citing_id\tcited_id"] + [f"{a}\t{b}" for a, b in edges]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_taxonomy_tsv(path, mapping):
    lines = ["field_sub\tfield_area"] + [f"{k}\t{v}" for k, v in mapping.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
