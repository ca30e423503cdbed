"""CD-index family: windowed disruption scores over a citation graph.

For a focal work with reference set R, citers inside the forward window fall
into three classes:

    ni -- cite the focal work without satisfying the j-rule over R
    nj -- cite the focal work and satisfy the j-rule over R
    nk -- satisfy the j-rule over R without citing the focal work

and the score is (ni - nj) / (ni + nj + nk), with nk optionally dropped from
the denominator. A zero denominator yields an undefined score (None / NaN),
never an error: denominator-zero documents must stay auditable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit, prange

AT_LEAST = "at_least"
ALL_REFERENCES = "all_references"


@dataclass(frozen=True)
class JRule:
    """Membership rule for the j/k classes (citing "the predecessors")."""

    kind: str
    l: int = 1

    def __post_init__(self):
        if self.kind not in (AT_LEAST, ALL_REFERENCES):
            raise ValueError(f"unknown j-rule kind: {self.kind!r}")
        if self.kind == AT_LEAST and self.l < 1:
            raise ValueError("at_least rule requires l >= 1")

    @classmethod
    def at_least(cls, l: int = 1) -> "JRule":
        return cls(AT_LEAST, l)

    @classmethod
    def all_references(cls) -> "JRule":
        return cls(ALL_REFERENCES)

    def matches(self, hits: int, nb: int) -> bool:
        if self.kind == AT_LEAST:
            return hits >= self.l
        return nb > 0 and hits == nb


@dataclass(frozen=True)
class DisruptionConfig:
    """window is a forward span in years; None means "up to the horizon".

    The horizon defaults to the corpus maximum year and only applies to the
    unbounded window. Same-year citers are included by default; setting
    include_same_year=False shifts the window to (y, y+t].
    """

    window: int | None = 5
    include_same_year: bool = True
    j_rule: JRule = JRule(AT_LEAST, 1)
    include_k_in_denominator: bool = True
    normalization: str = "none"  # consumed by the normalize module
    horizon: int | None = None


@dataclass
class DisruptionScore:
    doc_id: str
    ni: int
    nj: int
    nk: int
    nb: int
    value: float | None


def _window_bounds(year_f: int, config: DisruptionConfig, graph) -> tuple[int, int]:
    lo = year_f if config.include_same_year else year_f + 1
    if config.window is None:
        hi = config.horizon if config.horizon is not None else int(graph.year_of.max())
    else:
        hi = year_f + config.window
    return lo, hi


def classify_citers(graph, focal: int, config: DisruptionConfig = DisruptionConfig()
                    ) -> tuple[int, int, int, int]:
    """Count (ni, nj, nk, nb) for one focal node by direct neighbor walk."""
    years = graph.year_of
    lo, hi = _window_bounds(int(years[focal]), config, graph)
    refs = graph.out_neighbors(focal)
    nb = int(refs.shape[0])

    hits: dict[int, int] = {}
    for r in refs:
        for w in graph.in_neighbors(r):
            w = int(w)
            if w == focal:
                continue
            if lo <= years[w] <= hi:
                hits[w] = hits.get(w, 0) + 1

    ni = nj = 0
    f_citers = set()
    for w in graph.in_neighbors(focal):
        w = int(w)
        if not lo <= years[w] <= hi:
            continue
        f_citers.add(w)
        if config.j_rule.matches(hits.get(w, 0), nb):
            nj += 1
        else:
            ni += 1

    nk = 0
    for w, h in hits.items():
        if w not in f_citers and config.j_rule.matches(h, nb):
            nk += 1
    return ni, nj, nk, nb


def _score_value(ni: int, nj: int, nk, include_k: bool) -> float | None:
    denom = ni + nj + (nk if include_k else 0)
    if denom <= 0:
        return None
    return (ni - nj) / denom


def cd_index(graph, focal: int, config: DisruptionConfig = DisruptionConfig()) -> DisruptionScore:
    ni, nj, nk, nb = classify_citers(graph, focal, config)
    value = _score_value(ni, nj, nk, config.include_k_in_denominator)
    return DisruptionScore(graph.ids[focal], ni, nj, nk, nb, value)


def cd_index_summation_oracle(graph, focal: int,
                              config: DisruptionConfig = DisruptionConfig()) -> float | None:
    """Per-citer summation route: (1/n_t) * sum(-2*f*b + f) over the window.

    Deliberately implemented as a full scan over all nodes, independent of the
    neighbor-walk in :func:`classify_citers`, so the two can cross-check each
    other.
    """
    years = graph.year_of
    lo, hi = _window_bounds(int(years[focal]), config, graph)
    refs = set(int(r) for r in graph.out_neighbors(focal))
    nb = len(refs)

    total = 0
    n_t = 0
    for w in range(graph.n):
        if w == focal or not lo <= years[w] <= hi:
            continue
        out_w = set(int(x) for x in graph.out_neighbors(w))
        f = 1 if focal in out_w else 0
        b = 1 if config.j_rule.matches(len(out_w & refs), nb) else 0
        if f == 0 and b == 0:
            continue
        total += -2 * f * b + f
        if config.include_k_in_denominator:
            n_t += 1
        else:
            n_t += f
    if n_t == 0:
        return None
    return total / n_t


# ----------------------------------------------------------------------
# Batch path


_N_BLOCKS = 64  # fixed work decomposition so results never depend on thread count


@njit(cache=True, parallel=True)
def _batch_counts(fw_ptr, fw_idx, bw_ptr, bw_idx, years,
                  same_year_off, window, horizon, rule_at_least, l, cand_cap, out):
    n = years.shape[0]
    for blk in prange(_N_BLOCKS):
        f_start = blk * n // _N_BLOCKS
        f_end = (blk + 1) * n // _N_BLOCKS
        if f_start >= f_end:
            continue
        stamp = np.zeros(n, np.int64)
        hits = np.zeros(n, np.int64)
        fmark = np.zeros(n, np.int64)
        cand = np.empty(cand_cap, np.int64)
        epoch = 0
        for f in range(f_start, f_end):
            epoch += 1
            yf = years[f]
            wlo = yf + same_year_off
            whi = horizon if window < 0 else yf + window
            r0 = fw_ptr[f]
            r1 = fw_ptr[f + 1]
            nb = r1 - r0
            ncand = 0
            for ri in range(r0, r1):
                r = fw_idx[ri]
                for wi in range(bw_ptr[r], bw_ptr[r + 1]):
                    w = bw_idx[wi]
                    if w == f:
                        continue
                    yw = years[w]
                    if yw < wlo or yw > whi:
                        continue
                    if stamp[w] != epoch:
                        stamp[w] = epoch
                        hits[w] = 0
                        cand[ncand] = w
                        ncand += 1
                    hits[w] += 1
            ni = 0
            nj = 0
            for wi in range(bw_ptr[f], bw_ptr[f + 1]):
                w = bw_idx[wi]
                yw = years[w]
                if yw < wlo or yw > whi:
                    continue
                h = hits[w] if stamp[w] == epoch else 0
                if rule_at_least:
                    bflag = h >= l
                else:
                    bflag = nb > 0 and h == nb
                if bflag:
                    nj += 1
                else:
                    ni += 1
                fmark[w] = epoch
            nk = 0
            for ci in range(ncand):
                w = cand[ci]
                if fmark[w] == epoch:
                    continue
                h = hits[w]
                if rule_at_least:
                    bflag = h >= l
                else:
                    bflag = nb > 0 and h == nb
                if bflag:
                    nk += 1
            out[f, 0] = ni
            out[f, 1] = nj
            out[f, 2] = nk
            out[f, 3] = nb


def _candidate_cap(graph) -> int:
    indeg = graph.in_degree()
    if graph.m == 0:
        return 1
    csum = np.concatenate((np.zeros(1, np.int64), np.cumsum(indeg[graph.fw_idx])))
    per_focal = csum[graph.fw_ptr[1:]] - csum[graph.fw_ptr[:-1]]
    return int(max(per_focal.max(), 1))


def set_worker_count(threads: int | None) -> int:
    """Cap the numba thread pool; returns the effective worker count."""
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        threads = limit
    threads = max(1, min(int(threads), limit))
    numba.set_num_threads(threads)
    return threads


@dataclass
class DisruptionTable:
    """Batch result: one row per document, dense-index aligned with the corpus."""

    doc_ids: list[str]
    years: np.ndarray
    ni: np.ndarray
    nj: np.ndarray
    nk: np.ndarray
    nb: np.ndarray
    values: np.ndarray  # NaN marks an undefined score

    def __len__(self) -> int:
        return len(self.doc_ids)

    def score(self, doc_id: str) -> DisruptionScore:
        i = self.doc_ids.index(doc_id)
        return self.score_at(i)

    def score_at(self, i: int) -> DisruptionScore:
        v = float(self.values[i])
        return DisruptionScore(self.doc_ids[i], int(self.ni[i]), int(self.nj[i]),
                               int(self.nk[i]), int(self.nb[i]),
                               None if np.isnan(v) else v)

    def iter_scores(self) -> Iterator[DisruptionScore]:
        for i in range(len(self.doc_ids)):
            yield self.score_at(i)


def batch_counts(graph, config: DisruptionConfig, threads: int | None = None) -> np.ndarray:
    """(n, 4) array of [ni, nj, nk, nb] for every node."""
    set_worker_count(threads)
    horizon = config.horizon if config.horizon is not None else (
        int(graph.year_of.max()) if graph.n else 0)
    window = -1 if config.window is None else int(config.window)
    out = np.zeros((graph.n, 4), dtype=np.int64)
    if graph.n == 0:
        return out
    _batch_counts(graph.fw_ptr, graph.fw_idx, graph.bw_ptr, graph.bw_idx,
                  graph.year_of,
                  0 if config.include_same_year else 1,
                  window, horizon,
                  config.j_rule.kind == AT_LEAST, config.j_rule.l,
                  _candidate_cap(graph), out)
    return out


def values_from_counts(counts: np.ndarray, include_k: bool = True) -> np.ndarray:
    ni = counts[:, 0].astype(np.float64)
    nj = counts[:, 1].astype(np.float64)
    nk = counts[:, 2].astype(np.float64)
    denom = ni + nj + (nk if include_k else 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(denom > 0, (ni - nj) / np.where(denom > 0, denom, 1.0), np.nan)
    return vals


def batch_cd(corpus, config: DisruptionConfig = DisruptionConfig(),
             threads: int | None = None) -> DisruptionTable:
    """One score per document; deterministic and thread-count invariant."""
    counts = batch_counts(corpus.graph, config, threads)
    values = values_from_counts(counts, config.include_k_in_denominator)
    return DisruptionTable(corpus.doc_ids, corpus.years,
                           counts[:, 0], counts[:, 1], counts[:, 2], counts[:, 3],
                           values)


def di_variants(corpus, window: int | None = 5, include_same_year: bool = True,
                horizon: int | None = None, threads: int | None = None
                ) -> dict[str, DisruptionTable]:
    """The standard score plus the two alternative indicators.

    cd        -- j-rule at_least(1), k in the denominator
    di_1_no_k -- same classes, k dropped from the denominator
    di_star   -- j/k classes require citing every reference of the focal work
                 (vacuously unsatisfiable when it has none; such documents are
                 flagged through nb == 0)
    """
    base_cfg = DisruptionConfig(window=window, include_same_year=include_same_year,
                                horizon=horizon)
    star_cfg = DisruptionConfig(window=window, include_same_year=include_same_year,
                                horizon=horizon, j_rule=JRule.all_references())
    base = batch_counts(corpus.graph, base_cfg, threads)
    star = batch_counts(corpus.graph, star_cfg, threads)

    def table(counts, include_k):
        return DisruptionTable(corpus.doc_ids, corpus.years,
                               counts[:, 0], counts[:, 1], counts[:, 2], counts[:, 3],
                               values_from_counts(counts, include_k))

    return {
        "cd": table(base, True),
        "di_1_no_k": table(base, False),
        "di_star": table(star, True),
    }


# ----------------------------------------------------------------------
# Bucket conservation

BUCKET_EDGES = (0.0, 0.25, 0.5, 0.75, 1.0)
BUCKET_LABELS = ("(0,0.25]", "(0.25,0.5]", "(0.5,0.75]", "(0.75,1]")


def bucket_conservation(table: DisruptionTable, corpus
                        ) -> tuple[dict[int, tuple[int, int, int, int]],
                                   dict[tuple[int, str], float]]:
    """Yearly counts over the four positive score intervals, plus the
    field-area composition of strongly positive scores (> 0.25).

    Intervals are left-open right-closed; an exact 0 falls in no bucket.
    Every year in the corpus span gets a row, zeros included.
    """
    if len(table) == 0:
        return {}, {}
    years = corpus.years
    counts: dict[int, list[int]] = {int(y): [0, 0, 0, 0]
                                    for y in range(int(years.min()), int(years.max()) + 1)}
    strong: dict[tuple[int, str], int] = {}
    strong_totals: dict[int, int] = {}
    vals = table.values
    for i in range(len(table)):
        v = vals[i]
        if np.isnan(v) or v <= 0:
            continue
        y = int(years[i])
        for b in range(4):
            if BUCKET_EDGES[b] < v <= BUCKET_EDGES[b + 1]:
                counts[y][b] += 1
                break
        if v > 0.25:
            key = (y, corpus.field_area[i])
            strong[key] = strong.get(key, 0) + 1
            strong_totals[y] = strong_totals.get(y, 0) + 1
    composition = {key: c / strong_totals[key[0]] for key, c in sorted(strong.items())}
    return {y: tuple(c) for y, c in counts.items()}, composition
