"""Degree- and age-preserving citation rewiring and null-model comparisons.

The rewiring move is a constrained double-edge swap: pick two distinct edges
(A->B, C->D) and propose (A->D, C->B). A proposal is retained only when the
cited endpoints share a publication year, neither proposed edge would be a
self-loop, and neither already exists. Every replica therefore preserves each
node's in- and out-degree and, per citing node, the multiset of cited years.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .disruption import DisruptionConfig, batch_cd
from .errors import RewireError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewireConfig:
    replicas: int = 10
    swap_multiplier: int = 100
    seed: int = 0
    subsample_fraction: float = 1.0

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.swap_multiplier < 1:
            raise ValueError("swap_multiplier must be >= 1")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise ValueError("subsample_fraction must be in (0, 1]")


def _child_rng(seed: int, *key: int) -> random.Random:
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return random.Random(int(ss.generate_state(1, np.uint64)[0]))


def rewire(graph, config: RewireConfig, replica_index: int, attempts: int | None = None):
    """One rewired replica; deterministic in (config.seed, replica_index).

    ``attempts`` overrides the default swap_multiplier * m iteration budget
    (useful for stepping the chain a controlled number of moves).
    """
    m = graph.m
    if m < 2:
        raise RewireError(f"need at least 2 edges to rewire, have {m}")
    n = graph.n
    src_arr, dst_arr = graph.edge_arrays()
    src = src_arr.tolist()
    dst = dst_arr.tolist()
    years = graph.year_of.tolist()
    codes = set((s * n + d) for s, d in zip(src, dst))

    rng = _child_rng(config.seed, 0, replica_index)
    if attempts is None:
        attempts = config.swap_multiplier * m
    accepted = 0
    for _ in range(attempts):
        i = rng.randrange(m)
        j = rng.randrange(m - 1)
        if j >= i:
            j += 1
        a, b = src[i], dst[i]
        c, d = src[j], dst[j]
        if years[b] != years[d]:
            continue
        if a == d or c == b:
            continue
        if (a * n + d) in codes or (c * n + b) in codes:
            continue
        codes.discard(a * n + b)
        codes.discard(c * n + d)
        codes.add(a * n + d)
        codes.add(c * n + b)
        dst[i] = d
        dst[j] = b
        accepted += 1

    if attempts:
        log.debug("rewire replica %d: accepted %d of %d attempts (%.2f%%)",
                  replica_index, accepted, attempts, 100.0 * accepted / attempts)
    return graph.with_edges(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))


# ----------------------------------------------------------------------
# CD z-scores against the null ensemble


@dataclass
class ZScoreTable:
    doc_indices: np.ndarray
    doc_ids: list[str]
    observed: np.ndarray
    null_mean: np.ndarray
    null_sd: np.ndarray
    z: np.ndarray  # NaN = undefined
    yearly: list[tuple[int, float | None, int]]  # (year, mean z, n defined)


def z_stats(observed: float | None, nulls: list[float | None]
            ) -> tuple[float | None, float | None, float | None]:
    """(null mean, sample sd, z) for one document; None where undefined.

    Scalar reference route for the vectorized computation in
    :func:`cd_zscores`; z is undefined when the sd is 0 or any value involved
    is undefined.
    """
    if any(v is None for v in nulls):
        return None, None, None
    k = len(nulls)
    mean = sum(nulls) / k
    var = sum((v - mean) ** 2 for v in nulls) / (k - 1)
    sd = var ** 0.5
    if observed is None or sd == 0:
        return mean, sd, None
    return mean, sd, (observed - mean) / sd


def subsample_indices(n: int, fraction: float, seed: int) -> np.ndarray:
    """Deterministic focal-document subsample (its own derived seed stream)."""
    if fraction >= 1.0:
        return np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    size = max(1, int(round(fraction * n)))
    return np.sort(rng.choice(n, size=size, replace=False)).astype(np.int64)


def cd_zscores(corpus, disruption_config: DisruptionConfig, rewire_config: RewireConfig,
               threads: int | None = None) -> ZScoreTable:
    """Observed CD versus the rewired ensemble, per sampled focal document.

    Sample (n-1) standard deviation across replicas; z is undefined when the
    null sd is 0 or any score involved is undefined.
    """
    if rewire_config.replicas < 2:
        raise RewireError("z-scores need at least 2 replicas")
    sample = subsample_indices(corpus.n_docs, rewire_config.subsample_fraction,
                               rewire_config.seed)
    observed = batch_cd(corpus, disruption_config, threads).values[sample]

    null_vals = np.empty((rewire_config.replicas, sample.shape[0]), dtype=np.float64)
    for rep in range(rewire_config.replicas):
        g = rewire(corpus.graph, rewire_config, rep)
        null_vals[rep] = batch_cd(corpus.with_graph(g), disruption_config, threads).values[sample]

    mean = null_vals.mean(axis=0)
    sd = null_vals.std(axis=0, ddof=1)
    defined = (~np.isnan(observed)) & (~np.isnan(null_vals).any(axis=0)) & (sd > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(defined, (observed - mean) / np.where(sd > 0, sd, 1.0), np.nan)

    yearly: list[tuple[int, float | None, int]] = []
    years = corpus.years[sample]
    for y in sorted(set(int(v) for v in years)):
        zy = z[(years == y) & ~np.isnan(z)]
        yearly.append((y, float(zy.mean()) if zy.shape[0] else None, int(zy.shape[0])))

    return ZScoreTable(sample, [corpus.doc_ids[i] for i in sample],
                       observed, mean, sd, z, yearly)


# ----------------------------------------------------------------------
# Atypical combinations of cited-work keys


@dataclass
class AtypicalResult:
    # (doc index, n scored pairs, conventionality z, novelty z); None marks a
    # document whose pairs all had undefined z
    doc_rows: list[tuple[int, int, float | None, float | None]]
    cdf_rows: list[tuple[int, float, float]]  # (decade, grid value, cdf)
    skipped_few_refs: int
    refs_missing_key: int


def _doc_pair_multiset(keys: list[str], self_pairs: bool) -> list[tuple[str, str]]:
    pairs = []
    for a, b in combinations(keys, 2):
        if a > b:
            a, b = b, a
        if a == b and not self_pairs:
            continue
        pairs.append((a, b))
    return pairs


def cited_key_pairs(corpus, doc: int, self_pairs: bool = True) -> list[tuple[str, str]]:
    """Unordered pairs of cited-work keys for one citing document."""
    keys = [corpus.venues[int(r)] for r in corpus.graph.out_neighbors(doc)]
    return _doc_pair_multiset([k for k in keys if k is not None], self_pairs)


def _pair_counts(corpus, graph, self_pairs: bool) -> dict[tuple[int, str, str], int]:
    """Pair occurrences pooled per publication year of the citing document."""
    counts: dict[tuple[int, str, str], int] = {}
    venues = corpus.venues
    years = corpus.years
    for d in range(corpus.n_docs):
        refs = graph.out_neighbors(d)
        if refs.shape[0] < 2:
            continue
        keys = [venues[int(r)] for r in refs]
        keys = [k for k in keys if k is not None]
        if len(keys) < 2:
            continue
        y = int(years[d])
        for pair in _doc_pair_multiset(keys, self_pairs):
            key = (y, pair[0], pair[1])
            counts[key] = counts.get(key, 0) + 1
    return counts


def atypical_combinations(corpus, rewire_config: RewireConfig,
                          pair_key: str = "venue", self_pairs: bool = True,
                          quantiles: tuple[float, float] = (50.0, 10.0),
                          grid_points: int = 101) -> AtypicalResult:
    """Uzzi-style conventionality/novelty of cited-key pairings.

    Every unordered pair of cited-work keys a document makes is compared, via
    a z-score, against the pair's frequency in the rewired replicas (pooled by
    citing year). Per document we summarize its pair z-scores at two
    percentiles (default: median = conventionality, 10th = novelty) and emit
    the per-decade empirical CDF of the novelty summary.

    pair_key may be "venue" or "class_code"; both resolve to the venue column,
    which stores the journal for papers and the classification code for
    patents.
    """
    if pair_key not in ("venue", "class_code"):
        raise ValueError(f"pair_key must be 'venue' or 'class_code', got {pair_key!r}")
    if rewire_config.replicas < 2:
        raise RewireError("pair z-scores need at least 2 replicas")

    obs = _pair_counts(corpus, corpus.graph, self_pairs)
    reps = []
    for rep in range(rewire_config.replicas):
        g = rewire(corpus.graph, rewire_config, rep)
        reps.append(_pair_counts(corpus, g, self_pairs))

    all_keys = set(obs)
    for r in reps:
        all_keys.update(r)
    zs: dict[tuple[int, str, str], float | None] = {}
    nrep = len(reps)
    for key in all_keys:
        vals = [r.get(key, 0) for r in reps]
        mean = sum(vals) / nrep
        var = sum((v - mean) ** 2 for v in vals) / (nrep - 1)
        if var <= 0:
            zs[key] = None
        else:
            zs[key] = (obs.get(key, 0) - mean) / (var ** 0.5)

    doc_rows: list[tuple[int, int, float | None, float | None]] = []
    skipped = 0
    missing_refs = 0
    venues = corpus.venues
    years = corpus.years
    graph = corpus.graph
    for d in range(corpus.n_docs):
        refs = graph.out_neighbors(d)
        if refs.shape[0] == 0:
            continue
        keys = [venues[int(r)] for r in refs]
        n_missing = sum(1 for k in keys if k is None)
        missing_refs += n_missing
        keys = [k for k in keys if k is not None]
        if len(keys) < 2:
            skipped += 1
            continue
        y = int(years[d])
        doc_z = [zs[(y, a, b)] for a, b in _doc_pair_multiset(keys, self_pairs)]
        doc_z = [z for z in doc_z if z is not None]
        if not doc_z:
            doc_rows.append((d, 0, None, None))
            continue
        arr = np.asarray(doc_z)
        conv = float(np.percentile(arr, quantiles[0]))
        nov = float(np.percentile(arr, quantiles[1]))
        doc_rows.append((d, len(doc_z), conv, nov))

    cdf_rows = _decade_cdf(corpus, doc_rows, grid_points)
    return AtypicalResult(doc_rows, cdf_rows, skipped, missing_refs)


def _decade_cdf(corpus, doc_rows, grid_points: int) -> list[tuple[int, float, float]]:
    by_decade: dict[int, list[float]] = {}
    years = corpus.years
    for d, _, _, nov in doc_rows:
        if nov is None:
            continue
        decade = (int(years[d]) // 10) * 10
        by_decade.setdefault(decade, []).append(nov)
    if not by_decade:
        return []
    all_vals = [v for vs in by_decade.values() for v in vs]
    lo, hi = min(all_vals), max(all_vals)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    grid = np.linspace(lo, hi, grid_points)
    rows = []
    for decade in sorted(by_decade):
        vals = np.sort(np.asarray(by_decade[decade]))
        cdf = np.searchsorted(vals, grid, side="right") / vals.shape[0]
        for g, c in zip(grid, cdf):
            rows.append((decade, float(g), float(c)))
    return rows
