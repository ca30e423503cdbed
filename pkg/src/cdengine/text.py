"""Lexical pipeline and metrics: type-token ratio, word-pair novelty, and
verb frequency tables over document titles and abstracts.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from typing import Callable

from .errors import ConfigError

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)

TITLE = "title"
ABSTRACT = "abstract"


def load_stopwords(path) -> frozenset[str]:
    """One token per line; matching is case-insensitive so store lowercase."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def default_stopwords() -> frozenset[str]:
    data = resources.files("cdengine").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w for w in data.split() if w)


def load_pos_lexicon(path) -> dict[str, str]:
    """Tab-separated lemma, part-of-speech; both normalized to lowercase."""
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigError(f"{path}: pos lexicon rows need 2 columns, got {len(parts)}")
            lexicon[parts[0].lower()] = parts[1].lower()
    return lexicon


@dataclass(frozen=True)
class TokenPipelineConfig:
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    min_len: int = 3
    max_len: int = 250
    lemmatizer: Callable[[str], str] | None = None  # None = identity
    pos_lexicon: dict[str, str] | None = None

    def __post_init__(self):
        if self.min_len >= self.max_len:
            raise ValueError("min_len must be < max_len")


def preprocess(text: str, config: TokenPipelineConfig = TokenPipelineConfig()) -> list[str]:
    """Tokenize on whitespace/punctuation, then drop stopwords (matched
    case-insensitively before lemmatization), letterless tokens, and tokens
    outside the length bounds; lemmatize and lowercase what survives.

    Idempotent on its own output under the default identity lemmatizer.
    """
    out = []
    lemmatize = config.lemmatizer
    for raw in _TOKEN_RE.findall(text):
        if raw.lower() in config.stopwords:
            continue
        if not any(ch.isalpha() for ch in raw):
            continue
        if not config.min_len <= len(raw) <= config.max_len:
            continue
        tok = (lemmatize(raw) if lemmatize else raw).lower()
        if tok:
            out.append(tok)
    return out


def _doc_text(corpus, i: int, scope: str) -> str | None:
    if scope == TITLE:
        return corpus.titles[i]
    if scope == ABSTRACT:
        return corpus.abstracts[i]
    raise ValueError(f"scope must be 'title' or 'abstract', got {scope!r}")


def _field_column(corpus, field_level: str) -> list[str]:
    if field_level == "sub":
        return corpus.field_sub
    if field_level == "area":
        return corpus.field_area
    raise ValueError(f"field level must be 'sub' or 'area', got {field_level!r}")


def abstract_coverage(corpus, field_level: str = "area") -> dict[tuple[str, int], tuple[int, int]]:
    """(documents, documents with an abstract) per field-year group."""
    fields = _field_column(corpus, field_level)
    years = corpus.years
    cov: dict[tuple[str, int], list[int]] = {}
    for i in range(corpus.n_docs):
        slot = cov.setdefault((fields[i], int(years[i])), [0, 0])
        slot[0] += 1
        if corpus.abstracts[i] is not None:
            slot[1] += 1
    return {k: (n, with_abs) for k, (n, with_abs) in sorted(cov.items())}


def type_token_ratio(corpus, scope: str = TITLE, field_level: str = "area",
                     config: TokenPipelineConfig = TokenPipelineConfig(),
                     abstract_coverage_min: float = 0.5
                     ) -> dict[tuple[str, int], float | None]:
    """Distinct/total tokens over each field-year's pooled text.

    Groups with no tokens are missing (None). For the abstract scope a group
    is emitted only when at least ``abstract_coverage_min`` of its documents
    carry an abstract (coverage of early-era data is too sparse to compare).
    """
    fields = _field_column(corpus, field_level)
    years = corpus.years
    pools: dict[tuple[str, int], list[int, set]] = {}
    present: dict[tuple[str, int], list[int]] = {}
    for i in range(corpus.n_docs):
        key = (fields[i], int(years[i]))
        cov = present.setdefault(key, [0, 0])
        cov[0] += 1
        text = _doc_text(corpus, i, scope)
        if text is None:
            continue
        cov[1] += 1
        slot = pools.setdefault(key, [0, set()])
        toks = preprocess(text, config)
        slot[0] += len(toks)
        slot[1].update(toks)

    out: dict[tuple[str, int], float | None] = {}
    for key, (n_docs, n_with_text) in sorted(present.items()):
        if scope == ABSTRACT and n_with_text / n_docs < abstract_coverage_min:
            continue
        slot = pools.get(key)
        if slot is None or slot[0] == 0:
            out[key] = None
        else:
            out[key] = len(slot[1]) / slot[0]
    return out


def title_pair_set(tokens: list[str]) -> set[tuple[str, str]]:
    """Distinct unordered token pairs over distinct positions of one title.

    An identical-token pair (x, x) exists only when the token occupies two
    positions.
    """
    return {(a, b) if a <= b else (b, a) for a, b in combinations(tokens, 2)}


DISTINCT = "distinct"
INSTANCES = "instances"


def word_pair_novelty(corpus, field_level: str = "area",
                      config: TokenPipelineConfig = TokenPipelineConfig(),
                      denominator: str = DISTINCT
                      ) -> dict[tuple[str, int], float | None]:
    """Share of a field-year's within-title token pairs never seen in the
    field's earlier years.

    The default denominator counts distinct pairs in the focal year; the
    "instances" mode counts per-title pair occurrences instead. Years with no
    multi-token titles are missing and leave the history untouched; a field's
    first productive year scores 1.0 by construction.
    """
    if denominator not in (DISTINCT, INSTANCES):
        raise ValueError(f"denominator must be 'distinct' or 'instances', got {denominator!r}")
    fields = _field_column(corpus, field_level)
    years = corpus.years

    per_year: dict[str, dict[int, list]] = {}
    for i in range(corpus.n_docs):
        title = corpus.titles[i]
        if title is None:
            continue
        pairs = title_pair_set(preprocess(title, config))
        if not pairs:
            continue
        slot = per_year.setdefault(fields[i], {}).setdefault(int(years[i]), [set(), Counter()])
        slot[0].update(pairs)
        slot[1].update(pairs)

    out: dict[tuple[str, int], float | None] = {}
    group_years: dict[tuple[str, int], bool] = {}
    for i in range(corpus.n_docs):
        group_years[(fields[i], int(years[i]))] = True

    for f in sorted(per_year):
        seen: set[tuple[str, str]] = set()
        for y in sorted(per_year[f]):
            pair_set, pair_instances = per_year[f][y]
            new = pair_set - seen
            if denominator == DISTINCT:
                out[(f, y)] = len(new) / len(pair_set)
            else:
                total = sum(pair_instances.values())
                out[(f, y)] = sum(c for p, c in pair_instances.items() if p in new) / total
            seen |= pair_set

    for key in sorted(group_years):
        out.setdefault(key, None)
    return out


def verb_frequency(corpus, periods: list[tuple[int, int]], top_n: int = 10,
                   config: TokenPipelineConfig = TokenPipelineConfig()
                   ) -> dict[tuple[int, int], list[tuple[str, int, int]]]:
    """Top verbs in titles per period of years (bounds inclusive).

    Tokens absent from the part-of-speech lexicon are unclassified and never
    counted. Ties break lexicographically; ranks are 1-based after the sort.
    """
    if not config.pos_lexicon:
        raise ConfigError("verb tables need a non-empty pos lexicon")
    lexicon = config.pos_lexicon
    years = corpus.years
    counts: dict[tuple[int, int], Counter] = {p: Counter() for p in periods}
    for i in range(corpus.n_docs):
        title = corpus.titles[i]
        if title is None:
            continue
        y = int(years[i])
        active = [p for p in periods if p[0] <= y <= p[1]]
        if not active:
            continue
        verbs = [t for t in preprocess(title, config) if lexicon.get(t) == "verb"]
        for p in active:
            counts[p].update(verbs)

    out = {}
    for p in periods:
        ranked = sorted(counts[p].items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
        out[p] = [(lemma, cnt, rank) for rank, (lemma, cnt) in enumerate(ranked, start=1)]
    return out


def decade_periods(corpus) -> list[tuple[int, int]]:
    """One period per decade present in the corpus, for default verb tables."""
    lo = (int(corpus.years.min()) // 10) * 10
    hi = (int(corpus.years.max()) // 10) * 10
    return [(d, d + 9) for d in range(lo, hi + 1, 10)]
