"""Normalized disruption variants that attenuate the k-class count.

Two modes:

* paper      -- subtract the focal document's own reference count from nk
* field_year -- subtract the mean reference count of the focal document's
                field-year cohort (kept real-valued; the subtraction feeds a
                clamp and a ratio, so rounding would only add quantization)

In both modes nk is clamped at 0, the numerator is untouched, and the
denominator always includes the attenuated nk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .disruption import DisruptionScore, DisruptionTable
from .errors import ContextError

PAPER = "paper"
FIELD_YEAR = "field_year"


@dataclass(frozen=True)
class NormalizationContext:
    mode: str
    nb_mean_lookup: Mapping[tuple[str, int], float] | None = None
    field_level: str = "area"

    def __post_init__(self):
        if self.mode not in (PAPER, FIELD_YEAR):
            raise ValueError(f"normalization mode must be 'paper' or 'field_year', got {self.mode!r}")
        if self.mode == FIELD_YEAR and self.nb_mean_lookup is None:
            raise ValueError("field_year normalization requires an nb_mean_lookup")


def _attenuated_nk(nk: float, subtrahend: float) -> float:
    return max(0.0, nk - subtrahend)


def normalized_cd(score: DisruptionScore, ctx: NormalizationContext,
                  field: str | None = None, year: int | None = None) -> DisruptionScore:
    """Recompute one score with the attenuated nk.

    field/year identify the focal document's cohort and are required in
    field_year mode; a missing lookup row is a data error naming the pair.
    """
    if ctx.mode == PAPER:
        sub = float(score.nb)
    else:
        key = (field, year)
        if field is None or year is None or key not in ctx.nb_mean_lookup:
            raise ContextError(f"no nb_mean row for (field={field!r}, year={year!r})")
        sub = float(ctx.nb_mean_lookup[key])
    nk2 = _attenuated_nk(float(score.nk), sub)
    denom = score.ni + score.nj + nk2
    value = (score.ni - score.nj) / denom if denom > 0 else None
    return DisruptionScore(score.doc_id, score.ni, score.nj, nk2, score.nb, value)


def normalized_values(table: DisruptionTable, corpus, ctx: NormalizationContext) -> np.ndarray:
    """Vectorized normalized scores for a whole batch table (NaN = undefined)."""
    ni = table.ni.astype(np.float64)
    nj = table.nj.astype(np.float64)
    nk = table.nk.astype(np.float64)
    if ctx.mode == PAPER:
        sub = table.nb.astype(np.float64)
    else:
        fields = corpus.field_area if ctx.field_level == "area" else corpus.field_sub
        lookup = ctx.nb_mean_lookup
        sub = np.empty(len(table), dtype=np.float64)
        years = corpus.years
        for i in range(len(table)):
            key = (fields[i], int(years[i]))
            try:
                sub[i] = lookup[key]
            except KeyError:
                raise ContextError(f"no nb_mean row for (field={key[0]!r}, year={key[1]})")
    nk2 = np.maximum(0.0, nk - sub)
    denom = ni + nj + nk2
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(denom > 0, (ni - nj) / np.where(denom > 0, denom, 1.0), np.nan)
