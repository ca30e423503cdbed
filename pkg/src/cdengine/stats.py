"""Desk-scale fixed-effects OLS with robust standard errors, predicted
values, and Shapley-Owen decomposition of model fit across predictor groups.

Fixed effects are expanded to explicit indicators with one reference level
dropped per group; that is deliberate, because the machinery here is meant
for fixtures and subsamples, not the multi-million-level estimations the
full-scale analyses require.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy import linalg as sla
from scipy import stats as sps

from .errors import DataError, RankDeficiencyError

INTERCEPT = "const"


@dataclass(frozen=True)
class RegressionSpec:
    """fe_indicator_cap, when set, absorbs (at most) one fixed-effect group
    whose level count exceeds the cap via within-group demeaning instead of
    indicator expansion; coefficients, errors, and fit statistics match the
    indicator path exactly.
    """

    outcome: str
    covariates: tuple[str, ...] = ()
    interactions: tuple[tuple[str, str], ...] = ()
    fixed_effects: tuple[str, ...] = ()
    robust_se: bool = True
    fe_indicator_cap: int | None = None

    @classmethod
    def from_dict(cls, obj: Mapping) -> "RegressionSpec":
        return cls(
            outcome=obj["outcome"],
            covariates=tuple(obj.get("covariates", ())),
            interactions=tuple(tuple(p) for p in obj.get("interactions", ())),
            fixed_effects=tuple(obj.get("fixed_effects", ())),
            robust_se=bool(obj.get("robust_se", True)),
            fe_indicator_cap=obj.get("fe_indicator_cap"),
        )


@dataclass
class FitResult:
    terms: list[str]
    coef: np.ndarray
    se: np.ndarray
    p: np.ndarray
    r2: float
    adj_r2: float
    n: int
    k: int  # parameters charged to the fit, absorbed group levels included
    dropped_rows: int
    robust: bool
    column_means: np.ndarray = field(repr=False)
    fe_levels: dict[str, list] = field(repr=False, default_factory=dict)
    spec: RegressionSpec | None = field(repr=False, default=None)
    absorbed_group: str | None = None

    def coefficient(self, term: str) -> float:
        return float(self.coef[self.terms.index(term)])


def _numeric_column(data: Mapping, name: str, n: int) -> np.ndarray:
    try:
        raw = data[name]
    except KeyError:
        raise DataError(f"column not found: {name!r}")
    col = np.asarray([np.nan if v is None else float(v) for v in raw], dtype=np.float64)
    if col.shape[0] != n:
        raise DataError(f"column {name!r} has {col.shape[0]} rows, expected {n}")
    return col


def _missing_mask(data: Mapping, spec: RegressionSpec, n: int) -> np.ndarray:
    """True where a row is usable (no missing value in any used column)."""
    ok = np.ones(n, dtype=bool)
    numeric = {spec.outcome, *spec.covariates, *(c for pair in spec.interactions for c in pair)}
    for name in numeric:
        ok &= ~np.isnan(_numeric_column(data, name, n))
    for name in spec.fixed_effects:
        col = data.get(name)
        if col is None:
            raise DataError(f"column not found: {name!r}")
        ok &= np.asarray([v is not None for v in col], dtype=bool)
    return ok


def _common_length(data: Mapping) -> int:
    lengths = {len(data[c]) for c in data}
    if len(lengths) != 1:
        raise DataError("data columns have unequal lengths")
    return lengths.pop()


def _assemble(data: Mapping, spec: RegressionSpec, keep: np.ndarray, n_all: int,
              skip_fe: str | None = None):
    y = _numeric_column(data, spec.outcome, n_all)[keep]
    cols: list[np.ndarray] = [np.ones(y.shape[0])]
    terms: list[str] = [INTERCEPT]
    for c in spec.covariates:
        cols.append(_numeric_column(data, c, n_all)[keep])
        terms.append(c)
    for a, b in spec.interactions:
        cols.append((_numeric_column(data, a, n_all) * _numeric_column(data, b, n_all))[keep])
        terms.append(f"{a}*{b}")

    fe_levels: dict[str, list] = {}
    for g in spec.fixed_effects:
        values = [v for v, k in zip(data[g], keep) if k]
        levels = sorted(set(values))
        fe_levels[g] = levels
        if g == skip_fe:
            continue
        for level in levels[1:]:  # first level is the reference
            cols.append(np.asarray([1.0 if v == level else 0.0 for v in values]))
            terms.append(f"{g}={level}")

    return y, np.column_stack(cols), terms, fe_levels


def build_design(data: Mapping[str, Sequence], spec: RegressionSpec
                 ) -> tuple[np.ndarray, np.ndarray, list[str], dict[str, list], int]:
    """Outcome vector, design matrix (intercept first), term names, fixed
    effect level maps (reference level first), and the listwise-dropped row
    count.
    """
    n_all = _common_length(data)
    keep = _missing_mask(data, spec, n_all)
    dropped = int(n_all - keep.sum())
    y, X, terms, fe_levels = _assemble(data, spec, keep, n_all)
    return y, X, terms, fe_levels, dropped


def _demean_within(y: np.ndarray, X: np.ndarray, labels: list) -> tuple[np.ndarray, np.ndarray, int]:
    """Subtract group means of the absorbed fixed-effect cells from y and X."""
    cells: dict = {}
    for i, lab in enumerate(labels):
        cells.setdefault(lab, []).append(i)
    yd = y.astype(np.float64).copy()
    Xd = X.astype(np.float64).copy()
    for idxs in cells.values():
        sel = np.asarray(idxs)
        yd[sel] -= yd[sel].mean()
        Xd[sel] -= Xd[sel].mean(axis=0)
    return yd, Xd, len(cells)


def _check_rank(X: np.ndarray, terms: list[str]) -> None:
    _, r, piv = sla.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(X.shape) * np.finfo(np.float64).eps * (diag[0] if diag.size else 0.0)
    rank = int((diag > tol).sum())
    if rank < X.shape[1]:
        raise RankDeficiencyError(terms[piv[rank]])


def _pick_absorbed_group(data: Mapping, spec: RegressionSpec, keep: np.ndarray) -> str | None:
    if spec.fe_indicator_cap is None:
        return None
    over = []
    for g in spec.fixed_effects:
        n_levels = len({v for v, k in zip(data[g], keep) if k})
        if n_levels > spec.fe_indicator_cap:
            over.append(g)
    if len(over) > 1:
        raise DataError(
            f"only one fixed-effect group may be absorbed; {over} all exceed the cap")
    return over[0] if over else None


def ols_fit(data: Mapping[str, Sequence], spec: RegressionSpec) -> FitResult:
    """Least squares via SVD with HC1 (or classical) standard errors and
    two-tailed t p-values on n-k degrees of freedom.

    A fixed-effect group whose level count exceeds spec.fe_indicator_cap is
    absorbed by within-group demeaning; its levels still count toward k.
    """
    n_all = _common_length(data)
    keep = _missing_mask(data, spec, n_all)
    dropped = int(n_all - keep.sum())
    absorbed = _pick_absorbed_group(data, spec, keep)

    y, X, terms, fe_levels = _assemble(data, spec, keep, n_all, skip_fe=absorbed)
    n = y.shape[0]
    sst = float(((y - y.mean()) ** 2).sum()) if n else 0.0

    if absorbed is None:
        k = X.shape[1]
    else:
        labels = [v for v, kk in zip(data[absorbed], keep) if kk]
        y, X, n_cells = _demean_within(y, X, labels)
        X = X[:, 1:]  # the intercept demeans to zero; the cell means absorb it
        terms = terms[1:]
        k = X.shape[1] + n_cells

    if n <= k:
        raise DataError(f"n ({n}) must exceed the parameter count ({k})")
    if X.shape[1]:
        _check_rank(X, terms)
        coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ coef
        xtx_inv = np.linalg.inv(X.T @ X)
        if spec.robust_se:
            meat = X.T @ (X * (resid ** 2)[:, None])
            cov = (n / (n - k)) * xtx_inv @ meat @ xtx_inv
        else:
            sigma2 = float(resid @ resid) / (n - k)
            cov = sigma2 * xtx_inv
        se = np.sqrt(np.diag(cov))
    else:
        coef = np.zeros(0)
        resid = y
        se = np.zeros(0)

    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = np.where(se > 0, coef / se, np.inf)
    p = 2.0 * sps.t.sf(np.abs(tstat), df=n - k)

    ssr = float(resid @ resid)
    r2 = 1.0 - ssr / sst if sst > 0 else 0.0
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - k)

    return FitResult(terms, coef, se, p, r2, adj_r2, n, k, dropped, spec.robust_se,
                     column_means=X.mean(axis=0) if X.shape[1] else np.zeros(0),
                     fe_levels=fe_levels, spec=spec, absorbed_group=absorbed)


def _design_row(fit: FitResult, profile: Mapping) -> np.ndarray:
    if fit.absorbed_group is not None:
        raise DataError(
            "predict is unavailable for fits with an absorbed fixed-effect group")
    spec = fit.spec
    x = np.zeros(len(fit.terms))
    x[0] = 1.0
    pos = {t: i for i, t in enumerate(fit.terms)}

    def fetch(name):
        if name not in profile:
            raise DataError(f"profile missing covariate {name!r}")
        return float(profile[name])

    for c in spec.covariates:
        x[pos[c]] = fetch(c)
    for a, b in spec.interactions:
        x[pos[f"{a}*{b}"]] = fetch(a) * fetch(b)
    for g in spec.fixed_effects:
        if g not in profile:
            raise DataError(f"profile missing fixed-effect group {g!r}")
        level = profile[g]
        levels = fit.fe_levels[g]
        if level not in levels:
            raise DataError(f"unknown level {level!r} for fixed-effect group {g!r}")
        if level != levels[0]:
            x[pos[f"{g}={level}"]] = 1.0
    return x


def predict(fit: FitResult, profiles: Sequence[Mapping]) -> np.ndarray:
    """x . beta for each profile; every covariate and FE group must be given."""
    rows = np.vstack([_design_row(fit, p) for p in profiles])
    return rows @ fit.coef


def predict_year_series(fit: FitResult, group: str) -> list[tuple[object, float]]:
    """Predicted outcome per level of one FE group, everything else at its
    sample mean (indicator columns included, i.e. at their sample shares).
    """
    if fit.absorbed_group is not None:
        raise DataError(
            "predictions are unavailable for fits with an absorbed fixed-effect group")
    if group not in fit.fe_levels:
        raise DataError(f"{group!r} is not a fixed-effect group of this fit")
    pos = {t: i for i, t in enumerate(fit.terms)}
    base = fit.column_means.copy()
    base[0] = 1.0
    own = [i for t, i in pos.items() if t.startswith(f"{group}=")]
    out = []
    for level in fit.fe_levels[group]:
        x = base.copy()
        for i in own:
            x[i] = 0.0
        key = f"{group}={level}"
        if key in pos:
            x[pos[key]] = 1.0
        out.append((level, float(x @ fit.coef)))
    return out


# ----------------------------------------------------------------------
# Shapley-Owen decomposition

ADJ_R2 = "adj_r2"
R2 = "r2"


def _subset_spec(outcome: str, columns: Sequence[str], fe_columns: frozenset[str],
                 robust: bool) -> RegressionSpec:
    return RegressionSpec(
        outcome=outcome,
        covariates=tuple(c for c in columns if c not in fe_columns),
        fixed_effects=tuple(c for c in columns if c in fe_columns),
        robust_se=robust,
    )


def shapley_owen(data: Mapping[str, Sequence], outcome: str,
                 groups: Mapping[str, Sequence[str]],
                 fe_columns: Sequence[str] = (),
                 metric: str = ADJ_R2,
                 threads: int = 1) -> dict[str, float]:
    """Allocate model fit across predictor groups via Shapley values over all
    2^n subset models.

    The game value is the subset model's adjusted R-squared by default (the
    empty subset is the intercept-only model, value 0); metric="r2" switches
    to the plain coefficient of determination. Shares always sum to the full
    model's value. Columns named in fe_columns enter as fixed-effect groups,
    everything else as plain covariates.
    """
    if metric not in (ADJ_R2, R2):
        raise ValueError(f"metric must be 'adj_r2' or 'r2', got {metric!r}")
    names = list(groups)
    ng = len(names)
    if ng == 0:
        raise ValueError("need at least one group")
    if ng > 20:
        raise ValueError(f"too many groups for exact decomposition: {ng} (max 20)")
    fe = frozenset(fe_columns)

    def fit_value(subset: frozenset[str]) -> float:
        if not subset:
            return 0.0
        columns = [c for name in names if name in subset for c in groups[name]]
        try:
            fit = ols_fit(data, _subset_spec(outcome, columns, fe, robust=False))
        except DataError as exc:
            raise DataError(f"subset model {sorted(subset)} failed: {exc}") from exc
        return fit.adj_r2 if metric == ADJ_R2 else fit.r2

    subsets = [frozenset(c) for size in range(ng + 1) for c in combinations(names, size)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = dict(zip(subsets, pool.map(fit_value, subsets)))
    else:
        values = {s: fit_value(s) for s in subsets}

    fact = math.factorial
    shares: dict[str, float] = {}
    for g in names:
        total = 0.0
        others = [x for x in names if x != g]
        for size in range(ng):
            w = fact(size) * fact(ng - 1 - size) / fact(ng)
            for combo in combinations(others, size):
                s = frozenset(combo)
                total += w * (values[s | {g}] - values[s])
        shares[g] = total
    return shares
