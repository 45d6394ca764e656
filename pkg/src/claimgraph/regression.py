"""Publication-outcome regressions.

Single-regressor OLS of an outcome on one graph measure, optionally with
publication-year fixed effects (absorbed by within-year demeaning, which
matches the dummy-variable estimator) and standard errors clustered by
year (CR0 sandwich with the G/(G-1) * (n-1)/(n-k) small-sample factor).

Outcomes: linear probability models for the three journal-tier indicators
(papers outside the tier, including unpublished ones, enter as zeros) and
log(citations + 1).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import CollinearityError, SchemaError

OUTCOMES = ("Top5", "Top6to20", "Top21to100", "LogCitesPlus1")

TIER_OUTCOMES = {"Top5": "Top5", "Top6to20": "Top6to20", "Top21to100": "Top21to100"}


@dataclass(frozen=True)
class RegressionSpec:
    outcome: str
    measure: str
    view: str = ""
    fixed_effects: bool = True
    cluster: str = "by_year"

    @property
    def column(self) -> str:
        return f"{self.measure}_{self.view}" if self.view else self.measure


@dataclass(frozen=True)
class RegressionResult:
    outcome: str
    measure: str
    alpha: float
    beta: float
    se_beta: float
    n: int
    r_squared: float
    n_params: int
    fixed_effects: bool
    cluster: str


def _demean_by_group(values: np.ndarray, groups: np.ndarray) -> np.ndarray:
    out = values.astype(float).copy()
    for g in np.unique(groups):
        mask = groups == g
        out[mask] -= out[mask].mean()
    return out


def ols_fit(y: np.ndarray, x: np.ndarray, years: np.ndarray,
            fixed_effects: bool = True, cluster: str = "by_year",
            ) -> RegressionResult:
    """Fit y = alpha + beta * x (+ year effects) by least squares.

    With fixed effects, beta comes from within-year demeaned data and the
    reported alpha is the grand intercept (year effects normalized to mean
    zero). r_squared uses the model's actual fitted values, year effects
    included. cluster is "by_year" or "none".
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    years = np.asarray(years)
    n = y.shape[0]
    if not (x.shape[0] == n and years.shape[0] == n):
        raise ValueError("y, x, years must have equal length")
    if cluster not in ("by_year", "none"):
        raise ValueError(f"unknown cluster option {cluster!r}")
    unique_years = np.unique(years)
    if fixed_effects:
        if unique_years.size < 2:
            raise CollinearityError("fixed effects need at least 2 distinct years")
        n_params = 1 + unique_years.size
        x_t = _demean_by_group(x, years)
        y_t = _demean_by_group(y, years)
    else:
        n_params = 2
        x_t = x - x.mean()
        y_t = y - y.mean()
    if n <= n_params:
        raise CollinearityError(f"n={n} too small for {n_params} parameters")
    sxx = float(x_t @ x_t)
    if sxx <= 0.0 or math.isclose(sxx / n, 0.0, abs_tol=1e-30):
        raise CollinearityError(
            "regressor constant within years" if fixed_effects
            else "regressor has zero variance")
    beta = float(x_t @ y_t) / sxx
    resid = y_t - beta * x_t
    if fixed_effects:
        # Year effects absorbed; fitted values rebuilt from year means.
        fitted = y - resid
        alpha = float(y.mean() - beta * x.mean())
    else:
        alpha = float(y.mean() - beta * x.mean())
        fitted = alpha + beta * x
        resid = y - fitted
    sst = float(((y - y.mean()) ** 2).sum())
    ssr = float((resid ** 2).sum())
    r_squared = 1.0 - ssr / sst if sst > 0 else 0.0
    if cluster == "by_year":
        se_beta = clustered_se(x_t, resid, years, n_params)
    else:
        sigma2 = ssr / (n - n_params)
        se_beta = math.sqrt(sigma2 / sxx)
    return RegressionResult(
        outcome="", measure="", alpha=alpha, beta=beta, se_beta=se_beta,
        n=n, r_squared=r_squared, n_params=n_params,
        fixed_effects=fixed_effects, cluster=cluster,
    )


def clustered_se(x_t: np.ndarray, resid: np.ndarray, clusters: np.ndarray,
                 n_params: int) -> float:
    """Cluster-robust standard error of beta from partialled-out data.

    CR0 sandwich on the demeaned regressor (identical to the beta block of
    the full-design sandwich) scaled by G/(G-1) * (n-1)/(n-k).
    """
    labels = np.unique(clusters)
    n_clusters = labels.size
    if n_clusters < 2:
        raise CollinearityError("clustered errors need at least 2 clusters")
    n = x_t.shape[0]
    sxx = float(x_t @ x_t)
    meat = 0.0
    for g in labels:
        mask = clusters == g
        score = float(x_t[mask] @ resid[mask])
        meat += score * score
    correction = (n_clusters / (n_clusters - 1)) * ((n - 1) / (n - n_params))
    variance = correction * meat / (sxx * sxx)
    return math.sqrt(variance)


def _outcome_values(rows: list[dict], outcome: str) -> tuple[list[float | None], bool]:
    """Per-row outcome values (None = missing) and whether any are defined."""
    values: list[float | None] = []
    if outcome in TIER_OUTCOMES:
        for row in rows:
            tier = row.get("pub_tier")
            values.append(1.0 if tier == TIER_OUTCOMES[outcome] else 0.0)
    elif outcome == "LogCitesPlus1":
        for row in rows:
            cites = row.get("citations")
            values.append(None if cites is None else math.log(float(cites) + 1.0))
    else:
        raise ValueError(f"unknown outcome {outcome!r}")
    return values, any(v is not None for v in values)


def run_spec(rows: list[dict], spec: RegressionSpec) -> RegressionResult:
    """Estimate one spec on a measures table (list of per-paper dicts).

    Rows missing the outcome or the measure are dropped pairwise. Raises
    when the outcome is underivable or the regressor is collinear with the
    fixed effects.
    """
    outcome_vals, any_defined = _outcome_values(rows, spec.outcome)
    if not any_defined:
        raise SchemaError(f"outcome {spec.outcome} underivable: no defined values")
    column = spec.column
    y_list: list[float] = []
    x_list: list[float] = []
    year_list: list[int] = []
    for row, y_val in zip(rows, outcome_vals):
        x_val = row.get(column)
        if y_val is None or x_val is None:
            continue
        y_list.append(y_val)
        x_list.append(float(x_val))
        year_list.append(int(row["year"]))
    if not y_list:
        raise SchemaError(f"no usable rows for {spec.outcome} ~ {column}")
    result = ols_fit(np.array(y_list), np.array(x_list), np.array(year_list),
                     fixed_effects=spec.fixed_effects, cluster=spec.cluster)
    return RegressionResult(
        outcome=spec.outcome, measure=column, alpha=result.alpha,
        beta=result.beta, se_beta=result.se_beta, n=result.n,
        r_squared=result.r_squared, n_params=result.n_params,
        fixed_effects=result.fixed_effects, cluster=result.cluster,
    )


def load_spec_file(path: str) -> list[RegressionSpec]:
    """Read regression specs from a CSV with columns
    outcome, measure, view, fe, cluster."""
    specs: list[RegressionSpec] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"outcome", "measure", "view", "fe", "cluster"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise SchemaError(f"{path}: spec file needs columns {sorted(required)}")
        for idx, row in enumerate(reader, start=2):
            outcome = row["outcome"].strip()
            if outcome not in OUTCOMES:
                raise SchemaError(f"{path}: unknown outcome {outcome!r}", line_no=idx)
            fe_raw = row["fe"].strip().lower()
            if fe_raw not in ("0", "1", "true", "false"):
                raise SchemaError(f"{path}: bad fe flag {fe_raw!r}", line_no=idx)
            cluster = row["cluster"].strip() or "none"
            if cluster not in ("by_year", "none"):
                raise SchemaError(f"{path}: bad cluster {cluster!r}", line_no=idx)
            specs.append(RegressionSpec(
                outcome=outcome,
                measure=row["measure"].strip(),
                view=row["view"].strip(),
                fixed_effects=fe_raw in ("1", "true"),
                cluster=cluster,
            ))
    return specs
