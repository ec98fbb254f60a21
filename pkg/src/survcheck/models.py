"""Likelihood families and regression specifications.

Three families are supported:

* ``exponential`` -- constant hazard theta, mean-parameterised via
  log(mu) = eta with theta = 1/mu;
* ``weibull_aft`` -- hazard theta*alpha*(theta*t)^(alpha-1) with
  theta = Gamma(1 + 1/alpha)/mu, so mu is the mean of the distribution;
* ``bernoulli_logit`` -- discrete-time hazard on long-format rows,
  p = logistic(eta).

Event records contribute log densities; censored records contribute log
probabilities (survival for right censoring, CDF for left censoring,
CDF differences for interval censoring).  Every log score carries a
density/probability tag because the two must never be mixed when comparing
models across time scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from .data import (
    EVENT,
    INTERVAL_CENSORED,
    LEFT_CENSORED,
    RIGHT_CENSORED,
    DataError,
    LongDataset,
    Record,
    SurvivalDataset,
)

FAMILIES = ("exponential", "weibull_aft", "bernoulli_logit")

DENSITY = "density"
PROBABILITY = "probability"

# logistic outputs are clamped before taking logs so that extreme linear
# predictors still yield finite scores
_PCLAMP = 1e-15


class ModelError(ValueError):
    """Invalid family parameters or specification."""


class SaturationError(ModelError):
    """Truncated sampling below a point whose survival underflows to 0."""


# ---------------------------------------------------------------------------
# family math (vectorized over params and t)


def _rate(family: str, params) -> np.ndarray:
    """Canonical rate theta from a params dict with 'rate' or 'mean'."""
    if "rate" in params and "mean" in params:
        raise ModelError("give either 'rate' or 'mean', not both")
    if family == "exponential":
        if "rate" in params:
            theta = np.asarray(params["rate"], dtype=float)
        elif "mean" in params:
            theta = 1.0 / np.asarray(params["mean"], dtype=float)
        else:
            raise ModelError("exponential needs 'rate' or 'mean'")
    elif family == "weibull_aft":
        alpha = _shape(params)
        if "rate" in params:
            theta = np.asarray(params["rate"], dtype=float)
        elif "mean" in params:
            mu = np.asarray(params["mean"], dtype=float)
            theta = np.exp(gammaln(1.0 + 1.0 / alpha)) / mu
        else:
            raise ModelError("weibull_aft needs 'rate' or 'mean'")
    else:
        raise ModelError(f"no continuous-time rate for family {family!r}")
    if np.any(theta <= 0) or not np.all(np.isfinite(theta)):
        raise ModelError("rate must be positive and finite")
    return theta


def _shape(params) -> np.ndarray:
    alpha = np.asarray(params.get("shape"), dtype=float)
    if params.get("shape") is None or np.any(alpha <= 0):
        raise ModelError("weibull_aft needs a positive 'shape'")
    return alpha


def log_density(family: str, params, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ModelError("event times must be positive")
    theta = _rate(family, params)
    if family == "exponential":
        return np.log(theta) - theta * t
    alpha = _shape(params)
    z = np.exp(alpha * (np.log(theta) + np.log(t)))
    return np.log(alpha) + alpha * np.log(theta) + (alpha - 1.0) * np.log(t) - z


def log_survival(family: str, params, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ModelError("times must be non-negative")
    theta = _rate(family, params)
    if family == "exponential":
        return -theta * t
    alpha = _shape(params)
    with np.errstate(divide="ignore"):
        logt = np.where(t > 0, np.log(np.maximum(t, 1e-300)), -np.inf)
    z = np.where(t > 0, np.exp(alpha * (np.log(theta) + logt)), 0.0)
    return -z


def cdf(family: str, params, t) -> np.ndarray:
    """F(t) = 1 - S(t), computed as -expm1(log S) for accuracy near 0."""
    return -np.expm1(log_survival(family, params, t))


def log_interval_prob(family: str, params, a, b) -> np.ndarray:
    """log(F(b) - F(a)) = log(S(a) - S(b)), stable for short intervals."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a >= b):
        raise ModelError("interval bounds need a < b")
    ls_a = log_survival(family, params, a)
    ls_b = log_survival(family, params, b)
    with np.errstate(divide="ignore"):
        return ls_a + np.log(-np.expm1(np.minimum(ls_b - ls_a, 0.0)))


def hazard(family: str, params, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ModelError("hazard needs t > 0")
    theta = _rate(family, params)
    if family == "exponential":
        return np.broadcast_to(theta, np.broadcast_shapes(theta.shape, t.shape)).copy()
    alpha = _shape(params)
    return theta * alpha * np.exp((alpha - 1.0) * (np.log(theta) + np.log(t)))


def quantile(family: str, params, u) -> np.ndarray:
    """Inverse CDF for u in [0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u >= 1)):
        raise ModelError("quantile needs u in [0, 1)")
    theta = _rate(family, params)
    h = -np.log1p(-u)  # cumulative hazard at the quantile
    if family == "exponential":
        return h / theta
    alpha = _shape(params)
    with np.errstate(divide="ignore"):
        t = np.exp(np.log(np.where(h > 0, h, 1.0)) / alpha) / theta
    return np.where(h > 0, t, 0.0)


def sample_event_time(family: str, params, rng: np.random.Generator, size=None):
    """Inverse-CDF draw(s); cdf(sample) is uniform by construction."""
    u = rng.random(size)
    return quantile(family, params, u)


def sample_truncated(family: str, params, lower, rng: np.random.Generator, size=None):
    """Draw from the family conditional on exceeding ``lower``.

    Uses u ~ Uniform(F(lower), 1) through the inverse CDF, computed in log
    space: log S(t) = log S(lower) + log(1 - u).  Raises SaturationError if
    F(lower) is numerically 1, i.e. the censor time is beyond the support
    precision of the fitted distribution.
    """
    lower = np.asarray(lower, dtype=float)
    if np.any(cdf(family, params, lower) >= 1.0):
        raise SaturationError("survival at the truncation point underflows to zero")
    theta = _rate(family, params)
    u = rng.random(size)
    ls_lower = log_survival(family, params, lower)
    h = -(ls_lower + np.log1p(-u))  # cumulative hazard of the draw
    if family == "exponential":
        out = h / theta
    else:
        alpha = _shape(params)
        with np.errstate(divide="ignore"):
            out = np.exp(np.log(np.where(h > 0, h, 1.0)) / alpha) / theta
        out = np.where(h > 0, out, 0.0)
    # the contract is strictly greater than the truncation point; guard the
    # measure-zero u=0 draw and float round-down
    return np.maximum(out, np.nextafter(lower, np.inf))


def log_lik_point(family: str, params, record: Record) -> tuple[float, str]:
    """Pointwise log score of one short-format record, with its tag.

    Events score the log density (tag ``density``); every censored record
    scores a log probability (tag ``probability``): survival beyond the
    censor time, CDF below it, or the CDF difference over the bounds.
    """
    if record.status == EVENT:
        return float(log_density(family, params, record.time)), DENSITY
    if record.status == RIGHT_CENSORED:
        return float(log_survival(family, params, record.time)), PROBABILITY
    if record.status == LEFT_CENSORED:
        with np.errstate(divide="ignore"):
            return float(np.log(cdf(family, params, record.time))), PROBABILITY
    if record.status == INTERVAL_CENSORED:
        if record.bounds is None:
            raise ModelError("interval-censored record without bounds")
        a, b = record.bounds
        return float(log_interval_prob(family, params, a, b)), PROBABILITY
    raise ModelError(f"unknown status {record.status!r}")


def logistic(eta) -> np.ndarray:
    """Numerically stable logistic, clamped away from {0, 1}."""
    eta = np.asarray(eta, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        p = np.where(eta >= 0, 1.0 / (1.0 + np.exp(-eta)), np.exp(eta) / (1.0 + np.exp(eta)))
    return np.clip(p, _PCLAMP, 1.0 - _PCLAMP)


# ---------------------------------------------------------------------------
# priors


@dataclass(frozen=True)
class Prior:
    """One of normal / student_t / half_student_t / gamma (shape-rate)."""

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "normal":
            if len(p) != 2 or p[1] <= 0:
                raise ModelError("normal prior needs (loc, scale > 0)")
        elif k == "student_t":
            if len(p) != 3 or p[0] <= 0 or p[2] <= 0:
                raise ModelError("student_t prior needs (df > 0, loc, scale > 0)")
        elif k == "half_student_t":
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ModelError("half_student_t prior needs (df > 0, scale > 0)")
        elif k == "gamma":
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ModelError("gamma prior needs (shape > 0, rate > 0)")
        else:
            raise ModelError(f"unknown prior kind {k!r}")

    def log_pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            loc, scale = self.params
            z = (x - loc) / scale
            return -0.5 * z * z - math.log(scale) - 0.5 * math.log(2 * math.pi)
        if self.kind == "student_t":
            df, loc, scale = self.params
            return _t_log_pdf(x, df, loc, scale)
        if self.kind == "half_student_t":
            df, scale = self.params
            out = _t_log_pdf(x, df, 0.0, scale) + math.log(2.0)
            return np.where(x >= 0, out, -np.inf)
        shape, rate = self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            out = shape * math.log(rate) - gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x
        return np.where(x > 0, out, -np.inf)

    @property
    def location(self) -> float:
        if self.kind in ("normal", "student_t"):
            return self.params[-2]
        if self.kind == "half_student_t":
            return self.params[1] / 2.0
        shape, rate = self.params
        return shape / rate

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


def _t_log_pdf(x, df, loc, scale):
    z = (np.asarray(x, dtype=float) - loc) / scale
    with np.errstate(over="ignore"):
        tail = np.log1p(np.minimum(z * z, 1e300) / df)
    return (
        gammaln((df + 1.0) / 2.0)
        - gammaln(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - math.log(scale)
        - (df + 1.0) / 2.0 * tail
    )


def normal(loc, scale) -> Prior:
    return Prior("normal", (float(loc), float(scale)))


def student_t(df, loc, scale) -> Prior:
    return Prior("student_t", (float(df), float(loc), float(scale)))


def half_student_t(df, scale) -> Prior:
    return Prior("half_student_t", (float(df), float(scale)))


def gamma(shape, rate) -> Prior:
    return Prior("gamma", (float(shape), float(rate)))


def prior_from_dict(d: dict) -> Prior:
    return Prior(d["kind"], tuple(float(v) for v in d["params"]))


# ---------------------------------------------------------------------------
# spline basis


@dataclass(frozen=True)
class SmoothSpec:
    """B-spline smooth term: degree-3 basis, interior knots at quantiles."""

    name: str
    degree: int = 3
    n_knots: int = 5

    def __post_init__(self):
        if self.degree < 1:
            raise ModelError("basis degree must be >= 1")
        if self.n_knots < 0:
            raise ModelError("n_knots must be >= 0")


def spline_knots(x, n_knots: int, degree: int) -> np.ndarray:
    """Full clamped knot vector with interior knots at quantiles of x.

    Duplicated quantile knots (heavily tied covariates) are dropped, so the
    effective number of interior knots may be smaller than requested.
    """
    x = np.asarray(x, dtype=float)
    distinct = np.unique(x)
    if distinct.size < max(n_knots, 2):
        raise ModelError(
            f"need at least {max(n_knots, 2)} distinct values, got {distinct.size}"
        )
    lo, hi = float(distinct[0]), float(distinct[-1])
    if n_knots > 0:
        qs = np.quantile(x, np.linspace(0, 1, n_knots + 2)[1:-1])
        interior = np.unique(qs[(qs > lo) & (qs < hi)])
    else:
        interior = np.array([])
    return np.concatenate([[lo] * (degree + 1), interior, [hi] * (degree + 1)])


def spline_basis(x, knots: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate the B-spline basis (Cox-de Boor) at x, one column per function.

    ``knots`` is a full clamped knot vector as built by spline_knots.  Inputs
    outside the knot range are clamped to it, so the basis rows always sum
    to 1 (partition of unity).
    """
    x = np.clip(np.asarray(x, dtype=float), knots[0], knots[-1])
    n_basis = len(knots) - degree - 1
    if n_basis < degree + 1:
        raise ModelError("knot vector too short for the requested degree")
    out = np.zeros((x.size, n_basis))
    # span index: largest mu with knots[mu] <= x < knots[mu+1] in the
    # non-degenerate range [degree, n_basis - 1]
    mu = np.searchsorted(knots, x, side="right") - 1
    mu = np.clip(mu, degree, n_basis - 1)
    for r, (xi, m) in enumerate(zip(x, mu)):
        vals = np.zeros(degree + 1)
        vals[0] = 1.0
        for d in range(1, degree + 1):
            saved = 0.0
            for j in range(d):
                left = knots[m - d + 1 + j]
                right = knots[m + 1 + j]
                denom = right - left
                term = vals[j] / denom if denom > 0 else 0.0
                vals[j] = saved + (right - xi) * term
                saved = (xi - left) * term
            vals[d] = saved
        out[r, m - degree : m + 1] = vals
    return out


# ---------------------------------------------------------------------------
# model specification and design matrices


@dataclass(frozen=True)
class PriorSet:
    intercept: Prior = field(default_factory=lambda: student_t(3, 0, 2.5))
    fixed: Prior = field(default_factory=lambda: normal(0, 2))
    smooth_coef: Prior = field(default_factory=lambda: normal(0, 2))
    shape: Prior = field(default_factory=lambda: gamma(0.01, 0.01))
    smooth_scale: Prior = field(default_factory=lambda: half_student_t(3, 2.5))

    def to_dict(self) -> dict:
        return {k: getattr(self, k).to_dict() for k in
                ("intercept", "fixed", "smooth_coef", "shape", "smooth_scale")}

    @staticmethod
    def from_dict(d: dict) -> "PriorSet":
        kw = {k: prior_from_dict(v) for k, v in d.items()}
        return PriorSet(**kw)


@dataclass(frozen=True)
class ModelSpec:
    """Family plus linear predictor plus priors.

    ``hierarchical_smooths`` switches spline-coefficient priors from the
    fixed-scale normal to N(0, sigma_l) with a half-t prior on each smooth's
    own scale sigma_l.
    """

    family: str
    fixed: tuple[str, ...] = ()
    smooths: tuple[SmoothSpec, ...] = ()
    intercept: bool = True
    priors: PriorSet = field(default_factory=PriorSet)
    hierarchical_smooths: bool = False
    name: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ModelError(f"unknown family {self.family!r}")
        names = list(self.fixed) + [s.name for s in self.smooths]
        if len(set(names)) != len(names):
            raise ModelError("covariate names must be distinct across terms")
        object.__setattr__(self, "fixed", tuple(self.fixed))
        object.__setattr__(self, "smooths", tuple(self.smooths))

    @property
    def has_shape(self) -> bool:
        return self.family == "weibull_aft"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "intercept": self.intercept,
            "fixed": list(self.fixed),
            "smooths": [
                {"name": s.name, "degree": s.degree, "n_knots": s.n_knots}
                for s in self.smooths
            ],
            "hierarchical_smooths": self.hierarchical_smooths,
            "priors": self.priors.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "ModelSpec":
        return ModelSpec(
            family=d["family"],
            fixed=tuple(d.get("fixed", ())),
            smooths=tuple(
                SmoothSpec(s["name"], s.get("degree", 3), s.get("n_knots", 5))
                for s in d.get("smooths", ())
            ),
            intercept=d.get("intercept", True),
            priors=PriorSet.from_dict(d["priors"]) if "priors" in d else PriorSet(),
            hierarchical_smooths=d.get("hierarchical_smooths", False),
            name=d.get("name", ""),
        )


class ModelDesign:
    """Design-matrix builder fitted to training covariates.

    Learns spline knots and smooth-column centering offsets from the
    training data so new covariate values (e.g. a prediction patient) map
    through the identical basis.  Centering removes the constant direction
    from each smooth's span, keeping the intercept identified.
    """

    def __init__(self, spec: ModelSpec, covariates):
        self.spec = spec
        self.knots = {}
        self.centers = {}
        names = ["b_Intercept"] if spec.intercept else []
        names += [f"b_{f}" for f in spec.fixed]
        for sm in spec.smooths:
            if sm.name not in covariates:
                raise ModelError(f"smooth covariate {sm.name!r} missing from data")
            kn = spline_knots(covariates[sm.name], sm.n_knots, sm.degree)
            self.knots[sm.name] = kn
            basis = spline_basis(covariates[sm.name], kn, sm.degree)
            self.centers[sm.name] = basis.mean(axis=0)
            names += [f"s_{sm.name}_{j + 1}" for j in range(basis.shape[1])]
        for f in spec.fixed:
            if f not in covariates:
                raise ModelError(f"fixed covariate {f!r} missing from data")
        self.parameter_names = names

    @property
    def n_columns(self) -> int:
        return len(self.parameter_names)

    def matrix(self, covariates, n_rows: int | None = None) -> np.ndarray:
        if n_rows is None:
            n_rows = (len(np.asarray(next(iter(covariates.values()))).ravel())
                      if covariates else 1)
        cols = []
        if self.spec.intercept:
            cols.append(np.ones(n_rows))
        for f in self.spec.fixed:
            col = np.asarray(covariates[f], dtype=float).ravel()
            cols.append(np.broadcast_to(col, (n_rows,)) if col.size == 1 else col)
        for sm in self.spec.smooths:
            x = np.asarray(covariates[sm.name], dtype=float).ravel()
            if x.size == 1:
                x = np.broadcast_to(x, (n_rows,))
            basis = spline_basis(x, self.knots[sm.name], sm.degree)
            cols.append(basis - self.centers[sm.name])
        return np.column_stack(cols) if cols else np.ones((n_rows, 1))

    def smooth_slices(self) -> dict[str, slice]:
        """Column slice of each smooth term within the design matrix."""
        start = (1 if self.spec.intercept else 0) + len(self.spec.fixed)
        out = {}
        for sm in self.spec.smooths:
            width = len(self.knots[sm.name]) - sm.degree - 1
            out[sm.name] = slice(start, start + width)
            start += width
        return out


def eta(design: ModelDesign, beta, covariates, n_rows: int | None = None) -> np.ndarray:
    """Linear predictor X @ beta for the given covariate values."""
    X = design.matrix(covariates, n_rows)
    beta = np.asarray(beta, dtype=float)
    if beta.shape[-1] != X.shape[1]:
        raise ModelError(
            f"beta has {beta.shape[-1]} entries but the design has {X.shape[1]} columns"
        )
    return X @ beta.T if beta.ndim == 2 else X @ beta


def bernoulli_interval_prob(design: ModelDesign, beta, covariates) -> np.ndarray:
    """Per-interval event probability p = logistic(eta) for long-format rows."""
    return logistic(eta(design, beta, covariates))


# ---------------------------------------------------------------------------
# draws -> per-subject family parameters and predictive simulation


def subject_params(spec: ModelSpec, design: ModelDesign, draws, covariates,
                   n_rows: int | None = None) -> dict:
    """Family parameters per (record, draw) from a draws matrix.

    Returns dict with 'mean' (n, S) and, for Weibull, 'shape' (S,) arrays
    broadcastable against each other.
    """
    from .data import DrawsMatrix  # local import to avoid cycle in type use

    if isinstance(draws, DrawsMatrix):
        beta = np.column_stack([draws.column(nm) for nm in design.parameter_names])
        alpha = draws.column("alpha") if spec.has_shape else None
    else:
        beta = np.asarray(draws, dtype=float)
        alpha = None
    lin = eta(design, beta, covariates, n_rows)  # (n, S)
    params = {"mean": np.exp(lin)}
    if spec.has_shape:
        if alpha is None:
            raise ModelError("weibull_aft draws need an 'alpha' column")
        params["shape"] = alpha[None, :]
    return params


def posterior_predictive_times(
    spec: ModelSpec, design: ModelDesign, draws, data: SurvivalDataset,
    rng: np.random.Generator, n_draws: int | None = None,
) -> np.ndarray:
    """Simulate event times, one (S, n) matrix of times: row s uses draw s."""
    if spec.family == "bernoulli_logit":
        raise ModelError("posterior predictive event times are for continuous families")
    params = subject_params(spec, design, draws, data.covariates, n_rows=data.n)
    mu = params["mean"]  # (n, S)
    if n_draws is not None and n_draws < mu.shape[1]:
        idx = np.linspace(0, mu.shape[1] - 1, n_draws).astype(int)
        mu = mu[:, idx]
        if "shape" in params:
            params = {"mean": mu, "shape": params["shape"][:, idx]}
        else:
            params = {"mean": mu}
    u = rng.random(mu.shape)
    fam_params = {"mean": mu}
    if "shape" in params:
        fam_params["shape"] = params["shape"]
    return quantile(spec.family, fam_params, u).T  # (S, n)


def impute_censored(
    spec: ModelSpec, design: ModelDesign, draws, data: SurvivalDataset,
    rng: np.random.Generator, n_imputations: int,
) -> list[SurvivalDataset]:
    """Replace right-censored times with truncated posterior-predictive draws.

    Each imputed replicate uses a single posterior parameter draw, so
    parameter uncertainty propagates across replicates.  Every imputed time
    strictly exceeds the censor time it replaces.
    """
    from .data import DrawsMatrix

    if isinstance(draws, DrawsMatrix):
        total = draws.n_draws
    else:
        total = np.asarray(draws).shape[0]
    if n_imputations > total:
        raise ModelError("more imputations requested than available draws")
    params = subject_params(spec, design, draws, data.covariates, n_rows=data.n)
    cens = np.asarray(data.status == RIGHT_CENSORED)
    pick = np.linspace(0, total - 1, n_imputations).astype(int)
    out = []
    for r, s in enumerate(pick):
        time = data.time.copy()
        status = data.status.copy()
        fam_params = {"mean": params["mean"][cens, s]}
        if "shape" in params:
            fam_params["shape"] = params["shape"][0, s]
        time[cens] = sample_truncated(
            spec.family, fam_params, data.time[cens], rng, size=int(cens.sum())
        )
        status[cens] = EVENT
        out.append(data.replace_times(time, status))
    return out


# ---------------------------------------------------------------------------
# shipped model presets (the GIST case-study blocks)


def preset_bernoulli_gist(n_knots: int = 5) -> ModelSpec:
    """Discrete-time recurrence model on long-format rows."""
    return ModelSpec(
        family="bernoulli_logit",
        fixed=("AdjOn", "GenderMale", "Rupture", "Gastric"),
        smooths=(
            SmoothSpec("TimeSinceAdjStopped", n_knots=n_knots),
            SmoothSpec("Time", n_knots=n_knots),
            SmoothSpec("Size", n_knots=n_knots),
            SmoothSpec("AgeAtSurg", n_knots=n_knots),
            SmoothSpec("MitHPF", n_knots=n_knots),
        ),
        priors=PriorSet(intercept=student_t(3, 0, 2.5)),
        name="bernoulli-gist",
    )


def preset_exponential_gist(extra_fixed: tuple[str, ...] = (), n_knots: int = 5) -> ModelSpec:
    """Constant-hazard model on the short form."""
    return ModelSpec(
        family="exponential",
        fixed=("GenderMale", "Rupture", "Gastric") + tuple(extra_fixed),
        smooths=(
            SmoothSpec("Size", n_knots=n_knots),
            SmoothSpec("AgeAtSurg", n_knots=n_knots),
            SmoothSpec("MitHPF", n_knots=n_knots),
        ),
        priors=PriorSet(intercept=student_t(3, 2.3, 2.5)),
        name="exponential-gist",
    )


def preset_weibull_gist(extra_fixed: tuple[str, ...] = (), n_knots: int = 5) -> ModelSpec:
    """Weibull AFT model on the short form."""
    spec = preset_exponential_gist(extra_fixed, n_knots)
    return replace(spec, family="weibull_aft", name="weibull-gist")


PRESETS = {
    "bernoulli-gist": preset_bernoulli_gist,
    "exponential-gist": preset_exponential_gist,
    "weibull-gist": preset_weibull_gist,
}


def get_preset(name: str) -> ModelSpec:
    if name not in PRESETS:
        raise ModelError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return PRESETS[name]()


def training_covariates(spec: ModelSpec, data) -> dict:
    """Covariate dict a spec trains on, for either data format."""
    if isinstance(data, LongDataset):
        return dict(data.covariates)
    if isinstance(data, SurvivalDataset):
        return dict(data.covariates)
    raise DataError("expected SurvivalDataset or LongDataset")
