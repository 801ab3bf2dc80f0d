"""Regression with ARMA(p,d,q)-structured errors.

Model:

    y_t = c + x_t' beta + u_t
    (1 - phi_1 L - ... - phi_p L^p) u_t = (1 + th_1 L + ... + th_q L^q) e_t

with Gaussian innovations e_t. Estimation is exact maximum likelihood: for
a candidate (phi, theta) the target and regressors are whitened through
one shared Kalman pass, the regression coefficients and innovation
variance drop out in closed form (GLS), and a quasi-Newton search with
numeric gradients runs on the resulting profile likelihood. Starting
values come from conditional-sum-of-squares estimates seeded by a
Hannan-Rissanen two-stage regression. Candidate points whose AR/MA roots
approach the unit circle are barrier-penalized so the search stays inside
the stationary/invertible region.

Standard errors come from the observed information matrix (numerical
Hessian of the full log-likelihood over intercept, betas, AR, MA and the
innovation variance); t statistics use the normal approximation for
p-values. AIC is 2k - 2 loglik with k counting every estimated parameter,
variance included.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal

from ..errors import FitFailureError, SchemaError
from .interpolate import interpolate_reference
from .kalman import kalman_innovations
from .series import SubjectSeries

_BIG = 1e12
_ROOT_INVARIANT = 1e-6  # returned models must have root radii above 1 + this
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings for maximum-likelihood estimation."""

    max_iter: int = 500
    rel_tol: float = 1e-8  # relative likelihood-change stopping rule
    stationarity_margin: float = 1e-4  # barrier starts at radius 1 + margin


@dataclass(frozen=True)
class RegArimaModel:
    """Fitted regression-ARIMA model; immutable.

    ``betas`` preserves predictor order. ``fitted_values`` and
    ``residuals`` are the in-sample one-step-ahead predictions and
    prediction errors on the (differenced, when d > 0) target scale. For
    models loaded from JSON they are ``None`` until ``predict`` is run.
    """

    p: int
    d: int
    q: int
    intercept: float
    ar: tuple[float, ...]
    ma: tuple[float, ...]
    betas: dict[str, float]
    variance: float
    predictors: tuple[str, ...]
    std_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    loglik: float
    aic: float
    n_obs: int
    output_scale: str = "identity"
    fitted_values: np.ndarray | None = None
    residuals: np.ndarray | None = None
    objective_trace: tuple[float, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    def coefficient_names(self) -> list[str]:
        names = ["intercept"]
        names += [f"ar{i}" for i in range(1, self.p + 1)]
        names += [f"ma{i}" for i in range(1, self.q + 1)]
        names += [f"beta({name})" for name in self.predictors]
        names.append("variance")
        return names

    def coefficient_values(self) -> dict[str, float]:
        values = {"intercept": self.intercept}
        values.update({f"ar{i + 1}": v for i, v in enumerate(self.ar)})
        values.update({f"ma{i + 1}": v for i, v in enumerate(self.ma)})
        values.update({f"beta({n})": v for n, v in self.betas.items()})
        values["variance"] = self.variance
        return values

    def coefficient_table(self) -> list[dict]:
        """Full coefficient report: one row per estimated parameter with
        value, standard error, t statistic and p-value."""
        values = self.coefficient_values()
        return [
            {
                "name": name,
                "value": values[name],
                "std_error": self.std_errors.get(name, float("nan")),
                "t_stat": self.t_stats.get(name, float("nan")),
                "p_value": self.p_values.get(name, float("nan")),
            }
            for name in self.coefficient_names()
        ]


@dataclass(frozen=True)
class PredictionResult:
    """In-sample one-step-ahead predictions for one subject."""

    timestamps: np.ndarray
    reference: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram: len(edges) == len(counts) + 1."""

    edges: np.ndarray
    counts: np.ndarray


OUTPUT_SCALES = ("identity", "log")


def _apply_output_scale(y: np.ndarray, scale: str) -> np.ndarray:
    """Target transform; 'identity' or natural 'log'. Declared by the
    caller, never inferred from the data."""
    if scale == "identity":
        return y
    if scale == "log":
        if np.any(y <= 0.0):
            raise ValueError("log output scale requires a strictly positive target")
        return np.log(y)
    raise ValueError(f"output_scale must be one of {OUTPUT_SCALES}, got {scale!r}")


# ---------------------------------------------------------------------------
# Differencing helpers
# ---------------------------------------------------------------------------


def difference(x, d: int) -> np.ndarray:
    """Apply d rounds of first differencing; d=0 is the identity."""
    x = np.asarray(x, dtype=float)
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d!r}")
    for _ in range(d):
        x = np.diff(x, axis=0)
    return x


def integrate(dx, heads) -> np.ndarray:
    """Invert :func:`difference`.

    ``heads[i]`` is the first sample of the series after ``i`` rounds of
    differencing (``heads[0]`` is the original first sample), so
    ``integrate(difference(x, d), [x[0], difference(x,1)[0], ...]) == x``.
    """
    x = np.asarray(dx, dtype=float)
    for h in reversed(list(heads)):
        x = np.concatenate(([h], h + np.cumsum(x)))
    return x


# ---------------------------------------------------------------------------
# Stationarity / invertibility machinery
# ---------------------------------------------------------------------------


def _poly_min_root(coeffs, sign: float) -> float:
    """Minimum root magnitude of 1 + sign*(c1 z + c2 z^2 + ...)."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0 or np.all(c == 0.0):
        return math.inf
    poly = np.concatenate(([1.0], sign * c))[::-1]
    nz = np.nonzero(poly)[0]
    poly = poly[nz[0] :]
    if poly.size < 2:
        return math.inf
    roots = np.roots(poly)
    if roots.size == 0:
        return math.inf
    return float(np.min(np.abs(roots)))


def ar_min_root(phi) -> float:
    """Minimum AR-polynomial root magnitude (stationary iff > 1)."""
    return _poly_min_root(phi, -1.0)


def ma_min_root(theta) -> float:
    """Minimum MA-polynomial root magnitude (invertible iff > 1)."""
    return _poly_min_root(theta, 1.0)


def _barrier(phi, theta, margin: float) -> float:
    """Smooth penalty ramping up inside the (1, 1+margin] root band."""
    pen = 0.0
    lim = 1.0 + margin
    for rmin in (ar_min_root(phi), ma_min_root(theta)):
        if rmin < lim:
            x = (lim - rmin) / margin
            pen += 1e4 * x * x
    return pen


def _roots_valid(phi, theta) -> bool:
    return min(ar_min_root(phi), ma_min_root(theta)) > 1.0


# ---------------------------------------------------------------------------
# Likelihood machinery
# ---------------------------------------------------------------------------


def _profile_parts(x, y, Z, p, q):
    """GLS step at fixed (phi, theta): returns (nll, beta, sigma2) or None
    when the candidate is numerically unusable."""
    phi = x[:p]
    theta = x[p : p + q]
    n = y.size
    cols = np.column_stack([y, Z])
    try:
        V, F = kalman_innovations(cols, phi, theta)
    except Exception:
        return None
    if not np.all(np.isfinite(F)) or not np.all(np.isfinite(V)):
        return None
    inv_sqrt = 1.0 / np.sqrt(F)
    wy = V[:, 0] * inv_sqrt
    wZ = V[:, 1:] * inv_sqrt[:, None]
    beta, *_ = np.linalg.lstsq(wZ, wy, rcond=None)
    resid = wy - wZ @ beta
    rss = float(resid @ resid)
    sigma2 = rss / n
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        return None
    nll = 0.5 * (n * (LOG_2PI + math.log(sigma2) + 1.0) + float(np.log(F).sum()))
    return nll, beta, sigma2


def _profile_objective(x, y, Z, p, q, margin):
    phi = x[:p]
    theta = x[p : p + q]
    rmin = min(ar_min_root(phi), ma_min_root(theta))
    if rmin <= 1.0:
        return 1e4 + _BIG * (1.0 + max(0.0, 1.0 - rmin))
    parts = _profile_parts(x, y, Z, p, q)
    if parts is None:
        return 1e4 + _BIG
    return parts[0] + _barrier(phi, theta, margin)


def _full_loglik(w, y, Z, p, q):
    """Exact Gaussian log-likelihood over the full parameter vector
    w = [intercept+betas, phi, theta, sigma2]."""
    k1 = Z.shape[1]
    coef = w[:k1]
    phi = w[k1 : k1 + p]
    theta = w[k1 + p : k1 + p + q]
    sigma2 = w[-1]
    if sigma2 <= 0.0 or not _roots_valid(phi, theta):
        return -math.inf
    u = y - Z @ coef
    try:
        V, F = kalman_innovations(u, phi, theta)
    except Exception:
        return -math.inf
    v = V[:, 0]
    n = y.size
    return -0.5 * (
        n * (LOG_2PI + math.log(sigma2))
        + float(np.log(F).sum())
        + float(np.sum(v * v / F)) / sigma2
    )


def _observed_information(w, y, Z, p, q):
    """Numerical Hessian of the negative log-likelihood at the optimum.

    Steps on the ARMA coefficients shrink until the perturbed points stay
    inside the stationary/invertible region (the likelihood is -inf
    outside), so near-unit-root optima still yield finite curvature.
    """
    k = w.size
    f0 = -_full_loglik(w, y, Z, p, q)
    h = np.maximum(1e-4 * np.abs(w), 1e-6)
    h[-1] = min(h[-1], w[-1] / 3.0)  # keep sigma2 positive

    def f(delta):
        return -_full_loglik(w + delta, y, Z, p, q)

    def basis(i, step):
        e = np.zeros(k)
        e[i] = step
        return e

    for i in range(k):
        for _ in range(40):
            if math.isfinite(f(basis(i, h[i]))) and math.isfinite(f(basis(i, -h[i]))):
                break
            h[i] *= 0.5

    H = np.empty((k, k))
    for i in range(k):
        H[i, i] = (f(basis(i, h[i])) - 2.0 * f0 + f(basis(i, -h[i]))) / (h[i] * h[i])
    for i in range(k):
        for j in range(i + 1, k):
            hi, hj = h[i], h[j]
            value = math.nan
            for _ in range(40):
                corners = (
                    f(basis(i, hi) + basis(j, hj)),
                    f(basis(i, hi) + basis(j, -hj)),
                    f(basis(i, -hi) + basis(j, hj)),
                    f(basis(i, -hi) + basis(j, -hj)),
                )
                if all(math.isfinite(c) for c in corners):
                    value = (corners[0] - corners[1] - corners[2] + corners[3]) / (
                        4.0 * hi * hj
                    )
                    break
                hi *= 0.5
                hj *= 0.5
            H[i, j] = H[j, i] = value
    return H


def _coefficient_stats(H):
    """(std errors, covariance-ok flag) from the observed information."""
    k = H.shape[0]
    try:
        cov = np.linalg.inv(H)
        ok = True
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(H)
        ok = False
    diag = np.diag(cov).copy()
    bad = ~np.isfinite(diag) | (diag <= 0.0)
    if np.any(bad):
        ok = False
        diag[bad] = np.nan
    return np.sqrt(diag), ok


def _normal_p_value(t: float) -> float:
    if not math.isfinite(t):
        return float("nan")
    return math.erfc(abs(t) / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Starting values
# ---------------------------------------------------------------------------


def _lag_matrix(x, lags: int) -> np.ndarray:
    n = x.size
    return np.column_stack([x[lags - j - 1 : n - j - 1] for j in range(lags)])


def _shrink_to_valid(phi, theta, margin):
    phi = np.asarray(phi, dtype=float).copy()
    theta = np.asarray(theta, dtype=float).copy()
    for _ in range(200):
        if min(ar_min_root(phi), ma_min_root(theta)) > 1.0 + 2.0 * margin:
            return phi, theta
        phi *= 0.95
        theta *= 0.95
    return np.zeros_like(phi), np.zeros_like(theta)


def _hannan_rissanen(u, p, q, margin):
    """Two-stage regression start for (phi, theta)."""
    n = u.size
    if p + q == 0:
        return np.empty(0), np.empty(0)
    h = min(max(20, 2 * (p + q)), max(n // 4, p + q + 1))
    eps = np.zeros(n)
    if q > 0:
        M = _lag_matrix(u, h)
        target = u[h:]
        coef, *_ = np.linalg.lstsq(M, target, rcond=None)
        eps[h:] = target - M @ coef
        start = max(p, h + q)
    else:
        start = p
    cols = []
    for j in range(1, p + 1):
        cols.append(u[start - j : n - j])
    for j in range(1, q + 1):
        cols.append(eps[start - j : n - j])
    M2 = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(M2, u[start:], rcond=None)
    return _shrink_to_valid(coef[:p], coef[p:], margin)


def _css_objective(x, u, p, q, margin):
    phi = x[:p]
    theta = x[p : p + q]
    rmin = min(ar_min_root(phi), ma_min_root(theta))
    if rmin <= 1.0:
        return 1e4 + _BIG * (1.0 + max(0.0, 1.0 - rmin))
    eps = signal.lfilter(np.r_[1.0, -phi], np.r_[1.0, theta], u)
    mss = float(np.mean(eps * eps))
    if not (mss > 0.0 and math.isfinite(mss)):
        return 1e4 + _BIG
    return 0.5 * u.size * math.log(mss) + _barrier(phi, theta, margin)


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------


def fit_series(
    y,
    x_matrix,
    orders: tuple[int, int, int],
    predictor_names,
    config: FitConfig = FitConfig(),
    output_scale: str = "identity",
) -> RegArimaModel:
    """Fit the regression-ARMA model to explicit target/regressor arrays.

    ``x_matrix`` is (n, k) with columns matching ``predictor_names``; pass
    an (n, 0) array for a pure ARMA fit. Differencing (d > 0) applies to
    the target and the regressors alike; ``output_scale`` transforms the
    target first ('log' fits log-glucose) and is recorded on the model.
    """
    p, d, q = (int(v) for v in orders)
    if p < 0 or d < 0 or q < 0:
        raise ValueError(f"orders must be non-negative, got {orders!r}")
    y = np.asarray(y, dtype=float)
    X = np.asarray(x_matrix, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = tuple(predictor_names)
    if X.shape[1] != len(names):
        raise ValueError(
            f"predictor matrix has {X.shape[1]} columns but {len(names)} names"
        )
    if y.ndim != 1 or X.shape[0] != y.size:
        raise ValueError("y and x_matrix must share their first dimension")

    y = difference(_apply_output_scale(y, output_scale), d)
    X = difference(X, d)
    n = y.size
    k = len(names)
    needed = max(10 * (p + q + k), p + q + k + 3)
    if n < needed:
        raise ValueError(
            f"series too short: n={n} after differencing, need >= {needed} "
            f"for orders ({p},{d},{q}) with {k} predictors"
        )

    Z = np.column_stack([np.ones(n), X])
    margin = config.stationarity_margin

    # Starting values: OLS -> Hannan-Rissanen -> conditional sum of squares.
    beta_ols, *_ = np.linalg.lstsq(Z, y, rcond=None)
    u0 = y - Z @ beta_ols
    phi0, theta0 = _hannan_rissanen(u0, p, q, margin)
    x0 = np.concatenate([phi0, theta0])
    if p + q > 0:
        css = optimize.minimize(
            _css_objective,
            x0,
            args=(u0, p, q, margin),
            method="L-BFGS-B",
            options={"maxiter": 200},
        )
        x0 = css.x

    trace: list[float] = []
    diagnostics: dict = {}
    if p + q > 0:
        obj_args = (y, Z, p, q, margin)
        f0 = _profile_objective(x0, *obj_args)
        trace.append(f0)

        def _record(xk):
            trace.append(_profile_objective(xk, *obj_args))

        res = optimize.minimize(
            _profile_objective,
            x0,
            args=obj_args,
            method="L-BFGS-B",
            callback=_record,
            options={"maxiter": config.max_iter, "ftol": config.rel_tol},
        )
        diagnostics.update(
            optimizer_status=int(res.status),
            optimizer_message=str(res.message),
            n_iterations=int(res.nit),
            n_evaluations=int(res.nfev),
        )
        if res.fun <= f0:
            x_opt, f_opt = res.x, float(res.fun)
        else:
            x_opt, f_opt = x0, f0
        if not res.success:
            # Line searches stall where numeric gradients lose accuracy
            # (typically near the stationarity barrier on very smooth
            # targets). Polish derivative-free; fail only if that cannot
            # settle either.
            nm = optimize.minimize(
                _profile_objective,
                x_opt,
                args=obj_args,
                method="Nelder-Mead",
                callback=_record,
                options={
                    "maxiter": config.max_iter * (p + q),
                    "fatol": max(config.rel_tol * max(1.0, abs(f_opt)), 1e-10),
                    "xatol": 1e-8,
                },
            )
            diagnostics.update(
                polish_status=int(nm.status),
                polish_message=str(nm.message),
                polish_iterations=int(nm.nit),
            )
            if nm.fun <= f_opt:
                x_opt, f_opt = nm.x, float(nm.fun)
            if not nm.success:
                raise FitFailureError(
                    "maximum-likelihood search did not converge: "
                    f"{res.message}; polish: {nm.message}",
                    diagnostics,
                )
    else:
        x_opt = np.empty(0)

    phi = x_opt[:p]
    theta = x_opt[p : p + q]
    if not _roots_valid(phi, theta):
        raise FitFailureError(
            "optimum is not stationary/invertible", diagnostics
        )
    parts = _profile_parts(x_opt, y, Z, p, q)
    if parts is None:
        raise FitFailureError("likelihood undefined at the optimum", diagnostics)
    nll, coef, sigma2 = parts
    loglik = -nll

    rmin = min(ar_min_root(phi), ma_min_root(theta))
    if rmin <= 1.0 + _ROOT_INVARIANT:
        raise FitFailureError(
            f"root radius {rmin!r} violates the stationarity/invertibility "
            f"invariant (> {1.0 + _ROOT_INVARIANT})",
            diagnostics,
        )

    # Full-parameter observed information for standard errors.
    w = np.concatenate([coef, phi, theta, [sigma2]])
    H = _observed_information(w, y, Z, p, q)
    se, cov_ok = _coefficient_stats(H)
    diagnostics["information_matrix_ok"] = cov_ok
    diagnostics["min_root_radius"] = rmin

    # In-sample one-step-ahead predictions and residuals.
    u_hat = y - Z @ coef
    V, F = kalman_innovations(u_hat, phi, theta)
    resid = V[:, 0]
    fitted = y - resid
    fitted.flags.writeable = False
    resid.flags.writeable = False

    k_params = w.size
    aic = 2.0 * k_params - 2.0 * loglik

    row_names = (
        ["intercept"]
        + [f"ar{i}" for i in range(1, p + 1)]
        + [f"ma{i}" for i in range(1, q + 1)]
        + [f"beta({nm})" for nm in names]
        + ["variance"]
    )
    # w is ordered [intercept, betas..., phi..., theta..., sigma2]; rows are
    # reported intercept, AR, MA, betas, variance.
    value_by_row = {"intercept": float(coef[0]), "variance": float(sigma2)}
    se_by_row = {"intercept": float(se[0]), "variance": float(se[-1])}
    for i in range(p):
        value_by_row[f"ar{i + 1}"] = float(phi[i])
        se_by_row[f"ar{i + 1}"] = float(se[1 + k + i])
    for i in range(q):
        value_by_row[f"ma{i + 1}"] = float(theta[i])
        se_by_row[f"ma{i + 1}"] = float(se[1 + k + p + i])
    for i, nm in enumerate(names):
        value_by_row[f"beta({nm})"] = float(coef[1 + i])
        se_by_row[f"beta({nm})"] = float(se[1 + i])
    t_by_row = {
        nm: value_by_row[nm] / se_by_row[nm] if se_by_row[nm] > 0 else float("nan")
        for nm in row_names
    }
    p_by_row = {nm: _normal_p_value(t_by_row[nm]) for nm in row_names}

    return RegArimaModel(
        p=p,
        d=d,
        q=q,
        intercept=float(coef[0]),
        ar=tuple(float(v) for v in phi),
        ma=tuple(float(v) for v in theta),
        betas={nm: float(coef[1 + i]) for i, nm in enumerate(names)},
        variance=float(sigma2),
        predictors=names,
        std_errors=se_by_row,
        t_stats=t_by_row,
        p_values=p_by_row,
        loglik=float(loglik),
        aic=float(aic),
        n_obs=int(n),
        output_scale=output_scale,
        fitted_values=fitted,
        residuals=resid,
        objective_trace=tuple(trace),
        diagnostics=diagnostics,
    )


def fit(
    subject: SubjectSeries,
    orders: tuple[int, int, int],
    predictors,
    config: FitConfig = FitConfig(),
    interp_method: str = "pchip",
    output_scale: str = "identity",
) -> RegArimaModel:
    """Fit against a subject: the target is the reference glucose
    interpolated onto the measurement grid."""
    y = interpolate_reference(subject.ref_points, subject.timestamps, interp_method)
    names = tuple(predictors)
    try:
        X = subject.predictor_matrix(names)
    except KeyError as exc:
        raise SchemaError(str(exc.args[0]))
    return fit_series(y, X, orders, names, config, output_scale=output_scale)


def predict(
    model: RegArimaModel,
    subject: SubjectSeries,
    interp_method: str = "pchip",
) -> PredictionResult:
    """In-sample one-step-ahead glucose predictions for ``subject``.

    Predicting on the training subject reproduces the fit-time residuals.
    With d > 0 the result lives on the differenced scale and the leading
    d timestamps are dropped.
    """
    y_full = interpolate_reference(subject.ref_points, subject.timestamps, interp_method)
    try:
        X_full = subject.predictor_matrix(model.predictors)
    except KeyError as exc:
        raise SchemaError(str(exc.args[0]))
    y = difference(_apply_output_scale(y_full, model.output_scale), model.d)
    X = difference(X_full, model.d)
    beta = np.array([model.betas[nm] for nm in model.predictors])
    u = y - model.intercept - (X @ beta if beta.size else 0.0)
    V, F = kalman_innovations(u, np.array(model.ar), np.array(model.ma))
    resid = V[:, 0]
    fitted = y - resid
    return PredictionResult(
        timestamps=subject.timestamps[model.d :].copy(),
        reference=y,
        fitted=fitted,
        residuals=resid,
    )


def significance_filter(model: RegArimaModel, alpha: float = 0.05) -> list[str]:
    """Coefficient rows whose p-value beats ``alpha``; rows at or above the
    threshold are flagged removable (returned set excludes them). The
    variance row is bookkeeping, not a predictor, and is never listed."""
    retained = []
    for row in model.coefficient_table():
        if row["name"] == "variance":
            continue
        if row["p_value"] < alpha:
            retained.append(row["name"])
    return retained


def residual_histogram(residuals, n_bins: int) -> Histogram:
    """Equal-width histogram over [min, max]; counts sum to len(residuals)."""
    res = np.asarray(residuals, dtype=float)
    if res.size == 0:
        raise ValueError("residuals must be non-empty")
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins!r}")
    counts, edges = np.histogram(res, bins=n_bins)
    return Histogram(edges=edges, counts=counts)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_MODEL_SCHEMA = "regarima-model"


def model_to_json(model: RegArimaModel) -> str:
    """Serialize the model with its full coefficient table."""
    from .. import __version__

    payload = {
        "schema": _MODEL_SCHEMA,
        "version": __version__,
        "orders": [model.p, model.d, model.q],
        "predictors": list(model.predictors),
        "output_scale": model.output_scale,
        "n_obs": model.n_obs,
        "loglik": model.loglik,
        "aic": model.aic,
        "coefficients": model.coefficient_table(),
    }
    return json.dumps(payload, indent=2)


def model_from_json(text: str) -> RegArimaModel:
    """Rebuild a model from its JSON form (fit diagnostics and in-sample
    arrays are not stored; run ``predict`` to regenerate predictions)."""
    try:
        payload = json.loads(text)
        if payload["schema"] != _MODEL_SCHEMA:
            raise SchemaError(
                f"expected schema {_MODEL_SCHEMA!r}, got {payload['schema']!r}"
            )
        p, d, q = (int(v) for v in payload["orders"])
        predictors = tuple(payload["predictors"])
        rows = {r["name"]: r for r in payload["coefficients"]}
        values = {nm: float(rows[nm]["value"]) for nm in rows}
        return RegArimaModel(
            p=p,
            d=d,
            q=q,
            intercept=values["intercept"],
            ar=tuple(values[f"ar{i}"] for i in range(1, p + 1)),
            ma=tuple(values[f"ma{i}"] for i in range(1, q + 1)),
            betas={nm: values[f"beta({nm})"] for nm in predictors},
            variance=values["variance"],
            predictors=predictors,
            std_errors={nm: float(rows[nm]["std_error"]) for nm in rows},
            t_stats={nm: float(rows[nm]["t_stat"]) for nm in rows},
            p_values={nm: float(rows[nm]["p_value"]) for nm in rows},
            loglik=float(payload["loglik"]),
            aic=float(payload["aic"]),
            n_obs=int(payload["n_obs"]),
            output_scale=str(payload.get("output_scale", "identity")),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"malformed model JSON: {exc}")
